#!/usr/bin/env python3
"""A self-adjoint matrix with a non-real left eigenvalue.

T = [[0, i], [-i, 0]] equals its conjugate transpose. Its S-spectrum is real,
as one expects of a self-adjoint operator. Yet T u = j u for u = (1, -k):
left eigenvalues need not be real. That is why the spectral theory here is
built on the pencil Q_q(T) and not on T - q I.

Run: python3 demos/04_self_adjoint_but_not_real.py
"""
from qspectral.hmat import HMatrix, matmul, scale_left, singular_values
from qspectral.quat import J
from qspectral.sspec import q_pencil, s_spectrum

T = HMatrix([[0, 1j], [-1j, 0]])
print(f"T equals its conjugate transpose: {T == T.H}")
print("S-spectrum:", [(round(s.u, 12), s.v) for s in s_spectrum(T).sphere_list()])

u = HMatrix([[1], [0]], [[0], [-1j]])  # the column (1, -k)
print(f"||T u - j u|| = {(matmul(T, u) - scale_left(J, u)).norm():.1e}")

print(f"smallest singular value of Q_j(T): {singular_values(q_pencil(T, J))[-1]:.3f}")
print("So j is a left eigenvalue but the sphere through j is not in the S-spectrum.")
