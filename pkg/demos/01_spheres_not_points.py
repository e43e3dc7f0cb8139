#!/usr/bin/env python3
"""Why a quaternionic matrix has eigen*spheres*.

Run: python3 demos/01_spheres_not_points.py
"""
import numpy as np

from qspectral.hmat import HMatrix, diag, inverse, matmul, singular_values
from qspectral.quat import I, J, K, Quaternion
from qspectral.sspec import q_pencil, s_spectrum

print("(1) diag(i, j): two different entries, one sphere.")
A = diag([I, J])
for sph, mult in s_spectrum(A):
    print(f"    sphere u = {sph.u:+.3f}, v = {sph.v:.3f}, multiplicity {mult}")
print("    i and j both have real part 0 and |imaginary part| 1, so they share")
print("    the sphere {0 + 1*I : I^2 = -1}.\n")

print("(2) The pencil Q_q(A) = A^2 - 2 Re(q) A + |q|^2 I only sees (Re q, |Im q|).")
for q in (I, K, Quaternion(0, 0.6, 0.0, 0.8), Quaternion(0, 0.0, 0.6, 0.8)):
    smin = singular_values(q_pencil(A, q))[-1]
    print(f"    q = {q}: smallest singular value of Q_q(A) = {smin:.1e}")
print("    Every point of the unit imaginary sphere makes the pencil singular.\n")

rng = np.random.default_rng(1)
print("(3) Similarity moves entries around but keeps the spheres.")
S = HMatrix(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
            rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
B = matmul(matmul(S, diag([Quaternion(1, 2), Quaternion(1, 0, 2), -0.5])), inverse(S))
for sph, mult in s_spectrum(B):
    print(f"    sphere u = {sph.u:+.6f}, v = {sph.v:.6f}, multiplicity {mult}")
print("    1 + 2i and 1 + 2j land on the same sphere (u, v) = (1, 2).")
