#!/usr/bin/env python3
"""f(A) for a quaternionic matrix by integrating around its spectrum.

The integral runs over small circles in the complex slice plane, one circle
per spectral point (two for a non-real sphere). A trapezoid rule on a circle
converges geometrically for analytic integrands, so doubling the nodes
a few times is enough.

Run: python3 demos/02_calculus_on_circles.py
"""
import numpy as np

from qspectral.generators import core_nilpotent_matrix
from qspectral.hmat import identity, matmul
from qspectral.scalc import (exp_fn, full_contours, func_calc, poly, riesz_projection,
                             spectral_mapping_check)
from qspectral.sspec import s_spectrum

g = core_nilpotent_matrix(4, np.random.default_rng(5), core_dim=4)
A = g.A
spec = s_spectrum(A)
print("Spectrum of A:")
for sph, mult in spec:
    print(f"    (u, v) = ({sph.u:+.4f}, {sph.v:.4f}) x{mult}")

cont = full_contours(A)
print(f"\n{len(cont.circles)} circles of radius {cont.circles[0].radius:.3f}")

sq = func_calc(poly([0, 0, 1]), A, cont)
print(f"||f(A) - A^2|| for f = z^2: {(sq - matmul(A, A)).norm():.1e}")

E = func_calc(exp_fn(), A, full_contours(A, exp_fn()))
series = identity(4)
term = identity(4)
for k in range(1, 40):
    term = matmul(term, A) / k
    series = series + term
print(f"||exp via contours - Taylor series||: {(E - series).norm():.1e}")

rep = spectral_mapping_check(exp_fn(), A)
print(f"spectrum of exp(A) vs exp of the spectrum: max deviation {rep.max_deviation:.1e}")

print("\nRiesz projections onto each sphere add up to the identity:")
total = identity(4) * 0.0
for sph in spec.sphere_list():
    P = riesz_projection(A, [sph], spec)
    total = total + P
    print(f"    sphere ({sph.u:+.3f}, {sph.v:.3f}): ||P^2 - P|| = {(matmul(P, P) - P).norm():.1e}")
print(f"    ||sum - I|| = {(total - identity(4)).norm():.1e}")
