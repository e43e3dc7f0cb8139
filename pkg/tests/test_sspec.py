import math

import numpy as np
import pytest

from qspectral.exceptions import SpectrumError
from qspectral.generators import core_nilpotent_matrix, random_hmatrix
from qspectral.hmat import (HMatrix, _pullback, complex_adjoint, diag, identity, inverse,
                            matmul, operator_norm, rank, zeros)
from qspectral.quat import I, J, K, EigenSphere, Quaternion
from qspectral.sspec import (Spectrum, gelfand_sequence, is_quasinilpotent, match_spheres,
                             pseudo_resolvent_series, q_pencil, s_resolvent_left, s_spectrum,
                             spectral_radius_gelfand)

T = HMatrix.from_entries([[0, I], [-I, 0]])
JORDAN = HMatrix([[0, 1], [0, 0]])


def spheres(spec):
    return sorted((round(s.u, 9), round(s.v, 9), m) for s, m in spec)


def test_pencil_examples():
    q = Quaternion(0.5, 1, -2, 0.3)
    assert q_pencil(zeros(2), q).allclose(identity(2) * (0.25 + 1 + 4 + 0.09), atol=1e-14)
    A = random_hmatrix(3, np.random.default_rng(0))
    assert q_pencil(A, I) == q_pencil(A, J)
    P = q_pencil(T, 1.0)
    assert P.allclose(identity(2) * 2.0 - T * 2.0, atol=1e-15)
    assert rank(P) == 1


def test_pencil_sphere_invariance(rng):
    A = random_hmatrix(4, rng)
    for _ in range(50):
        q = Quaternion(*rng.standard_normal(4))
        w = rng.standard_normal(3)
        w /= np.linalg.norm(w)
        v = math.sqrt(q.b ** 2 + q.c ** 2 + q.d ** 2)
        p = Quaternion(q.a, *(v * w))
        assert q_pencil(A, q).allclose(q_pencil(A, p), atol=1e-13)


def test_spectrum_examples():
    assert spheres(s_spectrum(diag([I, J]))) == [(0.0, 1.0, 2)]
    assert spheres(s_spectrum(JORDAN)) == [(0.0, 0.0, 2)]
    assert spheres(s_spectrum(T)) == [(-1.0, 0.0, 1), (1.0, 0.0, 1)]
    assert spheres(s_spectrum(diag([Quaternion(1, 1), 0]))) == [(0.0, 0.0, 1), (1.0, 1.0, 1)]


def _grid_singular(A, u, v):
    P = q_pencil(A, Quaternion(u, v))
    s = np.linalg.svd(complex_adjoint(P), compute_uv=False)
    return s[-1] <= 1e-10 * max(1.0, s[0])


def test_spectrum_grid_oracle():
    A = diag([I, J])
    grid = np.round(np.arange(-2, 2.0001, 0.05), 10)
    hits = {(u, v) for u in grid for v in grid if v >= 0 and _grid_singular(A, u, v)}
    assert hits == {(0.0, 1.0)}


def test_spectrum_invariants(rng):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        g = core_nilpotent_matrix(n, rng)
        spec = s_spectrum(g.A)
        assert spec.total_multiplicity == n
        norm_a = operator_norm(g.A)
        assert all(s.modulus <= norm_a + 1e-8 for s, _ in spec)
        assert spec.contains(EigenSphere(0.0, 0.0)) == bool(g.jordan_sizes)
        _, dev = match_spheres(spec.nonzero(), _dedup(g.nonzero_spheres, spec.tol))
        assert dev <= 1e-7


def _dedup(sph, tol):
    out = []
    for s in sph:
        if not any(s.close_to(t, tol) for t in out):
            out.append(s)
    return out


def test_resolvent_examples():
    assert s_resolvent_left(2.0, identity(3)).allclose(identity(3), atol=1e-15)
    assert s_resolvent_left(3.0, zeros(2)).allclose(identity(2) / 3.0, atol=1e-15)
    with pytest.raises(SpectrumError, match="undefined"):
        s_resolvent_left(I, diag([I, J]))


def test_resolvent_real_points_match_classical(rng):
    A = random_hmatrix(4, rng)
    spec = s_spectrum(A)
    for s in (3.7, -4.1, 0.05 + spec.radius + 1.0):
        if spec.contains(EigenSphere(s, 0.0), 1e-6):
            continue
        M = complex_adjoint(A)
        classical = _pullback(np.linalg.inv(s * np.eye(8) - M))
        assert s_resolvent_left(s, A).allclose(classical, atol=1e-9)


def test_resolvent_off_slice_is_right_inverse(rng):
    # S_L^-1(s, A) s - A S_L^-1(s, A) = I for every s off the spectrum
    A = random_hmatrix(3, rng)
    s = Quaternion(0.2, 3.0, -1.0, 2.0)
    S = s_resolvent_left(s, A)
    from qspectral.hmat import scale_right
    assert (scale_right(S, s) - matmul(A, S)).allclose(identity(3), atol=1e-12)


def test_gelfand_examples():
    seq = dict(gelfand_sequence(JORDAN, 8))
    assert seq[1] == pytest.approx(1.0)
    assert seq[2] == seq[4] == seq[8] == 0.0
    assert abs(spectral_radius_gelfand(diag([Quaternion(0, 2), 0]), 64) - 2.0) <= 1e-6
    assert all(abs(e - 1.0) < 1e-15 for _, e in gelfand_sequence(identity(3), 256))
    assert [k for k, _ in gelfand_sequence(identity(2), 100)] == [1, 2, 4, 8, 16, 32, 64, 100]
    with pytest.raises(ValueError):
        gelfand_sequence(identity(2), 0)


def test_gelfand_normal_matrices(rng):
    # for normal matrices ||A^k|| = r^k, so the estimate is exact at every k
    from qspectral.generators import random_unitary
    for _ in range(20):
        n = int(rng.integers(2, 6))
        U = random_unitary(n, rng)
        D = diag([Quaternion(*rng.standard_normal(2)) for _ in range(n)])
        A = matmul(matmul(U, D), U.H)
        assert abs(spectral_radius_gelfand(A, 256) - s_spectrum(A).radius) <= 1e-10


def test_series_examples():
    q = Quaternion(1, 1)
    assert pseudo_resolvent_series(q, zeros(2)).allclose(identity(2) / 2, atol=1e-15)
    direct = inverse(q_pencil(JORDAN, 2.0))
    assert pseudo_resolvent_series(2.0, JORDAN).allclose(direct, atol=1e-12)
    with pytest.raises(SpectrumError, match="outside convergence region"):
        pseudo_resolvent_series(0.5, identity(2))


def test_series_matches_direct(rng):
    for _ in range(20):
        A = random_hmatrix(4, rng)
        r = s_spectrum(A).radius
        w = rng.standard_normal(4)
        q = Quaternion(*(2 * r * w / np.linalg.norm(w)))
        direct = inverse(q_pencil(A, q))
        series = pseudo_resolvent_series(q, A)
        assert (series - direct).norm() <= 1e-9 * direct.norm()


def test_quasinilpotent(rng):
    assert is_quasinilpotent(JORDAN)
    assert not is_quasinilpotent(identity(2))
    g = core_nilpotent_matrix(4, rng, core_dim=0, jordan_sizes=[3, 1])
    A = g.A
    assert is_quasinilpotent(A)
    for _ in range(20):
        c = rng.standard_normal(3)
        Tm = identity(4) * c[0] + A * c[1] + matmul(A, A) * c[2]
        inverse(identity(4) - matmul(Tm, A))  # raises if singular


def test_spectrum_dict_roundtrip():
    spec = s_spectrum(diag([I, 2.0, 2.0]))
    back = Spectrum.from_dict(spec.to_dict())
    assert back.spheres == spec.spheres


def test_defective_nonzero_eigenvalue_is_snapped(rng):
    from qspectral.generators import well_conditioned
    S = well_conditioned(4, rng)
    J = HMatrix([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 2 + 1j]])
    A = matmul(matmul(S, J), inverse(S))
    spec = s_spectrum(A)
    assert spec.multiplicity(EigenSphere(1.0, 0.0)) == 3 and len(spec) == 2
    assert max(abs(s.u - 1.0) for s, m in spec if m == 3) <= 1e-12


def test_close_distinct_eigenvalues_stay_apart():
    A = diag([1.0, 1.0 + 1e-4, Quaternion(0, 1), Quaternion(0, 1.001)])
    assert [(round(s.u, 6), round(s.v, 6)) for s in s_spectrum(A).sphere_list()] == \
        [(0.0, 1.0), (0.0, 1.001), (1.0, 0.0), (1.0001, 0.0)]
