import math

import numpy as np
import pytest

from qspectral.exceptions import QuadratureError, SeparationError
from qspectral.generators import core_nilpotent_matrix, random_hmatrix
from qspectral.hmat import (HMatrix, diag, identity, inverse, matmul, power, zeros)
from qspectral.quat import I, J, EigenSphere, Quaternion, norm
from qspectral.scalc import (Circle, IntrinsicFn, SliceContour, build_contours, cauchy_formula,
                             composition_check, constant, exp_fn, func_calc, full_contours,
                             identity_fn, parse_function, poly, recip, riesz_projection,
                             spectral_mapping_check)
from qspectral.sspec import s_spectrum


def dev(X, Y):
    return (X - Y).norm() / max(1.0, Y.norm())


def test_intrinsic_reflection():
    f = exp_fn()
    z = np.array([0.3 + 0.7j, -1.0 + 2.0j, 0.5 - 0.1j])
    np.testing.assert_array_equal(f(np.conj(z)), np.conj(f(z)))
    assert f.cauchy_riemann_residual(0.3 + 0.7j) <= 1e-6
    assert poly([1.0, 2.0, 3.0]).cauchy_riemann_residual(1 + 1j) <= 1e-6


def test_function_at_quaternion():
    # exp(q) = e^a (cos|v| + w sin|v|)
    q = Quaternion(0.5, 0.0, 1.0, 0.0)
    e = exp_fn().at(q)
    assert norm(e - Quaternion(math.exp(0.5) * math.cos(1.0), 0, math.exp(0.5) * math.sin(1.0), 0)) < 1e-14


def test_contour_examples():
    spec = s_spectrum(diag([0.0, 2.0]))
    c = build_contours(spec, [EigenSphere(0, 0)])
    assert len(c) == 1 and c.circles[0].center == 0 and c.circles[0].radius <= 2 / 3
    c = build_contours(s_spectrum(diag([I])), [EigenSphere(0, 1)])
    assert sorted(x.center.imag for x in c.circles) == [-1.0, 1.0]
    assert c.is_conjugate_closed()
    with pytest.raises(SeparationError, match="not separated"):
        build_contours(s_spectrum(diag([1.0, 1.0 + 1e-7])), [EigenSphere(1.0, 0)], )


def test_radius_override_must_stay_below_gap():
    spec = s_spectrum(diag([0.0, 2.0]))
    with pytest.raises(SeparationError):
        build_contours(spec, [EigenSphere(0, 0)], radius=2.5)
    assert build_contours(spec, [EigenSphere(0, 0)], radius=1.0).circles[0].radius == 1.0


def test_basic_calculus(rng):
    for _ in range(30):
        n = int(rng.integers(1, 7))
        A = core_nilpotent_matrix(n, rng).A
        cont = full_contours(A)
        assert dev(func_calc(constant(1.0), A, cont), identity(n)) <= 1e-10
        assert dev(func_calc(identity_fn(), A, cont), A) <= 1e-9
        assert dev(func_calc(poly([0, 0, 1]), A, cont), matmul(A, A)) <= 1e-8


def test_product_rule(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        A = core_nilpotent_matrix(n, rng).A
        p, q = poly(rng.standard_normal(3)), poly(rng.standard_normal(2))
        cont = full_contours(A)
        lhs = func_calc(p * q, A, cont)
        rhs = matmul(func_calc(p, A, cont), func_calc(q, A, cont))
        assert dev(lhs, rhs) <= 1e-8


def test_slice_circle_independence(rng):
    A = core_nilpotent_matrix(4, rng).A
    f = exp_fn()
    small = full_contours(A, margin=0.15)
    big = full_contours(A, margin=0.3)
    assert dev(func_calc(f, A, small), func_calc(f, A, big)) <= 1e-9


def test_riesz_examples(rng):
    assert riesz_projection(diag([0.0, 2.0]), [EigenSphere(0, 0)]).allclose(diag([1, 0]), atol=1e-10)
    assert riesz_projection(diag([I, 2.0]), [EigenSphere(0, 1)]).allclose(diag([1, 0]), atol=1e-10)
    A = random_hmatrix(4, rng)
    spec = s_spectrum(A)
    assert riesz_projection(A, spec.sphere_list()).allclose(identity(4), atol=1e-9)
    assert riesz_projection(A, []) == zeros(4)


def test_projection_laws(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        A = core_nilpotent_matrix(n, rng).A
        spec = s_spectrum(A)
        sph = spec.sphere_list()
        if len(sph) < 2:
            continue
        k = int(rng.integers(1, len(sph)))
        P1 = riesz_projection(A, sph[:k], spec)
        P2 = riesz_projection(A, sph[k:], spec)
        assert dev(matmul(P1, P1), P1) <= 1e-9
        assert dev(matmul(P1, A), matmul(A, P1)) <= 1e-9
        assert dev(P1 + P2, identity(n)) <= 1e-9
        assert matmul(P1, P2).norm() <= 1e-9


def test_mapping_examples():
    rep = spectral_mapping_check(poly([0, 0, 1]), diag([Quaternion(1, 1), 0]))
    assert rep.passed(1e-9)
    assert sorted((round(s.u, 9), round(s.v, 9)) for s in rep.image) == [(0.0, 0.0), (0.0, 2.0)]
    rep = spectral_mapping_check(recip(), diag([2.0, I]))
    assert sorted((round(s.u, 9), round(s.v, 9)) for s in rep.image) == [(0.0, 1.0), (0.5, 0.0)]
    assert rep.passed(1e-9)


def test_composition_examples(rng):
    A = random_hmatrix(2, rng)
    assert composition_check(poly([0, 0, 1]), poly([0, 0, 1]), A).passed(1e-7)
    A = core_nilpotent_matrix(4, rng, core_dim=4).A
    assert composition_check(identity_fn(), exp_fn(), A).passed(1e-8)
    rep = composition_check(poly([1.0, 1.0]), recip(), A)
    assert rep.passed(1e-8)
    assert dev(rep.direct, inverse(A + identity(4))) <= 1e-8


def test_domain_guard():
    A = diag([0.0, 2.0])
    cont = build_contours(s_spectrum(A), [EigenSphere(0, 0)])
    with pytest.raises(ValueError, match="domain"):
        func_calc(recip(), A, cont)


def test_quadrature_failure_reported():
    # a circle passing within 1e-12 of an eigenvalue cannot converge
    A = diag([1.0])
    center = 1.0 + np.exp(0.7j)
    c = SliceContour([Circle(center, 1.0 - 1e-12, 8)])
    with pytest.raises(QuadratureError) as exc:
        func_calc(constant(1.0), A, c, max_nodes=2 ** 8)
    assert exc.value.last_delta is not None
    # a node exactly on the spectrum is reported the same way
    with pytest.raises(QuadratureError, match="node"):
        func_calc(constant(1.0), A, SliceContour([Circle(2.0, 1.0, 8)]))


def test_parse_function():
    A = diag([0.0, 2.0])
    assert parse_function("poly:1,0,2")(2.0) == 9.0
    assert parse_function("recip")(4.0) == 0.25
    sel = parse_function("drazin-selector", A)
    assert sel(0.1) == 0 and sel(2.0) == 0.5
    with pytest.raises(ValueError):
        parse_function("sin")


def test_cauchy_formula_off_slice():
    q = Quaternion(0.3, 0.2, -0.4, 0.1)
    expected = exp_fn().at(q)
    for side in ("left", "right"):
        val = cauchy_formula(exp_fn(), q, 0.0, 2.0, 256, side=side)
        assert norm(val - expected) <= 1e-10
