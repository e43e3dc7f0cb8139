import warnings

import numpy as np
import pytest

from qspectral.drazin import (ascent, commuting_product_check, decomposition_check, descent,
                              drazin, drazin_algebraic, drazin_via_funcalc, drazin_via_projection,
                              generalized_drazin, identity_suite, index, index_coherence,
                              left_mult_check, verify_drazin)
from qspectral.exceptions import IllSeparatedWarning, PreconditionError
from qspectral.generators import core_nilpotent_matrix, random_hmatrix, well_conditioned
from qspectral.hmat import (HMatrix, block_diag, diag, identity, inverse, matmul, power, zeros)
from qspectral.quat import I, Quaternion

JORDAN = HMatrix([[0, 1], [0, 0]])


def dev(X, Y):
    return (X - Y).norm() / max(1.0, X.norm(), Y.norm())


def test_index_examples(rng):
    assert index(JORDAN) == 2
    assert index(well_conditioned(3, rng)) == 0
    assert index(diag([1, 0])) == 1
    assert ascent(JORDAN) == descent(JORDAN) == 2
    assert ascent(diag([I, 0])) == descent(diag([I, 0])) == 1
    g = core_nilpotent_matrix(6, rng, core_dim=3, jordan_sizes=[3])
    assert index(g.A) == ascent(g.A) == descent(g.A) == 3


def test_algebraic_examples(rng):
    N = core_nilpotent_matrix(4, rng, core_dim=0, jordan_sizes=[3, 1]).A
    res = drazin_algebraic(N)
    assert res.inverse == zeros(4) and res.index == 3
    A = well_conditioned(3, rng)
    res = drazin_algebraic(A)
    assert res.index == 0 and res.inverse.allclose(inverse(A), atol=1e-12)
    res = drazin_algebraic(diag([Quaternion(0, 2), 0]))
    assert res.index == 1
    assert res.inverse.allclose(diag([Quaternion(0, -0.5), 0]), atol=1e-15)
    assert generalized_drazin is drazin_algebraic


def test_projection_examples(rng):
    res = drazin_via_projection(diag([0.0, 2.0]))
    assert res.info["riesz"].allclose(diag([1, 0]), atol=1e-10)
    assert res.inverse.allclose(diag([0, 0.5]), atol=1e-10)
    A = well_conditioned(3, rng)
    res = drazin_via_projection(A)
    assert res.info["riesz"] == zeros(3)
    assert res.inverse.allclose(inverse(A), atol=1e-12)
    g = core_nilpotent_matrix(5, rng, core_dim=3, jordan_sizes=[2])
    assert dev(drazin_via_projection(g.A).inverse, drazin_algebraic(g.A).inverse) <= 1e-8


def test_funcalc_examples(rng):
    assert drazin_via_funcalc(diag([0.0, 2.0])).inverse.allclose(diag([0, 0.5]), atol=1e-10)
    res = drazin_via_funcalc(diag([Quaternion(1, 1), 0]))
    assert res.inverse.allclose(diag([Quaternion(0.5, -0.5), 0]), atol=1e-10)
    rep = res.info["spectrum_check"]
    assert [(round(s.u, 9), round(s.v, 9)) for s in rep.computed] == [(0.5, 0.5)]
    g = core_nilpotent_matrix(6, rng, gap=0.5)
    routes = [drazin(g.A, r).inverse for r in ("algebraic", "projection", "funcalc")]
    assert max(dev(routes[0], routes[1]), dev(routes[0], routes[2])) <= 1e-7


def test_three_routes_against_ground_truth(rng):
    for _ in range(25):
        g = core_nilpotent_matrix(int(rng.integers(2, 7)), rng)
        for route in ("algebraic", "projection", "funcalc"):
            res = drazin(g.A, route)
            assert dev(res.inverse, g.drazin) <= 1e-7
            assert verify_drazin(g.A, res.inverse, res.index).passed(1e-8)


def test_result_invariants(rng):
    g = core_nilpotent_matrix(5, rng, core_dim=3, jordan_sizes=[2])
    res = drazin_algebraic(g.A)
    A, B, P, k = g.A, res.inverse, res.projection, res.index
    assert dev(matmul(P, P), P) <= 1e-9
    assert dev(matmul(P, A), matmul(A, P)) <= 1e-9
    assert power(matmul(A, P), k).norm() <= 1e-9
    assert dev(matmul(inverse(A + P), identity(5) - P), B) <= 1e-8


def test_route_dispatch_rejects_unknown():
    with pytest.raises(ValueError, match="unknown route"):
        drazin(JORDAN, "magic")


def test_ill_separated_defers_to_algebraic():
    A = diag([0.0, 1e-5, 1.0])
    with pytest.warns(IllSeparatedWarning, match="ill-separated"):
        res = drazin_via_funcalc(A)
    assert res.route == "algebraic" and res.info["ill_separated"]
    assert res.inverse.allclose(diag([0, 1e5, 1.0]), atol=1e-6)


def test_contour_overrides_do_not_change_result(rng):
    g = core_nilpotent_matrix(4, rng, core_dim=2, jordan_sizes=[2])
    base = drazin_via_funcalc(g.A).inverse
    for kw in ({"margin": 0.2}, {"nodes": 16}, {"radius": 0.05}):
        assert dev(drazin_via_funcalc(g.A, **kw).inverse, base) <= 1e-9


def test_verify_examples(rng):
    g = core_nilpotent_matrix(4, rng, core_dim=0, jordan_sizes=[4])
    assert verify_drazin(g.A, zeros(4), 4).passed()
    rep = verify_drazin(identity(2), identity(2) * 2.0, 0)
    assert "AB^2=B" in rep.failures()


def test_index_coherence(rng):
    for _ in range(30):
        g = core_nilpotent_matrix(int(rng.integers(1, 7)), rng)
        coh = index_coherence(g.A)
        assert coh == dict.fromkeys(coh, g.index)
        rep = decomposition_check(g.A)
        assert rep.passed(g.A.n)


def test_isolated_zero_criterion(rng):
    for _ in range(20):
        g = core_nilpotent_matrix(int(rng.integers(1, 6)), rng)
        P = drazin_algebraic(g.A).projection
        singular = bool(g.jordan_sizes)
        assert (P.norm() > 0.5) == singular


def test_identity_suite_examples(rng):
    assert identity_suite(JORDAN).passed(1e-12)
    A = well_conditioned(3, rng)
    assert identity_suite(A).passed(1e-9)
    g = core_nilpotent_matrix(5, rng, core_dim=3, jordan_sizes=[2])
    assert identity_suite(g.A, k=3).passed(1e-7)


def test_commuting_product(rng):
    g = core_nilpotent_matrix(5, rng, core_dim=3, jordan_sizes=[2])
    A = g.A
    B = identity(5) * 0.5 + A * 1.5 - matmul(A, A) * 0.25
    assert commuting_product_check(A, B).passed(1e-7)
    assert commuting_product_check(A, identity(5)).passed(1e-12)
    # simultaneously block diagonal: (invertible, nilpotent) blocks
    C1, C2 = well_conditioned(2, rng), well_conditioned(2, rng)
    N = HMatrix([[0, 1], [0, 0]])
    X, Y = block_diag(C1, N), block_diag(C2, zeros(2))
    if (matmul(C1, C2) - matmul(C2, C1)).norm() > 1e-10:
        C2 = matmul(C1, C1) + identity(2)
        Y = block_diag(C2, zeros(2))
    rep = commuting_product_check(X, Y)
    assert rep.passed(1e-7)
    truth = block_diag(inverse(matmul(C1, C2)), zeros(2))
    assert dev(drazin_algebraic(matmul(X, Y)).inverse, truth) <= 1e-9
    with pytest.raises(PreconditionError, match="commute"):
        commuting_product_check(random_hmatrix(3, rng), random_hmatrix(3, rng))


def test_left_mult_examples(rng):
    rep = left_mult_check(JORDAN)
    assert rep.passed(1e-12)
    assert left_mult_check(identity(3)).passed(1e-12)
    assert left_mult_check(diag([1, 0])).passed(1e-12)
    for _ in range(10):
        g = core_nilpotent_matrix(int(rng.integers(1, 5)), rng)
        assert left_mult_check(g.A).passed(1e-7)
    with pytest.raises(ValueError):
        left_mult_check(identity(5))
