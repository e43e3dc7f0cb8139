import numpy as np
import pytest

from qspectral.exceptions import DimensionError, SingularOperatorError, StructureError
from qspectral.generators import random_hmatrix, well_conditioned
from qspectral.hmat import (HMatrix, block_diag, complex_adjoint, complex_to_vector, diag,
                            from_adjoint, identity, inverse, matmul, nullity, operator_norm,
                            power, power_rank, range_kernel_basis, rank, rank_chain, scale_left,
                            scale_right, solve, span_basis, vector_to_complex, zeros)
from qspectral.quat import I, J, K, Quaternion


def entrywise_product(A, B):
    """Reference product from Hamilton multiplication of individual entries."""
    m, p = A.shape
    n = B.shape[1]
    out = [[Quaternion() for _ in range(n)] for _ in range(m)]
    for i in range(m):
        for j in range(n):
            acc = Quaternion()
            for k in range(p):
                acc = acc + A[i, k] * B[k, j]
            out[i][j] = acc
    return HMatrix.from_entries(out)


def test_matmul_matches_hamilton(rng):
    A = random_hmatrix(3, rng, m=4)
    B = random_hmatrix(4, rng, m=2)
    assert matmul(A, B).allclose(entrywise_product(A, B), atol=1e-13)


def test_adjoint_homomorphism(rng):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        A, B = random_hmatrix(n, rng), random_hmatrix(n, rng)
        lhs = complex_adjoint(matmul(A, B))
        rhs = complex_adjoint(A) @ complex_adjoint(B)
        assert np.linalg.norm(lhs - rhs, 2) <= 1e-11 * max(1.0, np.linalg.norm(rhs, 2))
        np.testing.assert_allclose(complex_adjoint(A + B),
                                   complex_adjoint(A) + complex_adjoint(B), atol=1e-14)


def test_adjoint_examples():
    M = complex_adjoint(HMatrix.from_entries([[J]]))
    np.testing.assert_array_equal(M, [[0, 1], [-1, 0]])
    M = complex_adjoint(HMatrix.from_entries([[I]]))
    np.testing.assert_array_equal(M, [[1j, 0], [0, -1j]])


def test_from_adjoint_roundtrip_and_rejection(rng):
    A = random_hmatrix(4, rng)
    assert from_adjoint(complex_adjoint(A)) == A
    bad = complex_adjoint(A).copy()
    bad[0, 0] += 1.0
    with pytest.raises(StructureError):
        from_adjoint(bad)
    with pytest.raises(DimensionError):
        from_adjoint(np.zeros((3, 3)))


def test_vector_embedding(rng):
    A = random_hmatrix(3, rng)
    u = random_hmatrix(3, rng, m=1)
    np.testing.assert_allclose(complex_adjoint(A) @ vector_to_complex(u),
                               vector_to_complex(matmul(A, u)), atol=1e-14)
    assert complex_to_vector(vector_to_complex(u)) == u


def test_right_linearity(rng):
    A = random_hmatrix(3, rng)
    u = random_hmatrix(3, rng, m=1)
    q = Quaternion(0.3, -1.0, 2.0, 0.5)
    assert matmul(A, scale_right(u, q)).allclose(scale_right(matmul(A, u), q), atol=1e-13)


def test_left_and_right_scaling_differ():
    A = diag([J])
    assert scale_left(I, A) == diag([K])
    assert scale_right(A, I) == diag([-K])


def test_inverse_examples():
    assert inverse(diag([2.0, I])).allclose(diag([0.5, -I]), atol=1e-15)
    with pytest.raises(SingularOperatorError) as exc:
        inverse(HMatrix([[1, 1], [1, 1]]))
    assert exc.value.smallest_singular_value is not None


def test_solve_residual(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        A = well_conditioned(n, rng)
        b = random_hmatrix(n, rng, m=1)
        x = solve(A, b)
        assert (matmul(A, x) - b).norm() <= 1e-9 * A.norm() * x.norm()
        assert matmul(A, inverse(A)).allclose(identity(n), atol=1e-10)


def test_rank_examples():
    assert rank(HMatrix.from_entries([[1, J], [J, -1]])) == 1
    assert rank(identity(3)) == 3
    assert rank(zeros(3)) == 0


def test_rank_nullity(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        r = int(rng.integers(0, n + 1))
        L = random_hmatrix(n, rng, m=r) if r else zeros(n, 0)
        R = random_hmatrix(r, rng, m=n) if r else zeros(0, n)
        A = matmul(L, R) if r else zeros(n)
        assert rank(A) == r
        assert rank(A) + nullity(A) == n


def test_operator_norm(rng):
    assert operator_norm(identity(4)) == pytest.approx(1.0)
    for _ in range(50):
        A, B = random_hmatrix(4, rng), random_hmatrix(4, rng)
        assert operator_norm(matmul(A, B)) <= operator_norm(A) * operator_norm(B) + 1e-10


def test_power_and_rank_chain():
    N = HMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert power(N, 0) == identity(3)
    assert power(N, 3) == zeros(3)
    assert rank_chain(N) == [3, 2, 1, 0, 0]
    assert power_rank(N, 2) == 1
    with pytest.raises(ValueError):
        power(N, -1)


def test_range_kernel_examples():
    N = HMatrix([[0, 1], [0, 0]])
    R, K_ = range_kernel_basis(N, 1)
    assert R.shape == (2, 1) and K_.shape == (2, 1)
    assert abs(abs(R[0, 0]) - 1) < 1e-14 and abs(K_[0, 0]) == pytest.approx(1.0)
    R, K_ = range_kernel_basis(diag([1, 0]), 1)
    assert abs(R[0, 0]) == pytest.approx(1.0) and abs(K_[1, 0]) == pytest.approx(1.0)
    R, K_ = range_kernel_basis(diag([2, I]), 3)
    assert R.shape == (2, 2) and K_.shape == (2, 0)


def test_bases_are_orthonormal(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        A = matmul(random_hmatrix(n, rng, m=2), random_hmatrix(2, rng, m=n))
        R, N = range_kernel_basis(A, 1)
        assert R.shape[1] + N.shape[1] == n
        assert matmul(R.H, R).allclose(identity(R.shape[1]), atol=1e-12)
        assert matmul(N.H, N).allclose(identity(N.shape[1]), atol=1e-12)
        assert matmul(A, N).norm() <= 1e-12 * A.norm()


def test_span_basis_rejects_deficient():
    with pytest.raises(np.linalg.LinAlgError):
        span_basis(HMatrix([[1, 2], [0, 0]]), 2)


def test_shape_errors():
    with pytest.raises(DimensionError):
        matmul(zeros(2, 3), zeros(2, 3))
    with pytest.raises(DimensionError):
        zeros(2, 3).n
    with pytest.raises(DimensionError):
        zeros(2) + zeros(3)


def test_block_diag_and_components():
    A = block_diag(diag([I]), diag([J, K]))
    assert A.shape == (3, 3)
    assert A[2, 2] == K
    assert HMatrix.from_components(A.components) == A


def test_spec_small_examples():
    one = identity(1)
    assert scale_left(I, scale_right(one, J)) == HMatrix.from_entries([[K]])
    assert from_adjoint(np.array([[0, 1], [-1, 0]], dtype=complex)) == HMatrix.from_entries([[J]])
    with pytest.raises(StructureError):
        from_adjoint(np.diag([1.0, 2.0]))
    assert inverse(diag([I, J])).allclose(diag([-I, -J]), atol=1e-15)
    N = HMatrix.from_entries([[0, K], [0, 0]])
    assert inverse(identity(2) + N).allclose(identity(2) - N, atol=1e-15)
    with pytest.raises(SingularOperatorError):
        inverse(HMatrix([[0, 1], [0, 0]]))
    # second column is the first times i on the right
    assert rank(HMatrix.from_entries([[1, I], [J, -K]])) == 1
    A = HMatrix.from_entries([[1, I], [J, -K]])
    assert matmul(identity(2), A) == A
