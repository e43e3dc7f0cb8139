"""Quaternionic matrices as right-linear operators on H^n.

A matrix ``A`` with quaternion entries is stored by its symplectic split
``A = A1 + A2 j`` where ``A1`` and ``A2`` are complex matrices in the slice
plane spanned by ``1`` and ``i``. Acting by left multiplication on column
vectors, ``A`` is a right-linear operator: ``A(u p + v) = (A u) p + A v``.

Every spectral, rank and solve primitive goes through the complex adjoint

    chi(A) = [[A1, A2], [-conj(A2), conj(A1)]],

an injective homomorphism of real algebras from ``H^(m x n)`` into
``C^(2m x 2n)``. A quaternion column vector ``u = u1 + u2 j`` corresponds to
the complex vector ``[u1; -conj(u2)]`` (the first column of ``chi(u)``) and
``chi(A)`` acts on it exactly as ``A`` acts on ``u``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .exceptions import DimensionError, SingularOperatorError, StructureError
from .quat import Quaternion

__all__ = [
    "HMatrix",
    "identity",
    "zeros",
    "diag",
    "add",
    "matmul",
    "scale_left",
    "scale_right",
    "power",
    "complex_adjoint",
    "from_adjoint",
    "inverse",
    "solve",
    "rank",
    "nullity",
    "singular_values",
    "operator_norm",
    "rank_tolerance",
    "power_tolerance",
    "power_rank",
    "rank_chain",
    "range_kernel_basis",
    "span_basis",
    "block_diag",
    "hstack",
]

EPS = np.finfo(float).eps


class HMatrix:
    """Matrix with quaternion entries, stored as ``z1 + z2 j``.

    Instances are treated as immutable values; the arrays are marked
    read-only after construction.

    Parameters
    ----------
    z1, z2 : array_like
        Complex ``(m, n)`` arrays of the symplectic split.
    """

    __slots__ = ("z1", "z2")
    __array_priority__ = 100

    def __init__(self, z1, z2=None):
        z1 = np.array(z1, dtype=complex, ndmin=2)
        z2 = np.zeros_like(z1) if z2 is None else np.array(z2, dtype=complex, ndmin=2)
        if z1.shape != z2.shape or z1.ndim != 2:
            raise DimensionError(f"component shapes differ: {z1.shape} vs {z2.shape}")
        z1.setflags(write=False)
        z2.setflags(write=False)
        self.z1 = z1
        self.z2 = z2

    # -- construction -----------------------------------------------------

    @classmethod
    def from_components(cls, comps) -> "HMatrix":
        """Build from a real ``(m, n, 4)`` array of ``[a, b, c, d]`` entries."""
        comps = np.asarray(comps, dtype=float)
        if comps.ndim != 3 or comps.shape[-1] != 4:
            raise DimensionError(f"expected an (m, n, 4) array, got shape {comps.shape}")
        return cls(comps[..., 0] + 1j * comps[..., 1], comps[..., 2] + 1j * comps[..., 3])

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "HMatrix":
        """Build from nested rows of quaternions, 4-lists, or real/complex numbers."""
        comps = [[_entry_components(x) for x in row] for row in rows]
        return cls.from_components(np.array(comps, dtype=float).reshape(len(rows), -1, 4))

    @classmethod
    def from_real(cls, arr) -> "HMatrix":
        return cls(np.asarray(arr, dtype=float).astype(complex))

    # -- views -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.z1.shape

    @property
    def n(self) -> int:
        m, n = self.shape
        if m != n:
            raise DimensionError(f"matrix is not square: {self.shape}")
        return n

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    @property
    def components(self) -> np.ndarray:
        return np.stack([self.z1.real, self.z1.imag, self.z2.real, self.z2.imag], axis=-1)

    def __getitem__(self, idx) -> Quaternion:
        i, j = idx
        return Quaternion.from_pair(self.z1[i, j], self.z2[i, j])

    def column(self, j: int) -> "HMatrix":
        return HMatrix(self.z1[:, j:j + 1], self.z2[:, j:j + 1])

    def columns(self, sl) -> "HMatrix":
        return HMatrix(self.z1[:, sl], self.z2[:, sl])

    def adjoint(self) -> np.ndarray:
        return complex_adjoint(self)

    def conj_transpose(self) -> "HMatrix":
        """Quaternionic conjugate transpose ``A^*``."""
        return HMatrix(self.z1.conj().T, -self.z2.T)

    @property
    def H(self) -> "HMatrix":
        return self.conj_transpose()

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, HMatrix):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, HMatrix):
            return NotImplemented
        _check_same_shape(self, other)
        return HMatrix(self.z1 - other.z1, self.z2 - other.z2)

    def __neg__(self):
        return HMatrix(-self.z1, -self.z2)

    def __matmul__(self, other):
        if not isinstance(other, HMatrix):
            return NotImplemented
        return matmul(self, other)

    def __mul__(self, other):
        # real scalars commute with everything; quaternion scalars must pick a side
        if isinstance(other, (int, float, np.integer, np.floating)):
            return HMatrix(self.z1 * float(other), self.z2 * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return HMatrix(self.z1 / float(other), self.z2 / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, HMatrix):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.z1, other.z1)
                and np.array_equal(self.z2, other.z2))

    __hash__ = None

    def norm(self) -> float:
        """Operator (spectral) norm."""
        return operator_norm(self)

    def fro(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.z1) ** 2) + np.sum(np.abs(self.z2) ** 2)))

    def max_abs(self) -> float:
        """Largest entry modulus."""
        if self.z1.size == 0:
            return 0.0
        return float(np.max(np.sqrt(np.abs(self.z1) ** 2 + np.abs(self.z2) ** 2)))

    def allclose(self, other: "HMatrix", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        _check_same_shape(self, other)
        return (self - other).max_abs() <= atol + rtol * other.max_abs()

    def __repr__(self):
        m, n = self.shape
        rows = []
        for i in range(m):
            rows.append("[" + ", ".join(_fmt_entry(self[i, j]) for j in range(n)) + "]")
        return "HMatrix([" + ",\n         ".join(rows) + "])"


def _fmt_entry(q: Quaternion) -> str:
    parts = []
    for val, unit in zip(q.to_list(), ("", "i", "j", "k")):
        if val != 0 or (unit == "" and not parts and q.to_list() == [0.0] * 4):
            parts.append(f"{val:+.6g}{unit}")
    return "".join(parts) or "+0"


def _entry_components(x):
    if isinstance(x, Quaternion):
        return x.to_list()
    if isinstance(x, (int, float, np.integer, np.floating)):
        return [float(x), 0.0, 0.0, 0.0]
    if isinstance(x, (complex, np.complexfloating)):
        return [x.real, x.imag, 0.0, 0.0]
    vals = [float(v) for v in x]
    if len(vals) != 4:
        raise DimensionError(f"quaternion entry needs 4 components, got {len(vals)}")
    return vals


def _check_same_shape(a: HMatrix, b: HMatrix):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


# -- constructors -----------------------------------------------------------

def identity(n: int) -> HMatrix:
    return HMatrix(np.eye(n, dtype=complex))


def zeros(m: int, n: int | None = None) -> HMatrix:
    return HMatrix(np.zeros((m, m if n is None else n), dtype=complex))


def diag(entries: Iterable) -> HMatrix:
    """Diagonal matrix from quaternion-like entries."""
    comps = [_entry_components(x) for x in entries]
    n = len(comps)
    out = np.zeros((n, n, 4))
    for k, c in enumerate(comps):
        out[k, k] = c
    return HMatrix.from_components(out)


def block_diag(*blocks: HMatrix) -> HMatrix:
    m = sum(b.shape[0] for b in blocks)
    n = sum(b.shape[1] for b in blocks)
    z1 = np.zeros((m, n), dtype=complex)
    z2 = np.zeros((m, n), dtype=complex)
    r = c = 0
    for b in blocks:
        bm, bn = b.shape
        z1[r:r + bm, c:c + bn] = b.z1
        z2[r:r + bm, c:c + bn] = b.z2
        r += bm
        c += bn
    return HMatrix(z1, z2)


def hstack(mats: Sequence[HMatrix]) -> HMatrix:
    return HMatrix(np.hstack([m.z1 for m in mats]), np.hstack([m.z2 for m in mats]))


# -- ring operations --------------------------------------------------------

def add(A: HMatrix, B: HMatrix) -> HMatrix:
    _check_same_shape(A, B)
    return HMatrix(A.z1 + B.z1, A.z2 + B.z2)


def matmul(A: HMatrix, B: HMatrix) -> HMatrix:
    """Product ``A B``; uses ``j w = conj(w) j`` for complex ``w``."""
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"dimension mismatch: {A.shape} @ {B.shape}")
    z1 = A.z1 @ B.z1 - A.z2 @ B.z2.conj()
    z2 = A.z1 @ B.z2 + A.z2 @ B.z1.conj()
    return HMatrix(z1, z2)


def scale_left(q: Quaternion, A: HMatrix) -> HMatrix:
    """``q A``, the matrix ``(q I) A``."""
    m = A.shape[0]
    return matmul(_scalar_matrix(q, m), A)


def scale_right(A: HMatrix, q: Quaternion) -> HMatrix:
    """``A q``, the matrix ``A (q I)``; composition with the right scalar action."""
    n = A.shape[1]
    return matmul(A, _scalar_matrix(q, n))


def _scalar_matrix(q: Quaternion, n: int) -> HMatrix:
    z1, z2 = q.to_pair()
    eye = np.eye(n, dtype=complex)
    return HMatrix(z1 * eye, z2 * eye)


def power(A: HMatrix, k: int) -> HMatrix:
    """``A^k`` by repeated squaring; ``A^0 = I``."""
    if k < 0:
        raise ValueError("negative powers are not defined; use inverse()")
    result = identity(A.n)
    base = A
    first = True
    while k:
        if k & 1:
            result = base if first else matmul(result, base)
            first = False
        k >>= 1
        if k:
            base = matmul(base, base)
    return result


# -- complex adjoint --------------------------------------------------------

def complex_adjoint(A: HMatrix) -> np.ndarray:
    """``chi(A) = [[A1, A2], [-conj(A2), conj(A1)]]``."""
    return np.block([[A.z1, A.z2], [-A.z2.conj(), A.z1.conj()]])


def _split(M: np.ndarray) -> tuple[np.ndarray, ...]:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] % 2 or M.shape[1] % 2:
        raise DimensionError(f"adjoint matrix needs even shape, got {M.shape}")
    m, n = M.shape[0] // 2, M.shape[1] // 2
    return M[:m, :n], M[:m, n:], M[m:, :n], M[m:, n:]


def structure_residual(M: np.ndarray) -> float:
    """Size of ``J M J^-1 - conj(M)``; zero exactly for adjoint images."""
    P, Q, R, S = _split(M)
    return float(max(np.max(np.abs(S - P.conj()), initial=0.0),
                     np.max(np.abs(R + Q.conj()), initial=0.0)))


def _pullback(M: np.ndarray) -> HMatrix:
    """Nearest adjoint image, pulled back (averages the two copies)."""
    P, Q, R, S = _split(M)
    return HMatrix((P + S.conj()) / 2, (Q - R.conj()) / 2)


def from_adjoint(M: np.ndarray, tol: float | None = None) -> HMatrix:
    """Inverse of :func:`complex_adjoint`.

    Parameters
    ----------
    M : ndarray
        Complex ``(2m, 2n)`` matrix.
    tol : float, optional
        Allowed structure residual; defaults to ``1e-9 * ||M||``.

    Raises
    ------
    StructureError
        If ``M`` is not (within ``tol``) the adjoint of a quaternion matrix.
    """
    M = np.asarray(M, dtype=complex)
    if tol is None:
        tol = 1e-9 * (np.linalg.norm(M, 2) if M.size else 0.0)
    res = structure_residual(M)
    if res > tol:
        raise StructureError(
            f"not a quaternionic-adjoint matrix (structure residual {res:.3e} > {tol:.3e})")
    return _pullback(M)


def vector_to_complex(u: HMatrix) -> np.ndarray:
    """Columns ``u1 + u2 j`` to complex columns ``[u1; -conj(u2)]``."""
    return np.vstack([u.z1, -u.z2.conj()])


def complex_to_vector(x: np.ndarray) -> HMatrix:
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0] // 2
    return HMatrix(x[:n], -x[n:].conj())


# -- singular values, rank, norms ------------------------------------------

def singular_values(A: HMatrix) -> np.ndarray:
    """Quaternionic singular values (each appears twice in ``chi(A)``)."""
    if 0 in A.shape:
        return np.zeros(0)
    s = np.linalg.svd(complex_adjoint(A), compute_uv=False)
    return s[0::2]


def rank_tolerance(A: HMatrix, s: np.ndarray | None = None) -> float:
    """``2 max(m, n) eps sigma_max``."""
    if s is None:
        s = singular_values(A)
    smax = s[0] if s.size else 0.0
    return 2 * max(A.shape) * EPS * smax


def rank(A: HMatrix, tol: float | None = None) -> int:
    s = singular_values(A)
    if tol is None:
        tol = rank_tolerance(A, s)
    return int(np.sum(s > tol))


def nullity(A: HMatrix, tol: float | None = None) -> int:
    return A.shape[1] - rank(A, tol)


def power_tolerance(A: HMatrix, k: int, norm_a: float | None = None) -> float:
    """Rank threshold for ``A^k``: ``2n eps ||A||^k``.

    Rounding noise in a computed power scales with ``||A||^k``, not with
    ``sigma_max(A^k)``; for nilpotent parts the latter is itself noise.
    """
    if norm_a is None:
        norm_a = operator_norm(A)
    return 2 * A.n * EPS * norm_a ** k


def power_rank(A: HMatrix, k: int, norm_a: float | None = None) -> int:
    """Rank of ``A^k`` with :func:`power_tolerance`; ``rank(A^0) = n``."""
    if k == 0:
        return A.n
    return rank(power(A, k), power_tolerance(A, k, norm_a))


def operator_norm(A: HMatrix) -> float:
    s = singular_values(A)
    return float(s[0]) if s.size else 0.0


def rank_chain(A: HMatrix, norm_hint: float | None = None) -> list[int]:
    """Ranks ``[rank(A^0), rank(A^1), ...]`` up to and including the first repeat.

    ``norm_hint`` is a bound on the size of the data ``A`` was computed from
    (for a product ``XY`` it is ``||X|| ||Y||``). The threshold then scales
    with ``max(||A||, norm_hint)^k``, so a product that is pure rounding
    noise is recognized as zero.
    """
    n = A.n
    norm_a = operator_norm(A)
    if norm_hint is not None:
        norm_a = max(norm_a, float(norm_hint))
    ranks = [n]
    Ak = identity(n)
    for k in range(1, n + 2):
        Ak = matmul(Ak, A)
        ranks.append(rank(Ak, power_tolerance(A, k, norm_a)))
        if ranks[-1] == ranks[-2]:
            break
    return ranks


# -- inverse and solve ------------------------------------------------------

def _check_invertible(A: HMatrix, tol: float | None):
    s = singular_values(A)
    if tol is None:
        tol = rank_tolerance(A, s)
    smin = float(s[-1]) if s.size else 0.0
    if s.size == 0 or smin <= tol:
        raise SingularOperatorError(
            f"operator not invertible (smallest singular value {smin:.3e})", smin)


def inverse(A: HMatrix, tol: float | None = None) -> HMatrix:
    """``A^-1``, computed on the complex adjoint and pulled back.

    Raises
    ------
    SingularOperatorError
        If the smallest singular value is below the rank tolerance.
    """
    n = A.n
    _check_invertible(A, tol)
    M = complex_adjoint(A)
    return _pullback(np.linalg.solve(M, np.eye(2 * n, dtype=complex)))


def solve(A: HMatrix, b: HMatrix, tol: float | None = None) -> HMatrix:
    """Solve ``A x = b`` for quaternion vector(s) ``b`` (columns of an ``HMatrix``)."""
    if not isinstance(b, HMatrix):
        b = HMatrix.from_components(np.asarray(b, dtype=float).reshape(A.n, -1, 4))
    if b.shape[0] != A.n:
        raise DimensionError(f"dimension mismatch: {A.shape} vs rhs {b.shape}")
    _check_invertible(A, tol)
    # chi(x) = chi(A)^-1 chi(b); the first block column determines x
    X = np.linalg.solve(complex_adjoint(A), complex_adjoint(b))
    return _pullback(X)


# -- subspaces ----------------------------------------------------------------

def _qinner(U1, U2, v1, v2):
    """Quaternionic inner products ``<u_k, v> = sum conj(u_k) v`` for all columns u_k."""
    c1 = U1.conj().T @ v1 + U2.T @ v2.conj()
    c2 = U1.conj().T @ v2 - U2.T @ v1.conj()
    return c1, c2


def span_basis(cands: HMatrix, dim: int) -> HMatrix:
    """Orthonormal basis (over H) of ``dim`` vectors picked from the columns.

    Pivoted quaternionic Gram-Schmidt with one reorthogonalization pass; the
    column with the largest remaining residual is taken at each step.
    """
    n = cands.shape[0]
    W1 = np.array(cands.z1, dtype=complex)
    W2 = np.array(cands.z2, dtype=complex)
    Q1 = np.zeros((n, dim), dtype=complex)
    Q2 = np.zeros((n, dim), dtype=complex)
    for k in range(dim):
        norms = np.sum(np.abs(W1) ** 2 + np.abs(W2) ** 2, axis=0)
        p = int(np.argmax(norms))
        v1, v2 = W1[:, p].copy(), W2[:, p].copy()
        for _ in range(2):
            c1, c2 = _qinner(Q1[:, :k], Q2[:, :k], v1, v2)
            # v -= sum_k q_k c_k (right scalar multiplication)
            v1 = v1 - (Q1[:, :k] @ c1 - Q2[:, :k] @ c2.conj())
            v2 = v2 - (Q1[:, :k] @ c2 + Q2[:, :k] @ c1.conj())
        nv = np.sqrt(np.sum(np.abs(v1) ** 2 + np.abs(v2) ** 2))
        if nv == 0.0:
            raise np.linalg.LinAlgError("candidate vectors do not span the requested dimension")
        v1, v2 = v1 / nv, v2 / nv
        Q1[:, k], Q2[:, k] = v1, v2
        # remove the new direction from all candidates
        C1 = np.conj(v1) @ W1 + v2 @ W2.conj()
        C2 = np.conj(v1) @ W2 - v2 @ W1.conj()
        W1 = W1 - (np.outer(v1, C1) - np.outer(v2, C2.conj()))
        W2 = W2 - (np.outer(v1, C2) + np.outer(v2, C1.conj()))
    return HMatrix(Q1, Q2)


def range_kernel_basis(A: HMatrix, k: int = 1, tol: float | None = None
                       ) -> tuple[HMatrix, HMatrix]:
    """Orthonormal bases of ``R(A^k)`` and ``N(A^k)``, as matrix columns.

    The complex singular vectors of ``chi(A^k)`` are pulled back to quaternion
    vectors and reduced to a right-H basis of the correct dimension.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    n = A.n
    Ak = power(A, k)
    U, s, Vh = np.linalg.svd(complex_adjoint(Ak))
    sq = s[0::2]
    if tol is None:
        tol = power_tolerance(A, k) if k else 0.0
    r = int(np.sum(sq > tol))
    rng_c = complex_to_vector(U[:, :2 * r]) if r else zeros(n, 0)
    ker_c = complex_to_vector(Vh[2 * r:].conj().T) if r < n else zeros(n, 0)
    R = span_basis(rng_c, r) if r else zeros(n, 0)
    N = span_basis(ker_c, n - r) if r < n else zeros(n, 0)
    return R, N
