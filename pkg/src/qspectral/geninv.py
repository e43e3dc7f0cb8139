"""Generalized inverses: ``B`` with ``A B A = A`` and ``B A B = B``.

On ``H^n`` every subspace is closed and complemented, so every matrix has a
generalized inverse; the Moore-Penrose pseudoinverse is the canonical one.
All others are ``P B Q`` with ``Q`` a projection onto ``R(A)`` and ``P`` a
projection whose kernel is ``N(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NoGroupInverseError, PreconditionError
from .hmat import (HMatrix, _pullback, block_diag, complex_adjoint, hstack, identity,
                   inverse, matmul, operator_norm, power_rank, range_kernel_basis, rank,
                   span_basis, zeros)
from .sspec import match_spheres, s_spectrum
from .quat import sphere_from_complex

__all__ = [
    "GenInvResult",
    "moore_penrose",
    "generalized_inverse",
    "gen_inverse_from",
    "projection_from_bases",
    "group_inverse",
    "group_inverse_spectrum_check",
    "subspace_residual",
]


def _rel(res: float, scale: float) -> float:
    return res / max(1.0, scale)


def subspace_residual(X: HMatrix, Y: HMatrix) -> float:
    """How far the column space of ``X`` is from lying inside that of ``Y``.

    ``||(I - P_Y) X|| / max(1, ||X||)`` with ``P_Y`` the orthogonal projection
    onto ``R(Y)``.
    """
    n = X.shape[0]
    r = rank(Y)
    if r == 0:
        return _rel(operator_norm(X), operator_norm(X))
    Qy = span_basis(Y, r)
    resid = X - matmul(Qy, matmul(Qy.H, X))
    return _rel(operator_norm(resid), operator_norm(X))


@dataclass
class GenInvResult:
    """A generalized inverse with its two projections ``AB`` and ``BA``."""

    A: HMatrix = field(repr=False)
    B: HMatrix
    AB: HMatrix = field(init=False, repr=False)
    BA: HMatrix = field(init=False, repr=False)

    def __post_init__(self):
        self.AB = matmul(self.A, self.B)
        self.BA = matmul(self.B, self.A)

    def residuals(self) -> dict[str, float]:
        """Relative residuals of the defining and derived identities.

        Ranges are compared as column spaces; ``N(X) = R(X^*)^perp`` turns
        kernel equalities into range equalities of conjugate transposes.
        """
        A, B, AB, BA = self.A, self.B, self.AB, self.BA
        na, nb = operator_norm(A), operator_norm(B)
        out = {
            "ABA=A": _rel((matmul(AB, A) - A).norm(), na * na * nb),
            "BAB=B": _rel((matmul(BA, B) - B).norm(), na * nb * nb),
            "(AB)^2=AB": _rel((matmul(AB, AB) - AB).norm(), (na * nb) ** 2),
            "(BA)^2=BA": _rel((matmul(BA, BA) - BA).norm(), (na * nb) ** 2),
        }
        pairs = {
            "R(AB)=R(A)": (AB, A),
            "R(BA)=R(B)": (BA, B),
            "N(BA)=N(A)": (BA.H, A.H),
            "N(AB)=N(B)": (AB.H, B.H),
        }
        for name, (X, Y) in pairs.items():
            rank_gap = abs(rank(X) - rank(Y))
            contain = max(subspace_residual(X, Y), subspace_residual(Y, X))
            out[name] = contain if rank_gap == 0 else float("inf")
        return out

    def max_residual(self) -> float:
        return max(self.residuals().values())


def moore_penrose(A: HMatrix, rcond: float | None = None) -> HMatrix:
    """Moore-Penrose pseudoinverse, pulled back from that of ``chi(A)``."""
    M = complex_adjoint(A)
    if rcond is None:
        rcond = 2 * max(M.shape) * np.finfo(float).eps
    return _pullback(np.linalg.pinv(M, rcond=rcond))


def generalized_inverse(A: HMatrix) -> GenInvResult:
    return GenInvResult(A, moore_penrose(A))


def _is_projection_residual(P: HMatrix) -> float:
    return _rel((matmul(P, P) - P).norm(), operator_norm(P) ** 2)


def gen_inverse_from(B: HMatrix, P: HMatrix, Q: HMatrix, A: HMatrix,
                     tol: float = 1e-8) -> HMatrix:
    """The generalized inverse ``P B Q``.

    Parameters
    ----------
    B : HMatrix
        A generalized inverse of ``A``.
    P : HMatrix
        Projection with ``N(P) = N(A)``.
    Q : HMatrix
        Projection onto ``R(A)``.

    Raises
    ------
    PreconditionError
        With the failing residual, if any hypothesis is violated beyond ``tol``.
    """
    checks = GenInvResult(A, B).residuals()
    for key in ("ABA=A", "BAB=B"):
        if checks[key] > tol:
            raise PreconditionError(f"B is not a generalized inverse of A ({key} "
                                    f"residual {checks[key]:.3e})", checks[key])
    na = operator_norm(A)
    conds = {
        "Q^2=Q": _is_projection_residual(Q),
        "P^2=P": _is_projection_residual(P),
        # R(Q) = R(A): Q A = A and rank(Q) = rank(A)
        "QA=A": _rel((matmul(Q, A) - A).norm(), operator_norm(Q) * na),
        # N(P) = N(A): A P = A and rank(P) = rank(A)
        "AP=A": _rel((matmul(A, P) - A).norm(), operator_norm(P) * na),
    }
    for key, val in conds.items():
        if val > tol:
            raise PreconditionError(f"precondition {key} violated (residual {val:.3e})", val)
    ra = rank(A)
    if rank(Q) != ra:
        raise PreconditionError(f"rank(Q) = {rank(Q)} differs from rank(A) = {ra}")
    if rank(P) != ra:
        raise PreconditionError(f"rank(P) = {rank(P)} differs from rank(A) = {ra}")
    return matmul(matmul(P, B), Q)


def projection_from_bases(range_basis: HMatrix, kernel_basis: HMatrix) -> HMatrix:
    """Projection onto ``span(range_basis)`` along ``span(kernel_basis)``."""
    n = range_basis.shape[0]
    r = range_basis.shape[1]
    S = hstack([range_basis, kernel_basis])
    if S.shape[1] != n:
        raise ValueError("bases must together have n columns")
    E = block_diag(identity(r), zeros(n - r)) if r < n else identity(n)
    return matmul(matmul(S, E), inverse(S))


def _commuting_residuals(A: HMatrix, B: HMatrix) -> float:
    na, nb = operator_norm(A), operator_norm(B)
    AB, BA = matmul(A, B), matmul(B, A)
    return max(_rel((matmul(AB, A) - A).norm(), na * na * nb),
               _rel((matmul(BA, B) - B).norm(), na * nb * nb),
               _rel((AB - BA).norm(), na * nb))


def group_inverse(A: HMatrix, tol: float = 1e-9) -> HMatrix:
    """The unique generalized inverse commuting with ``A``.

    Exists iff ``rank(A) = rank(A^2)``, i.e. ``H^n = R(A) + N(A)`` directly.
    Computed as ``A (A^3)^+ A``; if that fails verification the explicit
    ``R(A) + N(A)`` splitting is used instead.

    Raises
    ------
    NoGroupInverseError
        If the rank drops from ``A`` to ``A^2`` (index > 1).
    """
    n = A.n
    r1, r2 = power_rank(A, 1), power_rank(A, 2)
    if r1 != r2:
        raise NoGroupInverseError(
            f"no commuting generalized inverse (index > 1): rank(A) = {r1}, rank(A^2) = {r2}")
    if r1 == 0:
        return zeros(n)
    A3 = matmul(matmul(A, A), A)
    B = matmul(matmul(A, moore_penrose(A3)), A)
    if _commuting_residuals(A, B) <= tol:
        return B
    return _group_inverse_split(A)


def _group_inverse_split(A: HMatrix) -> HMatrix:
    n = A.n
    R, N = range_kernel_basis(A, 1)
    r = R.shape[1]
    S = hstack([R, N])
    Sinv = inverse(S)
    T = matmul(matmul(Sinv, A), S)
    T11 = HMatrix(T.z1[:r, :r], T.z2[:r, :r])
    core = block_diag(inverse(T11), zeros(n - r)) if r < n else inverse(T11)
    return matmul(matmul(S, core), Sinv)


@dataclass
class SpectrumReport:
    computed: list
    expected: list
    pairs: list
    max_deviation: float

    def passed(self, tol: float = 1e-7) -> bool:
        return self.max_deviation <= tol


def reciprocal_spectrum_report(A: HMatrix, B: HMatrix, zero_tol: float = 1e-6) -> SpectrumReport:
    """Nonzero spheres of ``B`` against ``[1/z]`` for nonzero spectral points ``z`` of ``A``."""
    sa = s_spectrum(A)
    sb = s_spectrum(B)
    za = zero_tol * max(1.0, operator_norm(A))
    zb = zero_tol * max(1.0, operator_norm(B))
    expected = [sphere_from_complex(1.0 / s.representative()) for s in sa.nonzero(za)]
    dedup = []
    for s in expected:
        if not any(s.close_to(t, sb.tol) for t in dedup):
            dedup.append(s)
    computed = sb.nonzero(zb)
    pairs, dev = match_spheres(computed, dedup)
    return SpectrumReport(computed, dedup, pairs, dev)


def group_inverse_spectrum_check(A: HMatrix) -> SpectrumReport:
    return reciprocal_spectrum_report(A, group_inverse(A))
