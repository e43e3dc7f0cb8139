"""Drazin inverses of quaternionic matrices.

The Drazin inverse of ``A`` is the unique ``B`` with

    A B = B A,    B A B = B,    A^(k+1) B = A^k

for the index ``k`` of ``A``. It inverts ``A`` on ``R(A^k)`` and vanishes on
``N(A^k)``. On ``H^n`` a quasinilpotent matrix is nilpotent, so the
generalized (Koliha) Drazin inverse coincides with the Drazin inverse and
:func:`generalized_drazin` is only an alias.

Three independent constructions are provided:

* :func:`drazin_algebraic`: core-nilpotent split of the complex adjoint.
* :func:`drazin_via_projection`: ``(A + P)^-1 (I - P)`` with ``P`` the Riesz
  projection of the zero sphere.
* :func:`drazin_via_funcalc`: the functional calculus applied to ``1/z`` on
  circles around the nonzero spectrum only.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import IllSeparatedWarning, PreconditionError
from .geninv import (SpectrumReport, projection_from_bases, reciprocal_spectrum_report,
                     subspace_residual)
from .hmat import (HMatrix, _pullback, block_diag, complex_adjoint, hstack, identity,
                   inverse, matmul, operator_norm, power, power_tolerance, range_kernel_basis,
                   rank_chain, singular_values, zeros)
from .quat import EigenSphere
from .scalc import build_contours, drazin_selector, func_calc, riesz_projection
from .sspec import Spectrum, s_spectrum

__all__ = [
    "DrazinResult",
    "VerifyReport",
    "index",
    "ascent",
    "descent",
    "decomposition_check",
    "drazin",
    "drazin_algebraic",
    "drazin_via_projection",
    "drazin_via_funcalc",
    "generalized_drazin",
    "verify_drazin",
    "identity_suite",
    "commuting_product_check",
    "left_mult_check",
    "zero_gap",
    "index_coherence",
    "ROUTES",
]

ZERO = EigenSphere(0.0, 0.0)
ROUTES = ("algebraic", "projection", "funcalc")


def _rel(res: float, scale: float) -> float:
    return res / max(1.0, scale)


# -- reports ---------------------------------------------------------------------

@dataclass
class VerifyReport:
    """Named residuals with the tolerance they are judged against."""

    residuals: dict[str, float]
    tol: float

    def passed(self, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return all(v <= tol for v in self.residuals.values())

    def failures(self, tol: float | None = None) -> list[str]:
        tol = self.tol if tol is None else tol
        return [k for k, v in self.residuals.items() if not v <= tol]

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)


@dataclass
class DrazinResult:
    """Drazin inverse with its index and the projection ``P = I - A A^D``."""

    inverse: HMatrix
    index: int
    projection: HMatrix
    route: str = "algebraic"
    info: dict = field(default_factory=dict, repr=False)

    def residuals(self, A: HMatrix) -> dict[str, float]:
        return verify_drazin(A, self.inverse, self.index).residuals

    def to_dict(self, A: HMatrix | None = None, tol: float | None = None) -> dict:
        from .formats import drazin_to_dict
        return drazin_to_dict(self, A, tol)


# -- index, ascent, descent -----------------------------------------------------

def index(A: HMatrix, norm_hint: float | None = None) -> int:
    """Smallest ``k >= 0`` with ``rank(A^k) = rank(A^(k+1))``.

    See :func:`qspectral.hmat.rank_chain` for ``norm_hint``.
    """
    return len(rank_chain(A, norm_hint)) - 2


def _stabilization(A: HMatrix, which: int) -> int:
    """First ``k`` where the range (``which=0``) or kernel (``which=1``) chain stops.

    Consecutive subspaces are compared by dimension and by mutual containment
    of their orthonormal bases, not by rank alone.
    """
    n = A.n
    prev = range_kernel_basis(A, 0)[which]
    for k in range(0, n + 1):
        cur = range_kernel_basis(A, k + 1)[which]
        if prev.shape[1] == cur.shape[1]:
            if cur.shape[1] == 0:
                return k
            if max(subspace_residual(prev, cur), subspace_residual(cur, prev)) <= 1e-6:
                return k
        prev = cur
    return n


def ascent(A: HMatrix) -> int:
    """Smallest ``k`` with ``N(A^k) = N(A^(k+1))``."""
    return _stabilization(A, 1)


def descent(A: HMatrix) -> int:
    """Smallest ``k`` with ``R(A^k) = R(A^(k+1))``."""
    return _stabilization(A, 0)


@dataclass
class DecompositionReport:
    k: int
    range_dim: int
    kernel_dim: int
    independence: float  # smallest singular value of [R N]
    residual: float

    def passed(self, n: int, tol: float = 1e-8) -> bool:
        return (self.range_dim + self.kernel_dim == n and self.independence > 1e-8
                and self.residual <= tol)


def decomposition_check(A: HMatrix, k: int | None = None) -> DecompositionReport:
    """Check ``H^n = R(A^k) + N(A^k)`` (direct) with both parts ``A``-invariant.

    The residual is the largest of the invariance defects ``||(I-P_R) A R||``,
    ``||(I-P_N) A N||`` and the idempotence defect of the oblique projection
    onto ``R(A^k)`` along ``N(A^k)``.
    """
    n = A.n
    k = index(A) if k is None else k
    R, N = range_kernel_basis(A, k)
    r, m = R.shape[1], N.shape[1]
    if r + m != n:
        return DecompositionReport(k, r, m, 0.0, math.inf)
    S = hstack([R, N])
    sv = singular_values(S)
    indep = float(sv[-1]) if sv.size else 1.0
    res = 0.0
    na = max(1.0, operator_norm(A))
    if r:
        res = max(res, subspace_residual(matmul(A, R), R) if r < n else 0.0)
    if m:
        AN = matmul(A, N)
        if operator_norm(AN) > 0:
            res = max(res, subspace_residual(AN, N) * operator_norm(AN) / na)
    if 0 < r < n:
        P = projection_from_bases(R, N)
        res = max(res, _rel((matmul(P, P) - P).norm(), operator_norm(P) ** 2))
    return DecompositionReport(k, r, m, indep, res)


# -- the three routes -------------------------------------------------------------

def _result(A: HMatrix, B: HMatrix, k: int, route: str, **info) -> DrazinResult:
    P = identity(A.n) - matmul(A, B)
    return DrazinResult(B, k, P, route, info)


def drazin_algebraic(A: HMatrix, norm_hint: float | None = None) -> DrazinResult:
    """Drazin inverse from the core-nilpotent split of ``chi(A)``.

    With ``k`` the index, the columns of ``chi(A^k)``'s left singular vectors
    span ``R(chi(A)^k)`` and the trailing right singular vectors span
    ``N(chi(A)^k)``. In the basis ``S = [range | kernel]`` ``chi(A)`` is
    block diagonal ``C + N`` with ``C`` invertible, and
    ``chi(A)^D = S (C^-1 + 0) S^-1``. The result is the adjoint of a
    quaternion matrix because the Drazin inverse is unique and conjugation by
    the structure matrix maps the construction to itself.

    Pass ``norm_hint`` when ``A`` is itself a computed product (see
    :func:`qspectral.hmat.rank_chain`).
    """
    n = A.n
    ranks = rank_chain(A, norm_hint)
    k = len(ranks) - 2
    r = ranks[-1]
    if k == 0:
        return _result(A, inverse(A), 0, "algebraic")
    if r == 0:
        return _result(A, zeros(n), k, "algebraic")
    M = complex_adjoint(A)
    U, _, Vh = np.linalg.svd(complex_adjoint(power(A, k)))
    S = np.hstack([U[:, :2 * r], Vh[2 * r:].conj().T])
    T = np.linalg.solve(S, M @ S)
    core = np.zeros_like(M)
    core[:2 * r, :2 * r] = np.linalg.inv(T[:2 * r, :2 * r])
    D = S @ np.linalg.solve(S.T, core.T).T
    return _result(A, _pullback(D), k, "algebraic", core_dim=r)


def zero_gap(spec: Spectrum) -> float:
    """Distance from the zero sphere to the nonzero spectrum (``inf`` if none)."""
    nz = [s for s, _ in spec if s.modulus > 0.0]
    return min((s.modulus for s in nz), default=math.inf)


def _is_singular(spec: Spectrum) -> bool:
    return any(s.u == 0.0 and s.v == 0.0 for s, _ in spec)


def _ill_separated(A: HMatrix, spec: Spectrum, route: str) -> DrazinResult | None:
    gap = zero_gap(spec)
    limit = 1e-3 * operator_norm(A)
    if _is_singular(spec) and gap < limit:
        warnings.warn(f"{route} route: zero sphere ill-separated from the nonzero spectrum "
                      f"(gap {gap:.3e} < {limit:.3e}); using the algebraic route",
                      IllSeparatedWarning, stacklevel=3)
        res = drazin_algebraic(A)
        res.route = "algebraic"
        res.info["ill_separated"] = True
        res.info["requested_route"] = route
        return res
    return None


def drazin_via_projection(A: HMatrix, **contour_kw) -> DrazinResult:
    """``A^D = (A + P)^-1 (I - P)`` with ``P`` the Riesz projection of ``{0}``.

    ``P = 0`` when ``A`` is invertible. Extra keyword arguments go to the
    contour builder (``radius``, ``nodes``, ``margin``).
    """
    n = A.n
    spec = s_spectrum(A)
    k = index(A)
    if not _is_singular(spec):
        return _result(A, inverse(A), k, "projection", riesz=zeros(n))
    fallback = _ill_separated(A, spec, "projection")
    if fallback is not None:
        return fallback
    kw = _contour_kw(contour_kw)
    P = riesz_projection(A, [ZERO], spec, **kw)
    I = identity(n)
    B = matmul(inverse(A + P), I - P)
    return _result(A, B, k, "projection", riesz=P)


def _contour_kw(kw: dict) -> dict:
    out = {}
    for key in ("radius", "nodes", "margin", "max_radius"):
        if kw.get(key) is not None:
            out[key] = kw[key]
    return out


def drazin_via_funcalc(A: HMatrix, **contour_kw) -> DrazinResult:
    """``A^D = f(A)`` with ``f = 1/z`` near the nonzero spectrum and 0 near 0.

    Only circles around the nonzero spheres are integrated; the zero sphere
    contributes nothing. ``info["spectrum_check"]`` compares the nonzero
    spectrum of the result with the reciprocal spheres of ``A``.
    """
    n = A.n
    spec = s_spectrum(A)
    k = index(A)
    fallback = _ill_separated(A, spec, "funcalc")
    if fallback is not None:
        return fallback
    nonzero = [s for s, _ in spec if s.modulus > 0.0]
    if not nonzero:
        B = zeros(n)
    else:
        f = drazin_selector(zero_gap(spec) / 2.0)
        contours = build_contours(spec, nonzero, avoid=(0j,), **_contour_kw(contour_kw))
        B = func_calc(f, A, contours)
    report = reciprocal_spectrum_report(A, B)
    return _result(A, B, k, "funcalc", spectrum_check=report)


def drazin(A: HMatrix, route: str = "algebraic", **contour_kw) -> DrazinResult:
    """Dispatch to one of :data:`ROUTES`."""
    if route == "algebraic":
        return drazin_algebraic(A)
    if route == "projection":
        return drazin_via_projection(A, **contour_kw)
    if route == "funcalc":
        return drazin_via_funcalc(A, **contour_kw)
    raise ValueError(f"unknown route {route!r}; expected one of {', '.join(ROUTES)}")


generalized_drazin = drazin_algebraic


# -- verification -------------------------------------------------------------------

def verify_drazin(A: HMatrix, B: HMatrix, k: int, tol: float = 1e-8) -> VerifyReport:
    """Residuals of the three defining identities and of the nilpotent part.

    Each residual is divided by ``max(1, product of the factor norms)`` of
    the identity, so values are comparable across scales. The nilpotency
    residual is ``||(A - A^2 B)^max(k,1)||``.
    """
    na, nb = operator_norm(A), operator_norm(B)
    AB = matmul(A, B)
    Ak = power(A, k)
    res = {
        "AB=BA": _rel((AB - matmul(B, A)).norm(), na * nb),
        "AB^2=B": _rel((matmul(AB, B) - B).norm(), na * nb * nb),
        "A^(k+1)B=A^k": _rel((matmul(matmul(Ak, A), B) - Ak).norm(), na ** (k + 1) * nb),
    }
    m = max(k, 1)
    Nil = A - matmul(A, AB)
    res["(A-A^2B)^k=0"] = _rel(power(Nil, m).norm(), (na * (1.0 + na * nb)) ** m)
    return VerifyReport(res, tol)


def _dev(X: HMatrix, Y: HMatrix) -> float:
    return _rel((X - Y).norm(), max(operator_norm(X), operator_norm(Y)))


def identity_suite(A: HMatrix, k: int = 3, tol: float = 1e-7) -> VerifyReport:
    """The four power identities for the Drazin inverse, via the algebraic route.

    Deviations are relative to ``max(1, ||lhs||, ||rhs||)``. ``A^k`` is
    handed to the algebraic route with the norm hint ``||A||^k``.
    """
    D = drazin_algebraic(A).inverse
    DD = drazin_algebraic(D).inverse
    Ak = drazin_algebraic(power(A, k), operator_norm(A) ** k).inverse
    res = {
        f"(A^{k})^D=(A^D)^{k}": _dev(Ak, power(D, k)),
        "(A^D)^D=A^2A^D": _dev(DD, matmul(matmul(A, A), D)),
        "((A^D)^D)^D=A^D": _dev(drazin_algebraic(DD).inverse, D),
        "A^D(A^D)^D=AA^D": _dev(matmul(D, DD), matmul(A, D)),
    }
    return VerifyReport(res, tol)


def commuting_product_check(A: HMatrix, B: HMatrix, tol: float = 1e-7,
                            commute_tol: float = 1e-10) -> VerifyReport:
    """Compare ``(AB)^D`` with ``A^D B^D`` for commuting ``A`` and ``B``.

    Raises
    ------
    PreconditionError
        If ``||AB - BA|| > commute_tol * max(1, ||A|| ||B||)``.
    """
    AB = matmul(A, B)
    c = _rel((AB - matmul(B, A)).norm(), operator_norm(A) * operator_norm(B))
    if c > commute_tol:
        raise PreconditionError(f"inputs do not commute (residual {c:.3e})", c)
    lhs = drazin_algebraic(AB, operator_norm(A) * operator_norm(B)).inverse
    rhs = matmul(drazin_algebraic(A).inverse, drazin_algebraic(B).inverse)
    return VerifyReport({"(AB)^D=A^DB^D": _dev(lhs, rhs)}, tol)


def left_mult_check(A: HMatrix, tol: float = 1e-7) -> VerifyReport:
    """Left multiplication ``L_A: X -> A X`` on ``H^(n x n)``.

    Vectorizing column by column, ``L_A`` is block diagonal with ``n`` copies
    of ``A`` (it commutes with the right scalar action column-wise). The
    report holds ``|i(L_A) - i(A)|`` and the deviation of ``(L_A)^D`` from
    ``L_(A^D)``.
    """
    n = A.n
    if n > 4:
        raise ValueError(f"left_mult_check needs n <= 4 (L_A is n^2 x n^2), got n = {n}")
    L = block_diag(*([A] * n))
    DA = drazin_algebraic(A)
    DL = drazin_algebraic(L)
    res = {
        "i(L_A)=i(A)": float(abs(DL.index - DA.index)),
        "(L_A)^D=L_(A^D)": _dev(DL.inverse, block_diag(*([DA.inverse] * n))),
    }
    return VerifyReport(res, tol)


def index_coherence(A: HMatrix, B: HMatrix | None = None) -> dict[str, int]:
    """Index, ascent, descent and the nilpotency index of ``A - A^2 A^D``.

    The nilpotent part lives on ``R(P)`` with ``P = I - A A^D``, so its index
    is the smallest ``m`` with ``(A - A^2 A^D)^m P = 0`` (``m = 0`` exactly
    when ``A`` is invertible and ``P = 0``).
    """
    if B is None:
        B = drazin_algebraic(A).inverse
    n = A.n
    na, nb = operator_norm(A), operator_norm(B)
    P = identity(n) - matmul(A, B)
    Nil = matmul(A, P)
    nil_index = n
    Pk = P
    for m in range(0, n + 1):
        if m:
            Pk = matmul(Nil, Pk)
        # rounding in A A^D is of order eps ||A|| ||A^D||; allow a generous multiple
        scale = (na * (1.0 + na * nb)) ** m * (1.0 + na * nb)
        if Pk.norm() <= 1e3 * power_tolerance(A, 1, 1.0) * max(1.0, scale):
            nil_index = m
            break
    return {"index": index(A), "ascent": ascent(A), "descent": descent(A),
            "nilpotency": nil_index}
