"""S-spectrum, S-resolvent, spectral radius and the pseudo-resolvent series.

For a right-linear ``A`` on ``H^n`` and a quaternion ``q`` the pencil

    Q_q(A) = A^2 - 2 Re(q) A + |q|^2 I

has real coefficients, so it depends on ``q`` only through its sphere
``[q]``. Through the complex adjoint it factors as

    chi(Q_q(A)) = (chi(A) - z I)(chi(A) - conj(z) I),   z = Re(q) + |Im(q)| i,

so ``q`` lies in the S-spectrum exactly when ``z`` (or ``conj(z)``) is an
eigenvalue of ``chi(A)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import SingularOperatorError, SpectrumError
from .hmat import (HMatrix, _scalar_matrix, complex_adjoint, identity, inverse,
                   matmul, operator_norm, power, rank_chain, scale_right)
from .quat import EigenSphere, Quaternion, conj, inv, norm, sphere_of

__all__ = [
    "Spectrum",
    "q_pencil",
    "s_spectrum",
    "s_resolvent_left",
    "spectral_radius_gelfand",
    "gelfand_sequence",
    "pseudo_resolvent_series",
    "is_quasinilpotent",
    "match_spheres",
    "sphere_tolerance",
]


def sphere_tolerance(A: HMatrix) -> float:
    """Default sphere identification tolerance ``1e-8 (1 + ||A||)``."""
    return 1e-8 * (1.0 + operator_norm(A))


@dataclass
class Spectrum:
    """Finite S-spectrum: spheres with multiplicities (summing to ``n``)."""

    spheres: list[tuple[EigenSphere, int]] = field(default_factory=list)
    tol: float = 0.0

    def __iter__(self):
        return iter(self.spheres)

    def __len__(self):
        return len(self.spheres)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.spheres)

    @property
    def radius(self) -> float:
        """S-spectral radius: the largest ``|q|`` over the spectrum."""
        return max((s.modulus for s, _ in self.spheres), default=0.0)

    def sphere_list(self) -> list[EigenSphere]:
        return [s for s, _ in self.spheres]

    def contains(self, q, tol: float | None = None) -> bool:
        sph = q if isinstance(q, EigenSphere) else sphere_of(q)
        tol = self.tol if tol is None else tol
        return any(s.close_to(sph, tol) for s, _ in self.spheres)

    def multiplicity(self, sph: EigenSphere, tol: float | None = None) -> int:
        tol = self.tol if tol is None else tol
        return sum(m for s, m in self.spheres if s.close_to(sph, tol))

    def nonzero(self, zero_tol: float | None = None) -> list[EigenSphere]:
        zero_tol = self.tol if zero_tol is None else zero_tol
        return [s for s, _ in self.spheres if s.modulus > zero_tol]

    def to_dict(self) -> dict:
        return {
            "format": "qspec-1",
            "spheres": [{"u": s.u, "v": s.v, "mult": m} for s, m in self.spheres],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Spectrum":
        from .formats import parse_spectrum
        return parse_spectrum(doc)


def match_spheres(a, b) -> tuple[list[tuple[EigenSphere, EigenSphere]], float]:
    """Optimal one-to-one matching of two sphere lists.

    Returns the matched pairs and the largest matched distance; unmatched
    spheres (lists of different length) make the deviation infinite.
    """
    a, b = list(a), list(b)
    if not a and not b:
        return [], 0.0
    if not a or not b:
        return [], math.inf
    cost = np.array([[x.distance(y) for y in b] for x in a])
    rows, cols = linear_sum_assignment(cost)
    pairs = [(a[r], b[c]) for r, c in zip(rows, cols)]
    dev = float(cost[rows, cols].max())
    if len(a) != len(b):
        dev = math.inf
    return pairs, dev


def q_pencil(A: HMatrix, q) -> HMatrix:
    """``Q_q(A) = A^2 - 2 Re(q) A + |q|^2 I``."""
    q = _as_quaternion(q)
    n = A.n
    return matmul(A, A) - A * (2.0 * q.a) + identity(n) * (norm(q) ** 2)


def _as_quaternion(q) -> Quaternion:
    if isinstance(q, Quaternion):
        return q
    if isinstance(q, complex):
        return Quaternion.from_complex(q)
    if isinstance(q, (int, float, np.floating, np.integer)):
        return Quaternion(float(q))
    return Quaternion.from_array(q)


def _zero_multiplicity(A: HMatrix) -> int:
    """Algebraic multiplicity of 0: ``n - rank(A^k)`` once the rank chain stops."""
    ranks = rank_chain(A)
    return A.n - ranks[-1]


def _clusters(ev: np.ndarray, reach: float) -> list[list[int]]:
    """Single-linkage groups of eigenvalue indices at distance <= ``reach``."""
    left = list(range(len(ev)))
    groups = []
    while left:
        grp = [left.pop(0)]
        for g in grp:  # grp grows while it is scanned
            near = [j for j in left if abs(ev[j] - ev[g]) <= reach]
            for j in near:
                left.remove(j)
            grp.extend(near)
        groups.append(grp)
    return groups


def _shifted_nullity(M: np.ndarray, c: complex) -> int:
    """Dimension of the generalized eigenspace of ``M`` at ``c``, by a rank chain."""
    m = M.shape[0]
    B = M - c * np.eye(m)
    scale = max(1.0, float(np.linalg.norm(B, 2)))
    P = np.eye(m)
    prev = m
    for k in range(1, m + 1):
        P = P @ B
        s = np.linalg.svd(P, compute_uv=False)
        r = int(np.sum(s > 1e3 * m * np.finfo(float).eps * scale ** k))
        if r == prev:
            break
        prev = r
    return m - prev


def _snap_defective(M: np.ndarray, ev: np.ndarray, reach: float = 1e-2) -> None:
    """Replace each multiple eigenvalue's scattered copies by their mean (in place).

    A ``k x k`` Jordan block at ``c`` comes back from ``eig`` as ``k`` points
    scattered ``O(eps^(1/k))`` around ``c``, while their mean is accurate to
    ``O(eps)``. Nonzero eigenvalues are grouped within ``reach * max(1, ||M||)``
    and a group of size ``m`` is snapped only if the generalized eigenspace
    at its mean has dimension ``m``. Groups of genuinely distinct eigenvalues
    fail that test and are left alone. The zero cluster is handled separately.
    """
    live = np.flatnonzero(ev != 0.0)
    if live.size < 2:
        return
    reach = reach * max(1.0, float(np.linalg.norm(M, 2)))
    for grp in _clusters(ev[live], reach):
        if len(grp) < 2:
            continue
        idx = live[grp]
        c = complex(np.mean(ev[idx]))
        if _shifted_nullity(M, c) == len(idx):
            ev[idx] = c


def s_spectrum(A: HMatrix, tol: float | None = None) -> Spectrum:
    """S-spectrum from the eigenvalues of the complex adjoint.

    Eigenvalues in the open upper half-plane map one-to-one to spheres, real
    eigenvalues come in duplicated pairs and map two-to-one to real points.
    The zero cluster is sized by the rank chain of ``A`` and snapped to
    exactly 0, because rounding spreads a nilpotent block's eigenvalues over
    a disk of radius ``O(eps^(1/k))``. Other multiple eigenvalues are
    snapped to the mean of their copies once a rank test confirms them.

    Parameters
    ----------
    A : HMatrix
        Square matrix.
    tol : float, optional
        Sphere identification tolerance; default :func:`sphere_tolerance`.
    """
    n = A.n
    if tol is None:
        tol = sphere_tolerance(A)
    if n == 0:
        return Spectrum([], tol)
    ev = np.linalg.eigvals(complex_adjoint(A))
    z0 = _zero_multiplicity(A)
    if z0:
        order = np.argsort(np.abs(ev), kind="stable")
        ev[order[:2 * z0]] = 0.0
    _snap_defective(complex_adjoint(A), ev)

    upper = ev[ev.imag > tol]
    reals = np.sort(ev[np.abs(ev.imag) <= tol].real, kind="stable")

    raw: list[tuple[EigenSphere, int]] = [(EigenSphere(z.real, z.imag), 1) for z in upper]
    real_units = n - len(upper)
    if real_units > 0 and reals.size:
        # consecutive pairs of sorted real eigenvalues form one real point each
        groups = np.array_split(reals, real_units)
        raw += [(EigenSphere(float(np.mean(g)), 0.0), 1) for g in groups if g.size]

    return Spectrum(_merge(raw, tol), tol)


def _merge(raw, tol):
    raw = sorted(raw, key=lambda sm: (sm[0].u, sm[0].v))
    clusters: list[list] = []  # [sum_u, sum_v, weight, mult]
    for sph, m in raw:
        for c in clusters:
            cu, cv = c[0] / c[2], c[1] / c[2]
            if max(abs(cu - sph.u), abs(cv - sph.v)) <= tol:
                c[0] += sph.u * m
                c[1] += sph.v * m
                c[2] += m
                c[3] += m
                break
        else:
            clusters.append([sph.u * m, sph.v * m, m, m])
    out = []
    for su, sv, w, m in clusters:
        u, v = su / w, sv / w
        out.append((EigenSphere(0.0 if u == 0 else u, v if v > tol else 0.0), m))
    return out


def s_resolvent_left(s, A: HMatrix, check_spectrum: bool = True) -> HMatrix:
    """Left S-resolvent ``-Q_s(A)^-1 (A - conj(s) I)``.

    Raises
    ------
    SpectrumError
        If ``s`` lies on the S-spectrum of ``A``.
    """
    s = _as_quaternion(s)
    if check_spectrum and s_spectrum(A).contains(s):
        raise SpectrumError(f"S-resolvent undefined on the S-spectrum (s = {s})")
    try:
        Qinv = inverse(q_pencil(A, s))
    except SingularOperatorError as exc:
        raise SpectrumError(f"S-resolvent undefined on the S-spectrum (s = {s})") from exc
    return -matmul(Qinv, A - _scalar_matrix(conj(s), A.n))


def _log_norm_power(A: HMatrix, k: int) -> float:
    """``log ||A^k||`` by repeated squaring with renormalization at each step."""
    n = A.n
    if k == 0:
        return 0.0 if n else -math.inf
    nb = operator_norm(A)
    if nb == 0.0:
        return -math.inf
    base, log_base = A / nb, math.log(nb)
    result, log_result = None, 0.0
    while k:
        if k & 1:
            if result is None:
                result, log_result = base, log_base
            else:
                result = matmul(result, base)
                log_result += log_base
                nr = operator_norm(result)
                if nr == 0.0:
                    return -math.inf
                result, log_result = result / nr, log_result + math.log(nr)
        k >>= 1
        if k:
            base = matmul(base, base)
            log_base *= 2
            nb = operator_norm(base)
            if nb == 0.0:
                # every later power that uses this factor vanishes
                return -math.inf
            base, log_base = base / nb, log_base + math.log(nb)
    return log_result


def gelfand_sequence(A: HMatrix, n_max: int) -> list[tuple[int, float]]:
    """Estimates ``||A^k||^(1/k)`` for ``k = 1, 2, 4, ...`` up to ``n_max`` (always included)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ks = []
    k = 1
    while k <= n_max:
        ks.append(k)
        k *= 2
    if ks[-1] != n_max:
        ks.append(n_max)
    out = []
    for k in ks:
        ln = _log_norm_power(A, k)
        out.append((k, 0.0 if ln == -math.inf else math.exp(ln / k)))
    return out


def spectral_radius_gelfand(A: HMatrix, n_max: int = 256) -> float:
    """``||A^n_max||^(1/n_max)``, the Gelfand estimate of the S-spectral radius."""
    return gelfand_sequence(A, n_max)[-1][1]


def pseudo_resolvent_series(q, A: HMatrix, tol: float = 1e-14,
                            max_terms: int = 100_000) -> HMatrix:
    """Sum ``sum_n A^n a_n`` with ``a_n = sum_k conj(q)^(-k-1) q^(-n+k-1)``.

    The scalars act on the right. The problem is first rescaled by ``|q|``
    (``Q_q(A)^-1 = |q|^-2 Q_w(A/|q|)^-1`` with ``w = q/|q|``), which leaves
    every term unchanged but keeps the powers in floating range. The sum stops
    once the bound ``||A^n|| (n+1) |q|^(-n-2)`` on the term norm has stayed
    below ``tol * ||sum||`` for three consecutive ``n``.

    Raises
    ------
    SpectrumError
        If ``|q|`` does not exceed the S-spectral radius.
    """
    q = _as_quaternion(q)
    n = A.n
    r = s_spectrum(A).radius
    nq = norm(q)
    if nq <= r or nq == 0.0:
        raise SpectrumError(
            f"outside convergence region: |q| = {nq:.6g} <= spectral radius {r:.6g}")
    B = A / nq
    w = Quaternion(q.a / nq, q.b / nq, q.c / nq, q.d / nq)
    inv_cw, inv_w = inv(conj(w)), inv(w)
    pow_cw = [Quaternion(1.0), inv_cw]
    pow_w = [Quaternion(1.0), inv_w]

    total = identity(n) * 0.0
    Bn = identity(n)
    quiet = 0
    for m in range(max_terms):
        while len(pow_cw) < m + 2:
            pow_cw.append(pow_cw[-1] * inv_cw)
            pow_w.append(pow_w[-1] * inv_w)
        a_m = Quaternion()
        for k in range(m + 1):
            a_m = a_m + pow_cw[k + 1] * pow_w[m - k + 1]
        total = total + scale_right(Bn, a_m)
        bound = operator_norm(Bn) * (m + 1)
        quiet = quiet + 1 if bound <= tol * max(operator_norm(total), 1e-300) else 0
        if quiet >= 3:
            return total / nq**2
        Bn = matmul(Bn, B)
    raise SpectrumError(f"pseudo-resolvent series did not converge in {max_terms} terms")


def is_quasinilpotent(A: HMatrix) -> bool:
    """True iff the S-spectrum is ``{0}`` (on ``H^n``: iff ``A^n = 0``)."""
    spec = s_spectrum(A)
    return [(s.u, s.v) for s, _ in spec] == [(0.0, 0.0)]
