"""S-functional calculus by trapezoidal quadrature on the (1, i) slice plane.

For an intrinsic function ``f`` and a family of circles enclosing (part of)
the S-spectrum of ``A``,

    f(A) = 1/(2 pi) * integral of S_L^-1(s, A) ds_i f(s),    ds_i = ds (-i),

where ``S_L^-1(s, A) = -Q_s(A)^-1 (A - conj(s) I)`` and the scalar
``ds_i f(s)`` acts on the right. All of ``s``, ``-i`` and ``f(s)`` lie in the
same slice plane, so the weight is an ordinary complex number there.

Intrinsic functions are stored by their values on the closed upper half
plane; the lower half is filled in by reflection, ``f(conj z) = conj f(z)``,
so the intrinsic condition holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import QuadratureError, SeparationError
from .generators import slice_gap
from .hmat import HMatrix, _pullback, complex_adjoint, identity, zeros
from .quat import EigenSphere, Quaternion, conj, inv, mul, norm, sphere_from_complex
from .sspec import Spectrum, match_spheres, s_spectrum, sphere_tolerance

__all__ = [
    "Annulus",
    "Domain",
    "IntrinsicFn",
    "Circle",
    "SliceContour",
    "constant",
    "identity_fn",
    "poly",
    "recip",
    "exp_fn",
    "drazin_selector",
    "parse_function",
    "build_contours",
    "func_calc",
    "full_contours",
    "riesz_projection",
    "spectral_mapping_check",
    "composition_check",
    "image_spectrum",
    "cauchy_kernel_left",
    "cauchy_kernel_right",
    "cauchy_formula",
    "MappingReport",
    "CompositionReport",
]

TWO_PI = 2.0 * math.pi


# -- domains and functions ----------------------------------------------------

@dataclass(frozen=True)
class Annulus:
    """Open set ``inner < |z - center| < outer`` with a real center.

    ``inner < 0`` gives a full disk; ``outer = inf`` an exterior region.
    """

    center: float = 0.0
    inner: float = -1.0
    outer: float = math.inf

    def contains(self, z) -> np.ndarray:
        d = np.abs(np.asarray(z) - self.center)
        return (d > self.inner) & (d < self.outer)

    def contains_disk(self, c: complex, r: float) -> bool:
        d = abs(c - self.center)
        return d + r < self.outer and d - r > self.inner


@dataclass(frozen=True)
class Domain:
    """Axially symmetric open set: a union of annuli minus isolated points."""

    annuli: tuple[Annulus, ...] = (Annulus(),)
    exclude: tuple[complex, ...] = ()

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        ok = np.zeros(z.shape, dtype=bool)
        for a in self.annuli:
            ok |= a.contains(z)
        for p in self.exclude:
            ok &= z != p
        return ok

    def contains_disk(self, c: complex, r: float) -> bool:
        """Whether the closed disk ``|z - c| <= r`` lies in the domain."""
        if not any(a.contains_disk(c, r) for a in self.annuli):
            return False
        return all(abs(c - p) > r and abs(c - np.conj(p)) > r for p in self.exclude)


WHOLE_PLANE = Domain()


class IntrinsicFn:
    """Intrinsic slice function given by its values on the upper half plane.

    Parameters
    ----------
    upper : callable
        Vectorized map on complex arrays with ``Im z >= 0``; must send real
        points to real values and be holomorphic on the domain.
    name : str
        Label used in reports.
    domain : Domain
        Where the function is defined.
    coeffs : sequence of float, optional
        Real polynomial coefficients (ascending) when the function is a
        polynomial; lets compositions locate their singular points.
    """

    def __init__(self, upper: Callable, name: str = "f", domain: Domain = WHOLE_PLANE,
                 coeffs: Sequence[float] | None = None):
        self._upper = upper
        self.name = name
        self.domain = domain
        self.coeffs = None if coeffs is None else tuple(float(c) for c in coeffs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        out = np.empty(z.shape, dtype=complex)
        up = z.imag >= 0
        if up.any():
            out[up] = self._upper(z[up])
        if (~up).any():
            out[~up] = np.conj(self._upper(np.conj(z[~up])))
        return complex(out[0]) if scalar else out

    def components(self, u, v):
        """``(f0(u, v), f1(u, v))`` with ``f(u + v J) = f0 + J f1``."""
        w = self(np.asarray(u) + 1j * np.asarray(v))
        return np.real(w), np.imag(w)

    def at(self, q: Quaternion) -> Quaternion:
        """Evaluate at an arbitrary quaternion ``q = u + v J``."""
        v = math.sqrt(q.b**2 + q.c**2 + q.d**2)
        f0, f1 = self.components(q.a, v)
        if v == 0.0:
            return Quaternion(float(f0))
        f0, f1 = float(f0), float(f1)
        return Quaternion(f0, f1 * q.b / v, f1 * q.c / v, f1 * q.d / v)

    def cauchy_riemann_residual(self, z, h: float = 1e-5) -> float:
        """Largest |d f/d u + i d f/d v| / 2 by central differences at the points ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        du = (self(z + h) - self(z - h)) / (2 * h)
        dv = (self(z + 1j * h) - self(z - 1j * h)) / (2 * h)
        return float(np.max(np.abs(du + 1j * dv)) / 2)

    def __mul__(self, other: "IntrinsicFn") -> "IntrinsicFn":
        coeffs = None
        if self.coeffs is not None and other.coeffs is not None:
            coeffs = np.polynomial.polynomial.polymul(self.coeffs, other.coeffs)
        return IntrinsicFn(lambda z: self._upper(z) * other._upper(z),
                           f"({self.name})*({other.name})",
                           _intersect(self.domain, other.domain), coeffs)

    def __add__(self, other: "IntrinsicFn") -> "IntrinsicFn":
        coeffs = None
        if self.coeffs is not None and other.coeffs is not None:
            coeffs = np.polynomial.polynomial.polyadd(self.coeffs, other.coeffs)
        return IntrinsicFn(lambda z: self._upper(z) + other._upper(z),
                           f"({self.name})+({other.name})",
                           _intersect(self.domain, other.domain), coeffs)

    def compose(self, inner: "IntrinsicFn") -> "IntrinsicFn":
        """``self o inner``."""
        exclude: tuple = ()
        domain = inner.domain
        if self.domain.exclude:
            if inner.coeffs is None:
                raise ValueError("cannot locate singular points of a composition "
                                 "with a non-polynomial inner function")
            pts = []
            for p in self.domain.exclude:
                c = np.array(inner.coeffs, dtype=complex)
                c[0] -= p
                pts.extend(np.polynomial.polynomial.polyroots(c) if len(c) > 1 else [])
            exclude = tuple(complex(z) for z in pts if z.imag >= 0)
            domain = Domain(inner.domain.annuli, inner.domain.exclude + exclude)
        return IntrinsicFn(lambda z: self(inner._upper(z)), f"{self.name}∘{inner.name}", domain)

    def __repr__(self):
        return f"IntrinsicFn({self.name})"


def _intersect(d1: Domain, d2: Domain) -> Domain:
    if d1 == WHOLE_PLANE:
        return d2
    if d2 == WHOLE_PLANE:
        return d1
    if d1.annuli == d2.annuli:
        return Domain(d1.annuli, d1.exclude + d2.exclude)
    raise ValueError("products of functions on different annular domains are not supported")


def constant(c: float) -> IntrinsicFn:
    c = float(c)
    return IntrinsicFn(lambda z: np.full(z.shape, c, dtype=complex), f"{c:g}", coeffs=[c])


def identity_fn() -> IntrinsicFn:
    return IntrinsicFn(lambda z: z, "z", coeffs=[0.0, 1.0])


def poly(coeffs: Sequence[float]) -> IntrinsicFn:
    """Real polynomial ``c0 + c1 z + c2 z^2 + ...``."""
    coeffs = [float(c) for c in coeffs]
    name = "poly:" + ",".join(f"{c:g}" for c in coeffs)
    return IntrinsicFn(lambda z: np.polynomial.polynomial.polyval(z, coeffs), name,
                       coeffs=coeffs)


def recip() -> IntrinsicFn:
    return IntrinsicFn(lambda z: 1.0 / z, "1/z", Domain(exclude=(0j,)))


def exp_fn() -> IntrinsicFn:
    return IntrinsicFn(np.exp, "exp")


def drazin_selector(zero_radius: float) -> IntrinsicFn:
    """0 on the disk ``|z| < zero_radius``, ``1/z`` outside it."""
    rho = float(zero_radius)

    def upper(z):
        return np.where(np.abs(z) < rho, 0.0, 1.0 / np.where(z == 0, 1.0, z))

    dom = Domain((Annulus(0.0, -1.0, rho), Annulus(0.0, rho, math.inf)))
    return IntrinsicFn(upper, f"drazin-selector({rho:g})", dom)


def parse_function(spec: str, A: HMatrix | None = None) -> IntrinsicFn:
    """Parse ``poly:c0,c1,...``, ``recip``, ``exp`` or ``drazin-selector[:radius]``.

    Without an explicit radius the selector splits halfway between 0 and the
    nearest nonzero spectral sphere of ``A``.
    """
    spec = spec.strip()
    if spec.startswith("poly:"):
        body = spec[5:]
        try:
            return poly([float(c) for c in body.split(",") if c.strip()])
        except ValueError as exc:
            raise ValueError(f"bad polynomial coefficients in {spec!r}") from exc
    if spec == "recip":
        return recip()
    if spec == "exp":
        return exp_fn()
    if spec.startswith("drazin-selector"):
        _, _, arg = spec.partition(":")
        if arg:
            return drazin_selector(float(arg))
        if A is None:
            raise ValueError("drazin-selector needs a radius or a matrix")
        spec_a = s_spectrum(A)
        mods = [s.modulus for s in spec_a.nonzero()]
        return drazin_selector(min(mods) / 2 if mods else 1.0)
    raise ValueError(f"unknown function specifier {spec!r}")


# -- contours -----------------------------------------------------------------

@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    nodes: int = 64


@dataclass
class SliceContour:
    """Positively oriented circles in the slice plane, closed under conjugation."""

    circles: list[Circle] = field(default_factory=list)

    def __len__(self):
        return len(self.circles)

    def scaled(self, factor: float) -> "SliceContour":
        return SliceContour([Circle(c.center, c.radius * factor, c.nodes) for c in self.circles])

    def is_conjugate_closed(self) -> bool:
        cs = [(c.center, c.radius) for c in self.circles]
        return all(any(abs(np.conj(z) - w) <= 1e-14 * (1 + abs(z)) and r == rr for w, rr in cs)
                   for z, r in cs)


def _points(spheres) -> list[complex]:
    pts = []
    for s in spheres:
        pts.append(complex(s.u, s.v))
        if s.v > 0:
            pts.append(complex(s.u, -s.v))
    return pts


def build_contours(spec: Spectrum, subset, *, margin: float = 1.0 / 3.0,
                   max_radius: float = 0.5, radius: float | None = None,
                   nodes: int = 64, avoid: Sequence[complex] = ()) -> SliceContour:
    """Circles around the slice representatives of ``subset``.

    The common radius is ``min(margin * gap, max_radius)``, ``gap`` being the
    smallest distance between representatives of distinct spectral spheres
    (and any ``avoid`` points). Every non-real sphere gets a circle about
    ``u + v i`` and one about ``u - v i``.

    Raises
    ------
    SeparationError
        If ``gap < 1e-6`` or a requested sphere is not in the spectrum.
    """
    all_spheres = spec.sphere_list()
    chosen = []
    for s in subset:
        hits = [t for t in all_spheres if t.close_to(s, max(spec.tol, 1e-12))]
        if not hits:
            raise SeparationError(f"sphere {s} is not part of the spectrum")
        best = min(hits, key=lambda t: t.distance(s))
        if best not in chosen:
            chosen.append(best)
    if not chosen:
        return SliceContour([])
    extra = [EigenSphere(complex(p).real, abs(complex(p).imag)) for p in avoid]
    extra = [e for e in extra if all(e.distance(t) > spec.tol for t in all_spheres)]
    gap = slice_gap(all_spheres + extra)
    if gap < 1e-6:
        raise SeparationError(f"spectral sets not separated (gap {gap:.3e})")
    r = min(margin * gap, max_radius) if radius is None else float(radius)
    if radius is not None and radius >= gap:
        raise SeparationError(f"radius {radius} would enclose neighbouring spectral points "
                              f"(gap {gap:.3e})")
    return SliceContour([Circle(z, r, nodes) for z in _points(chosen)])


# -- quadrature ---------------------------------------------------------------

def _circle_sum(M: np.ndarray, f: IntrinsicFn, circle: Circle, N: int, offset: float):
    """Trapezoid sum over the nodes ``theta = 2 pi (m + offset) / N`` of one circle."""
    n2 = M.shape[0]
    n = n2 // 2
    theta = TWO_PI * (np.arange(N) + offset) / N
    e = np.exp(1j * theta)
    s = circle.center + circle.radius * e
    # ds (-i) f(s) = r e^{i theta} (2 pi / N) f(s)
    w = circle.radius * e * (TWO_PI / N) * f(s)
    M2 = M @ M
    eye = np.eye(n2)
    Q = M2[None] - 2.0 * s.real[:, None, None] * M[None] + (np.abs(s) ** 2)[:, None, None] * eye
    shift = np.concatenate([np.tile(np.conj(s)[:, None], (1, n)), np.tile(s[:, None], (1, n))],
                           axis=1)
    rhs = M[None] - shift[:, :, None] * eye[None]
    try:
        X = -np.linalg.solve(Q, rhs)
    except np.linalg.LinAlgError as exc:
        raise QuadratureError("a quadrature node lies on the S-spectrum") from exc
    # right scalar action of w: chi(w I) = diag(w I, conj(w) I)
    X[:, :, :n] *= w[:, None, None]
    X[:, :, n:] *= np.conj(w)[:, None, None]
    total = np.zeros((n2, n2), dtype=complex)
    for m in range(N):
        total += X[m]
    return total


def func_calc(f: IntrinsicFn, A: HMatrix, contours: SliceContour, *,
              tol: float = 1e-10, max_nodes: int = 2**14) -> HMatrix:
    """``f(A)`` by adaptive composite trapezoid quadrature.

    Node counts double (reusing the previous nodes) until two successive
    results differ by at most ``tol * (1 + ||result||)`` in max-entry norm.

    Raises
    ------
    ValueError
        If a contour disk leaves the domain of ``f``.
    QuadratureError
        If ``max_nodes`` per circle is reached without convergence.
    """
    n = A.n
    if not contours.circles:
        return zeros(n)
    for c in contours.circles:
        if not f.domain.contains_disk(c.center, c.radius):
            raise ValueError(f"contour circle about {c.center} (radius {c.radius:.3g}) "
                             f"leaves the domain of {f.name}")
    M = complex_adjoint(A)
    sums = [_circle_sum(M, f, c, c.nodes, 0.0) for c in contours.circles]
    Ns = [c.nodes for c in contours.circles]
    prev = sum(sums, np.zeros_like(M)) / TWO_PI
    delta = math.inf
    while max(Ns) < max_nodes:
        # doubling: old nodes plus midpoints
        for k, c in enumerate(contours.circles):
            mid = _circle_sum(M, f, c, Ns[k], 0.5)
            sums[k] = (sums[k] + mid) / 2
            Ns[k] *= 2
        cur = sum(sums, np.zeros_like(M)) / TWO_PI
        delta = float(np.max(np.abs(cur - prev)))
        if delta <= tol * (1.0 + float(np.max(np.abs(cur)))):
            return _pullback(cur)
        prev = cur
    raise QuadratureError(f"quadrature failed after {max(Ns)} nodes per circle "
                          f"(last delta {delta:.3e})", delta)


def full_contours(A: HMatrix, f: IntrinsicFn | None = None, spec: Spectrum | None = None,
                  **kw) -> SliceContour:
    """Circles around every spectral sphere, avoiding the singular points of ``f``."""
    spec = s_spectrum(A) if spec is None else spec
    avoid = tuple(f.domain.exclude) if f is not None else ()
    return build_contours(spec, spec.sphere_list(), avoid=avoid, **kw)


def riesz_projection(A: HMatrix, subset, spec: Spectrum | None = None, **kw) -> HMatrix:
    """Spectral projection onto the part of the S-spectrum in ``subset``.

    Integrates the S-resolvent (the function 1) over circles around
    ``subset`` only.
    """
    spec = s_spectrum(A) if spec is None else spec
    contours = build_contours(spec, list(subset), **kw)
    return func_calc(constant(1.0), A, contours)


# -- calculus rules as checks ---------------------------------------------------

@dataclass
class MappingReport:
    function: str
    computed: list[EigenSphere]
    image: list[EigenSphere]
    pairs: list[tuple[EigenSphere, EigenSphere]]
    max_deviation: float

    def passed(self, tol: float = 1e-7) -> bool:
        return self.max_deviation <= tol


def _dedup(spheres, tol):
    out: list[EigenSphere] = []
    for s in spheres:
        if not any(s.close_to(t, tol) for t in out):
            out.append(s)
    return out


def spectral_mapping_check(f: IntrinsicFn, A: HMatrix, contours: SliceContour | None = None
                           ) -> MappingReport:
    """Compare the S-spectrum of ``f(A)`` with the image spheres ``[f(z)]``."""
    spec = s_spectrum(A)
    if contours is None:
        contours = full_contours(A, f, spec)
    fA = func_calc(f, A, contours)
    spec_f = s_spectrum(fA)
    tol = spec_f.tol
    image = _dedup([sphere_from_complex(f(s.representative())) for s in spec.sphere_list()], tol)
    computed = spec_f.sphere_list()
    pairs, dev = match_spheres(computed, image)
    return MappingReport(f.name, computed, image, pairs, dev)


@dataclass
class CompositionReport:
    inner: str
    outer: str
    max_deviation: float
    nested: HMatrix = field(repr=False)
    direct: HMatrix = field(repr=False)

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_deviation <= tol


def image_spectrum(f: IntrinsicFn, spec: Spectrum, tol: float | None = None) -> Spectrum:
    """The spheres ``[f(z)]`` for ``z`` in ``spec``, multiplicities added on collisions.

    By the spectral mapping theorem this is the S-spectrum of ``f(A)``. It is
    the safer input for building contours around ``f(A)``: a defective
    eigenvalue that ``f`` moves away from 0 is no longer snapped, and its
    computed copies scatter by ``O(eps^(1/k))``.
    """
    tol = spec.tol if tol is None else tol
    out: list[list] = []
    for s, m in spec:
        img = sphere_from_complex(f(s.representative()))
        for entry in out:
            if entry[0].close_to(img, tol):
                entry[1] += m
                break
        else:
            out.append([img, m])
    return Spectrum([(s, m) for s, m in out], tol)


def composition_check(f: IntrinsicFn, g: IntrinsicFn, A: HMatrix) -> CompositionReport:
    """``g(f(A))`` against ``(g o f)(A)``; max entry deviation.

    The contours for ``g`` surround :func:`image_spectrum` of ``f``.
    """
    gf = g.compose(f)
    spec = s_spectrum(A)
    fA = func_calc(f, A, full_contours(A, f, spec))
    nested = func_calc(g, fA, full_contours(fA, g, image_spectrum(f, spec, sphere_tolerance(fA))))
    direct = func_calc(gf, A, full_contours(A, gf, spec))
    return CompositionReport(f.name, g.name, (nested - direct).max_abs(), nested, direct)


# -- scalar Cauchy kernels ------------------------------------------------------

def cauchy_kernel_left(s: Quaternion, q: Quaternion) -> Quaternion:
    """``S_L^-1(s, q) = -(q^2 - 2 Re(s) q + |s|^2)^-1 (q - conj(s))``, for ``q`` not in ``[s]``."""
    Q = mul(q, q) - q * (2.0 * s.a) + norm(s) ** 2
    return -mul(inv(Q), q - conj(s))


def cauchy_kernel_right(s: Quaternion, q: Quaternion) -> Quaternion:
    """``S_R^-1(s, q) = -(q - conj(s)) (q^2 - 2 Re(s) q + |s|^2)^-1``."""
    Q = mul(q, q) - q * (2.0 * s.a) + norm(s) ** 2
    return -mul(q - conj(s), inv(Q))


def cauchy_formula(f: IntrinsicFn, q: Quaternion, center: complex, radius: float,
                   nodes: int = 256, side: str = "left") -> Quaternion:
    """Evaluate ``f(q)`` from the slice Cauchy formula over a circle pair in the (1, i) plane.

    ``q`` may lie off the integration slice; the circle pair about ``center``
    and ``conj(center)`` must enclose ``[q]``.
    """
    circles = [complex(center)]
    if complex(center).imag != 0:
        circles.append(np.conj(complex(center)))
    total = Quaternion()
    for c in circles:
        theta = TWO_PI * np.arange(nodes) / nodes
        for t in theta:
            e = complex(math.cos(t), math.sin(t))
            s = c + radius * e
            w = Quaternion.from_complex(radius * e * TWO_PI / nodes * complex(f(s)))
            sq = Quaternion.from_complex(s)
            if side == "left":
                total = total + mul(cauchy_kernel_left(sq, q), w)
            else:
                total = total + mul(w, cauchy_kernel_right(sq, q))
    return Quaternion(total.a / TWO_PI, total.b / TWO_PI, total.c / TWO_PI, total.d / TWO_PI)
