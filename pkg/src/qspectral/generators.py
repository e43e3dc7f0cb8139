"""Random quaternion matrices with known spectral structure.

The workhorse is :func:`core_nilpotent_matrix`, which builds
``A = S (D + N) S^-1`` from an invertible diagonal ``D``, a nilpotent
Jordan-type ``N`` and a well-conditioned ``S``. Index, spectrum and
Drazin inverse of ``A`` are then known in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hmat import HMatrix, block_diag, complex_adjoint, diag, inverse, matmul
from .quat import EigenSphere, Quaternion, inv, sphere_of


def as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_quaternion(rng, scale: float = 1.0) -> Quaternion:
    rng = as_rng(rng)
    return Quaternion.from_array(scale * rng.standard_normal(4))


def random_hmatrix(n: int, rng, m: int | None = None, scale: float = 1.0) -> HMatrix:
    """``n x m`` matrix (square if ``m`` is omitted) with N(0, scale^2/4) components."""
    rng = as_rng(rng)
    m = n if m is None else m
    return HMatrix.from_components(scale * rng.standard_normal((n, m, 4)) / 2)


def condition_number(A: HMatrix) -> float:
    s = np.linalg.svd(complex_adjoint(A), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def well_conditioned(n: int, rng, max_cond: float = 50.0) -> HMatrix:
    """Random invertible matrix with condition number at most ``max_cond``."""
    rng = as_rng(rng)
    while True:
        S = random_hmatrix(n, rng)
        if condition_number(S) <= max_cond:
            return S
        # pull towards the identity until acceptable
        for t in (0.5, 1.0, 2.0, 4.0):
            S2 = S + HMatrix(t * np.eye(n, dtype=complex))
            if condition_number(S2) <= max_cond:
                return S2


def random_unitary(n: int, rng) -> HMatrix:
    """Quaternionic unitary (``U^* U = I``) from a Gram-Schmidt of a random matrix."""
    from .hmat import span_basis
    return span_basis(random_hmatrix(n, rng), n)


def slice_gap(spheres) -> float:
    """Smallest distance between slice representatives ``z``, ``conj(z)`` of the spheres."""
    pts = []
    for s in spheres:
        pts.append(complex(s.u, s.v))
        if s.v > 0:
            pts.append(complex(s.u, -s.v))
    if len(pts) < 2:
        return np.inf
    pts = np.array(pts)
    d = np.abs(pts[:, None] - pts[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def random_separated_spheres(m: int, rng, gap: float = 0.3, rmin: float = 0.5,
                             rmax: float = 2.5, real_fraction: float = 0.25,
                             max_tries: int = 10000) -> list[Quaternion]:
    """Quaternions whose spheres (with 0) are pairwise ``gap``-separated in the slice plane."""
    rng = as_rng(rng)
    for _ in range(max_tries):
        qs = []
        for _ in range(m):
            r = rng.uniform(rmin, rmax)
            if rng.random() < real_fraction:
                qs.append(Quaternion(r * rng.choice([-1.0, 1.0])))
            else:
                w = rng.standard_normal(4)
                qs.append(Quaternion.from_array(r * w / np.linalg.norm(w)))
        if slice_gap([sphere_of(q) for q in qs] + [EigenSphere(0.0, 0.0)]) >= gap:
            return qs
    raise RuntimeError("could not draw separated spheres")


def jordan_nilpotent(sizes, rng=None) -> HMatrix:
    """Block-diagonal nilpotent matrix; superdiagonal entries random nonzero quaternions."""
    rng = as_rng(rng)
    blocks = []
    for s in sizes:
        comps = np.zeros((s, s, 4))
        for i in range(s - 1):
            w = rng.standard_normal(4)
            comps[i, i + 1] = rng.uniform(0.5, 1.5) * w / np.linalg.norm(w)
        blocks.append(HMatrix.from_components(comps))
    return block_diag(*blocks) if blocks else HMatrix(np.zeros((0, 0)))


@dataclass
class Generated:
    """A generated matrix together with its ground truth."""

    A: HMatrix
    S: HMatrix
    core: list[Quaternion]
    jordan_sizes: list[int]
    index: int
    drazin: HMatrix = field(repr=False)

    @property
    def nonzero_spheres(self) -> list[EigenSphere]:
        return [sphere_of(q) for q in self.core]


def core_nilpotent_matrix(n: int, rng, *, core_dim: int | None = None,
                          jordan_sizes=None, gap: float = 0.3,
                          max_cond: float = 50.0, diagonalizable: bool = False) -> Generated:
    """``S (D + N) S^-1`` with known index, spectrum and Drazin inverse.

    Parameters
    ----------
    n : int
        Dimension.
    core_dim : int, optional
        Size of the invertible diagonal part; random if omitted.
    jordan_sizes : list of int, optional
        Jordan block sizes of the nilpotent part (must sum to ``n - core_dim``).
    gap : float
        Minimal slice-plane separation between the spectral points, 0 included.
    diagonalizable : bool
        Use a zero nilpotent part (all Jordan blocks of size 1).
    """
    rng = as_rng(rng)
    if core_dim is None:
        core_dim = int(rng.integers(0, n + 1))
    nil = n - core_dim
    if jordan_sizes is None:
        jordan_sizes = []
        left = nil
        while left:
            s = 1 if diagonalizable else int(rng.integers(1, left + 1))
            jordan_sizes.append(s)
            left -= s
    if sum(jordan_sizes) != nil:
        raise ValueError("jordan_sizes must sum to n - core_dim")
    core = random_separated_spheres(core_dim, rng, gap=gap) if core_dim else []
    D = diag(core) if core_dim else None
    N = jordan_nilpotent(jordan_sizes, rng) if nil else None
    blocks = [b for b in (D, N) if b is not None]
    M = block_diag(*blocks)
    S = well_conditioned(n, rng, max_cond)
    Sinv = inverse(S)
    A = matmul(matmul(S, M), Sinv)
    Dd = [inv(q) for q in core] + [0.0] * nil
    AD = matmul(matmul(S, diag(Dd)), Sinv)
    index = max(jordan_sizes) if jordan_sizes else 0
    return Generated(A, S, core, list(jordan_sizes), index, AD)
