"""Batch property harness over generated core-nilpotent matrices.

Each case draws ``A = S (D + N) S^-1`` (see
:func:`qspectral.generators.core_nilpotent_matrix`) from a seed and checks
the Drazin, generalized-inverse and functional-calculus properties on it.
The summary keeps, per property, the worst residual and whether it stayed
within tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .drazin import (decomposition_check, drazin_algebraic, drazin_via_funcalc,
                     drazin_via_projection, identity_suite, index_coherence, verify_drazin)
from .generators import core_nilpotent_matrix
from .geninv import generalized_inverse, group_inverse, reciprocal_spectrum_report
from .hmat import HMatrix, identity, matmul, operator_norm
from .scalc import constant, full_contours, func_calc, identity_fn, riesz_projection
from .sspec import s_spectrum

__all__ = ["DEFAULT_CONFIG", "DEFAULT_TOLERANCES", "SuiteReport", "run_suite"]

DEFAULT_TOLERANCES = {
    "drazin_agreement": 1e-7,
    "drazin_residuals": 1e-8,
    "index_coherence": 0.0,
    "decomposition": 1e-8,
    "reciprocal_spectrum": 1e-7,
    "group_coherence": 1e-9,
    "identity_suite": 1e-7,
    "calculus_axioms": 1e-9,
    "riesz_projection": 1e-9,
    "generalized_inverse": 1e-8,
}

DEFAULT_CONFIG = {"sizes": [2, 3, 4, 5, 6], "count": 100, "seed": 0}


@dataclass
class PropertyResult:
    name: str
    tol: float
    worst: float = 0.0
    cases: int = 0
    failures: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, value: float):
        self.cases += 1
        if math.isnan(value) or value > self.worst:
            self.worst = value
        if not value <= self.tol:
            self.failures += 1


@dataclass
class SuiteReport:
    config: dict
    properties: dict[str, PropertyResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties.values())

    def to_dict(self) -> dict:
        return {
            "format": "qsuite-1",
            "config": self.config,
            "tolerances": {k: p.tol for k, p in self.properties.items()},
            "properties": [
                {"name": p.name, "passed": p.passed, "worst": _finite(p.worst),
                 "cases": p.cases, "failures": p.failures}
                for p in self.properties.values()
            ],
            "passed": self.passed,
        }

    def table(self) -> str:
        lines = [f"{'property':<22} {'cases':>5} {'worst':>12} {'tol':>9}  result"]
        for p in self.properties.values():
            lines.append(f"{p.name:<22} {p.cases:>5} {p.worst:>12.3e} {p.tol:>9.1e}  "
                         f"{'PASS' if p.passed else 'FAIL'}")
        return "\n".join(lines)


def _finite(x: float):
    """JSON has no inf/nan; those are written as strings."""
    return x if math.isfinite(x) else str(x)


def _dev(X: HMatrix, Y: HMatrix) -> float:
    return (X - Y).norm() / max(1.0, operator_norm(X), operator_norm(Y))


def _check_case(A, gen, Ad, rep: SuiteReport):
    P = rep.properties
    a = drazin_algebraic(A)
    p = drazin_via_projection(A)
    f = drazin_via_funcalc(A)
    P["drazin_agreement"].record(max(_dev(a.inverse, p.inverse), _dev(a.inverse, f.inverse),
                                     _dev(p.inverse, f.inverse)))
    P["drazin_residuals"].record(max(verify_drazin(A, r.inverse, r.index).worst
                                     for r in (a, p, f)))
    coh = index_coherence(A, a.inverse)
    ok = len(set(coh.values())) == 1 and coh["index"] == gen.index
    P["index_coherence"].record(0.0 if ok else 1.0)
    dc = decomposition_check(A, a.index)
    P["decomposition"].record(dc.residual if dc.passed(A.n, math.inf) else math.inf)
    P["identity_suite"].record(identity_suite(A).worst)
    P["generalized_inverse"].record(generalized_inverse(A).max_residual())

    P["reciprocal_spectrum"].record(reciprocal_spectrum_report(A, a.inverse).max_deviation)
    # a group inverse needs index <= 1, so this one runs on the diagonalizable twin
    P["group_coherence"].record(_dev(group_inverse(Ad), drazin_algebraic(Ad).inverse))

    n = A.n
    cont = full_contours(A)
    P["calculus_axioms"].record(max(_dev(func_calc(constant(1.0), A, cont), identity(n)),
                                    _dev(func_calc(identity_fn(), A, cont), A)))
    spec = s_spectrum(A)
    R = riesz_projection(A, [spec.sphere_list()[0]], spec)
    Rc = riesz_projection(A, spec.sphere_list()[1:], spec) if len(spec) > 1 else identity(n) * 0.0
    P["riesz_projection"].record(max(_dev(matmul(R, R), R), _dev(matmul(R, A), matmul(A, R)),
                                     _dev(R + Rc, identity(n))))


def run_suite(config: dict | None = None) -> SuiteReport:
    """Run the property suite.

    Parameters
    ----------
    config : dict, optional
        Keys ``sizes`` (list of n), ``count`` (number of cases) or ``seeds``
        (explicit list), ``seed`` (first seed when ``count`` is used) and
        ``tol`` (overrides every tolerance). ``None`` means
        :data:`DEFAULT_CONFIG`; an empty dict runs nothing and passes.
    """
    if config is None:
        config = dict(DEFAULT_CONFIG)
    rep = SuiteReport(dict(config))
    if not config:
        return rep
    sizes = [int(s) for s in config.get("sizes", DEFAULT_CONFIG["sizes"])]
    if "seeds" in config:
        seeds = [int(s) for s in config["seeds"]]
    else:
        start = int(config.get("seed", 0))
        seeds = list(range(start, start + int(config.get("count", DEFAULT_CONFIG["count"]))))
    tol = config.get("tol")
    for name, default in DEFAULT_TOLERANCES.items():
        rep.properties[name] = PropertyResult(name, default if tol is None else float(tol))
    if not sizes:
        return rep
    for case, seed in enumerate(seeds):
        n = sizes[case % len(sizes)]
        gen = core_nilpotent_matrix(n, np.random.default_rng(seed))
        twin = core_nilpotent_matrix(n, np.random.default_rng(seed), diagonalizable=True)
        _check_case(gen.A, gen, twin.A, rep)
    return rep
