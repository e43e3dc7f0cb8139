"""Command line front end.

Every verb reads qmat-1 matrix files and writes one JSON document (or, for
``verify`` and ``suite``, a residual table followed by a JSON report) to
stdout or ``-o PATH``. Exit codes: 0 success, 1 mathematical failure
(singular, not separated, no group inverse, tolerance exceeded), 2 input,
output or format error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

import numpy as np

from .drazin import (ROUTES, decomposition_check, drazin, index_coherence, verify_drazin)
from .exceptions import FormatError, MathError
from .formats import (drazin_to_dict, dumps, matrix_to_dict, read_document, read_matrix,
                      spectrum_to_dict)
from .geninv import generalized_inverse, group_inverse
from .hmat import operator_norm
from .quat import EigenSphere, Quaternion
from .scalc import full_contours, func_calc, parse_function, riesz_projection
from .sspec import gelfand_sequence, s_resolvent_left, s_spectrum
from .suite import run_suite

__all__ = ["main", "build_parser", "default_tol"]

DEFAULT_TOL = 1e-8


def default_tol() -> float:
    """Residual tolerance: ``QSPECTRAL_TOL`` if set, else ``1e-8``."""
    raw = os.environ.get("QSPECTRAL_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        val = float(raw)
    except ValueError as exc:
        raise FormatError(f"QSPECTRAL_TOL: not a number: {raw!r}") from exc
    if not val > 0:
        raise FormatError(f"QSPECTRAL_TOL: must be positive, got {raw!r}")
    return val


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def _contour_args(p):
    p.add_argument("--radius", type=float, help="contour circle radius (must be < spectral gap)")
    p.add_argument("--nodes", type=int, help="initial trapezoid nodes per circle")
    p.add_argument("--margin", type=float, help="radius as a fraction of the spectral gap")


def _floats(text: str, count: int, what: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise FormatError(f"{what}: expected {count} comma-separated numbers, got {text!r}") from exc
    if len(vals) != count:
        raise FormatError(f"{what}: expected {count} comma-separated numbers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qspectral", description="S-spectrum, S-functional calculus and "
                     "Drazin inverses of quaternionic matrices.")
    # global options are accepted before or after the verb
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="residual tolerance (default: $QSPECTRAL_TOL or 1e-8)")
    common.add_argument("-o", "--output", default=argparse.SUPPRESS,
                        help="write the JSON result here instead of stdout")
    parser.add_argument("--tol", type=float, default=None, help=argparse.SUPPRESS)
    parser.add_argument("-o", "--output", default=None, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_verb(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_verb

    p = sub.add_parser("spectrum", help="S-spectrum as spheres with multiplicities")
    p.add_argument("matrix")

    p = sub.add_parser("resolvent", help="left S-resolvent operator at a quaternion")
    p.add_argument("matrix")
    p.add_argument("--at", required=True, metavar="A,B,C,D", help="the point s = a+bi+cj+dk")

    p = sub.add_parser("radius", help="spectral radius and Gelfand estimates")
    p.add_argument("matrix")
    p.add_argument("--n-max", type=int, default=256)

    p = sub.add_parser("funcalc", help="f(A) by contour quadrature")
    p.add_argument("matrix")
    p.add_argument("--f", required=True, dest="func",
                   help="poly:c0,c1,... | recip | exp | drazin-selector[:radius]")
    _contour_args(p)

    p = sub.add_parser("riesz", help="Riesz projection onto a set of spheres")
    p.add_argument("matrix")
    p.add_argument("--sphere", action="append", required=True, metavar="U,V",
                   help="sphere (u, v) to enclose; repeatable")
    _contour_args(p)

    p = sub.add_parser("ginverse", help="Moore-Penrose generalized inverse")
    p.add_argument("matrix")

    p = sub.add_parser("group", help="commuting (group) inverse")
    p.add_argument("matrix")

    p = sub.add_parser("drazin", help="Drazin inverse with index and projection")
    p.add_argument("matrix")
    p.add_argument("--route", choices=ROUTES, default="algebraic")
    _contour_args(p)

    p = sub.add_parser("verify", help="residual table for the Drazin routes")
    p.add_argument("matrix")
    p.add_argument("--routes", default="all",
                   help="'all' or a comma-separated subset of " + ",".join(ROUTES))
    _contour_args(p)

    p = sub.add_parser("suite", help="batch property suite over generated matrices")
    p.add_argument("config", nargs="?", help="JSON config {sizes, count|seeds, seed, tol}")
    return parser


def _contour_kw(args) -> dict:
    return {k: getattr(args, k) for k in ("radius", "nodes", "margin")
            if getattr(args, k, None) is not None}


# -- verbs -------------------------------------------------------------------------

def _spectrum(args, tol):
    A = read_matrix(args.matrix)
    spec = s_spectrum(A)
    return spectrum_to_dict(spec, {"sphere": spec.tol}), 0


def _resolvent(args, tol):
    A = read_matrix(args.matrix)
    s = Quaternion(*_floats(args.at, 4, "--at"))
    return matrix_to_dict(s_resolvent_left(s, A)), 0


def _radius(args, tol):
    A = read_matrix(args.matrix)
    if args.n_max < 1:
        raise FormatError("--n-max must be >= 1")
    spec = s_spectrum(A)
    seq = gelfand_sequence(A, args.n_max)
    return {
        "format": "qrad-1",
        "spectral_radius": spec.radius,
        "operator_norm": operator_norm(A),
        "gelfand": [{"k": k, "estimate": est} for k, est in seq],
        "tolerances": {"sphere": spec.tol},
    }, 0


def _funcalc(args, tol):
    A = read_matrix(args.matrix)
    try:
        f = parse_function(args.func, A)
    except ValueError as exc:
        raise FormatError(f"--f: {exc}") from exc
    contours = full_contours(A, f, **_contour_kw(args))
    return matrix_to_dict(func_calc(f, A, contours)), 0


def _riesz(args, tol):
    A = read_matrix(args.matrix)
    subset = []
    for text in args.sphere:
        u, v = _floats(text, 2, "--sphere")
        if v < 0:
            raise FormatError(f"--sphere: v must be >= 0, got {text!r}")
        subset.append(EigenSphere(u, v))
    return matrix_to_dict(riesz_projection(A, subset, **_contour_kw(args))), 0


def _ginverse(args, tol):
    A = read_matrix(args.matrix)
    return matrix_to_dict(generalized_inverse(A).B), 0


def _group(args, tol):
    A = read_matrix(args.matrix)
    return matrix_to_dict(group_inverse(A)), 0


def _drazin(args, tol):
    A = read_matrix(args.matrix)
    res = drazin(A, args.route, **_contour_kw(args))
    return drazin_to_dict(res, A, tol), 0


def _verify(args, tol):
    A = read_matrix(args.matrix)
    if args.routes == "all":
        routes = list(ROUTES)
    else:
        routes = [r.strip() for r in args.routes.split(",") if r.strip()]
        bad = [r for r in routes if r not in ROUTES]
        if bad or not routes:
            raise FormatError(f"--routes: unknown route(s) {bad}; expected "
                              f"'all' or a subset of {','.join(ROUTES)}")
    agree_tol = 10 * tol
    rows = []  # (check, value, tol)
    results = {}
    for r in routes:
        res = drazin(A, r, **_contour_kw(args))
        results[r] = res
        for key, val in verify_drazin(A, res.inverse, res.index, tol).residuals.items():
            rows.append((f"{r}: {key}", val, tol))
        if "spectrum_check" in res.info:
            rows.append((f"{r}: reciprocal spectrum", res.info["spectrum_check"].max_deviation,
                         agree_tol))
    names = list(results)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            X, Y = results[names[i]].inverse, results[names[j]].inverse
            dev = (X - Y).norm() / max(1.0, X.norm(), Y.norm())
            rows.append((f"agreement {names[i]}/{names[j]}", dev, agree_tol))
    coh = index_coherence(A, results[names[0]].inverse)
    rows.append(("index = ascent = descent = nilpotency", 0.0 if len(set(coh.values())) == 1
                 else 1.0, 0.0))
    dc = decomposition_check(A, coh["index"])
    rows.append(("R(A^k) + N(A^k) decomposition", dc.residual if dc.passed(A.n, float("inf"))
                 else float("inf"), tol))

    width = max(len(r[0]) for r in rows)
    lines = [f"{'check':<{width}}  {'residual':>12}  {'tol':>9}  result"]
    ok = True
    for name, val, t in rows:
        good = val <= t
        ok &= good
        lines.append(f"{name:<{width}}  {val:>12.3e}  {t:>9.1e}  {'PASS' if good else 'FAIL'}")
    print("\n".join(lines))
    doc = {
        "format": "qverify-1",
        "index": coh,
        "checks": [{"check": n, "residual": v if v != float("inf") else "inf", "tol": t,
                    "passed": v <= t} for n, v, t in rows],
        "passed": ok,
        "tolerances": {"residual": tol, "agreement": agree_tol},
    }
    return doc, 0 if ok else 1


def _suite(args, tol):
    if args.config is None:
        config = None
    else:
        config = read_document(args.config)
        allowed = {"sizes", "count", "seeds", "seed", "tol"}
        extra = set(config) - allowed
        if extra:
            raise FormatError(f"{args.config}: unexpected field(s) {sorted(extra)}")
    if config is not None and "tol" not in config and args.tol is not None:
        config = dict(config, tol=args.tol)
    rep = run_suite(config)
    if rep.properties:
        print(rep.table())
    return rep.to_dict(), 0 if rep.passed else 1


VERBS = {
    "spectrum": _spectrum,
    "resolvent": _resolvent,
    "radius": _radius,
    "funcalc": _funcalc,
    "riesz": _riesz,
    "ginverse": _ginverse,
    "group": _group,
    "drazin": _drazin,
    "verify": _verify,
    "suite": _suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = args.tol if args.tol is not None else default_tol()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            doc, code = VERBS[args.verb](args, tol)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        text = dumps(doc)
        if args.output:
            try:
                with open(args.output, "w") as fh:
                    fh.write(text)
            except OSError as exc:
                raise FormatError(f"{args.output}: cannot write file ({exc.strerror})") from exc
        else:
            sys.stdout.write(text)
        return code
    except MathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, np.linalg.LinAlgError) as exc:
        # remaining value errors come from the mathematics (e.g. a contour
        # that would cross a singularity of f)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
