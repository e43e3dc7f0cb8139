"""JSON documents: matrices (qmat-1), spectra (qspec-1), Drazin results (qdrz-1).

Floats are written with ``repr`` precision by :mod:`json`, so every emitted
document re-parses to bit-identical values. Readers reject anything but the
documented shapes with a :class:`FormatError` naming the offending field, or
the line and column for JSON syntax errors.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .exceptions import FormatError
from .hmat import HMatrix
from .quat import EigenSphere

__all__ = [
    "matrix_to_dict",
    "parse_matrix",
    "spectrum_to_dict",
    "parse_spectrum",
    "drazin_to_dict",
    "parse_drazin",
    "dumps",
    "loads",
    "read_document",
    "read_matrix",
    "write_document",
]


# -- generic --------------------------------------------------------------------

_LEAF = re.compile(r"\[\s*([-+0-9.eE,\s]*?)\s*\]")


def dumps(doc: dict) -> str:
    """Deterministic serialization (fixed key order, no NaN/inf).

    Arrays of scalars, such as quaternion entries, are kept on one line.
    """
    try:
        text = json.dumps(doc, indent=2, allow_nan=False)
    except ValueError as exc:
        raise FormatError(f"cannot serialize non-finite value: {exc}") from exc
    return _LEAF.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]"
                     if m.group(1).strip() else "[]", text) + "\n"


def loads(text: str, source: str = "<string>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{source}: top level must be a JSON object")
    return doc


def read_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read file ({exc.strerror or exc})") from exc
    return loads(text, str(path))


def write_document(doc: dict, path=None) -> str:
    """Serialize ``doc``; write to ``path`` if given. Returns the text."""
    text = dumps(doc)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise FormatError(f"{path}: cannot write file ({exc.strerror or exc})") from exc
    return text


def _expect_keys(doc: dict, required: set, optional: set, where: str):
    missing = required - doc.keys()
    if missing:
        raise FormatError(f"{where}: missing field(s) {sorted(missing)}")
    extra = doc.keys() - required - optional
    if extra:
        raise FormatError(f"{where}: unexpected field(s) {sorted(extra)}")


def _expect_format(doc, name: str, where: str):
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected a {name} object")
    fmt = doc.get("format")
    if fmt != name:
        raise FormatError(f"{where}.format: expected {name!r}, got {fmt!r}")


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{where}: expected a number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x):
        raise FormatError(f"{where}: non-finite number")
    return x


def _integer(x, where: str, minimum: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise FormatError(f"{where}: expected an integer >= {minimum}, got {x!r}")
    return x


# -- qmat-1 -----------------------------------------------------------------------

def matrix_to_dict(A: HMatrix) -> dict:
    n = A.n
    comps = A.components
    return {
        "format": "qmat-1",
        "n": n,
        "entries": [[[float(v) for v in comps[i, j]] for j in range(n)] for i in range(n)],
    }


def parse_matrix(doc, where: str = "matrix") -> HMatrix:
    """Parse a qmat-1 object ``{"format", "n", "entries"}`` (row-major)."""
    _expect_format(doc, "qmat-1", where)
    _expect_keys(doc, {"format", "n", "entries"}, set(), where)
    n = _integer(doc["n"], f"{where}.n", 1)
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != n:
        raise FormatError(f"{where}.entries: expected {n} rows")
    out = np.zeros((n, n, 4))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError(f"{where}.entries[{i}]: expected {n} entries")
        for j, e in enumerate(row):
            if not isinstance(e, list) or len(e) != 4:
                raise FormatError(f"{where}.entries[{i}][{j}]: expected [a, b, c, d]")
            for c, v in enumerate(e):
                out[i, j, c] = _number(v, f"{where}.entries[{i}][{j}][{c}]")
    return HMatrix.from_components(out)


def read_matrix(path) -> HMatrix:
    return parse_matrix(read_document(path), str(path))


# -- qspec-1 ----------------------------------------------------------------------

def spectrum_to_dict(spec, tolerances: dict | None = None) -> dict:
    doc = spec.to_dict()
    if tolerances is not None:
        doc["tolerances"] = dict(tolerances)
    return doc


def parse_spectrum(doc, where: str = "spectrum"):
    from .sspec import Spectrum

    _expect_format(doc, "qspec-1", where)
    _expect_keys(doc, {"format", "spheres"}, {"tolerances"}, where)
    items = doc["spheres"]
    if not isinstance(items, list):
        raise FormatError(f"{where}.spheres: expected a list")
    spheres = []
    for k, it in enumerate(items):
        w = f"{where}.spheres[{k}]"
        if not isinstance(it, dict):
            raise FormatError(f"{w}: expected an object")
        _expect_keys(it, {"u", "v", "mult"}, set(), w)
        v = _number(it["v"], f"{w}.v")
        if v < 0:
            raise FormatError(f"{w}.v: sphere radius must be >= 0")
        spheres.append((EigenSphere(_number(it["u"], f"{w}.u"), v),
                        _integer(it["mult"], f"{w}.mult", 1)))
    tol = 0.0
    if "tolerances" in doc and isinstance(doc["tolerances"], dict):
        tol = float(doc["tolerances"].get("sphere", 0.0))
    return Spectrum(spheres, tol)


# -- qdrz-1 -----------------------------------------------------------------------

def drazin_to_dict(res, A: HMatrix | None = None, tol: float | None = None) -> dict:
    """``{"format": "qdrz-1", "index", "inverse", "projection", "residuals"}``.

    Residuals are computed against ``A`` when it is given. ``tol`` (if any)
    is embedded as ``tolerances.residual``.
    """
    from .drazin import verify_drazin

    doc = {
        "format": "qdrz-1",
        "index": int(res.index),
        "inverse": matrix_to_dict(res.inverse),
        "projection": matrix_to_dict(res.projection),
        "residuals": {} if A is None else
        {k: float(v) for k, v in verify_drazin(A, res.inverse, res.index).residuals.items()},
    }
    doc["route"] = res.route
    if tol is not None:
        doc["tolerances"] = {"residual": float(tol)}
    return doc


def parse_drazin(doc, where: str = "drazin"):
    from .drazin import DrazinResult

    _expect_format(doc, "qdrz-1", where)
    _expect_keys(doc, {"format", "index", "inverse", "projection", "residuals"},
                 {"route", "tolerances"}, where)
    k = _integer(doc["index"], f"{where}.index", 0)
    B = parse_matrix(doc["inverse"], f"{where}.inverse")
    P = parse_matrix(doc["projection"], f"{where}.projection")
    if B.shape != P.shape:
        raise FormatError(f"{where}: inverse and projection sizes differ")
    res = doc["residuals"]
    if not isinstance(res, dict):
        raise FormatError(f"{where}.residuals: expected an object")
    info = {"residuals": {key: _number(v, f"{where}.residuals.{key}") for key, v in res.items()}}
    route = doc.get("route", "algebraic")
    if not isinstance(route, str):
        raise FormatError(f"{where}.route: expected a string")
    return DrazinResult(B, k, P, route, info)
