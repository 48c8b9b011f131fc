"""JSON encodings.  Rationals are strings ``"p/q"`` (or ``"p"`` when integral)."""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .linalg import Filtration, Matrix, Subspace
from .monodromic import FilteredSpace, FilteredTwoTermComplex, ModuleError, MonodromicModule

MODULE_SCHEMA_ID = "hodgefl/monodromic-module"
SCHEMA_VERSION = 1


def q(x) -> str:
    return str(Fraction(x))


def unq(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ModuleError(f"expected a rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ModuleError(f"bad rational {s!r}") from exc


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [[q(x) for x in r] for r in m.data]}


def matrix_from_json(d) -> Matrix:
    rows, cols = d["rows"], d["cols"]
    entries = [[unq(x) for x in r] for r in d["entries"]]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ModuleError("matrix entries do not match the declared shape")
    return Matrix.of(entries, cols=cols) if rows else Matrix.zeros(0, cols)


def filtration_to_json(f: Filtration) -> dict:
    return {"ambient": f.ambient,
            "jumps": [{"index": i, "basis_rows": [[q(x) for x in v] for v in s.basis]}
                      for i, s in f.jumps]}


def filtration_from_json(d) -> Filtration:
    n = d["ambient"]
    levels = {}
    for j in d["jumps"]:
        rows = [[unq(x) for x in v] for v in j["basis_rows"]]
        if any(len(v) != n for v in rows):
            raise ModuleError("filtration basis row has the wrong length")
        levels[int(j["index"])] = Subspace.span(rows, n)
    try:
        return Filtration.from_levels(n, levels) if n else Filtration(0, ())
    except ValueError as exc:
        raise ModuleError(f"bad filtration: {exc}") from exc


def space_to_json(s: FilteredSpace) -> dict:
    return {"dim": s.dim, "F": filtration_to_json(s.F), "W": filtration_to_json(s.W)}


def space_from_json(d) -> FilteredSpace:
    return FilteredSpace(d["dim"], filtration_from_json(d["F"]), filtration_from_json(d["W"]))


def module_to_json(M: MonodromicModule) -> dict:
    return {
        "schema": MODULE_SCHEMA_ID,
        "version": SCHEMA_VERSION,
        "r": M.r,
        "denom": M.denom,
        "window": [q(M.window[0]), q(M.window[1])],
        "low_flag": M.low_flag,
        "high_flag": M.high_flag,
        "spaces": [dict(chi=q(c), **space_to_json(s)) for c, s in sorted(M.spaces.items())],
        "zmaps": [{"i": i, "chi": q(c), "matrix": matrix_to_json(m)}
                  for (i, c), m in sorted(M.zmaps.items())],
        "dmaps": [{"i": i, "chi": q(c), "matrix": matrix_to_json(m)}
                  for (i, c), m in sorted(M.dmaps.items())],
    }


def module_from_json(d) -> MonodromicModule:
    try:
        if d.get("schema") != MODULE_SCHEMA_ID:
            raise ModuleError("not a monodromic module document")
        if d.get("version") != SCHEMA_VERSION:
            raise ModuleError(f"unsupported schema version {d.get('version')!r}")
        spaces = {unq(s["chi"]): space_from_json(s) for s in d["spaces"]}
        zmaps = {(m["i"], unq(m["chi"])): matrix_from_json(m["matrix"]) for m in d.get("zmaps", [])}
        dmaps = {(m["i"], unq(m["chi"])): matrix_from_json(m["matrix"]) for m in d.get("dmaps", [])}
        return MonodromicModule(d["r"], d["denom"], (unq(d["window"][0]), unq(d["window"][1])),
                                spaces, zmaps, dmaps, d.get("low_flag", False),
                                d.get("high_flag", False))
    except (KeyError, TypeError, IndexError, AttributeError) as exc:
        raise ModuleError(f"malformed module document: {exc!r}") from exc


def complex_to_json(c: FilteredTwoTermComplex) -> dict:
    return {"degree0_offset": c.degree0_offset, "twist": c.twist,
            "source": space_to_json(c.source), "target": space_to_json(c.target),
            "d": matrix_to_json(c.d),
            "cohomology": {str(k): v for k, v in c.cohomology_dims().items()}}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_schema(name: str) -> dict:
    return json.loads(resources.files("hodgefl").joinpath("schemas", name).read_text())
