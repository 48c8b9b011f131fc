"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 input error.  Output is a text
report or its JSON twin (``--format json``); both are deterministic for fixed
inputs and seed.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import gkz, microlocal
from .linalg import DimensionMismatch, Filtration, Matrix, q_str
from .monodromic import (
    ModuleError, MonodromicModule, check_fl_restriction, fl, fourier_inversion_check,
    restrict_shriek, restrict_star, tate_twist, validate,
)
from .rmf import RMFError, rmf
from .serialize import (
    complex_to_json, dumps, filtration_from_json, filtration_to_json, matrix_from_json,
    module_from_json, module_to_json,
)
from .weyl import WeylError

REPORT_SCHEMA_ID = "hodgefl/report"
RMF_SCHEMA_ID = "hodgefl/rmf-input"
INPUT_ERRORS = (ModuleError, microlocal.MicroError, gkz.GkzError, WeylError, DimensionMismatch,
                RMFError, ValueError, OSError)


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# Output


def _text_lines(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_scalar(v)}"
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                yield f"{pad}-"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}- {_scalar(v)}"
    else:
        yield f"{pad}{_scalar(obj)}"


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or _flat_list(x) for x in v)


def _scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc) + "\n"
    head = f"{doc['command']}: {'PASS' if doc['ok'] else 'FAIL'}"
    body = {k: v for k, v in doc.items() if k not in ("command", "ok", "schema", "version")}
    return "\n".join([head] + list(_text_lines(body))) + "\n"


def envelope(command: str, ok: bool, **payload) -> dict:
    return {"schema": REPORT_SCHEMA_ID, "version": 1, "command": command, "ok": ok, **payload}


def module_summary(M: MonodromicModule) -> dict:
    return {
        "r": M.r, "denom": M.denom, "window": [q_str(M.window[0]), q_str(M.window[1])],
        "eigenspaces": [{"chi": q_str(c), "dim": s.dim,
                         "F_jumps": _jumps(s.F), "W_jumps": _jumps(s.W)}
                        for c, s in sorted(M.spaces.items()) if s.dim],
    }


def _jumps(f: Filtration) -> list:
    return [f"{k}:{v}" for k, v in sorted(f.graded_dims().items()) if v]


# ---------------------------------------------------------------------------
# Input parsing


def parse_int_matrix(text: str) -> list[list[int]]:
    text = text.strip()
    try:
        if text.startswith("["):
            rows = json.loads(text)
        else:
            rows = [[x.strip() for x in row.split(",")] for row in text.split(";")]
        out = [[int(x) for x in row] for row in rows]
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse integer matrix {text!r}") from exc
    if not out or any(len(r) != len(out[0]) for r in out) or not out[0]:
        raise InputError("matrix rows must be nonempty and of equal length")
    return out


def parse_rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational vector {text!r}") from exc


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def load_module(path: str) -> MonodromicModule:
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return module_from_json(doc)


# ---------------------------------------------------------------------------
# Commands


def cmd_gkz(args) -> tuple[int, dict]:
    A = parse_int_matrix(args.matrix)
    beta = parse_rationals(args.beta) if args.beta is not None else [Fraction(0)] * len(A)
    sys_ = gkz.construct(A, beta, l1_bound=args.l1_bound)
    rep = gkz.report(sys_, seed=args.seed, points=args.points)
    ok = rep.pop("ok")
    rep.pop("check")
    if args.strict:
        ok = ok and all(sys_.flags.values())
    return (0 if ok else 1), envelope("gkz", ok, seed=args.seed, **rep)


def _rmf_input(doc):
    if not isinstance(doc, dict) or doc.get("schema") != RMF_SCHEMA_ID:
        raise InputError("not a relative monodromy input document")
    if doc.get("version") != 1:
        raise InputError(f"unsupported schema version {doc.get('version')!r}")
    try:
        N = matrix_from_json(doc["N"])
        L = filtration_from_json(doc["L"])
        center = int(doc.get("center", 0))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed relative monodromy input: {exc!r}") from exc
    return N, L, center


def cmd_mono(args) -> tuple[int, dict]:
    op = args.mono_command
    if op == "rmf":
        N, L, center = _rmf_input(read_json(args.file))
        res = rmf(N, L, center=center)
        payload = {"center": center}
        if res.exists:
            payload["filtration"] = filtration_to_json(res.filtration)
            payload["graded_dims"] = {str(k): v for k, v in res.filtration.graded_dims().items()}
        else:
            payload["certificate"] = res.certificate
        return (0 if res.exists else 1), envelope("mono rmf", res.exists, **payload)
    M = load_module(args.file)
    if op == "validate":
        rep = validate(M)
        return _report_exit("mono validate", rep)
    if op in ("fl", "twist"):
        if op == "fl":
            rep = validate(M)
            if not rep.ok:
                return 1, envelope("mono fl", False, validation=rep.to_json())
            out = fl(M)
        else:
            out = tate_twist(M, args.ell)
        payload = {"module": module_to_json(out)} if args.format == "json" else module_summary(out)
        return 0, envelope(f"mono {op}", True, **payload)
    if op == "inversion":
        return _report_exit("mono inversion", fourier_inversion_check(M))
    if op == "restrict":
        payload = {"shriek": complex_to_json(restrict_shriek(M)),
                   "star": complex_to_json(restrict_star(M))}
        return 0, envelope("mono restrict", True, **payload)
    if op == "flrestrict":
        return _report_exit("mono flrestrict", check_fl_restriction(M))
    raise InputError(f"unknown mono command {op!r}")


def _report_exit(command, rep):
    doc = rep.to_json()
    doc.pop("check")
    ok = doc.pop("ok")
    return (0 if ok else 1), envelope(command, ok, **doc)


def _micro_context(args) -> microlocal.MicroContext:
    fs = [f for f in args.f.split(",") if f.strip()] if args.f else None
    if fs is None:
        ctx = microlocal.default_context()
        if (args.n, args.r) not in ((None, None), (ctx.n, ctx.r)):
            raise InputError("--f is required when --n or --r differ from the default context")
        return ctx
    n = args.n if args.n is not None else 2
    r = args.r if args.r is not None else len(fs)
    return microlocal.MicroContext.from_text(n, r, fs)


def cmd_micro(args) -> tuple[int, dict]:
    ctx = _micro_context(args)
    op = args.micro_command
    if op == "phi":
        e = microlocal.parse_element(ctx, args.elem)
        if not isinstance(e, microlocal.MicroElement):
            raise InputError("phi takes a delta_g element")
        out = microlocal.phi(ctx, e)
        payload = {"context": microlocal.context_json(ctx), "input": microlocal.micro_text(e),
                   "image": microlocal.graph_text(out)}
        if out:
            payload["f_levels"] = [microlocal.f_level(ctx, e), microlocal.f_level(ctx, out)]
            payload["w_levels"] = [microlocal.w_level(ctx, e), microlocal.w_level(ctx, out)]
        return 0, envelope("micro phi", True, **payload)
    if op == "identities":
        rep = microlocal.verify_phi_identities(ctx, args.samples, args.seed)
    else:
        rep = microlocal.verify_filtration_shift(ctx, args.bound)
    rep.pop("check")
    ok = rep.pop("ok")
    return (0 if ok else 1), envelope(f"micro {op}", ok, **rep)


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--strict", action="store_true",
                        help="gkz: also fail when a hypothesis flag is false")

    p = argparse.ArgumentParser(prog="hodgefl", description="Exact verification workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gkz", parents=[common], help="build and check an A-hypergeometric system")
    g.add_argument("--matrix", required=True, help='rows separated by ";", e.g. "1,1,1;0,1,2"')
    g.add_argument("--beta", help="comma-separated rationals (default all zero)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--points", type=int, default=25, help="random torus points")
    g.add_argument("--l1-bound", type=int, default=None,
                   help="also emit boxes for all kernel vectors of this 1-norm or less")

    m = sub.add_parser("mono", help="monodromic module operations")
    msub = m.add_subparsers(dest="mono_command", required=True)
    for name, text in (("validate", "check every invariant"), ("fl", "Fourier-Laplace transform"),
                       ("twist", "Tate twist"), ("inversion", "check Fourier inversion"),
                       ("restrict", "restriction complexes (r = 1)"),
                       ("flrestrict", "check the restriction/transform exchange (r = 1)"),
                       ("rmf", "relative monodromy filtration of an input document")):
        sp = msub.add_parser(name, parents=[common], help=text)
        sp.add_argument("file")
        if name == "twist":
            sp.add_argument("--ell", type=int, required=True)

    mi = sub.add_parser("micro", help="graph and microlocal module checks")
    misub = mi.add_subparsers(dest="micro_command", required=True)
    ctx_args = argparse.ArgumentParser(add_help=False)
    ctx_args.add_argument("--n", type=int, default=None)
    ctx_args.add_argument("--r", type=int, default=None)
    ctx_args.add_argument("--f", default=None, help='comma-separated polynomials, e.g. "x1^2-x2^3,x1*x2"')
    ph = misub.add_parser("phi", parents=[common, ctx_args], help="apply the comparison map")
    ph.add_argument("--elem", required=True)
    ids = misub.add_parser("identities", parents=[common, ctx_args], help="seeded identity suite")
    ids.add_argument("--samples", type=int, default=200)
    ids.add_argument("--seed", type=int, default=0)
    sh = misub.add_parser("shifts", parents=[common, ctx_args], help="exhaustive filtration shifts")
    sh.add_argument("--bound", type=int, default=6)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    handler = {"gkz": cmd_gkz, "mono": cmd_mono, "micro": cmd_micro}[args.command]
    try:
        code, doc = handler(args)
    except (InputError, *INPUT_ERRORS) as exc:
        print(f"hodgefl: error: {exc}", file=sys.stderr)
        return 2
    text = render(doc, args.format)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"hodgefl: error: {args.output}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
