"""Graph-embedding module of O_X along f = (f_1, ..., f_r), the partially
microlocalized module of g = sum y_i f_i, and the comparison map phi between them.

Elements are finite sums with polynomial coefficients in x_1..x_n:

* GraphElement: ``sum_alpha m_alpha dt^alpha delta_f``;
* MicroElement: ``sum_(alpha, j) m_(alpha, j) y^alpha dxi^j delta_g`` with j in Z.

Polynomials are dicts from exponent tuples to Fractions.  The base module is
O_X with Hodge filtration jumping at 0 and weight filtration jumping at n.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .weyl import WeylElement, WeylError, parse as parse_weyl, to_text as weyl_text

# ---------------------------------------------------------------------------
# Polynomials in x


Poly = dict  # exponent tuple -> Fraction


def p_clean(p: dict) -> dict:
    return {k: Fraction(v) for k, v in p.items() if v}


def p_add(*ps) -> dict:
    out: dict = {}
    for p in ps:
        for k, v in p.items():
            out[k] = out.get(k, Fraction(0)) + v
    return p_clean(out)


def p_scale(p, c) -> dict:
    return p_clean({k: v * c for k, v in p.items()})


def p_mul(p, q) -> dict:
    out: dict = {}
    for a, x in p.items():
        for b, y in q.items():
            k = tuple(i + j for i, j in zip(a, b))
            out[k] = out.get(k, Fraction(0)) + x * y
    return p_clean(out)


def p_diff(p, i) -> dict:
    """Partial derivative in x_(i+1) (0-based index i)."""
    out = {}
    for k, v in p.items():
        if k[i]:
            kk = list(k)
            kk[i] -= 1
            out[tuple(kk)] = v * k[i]
    return p_clean(out)


def p_const(n, c=1) -> dict:
    return p_clean({(0,) * n: Fraction(c)})


def p_var(n, i) -> dict:
    return {tuple(int(j == i) for j in range(n)): Fraction(1)}


def p_from_weyl(e: WeylElement, n: int) -> dict:
    out = {}
    for mono, c in e.terms.items():
        k = [0] * n
        for g, i, a, b in mono:
            if g != "x" or b or i > n:
                raise MicroError(f"not a polynomial in x1..x{n}: {weyl_text(e)}")
            k[i - 1] = a
        out[tuple(k)] = c
    return p_clean(out)


def p_to_weyl(p) -> WeylElement:
    return WeylElement({tuple(("x", i + 1, a, 0) for i, a in enumerate(k) if a): v
                        for k, v in p.items()})


def p_text(p) -> str:
    return weyl_text(p_to_weyl(p))


def parse_poly(text: str, n: int) -> dict:
    try:
        return p_from_weyl(parse_weyl(text), n)
    except WeylError as exc:
        raise MicroError(str(exc)) from exc


class MicroError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Context and elements


@dataclass(frozen=True)
class MicroContext:
    n: int
    r: int
    f: tuple  # of polynomials

    def __post_init__(self):
        if self.r < 1 or len(self.f) != self.r:
            raise MicroError("need r >= 1 functions")
        if self.n < 1:
            raise MicroError("need n >= 1")
        for p in self.f:
            if not p:
                raise MicroError("functions must be nonzero")
            if any(len(k) != self.n for k in p):
                raise MicroError("polynomial has the wrong number of variables")

    @classmethod
    def from_text(cls, n: int, r: int, fs: Iterable[str]) -> "MicroContext":
        polys = tuple(parse_poly(t, n) for t in fs)
        if len(polys) != r:
            raise MicroError(f"expected {r} functions, got {len(polys)}")
        return cls(n, r, polys)

    def unit(self) -> dict:
        return p_const(self.n)


def default_context() -> MicroContext:
    return MicroContext.from_text(2, 2, ["x1^2 - x2^3", "x1*x2"])


class _Element:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        out = {}
        for k, p in (coeffs or {}).items():
            p = p_clean(p)
            if p:
                out[k] = p
        self.coeffs = out

    def _combine(self, other, sign):
        out = {k: dict(p) for k, p in self.coeffs.items()}
        for k, p in other.coeffs.items():
            out[k] = p_add(out.get(k, {}), p_scale(p, sign))
        return type(self)(out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)({k: p_scale(p, -1) for k, p in self.coeffs.items()})

    def scale(self, c):
        return type(self)({k: p_scale(p, c) for k, p in self.coeffs.items()})

    def __eq__(self, other):
        return type(self) is type(other) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted((k, tuple(sorted(p.items()))) for k, p in self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)


class GraphElement(_Element):
    """Keys are alpha tuples."""

    def __repr__(self):
        return f"GraphElement({graph_text(self)!r})"


class MicroElement(_Element):
    """Keys are (alpha tuple, j)."""

    def __repr__(self):
        return f"MicroElement({micro_text(self)!r})"


def delta_f(ctx: MicroContext) -> GraphElement:
    return GraphElement({(0,) * ctx.r: ctx.unit()})


def delta_g(ctx: MicroContext) -> MicroElement:
    return MicroElement({((0,) * ctx.r, 0): ctx.unit()})


def _bump(alpha, i, d):
    a = list(alpha)
    a[i] += d
    return tuple(a)


# ---------------------------------------------------------------------------
# Actions


def _op_index(ctx, op, limit):
    kind, i = op
    if not 1 <= i <= limit:
        raise MicroError(f"index {i} out of range for {kind}")
    return i - 1


def graph_act(ctx: MicroContext, op, e: GraphElement) -> GraphElement:
    """op: ("h", poly) | ("x", i) | ("dx", i) | ("t", i) | ("dt", i)."""
    kind = op[0]
    if kind in ("h", "x"):
        h = op[1] if kind == "h" else p_var(ctx.n, _op_index(ctx, op, ctx.n))
        return GraphElement({a: p_mul(h, m) for a, m in e.coeffs.items()})
    out: dict = {}

    def put(a, p):
        out[a] = p_add(out.get(a, {}), p)

    if kind == "dx":
        i = _op_index(ctx, op, ctx.n)
        for a, m in e.coeffs.items():
            put(a, p_diff(m, i))
            for j in range(ctx.r):
                put(_bump(a, j, 1), p_scale(p_mul(p_diff(ctx.f[j], i), m), -1))
    elif kind == "t":
        i = _op_index(ctx, op, ctx.r)
        for a, m in e.coeffs.items():
            put(a, p_mul(ctx.f[i], m))
            if a[i]:
                put(_bump(a, i, -1), p_scale(m, -a[i]))
    elif kind == "dt":
        i = _op_index(ctx, op, ctx.r)
        for a, m in e.coeffs.items():
            put(_bump(a, i, 1), m)
    else:
        raise MicroError(f"unknown graph operator {kind!r}")
    return GraphElement(out)


def micro_act(ctx: MicroContext, op, e: MicroElement) -> MicroElement:
    """op: ("h", poly) | ("x", i) | ("dx", i) | ("y", i) | ("dy", i) | ("xi",) | ("dxi", k)."""
    kind = op[0]
    if kind in ("h", "x"):
        h = op[1] if kind == "h" else p_var(ctx.n, _op_index(ctx, op, ctx.n))
        return MicroElement({k: p_mul(h, m) for k, m in e.coeffs.items()})
    out: dict = {}

    def put(key, p):
        out[key] = p_add(out.get(key, {}), p)

    if kind == "dx":
        i = _op_index(ctx, op, ctx.n)
        for (a, j), m in e.coeffs.items():
            put((a, j), p_diff(m, i))
            for l in range(ctx.r):
                put((_bump(a, l, 1), j + 1), p_scale(p_mul(p_diff(ctx.f[l], i), m), -1))
    elif kind == "y":
        i = _op_index(ctx, op, ctx.r)
        for (a, j), m in e.coeffs.items():
            put((_bump(a, i, 1), j), m)
    elif kind == "dy":
        i = _op_index(ctx, op, ctx.r)
        for (a, j), m in e.coeffs.items():
            if a[i]:
                put((_bump(a, i, -1), j), p_scale(m, a[i]))
            put((a, j + 1), p_scale(p_mul(ctx.f[i], m), -1))
    elif kind == "xi":
        for (a, j), m in e.coeffs.items():
            for l in range(ctx.r):
                put((_bump(a, l, 1), j), p_mul(ctx.f[l], m))
            if j:
                put((a, j - 1), p_scale(m, -j))
    elif kind == "dxi":
        k = op[1] if len(op) > 1 else 1
        for (a, j), m in e.coeffs.items():
            put((a, j + k), m)
    else:
        raise MicroError(f"unknown microlocal operator {kind!r}")
    return MicroElement(out)


def theta_y(ctx, e: MicroElement) -> MicroElement:
    out = MicroElement()
    for i in range(1, ctx.r + 1):
        out = out + micro_act(ctx, ("y", i), micro_act(ctx, ("dy", i), e))
    return out


def s_micro(ctx, e: MicroElement) -> MicroElement:
    """s = -dxi xi."""
    return -micro_act(ctx, ("dxi", 1), micro_act(ctx, ("xi",), e))


def s_graph(ctx, e: GraphElement) -> GraphElement:
    """s = -sum dt_i t_i."""
    out = GraphElement()
    for i in range(1, ctx.r + 1):
        out = out - graph_act(ctx, ("dt", i), graph_act(ctx, ("t", i), e))
    return out


# ---------------------------------------------------------------------------
# The comparison map and eigenspaces


def phi(ctx: MicroContext, e: MicroElement) -> GraphElement:
    """m y^alpha dxi^j delta_g  ->  (-1)^(|alpha| + j) m dt^alpha delta_f."""
    out: dict = {}
    for (a, j), m in e.coeffs.items():
        sign = -1 if (sum(a) + j) % 2 else 1
        out[a] = p_add(out.get(a, {}), p_scale(m, sign))
    return GraphElement(out)


def eigen_decompose(ctx: MicroContext, e: MicroElement) -> dict[int, MicroElement]:
    """Components by ell = |alpha| - j, the eigenvalue of theta_y - s."""
    parts: dict[int, dict] = {}
    for (a, j), m in e.coeffs.items():
        parts.setdefault(sum(a) - j, {})[(a, j)] = m
    return {l: MicroElement(c) for l, c in sorted(parts.items())}


# ---------------------------------------------------------------------------
# Filtration levels


def f_level(ctx: MicroContext, e) -> int:
    if not e:
        raise MicroError("undefined level: zero element")
    if isinstance(e, GraphElement):
        return max(sum(a) + ctx.r for a in e.coeffs)
    return max(j + ctx.r + 1 for (_, j) in e.coeffs)


def w_level(ctx: MicroContext, e) -> int:
    if not e:
        raise MicroError("undefined level: zero element")
    if isinstance(e, GraphElement):
        return ctx.n
    return ctx.n - ctx.r


# ---------------------------------------------------------------------------
# Text form


def _coeff_text(p, body: str) -> str:
    if len(p) == 1:
        (k, v), = p.items()
        if not any(k):
            if v == 1:
                return body
            if v == -1:
                return "-" + body
            return f"{v}*{body}"
        mono = p_text({k: Fraction(1)})
        if v == 1:
            return f"{mono}*{body}"
        if v == -1:
            return f"-{mono}*{body}"
        return f"{v}*{mono}*{body}"
    return f"({p_text(p)})*{body}"


def _pow(name, k):
    return name if k == 1 else f"{name}^{k}"


def graph_text(e: GraphElement) -> str:
    if not e:
        return "0"
    parts = []
    for a in sorted(e.coeffs, key=lambda a: (sum(a), tuple(-x for x in a))):
        body = "*".join([_pow(f"dt{i + 1}", x) for i, x in enumerate(a) if x] + ["delta_f"])
        parts.append(_coeff_text(e.coeffs[a], body))
    return _join(parts)


def micro_text(e: MicroElement) -> str:
    if not e:
        return "0"
    parts = []
    for a, j in sorted(e.coeffs, key=lambda k: (sum(k[0]), tuple(-x for x in k[0]), k[1])):
        body = [_pow(f"y{i + 1}", x) for i, x in enumerate(a) if x]
        if j:
            body.append(_pow("dxi", j))
        parts.append(_coeff_text(e.coeffs[a, j], "*".join(body + ["delta_g"])))
    return _join(parts)


def _join(parts):
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


_ELEM_TOKEN = re.compile(r"\s*(delta_f|delta_g|dxi|dt\d+|y\d+|x\d+|\d+(?:/\d+)?|[-+*^()])")


def parse_element(ctx: MicroContext, text: str):
    """Parse a GraphElement or MicroElement; the delta symbol decides which."""
    tokens, pos = [], 0
    while pos < len(text):
        m = _ELEM_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise MicroError(f"cannot parse element near {text[pos:pos + 10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    kinds = {t for t in tokens if t.startswith("delta")}
    if len(kinds) != 1:
        raise MicroError("element must use exactly one of delta_f, delta_g")
    micro = kinds == {"delta_g"}
    terms = []
    sign, cur = 1, []
    depth = 0
    for t in tokens:
        if t == "(":
            depth += 1
        elif t == ")":
            depth -= 1
        if depth == 0 and t in "+-" and (cur and cur[-1] not in ("^", "*")):
            terms.append((sign, cur))
            sign, cur = (1 if t == "+" else -1), []
        elif depth == 0 and t == "-" and not cur:
            sign = -sign
        else:
            cur.append(t)
    terms.append((sign, cur))
    out = MicroElement() if micro else GraphElement()
    for sign, toks in terms:
        out = out + _parse_term(ctx, toks, micro).scale(sign)
    return out


def _parse_term(ctx, toks, micro):
    coeff = ctx.unit()
    alpha = [0] * ctx.r
    j = 0
    seen_delta = False
    factors, k = [], 0
    while k < len(toks):
        t = toks[k]
        if t == "(":
            depth, start = 1, k + 1
            while depth:
                k += 1
                if k >= len(toks):
                    raise MicroError("unbalanced parentheses")
                depth += {"(": 1, ")": -1}.get(toks[k], 0)
            factor = ("poly", " ".join(toks[start:k]))
        elif t == "*":
            k += 1
            continue
        else:
            factor = ("atom", t)
        k += 1
        exp = 1
        if k < len(toks) and toks[k] == "^":
            neg = k + 1 < len(toks) and toks[k + 1] == "-"
            idx = k + 2 if neg else k + 1
            if idx >= len(toks) or not toks[idx].isdigit():
                raise MicroError("exponent must be an integer")
            exp = -int(toks[idx]) if neg else int(toks[idx])
            k = idx + 1
        factors.append((factor, exp))
    for (kind, t), exp in factors:
        if seen_delta:
            raise MicroError("delta must be the last factor")
        if exp < 0 and t != "dxi":
            raise MicroError("only dxi may carry a negative exponent")
        if kind == "poly":
            base = parse_poly(t, ctx.n)
            for _ in range(exp):
                coeff = p_mul(coeff, base)
        elif t in ("delta_f", "delta_g"):
            seen_delta = True
        elif t == "dxi":
            if not micro:
                raise MicroError("dxi only acts on delta_g elements")
            j += exp
        elif t.startswith("dt"):
            if micro:
                raise MicroError("dt only acts on delta_f elements")
            i = int(t[2:])
            if not 1 <= i <= ctx.r:
                raise MicroError(f"dt{i} out of range")
            alpha[i - 1] += exp
        elif t.startswith("y"):
            if not micro:
                raise MicroError("y only appears in delta_g elements")
            i = int(t[1:])
            if not 1 <= i <= ctx.r:
                raise MicroError(f"y{i} out of range")
            alpha[i - 1] += exp
        elif t.startswith("x"):
            base = parse_poly(t, ctx.n)
            for _ in range(exp):
                coeff = p_mul(coeff, base)
        elif re.fullmatch(r"\d+(?:/\d+)?", t):
            coeff = p_scale(coeff, Fraction(t) ** exp)
        else:
            raise MicroError(f"unexpected token {t!r}")
    if not seen_delta:
        raise MicroError("term is missing its delta factor")
    if micro:
        return MicroElement({(tuple(alpha), j): coeff})
    return GraphElement({tuple(alpha): coeff})


# ---------------------------------------------------------------------------
# Random sampling and verification suites


def random_poly(rng: random.Random, n: int, terms: int = 3, max_exp: int = 3) -> dict:
    out = {}
    for _ in range(rng.randint(1, terms)):
        k = tuple(rng.randint(0, max_exp) for _ in range(n))
        c = rng.choice([c for c in range(-5, 6) if c])
        out[k] = out.get(k, Fraction(0)) + c
    return p_clean(out) or p_const(n)


def random_micro(rng: random.Random, ctx: MicroContext, terms: int = 3, max_exp: int = 3):
    out = MicroElement()
    for _ in range(rng.randint(1, terms)):
        a = tuple(rng.randint(0, max_exp) for _ in range(ctx.r))
        j = rng.randint(-max_exp, max_exp)
        out = out + MicroElement({(a, j): random_poly(rng, ctx.n, max_exp=max_exp)})
    return out


@dataclass
class IdentityCheck:
    name: str
    passed: int = 0
    failed: int = 0
    witness: str | None = None

    def record(self, ok: bool, witness=None):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.witness is None and witness is not None:
                self.witness = witness

    def to_json(self):
        out = {"identity": self.name, "ok": self.failed == 0,
               "passed": self.passed, "failed": self.failed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def verify_phi_identities(ctx: MicroContext, sample_count: int, seed: int,
                          max_exp: int = 3) -> dict:
    if sample_count < 1:
        raise MicroError("sample_count must be at least 1")
    rng = random.Random(seed)
    checks = {k: IdentityCheck(k) for k in (
        "D_X-linear", "phi dxi^k = (-1)^k phi", "phi y_i = -dt_i phi", "phi dy_i = t_i phi",
        "phi theta_y = s phi", "phi s = (s - ell) phi on E(ell)", "E(ell) eigencomponents",
        "phi bijective on E(ell) monomials")}
    for _ in range(sample_count):
        e = random_micro(rng, ctx, max_exp=max_exp)
        w = micro_text(e)
        pe = phi(ctx, e)
        h = random_poly(rng, ctx.n, max_exp=2)
        ok = phi(ctx, micro_act(ctx, ("h", h), e)) == graph_act(ctx, ("h", h), pe)
        for i in range(1, ctx.n + 1):
            ok &= phi(ctx, micro_act(ctx, ("dx", i), e)) == graph_act(ctx, ("dx", i), pe)
        checks["D_X-linear"].record(ok, w)
        ok = True
        for k in (-2, -1, 1, 2):
            ok &= phi(ctx, micro_act(ctx, ("dxi", k), e)) == pe.scale((-1) ** abs(k))
        checks["phi dxi^k = (-1)^k phi"].record(ok, w)
        ok = all(phi(ctx, micro_act(ctx, ("y", i), e)) == -graph_act(ctx, ("dt", i), pe)
                 for i in range(1, ctx.r + 1))
        checks["phi y_i = -dt_i phi"].record(ok, w)
        ok = all(phi(ctx, micro_act(ctx, ("dy", i), e)) == graph_act(ctx, ("t", i), pe)
                 for i in range(1, ctx.r + 1))
        checks["phi dy_i = t_i phi"].record(ok, w)
        checks["phi theta_y = s phi"].record(phi(ctx, theta_y(ctx, e)) == s_graph(ctx, pe), w)
        parts = eigen_decompose(ctx, e)
        total = MicroElement()
        ok6, ok_eig = True, True
        for l, part in parts.items():
            total = total + part
            lhs = phi(ctx, s_micro(ctx, part))
            pp = phi(ctx, part)
            ok6 &= lhs == s_graph(ctx, pp) - pp.scale(l)
            ok_eig &= not (theta_y(ctx, part) - s_micro(ctx, part) - part.scale(l))
        checks["phi s = (s - ell) phi on E(ell)"].record(ok6, w)
        checks["E(ell) eigencomponents"].record(ok_eig and total == e, w)
    bij = checks["phi bijective on E(ell) monomials"]
    bound = 2 * max_exp
    for l in range(-bound, bound + 1):
        ok, witness = eigenspace_bijection(ctx, l, bound)
        bij.record(ok, witness)
    items = [c.to_json() for c in checks.values()]
    return {"check": "phi_identities", "ok": all(c["ok"] for c in items), "seed": seed,
            "samples": sample_count, "context": context_json(ctx), "identities": items}


def _alphas(r, total):
    if r == 1:
        yield (total,)
        return
    for a in range(total + 1):
        for rest in _alphas(r - 1, total - a):
            yield (a,) + rest


def eigenspace_bijection(ctx, ell: int, bound: int):
    """phi restricted to E(ell) monomials with |alpha| + |j| <= bound is a bijection
    onto the dt^alpha delta_f with |alpha| + ||alpha| - ell| <= bound."""
    images = {}
    for total in range(0, bound + 1):
        j = total - ell
        if total + abs(j) > bound:
            continue
        for a in _alphas(ctx.r, total):
            img = phi(ctx, MicroElement({(a, j): ctx.unit()}))
            (key, coeff), = img.coeffs.items()
            if key in images or coeff not in ({(0,) * ctx.n: 1}, {(0,) * ctx.n: -1}):
                return False, f"alpha={a}, j={j}"
            images[key] = (a, j)
    expected = {a for total in range(bound + 1) for a in _alphas(ctx.r, total)
                if total + abs(total - ell) <= bound}
    if set(images) != expected:
        return False, f"ell={ell}: image mismatch"
    return True, None


def verify_filtration_shift(ctx: MicroContext, degree_bound: int) -> dict:
    if degree_bound < 1:
        raise MicroError("degree_bound must be at least 1")
    checked, failures = 0, []
    for total in range(degree_bound + 1):
        for j in range(-degree_bound, degree_bound + 1):
            if total + abs(j) > degree_bound:
                continue
            for a in _alphas(ctx.r, total):
                e = MicroElement({(a, j): ctx.unit()})
                l = total - j
                pe = phi(ctx, e)
                checked += 1
                df = f_level(ctx, pe) - f_level(ctx, e)
                dw = w_level(ctx, pe) - w_level(ctx, e)
                if df != l - 1 or dw != ctx.r:
                    failures.append({"element": micro_text(e), "ell": l,
                                     "f_shift": df, "w_shift": dw})
    return {"check": "filtration_shift", "ok": not failures, "bound": degree_bound,
            "monomials": checked, "context": context_json(ctx), "failures": failures[:10]}


def context_json(ctx: MicroContext) -> dict:
    return {"n": ctx.n, "r": ctx.r, "f": [p_text(p) for p in ctx.f]}
