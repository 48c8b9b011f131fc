"""Normal-ordered arithmetic in Weyl algebras with named variable groups.

A generator is a position variable or its conjugate derivation, named by a
group (``x``, ``t``, ``z``, ``y``, ``l`` for lambda, ``m`` for mu, ``xi``)
and a positive index.  Elements are finite sums of normal-ordered monomials
(positions to the left of derivations) with rational coefficients.

Text grammar (see ``docs/grammar.md``)::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := atom ['^' INT]
    atom   := NUMBER | VAR | '(' expr ')'
    VAR    := ['d'] GROUP [INDEX] | 'd' INDEX

``d3`` is shorthand for the derivation of the default group (``l``).
``*`` is the noncommutative product, evaluated left to right.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

GROUPS = ("x", "t", "z", "y", "l", "m", "xi")
_GROUP_RANK = {g: i for i, g in enumerate(GROUPS)}
POSITION, DERIVATION = "position", "derivation"


class WeylError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Variable:
    group: str
    kind: str
    index: int

    def __post_init__(self):
        if self.group not in _GROUP_RANK:
            raise WeylError(f"unknown variable group {self.group!r}")
        if self.kind not in (POSITION, DERIVATION):
            raise WeylError(f"unknown variable kind {self.kind!r}")
        if self.index < 1:
            raise WeylError("variable indices start at 1")


# A monomial is a sorted tuple of (group, index, position_exp, derivation_exp),
# one entry per conjugate pair that occurs.
Monomial = tuple


def _key(entry):
    return (_GROUP_RANK[entry[0]], entry[1])


def _pair_product(a, b, c, d):
    """(x^a D^b)(x^c D^d) = sum_k C(b,k) c!/(c-k)! x^(a+c-k) D^(b+d-k)."""
    out = []
    for k in range(min(b, c) + 1):
        coeff = math.comb(b, k) * math.perm(c, k)
        out.append((a + c - k, b + d - k, coeff))
    return out


def _monomial_product(m1: Monomial, m2: Monomial) -> dict[Monomial, int]:
    d1 = {(g, i): (a, b) for g, i, a, b in m1}
    d2 = {(g, i): (a, b) for g, i, a, b in m2}
    keys = sorted(set(d1) | set(d2), key=lambda k: (_GROUP_RANK[k[0]], k[1]))
    choices = []
    for k in keys:
        a, b = d1.get(k, (0, 0))
        c, d = d2.get(k, (0, 0))
        choices.append([(k, p, q, coeff) for p, q, coeff in _pair_product(a, b, c, d)])
    out: dict[Monomial, int] = {}
    for combo in product(*choices):
        coeff = 1
        mono = []
        for (g, i), p, q, c in combo:
            coeff *= c
            if p or q:
                mono.append((g, i, p, q))
        mono_t = tuple(mono)
        out[mono_t] = out.get(mono_t, 0) + coeff
    return out


class WeylElement:
    """Immutable element of a Weyl algebra; ``terms`` maps monomials to coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                mono = tuple(sorted(mono, key=_key))
                clean[mono] = clean.get(mono, Fraction(0)) + c
        self.terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    # -- construction ------------------------------------------------------
    @classmethod
    def constant(cls, c) -> "WeylElement":
        return cls({(): Fraction(c)})

    @classmethod
    def gen(cls, group: str, index: int = 1, kind: str = POSITION) -> "WeylElement":
        Variable(group, kind, index)
        a, b = (1, 0) if kind == POSITION else (0, 1)
        return cls({((group, index, a, b),): Fraction(1)})

    @classmethod
    def pos(cls, group: str, index: int = 1) -> "WeylElement":
        return cls.gen(group, index, POSITION)

    @classmethod
    def der(cls, group: str, index: int = 1) -> "WeylElement":
        return cls.gen(group, index, DERIVATION)

    @classmethod
    def monomial(cls, entries: Iterable[tuple[str, int, int, int]], coeff=1) -> "WeylElement":
        return cls({tuple(e for e in entries if e[2] or e[3]): Fraction(coeff)})

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return WeylElement(terms)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return multiply(_coerce(other), self)

    def __pow__(self, k: int):
        if k < 0:
            raise WeylError("negative powers are not defined")
        out = WeylElement.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"WeylElement({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    # -- inspection --------------------------------------------------------
    def groups(self) -> set[str]:
        return {g for m in self.terms for g, *_ in m}

    def derivation_free(self) -> bool:
        return all(b == 0 for m in self.terms for _, _, _, b in m)

    def total_degree(self, mono: Monomial) -> int:
        return sum(a + b for _, _, a, b in mono)


def _coerce(x) -> WeylElement:
    if isinstance(x, WeylElement):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return WeylElement.constant(x)
    raise TypeError(f"cannot use {x!r} as a Weyl algebra element")


def multiply(a: WeylElement, b: WeylElement) -> WeylElement:
    out: dict[Monomial, Fraction] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for m, c in _monomial_product(m1, m2).items():
                out[m] = out.get(m, Fraction(0)) + c1 * c2 * c
    return WeylElement(out)


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return multiply(a, b) - multiply(b, a)


def substitute(e: WeylElement, images: Mapping[Variable, WeylElement]) -> WeylElement:
    """Apply the ring map sending each listed generator to its image.

    Generators not listed map to themselves. The caller is responsible for the
    images satisfying the Weyl relations; the normal-ordered monomial
    ``x^a D^b`` maps to ``img(x)^a img(D)^b``.
    """
    out = WeylElement()
    for mono, c in e.terms.items():
        term = WeylElement.constant(c)
        for g, i, a, b in mono:
            x = images.get(Variable(g, POSITION, i), WeylElement.pos(g, i))
            d = images.get(Variable(g, DERIVATION, i), WeylElement.der(g, i))
            term = term * (x ** a) * (d ** b)
        out = out + term
    return out


def fl_automorphism(e: WeylElement, src: str, dst: str, inverse: bool = False) -> WeylElement:
    """Fourier automorphism moving the ``src`` group onto the ``dst`` group.

    Forward: ``z_i -> d(y_i)``, ``d(z_i) -> -y_i``.  Inverse convention:
    ``z_i -> -d(y_i)``, ``d(z_i) -> y_i``.  Applying one convention and then the
    other in the opposite direction is the identity.  Spectator groups must be
    of type ``x``.
    """
    if src == dst:
        raise WeylError("source and destination groups must differ")
    other = e.groups() - {src, "x"}
    if other:
        raise WeylError(f"element uses groups {sorted(other)} besides {src!r} and x spectators")
    sign = -1 if inverse else 1
    indices = {i for m in e.terms for g, i, _, _ in m if g == src}
    images = {}
    for i in indices:
        images[Variable(src, POSITION, i)] = WeylElement.der(dst, i) * sign
        images[Variable(src, DERIVATION, i)] = WeylElement.pos(dst, i) * (-sign)
    return substitute(e, images)


def v_degree(e: WeylElement, group: str) -> tuple[int, int]:
    """(min, max) over monomials of position minus derivation degree in ``group``."""
    if not e:
        raise WeylError("undefined degree: zero element")
    degs = [sum(a - b for g, _, a, b in m if g == group) for m in e.terms]
    return min(degs), max(degs)


# ---------------------------------------------------------------------------
# Text form

_VAR_RE = re.compile(r"(d?)(xi|x|t|z|y|l|m)(\d*)|d(\d+)")
_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(d?(?:xi|x|t|z|y|l|m)\d*|d\d+)|(.))")


def _var_name(g: str, i: int, derivation: bool, short_group: str | None) -> str:
    if derivation and g == short_group:
        return f"d{i}"
    base = g if g == "xi" and i == 1 else f"{g}{i}"
    return ("d" + base) if derivation else base


def _mono_text(mono: Monomial, short_group: str | None) -> str:
    parts = []
    for g, i, a, _ in mono:
        if a:
            name = _var_name(g, i, False, short_group)
            parts.append(name if a == 1 else f"{name}^{a}")
    for g, i, _, b in mono:
        if b:
            name = _var_name(g, i, True, short_group)
            parts.append(name if b == 1 else f"{name}^{b}")
    return "*".join(parts)


def _print_order(e: WeylElement):
    variables = sorted({(g, i) for m in e.terms for g, i, _, _ in m},
                       key=lambda k: (_GROUP_RANK[k[0]], k[1]))

    def key(mono):
        d = {(g, i): (a, b) for g, i, a, b in mono}
        vec = tuple(x for v in variables for x in (sum(d.get(v, (0, 0))),))
        return (-e.total_degree(mono), tuple(-x for x in vec))

    return sorted(e.terms, key=key)


def to_text(e: WeylElement, short_group: str | None = None) -> str:
    if not e:
        return "0"
    out = []
    for n, mono in enumerate(_print_order(e)):
        c = e.terms[mono]
        body = _mono_text(mono, short_group)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if body:
            text = body if mag == 1 else f"{mag}*{body}"
        else:
            text = str(mag)
        if n == 0:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


def parse(text: str, default_group: str = "l") -> WeylElement:
    tokens = []
    for num, var, other in _TOKEN_RE.findall(text):
        if num:
            tokens.append(("num", num))
        elif var:
            tokens.append(("var", var))
        elif other.strip():
            tokens.append(("op", other))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok[0] is None or (expected is not None and tok[1] != expected):
            raise WeylError(f"parse error near token {pos} in {text!r}")
        pos += 1
        return tok

    def atom():
        kind, val = peek()
        if kind == "num":
            take()
            return WeylElement.constant(Fraction(val))
        if kind == "var":
            take()
            m = _VAR_RE.fullmatch(val)
            if m.group(4):
                return WeylElement.der(default_group, int(m.group(4)))
            idx = int(m.group(3)) if m.group(3) else 1
            if m.group(2) != "xi" and not m.group(3):
                raise WeylError(f"variable {val!r} needs an index")
            return (WeylElement.der if m.group(1) else WeylElement.pos)(m.group(2), idx)
        if val == "(":
            take("(")
            e = expr()
            take(")")
            return e
        raise WeylError(f"unexpected token {val!r} in {text!r}")

    def factor():
        base = atom()
        if peek()[1] == "^":
            take("^")
            kind, val = take()
            if kind != "num" or "/" in val:
                raise WeylError("exponents must be nonnegative integers")
            base = base ** int(val)
        return base

    def term():
        e = factor()
        while peek()[1] == "*":
            take("*")
            e = e * factor()
        return e

    def expr():
        neg = False
        if peek()[1] == "-":
            take("-")
            neg = True
        e = term()
        if neg:
            e = -e
        while peek()[1] in ("+", "-"):
            op = take()[1]
            t = term()
            e = e + t if op == "+" else e - t
        return e

    if not tokens:
        raise WeylError("empty expression")
    result = expr()
    if pos != len(tokens):
        raise WeylError(f"trailing input in {text!r}")
    return result
