"""A-hypergeometric systems: box and Euler operators from an integer matrix.

For an integer d x n matrix A and a parameter beta, the system is presented by

* a box operator ``prod_(l_i<0) d_i^(-l_i) - prod_(l_i>0) d_i^(l_i)`` per lattice vector l
  in ker_Z A, and
* Euler operators ``E_k - beta_k`` with ``E_k = sum_i a_ki l_i d_i``.

Operators live in the ``l`` group of the Weyl engine; Fourier images go to ``m``.
Each kernel basis vector is oriented so that its first nonzero entry is negative;
this makes the box of (1, -2, 1) read ``d1*d3 - d2^2``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import (
    DimensionMismatch, Matrix, Q, int_row_span_contains, invariant_factors, kernel_lattice, rank,
)
from .weyl import WeylElement, commutator, fl_automorphism, to_text

GROUP = "l"
DUAL = "m"


class GkzError(ValueError):
    pass


def _orient(v):
    first = next((x for x in v if x), 0)
    return tuple(-x for x in v) if first > 0 else tuple(v)


def box(l: Sequence[int]) -> WeylElement:
    neg = [("l", i + 1, 0, -x) for i, x in enumerate(l) if x < 0]
    pos = [("l", i + 1, 0, x) for i, x in enumerate(l) if x > 0]
    return WeylElement.monomial(neg) - WeylElement.monomial(pos)


def euler(A: Matrix, k: int) -> WeylElement:
    out = WeylElement()
    for i in range(A.cols):
        a = A[k, i]
        if a:
            out = out + WeylElement.monomial([("l", i + 1, 1, 1)], a)
    return out


@dataclass
class GkzSystem:
    A: Matrix
    beta: tuple
    lattice_basis: list
    boxes: list
    eulers: list  # E_k - beta_k
    flags: dict = field(default_factory=dict)
    extra_lattice: list = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols


def _as_int_matrix(A) -> Matrix:
    A = A if isinstance(A, Matrix) else Matrix.of(A)
    if not A.is_integral():
        raise GkzError("A must have integer entries")
    return A


def construct(A, beta, l1_bound: int | None = None) -> GkzSystem:
    """Build the system; with ``l1_bound`` also emit boxes for every kernel vector
    of 1-norm at most the bound (one per pair +-l)."""
    A = _as_int_matrix(A)
    if A.rows == 0 or A.cols == 0 or A.is_zero():
        raise GkzError("A must be a nonzero matrix")
    beta = tuple(Q(b) for b in beta)
    if len(beta) != A.rows:
        raise DimensionMismatch("construct", A.rows, len(beta))
    basis = [_orient(v) for v in kernel_lattice(A)]
    extra = []
    if l1_bound is not None:
        seen = set(basis)
        for v in bounded_kernel_vectors(A, l1_bound):
            if v not in seen:
                seen.add(v)
                extra.append(v)
    eulers = [euler(A, k) - WeylElement.constant(beta[k]) for k in range(A.rows)]
    sys = GkzSystem(A, beta, basis, [box(v) for v in basis + extra], eulers, extra_lattice=extra)
    sys.flags = {"homogeneous": is_homogeneous(A), "pointed": is_pointed(A),
                 "columns_span": columns_span(A)}
    return sys


def bounded_kernel_vectors(A: Matrix, bound: int) -> list:
    """Nonzero oriented l in ker A with |l|_1 <= bound, in lexicographic order."""
    out = set()
    rows = A.to_int_lists()
    for v in itertools.product(range(-bound, bound + 1), repeat=A.cols):
        if any(v) and sum(map(abs, v)) <= bound and v == _orient(v):
            if all(sum(a * x for a, x in zip(r, v)) == 0 for r in rows):
                out.add(v)
    return sorted(out)


# ---------------------------------------------------------------------------
# Hypothesis checks


def is_homogeneous(A) -> bool:
    A = _as_int_matrix(A)
    return int_row_span_contains(A.to_int_lists(), [1] * A.cols)


def rationally_homogeneous(A) -> bool:
    A = _as_int_matrix(A)
    return rank(Matrix.of(A.to_int_lists() + [[1] * A.cols])) == rank(A)


def columns_span(A) -> bool:
    A = _as_int_matrix(A)
    return rank(A) == A.rows and all(f == 1 for f in invariant_factors(A))


def _fourier_motzkin_feasible(ineqs: list, nvars: int) -> bool:
    """Feasibility of {c : a.c <= b for (a, b) in ineqs} over Q."""
    rows = [(tuple(Q(x) for x in a), Q(b)) for a, b in ineqs]
    for j in range(nvars):
        pos, neg, rest = [], [], []
        for a, b in rows:
            (pos if a[j] > 0 else neg if a[j] < 0 else rest).append((a, b))
        new = set(rest)
        for ap, bp in pos:
            for an, bn in neg:
                sp, sn = -an[j], ap[j]
                a = tuple(sp * x + sn * y for x, y in zip(ap, an))
                b = sp * bp + sn * bn
                new.add(_normalize(a, b))
        rows = list(new)
    return all(b >= 0 for _, b in rows)


def _normalize(a, b):
    scale = max([abs(x) for x in a] + [abs(b)]) or Fraction(1)
    return tuple(x / scale for x in a), b / scale


def is_pointed(A) -> bool:
    """No nonzero nonnegative combination of columns vanishes, and no column is zero.

    The semigroup condition NA cap -NA = 0 agrees with pointedness of the rational
    cone once zero columns are excluded: a nonnegative rational relation clears to
    an integer one.  Decided by eliminating c from Ac = 0, c >= 0, sum c = 1.
    """
    A = _as_int_matrix(A)
    if any(all(A[k, i] == 0 for k in range(A.rows)) for i in range(A.cols)):
        return False
    n = A.cols
    ineqs = []
    for k in range(A.rows):
        row = [A[k, i] for i in range(n)]
        ineqs.append((row, 0))
        ineqs.append(([-x for x in row], 0))
    for i in range(n):
        ineqs.append(([-1 if j == i else 0 for j in range(n)], 0))
    ineqs.append(([1] * n, 1))
    ineqs.append(([-1] * n, -1))
    return not _fourier_motzkin_feasible(ineqs, n)


# ---------------------------------------------------------------------------
# Operator identities


def negative_part(l):
    return tuple(-x if x < 0 else 0 for x in l)


def euler_box_commutators(sys: GkzSystem) -> list[dict]:
    """[E_k, box_l] against -(A l_-)_k box_l for every k and basis vector l."""
    out = []
    for l, b in zip(sys.lattice_basis + sys.extra_lattice, sys.boxes):
        lm = sys.A.apply(negative_part(l))
        for k in range(sys.d):
            got = commutator(euler(sys.A, k), b)
            expected = b * (-lm[k])
            residual = got - expected
            out.append({"k": k + 1, "lattice_vector": list(l), "factor": str(-lm[k]),
                        "commutator": to_text(got, GROUP), "residual": to_text(residual, GROUP),
                        "ok": not residual})
    return out


def fourier_transform_generators(sys: GkzSystem) -> list[dict]:
    """Images under both sign conventions, with the round trip back to the generator."""
    out = []
    gens = [("box", b) for b in sys.boxes] + [("euler", e) for e in sys.eulers]
    for kind, g in gens:
        inv = fl_automorphism(g, GROUP, DUAL, inverse=True)
        fwd = fl_automorphism(g, GROUP, DUAL, inverse=False)
        back = fl_automorphism(inv, DUAL, GROUP, inverse=False)
        back_fwd = fl_automorphism(fwd, DUAL, GROUP, inverse=True)
        entry = {"kind": kind, "generator": to_text(g, GROUP),
                 "inverse_image": to_text(inv), "forward_image": to_text(fwd),
                 "round_trip": back == g and back_fwd == g}
        if kind == "box":
            entry["polynomial"] = inv.derivation_free() and fwd.derivation_free()
            entry["positive_binomial"] = [name for name, img in (("inverse", inv), ("forward", fwd))
                                          if _positive_leading(img)]
        out.append(entry)
    return out


def _positive_leading(e: WeylElement) -> bool:
    """The two terms have coefficients +1 and -1 in print order."""
    text = to_text(e)
    return not text.startswith("-")


def homogeneity_degree_check(sys: GkzSystem, random_vectors: int = 0, seed: int = 0) -> dict:
    """Total d-degree of both monomials of each box; balanced iff (1..1).l = 0."""
    rows = []
    vectors = list(sys.lattice_basis + sys.extra_lattice)
    rng = random.Random(seed)
    for _ in range(random_vectors if sys.lattice_basis else 0):
        c = [rng.randint(-3, 3) for _ in sys.lattice_basis]
        v = tuple(sum(ci * b[i] for ci, b in zip(c, sys.lattice_basis)) for i in range(sys.n))
        if any(v):
            vectors.append(_orient(v))
    for l in vectors:
        deg = (sum(negative_part(l)), sum(x for x in l if x > 0))
        rows.append({"lattice_vector": list(l), "degrees": list(deg), "balanced": deg[0] == deg[1]})
    return {"balanced": all(r["balanced"] for r in rows), "boxes": rows}


def toric_check(sys: GkzSystem, points: int = 25, seed: int = 0) -> dict:
    """Evaluate each box binomial with commuting symbols at c_i = t^(a_i) for random
    rational torus points t; every value must vanish."""
    rng = random.Random(seed)
    failures = []
    for _ in range(points):
        t = []
        for _ in range(sys.d):
            num = rng.choice([x for x in range(-9, 10) if x])
            t.append(Fraction(num, rng.randint(1, 9)))
        c = []
        for i in range(sys.n):
            v = Fraction(1)
            for k in range(sys.d):
                v *= t[k] ** int(sys.A[k, i])
            c.append(v)
        for l in sys.lattice_basis + sys.extra_lattice:
            lhs = Fraction(1)
            rhs = Fraction(1)
            for ci, x in zip(c, l):
                if x < 0:
                    lhs *= ci ** (-x)
                elif x > 0:
                    rhs *= ci ** x
            if lhs != rhs:
                failures.append({"point": [str(x) for x in t], "lattice_vector": list(l)})
    return {"points": points, "seed": seed, "ok": not failures, "failures": failures[:5]}


def report(sys: GkzSystem, seed: int = 0, points: int = 25) -> dict:
    comm = euler_box_commutators(sys)
    four = fourier_transform_generators(sys)
    hom = homogeneity_degree_check(sys, random_vectors=20, seed=seed)
    tor = toric_check(sys, points=points, seed=seed)
    checks = {
        "commutators": all(c["ok"] for c in comm),
        "fourier_round_trip": all(f["round_trip"] for f in four),
        "toric_vanishing": tor["ok"],
        # integral homogeneity implies balance; balance is the rational version
        "homogeneity_consistent": (hom["balanced"] or not sys.flags["homogeneous"])
        and hom["balanced"] == rationally_homogeneous(sys.A),
    }
    return {
        "check": "gkz",
        "ok": all(checks.values()),
        "A": sys.A.to_int_lists(),
        "beta": [str(b) for b in sys.beta],
        "lattice_basis": [list(v) for v in sys.lattice_basis],
        "extra_lattice": [list(v) for v in sys.extra_lattice],
        "boxes": [to_text(b, GROUP) for b in sys.boxes],
        "eulers": [to_text(e, GROUP) for e in sys.eulers],
        "flags": dict(sys.flags),
        "checks": checks,
        "commutators": comm,
        "fourier": four,
        "homogeneity": hom,
        "toric": tor,
    }
