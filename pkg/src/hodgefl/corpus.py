"""Seeded random generator of valid monodromic modules.

Three families, all valid by construction:

* rank one, integer eigenvalues, glued from a pair of maps
  ``var: A -> B`` and ``can: B -> A`` (A sits at eigenvalue 0, B at 1);
* rank one, one non-integer class lambda + Z carrying a single nilpotent N;
* rank two, the polynomial ring and the delta module in two variables.

Every piece may be Tate twisted; pieces on a common window are summed and a
random integer change of basis is applied to every eigenspace.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .linalg import Matrix, det
from .monodromic import FilteredSpace, MonodromicModule, change_basis, direct_sum, tate_twist


def _degrees(rng, n, lo, hi):
    return sorted(rng.randint(lo, hi) for _ in range(n))


def _graded_map(rng, src, dst, w_drop, f_raise, density=0.7):
    """Random integer matrix src -> dst respecting coordinate degrees.

    src, dst are lists of (f_degree, w_degree); entry (i, j) may be nonzero
    only when dst w_i <= src w_j - w_drop and dst f_i <= src f_j + f_raise.
    """
    rows = []
    for fi, wi in dst:
        row = []
        for fj, wj in src:
            ok = wi <= wj - w_drop and fi <= fj + f_raise
            row.append(rng.randint(-2, 2) if ok and rng.random() < density else 0)
        rows.append(row)
    return Matrix.of(rows, cols=len(src)) if rows else Matrix.zeros(0, len(src))


def integer_piece(rng, window, denom, max_dim=3) -> MonodromicModule:
    a_dim, b_dim = rng.randint(0, max_dim), rng.randint(0, max_dim)
    if a_dim + b_dim == 0:
        b_dim = 1
    a = list(zip(_degrees(rng, a_dim, -1, 2), _degrees(rng, a_dim, -1, 3)))
    b = list(zip(_degrees(rng, b_dim, -1, 2), _degrees(rng, b_dim, -1, 3)))
    drop = rng.randint(0, 2)
    var = _graded_map(rng, a, b, drop, 0)
    can = _graded_map(rng, b, a, 2 - drop, 1)
    n_a, n_b = can @ var, var @ can
    lo, hi = window
    spaces, zmaps, dmaps = {}, {}, {}
    grid = [lo + Fraction(k, denom) for k in range(int((hi - lo) * denom) + 1)]
    ints = [c for c in grid if c.denominator == 1]
    for c in ints:
        k = int(c)
        if k >= 1:
            spaces[c] = FilteredSpace.from_degrees([f for f, _ in b], [w for _, w in b])
        else:
            # the Hodge degree of an A-vector drops by one per step up the chain
            spaces[c] = FilteredSpace.from_degrees([f - k for f, _ in a], [w for _, w in a])
    for c in ints:
        k = int(c)
        if c + 1 in spaces:
            if k >= 1:
                zmaps[1, c] = Matrix.identity(b_dim)
            elif k == 0:
                zmaps[1, c] = var
            else:
                zmaps[1, c] = n_a + Matrix.scalar(a_dim, k)
        if c - 1 in spaces:
            if k >= 2:
                dmaps[1, c] = n_b + Matrix.scalar(b_dim, k - 1)
            elif k == 1:
                dmaps[1, c] = can
            else:
                dmaps[1, c] = Matrix.identity(a_dim)
    return MonodromicModule(1, denom, window, spaces, zmaps, dmaps, True, True)


def noninteger_piece(rng, window, denom, lam, max_dim=3) -> MonodromicModule:
    d = rng.randint(1, max_dim)
    basis = list(zip(_degrees(rng, d, -1, 2), _degrees(rng, d, -2, 3)))
    N = _graded_map(rng, basis, basis, 2, 1)
    lo, hi = window
    grid = [lo + Fraction(k, denom) for k in range(int((hi - lo) * denom) + 1)]
    cls = [c for c in grid if c - lam == int(c - lam)]
    spaces = {c: FilteredSpace.from_degrees([f for f, _ in basis], [w for _, w in basis])
              for c in cls}
    zmaps = {(1, c): Matrix.identity(d) for c in cls if c + 1 in spaces}
    dmaps = {(1, c): N + Matrix.scalar(d, c - 1) for c in cls if c - 1 in spaces}
    return MonodromicModule(1, denom, window, spaces, zmaps, dmaps, True, True)


def polynomial_plane(window=(2, 5)) -> MonodromicModule:
    """C[z1, z2]: monomials z1^a z2^b span M^(a+b+2); F jump 0, W jump 2."""
    lo, hi = int(window[0]), int(window[1])
    mons = {c: [(a, c - 2 - a) for a in range(c - 1)] for c in range(lo, hi + 1) if c >= 2}
    spaces = {c: FilteredSpace.from_degrees([0] * len(m), [2] * len(m)) for c, m in mons.items()}
    zmaps, dmaps = {}, {}
    for c, basis in mons.items():
        for i in (1, 2):
            if c + 1 in mons:
                tgt = mons[c + 1]
                zmaps[i, c] = _monomial_map(basis, tgt, lambda ab: (
                    ((ab[0] + 1, ab[1]) if i == 1 else (ab[0], ab[1] + 1)), 1))
            if c - 1 in mons:
                tgt = mons[c - 1]
                dmaps[i, c] = _monomial_map(basis, tgt, lambda ab: (
                    ((ab[0] - 1, ab[1]) if i == 1 else (ab[0], ab[1] - 1)), ab[i - 1]))
    return MonodromicModule(2, 1, (lo, hi), spaces, zmaps, dmaps, False, True)


def delta_plane(window=(-3, 0)) -> MonodromicModule:
    """Delta at the origin of the plane: d1^a d2^b delta spans M^(-a-b); F jump a+b+2, W jump 0."""
    lo, hi = int(window[0]), int(window[1])
    mons = {c: [(a, -c - a) for a in range(-c + 1)] for c in range(lo, hi + 1) if c <= 0}
    spaces = {c: FilteredSpace.from_degrees([-c + 2] * len(m), [0] * len(m))
              for c, m in mons.items()}
    zmaps, dmaps = {}, {}
    for c, basis in mons.items():
        for i in (1, 2):
            if c + 1 in mons:
                zmaps[i, c] = _monomial_map(basis, mons[c + 1], lambda ab: (
                    ((ab[0] - 1, ab[1]) if i == 1 else (ab[0], ab[1] - 1)), -ab[i - 1]))
            if c - 1 in mons:
                dmaps[i, c] = _monomial_map(basis, mons[c - 1], lambda ab: (
                    ((ab[0] + 1, ab[1]) if i == 1 else (ab[0], ab[1] + 1)), 1))
    return MonodromicModule(2, 1, (lo, hi), spaces, zmaps, dmaps, True, False)


def _monomial_map(src, dst, rule):
    idx = {m: k for k, m in enumerate(dst)}
    rows = [[0] * len(src) for _ in dst]
    for j, m in enumerate(src):
        tgt, coeff = rule(m)
        if coeff and tgt in idx:
            rows[idx[tgt]][j] += coeff
    return Matrix.of(rows, cols=len(src)) if rows else Matrix.zeros(0, len(src))


def random_unimodular(rng, n) -> Matrix:
    if n == 0:
        return Matrix.zeros(0, 0)
    lower = [[1 if i == j else (rng.randint(-2, 2) if j < i else 0) for j in range(n)]
             for i in range(n)]
    upper = [[rng.choice((-1, 1)) if i == j else (rng.randint(-2, 2) if j > i else 0)
              for j in range(n)] for i in range(n)]
    g = Matrix.of(lower) @ Matrix.of(upper)
    assert abs(det(g)) == 1
    return g


def scramble(rng, M: MonodromicModule) -> MonodromicModule:
    return change_basis(M, {c: random_unimodular(rng, M.dim(c)) for c in M.grid})


def random_module(rng: random.Random, r: int | None = None) -> MonodromicModule:
    r = r if r is not None else rng.choice((1, 1, 1, 2))
    if r == 2:
        piece = rng.choice((polynomial_plane, delta_plane))
        M = tate_twist(piece(), rng.randint(-1, 1))
        if rng.random() < 0.3:
            M = direct_sum(M, tate_twist(piece(), rng.randint(-1, 1)))
            if M.total_dim() > 0 and max(M.dim(c) for c in M.grid) > 4:
                M = tate_twist(piece(), rng.randint(-1, 1))
        return scramble(rng, M)
    denom = rng.choice((1, 2, 3))
    lo = Fraction(rng.randint(-3 * denom, 2 * denom), denom)
    hi = lo + rng.randint(2, 4)
    window = (lo, hi)
    M = tate_twist(integer_piece(rng, window, denom), rng.randint(-1, 1))
    if denom > 1:
        lam = Fraction(rng.randint(1, denom - 1), denom)
        M = direct_sum(M, tate_twist(noninteger_piece(rng, window, denom, lam),
                                     rng.randint(-1, 1)))
    return scramble(rng, M)


def corpus(seed: int, count: int, r: int | None = None) -> list[MonodromicModule]:
    rng = random.Random(seed)
    return [random_module(rng, r) for _ in range(count)]
