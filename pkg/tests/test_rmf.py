import random

import pytest

from hodgefl.corpus import random_unimodular
from hodgefl.linalg import (
    Filtration, Matrix, Subspace, image, intersect, inverse, kernel, preimage, sum_,
)
from hodgefl.rmf import RMFError, check_rmf, rmf


# --- brute-force oracle -------------------------------------------------------

def subspace_lattice(N, L):
    n = N.rows
    seeds = {Subspace.zero(n), Subspace.full(n)}
    seeds |= {s for _, s in L.jumps}
    P = Matrix.identity(n)
    for _ in range(n + 1):
        seeds.add(image(P, Subspace.full(n)))
        seeds.add(kernel(P))
        P = P @ N
    lattice = set(seeds)
    while True:
        new = set()
        items = list(lattice)
        for a in items:
            new.add(image(N, a))
            new.add(preimage(N, a))
            for b in items:
                new.add(sum_(a, b))
                new.add(intersect(a, b))
        if new <= lattice:
            return lattice
        lattice |= new


def brute_force(N, L, limit=3):
    """All filtrations valued in the N/L subspace lattice satisfying both properties."""
    n = N.rows
    lattice = sorted(subspace_lattice(N, L), key=lambda s: (s.dim, s.basis))
    m = len(lattice)
    le = [[a <= b for b in lattice] for a in lattice]
    n_into = [[image(N, a) <= b for b in lattice] for a in lattice]
    zero = lattice.index(Subspace.zero(n))
    full = lattice.index(Subspace.full(n))
    idx = L.indices
    lo, hi = idx[0] - n - 1, idx[-1] + n + 1
    found = []
    # dim(x cap L_i) at the L indices and one below each
    li = sorted(set(idx) | {i - 1 for i in idx})
    cap = [{i: intersect(x, L.level(i)).dim for i in li} for x in lattice]

    def gr(levels, k, i):
        w = levels[k - lo] if k >= lo else zero
        w1 = levels[k - 1 - lo] if k - 1 >= lo else zero
        return cap[w][i] - cap[w1][i] - cap[w][i - 1] + cap[w1][i - 1]

    def symmetric(levels):
        # necessary condition: matching graded dimensions on each gr^L piece
        for i in idx:
            for l in range(1, hi - i + 1):
                if gr(levels, i + l, i) != (gr(levels, i - l, i) if i - l >= lo else 0):
                    return False
        return True

    def extend(levels):
        if len(found) >= limit:
            return
        k = lo + len(levels)
        if k > hi:
            if levels[-1] == full and symmetric(levels):
                f = Filtration.from_levels(
                    n, {i: lattice[x] for i, x in zip(range(lo, hi + 1), levels)})
                if not check_rmf(N, L, f):
                    found.append(f)
            return
        prev = levels[-1] if levels else zero
        two_back = levels[-2] if len(levels) >= 2 else zero
        for x in range(m):
            if le[prev][x] and n_into[x][two_back]:
                extend(levels + [x])

    extend([])
    return found


# --- generators ---------------------------------------------------------------

def random_instance(rng, n):
    rows = [[rng.randint(-1, 1) if j > i else 0 for j in range(n)] for i in range(n)]
    g = random_unimodular(rng, n)
    N = g @ Matrix.of(rows) @ inverse(g)
    pool = [Subspace.zero(n), Subspace.full(n)]
    for _ in range(4):
        v = [rng.randint(-1, 1) for _ in range(n)]
        orbit, w = [], v
        for _ in range(n):
            orbit.append(w)
            w = list(N.apply(w))
        pool.append(Subspace.span(orbit, n))
    P = Matrix.identity(n)
    for _ in range(n):
        pool.append(kernel(P))
        pool.append(image(P, Subspace.full(n)))
        P = P @ N
    pool = sorted(set(pool), key=lambda s: (s.dim, s.basis))
    chain = [s for s in pool if s.dim > 0]
    rng.shuffle(chain)
    picked = []
    for s in sorted(chain[:rng.randint(1, 3)], key=lambda s: s.dim):
        if all(p <= s for p in picked) and (not picked or picked[-1] != s):
            picked.append(s)
    if not picked or not picked[-1].is_full():
        picked.append(Subspace.full(n))
    index = rng.randint(-1, 1)
    levels = {}
    for s in picked:
        levels[index] = s
        index += rng.randint(1, 2)
    return N, Filtration.from_levels(n, levels)


# --- tests --------------------------------------------------------------------

def test_zero_nilpotent_gives_recentred_L():
    L = Filtration.from_degrees([0, 1, 1])
    res = rmf(Matrix.zeros(3, 3), L, center=2)
    assert res.filtration == L.shift(-2)


def test_jordan_block_trivial_L():
    N = Matrix.of([[0, 1], [0, 0]])
    res = rmf(N, Filtration.single_jump(2, 0))
    W = res.filtration
    assert W.indices == (-1, 1)
    assert W.level(-1) == image(N, Subspace.full(2)) == kernel(N)
    assert W.level(1).is_full()


def test_errors():
    with pytest.raises(RMFError):
        rmf(Matrix.of([[1, 0], [0, 0]]), Filtration.single_jump(2, 0))
    with pytest.raises(RMFError):
        rmf(Matrix.of([[0, 1], [0, 0]]), Filtration.from_degrees([1, 0]))


def test_two_step_example_exists():
    # N e2 = e1 with L_0 = span(e1): each line is its own graded piece, so W = L recentred
    N = Matrix.of([[0, 1], [0, 0]])
    L = Filtration.from_degrees([0, 2])
    res = rmf(N, L)
    assert res.exists
    assert not check_rmf(N, L, res.filtration)


def test_nonexistence_is_certified():
    # N e2 = e1 with both basis vectors in separate L pieces of adjacent index:
    # gr^L pieces are one-dimensional, so W must equal L there, yet N lowers W by 2
    N = Matrix.of([[0, 1], [0, 0]])
    L = Filtration.from_degrees([0, 1])
    res = rmf(N, L)
    assert not res.exists and res.certificate
    assert brute_force(N, L) == []


def test_agrees_with_brute_force_oracle():
    rng = random.Random(5)
    seen = {True: 0, False: 0}
    for trial in range(120):
        n = rng.randint(1, 3)
        N, L = random_instance(rng, n)
        res = rmf(N, L)
        sols = brute_force(N, L)
        seen[res.exists] += 1
        if res.exists:
            assert len(sols) == 1, (trial, N, L)
            assert sols[0] == res.filtration
            assert not check_rmf(N, L, res.filtration)
        else:
            assert sols == [], (trial, N, L)
    assert seen[True] > 20 and seen[False] > 5


def test_larger_instances_satisfy_properties():
    rng = random.Random(9)
    found = 0
    for _ in range(40):
        N, L = random_instance(rng, rng.randint(4, 5))
        center = rng.randint(-1, 1)
        res = rmf(N, L, center=center)
        if res.exists:
            found += 1
            assert not check_rmf(N, L.shift(-center), res.filtration)
        else:
            assert res.certificate
    assert found > 5


def test_center_recentres_L():
    N = Matrix.of([[0, 1], [0, 0]])
    base = rmf(N, Filtration.single_jump(2, 0)).filtration
    moved = rmf(N, Filtration.single_jump(2, 3), center=3).filtration
    assert moved == base
