import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hodgefl.linalg import (
    DimensionMismatch, Filtration, Matrix, Subspace, det, graded_dims, hermite_normal_form,
    image, induced_on_quotient, induced_on_sub, int_row_span_contains, intersect,
    invariant_factors, kernel_lattice, preimage, quotient_dim, rank, shift,
    smith_normal_form, sum_,
)


def e(i, n):
    return [int(i == j) for j in range(n)]


def is_snf_diagonal(d):
    diag = []
    for i in range(d.rows):
        for j in range(d.cols):
            if i != j and d[i, j] != 0:
                return False
    diag = [d[i, i] for i in range(min(d.rows, d.cols))]
    nz = [x for x in diag if x != 0]
    if any(x < 0 for x in diag) or diag[:len(nz)] != nz:
        return False
    return all(b % a == 0 for a, b in zip(nz, nz[1:]))


def check_snf(a):
    u, d, v = smith_normal_form(a)
    assert u @ Matrix.of(a) @ v == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    assert is_snf_diagonal(d)
    return u, d, v


# --- smith normal form --------------------------------------------------------

def test_snf_identity():
    u, d, v = smith_normal_form([e(i, 3) for i in range(3)])
    assert u == d == v == Matrix.identity(3)


def test_snf_diag_2_3():
    _, d, _ = check_snf([[2, 0], [0, 3]])
    assert d == Matrix.of([[1, 0], [0, 6]])


def test_snf_rank_two_surjection():
    _, d, _ = check_snf([[1, 1, 1], [0, 1, 2]])
    assert d == Matrix.of([[1, 0, 0], [0, 1, 0]])


def test_snf_zero_and_empty_shapes():
    _, d, _ = check_snf([[0, 0], [0, 0]])
    assert d.is_zero()
    assert invariant_factors([[0, 0, 0]]) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda m: st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-10, 10), min_size=n, max_size=n),
                       min_size=m, max_size=m))))
def test_snf_property(a):
    check_snf(a)


def test_snf_invariant_factors_match_determinantal_divisors():
    # independent oracle: the product of the first k invariant factors is the
    # gcd of all k x k minors
    from itertools import combinations
    from math import gcd
    rng = random.Random(3)
    for _ in range(25):
        a = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
        inv = invariant_factors(a)
        for k in range(1, 4):
            g = 0
            for rows in combinations(range(3), k):
                for cols in combinations(range(3), k):
                    g = gcd(g, int(det(Matrix.of([[a[i][j] for j in cols] for i in rows]))))
            prod = 1
            for x in inv[:k]:
                prod *= x
            assert (g if len(inv) >= k else 0) == (prod if len(inv) >= k else 0)


# --- kernel lattice -------------------------------------------------------------

def saturated(basis, n):
    return invariant_factors(basis) == [1] * len(basis)


def test_kernel_lattice_toric_example():
    assert kernel_lattice([[1, 1, 1], [0, 1, 2]]) == [(1, -2, 1)]


def test_kernel_lattice_identity():
    assert kernel_lattice([e(i, 3) for i in range(3)]) == []


def test_kernel_lattice_single_row():
    basis = kernel_lattice([[1, 1, 1]])
    assert len(basis) == 2
    for ell in basis:
        assert sum(ell) == 0
    # same lattice as {(1,-1,0),(0,1,-1)}: unimodular change of basis
    ref = Matrix.of([[1, -1, 0], [0, 1, -1]])
    got = Matrix.of(basis)
    assert rank(Matrix.of(list(basis) + [[1, -1, 0], [0, 1, -1]])) == 2
    assert saturated(basis, 3) and saturated(ref.to_int_lists(), 3)
    assert hermite_normal_form(basis) == hermite_normal_form(ref.to_int_lists())
    assert got.rows == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda m: st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-10, 10), min_size=n, max_size=n),
                       min_size=m, max_size=m))))
def test_kernel_lattice_property(a):
    basis = kernel_lattice(a)
    n = len(a[0])
    assert len(basis) == n - rank(Matrix.of(a))
    for ell in basis:
        assert all(sum(x * y for x, y in zip(row, ell)) == 0 for row in a)
    if basis:
        assert saturated(basis, n)


def test_hnf_shape():
    h = hermite_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    for i, row in enumerate(h):
        p = next(j for j, x in enumerate(row) if x)
        assert row[p] > 0
        for above in h[:i]:
            assert 0 <= above[p] < row[p]


def test_int_row_span():
    assert int_row_span_contains([[1, 1, 1], [0, 1, 2]], [1, 1, 1])
    assert not int_row_span_contains([[1, 2]], [1, 1])
    assert not int_row_span_contains([[2, 0], [0, 2]], [1, 1])
    assert int_row_span_contains([[2, 0], [0, 2]], [2, -4])


# --- subspaces ------------------------------------------------------------------

def test_sum_of_axes_is_plane():
    assert sum_(Subspace.span([e(0, 2)], 2), Subspace.span([e(1, 2)], 2)) == Subspace.full(2)


def test_intersect_diagonal_with_axis():
    assert intersect(Subspace.span([[1, 1]], 2), Subspace.span([e(0, 2)], 2)) == Subspace.zero(2)


def test_quotient_dim():
    assert quotient_dim(Subspace.full(2), Subspace.span([e(0, 2)], 2)) == 1
    with pytest.raises(ValueError):
        quotient_dim(Subspace.span([e(0, 2)], 2), Subspace.full(2))


def test_dimension_mismatch_is_structured():
    with pytest.raises(DimensionMismatch) as info:
        sum_(Subspace.full(2), Subspace.full(3))
    assert (info.value.operation, info.value.expected, info.value.got) == ("sum", 2, 3)
    with pytest.raises(DimensionMismatch):
        preimage(Matrix.identity(2), Subspace.full(3))


def test_image_preimage():
    n = Matrix.of([[0, 1], [0, 0]])
    assert image(n, Subspace.full(2)) == Subspace.span([e(0, 2)], 2)
    assert preimage(n, Subspace.zero(2)) == Subspace.span([e(0, 2)], 2)
    assert preimage(n, Subspace.span([e(0, 2)], 2)) == Subspace.full(2)


vec5 = st.lists(st.integers(-3, 3), min_size=5, max_size=5)
space5 = st.lists(vec5, max_size=4).map(lambda vs: Subspace.span(vs, 5))


@settings(max_examples=80, deadline=None)
@given(space5, space5, space5)
def test_lattice_laws(s, t, u):
    assert sum_(s, t) == sum_(t, s)
    assert intersect(s, t) == intersect(t, s)
    assert sum_(sum_(s, t), u) == sum_(s, sum_(t, u))
    assert intersect(intersect(s, t), u) == intersect(s, intersect(t, u))
    assert sum_(s, s) == s and intersect(s, s) == s
    assert sum_(s, t).dim + intersect(s, t).dim == s.dim + t.dim
    assert intersect(s, t) <= s and s <= sum_(s, t)


@settings(max_examples=40, deadline=None)
@given(space5, st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5),
                        min_size=5, max_size=5))
def test_image_preimage_adjunction(s, rows):
    m = Matrix.of(rows)
    assert image(m, preimage(m, s)) <= s
    assert s <= preimage(m, image(m, s))


# --- filtrations ----------------------------------------------------------------

def test_shift_single_jump():
    f = Filtration.single_jump(2, 0)
    assert shift(f, 1).indices == (1,)
    assert shift(f, 0) == f


def test_full_flag_graded_dims():
    f = Filtration.from_degrees([0, 1, 2])
    assert list(graded_dims(f).values()) == [1, 1, 1]


def test_filtration_validation():
    with pytest.raises(ValueError):
        Filtration(2, ((0, Subspace.span([e(0, 2)], 2)),))
    with pytest.raises(ValueError):
        Filtration(2, ((1, Subspace.full(2)), (0, Subspace.full(2))))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=5), space5.filter(lambda s: s.dim <= 5))
def test_induced_filtrations(degrees, s):
    n = len(degrees)
    s = Subspace.span([v[:n] for v in s.basis], n)
    f = Filtration.from_degrees(degrees)
    sub = induced_on_sub(f, s)
    quo = induced_on_quotient(f, s)
    assert sub.ambient == s.dim and quo.ambient == n - s.dim
    # graded dimensions are additive over 0 -> S -> V -> V/S -> 0
    gd = graded_dims(f)
    gs, gq = graded_dims(sub), graded_dims(quo)
    for p in set(gd) | set(gs) | set(gq):
        assert gd.get(p, 0) == gs.get(p, 0) + gq.get(p, 0)
    assert sum(gd.values()) == n


def test_fraction_entries_exact():
    s = Subspace.span([[Fraction(1, 3), Fraction(2, 3)]], 2)
    assert s.basis == ((1, 2),)
