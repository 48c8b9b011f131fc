"""Exact rational linear algebra and integer lattice normal forms.

Everything here works over :class:`fractions.Fraction` or plain ``int``;
there is no floating point. Matrices act on column vectors, subspaces are
stored by the rows of their reduced row echelon form, so two subspaces are
equal exactly when their representations are equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class DimensionMismatch(ValueError):
    """Raised when two objects that must share an ambient dimension do not."""

    def __init__(self, operation: str, expected: int, got: int):
        self.operation = operation
        self.expected = expected
        self.got = got
        super().__init__(f"{operation}: expected dimension {expected}, got {got}")


def Q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def q_str(x: Fraction) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# Matrices


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    data: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise DimensionMismatch("Matrix", self.rows * self.cols,
                                    sum(len(r) for r in self.data))

    @classmethod
    def of(cls, entries: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        data = tuple(tuple(Q(x) for x in row) for row in entries)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple((Fraction(0),) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(tuple(Fraction(int(i == j)) for j in range(n))
                               for i in range(n)))

    @classmethod
    def scalar(cls, n: int, c) -> "Matrix":
        c = Q(c)
        return cls(n, n, tuple(tuple(c if i == j else Fraction(0) for j in range(n))
                               for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch("matmul", self.cols, other.rows)
        cols_of_other = list(zip(*other.data)) if other.rows else [()] * other.cols
        data = tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols_of_other)
            for row in self.data
        )
        return Matrix(self.rows, other.cols, data)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other, "add")
        return Matrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other, "sub")
        return Matrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        c = Q(c)
        return Matrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def _same_shape(self, other, op):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch(op, self.rows * self.cols, other.rows * other.cols)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows
                      else tuple(() for _ in range(self.cols)))

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise DimensionMismatch("apply", self.cols, len(v))
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.data)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.data for x in r)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.data]

    def to_int_lists(self) -> list[list[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integer entries")
        return [[int(x) for x in r] for r in self.data]

    def power(self, k: int) -> "Matrix":
        out = Matrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out


def det(m: Matrix) -> Fraction:
    if m.rows != m.cols:
        raise DimensionMismatch("det", m.rows, m.cols)
    a = m.tolist()
    n = m.rows
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        result *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return sign * result


def rref(rows: Iterable[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = [[Q(x) for x in r] for r in rows]
    for r in a:
        if len(r) != ncols:
            raise DimensionMismatch("rref", ncols, len(r))
    pivots: list[int] = []
    top = 0
    for c in range(ncols):
        piv = next((i for i in range(top, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[top], a[piv] = a[piv], a[top]
        lead = a[top][c]
        if lead != 1:
            a[top] = [x / lead for x in a[top]]
        for i in range(len(a)):
            if i != top and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[top])]
        pivots.append(c)
        top += 1
        if top == len(a):
            break
    return a[:top], pivots


def rank(m: Matrix) -> int:
    return len(rref(m.data, m.cols)[0])


def inverse(m: Matrix) -> Matrix:
    n = m.rows
    if n != m.cols:
        raise DimensionMismatch("inverse", n, m.cols)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m.data)]
    red, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return Matrix.of([r[n:] for r in red], cols=n)


def null_space(m: Matrix) -> list[tuple[Fraction, ...]]:
    """Basis of {v : m v = 0}, one vector per free column."""
    red, piv = rref(m.data, m.cols)
    free = [c for c in range(m.cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True)
class Subspace:
    ambient: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        red, _ = rref(vectors, ambient)
        return cls(ambient, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n).data)

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = set(indices)
        return cls.span([[int(i == j) for j in range(n)] for i in sorted(idx)], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x != 0) for r in self.basis]

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def contains(self, v: Sequence) -> bool:
        v = [Q(x) for x in v]
        if len(v) != self.ambient:
            raise DimensionMismatch("contains", self.ambient, len(v))
        for row, p in zip(self.basis, self.pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return not any(v)

    def coords(self, v: Sequence) -> tuple[Fraction, ...]:
        """Coordinates of ``v`` in the echelon basis; ``v`` must lie in the space."""
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        return tuple(Q(v[p]) for p in self.pivots)

    def reduce(self, v: Sequence) -> tuple[Fraction, ...]:
        v = [Q(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return tuple(v)

    def annihilator(self) -> Matrix:
        """Rows spanning the linear forms vanishing on this subspace."""
        forms = null_space(Matrix(self.dim, self.ambient, self.basis))
        return Matrix(len(forms), self.ambient, tuple(forms))

    def __le__(self, other: "Subspace") -> bool:
        _check_same(self, other, "subset")
        return all(other.contains(v) for v in self.basis)

    def basis_matrix(self) -> Matrix:
        """Columns are the basis vectors (ambient x dim), i.e. the inclusion map."""
        return Matrix(self.dim, self.ambient, self.basis).T


def _check_same(s: Subspace, t: Subspace, op: str):
    if s.ambient != t.ambient:
        raise DimensionMismatch(op, s.ambient, t.ambient)


def sum_(s: Subspace, t: Subspace) -> Subspace:
    _check_same(s, t, "sum")
    return Subspace.span(s.basis + t.basis, s.ambient)


def intersect(s: Subspace, t: Subspace) -> Subspace:
    _check_same(s, t, "intersect")
    ann = t.annihilator()
    if ann.rows == 0 or s.dim == 0:
        return s
    # x in ker(B A^T) <=> (x B) in t
    b = Matrix(s.dim, s.ambient, s.basis)
    combos = null_space((b @ ann.T).T)
    return Subspace.span([(Matrix(1, s.dim, (c,)) @ b).data[0] for c in combos], s.ambient)


def image(m: Matrix, s: Subspace) -> Subspace:
    if m.cols != s.ambient:
        raise DimensionMismatch("image", m.cols, s.ambient)
    return Subspace.span([m.apply(v) for v in s.basis], m.rows)


def preimage(m: Matrix, s: Subspace) -> Subspace:
    if m.rows != s.ambient:
        raise DimensionMismatch("preimage", m.rows, s.ambient)
    ann = s.annihilator()
    if ann.rows == 0:
        return Subspace.full(m.cols)
    return Subspace.span(null_space(ann @ m), m.cols)


def kernel(m: Matrix) -> Subspace:
    return Subspace.span(null_space(m), m.cols)


def quotient_dim(s: Subspace, t: Subspace) -> int:
    if not t <= s:
        raise ValueError("quotient_dim requires T contained in S")
    return s.dim - t.dim


def quotient_coords(s: Subspace, v: Sequence) -> tuple[Fraction, ...]:
    """Coordinates of the class of ``v`` in ambient/s, using non-pivot columns."""
    red = s.reduce(v)
    piv = set(s.pivots)
    return tuple(x for j, x in enumerate(red) if j not in piv)


def restrict_map(m: Matrix, src: Subspace, dst: Subspace) -> Matrix:
    """Matrix of ``m`` restricted to ``src`` with values in ``dst``, in echelon bases."""
    cols = [dst.coords(m.apply(v)) for v in src.basis]
    return Matrix(len(cols), dst.dim, tuple(cols)).T if cols else Matrix.zeros(dst.dim, 0)


# ---------------------------------------------------------------------------
# Filtrations


@dataclass(frozen=True)
class Filtration:
    """Increasing, exhaustive filtration with finitely many jumps.

    ``jumps`` lists ``(index, subspace)`` where the level changes; the level at
    ``p`` is the subspace of the largest jump index ``<= p``, zero below the
    first jump. The last jump is the full space.
    """

    ambient: int
    jumps: tuple[tuple[int, Subspace], ...]

    def __post_init__(self):
        prev = Subspace.zero(self.ambient)
        last_index = None
        for idx, sub in self.jumps:
            if sub.ambient != self.ambient:
                raise DimensionMismatch("Filtration", self.ambient, sub.ambient)
            if last_index is not None and idx <= last_index:
                raise ValueError("jump indices must be strictly increasing")
            if not prev <= sub or prev == sub:
                raise ValueError(f"filtration is not strictly increasing at index {idx}")
            prev, last_index = sub, idx
        if not prev.is_full():
            raise ValueError("filtration is not exhaustive")

    @classmethod
    def from_levels(cls, ambient: int, levels: Mapping[int, Subspace]) -> "Filtration":
        """Build from any map index -> level; levels must be monotone in the index."""
        jumps = []
        prev = Subspace.zero(ambient)
        for idx in sorted(levels):
            sub = levels[idx]
            if not prev <= sub:
                raise ValueError(f"levels are not monotone at index {idx}")
            if sub != prev:
                jumps.append((idx, sub))
                prev = sub
        return cls(ambient, tuple(jumps))

    @classmethod
    def single_jump(cls, ambient: int, index: int) -> "Filtration":
        if ambient == 0:
            return cls(0, ())
        return cls(ambient, ((index, Subspace.full(ambient)),))

    @classmethod
    def from_degrees(cls, degrees: Sequence[int]) -> "Filtration":
        """Coordinate filtration: level p is spanned by the e_i with degrees[i] <= p."""
        n = len(degrees)
        return cls.from_levels(n, {p: Subspace.coordinate(n, [i for i, d in enumerate(degrees) if d <= p])
                                   for p in set(degrees)})

    def level(self, p: int) -> Subspace:
        out = Subspace.zero(self.ambient)
        for idx, sub in self.jumps:
            if idx > p:
                break
            out = sub
        return out

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.jumps)

    def bounds(self) -> tuple[int, int] | None:
        if not self.jumps:
            return None
        return self.jumps[0][0], self.jumps[-1][0]

    def shift(self, ell: int) -> "Filtration":
        """Filtration whose level at p is this filtration's level at p - ell."""
        return Filtration(self.ambient, tuple((i + ell, s) for i, s in self.jumps))

    def transform(self, g: Matrix) -> "Filtration":
        if g.rows != g.cols or g.cols != self.ambient:
            raise DimensionMismatch("transform", self.ambient, g.cols)
        return Filtration(self.ambient, tuple((i, image(g, s)) for i, s in self.jumps))

    def graded_dims(self) -> dict[int, int]:
        out = {}
        prev = 0
        for idx, sub in self.jumps:
            out[idx] = sub.dim - prev
            prev = sub.dim
        return out

    def __contains__(self, item):
        raise TypeError("use level(p).contains(v)")


def shift(f: Filtration, ell: int) -> Filtration:
    return f.shift(ell)


def graded_dims(f: Filtration) -> dict[int, int]:
    return f.graded_dims()


def induced_on_sub(f: Filtration, s: Subspace) -> Filtration:
    """Filtration F ∩ S written in the echelon coordinates of ``s``."""
    _check_same(f.level(0), s, "induced_on_sub")
    levels = {}
    for idx, sub in f.jumps:
        cap = intersect(sub, s)
        levels[idx] = Subspace.span([s.coords(v) for v in cap.basis], s.dim)
    return Filtration.from_levels(s.dim, levels)


def induced_on_quotient(f: Filtration, s: Subspace) -> Filtration:
    """Image filtration on ambient/S in the non-pivot coordinates of ``s``."""
    _check_same(f.level(0), s, "induced_on_quotient")
    qdim = s.ambient - s.dim
    levels = {idx: Subspace.span([quotient_coords(s, v) for v in sub.basis], qdim)
              for idx, sub in f.jumps}
    return Filtration.from_levels(qdim, levels)


def maps_into(m: Matrix, src: Subspace, dst: Subspace) -> tuple[Fraction, ...] | None:
    """First basis vector of ``src`` whose image escapes ``dst`` (None if m(src) ⊆ dst)."""
    for v in src.basis:
        if not dst.contains(m.apply(v)):
            return v
    return None


# ---------------------------------------------------------------------------
# Integer lattices


def _ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _as_int_rows(a) -> list[list[int]]:
    if isinstance(a, Matrix):
        return a.to_int_lists()
    rows = [list(r) for r in a]
    for r in rows:
        for x in r:
            if Fraction(x).denominator != 1:
                raise ValueError("integer matrix expected")
    return [[int(x) for x in r] for r in rows]


def smith_normal_form(a) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``D = U A V``, U and V unimodular, D in Smith form.

    Pivots are chosen with the smallest nonzero absolute value among the
    remaining entries; ``D[i][i]`` divides ``D[i+1][i+1]`` and all are >= 0.
    """
    d = _as_int_rows(a)
    m = len(d)
    n = len(d[0]) if m else (a.cols if isinstance(a, Matrix) else 0)
    u, v = _ident(m), _ident(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, c):
        for row in d:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        cand = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
        if not cand:
            break
        _, i0, j0 = min(cand)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // d[t][t]))
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // d[t][t]))
            rest = [(abs(d[i][t]), i, t) for i in range(t + 1, m) if d[i][t]]
            rest += [(abs(d[t][j]), t, j) for j in range(t + 1, n) if d[t][j]]
            if rest:
                _, i1, j1 = min(rest)
                if j1 == t:
                    swap_rows(t, i1)
                else:
                    swap_cols(t, j1)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return Matrix.of(u, cols=m), Matrix.of(d, cols=n), Matrix.of(v, cols=n)


def invariant_factors(a) -> list[int]:
    _, d, _ = smith_normal_form(a)
    return [int(d[i, i]) for i in range(min(d.rows, d.cols)) if d[i, i] != 0]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF: echelon, positive pivots, entries above pivots reduced mod pivot.

    Zero rows are dropped; the result spans the same lattice.
    """
    a = [[int(x) for x in r] for r in rows]
    if not a:
        return []
    ncols = len(a[0])
    top = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(top, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[top], a[p] = a[p], a[top]
            done = True
            for i in range(top + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[top][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if top < len(a) and a[top][c]:
            if a[top][c] < 0:
                a[top] = [-x for x in a[top]]
            for i in range(top):
                q = a[i][c] // a[top][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
            top += 1
            if top == len(a):
                break
    return [r for r in a[:top] if any(r)]


def kernel_lattice(a) -> list[tuple[int, ...]]:
    """Z-basis of {l in Z^n : A l = 0}, in Hermite normal form."""
    u, d, v = smith_normal_form(a)
    r = sum(1 for i in range(min(d.rows, d.cols)) if d[i, i] != 0)
    vcols = v.T.to_int_lists()
    return [tuple(row) for row in hermite_normal_form(vcols[r:])]


def int_row_span_contains(a, target: Sequence[int]) -> bool:
    """Whether ``target`` is an integer combination of the rows of ``a``."""
    rows = _as_int_rows(a)
    # y A = target  <=>  A^T y^T = target^T
    at = [list(c) for c in zip(*rows)] if rows else [[] for _ in target]
    if len(at) != len(target):
        raise DimensionMismatch("row span", len(at), len(target))
    if not rows:
        return not any(target)
    u, d, v = smith_normal_form(at)
    # D = U A^T V; A^T y = b  <=>  D (V^-1 y) = U b
    c = u.apply([Fraction(x) for x in target])
    for i, ci in enumerate(c):
        di = d[i, i] if i < min(d.rows, d.cols) else Fraction(0)
        if di == 0:
            if ci != 0:
                return False
        elif ci % di:
            return False
    return True
