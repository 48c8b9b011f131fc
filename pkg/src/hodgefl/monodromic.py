"""Monodromic module data over a point with Hodge and weight filtrations.

A monodromic module is stored on a finite window of eigenvalues in (1/e)Z.
Each grid point chi carries a finite-dimensional space M^chi with an
increasing Hodge filtration F and weight filtration W.  The position maps
z_i send M^chi to M^(chi+1) and the derivations d_i send M^chi to M^(chi-1).
Maps leaving the window are not stored; the two stability flags declare
that z_i is an isomorphism above the window (``high_flag``) and d_i below it
(``low_flag``).

The nilpotent part of the Euler operator on M^chi is
``N = sum z_i d_i - chi + r``; at the bottom of the window it is evaluated as
``sum d_i z_i - r - chi + r`` instead, which is the same operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .linalg import (
    Filtration, Matrix, Subspace, image, induced_on_sub, inverse, maps_into, restrict_map,
)
from .weyl import WeylElement, v_degree

Chi = Fraction


class ModuleError(ValueError):
    pass


@dataclass(frozen=True)
class FilteredSpace:
    dim: int
    F: Filtration
    W: Filtration

    def __post_init__(self):
        if self.F.ambient != self.dim or self.W.ambient != self.dim:
            raise ModuleError("filtration ambient dimension does not match the space")

    @classmethod
    def zero(cls) -> "FilteredSpace":
        return cls(0, Filtration(0, ()), Filtration(0, ()))

    @classmethod
    def from_degrees(cls, f_degrees, w_degrees) -> "FilteredSpace":
        if len(f_degrees) != len(w_degrees):
            raise ModuleError("F and W degree lists differ in length")
        return cls(len(f_degrees), Filtration.from_degrees(f_degrees),
                   Filtration.from_degrees(w_degrees))

    def shifted(self, f_shift: int, w_shift: int) -> "FilteredSpace":
        return FilteredSpace(self.dim, self.F.shift(f_shift), self.W.shift(w_shift))


def ceil_q(x: Fraction) -> int:
    return math.ceil(x)


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class Failure:
    invariant: str
    chi: Fraction | None = None
    index: int | None = None
    level: int | None = None
    witness: tuple | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"invariant": self.invariant}
        if self.chi is not None:
            out["chi"] = str(self.chi)
        if self.index is not None:
            out["index"] = self.index
        if self.level is not None:
            out["level"] = self.level
        if self.witness is not None:
            out["witness"] = [str(Fraction(x)) for x in self.witness]
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    name: str
    failures: list[Failure] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, invariant, **kw):
        self.failures.append(Failure(invariant, **kw))

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok,
                "failures": [f.to_json() for f in self.failures], "info": self.info}


class MonodromicModule:
    """Finite-window monodromic module; treat instances as immutable."""

    def __init__(self, r: int, denom: int, window: tuple, spaces: Mapping,
                 zmaps: Mapping | None = None, dmaps: Mapping | None = None,
                 low_flag: bool = False, high_flag: bool = False):
        if r < 1:
            raise ModuleError("r must be at least 1")
        if denom < 1:
            raise ModuleError("denominator must be positive")
        lo, hi = Fraction(window[0]), Fraction(window[1])
        if lo > hi:
            raise ModuleError("empty window")
        if (lo * denom).denominator != 1 or (hi * denom).denominator != 1:
            raise ModuleError("window ends must lie in (1/e)Z")
        self.r, self.denom, self.window = r, denom, (lo, hi)
        self.low_flag, self.high_flag = bool(low_flag), bool(high_flag)
        self.grid = tuple(lo + Fraction(k, denom) for k in range(int((hi - lo) * denom) + 1))
        grid = set(self.grid)
        spaces = {Fraction(c): s for c, s in spaces.items()}
        for c in spaces:
            if c not in grid:
                raise ModuleError(f"eigenvalue {c} is not a window grid point")
        self.spaces = {c: spaces.get(c, FilteredSpace.zero()) for c in self.grid}
        self.zmaps, self.dmaps = {}, {}
        given_z = {(i, Fraction(c)): m for (i, c), m in (zmaps or {}).items()}
        given_d = {(i, Fraction(c)): m for (i, c), m in (dmaps or {}).items()}
        for (i, c) in list(given_z) + list(given_d):
            if not 1 <= i <= r:
                raise ModuleError(f"map index {i} out of range 1..{r}")
        for i in range(1, r + 1):
            for c in self.grid:
                if c + 1 in grid:
                    self.zmaps[i, c] = self._shaped(given_z.pop((i, c), None), c, c + 1)
                if c - 1 in grid:
                    self.dmaps[i, c] = self._shaped(given_d.pop((i, c), None), c, c - 1)
        if given_z or given_d:
            raise ModuleError("structure maps given for points whose target leaves the window")

    def _shaped(self, m, src, dst):
        rows, cols = self.dim(dst), self.dim(src)
        if m is None:
            return Matrix.zeros(rows, cols)
        if not isinstance(m, Matrix):
            try:
                m = Matrix.of(m) if m else Matrix.zeros(0, cols)
            except ValueError as exc:
                raise ModuleError(f"map {src}->{dst} is not a rectangular matrix") from exc
        if (m.rows, m.cols) != (rows, cols):
            raise ModuleError(f"map {src}->{dst} has shape {m.rows}x{m.cols}, expected {rows}x{cols}")
        return m

    # -- access --------------------------------------------------------------
    def dim(self, chi) -> int:
        s = self.spaces.get(Fraction(chi))
        return s.dim if s else 0

    def z(self, i, chi) -> Matrix | None:
        return self.zmaps.get((i, Fraction(chi)))

    def d(self, i, chi) -> Matrix | None:
        return self.dmaps.get((i, Fraction(chi)))

    def in_window(self, chi) -> bool:
        return Fraction(chi) in self.spaces

    def total_dim(self) -> int:
        return sum(s.dim for s in self.spaces.values())

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    def support(self) -> list[Fraction]:
        return [c for c in self.grid if self.dim(c)]

    def is_unipotent(self) -> bool:
        return all(c.denominator == 1 for c in self.support())

    def key(self):
        return (self.r, self.denom, self.window, self.low_flag, self.high_flag,
                tuple(sorted(self.spaces.items())),
                tuple(sorted(self.zmaps.items())), tuple(sorted(self.dmaps.items())))

    def __eq__(self, other):
        return isinstance(other, MonodromicModule) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        dims = {str(c): self.dim(c) for c in self.grid}
        return f"MonodromicModule(r={self.r}, e={self.denom}, window={self.window}, dims={dims})"

    def replace(self, spaces=None, zmaps=None, dmaps=None, window=None,
                low_flag=None, high_flag=None) -> "MonodromicModule":
        return MonodromicModule(
            self.r, self.denom, self.window if window is None else window,
            self.spaces if spaces is None else spaces,
            self.zmaps if zmaps is None else zmaps,
            self.dmaps if dmaps is None else dmaps,
            self.low_flag if low_flag is None else low_flag,
            self.high_flag if high_flag is None else high_flag)

    # -- Euler operator --------------------------------------------------------
    def nilpotent_part(self, chi) -> Matrix | None:
        """N = theta - chi + r on M^chi, or None when no neighbour is in the window."""
        chi = Fraction(chi)
        n = self.dim(chi)
        if self.in_window(chi - 1):
            theta = Matrix.zeros(n, n)
            for i in range(1, self.r + 1):
                theta = theta + self.z(i, chi - 1) @ self.d(i, chi)
            return theta - Matrix.scalar(n, chi - self.r)
        if self.in_window(chi + 1):
            dz = Matrix.zeros(n, n)
            for i in range(1, self.r + 1):
                dz = dz + self.d(i, chi + 1) @ self.z(i, chi)
            # sum z_i d_i = sum d_i z_i - r
            return dz - Matrix.scalar(n, chi)
        return None


# ---------------------------------------------------------------------------
# Validation


def _is_nilpotent(m: Matrix) -> bool:
    return m.power(m.rows).is_zero() if m.rows else True


def _check_filtered_map(rep, name, m, src: Filtration, dst: Filtration, shift, chi, i):
    """Check m(src_p) lands in dst_(p+shift) for every p."""
    for p, sub in src.jumps:
        w = maps_into(m, sub, dst.level(p + shift))
        if w is not None:
            rep.fail(name, chi=chi, index=i, level=p, witness=w)
            return


def validate(M: MonodromicModule) -> Report:
    rep = Report("validate")
    r = M.r
    for chi in M.grid:
        n = M.dim(chi)
        # commutation relations, only where composable inside the window
        if M.in_window(chi + 1) and M.in_window(chi - 1):
            for i in range(1, r + 1):
                for j in range(1, r + 1):
                    lhs = M.d(i, chi + 1) @ M.z(j, chi) - M.z(j, chi - 1) @ M.d(i, chi)
                    target = Matrix.identity(n) if i == j else Matrix.zeros(n, n)
                    diff = lhs - target
                    if not diff.is_zero():
                        rep.fail("[d_i, z_j] = delta_ij", chi=chi, index=i * 10 + j,
                                 witness=_witness_col(diff))
        if M.in_window(chi + 2):
            for i in range(1, r + 1):
                for j in range(i + 1, r + 1):
                    diff = M.z(i, chi + 1) @ M.z(j, chi) - M.z(j, chi + 1) @ M.z(i, chi)
                    if not diff.is_zero():
                        rep.fail("[z_i, z_j] = 0", chi=chi, index=i * 10 + j,
                                 witness=_witness_col(diff))
        if M.in_window(chi - 2):
            for i in range(1, r + 1):
                for j in range(i + 1, r + 1):
                    diff = M.d(i, chi - 1) @ M.d(j, chi) - M.d(j, chi - 1) @ M.d(i, chi)
                    if not diff.is_zero():
                        rep.fail("[d_i, d_j] = 0", chi=chi, index=i * 10 + j,
                                 witness=_witness_col(diff))
        # Euler operator
        N = M.nilpotent_part(chi)
        if N is None:
            if n:
                rep.fail("eigenvalue determinable", chi=chi,
                         detail="no neighbouring eigenvalue inside the window")
        else:
            if not _is_nilpotent(N):
                rep.fail("theta - chi + r nilpotent", chi=chi, witness=_witness_col(N.power(n)))
            for k, sub in M.spaces[chi].W.jumps:
                w = maps_into(N, sub, M.spaces[chi].W.level(k - 2))
                if w is not None:
                    rep.fail("N W_k in W_(k-2)", chi=chi, level=k, witness=w)
                    break
        # filtration compatibility of the structure maps
        src = M.spaces[chi]
        for i in range(1, r + 1):
            if M.in_window(chi + 1):
                dst = M.spaces[chi + 1]
                _check_filtered_map(rep, "z_i F_p in F_p", M.z(i, chi), src.F, dst.F, 0, chi, i)
                _check_filtered_map(rep, "z_i W_k in W_k", M.z(i, chi), src.W, dst.W, 0, chi, i)
            if M.in_window(chi - 1):
                dst = M.spaces[chi - 1]
                _check_filtered_map(rep, "d_i F_p in F_(p+1)", M.d(i, chi), src.F, dst.F, 1, chi, i)
                _check_filtered_map(rep, "d_i W_k in W_k", M.d(i, chi), src.W, dst.W, 0, chi, i)
    return rep


def _witness_col(m: Matrix):
    for j in range(m.cols):
        if any(m[i, j] for i in range(m.rows)):
            return tuple(Fraction(int(k == j)) for k in range(m.cols))
    return None


def require_valid(M: MonodromicModule):
    rep = validate(M)
    if not rep.ok:
        first = rep.failures[0]
        raise ModuleError(f"invalid monodromic module: {first.invariant} at chi={first.chi}")


# ---------------------------------------------------------------------------
# Elementary operations


def tate_twist(M: MonodromicModule, ell: int) -> MonodromicModule:
    """New F_p = old F_(p-ell), new W_k = old W_(k+2 ell); maps unchanged."""
    return M.replace(spaces={c: s.shifted(ell, -2 * ell) for c, s in M.spaces.items()})


def antipode(M: MonodromicModule) -> MonodromicModule:
    return M.replace(zmaps={k: -m for k, m in M.zmaps.items()},
                     dmaps={k: -m for k, m in M.dmaps.items()})


def direct_sum(A: MonodromicModule, B: MonodromicModule) -> MonodromicModule:
    if A.r != B.r:
        raise ModuleError("direct sum needs equal r")
    e = math.lcm(A.denom, B.denom)
    lo, hi = min(A.window[0], B.window[0]), max(A.window[1], B.window[1])
    probe = MonodromicModule(A.r, e, (lo, hi), {})
    spaces, zmaps, dmaps = {}, {}, {}

    def blocks(X, c):
        return X.spaces[c] if X.in_window(c) else FilteredSpace.zero()

    for c in probe.grid:
        sa, sb = blocks(A, c), blocks(B, c)
        spaces[c] = FilteredSpace(sa.dim + sb.dim, _sum_filtration(sa.F, sb.F),
                                  _sum_filtration(sa.W, sb.W))
    for (i, c) in probe.zmaps:
        zmaps[i, c] = _block_diag(_get(A, A.z, i, c, c + 1), _get(B, B.z, i, c, c + 1))
    for (i, c) in probe.dmaps:
        dmaps[i, c] = _block_diag(_get(A, A.d, i, c, c - 1), _get(B, B.d, i, c, c - 1))
    return MonodromicModule(A.r, e, (lo, hi), spaces, zmaps, dmaps,
                            A.low_flag and B.low_flag, A.high_flag and B.high_flag)


def _get(X, getter, i, src, dst):
    m = getter(i, src)
    if m is None:
        return Matrix.zeros(X.dim(dst), X.dim(src))
    return m


def _block_diag(a: Matrix, b: Matrix) -> Matrix:
    rows = [list(r) + [0] * b.cols for r in a.data] + [[0] * a.cols + list(r) for r in b.data]
    return Matrix.of(rows, cols=a.cols + b.cols) if rows else Matrix.zeros(0, a.cols + b.cols)


def _sum_filtration(f: Filtration, g: Filtration) -> Filtration:
    n, m = f.ambient, g.ambient
    levels = {}
    for p in set(f.indices) | set(g.indices):
        rows = [list(v) + [0] * m for v in f.level(p).basis]
        rows += [[0] * n + list(v) for v in g.level(p).basis]
        levels[p] = Subspace.span(rows, n + m)
    return Filtration.from_levels(n + m, levels)


def change_basis(M: MonodromicModule, g: Mapping) -> MonodromicModule:
    """Transport along invertible g[chi]: M^chi -> M^chi (missing entries mean identity)."""
    gm = {c: g.get(c) or Matrix.identity(M.dim(c)) for c in M.grid}
    gi = {c: inverse(m) if m.rows else m for c, m in gm.items()}
    spaces = {c: FilteredSpace(s.dim, s.F.transform(gm[c]), s.W.transform(gm[c]))
              for c, s in M.spaces.items()}
    zmaps = {(i, c): gm[c + 1] @ m @ gi[c] for (i, c), m in M.zmaps.items()}
    dmaps = {(i, c): gm[c - 1] @ m @ gi[c] for (i, c), m in M.dmaps.items()}
    return M.replace(spaces=spaces, zmaps=zmaps, dmaps=dmaps)


def weight_truncation(M: MonodromicModule, k: int):
    """The submodule W_k M with its inclusion maps into M, per eigenvalue."""
    subs = {c: s.W.level(k) for c, s in M.spaces.items()}
    spaces = {c: FilteredSpace(subs[c].dim, induced_on_sub(M.spaces[c].F, subs[c]),
                               induced_on_sub(M.spaces[c].W, subs[c]))
              for c in M.grid}
    zmaps = {(i, c): restrict_map(m, subs[c], subs[c + 1]) for (i, c), m in M.zmaps.items()}
    dmaps = {(i, c): restrict_map(m, subs[c], subs[c - 1]) for (i, c), m in M.dmaps.items()}
    sub = M.replace(spaces=spaces, zmaps=zmaps, dmaps=dmaps)
    return sub, {c: subs[c].basis_matrix() for c in M.grid}


# ---------------------------------------------------------------------------
# Fourier-Laplace transform


def _fl_bare(M: MonodromicModule) -> MonodromicModule:
    """FL on spaces, maps and Hodge filtration; the weight filtration is copied."""
    r = M.r
    lo, hi = M.window
    spaces, zmaps, dmaps = {}, {}, {}
    for chi, s in M.spaces.items():
        spaces[r - chi] = FilteredSpace(s.dim, s.F.shift(ceil_q(chi)), s.W)
    # y_i on FL^(r-chi) is -d_i: M^chi -> M^(chi-1) = FL^(r-chi+1)
    for (i, chi), m in M.dmaps.items():
        zmaps[i, r - chi] = -m
    # d(y_i) on FL^(r-chi) is z_i: M^chi -> M^(chi+1) = FL^(r-chi-1)
    for (i, chi), m in M.zmaps.items():
        dmaps[i, r - chi] = m
    return MonodromicModule(r, M.denom, (r - hi, r - lo), spaces, zmaps, dmaps,
                            low_flag=M.high_flag, high_flag=M.low_flag)


def fl(M: MonodromicModule, check: bool = True) -> MonodromicModule:
    """Fourier-Laplace transform.

    FL^(chi') = M^(r - chi'); the weight level W_k FL^(chi') is the image of the
    transformed truncation FL(W_(k + r + ceil(lambda)) M) with lambda the
    fractional part of chi'.
    """
    if check:
        require_valid(M)
    bare = _fl_bare(M)
    r = M.r
    ks = sorted({k for s in M.spaces.values() for k in s.W.indices})
    levels = {c: {} for c in bare.grid}
    if ks:
        for k in range(ks[0] - 1, ks[-1] + 1):
            sub, incl = weight_truncation(M, k)
            tsub = _fl_bare(sub)
            for cp in bare.grid:
                c_lambda = ceil_q(frac_part(cp))
                # this truncation supplies level k - r - ceil(lambda) on FL^(cp)
                src = r - cp
                piece = image(incl[src], Subspace.full(tsub.dim(cp)))
                levels[cp][k - r - c_lambda] = piece
    spaces = {}
    for cp, s in bare.spaces.items():
        W = Filtration.from_levels(s.dim, levels[cp]) if s.dim else Filtration(0, ())
        spaces[cp] = FilteredSpace(s.dim, s.F, W)
    return bare.replace(spaces=spaces)


# ---------------------------------------------------------------------------
# Intertwiners and Fourier inversion


def find_scalar_intertwiner(A: MonodromicModule, B: MonodromicModule):
    """Scalars c_chi with c_(chi+-1) A-maps = B-maps c_chi and equal filtrations.

    Returns (dict chi -> Fraction, list of mismatch strings).  The scalars are
    propagated along each residue chain starting from 1.
    """
    problems = []
    if (A.r, A.denom, A.window) != (B.r, B.denom, B.window):
        return None, ["shape mismatch (r, denominator or window)"]
    for c in A.grid:
        if A.dim(c) != B.dim(c):
            problems.append(f"dimension mismatch at {c}")
    if problems:
        return None, problems
    scal: dict[Fraction, Fraction] = {}
    edges = [(c, c + 1, A.z(i, c), B.z(i, c)) for (i, c) in A.zmaps]
    edges += [(c, c - 1, A.d(i, c), B.d(i, c)) for (i, c) in A.dmaps]
    for start in A.grid:
        if start in scal:
            continue
        scal[start] = Fraction(1)
        changed = True
        while changed:
            changed = False
            for src, dst, ma, mb in edges:
                for a, b in ((src, dst), (dst, src)):
                    if a in scal and b not in scal:
                        ratio = _ratio(ma, mb)
                        if ratio is None:
                            continue
                        # c_dst * ma = mb * c_src
                        scal[b] = scal[a] * ratio if a == src else scal[a] / ratio
                        changed = True
    for src, dst, ma, mb in edges:
        if ma.scale(scal[dst]) != mb.scale(scal[src]):
            problems.append(f"structure map {src}->{dst} not intertwined")
    for c in A.grid:
        if A.spaces[c] != B.spaces[c]:
            problems.append(f"filtrations differ at {c}")
    return scal, problems


def _ratio(ma: Matrix, mb: Matrix):
    """Nonzero t with t*ma = mb, if ma is nonzero and such t exists."""
    for i in range(ma.rows):
        for j in range(ma.cols):
            if ma[i, j]:
                t = mb[i, j] / ma[i, j]
                return t if t else None
    return None


def fourier_inversion_check(M: MonodromicModule) -> Report:
    if not M.is_unipotent():
        raise ModuleError("inversion formula stated for unipotent part only")
    rep = Report("fourier_inversion")
    lhs = fl(fl(M))
    rhs = antipode(tate_twist(M, M.r))
    scal, problems = find_scalar_intertwiner(lhs, rhs)
    for p in problems:
        rep.fail("FL FL M = a(M)(r)", detail=p)
    for c in M.grid:
        for name in ("F", "W"):
            a = getattr(lhs.spaces[c], name).graded_dims()
            b = getattr(rhs.spaces[c], name).graded_dims()
            if a != b:
                rep.fail(f"{name} jump multiset", chi=c)
    if scal is not None:
        rep.info["intertwiner"] = {str(c): str(s) for c, s in sorted(scal.items())}
        rep.info["intertwiner_is_identity"] = all(s == 1 for s in scal.values())
    return rep


# ---------------------------------------------------------------------------
# Operators and the V-filtration


def total_offsets(M: MonodromicModule) -> dict:
    off, pos = {}, 0
    for c in M.grid:
        off[c] = pos
        pos += M.dim(c)
    return off


def operator_matrix(M: MonodromicModule, e: WeylElement) -> Matrix:
    """Window-local action of a z-group Weyl element on the total space.

    Components carried outside the window are dropped.
    """
    if e.groups() - {"z"}:
        raise ModuleError("only z-group operators act on monodromic data")
    off = total_offsets(M)
    n = M.total_dim()
    cols = []
    for c in M.grid:
        for j in range(M.dim(c)):
            vec = {c: tuple(Fraction(int(k == j)) for k in range(M.dim(c)))}
            out = [Fraction(0)] * n
            for mono, coeff in e.terms.items():
                part = dict(vec)
                steps = []
                for g, i, a, b in mono:
                    steps += [("d", i)] * b
                for g, i, a, b in mono:
                    steps += [("z", i)] * a
                for kind, i in steps:
                    nxt = {}
                    for chi, v in part.items():
                        tgt = chi + 1 if kind == "z" else chi - 1
                        m = M.z(i, chi) if kind == "z" else M.d(i, chi)
                        if m is not None:
                            nxt[tgt] = m.apply(v)
                    part = nxt
                for chi, v in part.items():
                    for k, x in enumerate(v):
                        out[off[chi] + k] += coeff * x
            cols.append(out)
    return Matrix(len(cols), n, tuple(tuple(c) for c in cols)).T if cols else Matrix.zeros(n, 0)


@dataclass(frozen=True)
class VFiltration:
    """Decreasing Q-indexed filtration V^chi = sum of M^lambda, lambda >= chi, on the window."""
    total_dim: int
    levels: tuple  # (chi, Subspace) in increasing chi

    def level(self, chi) -> Subspace:
        chi = Fraction(chi)
        for c, s in self.levels:
            if c >= chi:
                return s
        return Subspace.zero(self.total_dim)


def v_filtration(M: MonodromicModule) -> tuple[VFiltration, Report]:
    rep = Report("v_filtration")
    off = total_offsets(M)
    n = M.total_dim()
    levels = []
    for c in M.grid:
        idx = [off[l] + k for l in M.grid if l >= c for k in range(M.dim(l))]
        levels.append((c, Subspace.coordinate(n, idx)))
    V = VFiltration(n, tuple(levels))
    # compatibility: generators of V^k D shift V^chi into V^(chi+k)
    gens = []
    for i in range(1, M.r + 1):
        gens.append(WeylElement.pos("z", i))
        gens.append(WeylElement.der("z", i))
        for j in range(1, M.r + 1):
            gens.append(WeylElement.pos("z", i) * WeylElement.der("z", j))
    for g in gens:
        k = v_degree(g, "z")[0]
        op = operator_matrix(M, g)
        for c, sub in levels:
            w = maps_into(op, sub, V.level(c + k))
            if w is not None:
                rep.fail("V^k D V^chi in V^(chi+k)", chi=c, level=k, witness=w,
                         detail=str(g))
    # finiteness: each graded piece is finite dimensional, and gr_V^chi = M^chi
    for c, sub in levels:
        nxt = V.level(c + Fraction(1, M.denom))
        if sub.dim - nxt.dim != M.dim(c):
            rep.fail("gr_V^chi = M^chi", chi=c)
    # nilpotency: s + chi nilpotent on gr_V^chi, with s = -sum d_i z_i
    for c in M.grid:
        N = M.nilpotent_part(c)
        if N is None:
            if M.dim(c):
                rep.fail("s + chi nilpotent", chi=c, detail="not determinable inside the window")
            continue
        if not _is_nilpotent(-N):
            rep.fail("s + chi nilpotent", chi=c)
    rep.info["high_flag"] = M.high_flag
    rep.info["dims"] = {str(c): M.dim(c) for c in M.grid}
    return V, rep


# ---------------------------------------------------------------------------
# Restriction complexes (r = 1)


@dataclass(frozen=True)
class FilteredTwoTermComplex:
    """source --d--> target in cohomological degrees (degree0_offset, degree0_offset+1)."""
    degree0_offset: int
    source: FilteredSpace
    target: FilteredSpace
    d: Matrix
    twist: int = 0

    def __post_init__(self):
        if (self.d.rows, self.d.cols) != (self.target.dim, self.source.dim):
            raise ModuleError("differential shape does not match the terms")

    def cohomology_dims(self) -> dict[int, int]:
        rk = len(image(self.d, Subspace.full(self.source.dim)).basis) if self.source.dim else 0
        return {self.degree0_offset: self.source.dim - rk,
                self.degree0_offset + 1: self.target.dim - rk}

    def tate(self, ell: int) -> "FilteredTwoTermComplex":
        return FilteredTwoTermComplex(self.degree0_offset, self.source.shifted(ell, -2 * ell),
                                      self.target.shifted(ell, -2 * ell), self.d, self.twist + ell)

    def shift(self, n: int) -> "FilteredTwoTermComplex":
        """C[n]: the term in degree q moves to degree q - n; differentials unchanged."""
        return FilteredTwoTermComplex(self.degree0_offset - n, self.source, self.target,
                                      self.d, self.twist)

    def is_filtered(self) -> bool:
        """Whether d maps each Hodge level of the source into the same level of the target."""
        for p, sub in self.source.F.jumps:
            if maps_into(self.d, sub, self.target.F.level(p)) is not None:
                return False
        return True


def _need_r1(M):
    if M.r != 1:
        raise ModuleError("restriction complexes are supported for r = 1 only")


def _space_or_zero(M, chi):
    return M.spaces[Fraction(chi)] if M.in_window(chi) else FilteredSpace.zero()


def restrict_shriek(M: MonodromicModule) -> FilteredTwoTermComplex:
    """[M^0 --z--> M^1] in degrees 0, 1; F_p = [F_(p+1) M^0 -> F_(p+1) M^1],
    W_k = [W_k M^0 -> W_(k-1) M^1]."""
    _need_r1(M)
    s0, s1 = _space_or_zero(M, 0), _space_or_zero(M, 1)
    d = M.z(1, 0)
    if d is None:
        d = Matrix.zeros(s1.dim, s0.dim)
    return FilteredTwoTermComplex(0, s0.shifted(-1, 0), s1.shifted(-1, 1), d)


def restrict_star(M: MonodromicModule) -> FilteredTwoTermComplex:
    """[M^1 --d--> M^0] in degrees -1, 0; F_p = [F_p M^1 -> F_(p+1) M^0],
    W_k = [W_(k+1) M^1 -> W_k M^0]."""
    _need_r1(M)
    s0, s1 = _space_or_zero(M, 0), _space_or_zero(M, 1)
    d = M.d(1, 1)
    if d is None:
        d = Matrix.zeros(s0.dim, s1.dim)
    return FilteredTwoTermComplex(-1, s1.shifted(0, -1), s0.shifted(-1, 0), d)


def compare_complexes(a: FilteredTwoTermComplex, b: FilteredTwoTermComplex,
                      target_sign: int = 1) -> list[str]:
    """Differences between a and b, identifying b's target through target_sign."""
    out = []
    if a.degree0_offset != b.degree0_offset:
        out.append(f"degrees differ: {a.degree0_offset} vs {b.degree0_offset}")
    if a.source != b.source:
        out.append("source filtrations differ")
    if a.target != b.target:
        out.append("target filtrations differ")
    if a.source.dim == b.source.dim and a.target.dim == b.target.dim:
        if a.d != b.d.scale(target_sign):
            out.append("differentials differ")
    else:
        out.append("term dimensions differ")
    return out


def check_fl_restriction(M: MonodromicModule) -> Report:
    _need_r1(M)
    rep = Report("fl_restriction")
    F = fl(M)
    lhs1 = restrict_star(F)
    rhs1 = restrict_shriek(M).tate(1).shift(1)
    for p in compare_complexes(lhs1, rhs1):
        rep.fail("restrict_star FL = restrict_shriek (1)[1]", detail=p)
    lhs2 = restrict_shriek(F)
    rhs2 = restrict_star(M).shift(-1)
    # the differential of the left side is y = -d_z, so the target is identified by -1
    for p in compare_complexes(lhs2, rhs2, target_sign=-1):
        rep.fail("restrict_shriek FL = restrict_star [-1]", detail=p)
    rep.info["first"] = {"cohomology": {str(k): v for k, v in lhs1.cohomology_dims().items()}}
    rep.info["second"] = {"cohomology": {str(k): v for k, v in lhs2.cohomology_dims().items()},
                          "target_identification": -1}
    return rep


# ---------------------------------------------------------------------------
# Models


def cz_model() -> MonodromicModule:
    """Polynomials in one variable: z^k spans M^(k+1), window [1, 3]."""
    spaces = {c: FilteredSpace.from_degrees([0], [1]) for c in (1, 2, 3)}
    zmaps = {(1, 1): [[1]], (1, 2): [[1]]}
    dmaps = {(1, 2): [[1]], (1, 3): [[2]]}
    return MonodromicModule(1, 1, (1, 3), spaces, zmaps, dmaps, low_flag=False, high_flag=True)


def delta_model() -> MonodromicModule:
    """Delta at the origin: d^j delta spans M^(-j), window [-2, 0]."""
    spaces = {-j: FilteredSpace.from_degrees([j + 1], [0]) for j in (0, 1, 2)}
    dmaps = {(1, 0): [[1]], (1, -1): [[1]]}
    zmaps = {(1, -2): [[-2]], (1, -1): [[-1]]}
    return MonodromicModule(1, 1, (-2, 0), spaces, zmaps, dmaps, low_flag=True, high_flag=False)


def zero_module(r: int = 1, window=(0, 1)) -> MonodromicModule:
    return MonodromicModule(r, 1, window, {})


def broken_model() -> MonodromicModule:
    """The polynomial model with the Hodge jump of M^2 raised, so z breaks F."""
    M = cz_model()
    spaces = dict(M.spaces)
    spaces[Fraction(2)] = FilteredSpace.from_degrees([1], [1])
    return M.replace(spaces=spaces)


MODELS: dict[str, Callable[[], MonodromicModule]] = {
    "cz": cz_model, "delta": delta_model, "zero": zero_module, "broken": broken_model,
}


def eigenvalue_dims(M: MonodromicModule) -> dict:
    return {c: M.dim(c) for c in M.grid}


def structure_maps(M: MonodromicModule) -> Iterable:
    yield from (("z", i, c, m) for (i, c), m in sorted(M.zmaps.items()))
    yield from (("d", i, c, m) for (i, c), m in sorted(M.dmaps.items()))
