"""Relative monodromy filtration of a nilpotent endomorphism.

Given a nilpotent N on V and an N-stable increasing filtration L, the relative
monodromy filtration is the unique increasing W with

* N W_k contained in W_(k-2), and
* N^l : gr^W_(i+l) gr^L_i -> gr^W_(i-l) gr^L_i an isomorphism for all i, l >= 0,

when it exists.  The construction recurses on the length of L: with b the top
index of L and U = L_(b-1), the filtration W' on U is built first, then each
primitive string of N on V/U of length l+1 is lifted through vectors w with
N^(l+1) w in W'_(b-l-2).  The result is then checked against both properties.
"""
from __future__ import annotations

from dataclasses import dataclass

from .linalg import (
    Filtration, Matrix, Subspace, image, intersect, preimage, sum_,
)


class RMFError(ValueError):
    pass


@dataclass
class RMFResult:
    filtration: Filtration | None
    certificate: str = ""

    @property
    def exists(self) -> bool:
        return self.filtration is not None


def _powers(N: Matrix, n: int) -> list[Matrix]:
    out = [Matrix.identity(n)]
    for _ in range(n + 1):
        out.append(out[-1] @ N)
    return out


def _monodromy_lifted(P, U: Subspace, V: Subspace, n: int, b: int, lo: int, hi: int) -> dict:
    """Monodromy filtration of N on V/U centred at b, as subspaces of V containing U.

    M_(b+k) = sum over j >= 0 of ker N^(k+j+1) cap im N^j, computed modulo U.
    """
    kers = [intersect(preimage(P[m], U), V) for m in range(len(P))]
    ims = [sum_(image(P[m], V), U) for m in range(len(P))]
    out = {}
    for K in range(lo, hi + 1):
        k = K - b
        acc = U
        for j in range(0, n + 1):
            m = k + j + 1
            if m < 0:
                continue
            if m >= len(P):
                m = len(P) - 1
            acc = sum_(acc, intersect(kers[m], ims[j]))
        out[K] = acc
    return out


def _build(N: Matrix, P, chain: list[tuple[int, Subspace]], n: int, lo: int, hi: int):
    """Recursive construction; chain lists the jumps of the recentred L."""
    zero = Subspace.zero(n)
    if not chain:
        return {k: zero for k in range(lo, hi + 1)}, ""
    b, V = chain[-1]
    U = chain[-2][1] if len(chain) > 1 else zero
    inner, cert = _build(N, P, chain[:-1], n, lo, hi)
    if cert:
        return None, cert
    Wp = lambda k: inner[k] if lo <= k <= hi else (zero if k < lo else U)
    M = _monodromy_lifted(P, U, V, n, b, lo, hi)
    Mq = lambda k: M[k] if lo <= k <= hi else (U if k < lo else V)
    # lifts of strings of each length l + 1
    G = {}
    for l in range(0, n + 1):
        top = intersect(Mq(b + l), preimage(P[l + 1], U))
        good = intersect(top, preimage(P[l + 1], Wp(b - l - 2)))
        if sum_(good, U).dim != sum_(top, U).dim:
            return None, (f"no lift of a primitive vector of weight {b + l} on gr^L_{b} "
                          f"with N^{l + 1} landing in the weight {b - l - 2} part")
        G[l] = good
    W = {}
    for k in range(lo, hi + 1):
        acc = Wp(k)
        for l, g in G.items():
            for j in range(0, l + 1):
                if b + l - 2 * j <= k:
                    acc = sum_(acc, image(P[j], g))
        W[k] = intersect(acc, V)
    # the new filtration must restrict to W' on U and induce M on V/U
    for k in range(lo, hi + 1):
        if intersect(W[k], U) != Wp(k) or sum_(W[k], U) != Mq(k):
            return None, f"candidate filtration fails to extend the lower pieces at index {k}"
    return W, ""


def relative_monodromy_filtration(N, L: Filtration, center: int = 0) -> RMFResult:
    """RMF of N relative to L recentred by ``center`` (uses L'_k = L_(k+center))."""
    N = N if isinstance(N, Matrix) else Matrix.of(N)
    n = L.ambient
    if (N.rows, N.cols) != (n, n):
        raise RMFError("N must be square of the filtration's dimension")
    P = _powers(N, n)
    if not P[n].is_zero():
        raise RMFError("N is not nilpotent")
    for idx, sub in L.jumps:
        if not image(N, sub) <= sub:
            raise RMFError(f"N does not preserve L at index {idx}")
    if n == 0:
        return RMFResult(Filtration(0, ()))
    Lc = L.shift(-center)
    chain = list(Lc.jumps)
    lo = chain[0][0] - n - 2
    hi = chain[-1][0] + n + 2
    W, cert = _build(N, P, chain, n, lo, hi)
    if W is None:
        return RMFResult(None, cert)
    filt = Filtration.from_levels(n, W)
    problems = check_rmf(N, Lc, filt)
    if problems:
        return RMFResult(None, "; ".join(problems))
    return RMFResult(filt)


rmf = relative_monodromy_filtration


def graded_piece(W: Filtration, L: Filtration, m: int, i: int):
    """(numerator, denominator) subspaces for gr^W_m gr^L_i."""
    num = intersect(W.level(m), L.level(i))
    den = sum_(intersect(W.level(m - 1), L.level(i)), intersect(W.level(m), L.level(i - 1)))
    return num, den


def check_rmf(N: Matrix, L: Filtration, W: Filtration) -> list[str]:
    """Both characterizing properties, checked verbatim.  Empty list means pass."""
    n = L.ambient
    out = []
    idx = set(W.indices) | set(L.indices)
    lo, hi = min(idx) - n - 2, max(idx) + n + 2
    for k in range(lo, hi + 1):
        if not image(N, W.level(k)) <= W.level(k - 2):
            out.append(f"N W_{k} not in W_{k - 2}")
    P = _powers(N, n)
    for i in sorted(set(L.indices)):
        for l in range(0, hi - lo + 1):
            s_num, s_den = graded_piece(W, L, i + l, i)
            t_num, t_den = graded_piece(W, L, i - l, i)
            A = P[min(l, len(P) - 1)]
            if s_num.dim - s_den.dim == 0 and t_num.dim - t_den.dim == 0:
                continue
            well_defined = image(A, s_num) <= t_num and image(A, s_den) <= t_den
            injective = intersect(preimage(A, t_den), s_num) == s_den
            surjective = sum_(image(A, s_num), t_den) == t_num
            if not (well_defined and injective and surjective):
                out.append(f"N^{l}: gr^W_{i + l} gr^L_{i} -> gr^W_{i - l} gr^L_{i} not an isomorphism")
    return out
