"""Standalone combinatorial search utilities: monotone subsequences,
interval-separating subsets, layer-sorted grid subsets, monochromatic
subsets of a given colouring and near-disjoint packings."""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence, Union

from .errors import CapExceeded, InvalidQuery
from .ordering import Ordering

FISGRA_MAX_N = 8
FISGRA_MAX_D = 3
FISGRA_MAX_K = 3


def _longest_increasing(seq: Sequence[int]) -> list[int]:
    """Longest strictly increasing subsequence by patience sorting."""
    tops: list[int] = []
    top_idx: list[int] = []
    prev = [-1] * len(seq)
    for i, x in enumerate(seq):
        j = bisect_left(tops, x)
        if j == len(tops):
            tops.append(x)
            top_idx.append(i)
        else:
            tops[j] = x
            top_idx[j] = i
        prev[i] = top_idx[j - 1] if j else -1
    out = []
    i = top_idx[-1] if top_idx else -1
    while i != -1:
        out.append(seq[i])
        i = prev[i]
    return out[::-1]


def monotone_subsequence(seq: Sequence[int], t: int) -> Optional[list[int]]:
    """An increasing, else a decreasing, subsequence of length ``t``."""
    if t < 1:
        raise InvalidQuery("t must be at least 1")
    if len(set(seq)) != len(seq):
        raise InvalidQuery("sequence entries must be distinct")
    inc = _longest_increasing(seq)
    if len(inc) >= t:
        return inc[:t]
    dec = [-x for x in _longest_increasing([-x for x in seq])]
    if len(dec) >= t:
        return dec[:t]
    return None


def imo_split(sets: Sequence[Iterable[Hashable]], order: Optional[Ordering] = None) -> list[frozenset]:
    """Subsets ``B_i`` of the disjoint sets ``A_i`` with ``|B_i| >= |A_i|/k``
    such that no element of one ``B_j`` lies between two of another ``B_i``.

    Greedy: sweep a prefix ``C`` of the order until some set has
    ``|A_i & C| * k >= |A_i|`` (lowest index first), take ``B_i = A_i & C``,
    drop ``C`` and repeat on the remaining sets with ``k - 1``.  Empty sets
    get empty ``B_i`` and do not count towards ``k``.
    """
    A = [frozenset(s) for s in sets]
    union: set = set()
    for s in A:
        if union & s:
            raise InvalidQuery("input sets are not disjoint")
        union |= s
    if order is None:
        order = Ordering(sorted(union))
    elif set(order) != union:
        raise InvalidQuery("ordering must cover exactly the union of the sets")
    owner = {v: i for i, s in enumerate(A) for v in s}
    B: list[frozenset] = [frozenset()] * len(A)
    remaining = {i: set(s) for i, s in enumerate(A) if s}
    seq = list(order)
    pos = 0
    while remaining:
        k = len(remaining)
        size = {i: len(s) for i, s in remaining.items()}
        hit = {i: 0 for i in remaining}
        taken: list = []
        done = None
        while done is None:
            v = seq[pos]
            pos += 1
            i = owner[v]
            if i not in remaining:
                continue
            taken.append(v)
            hit[i] += 1
            # only the set owning v can newly cross its threshold
            if hit[i] * k >= size[i]:
                done = i
        B[done] = frozenset(v for v in taken if owner[v] == done)
        del remaining[done]
        for v in taken:
            j = owner[v]
            if j in remaining:
                remaining[j].discard(v)
        for j in [j for j, s in remaining.items() if not s]:
            del remaining[j]
    return B


@dataclass(frozen=True)
class LayerSortWitness:
    axis: int              # 0-based coordinate index
    direction: str         # "ascending" | "descending"


def sorted_by_layers_check(sets: Sequence[Iterable[int]], order) -> Optional[LayerSortWitness]:
    """Witness that ``order`` (a listing of the points of ``S_1 x ... x S_d``
    from least to greatest) is sorted or inversely sorted by one axis."""
    seq = [tuple(p) for p in list(order)]
    sets = [sorted(set(s)) for s in sets]
    if set(seq) != set(product(*sets)) or len(seq) != len(set(seq)):
        raise InvalidQuery("ordering must list every point of the product exactly once")
    for axis in range(len(sets)):
        col = [p[axis] for p in seq]
        if all(a <= b for a, b in zip(col, col[1:])):
            return LayerSortWitness(axis, "ascending")
        if all(a >= b for a, b in zip(col, col[1:])):
            return LayerSortWitness(axis, "descending")
    return None


def _block_chain(spans: list[Optional[tuple[int, int]]], k: int, ascending: bool) -> Optional[list[int]]:
    """``k`` values ``v1 < ... < vk`` whose position spans are pairwise
    disjoint and appear in increasing (or decreasing) value order."""
    vals = [v for v, s in enumerate(spans) if s is not None]
    best: dict[int, list[int]] = {}
    for w in vals:
        chain = [w]
        for v in vals:
            if v >= w:
                break
            a, b = spans[v], spans[w]
            # disjoint spans in the right order; this relation is transitive
            if ((a[1] < b[0]) if ascending else (b[1] < a[0])) and len(best[v]) + 1 > len(chain):
                chain = best[v] + [w]
        best[w] = chain
        if len(chain) >= k:
            return chain[-k:]
    return None


def fisgra_search(order, N: int, d: int, k: int) -> Optional[tuple[tuple[tuple[int, ...], ...], LayerSortWitness]]:
    """Coordinate sets of size ``k`` whose product is sorted by layers under
    ``order`` (a listing of ``{0..N-1}^d``)."""
    if N > FISGRA_MAX_N or d > FISGRA_MAX_D or k > FISGRA_MAX_K:
        raise CapExceeded(f"search limited to N <= {FISGRA_MAX_N}, d <= {FISGRA_MAX_D}, k <= {FISGRA_MAX_K}")
    seq = [tuple(p) for p in list(order)]
    if set(seq) != set(product(range(N), repeat=d)) or len(seq) != N ** d:
        raise InvalidQuery("ordering must list every point of {0..N-1}^d exactly once")
    if k > N:
        return None
    pos = {p: i for i, p in enumerate(seq)}
    for axis in range(d):
        others = [a for a in range(d) if a != axis]
        for direction in ("ascending", "descending"):
            for choice in product(*(list(combinations(range(N), k)) for _ in others)):
                spans: list[Optional[tuple[int, int]]] = []
                for v in range(N):
                    ps = []
                    for rest in product(*choice):
                        pt = [0] * d
                        pt[axis] = v
                        for a, c in zip(others, rest):
                            pt[a] = c
                        ps.append(pos[tuple(pt)])
                    spans.append((min(ps), max(ps)))
                chain = _block_chain(spans, k, direction == "ascending")
                if chain is not None:
                    sets = [None] * d
                    sets[axis] = tuple(chain)
                    for a, c in zip(others, choice):
                        sets[a] = tuple(c)
                    return tuple(sets), LayerSortWitness(axis, direction)
    return None


def restrict_order(order, sets: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """The points of ``S_1 x ... x S_d`` in the order they appear in ``order``."""
    allowed = [set(s) for s in sets]
    return [tuple(p) for p in list(order) if all(c in a for c, a in zip(p, allowed))]


Coloring = Union[Mapping[tuple, Hashable], Callable[[tuple], Hashable]]


def monochromatic_subset(coloring: Coloring, n: int, r: int, m: int) -> Optional[tuple[int, ...]]:
    """Lexicographically first ``m``-subset of ``range(n)`` whose
    ``r``-subsets all receive one colour."""
    if m > n:
        return None
    if m < r:
        return tuple(range(m))
    color = coloring.__getitem__ if isinstance(coloring, Mapping) else coloring
    chosen: list[int] = []
    target = [None]

    def rec(start: int) -> bool:
        if len(chosen) == m:
            return True
        for v in range(start, n - (m - len(chosen)) + 1):
            new = [color(rest + (v,)) for rest in combinations(chosen, r - 1)]
            fixed_here = target[0] is None and bool(new)
            want = new[0] if fixed_here else target[0]
            if all(c == want for c in new):
                if fixed_here:
                    target[0] = want
                chosen.append(v)
                if rec(v + 1):
                    return True
                chosen.pop()
                if fixed_here:
                    target[0] = None
        return False

    return tuple(chosen) if rec(0) else None


@dataclass
class PackingResult:
    family: list
    target: int
    restarts: int

    @property
    def size(self) -> int:
        return len(self.family)

    @property
    def reached(self) -> bool:
        return self.size >= self.target


ENUMERATE_LIMIT = 200_000


def linear_packing(S: Iterable[int], r: int, seed: int, restarts: int = 20) -> PackingResult:
    """Randomised greedy family of ``r``-subsets of ``S`` meeting pairwise in
    at most one vertex; the best of ``restarts`` runs is kept.  The target
    is ``floor(|S|^2 / (2 r^2))``."""
    S = sorted(set(S))
    if r < 2 or len(S) < r:
        raise InvalidQuery("need |S| >= r >= 2")
    target = len(S) ** 2 // (2 * r * r)
    rng = random.Random(seed)
    total = math.comb(len(S), r)
    best: list = []
    for _ in range(max(1, restarts)):
        used: set = set()
        fam = []
        if total <= ENUMERATE_LIMIT:
            cands: Iterable = list(combinations(S, r))
            rng.shuffle(cands)
        else:
            cands = (tuple(sorted(rng.sample(S, r))) for _ in range(50 * max(target, 1)))
        for e in cands:
            pairs = list(combinations(e, 2))
            if any(p in used for p in pairs):
                continue
            used.update(pairs)
            fam.append(e)
        if len(fam) > len(best):
            best = fam
    return PackingResult(sorted(best), target, restarts)
