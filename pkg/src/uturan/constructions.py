"""Explicit hypergraph constructions.

* random linear hypergraphs: ``G(n, p)`` with ``p = n^(-r+3/2)`` minus every
  edge that meets another edge in two or more vertices;
* the head/tail split of a linear ``(2r-2)``-graph into twin pairs;
* the grid split, where each edge becomes a twin pair only if one labelling
  realises a prescribed descriptive sequence along every coordinate axis.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .descriptive import DescriptiveSequence
from .errors import InvalidQuery, StructureError
from .hypergraph import Edge, RGraph, is_linear
from .ordering import Ordering

DIRECT_SAMPLING_LIMIT = 1_000_000


@dataclass
class LinearCandidateReport:
    graph: RGraph
    removed_count: int
    p: float
    seed: int
    sampled_edges: int


def edge_probability(n: int, r: int) -> float:
    return float(n) ** (-r + 1.5)


def _sample_gnp(n: int, r: int, p: float, rng: np.random.Generator) -> list[Edge]:
    total = math.comb(n, r)
    if total <= DIRECT_SAMPLING_LIMIT:
        hits = np.flatnonzero(rng.random(total) < p)
        if not hits.size:
            return []
        wanted = set(hits.tolist())
        return [c for i, c in enumerate(combinations(range(n), r)) if i in wanted]
    # Binomial edge count, then a uniform set of that many distinct r-subsets.
    m = int(rng.binomial(total, p))
    chosen: set[Edge] = set()
    while len(chosen) < m:
        batch = np.sort(rng.integers(0, n, size=(2 * (m - len(chosen)) + 16, r)), axis=1)
        ok = np.all(batch[:, 1:] != batch[:, :-1], axis=1)
        for row in batch[ok]:
            chosen.add(tuple(int(v) for v in row))
            if len(chosen) == m:
                break
    return sorted(chosen)


def random_linear_candidate(n: int, r: int, seed: int) -> LinearCandidateReport:
    """Sample ``G^(r)(n, p)`` and delete the set ``T`` of edges sharing two
    or more vertices with some other edge."""
    if not n >= r >= 3:
        raise InvalidQuery("need n >= r >= 3")
    rng = np.random.default_rng(seed)
    p = edge_probability(n, r)
    edges = _sample_gnp(n, r, p, rng)
    by_pair: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, e in enumerate(edges):
        for pr in combinations(e, 2):
            by_pair[pr].append(idx)
    bad = set()
    for idxs in by_pair.values():
        if len(idxs) > 1:
            bad.update(idxs)
    kept = [e for i, e in enumerate(edges) if i not in bad]
    return LinearCandidateReport(RGraph(r, n, kept), len(bad), p, seed, len(edges))


@dataclass
class NowhereEmptyReport:
    failures: int
    examined: int
    exhaustive: bool
    set_size: int
    examples: list = field(default_factory=list)


def _families(n: int, r: int, s: int):
    """Unordered families of r disjoint s-subsets of range(n), listed with
    increasing minima."""

    def rec(avail: tuple, lo: int, k: int):
        if k == 0:
            yield ()
            return
        for first in avail:
            if first < lo:
                continue
            rest = [v for v in avail if v > first]
            for tail in combinations(rest, s - 1):
                S = (first,) + tail
                left = tuple(v for v in avail if v not in S)
                for more in rec(left, first + 1, k - 1):
                    yield (S,) + more

    yield from rec(tuple(range(n)), 0, r)


def _transversal_hit(E: np.ndarray, labels: np.ndarray, r: int) -> bool:
    if not len(E):
        return False
    lab = np.sort(labels[E], axis=1)
    return bool(np.any(np.all(lab == np.arange(r), axis=1)))


def verify_nowhere_empty(H: RGraph, c, trials: int, seed: int,
                         exhaustive_limit: int = 12, keep_examples: int = 5) -> NowhereEmptyReport:
    """Count families of ``r`` disjoint ``ceil(c*n)``-sets with no edge
    meeting all of them.  Exhaustive when ``n <= exhaustive_limit``."""
    c = Fraction(c)
    n, r = H.n, H.r
    s = math.ceil(c * n)
    if not 0 < c <= Fraction(1, r):
        raise InvalidQuery(f"c must lie in (0, 1/{r}]")
    if s < 1 or r * s > n:
        raise InvalidQuery(f"{r} disjoint sets of size {s} do not fit in {n} vertices")
    E = H.as_array()
    failures = examined = 0
    examples = []
    labels = np.full(n, -1, dtype=np.int64)
    if n <= exhaustive_limit:
        for fam in _families(n, r, s):
            labels[:] = -1
            for i, S in enumerate(fam):
                labels[list(S)] = i
            examined += 1
            if not _transversal_hit(E, labels, r):
                failures += 1
                if len(examples) < keep_examples:
                    examples.append(fam)
        return NowhereEmptyReport(failures, examined, True, s, examples)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        perm = rng.permutation(n)[: r * s]
        labels[:] = -1
        labels[perm] = np.repeat(np.arange(r), s)
        examined += 1
        if not _transversal_hit(E, labels, r):
            failures += 1
            if len(examples) < keep_examples:
                examples.append(tuple(tuple(sorted(perm[i * s:(i + 1) * s].tolist())) for i in range(r)))
    return NowhereEmptyReport(failures, examined, False, s, examples)


def _require_linear_even(Hprime: RGraph) -> int:
    u = Hprime.r
    if u < 4 or u % 2:
        raise InvalidQuery(f"input uniformity must be even and >= 4, got {u}")
    if not is_linear(Hprime):
        raise StructureError("input hypergraph is not linear")
    return (u + 2) // 2


@dataclass(frozen=True)
class SplitPair:
    """A twin pair produced from input edge number ``source``."""

    source: int
    first: Edge
    second: Edge


def split14_pairs(Hprime: RGraph) -> list[SplitPair]:
    r = _require_linear_even(Hprime)
    return [SplitPair(i, e[:r], e[r - 2:]) for i, e in enumerate(Hprime.edges)]


def split_construction_14(Hprime: RGraph) -> RGraph:
    """Replace each edge ``v1<...<v_{2r-2}`` by ``v1..v_r`` and ``v_{r-1}..v_{2r-2}``."""
    pairs = split14_pairs(Hprime)
    r = (Hprime.r + 2) // 2
    return RGraph(r, Hprime.n, [e for p in pairs for e in (p.first, p.second)])


@dataclass(frozen=True)
class GridVertexMap:
    """Row-major bijection between ``0..m^d-1`` and ``{0..m-1}^d``."""

    m: int
    d: int

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise InvalidQuery("grid needs m >= 1 and d >= 1")

    @property
    def size(self) -> int:
        return self.m ** self.d

    def coords(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.size:
            raise InvalidQuery(f"vertex {v} outside the grid")
        out = []
        for _ in range(self.d):
            v, c = divmod(v, self.m)
            out.append(c)
        return tuple(reversed(out))

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.d or not all(0 <= c < self.m for c in coords):
            raise InvalidQuery(f"bad grid coordinates {coords}")
        v = 0
        for c in coords:
            v = v * self.m + c
        return v

    def axis_ordering(self, axis: int) -> Ordering:
        """Vertices sorted by one coordinate, ties broken by label."""
        return Ordering(sorted(range(self.size), key=lambda v: (self.coords(v)[axis], v)))


def _as_sequences(sigmas) -> list[DescriptiveSequence]:
    return [s if isinstance(s, DescriptiveSequence) else DescriptiveSequence(s) for s in sigmas]


def labeling_search(e: Sequence[int], grid: GridVertexMap, sigmas) -> Optional[dict[int, str]]:
    """Labelling of ``e`` by X/Y/Z reading ``sigmas[i]`` along every axis ``i``.

    Sorting along the first axis already forces the labelling, so the search
    reduces to one candidate checked against the remaining axes.
    """
    sigmas = _as_sequences(sigmas)
    if len(sigmas) != grid.d:
        raise InvalidQuery(f"{len(sigmas)} sequences for a {grid.d}-dimensional grid")
    if any(len(s) != len(e) for s in sigmas):
        raise InvalidQuery("sequence length differs from edge size")
    pts = {v: grid.coords(v) for v in e}
    for axis in range(grid.d):
        if len({p[axis] for p in pts.values()}) != len(e):
            raise InvalidQuery(f"repeated coordinate on axis {axis}")
    first = sorted(e, key=lambda v: pts[v][0])
    label = {v: sigmas[0].letters[i] for i, v in enumerate(first)}
    for axis in range(1, grid.d):
        along = sorted(e, key=lambda v: pts[v][axis])
        if "".join(label[v] for v in along) != sigmas[axis].letters:
            return None
    return label


def has_distinct_coordinates(e: Sequence[int], grid: GridVertexMap) -> bool:
    pts = [grid.coords(v) for v in e]
    return all(len({p[a] for p in pts}) == len(pts) for a in range(grid.d))


def splitpi_pairs(Hprime: RGraph, grid: GridVertexMap, sigmas) -> list[SplitPair]:
    r = _require_linear_even(Hprime)
    sigmas = _as_sequences(sigmas)
    if len(sigmas) != grid.d:
        raise InvalidQuery(f"{len(sigmas)} sequences for a {grid.d}-dimensional grid")
    if Hprime.n != grid.size:
        raise InvalidQuery(f"input has {Hprime.n} vertices, grid has {grid.size}")
    if any(s.order != r for s in sigmas):
        raise InvalidQuery(f"all sequences must have order {r}")
    out = []
    for i, e in enumerate(Hprime.edges):
        if not has_distinct_coordinates(e, grid):
            continue
        label = labeling_search(e, grid, sigmas)
        if label is None:
            continue
        xs = tuple(sorted(v for v in e if label[v] in "XZ"))
        ys = tuple(sorted(v for v in e if label[v] in "YZ"))
        a, b = sorted((xs, ys))
        out.append(SplitPair(i, a, b))
    return out


def split_construction_pi(Hprime: RGraph, grid: GridVertexMap, sigmas) -> RGraph:
    """Split the edges that admit a labelling realising every ``sigmas[i]``
    along axis ``i``; discard the rest."""
    pairs = splitpi_pairs(Hprime, grid, sigmas)
    r = (Hprime.r + 2) // 2
    return RGraph(r, Hprime.n, [e for p in pairs for e in (p.first, p.second)])
