"""r-uniform hypergraphs with exact densities and subgraph search."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from .errors import CapExceeded, InvalidQuery

EXHAUSTIVE_CAP = 20

Edge = tuple[int, ...]


class RGraph:
    """An r-uniform hypergraph on vertices ``0..n-1``.

    Edges are kept as sorted tuples in lexicographic order, alongside a
    per-vertex incidence index.  Instances are treated as immutable.
    """

    __slots__ = ("r", "n", "edges", "edge_set", "incidence")

    def __init__(self, r: int, n: int, edges: Iterable[Iterable[int]] = ()):
        if r < 2:
            raise InvalidQuery("uniformity must be at least 2")
        if n < 0:
            raise InvalidQuery("vertex count must be non-negative")
        canon = []
        for e in edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != r or len(set(t)) != r:
                raise InvalidQuery(f"edge {t} does not have {r} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise InvalidQuery(f"edge {t} has a vertex outside 0..{n - 1}")
            canon.append(t)
        edge_set = frozenset(canon)
        if len(edge_set) != len(canon):
            raise InvalidQuery("duplicate edge")
        self.r = r
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(canon))
        self.edge_set = edge_set
        inc: list[list[int]] = [[] for _ in range(n)]
        for idx, e in enumerate(self.edges):
            for v in e:
                inc[v].append(idx)
        self.incidence = tuple(tuple(x) for x in inc)

    @classmethod
    def complete(cls, r: int, n: int) -> "RGraph":
        return cls(r, n, combinations(range(n), r))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RGraph)
            and (self.r, self.n, self.edges) == (other.r, other.n, other.edges)
        )

    def __hash__(self) -> int:
        return hash((self.r, self.n, self.edges))

    def __repr__(self) -> str:
        return f"RGraph(r={self.r}, n={self.n}, edges={len(self.edges)})"

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def covered_vertices(self) -> list[int]:
        return [v for v in range(self.n) if self.incidence[v]]

    def relabel(self, mapping, n: int | None = None) -> "RGraph":
        return RGraph(self.r, self.n if n is None else n, ([mapping[v] for v in e] for e in self.edges))

    def as_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(len(self.edges), self.r)

    # serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {"r": self.r, "n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict, lenient: bool = False) -> "RGraph":
        try:
            r, n, raw = int(data["r"]), int(data["n"]), data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidQuery(f"malformed hypergraph record: {exc}") from None
        if lenient:
            return cls(r, n, {tuple(sorted(e)) for e in raw})
        for e in raw:
            if list(e) != sorted(e):
                raise InvalidQuery(f"edge {e} is not sorted ascending")
        return cls(r, n, raw)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str, lenient: bool = False) -> "RGraph":
        return cls.from_dict(json.loads(text), lenient=lenient)


def edge_count(H: RGraph, S: Iterable[int]) -> int:
    """Number of edges of ``H`` lying entirely inside ``S``."""
    S = set(S)
    seen = 0
    for v in S:
        for idx in H.incidence[v]:
            e = H.edges[idx]
            # count each edge once, from its smallest vertex
            if e[0] == v and S.issuperset(e):
                seen += 1
    return seen


def edge_density(H: RGraph, S: Iterable[int]) -> Fraction:
    S = set(S)
    if not S.issubset(range(H.n)):
        raise InvalidQuery("vertex subset is not contained in V(H)")
    if len(S) < H.r:
        raise InvalidQuery(f"subset of size {len(S)} is smaller than r={H.r}")
    return Fraction(edge_count(H, S), math.comb(len(S), H.r))


def global_density(H: RGraph) -> Fraction:
    return edge_density(H, range(H.n))


@dataclass(frozen=True)
class DensityQuery:
    """Parameters of a ``(d, eps)`` local density check.

    ``mode`` is ``"exhaustive"`` or ``"sampled"``; ``trials`` and ``seed``
    only matter for the sampled mode.
    """

    d: Fraction
    eps: Fraction
    mode: str = "exhaustive"
    trials: int = 2000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "d", Fraction(self.d))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if not 0 <= self.d <= 1:
            raise InvalidQuery("d must lie in [0, 1]")
        if not 0 < self.eps <= 1:
            raise InvalidQuery("eps must lie in (0, 1]")
        if self.mode not in ("exhaustive", "sampled"):
            raise InvalidQuery(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.trials < 1:
            raise InvalidQuery("sampled mode needs at least one trial")

    @property
    def threshold(self) -> Fraction:
        return self.d - self.eps


@dataclass
class LocalDensityReport:
    holds: bool
    worst_set: Optional[tuple[int, ...]]
    worst_density: Optional[Fraction]
    examined: int
    mode: str


def min_subset_size(n: int, eps: Fraction) -> int:
    """Smallest integer s with s >= eps * n (weak inequality)."""
    return max(0, math.ceil(Fraction(eps) * n))


def check_locally_dense(H: RGraph, q: DensityQuery, cap: int = EXHAUSTIVE_CAP) -> LocalDensityReport:
    """Test whether every ``S`` with ``|S| >= eps*n`` has density ``>= d - eps``.

    Sets smaller than ``r`` hold vacuously (they span no ``r``-subsets) and
    are not examined.  Exhaustive ties resolve to the smallest size, then the
    smallest bitmask.
    """
    if q.mode == "exhaustive":
        if H.n > cap:
            raise CapExceeded(f"exhaustive scan needs n <= {cap}, got n = {H.n}; use sampled mode")
        worst, examined = _exhaustive_worst(H, min_subset_size(H.n, q.eps))
    else:
        worst, examined = _sampled_worst(H, min_subset_size(H.n, q.eps), q.trials, q.seed)
    if worst is None:
        return LocalDensityReport(True, None, None, 0, q.mode)
    dens, S = worst
    return LocalDensityReport(dens >= q.threshold, S, dens, examined, q.mode)


def _exhaustive_worst(H: RGraph, smin: int):
    n, r = H.n, H.r
    lo = max(smin, r)
    if lo > n:
        return None, 0
    counts = np.zeros(1 << n, dtype=np.int32)
    for e in H.edges:
        counts[sum(1 << v for v in e)] += 1
    # sum over subsets: counts[S] becomes e(S)
    for i in range(n):
        bit = 1 << i
        view = counts.reshape(-1, 2 * bit)
        view[:, bit:] += view[:, :bit]
    pop = np.bitwise_count(np.arange(1 << n, dtype=np.uint32))
    best = None
    examined = 0
    for size in range(lo, n + 1):
        idx = np.flatnonzero(pop == size)
        examined += idx.size
        j = int(np.argmin(counts[idx]))
        dens = Fraction(int(counts[idx[j]]), math.comb(size, r))
        if best is None or dens < best[0]:
            mask = int(idx[j])
            best = (dens, tuple(v for v in range(n) if mask >> v & 1))
    return best, examined


def _sampled_worst(H: RGraph, smin: int, trials: int, seed: int, chunk: int = 500):
    n, r = H.n, H.r
    lo = max(smin, r)
    if lo > n:
        return None, 0
    rng = np.random.default_rng(seed)
    E = H.as_array()
    best = None
    examined = 0
    for size in range(lo, n + 1):
        total = math.comb(size, r)
        left = trials
        while left > 0:
            b = min(chunk, left)
            left -= b
            keys = rng.random((b, n))
            chosen = np.argpartition(keys, size - 1, axis=1)[:, :size] if size < n else np.tile(np.arange(n), (b, 1))
            ind = np.zeros((b, n), dtype=bool)
            np.put_along_axis(ind, chosen, True, axis=1)
            if len(E):
                inside = ind[:, E[:, 0]]
                for c in range(1, r):
                    inside &= ind[:, E[:, c]]
                ecount = inside.sum(axis=1)
            else:
                ecount = np.zeros(b, dtype=np.int64)
            examined += b
            j = int(np.argmin(ecount))
            dens = Fraction(int(ecount[j]), total)
            if best is None or dens < best[0]:
                best = (dens, tuple(int(v) for v in np.flatnonzero(ind[j])))
    return best, examined


@dataclass(frozen=True)
class Embedding:
    """Injective vertex map ``V(F) -> V(H)`` carrying edges to edges."""

    map: dict = field(hash=False)

    def image(self, e: Iterable[int]) -> Edge:
        return tuple(sorted(self.map[v] for v in e))

    def is_valid(self, F: RGraph, H: RGraph) -> bool:
        if len(set(self.map.values())) != len(self.map) or set(self.map) != set(range(F.n)):
            return False
        return all(self.image(e) in H.edge_set for e in F.edges)


def contains_subgraph(H: RGraph, F: RGraph) -> Optional[Embedding]:
    """Find a copy of ``F`` in ``H`` by backtracking, or return ``None``."""
    if F.r != H.r:
        raise InvalidQuery(f"uniformity mismatch: F.r={F.r}, H.r={H.r}")
    if F.n > H.n:
        return None
    hdeg = [H.degree(v) for v in range(H.n)]
    fdeg = [F.degree(v) for v in range(F.n)]

    # Order covered vertices of F so each one touches the placed part if possible.
    order: list[int] = []
    placed = set()
    remaining = set(F.covered_vertices())
    while remaining:
        def score(v):
            touching = sum(1 for idx in F.incidence[v] if placed.intersection(F.edges[idx]))
            return (touching, fdeg[v], -v)
        v = max(remaining, key=score)
        order.append(v)
        placed.add(v)
        remaining.discard(v)
    isolated = [v for v in range(F.n) if not F.incidence[v]]

    assign: dict[int, int] = {}
    used: set[int] = set()

    def candidates(v):
        cand = None
        for idx in F.incidence[v]:
            img = [assign[u] for u in F.edges[idx] if u in assign]
            if not img:
                continue
            pivot = min(img, key=lambda w: hdeg[w])
            need = set(img)
            ext = set()
            for hidx in H.incidence[pivot]:
                h = H.edges[hidx]
                if need.issubset(h):
                    ext.update(h)
            ext -= need
            cand = ext if cand is None else cand & ext
            if not cand:
                return []
        if cand is None:
            cand = (w for w in range(H.n) if hdeg[w] >= fdeg[v])
        return sorted(w for w in cand if w not in used and hdeg[w] >= fdeg[v])

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for w in candidates(v):
            assign[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del assign[v]
            used.discard(w)
        return False

    if not extend(0):
        return None
    free = (w for w in range(H.n) if w not in used)
    for v in isolated:
        assign[v] = next(free)
    return Embedding(dict(sorted(assign.items())))


def max_pairwise_intersection(H: RGraph) -> int:
    """Largest ``|e & f|`` over distinct edges; 0 with fewer than two edges."""
    if len(H.edges) < 2:
        return 0
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, e in enumerate(H.edges):
        for p in combinations(e, 2):
            buckets[p].append(idx)
    shared = [b for b in buckets.values() if len(b) > 1]
    if not shared:
        return 1 if any(len(inc) > 1 for inc in H.incidence) else 0
    best = 2
    seen = set()
    for b in shared:
        for i, j in combinations(b, 2):
            if (i, j) in seen:
                continue
            seen.add((i, j))
            best = max(best, len(set(H.edges[i]) & set(H.edges[j])))
    return best


def is_linear(H: RGraph) -> bool:
    return max_pairwise_intersection(H) <= 1
