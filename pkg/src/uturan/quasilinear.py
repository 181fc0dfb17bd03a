"""Twin structure of quasi-linear hypergraphs and consistent orderings.

A hypergraph is quasi-linear when every edge meets exactly one other edge
(its twin) in two vertices and every other edge in at most one.  An empty
hypergraph is *not* treated as quasi-linear here.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .errors import StructureError
from .hypergraph import Edge, RGraph
from .ordering import Ordering, role_of_pair
from .ordersearch import DEFAULT_CAP, Checker, search_by_components


@dataclass(frozen=True)
class TwinStructure:
    """Perfect matching of the edges into twin pairs ``(e, f)`` with ``e < f``."""

    pairs: tuple[tuple[Edge, Edge], ...]

    def twin_of(self, e: Edge) -> Edge:
        for a, b in self.pairs:
            if a == e:
                return b
            if b == e:
                return a
        raise KeyError(e)

    def shared(self, i: int) -> tuple[int, int]:
        a, b = self.pairs[i]
        return tuple(sorted(set(a) & set(b)))

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class TwinAnalysis:
    structure: Optional[TwinStructure]
    violation: Optional[str] = None
    offending: tuple[Edge, ...] = ()

    @property
    def quasi_linear(self) -> bool:
        return self.structure is not None


def analyze_twins(H: RGraph) -> TwinAnalysis:
    """Twin matching of ``H``, or the first violation in canonical edge order."""
    if not H.edges:
        return TwinAnalysis(None, "hypergraph has no edges")
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, e in enumerate(H.edges):
        for p in combinations(e, 2):
            buckets[p].append(idx)
    partner = {}
    for idx, e in enumerate(H.edges):
        shared: dict[int, int] = defaultdict(int)
        for p in combinations(e, 2):
            for j in buckets[p]:
                if j != idx:
                    shared[j] += 1
        # |e & f| = s shows up as C(s, 2) shared pairs
        big = sorted(j for j, c in shared.items() if c > 1)
        if big:
            f = H.edges[big[0]]
            return TwinAnalysis(None, f"edges {e} and {f} share {len(set(e) & set(f))} vertices", (e, f))
        twins = sorted(shared)
        if not twins:
            return TwinAnalysis(None, f"edge {e} has no twin", (e,))
        if len(twins) > 1:
            others = tuple(H.edges[j] for j in twins)
            return TwinAnalysis(None, f"edge {e} has {len(twins)} candidate twins", (e,) + others)
        partner[idx] = twins[0]
    pairs = tuple(
        (H.edges[i], H.edges[j]) for i, j in sorted(partner.items()) if i < j
    )
    return TwinAnalysis(TwinStructure(pairs))


def twin_structure(H: RGraph) -> Optional[TwinStructure]:
    return analyze_twins(H).structure


def is_quasi_linear(H: RGraph) -> bool:
    return analyze_twins(H).quasi_linear


def require_twins(H: RGraph) -> TwinStructure:
    analysis = analyze_twins(H)
    if analysis.structure is None:
        raise StructureError(f"hypergraph is not quasi-linear: {analysis.violation}")
    return analysis.structure


def is_consistently_ordered(H: RGraph, order: Ordering) -> bool:
    ts = require_twins(H)
    for e, f in ts.pairs:
        common = set(e) & set(f)
        if role_of_pair(e, common, order) != role_of_pair(f, common, order):
            return False
    return True


class _ConsistencyChecker(Checker):
    """Roles agree iff, for e-only and f-only vertices alike, equal numbers
    sit before the first shared vertex and between the two shared ones."""

    def __init__(self, pairs, members):
        self.pairs = []
        self.by_vertex = defaultdict(list)
        for e, f in pairs:
            if e[0] not in members:
                continue
            z = set(e) & set(f)
            label = {v: "Z" if v in z else ("E" if v in e else "F") for v in set(e) | set(f)}
            k = len(self.pairs)
            self.pairs.append(label)
            for v in label:
                self.by_vertex[v].append(k)
        self.seqs = [[] for _ in self.pairs]

    def place(self, v):
        ok = True
        for k in self.by_vertex[v]:
            seq = self.seqs[k]
            seq.append(self.pairs[k][v])
            if ok and not _roles_compatible(seq):
                ok = False
        return ok

    def unplace(self, v):
        for k in self.by_vertex[v]:
            self.seqs[k].pop()


def _roles_compatible(seq) -> bool:
    ce = cf = 0
    zs = 0
    for c in seq:
        if c == "Z":
            if ce != cf:
                return False
            zs += 1
            if zs == 2:
                return True
            ce = cf = 0
        elif c == "E":
            ce += 1
        else:
            cf += 1
    return True


@dataclass
class ConsistencyResult:
    consistent: bool
    witness: Optional[Ordering]
    complete: bool = True


def is_consistent_graph(H: RGraph, cap: int = DEFAULT_CAP, allow_large: bool = False,
                        seed: int = 0) -> ConsistencyResult:
    """Search for a consistent vertex ordering.

    ``consistent=False`` with ``complete=True`` certifies inconsistency.
    The size cap applies per connected component.
    """
    ts = require_twins(H)
    groups = [set(e) | set(f) for e, f in ts.pairs]
    out = search_by_components(
        range(H.n), groups,
        lambda comp: _ConsistencyChecker(ts.pairs, set(comp)),
        cap=cap, allow_large=allow_large, seed=seed,
    )
    return ConsistencyResult(out.ordering is not None, out.ordering, out.complete)
