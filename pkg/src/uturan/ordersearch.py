"""Backtracking search over vertex orderings.

Orderings are built left to right.  A ``Checker`` sees each placement and
may veto it; since vertices are tried in increasing label order, the first
ordering found is the lexicographically least one accepted by the checker.

Constraints in this package only couple vertices that share an edge, so the
search runs per connected component and the component orderings are merged.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Callable, Iterable, Optional, Sequence

from .errors import CapExceeded
from .ordering import Ordering

DEFAULT_CAP = 10
DEFAULT_BUDGET = 200_000


class Checker:
    """Incremental constraint state.  ``place`` applies ``v`` and reports
    whether the prefix is still feasible; ``unplace`` always reverts it."""

    def place(self, v) -> bool:
        raise NotImplementedError

    def unplace(self, v) -> None:
        raise NotImplementedError


@dataclass
class SearchOutcome:
    ordering: Optional[Ordering]
    complete: bool  # False when a budget ran out before the space was exhausted
    nodes: int = 0


class _Budget(Exception):
    pass


def dfs(vertices: Sequence, checker: Checker, budget: Optional[int] = None,
        rng: Optional[random.Random] = None) -> SearchOutcome:
    """Depth-first search for an ordering of ``vertices`` accepted by ``checker``."""
    verts = sorted(vertices)
    placed: list = []
    left = set(verts)
    nodes = 0

    def rec() -> bool:
        nonlocal nodes
        if not left:
            return True
        cands = [v for v in verts if v in left]
        if rng is not None:
            rng.shuffle(cands)
        for v in cands:
            nodes += 1
            if budget is not None and nodes > budget:
                raise _Budget
            ok = checker.place(v)
            if ok:
                placed.append(v)
                left.discard(v)
                if rec():
                    return True
                placed.pop()
                left.add(v)
            checker.unplace(v)
        return False

    try:
        found = rec()
    except _Budget:
        return SearchOutcome(None, False, nodes)
    return SearchOutcome(Ordering(placed) if found else None, True, nodes)


def components(vertices: Iterable, groups: Iterable[Iterable]) -> list[list]:
    """Connected components of ``vertices`` where each group links its members."""
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for g in groups:
        g = list(g)
        for u in g[1:]:
            a, b = find(g[0]), find(u)
            if a != b:
                parent[max(a, b)] = min(a, b)
    comps: dict = {}
    for v in sorted(parent):
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values())


def merge_orderings(parts: Iterable[Sequence]) -> Ordering:
    """Lexicographically least interleaving of several vertex sequences."""
    seqs = [list(p) for p in parts if len(p)]
    heap = [(s[0], i, 0) for i, s in enumerate(seqs)]
    heapify(heap)
    out = []
    while heap:
        v, i, j = heappop(heap)
        out.append(v)
        if j + 1 < len(seqs[i]):
            heappush(heap, (seqs[i][j + 1], i, j + 1))
    return Ordering(out)


def search_by_components(
    vertices: Sequence,
    groups: Sequence[Sequence],
    make_checker: Callable[[list], Checker],
    cap: int = DEFAULT_CAP,
    allow_large: bool = False,
    budget: int = DEFAULT_BUDGET,
    restarts: int = 20,
    seed: int = 0,
) -> SearchOutcome:
    """Find an ordering of ``vertices`` component by component.

    Components up to ``cap`` vertices are searched exhaustively.  Larger ones
    raise ``CapExceeded`` unless ``allow_large``, in which case a budgeted
    search with randomised restarts runs; failing to find an ordering there
    yields ``complete=False``.
    """
    comps = components(vertices, groups)
    too_big = [c for c in comps if len(c) > cap]
    if too_big and not allow_large:
        raise CapExceeded(
            f"component with {max(map(len, too_big))} vertices exceeds exhaustive cap {cap}"
        )
    pieces = []
    nodes = 0
    for comp in comps:
        if len(comp) == 1:
            pieces.append(comp)
            continue
        if len(comp) <= cap:
            out = dfs(comp, make_checker(comp))
            nodes += out.nodes
            if out.ordering is None:
                return SearchOutcome(None, True, nodes)
            pieces.append(list(out.ordering))
            continue
        rng = random.Random(seed)
        found = None
        for attempt in range(restarts):
            out = dfs(comp, make_checker(comp), budget=budget, rng=rng if attempt else None)
            nodes += out.nodes
            if out.ordering is not None:
                found = out.ordering
                break
            if out.complete:
                return SearchOutcome(None, True, nodes)
        if found is None:
            return SearchOutcome(None, False, nodes)
        pieces.append(list(found))
    return SearchOutcome(merge_orderings(pieces), True, nodes)
