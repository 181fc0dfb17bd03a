"""Palettes: random pair colourings that decide edges by their colour pattern.

A palette on ``r`` vertices is a colour set ``C`` with admissible patterns
``A`` in ``C^(r choose 2)``.  Patterns list the colours of the pairs
``(1,2), (1,3), ..., (r-1,r)`` of an ascending ``r``-tuple, in that order.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Optional, Sequence

import numpy as np

from .errors import CapExceeded, GeneratorBug, InvalidQuery
from .hypergraph import RGraph, contains_subgraph
from .ordering import Ordering
from .ordersearch import DEFAULT_CAP, Checker, search_by_components

PALETTE_VERSION = 1


def pair_slots(r: int) -> list[tuple[int, int]]:
    """0-based position pairs ``(i, j)``, ``i < j``, in pattern order."""
    return list(combinations(range(r), 2))


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(y) for y in x)
    return x


def _thaw(x):
    if isinstance(x, tuple):
        return [_thaw(y) for y in x]
    return x


@dataclass(frozen=True)
class Palette:
    r: int
    colors: tuple
    admissible: frozenset
    version: int = PALETTE_VERSION

    def __post_init__(self):
        colors = tuple(_freeze(c) for c in self.colors)
        object.__setattr__(self, "colors", colors)
        if self.r < 2:
            raise InvalidQuery("palette uniformity must be at least 2")
        if len(set(colors)) != len(colors):
            raise InvalidQuery("duplicate colour")
        K = math.comb(self.r, 2)
        pats = []
        for a in self.admissible:
            a = tuple(_freeze(c) for c in a)
            if len(a) != K:
                raise InvalidQuery(f"pattern {a} should have {K} coordinates")
            if not set(a) <= set(colors):
                raise InvalidQuery(f"pattern {a} uses an unknown colour")
            pats.append(a)
        if len(set(pats)) != len(pats):
            raise InvalidQuery("duplicate admissible pattern")
        object.__setattr__(self, "admissible", frozenset(pats))

    @property
    def slots(self) -> int:
        return math.comb(self.r, 2)

    def color_index(self) -> dict:
        return {c: i for i, c in enumerate(self.colors)}

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "r": self.r,
            "colors": [_thaw(c) for c in self.colors],
            "admissible": [[_thaw(c) for c in a] for a in sorted(self.admissible, key=repr)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Palette":
        try:
            return cls(
                int(data["r"]),
                tuple(data["colors"]),
                frozenset(tuple(_freeze(c) for c in a) for a in data["admissible"]),
                int(data.get("version", PALETTE_VERSION)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidQuery(f"malformed palette record: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "Palette":
        return cls.from_dict(json.loads(text))


def density(P: Palette) -> Fraction:
    if not P.colors:
        raise InvalidQuery("palette has no colours")
    return Fraction(len(P.admissible), len(P.colors) ** P.slots)


def head_tail_palette(r: int) -> Palette:
    """Red head pair ``(1,2)``, blue tail pair ``(r-1,r)``, anything elsewhere."""
    if r < 3:
        raise InvalidQuery("need r >= 3")
    free = math.comb(r, 2) - 2
    pats = frozenset(("red",) + mid + ("blue",) for mid in product(("red", "blue"), repeat=free))
    return Palette(r, ("red", "blue"), pats)


def roles_palette(r: int) -> Palette:
    """Colours are the pairs of ``[r]``; the only pattern gives pair ``{i,j}`` colour ``{i,j}``."""
    if r < 3:
        raise InvalidQuery("need r >= 3")
    colors = tuple((i + 1, j + 1) for i, j in pair_slots(r))
    return Palette(r, colors, frozenset([colors]))


def pi_r(r: int) -> Fraction:
    K = math.comb(r, 2)
    return Fraction(1, K ** K)


@dataclass
class PairColoring:
    """Colour index of every pair of ``0..n-1``; ``matrix[u, v]`` for ``u != v``."""

    n: int
    colors: tuple
    matrix: np.ndarray
    seed: Optional[int] = None

    def color(self, u: int, v: int):
        if u == v:
            raise InvalidQuery("a pair needs two distinct vertices")
        return self.colors[int(self.matrix[u, v])]

    def pattern(self, e: Sequence[int]) -> tuple:
        s = sorted(e)
        return tuple(self.color(s[i], s[j]) for i, j in pair_slots(len(s)))

    @classmethod
    def from_function(cls, n: int, colors: Sequence, phi) -> "PairColoring":
        """Build from ``phi(u, v)`` (called with ``u < v``) returning a colour."""
        colors = tuple(_freeze(c) for c in colors)
        idx = {c: i for i, c in enumerate(colors)}
        M = np.full((n, n), -1, dtype=np.int32)
        for u, v in combinations(range(n), 2):
            M[u, v] = M[v, u] = idx[_freeze(phi(u, v))]
        return cls(n, colors, M)


def random_coloring(P: Palette, n: int, seed: int) -> PairColoring:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    M = np.full((n, n), -1, dtype=np.int32)
    vals = rng.integers(0, len(P.colors), size=iu.size)
    M[iu, ju] = vals
    M[ju, iu] = vals
    return PairColoring(n, P.colors, M, seed)


@lru_cache(maxsize=8)
def _all_subsets(n: int, r: int) -> np.ndarray:
    count = math.comb(n, r)
    flat = np.fromiter((v for c in combinations(range(n), r) for v in c), dtype=np.int64, count=count * r)
    return flat.reshape(count, r)


def edges_from_coloring(P: Palette, phi: PairColoring) -> RGraph:
    """The hypergraph whose edges are the ``r``-subsets with admissible pattern."""
    n, r = phi.n, P.r
    if n < r or not P.admissible:
        return RGraph(r, n)
    if phi.colors != P.colors:
        raise InvalidQuery("colouring and palette use different colour lists")
    C = len(P.colors)
    subsets = _all_subsets(n, r)
    slots = pair_slots(r)
    idx = P.color_index()
    if C ** len(slots) < 2 ** 62:
        codes = np.zeros(len(subsets), dtype=np.int64)
        for i, j in slots:
            codes = codes * C + phi.matrix[subsets[:, i], subsets[:, j]]
        allowed = np.array(
            sorted(sum(idx[c] * C ** (len(slots) - 1 - k) for k, c in enumerate(a)) for a in P.admissible),
            dtype=np.int64,
        )
        keep = np.isin(codes, allowed)
        return RGraph(r, n, subsets[keep].tolist())
    allowed = {tuple(idx[c] for c in a) for a in P.admissible}
    cols = np.stack([phi.matrix[subsets[:, i], subsets[:, j]] for i, j in slots], axis=1)
    keep = [tuple(row) in allowed for row in cols.tolist()]
    return RGraph(r, n, subsets[np.array(keep, dtype=bool)].tolist())


def generate(P: Palette, n: int, seed: int) -> tuple[RGraph, PairColoring]:
    """Random hypergraph from a uniformly random colouring of the pairs."""
    if n < P.r:
        raise InvalidQuery(f"need n >= r = {P.r}")
    phi = random_coloring(P, n, seed)
    return edges_from_coloring(P, phi), phi


@dataclass
class GenerationReport:
    round_trip: bool
    head_tail_disjoint: Optional[bool] = None
    constant_roles: Optional[bool] = None
    edges: int = 0


def head_tail_clash(G: RGraph) -> Optional[frozenset]:
    """A pair that is the head of one edge and the tail of another, in the
    natural vertex order."""
    heads = {frozenset(e[:2]) for e in G.edges}
    for e in G.edges:
        t = frozenset(e[-2:])
        if t in heads:
            return t
    return None


def role_clash(G: RGraph) -> Optional[tuple]:
    """A pair playing two different roles in the natural order, if any."""
    seen: dict[tuple[int, int], tuple[int, int]] = {}
    for e in G.edges:
        for i, j in pair_slots(G.r):
            key = (e[i], e[j])
            role = (i + 1, j + 1)
            if seen.setdefault(key, role) != role:
                return key, seen[key], role
    return None


def generation_properties(P: Palette, G: RGraph, phi: PairColoring) -> GenerationReport:
    """Re-derive ``G`` from ``phi`` and check the structural guarantee of
    the two named palettes.  Any mismatch raises ``GeneratorBug``."""
    if G.r != P.r or G.n != phi.n:
        raise GeneratorBug("graph, palette and colouring disagree on r or n")
    expected = {e for e in combinations(range(G.n), G.r) if phi.pattern(e) in P.admissible}
    if expected != set(G.edge_set):
        raise GeneratorBug(
            f"edge set differs from the colouring: {len(expected ^ set(G.edge_set))} mismatches"
        )
    report = GenerationReport(True, edges=len(G))
    if P.r >= 3 and P == head_tail_palette(P.r):
        clash = head_tail_clash(G)
        if clash is not None:
            raise GeneratorBug(f"pair {sorted(clash)} is both a head and a tail")
        report.head_tail_disjoint = True
    if P.r >= 3 and P == roles_palette(P.r):
        clash = role_clash(G)
        if clash is not None:
            raise GeneratorBug(f"pair {clash[0]} plays roles {clash[1]} and {clash[2]}")
        report.constant_roles = True
    return report


def derive_seed(seed: int, k: int) -> int:
    """Per-trial seed: first 8 bytes of BLAKE2b over ``(seed, k)`` as
    little-endian unsigned 64-bit integers."""
    data = struct.pack("<QQ", seed & 0xFFFFFFFFFFFFFFFF, k & 0xFFFFFFFFFFFFFFFF)
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


@dataclass
class FFreeReport:
    embeddings_found: int
    trials: int
    found_in: list = field(default_factory=list)


def f_free_trials(P: Palette, F: RGraph, n: int, trials: int, seed: int) -> FFreeReport:
    if F.r != P.r:
        raise InvalidQuery("F and palette have different uniformity")
    found = []
    for k in range(trials):
        G, _ = generate(P, n, derive_seed(seed, k))
        if contains_subgraph(G, F) is not None:
            found.append(k)
    return FFreeReport(len(found), trials, found)


class _RoleChecker(Checker):
    """Once every vertex of an edge is placed, each of its pairs has a role;
    a pair may never receive two different roles."""

    def __init__(self, F: RGraph):
        self.F = F
        self.placed = defaultdict(list)
        self.roles: dict[tuple, list] = defaultdict(list)
        self.stack = []

    def place(self, v):
        ok = True
        events = []
        for idx in self.F.incidence[v]:
            got = self.placed[idx]
            got.append(v)
            if len(got) == self.F.r:
                for i, j in pair_slots(self.F.r):
                    key = tuple(sorted((got[i], got[j])))
                    lst = self.roles[key]
                    if lst and lst[-1] != (i + 1, j + 1):
                        ok = False
                    lst.append((i + 1, j + 1))
                    events.append(key)
        self.stack.append(events)
        return ok

    def unplace(self, v):
        for key in self.stack.pop():
            self.roles[key].pop()
        for idx in self.F.incidence[v]:
            self.placed[idx].pop()


@dataclass
class ConjectureResult:
    holds: bool
    ordering: Optional[Ordering]
    roles: Optional[dict]


def role_map(F: RGraph, order: Ordering) -> Optional[dict]:
    """Pair -> role if every pair plays a constant role under ``order``."""
    roles = {}
    for e in F.edges:
        s = order.sort(e)
        for i, j in pair_slots(F.r):
            key = tuple(sorted((s[i], s[j])))
            if roles.setdefault(key, (i + 1, j + 1)) != (i + 1, j + 1):
                return None
    return roles


def conjecture_zero_predicate(F: RGraph, cap: int = DEFAULT_CAP) -> ConjectureResult:
    """Is there an ordering of ``V(F)`` where every pair plays one fixed role
    in all edges containing it?  Exhaustive per connected component."""
    try:
        out = search_by_components(range(F.n), F.edges, lambda comp: _RoleChecker(F), cap=cap)
    except CapExceeded:
        raise
    if out.ordering is None:
        return ConjectureResult(False, None, None)
    return ConjectureResult(True, out.ordering, role_map(F, out.ordering))


def realize_witness(F: RGraph, result: ConjectureResult) -> tuple[RGraph, PairColoring]:
    """Colour ``K_n`` (``n = |V(F)|``) with the witness roles, placing
    vertex ``v`` at its position in the witness ordering, and build the
    roles-palette hypergraph of that colouring."""
    if not result.holds:
        raise InvalidQuery("predicate does not hold; nothing to realise")
    P = roles_palette(F.r)
    pos = {v: result.ordering.position(v) for v in range(F.n)}
    back = {p: v for v, p in pos.items()}

    def phi(a, b):
        key = tuple(sorted((back[a], back[b])))
        return result.roles.get(key, P.colors[0])

    col = PairColoring.from_function(F.n, P.colors, phi)
    return edges_from_coloring(P, col), col
