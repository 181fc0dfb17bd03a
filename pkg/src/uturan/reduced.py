"""(k, r)-reduced hypergraphs.

Indices run over ``1..k``.  Part ``V_{i,j}`` (``i < j``) holds local vertices
``0..size-1``.  The constituent for an ``r``-subset ``t1 < ... < tr`` is a set
of ``(r choose 2)``-tuples: coordinate ``s`` is a vertex of the part for the
``s``-th pair ``(t_a, t_b)`` in lexicographic pair order.

Constituents are either explicit edge sets or products of per-coordinate
allowed sets (used when the edge set is too large to store).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Iterator, Optional, Sequence, Union

from .descriptive import DescriptiveSequence, enumerate_sequences
from .errors import CapExceeded, InvalidQuery
from .palettes import Palette, pair_slots

Index = tuple[int, ...]
Domain = Union[range, frozenset]

HOM_INDEX_CAP = 6
HOM_PART_CAP = 8


class Constituent:
    def count(self) -> int:
        raise NotImplementedError

    def contains(self, edge: Sequence[int]) -> bool:
        raise NotImplementedError

    def incident(self, slot: int) -> Domain:
        """Vertices of the slot's part lying on at least one edge."""
        raise NotImplementedError

    def compatible(self, partial: dict[int, int]) -> bool:
        """Whether some edge agrees with ``partial`` (slot -> vertex)."""
        raise NotImplementedError

    def edge_through(self, slot: int, v: int) -> Optional[tuple]:
        raise NotImplementedError

    def edges(self) -> Iterator[tuple]:
        raise NotImplementedError


@dataclass(frozen=True)
class EdgeSetConstituent(Constituent):
    edge_set: frozenset

    def count(self):
        return len(self.edge_set)

    def contains(self, edge):
        return tuple(edge) in self.edge_set

    def incident(self, slot):
        return frozenset(e[slot] for e in self.edge_set)

    def compatible(self, partial):
        return any(all(e[s] == v for s, v in partial.items()) for e in self.edge_set)

    def edge_through(self, slot, v):
        hits = [e for e in self.edge_set if e[slot] == v]
        return min(hits) if hits else None

    def edges(self):
        return iter(sorted(self.edge_set))


@dataclass(frozen=True)
class ProductConstituent(Constituent):
    """All tuples whose coordinate ``s`` lies in ``allowed[s]``."""

    allowed: tuple

    def count(self):
        return math.prod(len(a) for a in self.allowed)

    def contains(self, edge):
        return len(edge) == len(self.allowed) and all(v in a for v, a in zip(edge, self.allowed))

    def incident(self, slot):
        if any(len(a) == 0 for a in self.allowed):
            return frozenset()
        return self.allowed[slot]

    def compatible(self, partial):
        return self.count() > 0 and all(v in self.allowed[s] for s, v in partial.items())

    def edge_through(self, slot, v):
        if not self.compatible({slot: v}):
            return None
        return tuple(v if s == slot else min(a) for s, a in enumerate(self.allowed))

    def edges(self):
        return product(*(sorted(a) for a in self.allowed))


_EMPTY = EdgeSetConstituent(frozenset())


@dataclass
class ReducedGraph:
    k: int
    r: int
    part_sizes: dict
    constituents: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 2 or self.k < 1:
            raise InvalidQuery("need k >= 1 and r >= 2")
        sizes = {}
        for key, size in self.part_sizes.items():
            i, j = sorted(key)
            if not 1 <= i < j <= self.k:
                raise InvalidQuery(f"part {key} outside [k] = [{self.k}]")
            sizes[(i, j)] = int(size)
        for i, j in combinations(range(1, self.k + 1), 2):
            sizes.setdefault((i, j), 0)
        self.part_sizes = sizes
        K = math.comb(self.r, 2)
        cons = {}
        for t, c in self.constituents.items():
            t = tuple(t)
            if len(t) != self.r or list(t) != sorted(set(t)) or not (1 <= t[0] and t[-1] <= self.k):
                raise InvalidQuery(f"bad constituent index {t}")
            if isinstance(c, EdgeSetConstituent):
                for e in c.edge_set:
                    if len(e) != K:
                        raise InvalidQuery(f"edge {e} in {t} should have {K} coordinates")
                    for s, (a, b) in enumerate(pair_slots(self.r)):
                        if not 0 <= e[s] < sizes[(t[a], t[b])]:
                            raise InvalidQuery(f"edge {e} in {t} leaves part {(t[a], t[b])}")
            cons[t] = c
        self.constituents = cons

    def part_size(self, i: int, j: int) -> int:
        return self.part_sizes[(min(i, j), max(i, j))]

    def slot_parts(self, t: Index) -> list[tuple[int, int]]:
        return [(t[a], t[b]) for a, b in pair_slots(self.r)]

    def constituent(self, t: Sequence[int]) -> Constituent:
        return self.constituents.get(tuple(t), _EMPTY)

    def indices(self) -> Iterator[Index]:
        return combinations(range(1, self.k + 1), self.r)

    @property
    def materialized(self) -> bool:
        return all(isinstance(c, EdgeSetConstituent) for c in self.constituents.values())

    def edge_count(self) -> int:
        return sum(c.count() for c in self.constituents.values())

    def to_dict(self) -> dict:
        if not self.materialized:
            raise InvalidQuery("only explicit reduced graphs have a JSON form")
        return {
            "k": self.k,
            "r": self.r,
            "parts": {f"{i},{j}": list(range(s)) for (i, j), s in sorted(self.part_sizes.items())},
            "edges": {
                ",".join(map(str, t)): [list(e) for e in c.edges()]
                for t, c in sorted(self.constituents.items()) if c.count()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReducedGraph":
        try:
            k, r = int(data["k"]), int(data["r"])
            parts = {}
            for key, verts in data["parts"].items():
                i, j = (int(x) for x in key.split(","))
                if list(verts) != list(range(len(verts))):
                    raise InvalidQuery(f"part {key} must list vertices 0..size-1")
                parts[(i, j)] = len(verts)
            cons = {
                tuple(int(x) for x in key.split(",")): EdgeSetConstituent(frozenset(tuple(e) for e in edges))
                for key, edges in data.get("edges", {}).items()
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidQuery(f"malformed reduced graph: {exc}") from None
        return cls(k, r, parts, cons)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "ReducedGraph":
        return cls.from_dict(json.loads(text))


def constituent_density(R: ReducedGraph, t: Sequence[int]) -> Fraction:
    t = tuple(t)
    if len(t) != R.r or list(t) != sorted(set(t)) or t[0] < 1 or t[-1] > R.k:
        raise InvalidQuery(f"{t} is not an {R.r}-subset of [{R.k}]")
    sizes = [R.part_size(i, j) for i, j in R.slot_parts(t)]
    if 0 in sizes:
        raise InvalidQuery(f"constituent {t} touches an empty part")
    return Fraction(R.constituent(t).count(), math.prod(sizes))


def min_density(R: ReducedGraph) -> Fraction:
    dens = [constituent_density(R, t) for t in R.indices()]
    return min(dens) if dens else Fraction(0)


def _seq(sigma) -> DescriptiveSequence:
    return sigma if isinstance(sigma, DescriptiveSequence) else DescriptiveSequence(sigma)


def _slot_of(r: int, a: int, b: int) -> int:
    return pair_slots(r).index((a, b))


def tuple_admits(R: ReducedGraph, t: Sequence[int], sigma) -> Optional[tuple[tuple, tuple]]:
    """Edges ``e_X`` in the X/Z constituent and ``e_Y`` in the Y/Z
    constituent meeting in exactly one vertex (necessarily in the part of
    the two Z indices)."""
    sigma = _seq(sigma)
    t = tuple(t)
    if sigma.order != R.r:
        raise InvalidQuery(f"sequence of order {sigma.order} for r = {R.r}")
    if len(t) != 2 * R.r - 2 or list(t) != sorted(set(t)) or t[0] < 1 or t[-1] > R.k:
        raise InvalidQuery(f"{t} is not a {2 * R.r - 2}-subset of [{R.k}]")
    xpos, ypos = sigma.positions("XZ"), sigma.positions("YZ")
    z1, z2 = sigma.z_positions()
    x = tuple(t[p] for p in xpos)
    y = tuple(t[p] for p in ypos)
    sx = _slot_of(R.r, xpos.index(z1), xpos.index(z2))
    sy = _slot_of(R.r, ypos.index(z1), ypos.index(z2))
    cx, cy = R.constituent(x), R.constituent(y)
    ix, iy = cx.incident(sx), cy.incident(sy)
    if len(ix) > len(iy):
        ix, iy = iy, ix
    common = [v for v in ix if v in iy]
    if not common:
        return None
    v = min(common)
    return cx.edge_through(sx, v), cy.edge_through(sy, v)


def tuple_admits_bruteforce(R: ReducedGraph, t: Sequence[int], sigma) -> bool:
    """Reference check over all edge pairs of the two constituents."""
    sigma = _seq(sigma)
    t = tuple(t)
    xpos, ypos = sigma.positions("XZ"), sigma.positions("YZ")
    x = tuple(t[p] for p in xpos)
    y = tuple(t[p] for p in ypos)
    px, py = R.slot_parts(x), R.slot_parts(y)
    for ex in R.constituent(x).edges():
        vx = set(zip(px, ex))
        for ey in R.constituent(y).edges():
            if len(vx & set(zip(py, ey))) == 1:
                return True
    return False


def find_uniform_subset(R: ReducedGraph, m: int, mode: str = "fixed",
                        sigma=None) -> Optional[tuple[Index, DescriptiveSequence]]:
    """An ``m``-subset of ``[k]`` whose every ``(2r-2)``-tuple admits one
    sequence: ``sigma`` (mode ``fixed``) or some inconsistent sequence
    (mode ``any_inconsistent``).  Backtracking over increasing subsets."""
    if m > R.k:
        raise InvalidQuery(f"m = {m} exceeds k = {R.k}")
    if mode == "fixed":
        if sigma is None:
            raise InvalidQuery("fixed mode needs a sequence")
        candidates = [_seq(sigma)]
    elif mode == "any_inconsistent":
        candidates = enumerate_sequences(R.r, "inconsistent")
    else:
        raise InvalidQuery(f"unknown mode {mode!r}")
    w = 2 * R.r - 2
    for sg in candidates:
        cache: dict = {}

        def ok(tup):
            if tup not in cache:
                cache[tup] = tuple_admits(R, tup, sg) is not None
            return cache[tup]

        chosen: list[int] = []

        def rec(start: int) -> bool:
            if len(chosen) == m:
                return True
            for v in range(start, R.k + 1):
                if R.k - v + 1 < m - len(chosen):
                    break
                if all(ok(rest + (v,)) for rest in combinations(chosen, w - 1)):
                    chosen.append(v)
                    if rec(v + 1):
                        return True
                    chosen.pop()
            return False

        if rec(1):
            return tuple(chosen), sg
    return None


@dataclass(frozen=True)
class SignatureReport:
    q: int
    W_sizes: tuple
    part_sizes: tuple
    values: tuple


def _incidence_fractions(R: ReducedGraph, t: Sequence[int], q: int, slots: Sequence[int]) -> SignatureReport:
    if q < 1:
        raise InvalidQuery("q must be at least 1")
    t = tuple(t)
    parts = R.slot_parts(t)
    sizes = tuple(R.part_size(*p) for p in parts)
    if 0 in sizes:
        raise InvalidQuery(f"constituent {t} touches an empty part")
    c = R.constituent(t)
    W = tuple(len(c.incident(s)) for s in range(len(parts)))
    values = tuple(q * W[s] // sizes[s] for s in slots)
    return SignatureReport(q, W, sizes, values)


def signature(R: ReducedGraph, t: Sequence[int], q: int) -> SignatureReport:
    """Discretised incidence fractions of the first and last pair parts."""
    K = math.comb(R.r, 2)
    return _incidence_fractions(R, t, q, (0, K - 1))


def profile(R: ReducedGraph, t: Sequence[int], q: int) -> SignatureReport:
    """Discretised incidence fractions of every pair part."""
    return _incidence_fractions(R, t, q, range(math.comb(R.r, 2)))


def blowup(P: Palette, k: int) -> ReducedGraph:
    """Every part is a copy of ``C`` (vertex = colour index) and every
    constituent a copy of ``A``."""
    if k < P.r:
        raise InvalidQuery(f"blowup needs k >= r = {P.r}")
    idx = P.color_index()
    shared = EdgeSetConstituent(frozenset(tuple(idx[c] for c in a) for a in P.admissible))
    sizes = {p: len(P.colors) for p in combinations(range(1, k + 1), 2)}
    return ReducedGraph(k, P.r, sizes, {t: shared for t in combinations(range(1, k + 1), P.r)})


def counterexample_k4(k: int) -> ReducedGraph:
    """Parts are the subsets of ``[k]`` (bit ``i-1`` marks ``i``).  In the
    constituent ``t1<t2<t3<t4`` the ``V_{t1,t2}`` vertex must contain ``t3``
    and miss ``t4``; the other five coordinates are free."""
    if not 5 <= k <= 10:
        raise CapExceeded(f"counterexample needs 5 <= k <= 10, got {k}")
    full = range(2 ** k)
    cons = {}
    for t in combinations(range(1, k + 1), 4):
        b3, b4 = 1 << (t[2] - 1), 1 << (t[3] - 1)
        first = frozenset(S for S in full if S & b3 and not S & b4)
        cons[t] = ProductConstituent((first,) + (full,) * 5)
    return ReducedGraph(k, 4, {p: 2 ** k for p in combinations(range(1, k + 1), 2)}, cons)


@dataclass
class Homomorphism:
    index_map: dict          # i -> f(i)
    vertex_map: dict         # ((i, j), v) -> vertex of part (f(i), f(j))


@dataclass
class HomomorphismResult:
    homomorphism: Optional[Homomorphism]
    complete: bool = True
    index_maps_tried: int = 0

    @property
    def exists(self) -> bool:
        return self.homomorphism is not None


def _image(src: ReducedGraph, f: dict, t: Index) -> tuple[Index, list[int]]:
    """Destination constituent and the destination slot of each source slot."""
    ft = tuple(sorted(f[i] for i in t))
    dslots = []
    for a, b in pair_slots(src.r):
        u, v = sorted((f[t[a]], f[t[b]]))
        dslots.append(_slot_of(src.r, ft.index(u), ft.index(v)))
    return ft, dslots


def is_homomorphism(src: ReducedGraph, dst: ReducedGraph, h: Homomorphism) -> bool:
    """Direct check: part-respecting and every source edge maps to an edge."""
    f = h.index_map
    if sorted(f) != list(range(1, src.k + 1)) or len(set(f.values())) != src.k:
        return False
    for (i, j), size in src.part_sizes.items():
        for v in range(size):
            w = h.vertex_map.get(((i, j), v))
            if w is None or not 0 <= w < dst.part_size(f[i], f[j]):
                return False
    for t, c in src.constituents.items():
        parts = src.slot_parts(t)
        ft, dslots = _image(src, f, t)
        target = dst.constituent(ft)
        for e in c.edges():
            img = [0] * len(e)
            for s, v in enumerate(e):
                img[dslots[s]] = h.vertex_map[(parts[s], v)]
            if not target.contains(img):
                return False
    return True


def compose(h1: Homomorphism, h2: Homomorphism) -> Homomorphism:
    f = {i: h2.index_map[j] for i, j in h1.index_map.items()}
    vm = {}
    for ((i, j), v), w in h1.vertex_map.items():
        a, b = sorted((h1.index_map[i], h1.index_map[j]))
        vm[((i, j), v)] = h2.vertex_map[((a, b), w)]
    return Homomorphism(f, vm)


def _meet(a: Optional[Domain], b: Domain) -> Domain:
    if a is None:
        return b
    if isinstance(a, range) and isinstance(b, range):
        return range(max(a.start, b.start), min(a.stop, b.stop)) if a.step == b.step == 1 else frozenset(a) & frozenset(b)
    if isinstance(a, range):
        a, b = b, a
    return frozenset(v for v in a if v in b)


def _solve_for(src: ReducedGraph, dst: ReducedGraph, f: dict, budget: list) -> Optional[dict]:
    """Vertex map for a fixed index map, or None."""
    cons = []  # (target constituent, [(var, dest slot)])
    for t, c in src.constituents.items():
        if not c.count():
            continue
        parts = src.slot_parts(t)
        ft, dslots = _image(src, f, t)
        target = dst.constituent(ft)
        if target.count() == 0:
            return None
        for e in c.edges():
            cons.append((target, [((parts[s], v), dslots[s]) for s, v in enumerate(e)]))
    domains: dict = {}
    by_var: dict = {}
    for ci, (target, scope) in enumerate(cons):
        for var, ds in scope:
            domains[var] = _meet(domains.get(var), target.incident(ds))
            if not len(domains[var]):
                return None
            by_var.setdefault(var, []).append(ci)
    assign: dict = {}
    order = sorted(domains, key=lambda x: (len(domains[x]), x))

    def consistent(var) -> bool:
        for ci in by_var[var]:
            target, scope = cons[ci]
            partial = {ds: assign[v] for v, ds in scope if v in assign}
            if not target.compatible(partial):
                return False
        return True

    def rec(pos: int) -> bool:
        if pos == len(order):
            return True
        var = order[pos]
        for w in sorted(domains[var]):
            budget[0] -= 1
            if budget[0] < 0:
                raise _OutOfBudget
            assign[var] = w
            if consistent(var) and rec(pos + 1):
                return True
            del assign[var]
        return False

    if not rec(0):
        return None
    vm = {}
    for (i, j), size in src.part_sizes.items():
        for v in range(size):
            vm[((i, j), v)] = assign.get(((i, j), v), 0)
    return vm


class _OutOfBudget(Exception):
    pass


def homomorphism_exists(src: ReducedGraph, dst: ReducedGraph, heuristic: bool = False,
                        monotone: bool = False, budget: int = 2_000_000) -> HomomorphismResult:
    """Search for ``(phi, f)`` with ``f`` injective on indices and ``phi``
    sending part ``(i, j)`` into part ``(f(i), f(j))`` and edges to edges.

    Exhaustive when the source has ``k <= 6`` and parts of size ``<= 8``.
    Larger sources need ``heuristic=True``: the same search under a node
    budget, reported incomplete if the budget runs out.  ``monotone``
    restricts ``f`` to increasing maps.
    """
    if src.r != dst.r:
        raise InvalidQuery("reduced graphs have different r")
    within = src.k <= HOM_INDEX_CAP and max(src.part_sizes.values(), default=0) <= HOM_PART_CAP
    if not within and not heuristic:
        raise CapExceeded(
            f"exhaustive homomorphism search needs k <= {HOM_INDEX_CAP} and parts <= {HOM_PART_CAP}"
        )
    if src.k > dst.k:
        return HomomorphismResult(None, True)
    left = [budget if heuristic else math.inf]
    maps = combinations(range(1, dst.k + 1), src.k) if monotone else permutations(range(1, dst.k + 1), src.k)
    tried = 0
    for img in maps:
        f = dict(zip(range(1, src.k + 1), img))
        if any(src.part_size(i, j) and not dst.part_size(f[i], f[j])
               for i, j in combinations(range(1, src.k + 1), 2)):
            continue
        tried += 1
        try:
            vm = _solve_for(src, dst, f, left)
        except _OutOfBudget:
            return HomomorphismResult(None, False, tried)
        if vm is not None:
            return HomomorphismResult(Homomorphism(f, vm), True, tried)
    return HomomorphismResult(None, True, tried)
