"""Descriptive sequences: words over {X, Y, Z} recording how a twin pair of
edges interleaves under a vertex ordering."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import InvalidQuery
from .hypergraph import RGraph
from .ordering import Ordering, role_of_pair
from .ordersearch import DEFAULT_CAP, Checker, search_by_components
from .quasilinear import require_twins

__all__ = [
    "DescriptiveSequence", "role_of_pair", "z_roles", "is_consistent",
    "enumerate_sequences", "head_tail_sequence", "describes", "pair_pattern",
    "graph_admits", "admits_under", "head_tail", "is_head_tail_mixing", "MixingResult",
]


@dataclass(frozen=True, order=True)
class DescriptiveSequence:
    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        object.__setattr__(self, "letters", letters)
        c = Counter(letters)
        if set(c) - set("XYZ"):
            raise InvalidQuery(f"{letters!r} uses letters other than X, Y, Z")
        if len(letters) % 2 or len(letters) < 4:
            raise InvalidQuery(f"{letters!r} has invalid length {len(letters)}")
        r = len(letters) // 2 + 1
        if c["Z"] != 2 or c["X"] != r - 2 or c["Y"] != r - 2:
            raise InvalidQuery(f"{letters!r} needs {r - 2} X, {r - 2} Y and 2 Z")

    @property
    def order(self) -> int:
        return len(self.letters) // 2 + 1

    def __str__(self) -> str:
        return self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def swapped(self) -> "DescriptiveSequence":
        return DescriptiveSequence(self.letters.translate(str.maketrans("XY", "YX")))

    def reversed(self) -> "DescriptiveSequence":
        return DescriptiveSequence(self.letters[::-1])

    def z_positions(self) -> tuple[int, int]:
        """0-based positions of the two Z letters."""
        i = self.letters.index("Z")
        return i, self.letters.index("Z", i + 1)

    def positions(self, letters: str) -> list[int]:
        return [i for i, c in enumerate(self.letters) if c in letters]


def _seq(sigma) -> DescriptiveSequence:
    return sigma if isinstance(sigma, DescriptiveSequence) else DescriptiveSequence(sigma)


def z_roles(sigma) -> tuple[tuple[int, int], tuple[int, int]]:
    """Role of the Z pair among the {X,Z} entries and among the {Y,Z} entries."""
    sigma = _seq(sigma)
    z = sigma.z_positions()
    return (
        role_of_pair(sigma.positions("XZ"), z),
        role_of_pair(sigma.positions("YZ"), z),
    )


def is_consistent(sigma) -> bool:
    a, b = z_roles(sigma)
    return a == b


def _multiset_words(counts: dict[str, int], length: int) -> Iterator[str]:
    if length == 0:
        yield ""
        return
    for c in sorted(counts):
        if counts[c]:
            counts[c] -= 1
            for rest in _multiset_words(counts, length - 1):
                yield c + rest
            counts[c] += 1


def enumerate_sequences(r: int, filter: str = "all") -> list[DescriptiveSequence]:
    """All descriptive sequences of order ``r`` in lexicographic order (X<Y<Z)."""
    if r < 3:
        raise InvalidQuery("descriptive sequences need order r >= 3")
    if filter not in ("all", "consistent", "inconsistent"):
        raise InvalidQuery(f"unknown filter {filter!r}")
    out = []
    for w in _multiset_words({"X": r - 2, "Y": r - 2, "Z": 2}, 2 * r - 2):
        s = DescriptiveSequence(w)
        if filter == "all" or (filter == "consistent") == is_consistent(s):
            out.append(s)
    return out


def head_tail_sequence(r: int) -> DescriptiveSequence:
    """XX...XZZYY...Y of order ``r``."""
    return DescriptiveSequence("X" * (r - 2) + "ZZ" + "Y" * (r - 2))


def pair_pattern(e, f, order: Ordering) -> str:
    """Letters E (e only), F (f only), Z (shared) along ``e | f`` sorted by ``order``."""
    e, f = set(e), set(f)
    if len(e) != len(f) or len(e & f) != 2:
        raise InvalidQuery("edges must have equal size and share exactly two vertices")
    return "".join("Z" if v in f and v in e else ("E" if v in e else "F") for v in order.sort(e | f))


def describes(sigma, e, f, order: Ordering) -> bool:
    sigma = _seq(sigma)
    if len(e) != sigma.order:
        raise InvalidQuery(f"edges have size {len(e)}, sequence has order {sigma.order}")
    pat = pair_pattern(e, f, order)
    return pat in (
        sigma.letters.translate(str.maketrans("XY", "EF")),
        sigma.letters.translate(str.maketrans("XY", "FE")),
    )


def admits_under(H: RGraph, sigma, order: Ordering) -> bool:
    """Whether every twin pair of ``H`` is described by ``sigma`` under ``order``."""
    ts = require_twins(H)
    return all(describes(sigma, e, f, order) for e, f in ts.pairs)


class _AdmissionChecker(Checker):
    """Each twin pair's letter prefix must stay a prefix of sigma read with
    X as one edge or X as the other."""

    def __init__(self, pairs, sigma: DescriptiveSequence, members):
        a = sigma.letters.translate(str.maketrans("XY", "EF"))
        b = sigma.letters.translate(str.maketrans("XY", "FE"))
        self.targets = (a, b)
        self.labels = []
        self.by_vertex = defaultdict(list)
        for e, f in pairs:
            if e[0] not in members:
                continue
            z = set(e) & set(f)
            label = {v: "Z" if v in z else ("E" if v in e else "F") for v in set(e) | set(f)}
            k = len(self.labels)
            self.labels.append(label)
            for v in label:
                self.by_vertex[v].append(k)
        self.prefix = [""] * len(self.labels)

    def place(self, v):
        ok = True
        for k in self.by_vertex[v]:
            p = self.prefix[k] + self.labels[k][v]
            self.prefix[k] = p
            if ok and not (self.targets[0].startswith(p) or self.targets[1].startswith(p)):
                ok = False
        return ok

    def unplace(self, v):
        for k in self.by_vertex[v]:
            self.prefix[k] = self.prefix[k][:-1]


def graph_admits(H: RGraph, sigma, cap: Optional[int] = None) -> Optional[Ordering]:
    """Lexicographically least ordering of ``V(H)`` under which ``sigma``
    describes every twin pair, or ``None``.  Raises ``StructureError`` if
    ``H`` is not quasi-linear."""
    sigma = _seq(sigma)
    if sigma.order != H.r:
        raise InvalidQuery(f"sequence of order {sigma.order} for a {H.r}-graph")
    ts = require_twins(H)
    groups = [set(e) | set(f) for e, f in ts.pairs]
    out = search_by_components(
        range(H.n), groups,
        lambda comp: _AdmissionChecker(ts.pairs, sigma, set(comp)),
        cap=H.n + 1 if cap is None else cap,
    )
    return out.ordering


def head_tail(e, order: Ordering) -> tuple[tuple, tuple]:
    """First two and last two vertices of ``e`` under ``order``."""
    s = order.sort(e)
    return (s[0], s[1]), (s[-2], s[-1])


class _HeadTailChecker(Checker):
    """Rejects a prefix once some pair is known to be both a head and a tail.

    A head is fixed when two vertices of an edge are placed; the tail is
    fixed when ``r - 2`` are placed (it is the two still unplaced)."""

    def __init__(self, H: RGraph, members):
        self.H = H
        self.r = H.r
        self.placed = defaultdict(list)
        self.heads = Counter()
        self.tails = Counter()
        self.stack = []

    def place(self, v):
        ok = True
        events = []
        for idx in self.H.incidence[v]:
            got = self.placed[idx]
            got.append(v)
            c = len(got)
            if c == 2:
                h = frozenset(got)
                self.heads[h] += 1
                events.append(("h", h))
                if self.tails[h]:
                    ok = False
            if c == self.r - 2:
                t = frozenset(self.H.edges[idx]) - frozenset(got)
                self.tails[t] += 1
                events.append(("t", t))
                if self.heads[t]:
                    ok = False
        self.stack.append(events)
        return ok

    def unplace(self, v):
        for kind, key in self.stack.pop():
            (self.heads if kind == "h" else self.tails)[key] -= 1
        for idx in self.H.incidence[v]:
            self.placed[idx].pop()


@dataclass
class MixingResult:
    mixing: bool
    witness_ordering: Optional[Ordering]
    complete: bool = True


def is_head_tail_mixing(H: RGraph, cap: int = DEFAULT_CAP, randomized: bool = False,
                        seed: int = 0) -> MixingResult:
    """Decide head-tail-mixing by searching for an ordering where no pair is
    both a head and a tail.

    The cap applies per connected component.  Above it, ``randomized=True``
    runs a budgeted randomised search; if nothing is found the answer
    ``mixing=True`` is reported with ``complete=False``.
    """
    if H.r < 3:
        raise InvalidQuery("head/tail needs r >= 3")
    out = search_by_components(
        range(H.n), H.edges,
        lambda comp: _HeadTailChecker(H, set(comp)),
        cap=cap, allow_large=randomized, seed=seed,
    )
    return MixingResult(out.ordering is None, out.ordering, out.complete)


def heads_and_tails(H: RGraph, order: Ordering) -> tuple[set, set]:
    heads, tails = set(), set()
    for e in H.edges:
        h, t = head_tail(e, order)
        heads.add(frozenset(h))
        tails.add(frozenset(t))
    return heads, tails
