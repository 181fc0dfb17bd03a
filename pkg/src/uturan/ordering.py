"""Strict linear orders on finite label sets, and the role of a pair."""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

from .errors import InvalidQuery


class Ordering:
    """A linear order given by listing its elements from smallest to largest.

    Labels may be any hashable values (vertices, grid points, colours).
    Instances are immutable and hashable.
    """

    __slots__ = ("seq", "_pos")

    def __init__(self, seq: Iterable[Hashable]):
        seq = tuple(seq)
        pos = {v: i for i, v in enumerate(seq)}
        if len(pos) != len(seq):
            raise InvalidQuery("ordering lists some element twice")
        self.seq = seq
        self._pos = pos

    @classmethod
    def natural(cls, n: int) -> "Ordering":
        return cls(range(n))

    @classmethod
    def from_positions(cls, perm: Sequence[int]) -> "Ordering":
        """Build from ``perm[v] = position of v``."""
        seq = [None] * len(perm)
        for v, p in enumerate(perm):
            if not 0 <= p < len(perm) or seq[p] is not None:
                raise InvalidQuery("positions do not form a permutation")
            seq[p] = v
        return cls(seq)

    def position(self, v) -> int:
        try:
            return self._pos[v]
        except KeyError:
            raise InvalidQuery(f"{v!r} is not ordered by this ordering") from None

    def positions(self) -> list[int]:
        """Inverse view for integer labels 0..n-1."""
        return [self._pos[v] for v in range(len(self.seq))]

    def sort(self, items: Iterable) -> list:
        return sorted(items, key=self.position)

    def less(self, u, v) -> bool:
        return self.position(u) < self.position(v)

    def reversed(self) -> "Ordering":
        return Ordering(reversed(self.seq))

    def relabel(self, mapping) -> "Ordering":
        return Ordering(mapping[v] for v in self.seq)

    def __contains__(self, v) -> bool:
        return v in self._pos

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self):
        return iter(self.seq)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ordering) and self.seq == other.seq

    def __hash__(self) -> int:
        return hash(self.seq)

    def __repr__(self) -> str:
        return "Ordering(" + "<".join(map(str, self.seq)) + ")"


def role_of_pair(S: Iterable, pair: Iterable, order: Ordering | None = None) -> tuple[int, int]:
    """1-based positions ``(i, j)``, ``i < j``, occupied by ``pair`` in ``S``.

    ``S`` is sorted by ``order`` (natural order of the labels when omitted).
    """
    u, v = tuple(pair)
    if u == v:
        raise InvalidQuery("a pair needs two distinct elements")
    items = sorted(S) if order is None else order.sort(S)
    try:
        i, j = items.index(u) + 1, items.index(v) + 1
    except ValueError:
        raise InvalidQuery(f"pair {{{u!r}, {v!r}}} is not contained in the set") from None
    return (i, j) if i < j else (j, i)
