import random
from itertools import combinations, permutations, product

import pytest
from hypothesis import given, strategies as st

from oracles import interleaves, mono_scan
from uturan.comb_utils import (LayerSortWitness, fisgra_search, imo_split, linear_packing,
                               monochromatic_subset, monotone_subsequence, sorted_by_layers_check)
from uturan.errors import CapExceeded, InvalidQuery
from uturan.ordering import Ordering


def is_monotone_subsequence(sub, seq):
    it = iter(seq)
    if not all(x in it for x in sub):
        return False
    pairs = list(zip(sub, sub[1:]))
    return all(a < b for a, b in pairs) or all(a > b for a, b in pairs)


def longest_monotone_naive(seq):
    for size in range(len(seq), 0, -1):
        for idx in combinations(range(len(seq)), size):
            if is_monotone_subsequence([seq[i] for i in idx], seq):
                return size
    return 0


def test_monotone_examples():
    assert monotone_subsequence([1, 2, 3], 3) == [1, 2, 3]
    got = monotone_subsequence([2, 4, 1, 5, 3], 3)
    assert is_monotone_subsequence(got, [2, 4, 1, 5, 3]) and len(got) == 3
    assert monotone_subsequence([3, 2, 1], 3) == [3, 2, 1]
    assert monotone_subsequence([2, 3, 0, 1], 3) is None
    with pytest.raises(InvalidQuery):
        monotone_subsequence([1, 2], 0)
    with pytest.raises(InvalidQuery):
        monotone_subsequence([1, 1], 1)


def test_monotone_all_permutations_of_five():
    for perm in permutations(range(5)):
        got = monotone_subsequence(list(perm), 3)
        assert got is not None and len(got) == 3
        assert is_monotone_subsequence(got, perm)


@pytest.mark.parametrize("t", [4, 5])
def test_monotone_guaranteed_length(t):
    rng = random.Random(t)
    for _ in range(300):
        seq = rng.sample(range(1000), (t - 1) ** 2 + 1)
        got = monotone_subsequence(seq, t)
        assert got is not None and len(got) == t and is_monotone_subsequence(got, seq)


@given(st.lists(st.integers(0, 50), unique=True, max_size=9), st.integers(1, 6))
def test_monotone_matches_subsequence_scan(seq, t):
    got = monotone_subsequence(seq, t)
    assert (got is not None) == (longest_monotone_naive(seq) >= t)
    if got is not None:
        assert len(got) == t and is_monotone_subsequence(got, seq)


def test_imo_examples():
    assert imo_split([{1, 2, 3}]) == [frozenset({1, 2, 3})]
    assert imo_split([{1, 2}, {3, 4}], Ordering([1, 3, 2, 4])) == [frozenset({1}), frozenset({3, 4})]
    assert imo_split([set(), {1, 2}]) == [frozenset(), frozenset({1, 2})]
    with pytest.raises(InvalidQuery):
        imo_split([{1, 2}, {2, 3}])
    with pytest.raises(InvalidQuery):
        imo_split([{1, 2}], Ordering([1, 2, 3]))


def random_imo_instance(rng):
    k = rng.randint(1, 6)
    sizes = [rng.randint(1, 30) for _ in range(k)]
    pool = rng.sample(range(10 ** 4), sum(sizes))
    A, at = [], 0
    for s in sizes:
        A.append(set(pool[at:at + s]))
        at += s
    rng.shuffle(pool)
    return A, Ordering(pool)


def imo_postconditions(A, order, B):
    k = len([a for a in A if a])
    return (all(b <= a for a, b in zip(A, B))
            and all(len(b) * k >= len(a) for a, b in zip(A, B))
            and not interleaves(B, order))


def test_imo_random_instances():
    rng = random.Random(2024)
    for _ in range(1000):
        A, order = random_imo_instance(rng)
        assert imo_postconditions(A, order, imo_split(A, order))


def test_interleaving_oracle_detects_violations():
    assert interleaves([{1, 3}, {2}], Ordering([1, 2, 3]))
    assert not interleaves([{1, 2}, {3}], Ordering([1, 2, 3]))


def test_layer_check_examples():
    S = [{1, 2}, {1, 2}]
    order = [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert sorted_by_layers_check(S, order) == LayerSortWitness(0, "ascending")
    assert sorted_by_layers_check(S, order[::-1]) == LayerSortWitness(0, "descending")
    assert sorted_by_layers_check(S, [(1, 1), (2, 2), (2, 1), (1, 2)]) is None
    with pytest.raises(InvalidQuery):
        sorted_by_layers_check(S, order[:3])


@given(st.permutations(list(product(range(2), range(3)))))
def test_layer_check_reversal(order):
    w = sorted_by_layers_check([range(2), range(3)], order)
    back = sorted_by_layers_check([range(2), range(3)], order[::-1])
    assert (w is None) == (back is None)
    if w is not None:
        assert w.axis == back.axis
        assert {w.direction, back.direction} == {"ascending", "descending"}


def layered_naive(order, d):
    """Some axis whose layers occupy consecutive, ordered blocks."""
    pos = {p: i for i, p in enumerate(order)}
    for axis in range(d):
        for sign in (1, -1):
            if all(sign * (p[axis] - q[axis]) <= 0 or pos[p] > pos[q]
                   for p in order for q in order if p != q):
                return True
    return False


def test_fisgra_examples():
    lex = list(product(range(5), repeat=2))
    sets, w = fisgra_search(lex, 5, 2, 2)
    assert w == LayerSortWitness(0, "ascending")
    assert sorted_by_layers_check(sets, [p for p in lex if all(p[a] in sets[a] for a in range(2))]) is not None
    with pytest.raises(CapExceeded):
        fisgra_search(list(product(range(9), repeat=1)), 9, 1, 2)
    with pytest.raises(CapExceeded):
        fisgra_search(lex, 5, 2, 4)


def test_fisgra_two_by_two_exhaustive():
    pts = list(product(range(2), repeat=2))
    misses = 0
    for order in permutations(pts):
        got = fisgra_search(list(order), 2, 2, 2)
        assert (got is not None) == layered_naive(order, 2)
        misses += got is None
    # 16 of the 24 orders are sorted by one axis in one direction
    assert misses == 8


def test_fisgra_one_dimension_is_monotone_subsequence():
    for N, k in ((4, 3), (5, 3)):
        for perm in permutations(range(N)):
            order = [(v,) for v in perm]
            got = fisgra_search(order, N, 1, k)
            assert (got is not None) == (monotone_subsequence(list(perm), k) is not None)


def test_monochromatic_examples():
    assert monochromatic_subset(lambda e: 0, 7, 3, 5) == (0, 1, 2, 3, 4)
    pentagon = lambda e: (e[1] - e[0]) % 5 in (1, 4)
    assert monochromatic_subset(pentagon, 5, 2, 3) is None
    assert mono_scan(pentagon, 5, 2, 3) is None
    assert monochromatic_subset(lambda e: 0, 3, 2, 4) is None


def test_every_two_colouring_of_k6_has_a_triangle():
    rng = random.Random(6)
    pairs = list(combinations(range(6), 2))
    for _ in range(300):
        col = {p: rng.randrange(2) for p in pairs}
        assert monochromatic_subset(col, 6, 2, 3) is not None


@given(st.integers(3, 10), st.integers(2, 3), st.integers(2, 5), st.integers(2, 3), st.integers(0, 2 ** 32))
def test_monochromatic_matches_scan(n, r, m, ncol, seed):
    rng = random.Random(seed)
    col = {e: rng.randrange(ncol) for e in combinations(range(n), r)}
    assert monochromatic_subset(col, n, r, m) == mono_scan(col.__getitem__, n, r, m)


def test_packing_examples():
    res = linear_packing(range(3), 3, 0)
    assert res.family == [(0, 1, 2)]
    res = linear_packing(range(30), 3, 1, restarts=20)
    assert res.target == 50 and res.reached
    with pytest.raises(InvalidQuery):
        linear_packing(range(2), 3, 0)


@given(st.integers(3, 40), st.integers(2, 5), st.integers(0, 100))
def test_packing_is_linear(size, r, seed):
    if size < r:
        return
    fam = linear_packing(range(size), r, seed, restarts=2).family
    assert all(len(e) == r for e in fam)
    assert all(len(set(e) & set(f)) <= 1 for e, f in combinations(fam, 2))


def test_packing_sampled_path_is_linear():
    res = linear_packing(range(200), 4, 3, restarts=1)
    assert all(len(set(e) & set(f)) <= 1 for e, f in combinations(res.family, 2))
    assert res.size > 0
