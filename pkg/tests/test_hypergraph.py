from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from oracles import density_of, injections_contain, min_local_density
from strategies import rgraphs
from uturan.errors import CapExceeded, InvalidQuery
from uturan.hypergraph import (DensityQuery, RGraph, check_locally_dense, contains_subgraph,
                               edge_density, global_density, is_linear, max_pairwise_intersection,
                               min_subset_size)


def test_rgraph_canonical_form():
    H = RGraph(3, 5, [(2, 1, 0), (1, 2, 3)])
    assert H.edges == ((0, 1, 2), (1, 2, 3))
    with pytest.raises(InvalidQuery):
        RGraph(3, 4, [(0, 1, 1)])
    with pytest.raises(InvalidQuery):
        RGraph(3, 3, [(0, 1, 3)])


def test_json_round_trip_and_strictness():
    H = RGraph(3, 5, [(0, 1, 2), (1, 2, 3)])
    assert RGraph.loads(H.dumps()) == H
    with pytest.raises(InvalidQuery):
        RGraph.loads('{"r": 3, "n": 4, "edges": [[2, 1, 0]]}')
    assert RGraph.loads('{"r": 3, "n": 4, "edges": [[2, 1, 0]]}', lenient=True).edges == ((0, 1, 2),)


def test_edge_density_examples():
    assert edge_density(RGraph.complete(3, 5), range(5)) == 1
    assert edge_density(RGraph(3, 6), range(4)) == 0
    H = RGraph(3, 4, [(0, 1, 2), (0, 1, 3)])
    # frozen from the brute-force count in the oracle
    assert density_of(H, range(4)) == Fraction(1, 2)
    assert edge_density(H, range(4)) == Fraction(1, 2)
    with pytest.raises(InvalidQuery):
        edge_density(H, [0, 1])


@given(rgraphs(max_n=7), st.data())
def test_edge_density_monotone_under_edge_addition(H, data):
    S = data.draw(st.sets(st.integers(0, H.n - 1), min_size=3))
    inside = [e for e in combinations(sorted(S), 3) if e not in H.edge_set]
    if not inside:
        return
    e = data.draw(st.sampled_from(inside))
    H2 = RGraph(3, H.n, list(H.edges) + [e])
    assert edge_density(H2, S) >= edge_density(H, S)


def test_local_density_complete_graph():
    rep = check_locally_dense(RGraph.complete(3, 9), DensityQuery(1, Fraction(1, 3)))
    assert rep.holds and rep.worst_density == 1


def test_local_density_missing_triple_is_worst_set():
    # complete 3-graph on 9 vertices with the triple {0,1,2} removed: the
    # triple spans no edge and every other examined set is far denser
    H = RGraph(3, 9, [e for e in combinations(range(9), 3) if e != (0, 1, 2)])
    rep = check_locally_dense(H, DensityQuery(Fraction(1, 2), Fraction(1, 3)))
    assert not rep.holds
    assert rep.worst_set == (0, 1, 2)
    assert rep.worst_density == 0


def test_weak_inequality_for_minimum_size():
    assert min_subset_size(9, Fraction(1, 3)) == 3
    assert min_subset_size(10, Fraction(1, 3)) == 4


def test_exhaustive_cap():
    with pytest.raises(CapExceeded):
        check_locally_dense(RGraph(3, 21), DensityQuery(0, 1))


@given(rgraphs(max_n=9), st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]),
       st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]))
def test_exhaustive_matches_full_scan(H, eps, d):
    rep = check_locally_dense(H, DensityQuery(d, eps))
    best = min_local_density(H, min_subset_size(H.n, eps))
    if best is None:
        assert rep.holds and rep.worst_set is None
        return
    (dens, _, _), S = best
    assert rep.worst_density == dens
    assert rep.worst_set == S
    assert rep.holds == (dens >= d - eps)


def test_sampled_mode_is_seeded_and_bounded_by_exhaustive():
    H = RGraph(3, 12, [e for e in combinations(range(12), 3) if sum(e) % 3])
    q = DensityQuery(Fraction(1, 2), Fraction(1, 4), "sampled", 300, 5)
    a, b = check_locally_dense(H, q), check_locally_dense(H, q)
    assert (a.worst_set, a.worst_density) == (b.worst_set, b.worst_density)
    exact = check_locally_dense(H, DensityQuery(Fraction(1, 2), Fraction(1, 4)))
    assert a.worst_density >= exact.worst_density
    assert edge_density(H, a.worst_set) == a.worst_density


def test_density_query_validation():
    with pytest.raises(InvalidQuery):
        DensityQuery(Fraction(3, 2), Fraction(1, 2))
    with pytest.raises(InvalidQuery):
        DensityQuery(Fraction(1, 2), 0)
    with pytest.raises(InvalidQuery):
        DensityQuery(Fraction(1, 2), Fraction(1, 2), mode="bogus")


def test_contains_subgraph_examples():
    H = RGraph(3, 6, [(0, 1, 2), (2, 3, 4), (0, 4, 5)])
    edge = RGraph(3, 3, [(0, 1, 2)])
    emb = contains_subgraph(H, edge)
    assert emb is not None and emb.is_valid(edge, H)
    assert contains_subgraph(H, H).is_valid(H, H)
    twins = RGraph(3, 4, [(0, 1, 2), (1, 2, 3)])
    assert is_linear(H)
    assert contains_subgraph(H, twins) is None
    assert not injections_contain(H, twins)
    with pytest.raises(InvalidQuery):
        contains_subgraph(H, RGraph(4, 4, [(0, 1, 2, 3)]))


@given(rgraphs(max_n=7), rgraphs(min_n=3, max_n=5))
def test_contains_subgraph_matches_injection_enumeration(H, F):
    emb = contains_subgraph(H, F)
    assert (emb is not None) == injections_contain(H, F)
    if emb is not None:
        assert emb.is_valid(F, H)


def test_max_pairwise_intersection():
    assert max_pairwise_intersection(RGraph(3, 6, [(0, 1, 2), (3, 4, 5)])) == 0
    assert max_pairwise_intersection(RGraph(3, 4, [(0, 1, 2), (1, 2, 3)])) == 2
    assert max_pairwise_intersection(RGraph(3, 4, [(0, 1, 2)])) == 0


@given(rgraphs(max_n=7))
def test_max_pairwise_intersection_matches_pair_scan(H):
    naive = max((len(set(e) & set(f)) for e, f in combinations(H.edges, 2)), default=0)
    assert max_pairwise_intersection(H) == naive
    assert is_linear(H) == (naive <= 1)


def test_global_density():
    assert global_density(RGraph.complete(4, 6)) == 1
