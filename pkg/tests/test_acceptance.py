"""One test per acceptance criterion.  Each records a PASS/FAIL line that
the terminal summary prints at the end of the run."""

import random
import time
from fractions import Fraction
from itertools import combinations, permutations


from oracles import constant_roles_naive, injections_contain, interleaves, mono_scan, role
from uturan.comb_utils import imo_split, monochromatic_subset, monotone_subsequence
from uturan.constructions import (GridVertexMap, random_linear_candidate, split_construction_14,
                                  split_construction_pi)
from uturan.descriptive import (admits_under, enumerate_sequences, graph_admits, head_tail_sequence,
                                is_consistent, z_roles)
from uturan.hypergraph import DensityQuery, RGraph, check_locally_dense, contains_subgraph
from uturan.ordering import Ordering
from uturan.palettes import (Palette, conjecture_zero_predicate, density, derive_seed, generate,
                             generation_properties, head_tail_palette, roles_palette)
from uturan.quasilinear import twin_structure
from uturan.reduced import (blowup, constituent_density, counterexample_k4, homomorphism_exists,
                            is_homomorphism, min_density)

RESULTS: dict[int, str] = {}


def record(n, ok, elapsed, limit, detail):
    within = elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    RESULTS[n] = f"criterion {n:2d}: {status}  {elapsed:.3f}s (limit {limit:g}s)  {detail}"
    print(RESULTS[n])
    assert ok, detail
    assert within, f"took {elapsed:.3f}s, limit {limit:g}s"


def best_time(fn, repeats=5):
    best, value = float("inf"), None
    for _ in range(repeats):
        t = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t)
    return best, value


def test_criterion_1_worked_sequences():
    def run():
        return (is_consistent("XYYXZZYX"), z_roles("XYYXZZYX"),
                is_consistent("YXZXYXZY"), z_roles("YXZXYXZY"))

    elapsed, (c1, r1, c2, r2) = best_time(run)
    ok = c1 and set(r1) == {(3, 4)} and not c2 and r2 == ((2, 5), (2, 4))
    record(1, ok, elapsed, 1e-3, f"XYYXZZYX roles {r1}, YXZXYXZY roles {r2}")


def test_criterion_2_palette_densities():
    t = time.perf_counter()
    palettes = [head_tail_palette(r) for r in (3, 4, 5, 6)] + [roles_palette(3), roles_palette(4)]
    build = time.perf_counter() - t
    elapsed, dens = best_time(lambda: [density(P) for P in palettes])
    expected = [Fraction(1, 4)] * 4 + [Fraction(1, 27), Fraction(1, 46656)]
    record(2, dens == expected, elapsed, 1e-3,
           f"densities {[str(x) for x in dens]} (palette construction {build:.3f}s, untimed)")


def test_criterion_3_counterexample_quarter():
    t = time.perf_counter()
    bad = []
    checked = 0
    for k in (5, 6, 7):
        C = counterexample_k4(k)
        for idx in C.indices():
            checked += 1
            if constituent_density(C, idx) != Fraction(1, 4):
                bad.append((k, idx))
    record(3, not bad, time.perf_counter() - t, 10, f"{checked} constituents, {len(bad)} not 1/4")


def head_tail_violations(G):
    heads, tails = set(), set()
    for e in G.edges:
        heads.add(frozenset(e[:2]))
        tails.add(frozenset(e[-2:]))
    return len(heads & tails)


def role_violations(G):
    pos = {v: v for v in range(G.n)}
    seen, bad = {}, 0
    for e in G.edges:
        for pr in combinations(e, 2):
            if seen.setdefault(pr, role(e, pr, pos)) != role(e, pr, pos):
                bad += 1
    return bad


def test_criterion_4_generator_soundness():
    t = time.perf_counter()
    violations = 0
    for s in range(50):
        for P, count in ((head_tail_palette(3), head_tail_violations), (roles_palette(3), role_violations)):
            G, phi = generate(P, 50, derive_seed(4, s))
            generation_properties(P, G, phi)
            violations += count(G)
    record(4, violations == 0, time.perf_counter() - t, 60, f"50 seeds x 2 palettes, {violations} violations")


def test_criterion_5_sampled_local_density():
    t = time.perf_counter()
    rates = {}
    for name, P, d in (("roles", roles_palette(3), Fraction(1, 27)), ("head-tail", head_tail_palette(3), Fraction(1, 4))):
        holds = 0
        for s in range(50):
            G, _ = generate(P, 60, derive_seed(5, s))
            q = DensityQuery(d, Fraction(1, 4), "sampled", 2000, derive_seed(50, s))
            holds += check_locally_dense(G, q).holds
        rates[name] = holds / 50
    ok = all(r >= 0.95 for r in rates.values())
    record(5, ok, time.perf_counter() - t, 300, f"hold rates {rates}")


def random_linear(rng, u, n, tries):
    used, edges = set(), []
    for _ in range(tries):
        e = tuple(sorted(rng.sample(range(n), u)))
        pairs = set(combinations(e, 2))
        if not pairs & used:
            used |= pairs
            edges.append(e)
    return RGraph(u, n, edges)


def fitting_grid_edge(rng, g, sigmas):
    """A point set with distinct coordinates that reads sigmas[0] along
    axis 0 and sigmas[1] along axis 1."""
    s0, s1 = (s.letters for s in sigmas)
    u = len(s0)
    xs = sorted(rng.sample(range(g.m), u))
    ys = sorted(rng.sample(range(g.m), u))
    slots = {c: [i for i, x in enumerate(s1) if x == c] for c in "XYZ"}
    for c in slots:
        rng.shuffle(slots[c])
    pts = [(xs[i], ys[slots[c].pop()]) for i, c in enumerate(s0)]
    return tuple(sorted(g.index(p) for p in pts))


def add_linear(edges, used, e):
    pairs = set(combinations(e, 2))
    if not pairs & used:
        used |= pairs
        edges.append(e)


def test_criterion_6_constructions():
    t = time.perf_counter()
    rng = random.Random(6)
    failures, nonempty_pi = 0, 0
    for trial in range(100):
        r = 3 if trial % 2 else 4
        u = 2 * r - 2
        Hp = random_linear(rng, u, rng.randint(u, 3 * u), rng.randint(1, 6))
        out = split_construction_14(Hp)
        if twin_structure(out) is None or graph_admits(out, head_tail_sequence(r)) is None:
            failures += 1
        g = GridVertexMap(2 * u, 2)
        sigmas = [rng.choice(enumerate_sequences(r)) for _ in range(2)]
        edges, used = [], set()
        for _ in range(rng.randint(1, 6)):
            add_linear(edges, used, fitting_grid_edge(rng, g, sigmas))
            add_linear(edges, used, tuple(sorted(rng.sample(range(g.size), u))))
        pi = split_construction_pi(RGraph(u, g.size, edges), g, sigmas)
        if len(pi):
            nonempty_pi += 1
            if twin_structure(pi) is None or not all(
                    admits_under(pi, s, g.axis_ordering(a)) for a, s in enumerate(sigmas)):
                failures += 1
    ok = failures == 0 and nonempty_pi == 100
    record(6, ok, time.perf_counter() - t, 120,
           f"100 inputs, {failures} failures, {nonempty_pi} non-empty split-pi outputs")


def test_criterion_7_property_suites():
    t = time.perf_counter()
    rng = random.Random(7)
    bad = {"imo": 0, "monotone": 0, "monochromatic": 0, "containment": 0}
    for _ in range(1000):
        k = rng.randint(1, 6)
        sizes = [rng.randint(1, 30) for _ in range(k)]
        pool = rng.sample(range(10 ** 4), sum(sizes))
        A, at = [], 0
        for s in sizes:
            A.append(set(pool[at:at + s]))
            at += s
        rng.shuffle(pool)
        order = Ordering(pool)
        B = imo_split(A, order)
        if not (all(b <= a and len(b) * k >= len(a) for a, b in zip(A, B)) and not interleaves(B, order)):
            bad["imo"] += 1
    for perm in permutations(range(5)):
        if monotone_subsequence(list(perm), 3) is None:
            bad["monotone"] += 1
    for _ in range(300):
        n, r = rng.randint(3, 10), rng.randint(2, 3)
        m = rng.randint(2, 5)
        col = {e: rng.randrange(2) for e in combinations(range(n), r)}
        if monochromatic_subset(col, n, r, m) != mono_scan(col.__getitem__, n, r, m):
            bad["monochromatic"] += 1
    for _ in range(200):
        nh, nf = rng.randint(3, 8), rng.randint(3, 5)
        H = RGraph(3, nh, [e for e in combinations(range(nh), 3) if rng.random() < 0.5])
        F = RGraph(3, nf, [e for e in combinations(range(nf), 3) if rng.random() < 0.4])
        if (contains_subgraph(H, F) is not None) != injections_contain(H, F):
            bad["containment"] += 1
    record(7, not any(bad.values()), time.perf_counter() - t, 180, f"discrepancies {bad}")


def test_criterion_8_blowups_and_homomorphisms():
    t = time.perf_counter()
    rng = random.Random(8)
    density_ok = True
    for _ in range(20):
        r = rng.choice((3, 4))
        ncol = rng.randint(1, 3)
        K = r * (r - 1) // 2
        pats = frozenset(tuple(rng.randrange(ncol) for _ in range(K)) for _ in range(rng.randint(1, 5)))
        P = Palette(r, tuple(range(ncol)), pats)
        density_ok &= min_density(blowup(P, rng.randint(r, 6))) == density(P)
    P = head_tail_palette(3)
    ident = homomorphism_exists(blowup(P, 5), blowup(P, 5))
    mono = homomorphism_exists(blowup(P, 4), blowup(P, 6), monotone=True)
    maps_ok = ident.exists and mono.exists

    # a homomorphism from blowup(P) restricts to every sub-palette, so the
    # single-pattern palettes decide the question for all |C| = 2 palettes
    C = counterexample_k4(5)
    witnesses, monotone_hits = [], 0
    for bits in range(64):
        pat = tuple((bits >> s) & 1 for s in range(6))
        src = blowup(Palette(4, (0, 1), frozenset([pat])), 5)
        res = homomorphism_exists(src, C)
        if res.exists:
            assert is_homomorphism(src, C, res.homomorphism)
            witnesses.append(pat)
        monotone_hits += homomorphism_exists(src, C, monotone=True).exists
    ok = density_ok and maps_ok and not witnesses
    record(8, ok, time.perf_counter() - t, 600,
           f"densities {'ok' if density_ok else 'WRONG'}, identity/monotone maps {'found' if maps_ok else 'MISSING'}, "
           f"{len(witnesses)}/64 single-pattern blowups map into the counterexample "
           f"(e.g. {witnesses[:2]}), {monotone_hits} with increasing index maps")


def test_criterion_9_constant_role_predicate():
    t = time.perf_counter()
    yes = conjecture_zero_predicate(RGraph(3, 4, [(0, 1, 2), (0, 1, 3)])).holds
    K4m = RGraph(3, 4, [(0, 1, 2), (0, 1, 3), (0, 2, 3)])
    no = conjecture_zero_predicate(K4m).holds
    scanned = sum(1 for _ in permutations(range(4)))
    ok = yes and not no and not constant_roles_naive(K4m) and scanned == 24
    record(9, ok, time.perf_counter() - t, 1, f"two-edge graph {yes}, K4 minus an edge {no} ({scanned} orderings scanned)")


def test_criterion_10_removed_edge_bound():
    t = time.perf_counter()
    n = 2000
    within = [random_linear_candidate(n, 4, derive_seed(10, s)).removed_count <= n ** 1.25 for s in range(30)]
    rate = sum(within) / 30
    record(10, rate >= 0.9, time.perf_counter() - t, 120, f"bound met in {sum(within)}/30 seeds")
