"""Graph constructions, exact MIS, and the import/export formats."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from hatlab.errors import UnsupportedSizeError
from hatlab.graphs import (
    Graph,
    complete_graph,
    edgeless_graph,
    graph_from_bytes,
    graph_from_text,
    graph_to_bytes,
    graph_to_text,
    hamming_power,
    hamming_product,
    kneser,
    max_independent_set,
    maximum_independent_sets,
    mis_size_in_subset,
    random_graph,
    shift_graph,
)

# gnp(8, 0.5, 42), frozen from the first run of the seeded generator
GNP_8_05_42_EDGES = [
    (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (1, 5), (1, 7),
    (2, 3), (2, 6), (3, 5), (4, 5), (4, 6), (5, 6), (5, 7), (6, 7),
]


def brute_force_alpha(g: Graph) -> int:
    best = 0
    for mask in range(1 << g.vcount):
        ok = True
        m = mask
        while m and ok:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if g.self_loop[v] or g.adj[v] & mask:
                ok = False
        if ok:
            best = max(best, mask.bit_count())
    return best


# --- kneser -----------------------------------------------------------------


def test_kneser_1():
    g = kneser(1)
    assert g.vcount == 2
    assert g.self_loop == (True, False)
    assert g.adj[0] == 0b10 and g.adj[1] == 0b01


def test_kneser_2_edges():
    g = kneser(2)
    # 01 and 10 are disjoint; 0 is disjoint from everything and itself
    assert g.has_edge(1, 2)
    assert not g.has_edge(1, 3) and not g.has_edge(2, 3)
    assert all(g.has_edge(0, v) for v in (1, 2, 3))
    assert g.self_loop[0] and not any(g.self_loop[1:])


def test_kneser_3_edge_count_recount():
    g = kneser(3)
    count = sum(
        1
        for x in range(8)
        for y in range(x + 1, 8)
        if x & y == 0
    )
    assert g.edge_count() == count


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kneser_alpha_is_half(n):
    res = max_independent_set(kneser(n))
    assert res.size == 1 << (n - 1)
    assert res.alpha_bar == Fraction(1, 2)


def test_kneser_budget():
    with pytest.raises(UnsupportedSizeError):
        kneser(14)


# --- products ---------------------------------------------------------------


def test_product_of_single_edges_is_four_cycle():
    k2 = Graph(2, (0b10, 0b01), (False, False), "K2")
    c4 = hamming_product(k2, k2)
    assert c4.vcount == 4
    assert c4.edge_count() == 4
    assert all(c4.degree(v) == 2 for v in range(4))
    # opposite corners (0,0)-(1,1) and (0,1)-(1,0) are not adjacent
    assert not c4.has_edge(0, 3) and not c4.has_edge(1, 2)


def test_product_self_loops_inherited_fiberwise():
    g = hamming_product(kneser(1), kneser(1))
    # vertex (x, v) is self looped iff x == 0 or v == 0
    assert [g.self_loop[i] for i in range(4)] == [True, True, True, False]


def test_product_edges_match_definition():
    g, h = kneser(2), kneser(1)
    p = hamming_product(g, h)
    for x in range(g.vcount):
        for v in range(h.vcount):
            for y in range(g.vcount):
                for u in range(h.vcount):
                    a, b = x * h.vcount + v, y * h.vcount + u
                    if a == b:
                        continue
                    expected = (x == y and h.has_edge(v, u) and v != u) or (
                        v == u and g.has_edge(x, y) and x != y
                    )
                    assert p.has_edge(a, b) == expected


def test_product_associativity_is_the_identity_indexing():
    a, b, c = kneser(1), kneser(2), complete_graph(3)
    left = hamming_product(hamming_product(a, b), c)
    right = hamming_product(a, hamming_product(b, c))
    assert left.adj == right.adj
    assert left.self_loop == right.self_loop


def test_power_one_is_identity():
    g = kneser(2)
    assert hamming_power(g, 1).adj == g.adj


def test_fiber_bound():
    for g, h in [(kneser(2), kneser(3)), (shift_graph(4), kneser(2))]:
        ab = max_independent_set(hamming_product(g, h)).alpha_bar
        assert ab <= min(
            max_independent_set(g).alpha_bar, max_independent_set(h).alpha_bar
        )


def test_power_monotone_in_t():
    # kneser(3)^3 at 512 vertices exceeds the practical branch-and-bound
    # budget, so the grid stops at (n=2, t=3) and (n=3, t=2)
    for n, tmax in [(2, 3), (3, 2)]:
        values = [
            max_independent_set(hamming_power(kneser(n), t)).alpha_bar
            for t in range(1, tmax + 1)
        ]
        assert values == sorted(values, reverse=True)


# --- shift graph ------------------------------------------------------------


def test_shift_graph_matches_definition_loop():
    for m in (2, 3, 4):
        g = shift_graph(m)
        edges = set()
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    if i != k:
                        u, v = i * m + j, j * m + k
                        if u != v:
                            edges.add((min(u, v), max(u, v)))
        got = {
            (u, v)
            for u in range(g.vcount)
            for v in range(u + 1, g.vcount)
            if g.has_edge(u, v)
        }
        assert got == edges
        assert not any(g.self_loop)


def test_shift_reversed_pair_is_not_an_edge():
    g = shift_graph(4)
    assert not g.has_edge(0 * 4 + 1, 1 * 4 + 0)


@pytest.mark.parametrize("m", [4, 6])
def test_shift_alpha_quarter(m):
    assert max_independent_set(shift_graph(m)).alpha_bar == Fraction(1, 4)


def test_shift_product_set_is_independent():
    # A x B for the equipartition A = {0, 1}, B = {2, 3}
    g = shift_graph(4)
    cells = [a * 4 + b for a in (0, 1) for b in (2, 3)]
    for u, v in combinations(cells, 2):
        assert not g.has_edge(u, v)
    assert max_independent_set(g).size == len(cells)


# --- random graphs ----------------------------------------------------------


def test_random_graph_extremes():
    assert random_graph(6, 0.0, 1).edge_count() == 0
    assert random_graph(6, 1.0, 1).edge_count() == 15


def test_random_graph_golden_and_reproducible():
    g = random_graph(8, 0.5, 42)
    edges = [
        (u, v) for u in range(8) for v in range(u + 1, 8) if g.adj[u] >> v & 1
    ]
    assert edges == GNP_8_05_42_EDGES
    assert random_graph(8, 0.5, 42).adj == g.adj
    assert random_graph(8, 0.5, 43).adj != g.adj


# --- MIS --------------------------------------------------------------------


def test_mis_matches_brute_force_on_small_graphs():
    rng = random.Random(5)
    graphs = [kneser(2), kneser(3), shift_graph(3), complete_graph(5), edgeless_graph(6)]
    graphs += [random_graph(n, p, rng.randrange(1000)) for n in (8, 10, 12) for p in (0.2, 0.5, 0.8)]
    graphs.append(hamming_product(kneser(2), kneser(2)))
    graphs.append(random_graph(18, 0.4, 21))
    for g in graphs:
        res = max_independent_set(g)
        assert res.size == brute_force_alpha(g), g.label


def test_mis_certificate_verified_against_adjacency():
    g = random_graph(20, 0.3, 9)
    res = max_independent_set(g)
    assert res.set_bits.bit_count() == res.size
    for v in res.vertices():
        assert not g.self_loop[v]
        assert g.adj[v] & res.set_bits == 0


def test_mis_excludes_self_loops():
    g = kneser(3)
    res = max_independent_set(g)
    assert not (res.set_bits & 1)  # the all-zero vertex never participates


def test_mis_size_in_subset_consistent():
    g = shift_graph(3)
    rng = random.Random(1)
    for _ in range(30):
        w = rng.getrandbits(g.vcount)
        sub_adj = tuple(g.adj[v] & w if w >> v & 1 else 0 for v in range(g.vcount))
        sub = Graph(g.vcount, sub_adj, tuple(
            g.self_loop[v] if w >> v & 1 else True for v in range(g.vcount)
        ), "sub")
        assert mis_size_in_subset(g, w) == brute_force_alpha(sub)


def test_inclusion_maximal_independent_sets():
    from hatlab.graphs import inclusion_maximal_independent_sets

    # brute-force oracle on small graphs
    for g in (kneser(2), shift_graph(3), complete_graph(4), random_graph(9, 0.4, 6)):
        expected = []
        for mask in range(1 << g.vcount):
            ok = True
            m = mask
            while m and ok:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if g.self_loop[v] or g.adj[v] & mask:
                    ok = False
            if not ok:
                continue
            extendable = any(
                not g.self_loop[u]
                and not (mask >> u & 1)
                and g.adj[u] & mask == 0
                for u in range(g.vcount)
            )
            if not extendable:
                expected.append(mask)
        assert inclusion_maximal_independent_sets(g) == sorted(expected), g.label


def test_maximal_vs_maximum_counts_shift4():
    # every maximum set is maximal but not conversely; at m=4 the maximum
    # family has 16 members while inclusion-maximal sets are strictly more
    from hatlab.graphs import inclusion_maximal_independent_sets

    g = shift_graph(4)
    maximal = inclusion_maximal_independent_sets(g)
    maximum = maximum_independent_sets(g)
    assert set(maximum) <= set(maximal)
    assert len(maximal) > len(maximum) == 16


def test_maximum_independent_sets_enumeration():
    g = complete_graph(4)
    assert maximum_independent_sets(g) == [0b0001, 0b0010, 0b0100, 0b1000]
    sets4 = maximum_independent_sets(shift_graph(4))
    assert len(sets4) == 16  # 6 equipartition products plus 10 involution sets
    assert all(s.bit_count() == 4 for s in sets4)
    sets6 = maximum_independent_sets(shift_graph(6))
    assert len(sets6) == 20
    assert all(s.bit_count() == 9 for s in sets6)


def test_mis_budget():
    with pytest.raises(UnsupportedSizeError):
        max_independent_set(Graph(5000, (0,) * 5000, (False,) * 5000, "big"))


# --- io ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "g", [kneser(3), shift_graph(4), random_graph(9, 0.4, 3), edgeless_graph(5)]
)
def test_text_round_trip(g):
    back = graph_from_text(graph_to_text(g))
    assert back.vcount == g.vcount
    assert back.adj == g.adj
    assert back.self_loop == g.self_loop


@pytest.mark.parametrize(
    "g", [kneser(3), shift_graph(4), random_graph(9, 0.4, 3), complete_graph(1)]
)
def test_binary_round_trip(g):
    data = graph_to_bytes(g)
    assert data[:4] == b"HLG1"
    back = graph_from_bytes(data)
    assert back.vcount == g.vcount
    assert back.adj == g.adj
    assert back.self_loop == g.self_loop


def test_binary_format_golden_bytes():
    # kneser(1): two vertices, edge 0-1, self-loop on 0. Row bytes are
    # little-endian with the diagonal bit marking the loop.
    data = graph_to_bytes(kneser(1))
    assert data == b"HLG1" + (2).to_bytes(4, "little") + bytes([0b11, 0b01])
