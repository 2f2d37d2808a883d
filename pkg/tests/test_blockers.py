"""Blocker construction, certification oracle, bounds, graph blockers."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest

from hatlab.blockers import (
    Blocker,
    base_blockers,
    certify_family,
    check_pairwise_disjoint,
    construct_blockers,
    decrement_bound,
    family_from_json,
    family_to_json,
    k_sequence,
    min_graph_blocker,
    union_measure,
    verify_blocker,
)
from hatlab.errors import UnsupportedSizeError
from hatlab.game import enumerate_family, winning_set
from hatlab.graphs import complete_graph, maximum_independent_sets, shift_graph
from hatlab.solver import exact_p


def brute_force_is_blocker(points: list[tuple[int, int]], n: int) -> bool:
    """Full enumeration over both players' tables on the touched coordinates."""
    xs = sorted({p[0] for p in points})
    ys = sorted({p[1] for p in points})
    for g in product(range(n), repeat=len(xs)):
        g_of = dict(zip(xs, g))
        for f in product(range(n), repeat=len(ys)):
            f_of = dict(zip(ys, f))
            if not any(
                (x >> f_of[y] & 1) and (y >> g_of[x] & 1) for x, y in points
            ):
                return False  # this strategy's winning set avoids every point
    return True


# --- k sequence and decrement bound ----------------------------------------


def test_k_sequence_values():
    assert k_sequence(1) == 2
    assert k_sequence(2) == 12
    assert k_sequence(3) == 32_449_872


def test_k_sequence_budget():
    with pytest.raises(UnsupportedSizeError):
        k_sequence(5)
    with pytest.raises(UnsupportedSizeError):
        k_sequence(0)


def test_decrement_bound_values():
    assert decrement_bound(2, 1) == Fraction(1, 128)
    assert decrement_bound(12, Fraction(1, 6)) == Fraction(1, 6 * 12 * 2**26)


@pytest.mark.parametrize("k", [2, 12])
def test_decrement_bound_corollary_identity(k):
    # with beta = 2/k the bound collapses to 2^(-2k-1) / k^2
    assert decrement_bound(k, Fraction(2, k)) == Fraction(1, k * k * (1 << (2 * k + 1)))


def test_decrement_bound_rejects_bad_args():
    with pytest.raises(ValueError):
        decrement_bound(0, 1)
    with pytest.raises(ValueError):
        decrement_bound(2, 0)
    with pytest.raises(ValueError):
        decrement_bound(2, 2)


def test_finite_n_decrement_check():
    bound = Fraction(1, 2) - decrement_bound(2, 1)
    for n in (1, 2, 3):
        assert exact_p(2, n, "dictator").value <= bound


# --- base blockers ----------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_base_blockers_certify(n):
    fam = base_blockers(n)
    assert fam.k == 2
    assert fam.beta == 1
    assert fam.blocker_count == 1 << (n - 1)
    winning = enumerate_family("dictator", n)
    for b in fam.blockers:
        assert verify_blocker(b, winning).is_blocker
        assert b.certified


def test_base_pairs_are_complements():
    fam = base_blockers(2)
    assert [b.points for b in fam.blockers] == [((0,), (3,)), ((1,), (2,))]


def test_every_dictator_contains_one_point_per_pair():
    n = 3
    fam = base_blockers(n)
    winning = enumerate_family("dictator", n)
    for w in winning.sets:
        for b in fam.blockers:
            hits = sum(1 for (p,) in b.points if w >> p & 1)
            assert hits == 1


def test_singleton_fails_with_counterexample():
    n = 4
    winning = enumerate_family("dictator", n)
    blocker = Blocker(t=1, n=n, points=((0b0101,),))
    res = verify_blocker(blocker, winning)
    assert not res.is_blocker
    cx = res.counterexample
    assert cx is not None
    # the named coordinate is white on the blocker's only point
    assert not (0b0101 >> cx.f1[0] & 1)
    # and the counterexample extends to a strategy whose winning set avoids it
    w = winning_set(cx.to_strategy(), winning)
    assert not (w.bits >> 0b0101 & 1)


def test_all_ones_singleton_is_a_blocker():
    n = 3
    winning = enumerate_family("dictator", n)
    assert verify_blocker(Blocker(t=1, n=n, points=((0b111,),)), winning).is_blocker


# --- two-player certification ----------------------------------------------


def test_t2_counterexample_extends_to_avoiding_strategy():
    n = 3
    winning = enumerate_family("dictator", n)
    # a small set that is clearly not a blocker
    blocker = Blocker(t=2, n=n, points=((1, 1), (2, 2)))
    res = verify_blocker(blocker, winning)
    assert not res.is_blocker
    strategy = res.counterexample.to_strategy()
    w = winning_set(strategy, winning)
    for x, y in blocker.points:
        assert not (w.bits >> ((x << n) | y) & 1)


def test_t2_oracle_agrees_with_full_enumeration():
    n = 4
    winning = enumerate_family("dictator", n)
    rng = random.Random(11)
    for _ in range(25):
        pts = set()
        while len(pts) < 6:
            pts.add((rng.randrange(1, 16), rng.randrange(1, 16)))
        points = tuple(sorted(pts))
        got = verify_blocker(Blocker(t=2, n=n, points=points), winning).is_blocker
        assert got == brute_force_is_blocker(list(points), n)


def test_certified_blockers_meet_random_strategies():
    n = 8
    winning = enumerate_family("dictator", n)
    family = construct_blockers(n, seed=5, delta=0.5)
    cert = certify_family(family, winning)
    assert cert.certified
    rng = random.Random(0)
    blockers = family.materialize()
    for _ in range(10_000):
        b = blockers[rng.randrange(len(blockers))]
        # only table entries on touched coordinates matter
        f1 = {y: rng.randrange(n) for _, y in b.points}
        f2 = {x: rng.randrange(n) for x, _ in b.points}
        assert any(
            (x >> f1[y] & 1) and (y >> f2[x] & 1) for x, y in b.points
        ), "a certified blocker missed a strategy"


# --- construction -----------------------------------------------------------


def test_construct_n8_fully_certified_blocker_by_blocker():
    family = construct_blockers(8, seed=1, delta=0.5)
    assert family.k == 12 == k_sequence(2)
    assert not family.stalled
    winning = enumerate_family("dictator", 8)
    blockers = family.materialize()
    assert all(b.k == family.k for b in blockers)
    assert all(verify_blocker(b, winning).is_blocker for b in blockers)
    assert check_pairwise_disjoint(family)
    assert union_measure(family) == family.beta


def test_construct_degenerate_n4_covers_weight_two_layer():
    family = construct_blockers(4, seed=2, delta=0.5)
    ys = {y for tp in family.tuples for y in tp}
    assert ys == {p for p in range(16) if bin(p).count("1") == 2}
    winning = enumerate_family("dictator", 4)
    for b in family.materialize():
        assert verify_blocker(b, winning).is_blocker
        assert brute_force_is_blocker(list(b.points), 4)


def test_construct_n16_window_and_class_certification():
    family = construct_blockers(16, seed=7, delta=0.15)
    assert family.k == 12
    assert Fraction(85, 100) / 6 <= family.beta <= Fraction(1, 6)
    assert family.blocker_count == (1 << 15) * len(family.tuples)
    assert check_pairwise_disjoint(family, sample=50)
    assert union_measure(family) == family.beta
    cert = certify_family(family, enumerate_family("dictator", 16))
    assert cert.certified
    assert cert.oracle_runs == 2 * len(family.tuples)


def test_product_tuples_cover_every_dictator_pair():
    # the constructive core of certification: whatever two dictators the
    # second player assigns to a complement pair, some kept vector makes
    # both guesses correct at once
    family = construct_blockers(8, seed=1, delta=0.5)
    n = 8
    for ytuple in family.tuples:
        for j1 in range(n):
            for j2 in range(n):
                assert any((y >> j1 & 1) and (y >> j2 & 1) for y in ytuple)


def test_class_certification_matches_direct_oracle_on_samples():
    # one oracle run per (tuple, pair-class) must agree with running the
    # oracle on arbitrary concrete pairs
    family = construct_blockers(16, seed=3, delta=0.8)
    winning = enumerate_family("dictator", 16)
    full = (1 << 16) - 1
    rng = random.Random(4)
    pairs = [(0, full), (1, full ^ 1)]
    pairs += [(x := rng.randrange(1, full), full ^ x) for _ in range(6)]
    for ytuple in family.tuples[:3]:
        results = set()
        for x, xbar in pairs:
            points = tuple((a, y) for a in (x, xbar) for y in ytuple)
            results.add(verify_blocker(Blocker(2, 16, points), winning).is_blocker)
        assert results == {True}


def test_construct_stall_contract():
    family = construct_blockers(16, seed=7, delta=0.15, stall_limit=0)
    assert family.stalled
    assert family.stall_report is not None
    assert family.stall_report.achieved_beta == family.beta
    assert family.beta < family.stall_report.target_beta
    # the partial family still certifies
    cert = certify_family(family, enumerate_family("dictator", 16))
    assert cert.certified


def test_construct_rejects_tiny_n():
    with pytest.raises(UnsupportedSizeError):
        construct_blockers(3, seed=0)


# --- serialization ----------------------------------------------------------


def test_family_json_round_trip_explicit():
    family = construct_blockers(8, seed=1, delta=0.5)
    family.materialize()
    doc = family_to_json(family)
    back = family_from_json(doc)
    assert back.beta == family.beta
    assert back.k == family.k
    assert [b.points for b in back.blockers] == [b.points for b in family.blockers]


def test_family_json_schema_and_flat_indices():
    import json as json_mod

    family = base_blockers(2)
    doc = json_mod.loads(family_to_json(family))
    assert set(doc) == {"t", "n", "k", "beta", "blockers", "seed", "certified", "stalled"}
    assert doc["beta"] == "1/1"
    # tuple indices flatten big-endian: the pair ((1,), (2,)) stays (1, 2) at t=1
    assert doc["blockers"] == [[0, 3], [1, 2]]
    fam2 = construct_blockers(4, seed=2, delta=0.5)
    fam2.materialize()
    doc2 = json_mod.loads(family_to_json(fam2))
    x, y = fam2.blockers[0].points[0]
    assert doc2["blockers"][0][0] == (x << 4) | y


def test_construction_deterministic_per_seed():
    a = construct_blockers(16, seed=7, delta=0.15)
    b = construct_blockers(16, seed=7, delta=0.15)
    assert a.tuples == b.tuples and a.beta == b.beta
    c = construct_blockers(16, seed=8, delta=0.15)
    assert c.tuples != a.tuples


def test_family_json_round_trip_product():
    family = construct_blockers(16, seed=7, delta=0.8)
    doc = family_to_json(family)
    back = family_from_json(doc)
    assert back.tuples == family.tuples
    assert back.blocker_count == family.blocker_count
    assert back.beta == family.beta


# --- graph blockers ---------------------------------------------------------


def test_min_graph_blocker_complete_graph():
    size, witness = min_graph_blocker(complete_graph(4))
    assert size == 4
    assert witness == (0, 1, 2, 3)


def test_min_graph_blocker_shift_graphs_computed_values():
    # exhaustive hitting-set search over all maximum independent sets;
    # shift(4) has 16 of them (6 products and 10 involution-type sets)
    size4, witness4 = min_graph_blocker(shift_graph(4))
    assert size4 == 5
    size6, _ = min_graph_blocker(shift_graph(6))
    assert size6 == 4
    chosen = 0
    for v in witness4:
        chosen |= 1 << v
    assert all(s & chosen for s in maximum_independent_sets(shift_graph(4)))
