"""Blocker construction and certification for the hat-stack game.

A blocker is a set of tuples meeting every winning set of the dictator game.
Certification is a refutation search: enumerate the second player's table on
the coordinates the blocker touches and ask whether the first player can
dodge every constraint; if no assignment dodges all of them, the set is a
certified blocker, otherwise the dodging partial strategy is returned as a
counterexample.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator

from .errors import UnsupportedSizeError
from .game import Strategy, WinningFamily
from .graphs import Graph, maximum_independent_sets

MAX_CSP_TABLES = 2_000_000


def k_sequence(d: int) -> int:
    """Blocker-size sequence: k(1) = 2, k(d+1) = k(d) * C(2k(d), k(d)).

    Grows as a tower; d = 4 is a number of about 1.3e9 bits and takes a long
    time to materialize, anything beyond is refused.
    """
    if not 1 <= d <= 4:
        raise UnsupportedSizeError(f"k_sequence supports 1 <= d <= 4, got {d}")
    k = 2
    for _ in range(d - 1):
        if k > 1_000_000:
            # math.comb is too slow at this size; factorials use the
            # divide-and-conquer C implementation
            c = math.factorial(2 * k) // (math.factorial(k) ** 2)
        else:
            c = math.comb(2 * k, k)
        k = k * c
    return k


def decrement_bound(k: int, beta) -> Fraction:
    """The guaranteed drop in success probability one blocker family buys:
    2^(-2k-2) * beta / k."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    beta = Fraction(beta)
    if not 0 < beta <= 1:
        raise ValueError(f"need 0 < beta <= 1, got {beta}")
    return beta / (k << (2 * k + 2))


@dataclass
class Blocker:
    t: int
    n: int
    points: tuple[tuple[int, ...], ...]
    certified: bool = False

    def __post_init__(self) -> None:
        if len(set(self.points)) != len(self.points):
            raise ValueError("blocker points must be distinct")

    @property
    def k(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Counterexample:
    """A partial strategy whose winning set avoids the tested point set.

    f1 maps each second coordinate to a 0-based hat index, f2 each first
    coordinate; unconstrained entries may be filled arbitrarily.
    """

    t: int
    n: int
    f1: dict[int, int]
    f2: dict[int, int]

    def to_strategy(self, fill: int = 0) -> Strategy:
        n = self.n
        if self.t == 1:
            choice = next(iter(self.f1.values()))
            return Strategy(n=n, t=1, tables=((choice,),))
        size = 1 << n
        t1 = tuple(self.f1.get(y, fill) for y in range(size))
        t2 = tuple(self.f2.get(x, fill) for x in range(size))
        return Strategy(n=n, t=2, tables=(t1, t2))


@dataclass(frozen=True)
class VerifyResult:
    is_blocker: bool
    counterexample: Counterexample | None
    tables_scanned: int


def _require_dictator(family: WinningFamily) -> None:
    if family.kind != "dictator":
        raise UnsupportedSizeError(
            f"blocker certification supports the dictator family only, got {family.kind}"
        )


def verify_blocker(blocker: Blocker, family: WinningFamily) -> VerifyResult:
    """Certify a blocker or produce an avoiding strategy as a counterexample."""
    _require_dictator(family)
    n = family.n
    if blocker.n != n:
        raise ValueError(f"blocker n={blocker.n} does not match family n={family.n}")
    if blocker.t == 1:
        points = [p[0] for p in blocker.points]
        support = 0
        for x in points:
            support |= x
        full = (1 << n) - 1
        if support == full:
            blocker.certified = True
            return VerifyResult(True, None, n)
        miss = next(i for i in range(n) if not (support >> i & 1))
        return VerifyResult(False, Counterexample(1, n, {0: miss}, {}), n)
    if blocker.t != 2:
        raise UnsupportedSizeError(f"certification supports t in (1, 2), got t={blocker.t}")

    xs = sorted({p[0] for p in blocker.points})
    ys = sorted({p[1] for p in blocker.points})
    by_y: dict[int, list[int]] = {y: [] for y in ys}
    for x, y in blocker.points:
        by_y[y].append(x)
    n_tables = n ** len(xs)
    if n_tables > MAX_CSP_TABLES:
        raise UnsupportedSizeError(
            f"{n_tables} second-player tables exceed the {MAX_CSP_TABLES} budget"
        )
    scanned = 0
    for g in product(range(n), repeat=len(xs)):
        scanned += 1
        g_of = dict(zip(xs, g))
        f1: dict[int, int] = {}
        dodged = True
        for y in ys:
            # constraints (x, y) with y's hat g(x) black are live; the first
            # player must then name a hat that is white on every such x
            live = [x for x in by_y[y] if y >> g_of[x] & 1]
            choice = None
            for c in range(n):
                if all(not (x >> c & 1) for x in live):
                    choice = c
                    break
            if choice is None:
                dodged = False
                break
            f1[y] = choice
        if dodged:
            return VerifyResult(False, Counterexample(2, n, f1, g_of), scanned)
    blocker.certified = True
    return VerifyResult(True, None, scanned)


@dataclass
class StallReport:
    consecutive_rejections: int
    target_beta: Fraction
    achieved_beta: Fraction
    tuples_kept: int


@dataclass
class BlockerFamily:
    """Disjoint equal-size blockers with the exact measure of their union.

    Small families carry their blockers explicitly. Families built as
    products of all complement pairs with kept vector tuples can be too
    large to materialize (2^(n-1) pairs times thousands of tuples), so they
    store the tuples and generate blockers on demand.
    """

    t: int
    n: int
    k: int
    beta: Fraction
    seed: int | None = None
    blockers: tuple[Blocker, ...] | None = None
    tuples: tuple[tuple[int, ...], ...] | None = None
    stalled: bool = False
    stall_report: StallReport | None = None
    certified: bool = False

    MATERIALIZE_LIMIT = 20_000

    @property
    def is_product_form(self) -> bool:
        return self.tuples is not None

    @property
    def blocker_count(self) -> int:
        if self.blockers is not None:
            return len(self.blockers)
        assert self.tuples is not None
        return (1 << (self.n - 1)) * len(self.tuples)

    def pair_list(self) -> list[tuple[int, int]]:
        full = (1 << self.n) - 1
        return [(x, full ^ x) for x in range(1 << (self.n - 1))]

    def iter_blockers(self) -> Iterator[Blocker]:
        if self.blockers is not None:
            yield from self.blockers
            return
        assert self.tuples is not None
        for x, xbar in self.pair_list():
            for ytuple in self.tuples:
                points = tuple((a, y) for a in (x, xbar) for y in ytuple)
                yield Blocker(t=self.t, n=self.n, points=points)

    def materialize(self) -> tuple[Blocker, ...]:
        if self.blockers is None:
            if self.blocker_count > self.MATERIALIZE_LIMIT:
                raise UnsupportedSizeError(
                    f"{self.blocker_count} blockers exceed the materialization "
                    f"limit {self.MATERIALIZE_LIMIT}; iterate instead"
                )
            self.blockers = tuple(self.iter_blockers())
        return self.blockers


def base_blockers(n: int) -> BlockerFamily:
    """The t=1 family: every complement pair {x, xbar}. Union measure 1."""
    if n < 1:
        raise UnsupportedSizeError(f"need n >= 1, got {n}")
    full = (1 << n) - 1
    blockers = tuple(
        Blocker(t=1, n=n, points=((x,), (full ^ x,)))
        for x in range(1 << (n - 1))
    )
    return BlockerFamily(t=1, n=n, k=2, beta=Fraction(1), blockers=blockers)


PARTS = 4  # 2 * k(1)
ELL = 6  # C(4, 2) vectors per partition


def construct_blockers(
    n: int,
    seed: int,
    delta: float | Fraction = 0.15,
    stall_limit: int | None = None,
) -> BlockerFamily:
    """Randomized product construction of t=2 blockers of size k(2) = 12.

    Repeatedly draws a partition of the n coordinates into 4 nonempty parts
    (uniform labels conditioned on nonemptiness), forms the 6 vectors whose
    support is a union of two parts, and keeps the 6-tuple only when all its
    vectors avoid everything kept so far. Stops once the kept vectors cover
    a (1 - delta)/6 fraction of {0,1}^n; every product of a complement pair
    with a kept tuple is a blocker.

    A stalled run (too many consecutive collisions) returns the partial
    family with `stalled` set instead of raising.
    """
    if n < PARTS:
        raise UnsupportedSizeError(
            f"need n >= {PARTS} so the partition can have nonempty parts, got {n}"
        )
    delta = Fraction(delta)
    if not 0 <= delta < 1:
        raise ValueError(f"need 0 <= delta < 1, got {delta}")
    target = Fraction(1, ELL) * (1 - delta)
    size = 1 << n
    expected_tuples = max(1, math.ceil(target * size / ELL))
    if stall_limit is None:
        stall_limit = 50 * expected_tuples

    rng = random.Random(seed)
    covered = 0
    covered_count = 0
    kept: list[tuple[int, ...]] = []
    consecutive = 0
    stalled = False
    while Fraction(covered_count, size) < target:
        labels = [rng.randrange(PARTS) for _ in range(n)]
        parts = [0] * PARTS
        for coord, lab in enumerate(labels):
            parts[lab] |= 1 << coord
        if 0 in parts:
            continue  # conditioning on nonempty parts, not a collision
        ys = tuple(
            sorted(parts[a] | parts[b] for a, b in combinations(range(PARTS), 2))
        )
        if any(covered >> y & 1 for y in ys):
            consecutive += 1
            if consecutive > stall_limit:
                stalled = True
                break
            continue
        consecutive = 0
        for y in ys:
            covered |= 1 << y
        covered_count += ELL
        kept.append(ys)

    beta = Fraction(covered_count, size)
    family = BlockerFamily(
        t=2,
        n=n,
        k=2 * ELL,
        beta=beta,
        seed=seed,
        tuples=tuple(kept),
        stalled=stalled,
        stall_report=StallReport(consecutive, target, beta, len(kept))
        if stalled
        else None,
    )
    if family.blocker_count <= BlockerFamily.MATERIALIZE_LIMIT:
        family.materialize()
    return family


@dataclass(frozen=True)
class FamilyCertification:
    certified: bool
    blockers_covered: int
    oracle_runs: int
    failures: tuple[int, ...]  # indices of failed blockers / tuple classes


def certify_family(family: BlockerFamily, winning: WinningFamily) -> FamilyCertification:
    """Run the certification oracle over a whole family.

    Explicit families are checked blocker by blocker. Product families are
    checked per equivalence class: for a fixed vector tuple Y the refutation
    search over a complement pair {x, xbar} depends only on whether the pair
    is {0, all-ones} (then one side has no white hat at all) or not (then
    zeros(x) and zeros(xbar) are nonempty and disjoint), never on which pair
    it is, so one oracle run per (tuple, pair class) certifies every product.
    """
    _require_dictator(winning)
    if family.blockers is not None:
        runs = 0
        failures = []
        for i, b in enumerate(family.blockers):
            res = verify_blocker(b, winning)
            runs += 1
            if not res.is_blocker:
                failures.append(i)
        cert = not failures
        family.certified = cert
        return FamilyCertification(cert, len(family.blockers), runs, tuple(failures))

    assert family.tuples is not None
    n = family.n
    full = (1 << n) - 1
    generic = (1, full ^ 1)  # any pair avoiding {0, all-ones} behaves the same
    extreme = (0, full)
    runs = 0
    failures = []
    for idx, ytuple in enumerate(family.tuples):
        for pair in (generic, extreme):
            points = tuple((a, y) for a in pair for y in ytuple)
            probe = Blocker(t=2, n=n, points=points)
            res = verify_blocker(probe, winning)
            runs += 1
            if not res.is_blocker:
                failures.append(idx)
                break
    cert = not failures
    family.certified = cert
    return FamilyCertification(cert, family.blocker_count, runs, tuple(failures))


def check_pairwise_disjoint(family: BlockerFamily, sample: int | None = None) -> bool:
    """Exact disjointness check; product families may be spot-checked by sample."""
    if family.blockers is not None:
        seen: set[tuple[int, ...]] = set()
        for b in family.blockers:
            for p in b.points:
                if p in seen:
                    return False
                seen.add(p)
        return True
    assert family.tuples is not None
    # product structure: pairs are disjoint and tuples are disjoint, so the
    # products are disjoint exactly when both component lists are
    pts: set[int] = set()
    for ytuple in family.tuples:
        for y in ytuple:
            if y in pts:
                return False
            pts.add(y)
    if sample:
        rng = random.Random(0)
        picks = [
            (rng.randrange(1 << (family.n - 1)), rng.randrange(len(family.tuples)))
            for _ in range(sample)
        ]
        seen_p: set[tuple[int, ...]] = set()
        pairs = family.pair_list()
        for pi, ti in picks:
            x, xbar = pairs[pi]
            for p in ((a, y) for a in (x, xbar) for y in family.tuples[ti]):
                if p in seen_p:
                    return False
                seen_p.add(p)
    return True


def union_measure(family: BlockerFamily) -> Fraction:
    """Recompute beta by exact union counting."""
    if family.blockers is not None:
        pts = set()
        for b in family.blockers:
            pts.update(b.points)
        return Fraction(len(pts), 1 << (family.n * family.t))
    assert family.tuples is not None
    y_pts = {y for ytuple in family.tuples for y in ytuple}
    # union over all pairs of b x Y = B x (union of tuples)
    return Fraction((1 << family.n) * len(y_pts), 1 << (2 * family.n))


# --- serialization ----------------------------------------------------------


def _flatten(points: tuple[tuple[int, ...], ...], n: int) -> list[int]:
    out = []
    for p in points:
        idx = 0
        for x in p:
            idx = (idx << n) | x
        out.append(idx)
    return out


def _unflatten(idx: int, n: int, t: int) -> tuple[int, ...]:
    mask = (1 << n) - 1
    out = [0] * t
    for i in range(t - 1, -1, -1):
        out[i] = idx & mask
        idx >>= n
    return tuple(out)


def family_to_json(family: BlockerFamily) -> str:
    doc: dict = {
        "t": family.t,
        "n": family.n,
        "k": family.k,
        "beta": f"{family.beta.numerator}/{family.beta.denominator}",
        "seed": family.seed,
        "certified": family.certified,
        "stalled": family.stalled,
    }
    if family.blockers is not None:
        doc["blockers"] = [_flatten(b.points, family.n) for b in family.blockers]
    else:
        assert family.tuples is not None
        doc["product"] = {
            "base": "complement-pairs",
            "tuples": [list(tp) for tp in family.tuples],
        }
        doc["blocker_count"] = family.blocker_count
    return json.dumps(doc, sort_keys=True)


def family_from_json(text: str) -> BlockerFamily:
    doc = json.loads(text)
    num, _, den = doc["beta"].partition("/")
    beta = Fraction(int(num), int(den or 1))
    family = BlockerFamily(
        t=doc["t"],
        n=doc["n"],
        k=doc["k"],
        beta=beta,
        seed=doc.get("seed"),
        stalled=doc.get("stalled", False),
        certified=doc.get("certified", False),
    )
    if "blockers" in doc:
        family.blockers = tuple(
            Blocker(
                t=family.t,
                n=family.n,
                points=tuple(_unflatten(i, family.n, family.t) for i in flat),
            )
            for flat in doc["blockers"]
        )
    else:
        family.tuples = tuple(tuple(tp) for tp in doc["product"]["tuples"])
    return family


# --- graph blockers ---------------------------------------------------------


def min_graph_blocker(g: Graph, limit: int = 200_000) -> tuple[int, tuple[int, ...]]:
    """Smallest vertex set meeting every maximum independent set.

    Exact, by increasing-size search over hitting sets of the full
    enumeration of maximum independent sets.
    """
    sets = maximum_independent_sets(g, limit=limit)
    if not sets:
        return 0, ()

    def extend(chosen: int, remaining: int) -> int | None:
        first_unhit = None
        for s in sets:
            if s & chosen == 0:
                first_unhit = s
                break
        if first_unhit is None:
            return chosen
        if remaining == 0:
            return None
        m = first_unhit
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            got = extend(chosen | (1 << v), remaining - 1)
            if got is not None:
                return got
        return None

    for k in range(len(sets) + 1):
        got = extend(0, k)
        if got is not None:
            verts = []
            m = got
            while m:
                verts.append((m & -m).bit_length() - 1)
                m &= m - 1
            return len(verts), tuple(sorted(verts))
    raise AssertionError("hitting set search failed to terminate")
