"""Exact and heuristic optimization of the game's success probability.

The two-player exact engine enumerates only the second player's table and
answers the first player pointwise-optimally, which collapses the search
space from r^(2*2^n) to r^(2^n). The three-player engine applies the same
reduction one level up: it enumerates the last player's table and best-responds
with an entire two-player winning set per visible point.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import MalformedPartitionError, UnsupportedSizeError
from .game import (
    Strategy,
    WinningFamily,
    constant_strategy,
    enumerate_family,
    sets_intersecting_point,
    success_probability,
    tuple_from_index,
    visible_index,
)
from .parallel import chunked, ordered_map

MAX_P2_TABLES = 70_000
MAX_TABLE_INPUT_BITS = 16
MAX_EVAL_BITS = 20


@dataclass(frozen=True)
class SolveResult:
    value: Fraction
    witness: Strategy
    method: str
    work: int


@dataclass(frozen=True)
class PartitionView:
    """The partition of player 1's space induced by a fixed player-2 table.

    cells[i] is the bitmask of points x with f_2(x) = i.
    """

    n: int
    cells: tuple[int, ...]

    def validate(self) -> None:
        full = (1 << (1 << self.n)) - 1
        seen = 0
        for c in self.cells:
            if c & seen:
                raise MalformedPartitionError("partition cells overlap")
            seen |= c
        if seen != full:
            raise MalformedPartitionError("partition cells do not cover the ground set")


def partition_from_table(table: tuple[int, ...], r: int, n: int) -> PartitionView:
    cells = [0] * r
    for x, i in enumerate(table):
        cells[i] |= 1 << x
    return PartitionView(n=n, cells=tuple(cells))


def _response_masks(family: WinningFamily) -> list[int]:
    """For each point x2, the bitmask of family indices whose set contains x2."""
    return [sets_intersecting_point(family, x2) for x2 in range(1 << family.n)]


def _best_response_total(
    cells: tuple[int, ...] | list[int], family: WinningFamily, rmasks: list[int]
) -> tuple[int, list[int]]:
    """Pointwise-optimal response to a fixed partition.

    Returns the total count of winning pairs (over 2^(2n) tuples) and the
    first player's argmax table, ties broken toward the lowest family index.
    """
    sets = family.sets
    total = 0
    f1 = []
    for rm in rmasks:
        u = 0
        i = 0
        m = rm
        while m:
            if m & 1:
                u |= cells[i]
            m >>= 1
            i += 1
        best = -1
        best_i = 0
        for j, w in enumerate(sets):
            c = (w & u).bit_count()
            if c > best:
                best = c
                best_i = j
        total += best
        f1.append(best_i)
    return total, f1


def best_response_value(partition: PartitionView, family: WinningFamily) -> Fraction:
    """Expected optimal-response success for a fixed player-2 partition (t=2)."""
    if partition.n != family.n:
        raise MalformedPartitionError(
            f"partition n={partition.n} does not match family n={family.n}"
        )
    if len(partition.cells) != family.r:
        raise MalformedPartitionError(
            f"partition has {len(partition.cells)} cells, family has r={family.r}"
        )
    partition.validate()
    total, _ = _best_response_total(partition.cells, family, _response_masks(family))
    return Fraction(total, 1 << (2 * family.n))


def _exact_p1(family: WinningFamily) -> SolveResult:
    best_i = 0
    best = -1
    for i, w in enumerate(family.sets):
        c = w.bit_count()
        if c > best:
            best = c
            best_i = i
    value = Fraction(best, 1 << family.n)
    return SolveResult(
        value=value,
        witness=constant_strategy(family, 1, best_i),
        method="exhaustive",
        work=family.r,
    )


def _exact_forced(family: WinningFamily, t: int) -> SolveResult:
    # r = 1: a unique strategy exists; evaluate it directly.
    witness = constant_strategy(family, t, 0)
    return SolveResult(
        value=success_probability(witness, family),
        witness=witness,
        method="exhaustive",
        work=1,
    )


def _exact_p2_enumerate(family: WinningFamily, threads: int) -> SolveResult:
    n, r = family.n, family.r
    size = 1 << n
    rmasks = _response_masks(family)
    tables = list(product(range(r), repeat=size))

    def scan(chunk: list[tuple[int, ...]]) -> tuple[int, tuple[int, ...] | None]:
        best = -1
        best_table = None
        cells = [0] * r
        for table in chunk:
            for i in range(r):
                cells[i] = 0
            for x, fi in enumerate(table):
                cells[fi] |= 1 << x
            total = 0
            for rm in rmasks:
                u = 0
                m = rm
                i = 0
                while m:
                    if m & 1:
                        u |= cells[i]
                    m >>= 1
                    i += 1
                b = 0
                for w in family.sets:
                    c = (w & u).bit_count()
                    if c > b:
                        b = c
                total += b
            if total > best:
                best = total
                best_table = table
        return best, best_table

    results = ordered_map(scan, chunked(tables, threads * 8), threads)
    best, best_table = -1, None
    for total, table in results:
        if total > best:
            best, best_table = total, table
    assert best_table is not None
    total, f1 = _best_response_total(
        partition_from_table(best_table, r, n).cells, family, rmasks
    )
    witness = Strategy(n=n, t=2, tables=(tuple(f1), best_table))
    return SolveResult(
        value=Fraction(best, 1 << (2 * n)),
        witness=witness,
        method="best-response-exact",
        work=len(tables),
    )


def _exact_p2_branch_bound(family: WinningFamily, threads: int) -> SolveResult:
    """Exact t=2 optimum for table spaces too large to enumerate.

    Depth-first over f_2 entries with an admissible bound: unassigned points
    may still land in any cell, so each x2 term is bounded by the best
    response against assigned cells plus all unassigned points. The bound is
    weak near the root, so the 4^16-table dictator stretch at n=4 can take
    hours; that is the price of exactness behind the allow_slow gate.
    """
    n, r = family.n, family.r
    size = 1 << n
    rmasks = _response_masks(family)
    full = (1 << size) - 1

    seed_result = local_search_p(2, n, family.kind, seed=0, restarts=16, threads=threads)
    incumbent = int(seed_result.value * (1 << (2 * n)))
    incumbent_table: tuple[int, ...] | None = None
    work = 0

    def bound(cells: list[int], rest: int) -> int:
        tot = 0
        for rm in rmasks:
            u = rest
            m = rm
            i = 0
            while m:
                if m & 1:
                    u |= cells[i]
                m >>= 1
                i += 1
            b = 0
            for w in family.sets:
                c = (w & u).bit_count()
                if c > b:
                    b = c
            tot += b
        return tot

    cells = [0] * r
    assignment = [0] * size

    def rec(x: int) -> None:
        nonlocal incumbent, incumbent_table, work
        work += 1
        rest = full ^ ((1 << x) - 1)
        if bound(cells, rest) <= incumbent:
            return
        if x == size:
            total = bound(cells, 0)
            if total > incumbent:
                incumbent = total
                incumbent_table = tuple(assignment)
            return
        for v in range(r):
            cells[v] |= 1 << x
            assignment[x] = v
            rec(x + 1)
            cells[v] &= ~(1 << x)

    rec(0)
    if incumbent_table is None:
        # local search already found the optimum; rebuild its table
        incumbent_table = seed_result.witness.tables[1]
    total, f1 = _best_response_total(
        partition_from_table(incumbent_table, r, n).cells, family, rmasks
    )
    witness = Strategy(n=n, t=2, tables=(tuple(f1), incumbent_table))
    return SolveResult(
        value=Fraction(total, 1 << (2 * n)),
        witness=witness,
        method="best-response-exact",
        work=work,
    )


def _two_player_winning_masks(family: WinningFamily) -> list[tuple[int, tuple, tuple]]:
    """All distinct two-player winning sets as masks over B^2.

    Each mask carries its lexicographically first (f1, f2) table pair so a
    witness strategy can be rebuilt later.
    """
    n, r = family.n, family.r
    size = 1 << n
    sets = family.sets
    reps: dict[int, tuple[tuple, tuple]] = {}
    for f1 in product(range(r), repeat=size):
        for f2 in product(range(r), repeat=size):
            w = 0
            for x1 in range(size):
                w1 = sets[f2[x1]]
                for x2 in range(size):
                    if (sets[f1[x2]] >> x1 & 1) and (w1 >> x2 & 1):
                        w |= 1 << ((x1 << n) | x2)
            reps.setdefault(w, (f1, f2))
    return [(w, reps[w][0], reps[w][1]) for w in sorted(reps)]


def _exact_p3(family: WinningFamily, threads: int) -> SolveResult:
    n, r = family.n, family.r
    size = 1 << n
    pair_space = 1 << (2 * n)
    if r ** size > 300 or r ** pair_space > 70_000:
        raise UnsupportedSizeError(
            f"t=3 exact solving supports n=2 (r={r} gives {r ** pair_space} last-player tables)"
        )
    wlist = _two_player_winning_masks(family)
    rmasks = _response_masks(family)
    masks = [w for w, _, _ in wlist]

    cache: dict[int, tuple[int, int]] = {}

    def best_against(u: int) -> tuple[int, int]:
        hit = cache.get(u)
        if hit is None:
            b, bi = -1, 0
            for i, w in enumerate(masks):
                c = (w & u).bit_count()
                if c > b:
                    b, bi = c, i
            hit = cache[u] = (b, bi)
        return hit

    tables = list(product(range(r), repeat=pair_space))

    def scan(chunk) -> tuple[int, tuple | None]:
        best, best_table = -1, None
        cells = [0] * r
        for table in chunk:
            for i in range(r):
                cells[i] = 0
            for x, fi in enumerate(table):
                cells[fi] |= 1 << x
            total = 0
            for rm in rmasks:
                u = 0
                m = rm
                i = 0
                while m:
                    if m & 1:
                        u |= cells[i]
                    m >>= 1
                    i += 1
                total += best_against(u)[0]
            if total > best:
                best, best_table = total, table
        return best, best_table

    results = ordered_map(scan, chunked(tables, threads * 8), threads)
    best, best_table = -1, None
    for total, table in results:
        if total > best:
            best, best_table = total, table
    assert best_table is not None

    # rebuild a full three-player witness from the per-x3 best two-player sets
    cells = [0] * r
    for x, fi in enumerate(best_table):
        cells[fi] |= 1 << x
    f1_table = [0] * pair_space  # player 1 sees (x2, x3)
    f2_table = [0] * pair_space  # player 2 sees (x1, x3)
    for x3 in range(size):
        rm = rmasks[x3]
        u = 0
        i = 0
        m = rm
        while m:
            if m & 1:
                u |= cells[i]
            m >>= 1
            i += 1
        _, wi = best_against(u)
        _, g1, g2 = wlist[wi]
        for x2 in range(size):
            f1_table[(x2 << n) | x3] = g1[x2]
        for x1 in range(size):
            f2_table[(x1 << n) | x3] = g2[x1]
    witness = Strategy(
        n=n, t=3, tables=(tuple(f1_table), tuple(f2_table), best_table)
    )
    value = Fraction(best, 1 << (3 * n))
    check = success_probability(witness, family)
    if check != value:
        raise AssertionError(
            f"t=3 witness re-evaluates to {check}, engine claimed {value}"
        )
    return SolveResult(
        value=value, witness=witness, method="best-response-exact", work=len(tables)
    )


def exact_p(
    t: int,
    n: int,
    kind: str = "dictator",
    *,
    allow_slow: bool = False,
    threads: int = 1,
) -> SolveResult:
    """Exact optimum success probability with an optimal witness strategy.

    Supported budgets: t=1 (any enumerable family); n=1 (any t up to 20);
    t=2 up to r^(2^n) <= 70000 second-player tables (n <= 3 for the three
    standard kinds), plus a branch-and-bound stretch for larger t=2 spaces
    and the t=3, n=2 engine, both behind allow_slow.
    """
    if t < 1:
        raise UnsupportedSizeError(f"need t >= 1, got t={t}")
    family = enumerate_family(kind, n)
    if t == 1:
        return _exact_p1(family)
    if n == 1:
        if t > 20:
            raise UnsupportedSizeError(f"n=1 games support t <= 20, got t={t}")
        return _exact_forced(family, t)
    if t == 2:
        n_tables = family.r ** (1 << n)
        if n_tables <= MAX_P2_TABLES:
            return _exact_p2_enumerate(family, threads)
        if allow_slow and n <= 4:
            return _exact_p2_branch_bound(family, threads)
        raise UnsupportedSizeError(
            f"t=2 exact solving enumerates {n_tables} tables for (n={n}, {kind}), "
            f"over the {MAX_P2_TABLES} budget; pass allow_slow=True (n <= 4) "
            f"or use local_search_p"
        )
    if t == 3 and n == 2:
        if not allow_slow:
            raise UnsupportedSizeError(
                "t=3 exact solving is gated behind allow_slow=True"
            )
        return _exact_p3(family, threads)
    raise UnsupportedSizeError(
        f"exact_p has no engine for (t={t}, n={n}, {kind}); use local_search_p"
    )


def _restart_seed(seed: int, restart: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{restart}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def local_search_p(
    t: int,
    n: int,
    kind: str = "dictator",
    seed: int = 0,
    restarts: int = 32,
    *,
    threads: int = 1,
) -> SolveResult:
    """Best-response coordinate ascent from random tables.

    Lower-bound certificate generator: the returned value is the exact
    success probability of the returned witness, never an estimate.
    Deterministic for a fixed seed, independent of thread count.
    """
    if t < 2:
        raise UnsupportedSizeError("local search needs t >= 2; t=1 is exact anyway")
    if n * (t - 1) > MAX_TABLE_INPUT_BITS:
        raise UnsupportedSizeError(
            f"table input space 2^{n * (t - 1)} exceeds 2^{MAX_TABLE_INPUT_BITS}"
        )
    if n * t > MAX_EVAL_BITS:
        raise UnsupportedSizeError(
            f"tuple space 2^{n * t} exceeds the 2^{MAX_EVAL_BITS} evaluation budget"
        )
    family = enumerate_family(kind, n)
    size = 1 << n
    entries = 1 << (n * (t - 1))
    sets = family.sets

    def ascend(restart: int) -> tuple[Fraction, Strategy, int]:
        rng = random.Random(_restart_seed(seed, restart))
        tables = [
            [rng.randrange(family.r) for _ in range(entries)] for _ in range(t)
        ]
        sweeps = 0
        changed = True
        while changed:
            changed = False
            sweeps += 1
            for i in range(t):
                for vis in range(entries):
                    seen = tuple_from_index(vis, n, t - 1)
                    consistent = 0
                    for xi in range(size):
                        points = seen[:i] + (xi,) + seen[i:]
                        ok = True
                        for j in range(t):
                            if j == i:
                                continue
                            cj = tables[j][visible_index(points, j, n)]
                            if not (sets[cj] >> points[j] & 1):
                                ok = False
                                break
                        if ok:
                            consistent |= 1 << xi
                    best, best_j = -1, 0
                    for j, w in enumerate(sets):
                        c = (w & consistent).bit_count()
                        if c > best:
                            best, best_j = c, j
                    if tables[i][vis] != best_j:
                        tables[i][vis] = best_j
                        changed = True
        strategy = Strategy(n=n, t=t, tables=tuple(tuple(tb) for tb in tables))
        return success_probability(strategy, family), strategy, sweeps

    results = ordered_map(ascend, list(range(restarts)), threads)
    best_value, best_strategy, _ = results[0]
    for value, strategy, _ in results[1:]:
        if value > best_value:
            best_value, best_strategy = value, strategy
    return SolveResult(
        value=best_value,
        witness=best_strategy,
        method="local-search",
        work=sum(r[2] for r in results),
    )


def dominance_chain(
    t: int, n: int, *, allow_slow: bool = False, threads: int = 1
) -> tuple[Fraction, Fraction, Fraction]:
    """(p_dict, p_intersecting, p_monotone) at (t, n), checked non-decreasing."""
    p_dict = exact_p(t, n, "dictator", allow_slow=allow_slow, threads=threads).value
    p_int = exact_p(t, n, "intersecting", allow_slow=allow_slow, threads=threads).value
    p_mono = exact_p(t, n, "monotone", allow_slow=allow_slow, threads=threads).value
    if not p_dict <= p_int <= p_mono:
        raise RuntimeError(
            f"dominance chain violated at (t={t}, n={n}): "
            f"dict={p_dict}, intersecting={p_int}, monotone={p_mono}"
        )
    return p_dict, p_int, p_mono
