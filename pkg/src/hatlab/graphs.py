"""Graph constructions and exact maximum independent set search.

Graphs are immutable: per-vertex adjacency bitsets plus explicit self-loop
flags. Self-looped vertices stay in the vertex set (so indexing matches
{0,1}^n point values everywhere) but are excluded from every independent set.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedSizeError

MAX_KNESER_N = 13
MAX_PRODUCT_VERTICES = 1 << 20
MAX_MIS_VERTICES = 4096
MAX_SHIFT_M = 64


@dataclass(frozen=True)
class Graph:
    vcount: int
    adj: tuple[int, ...]
    self_loop: tuple[bool, ...]
    label: str

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return self.self_loop[u]
        return bool(self.adj[u] >> v & 1)

    def with_edge(self, u: int, v: int) -> "Graph":
        """Copy of the graph with one extra edge (u != v)."""
        if u == v:
            raise ValueError("use self_loop for diagonal entries")
        adj = list(self.adj)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        return Graph(self.vcount, tuple(adj), self.self_loop, f"{self.label}+e")


def _empty_adj(n: int) -> list[int]:
    return [0] * n


def kneser(n: int) -> Graph:
    """Disjointness graph on {0,1}^n; the all-zero vertex is self-adjacent."""
    if not 1 <= n <= MAX_KNESER_N:
        raise UnsupportedSizeError(f"kneser supports 1 <= n <= {MAX_KNESER_N}, got {n}")
    size = 1 << n
    full = size - 1
    adj = _empty_adj(size)
    loop = [False] * size
    for x in range(size):
        # neighbours of x are exactly the submasks of its complement
        comp = full ^ x
        sub = comp
        while True:
            if sub != x:
                adj[x] |= 1 << sub
            if sub == 0:
                break
            sub = (sub - 1) & comp
    loop[0] = True
    return Graph(size, tuple(adj), tuple(loop), f"kneser({n})")


def hamming_product(g: Graph, h: Graph) -> Graph:
    """Cartesian (box) product; vertex (x, v) has index x * h.vcount + v."""
    vcount = g.vcount * h.vcount
    if vcount > MAX_PRODUCT_VERTICES:
        raise UnsupportedSizeError(
            f"product would have {vcount} vertices, over {MAX_PRODUCT_VERTICES}"
        )
    adj = _empty_adj(vcount)
    loop = [False] * vcount
    hv = h.vcount
    for x in range(g.vcount):
        base = x * hv
        gx = g.adj[x]
        for v in range(hv):
            u = base + v
            loop[u] = g.self_loop[x] or h.self_loop[v]
            m = h.adj[v]
            while m:
                w = (m & -m).bit_length() - 1
                adj[u] |= 1 << (base + w)
                m &= m - 1
            m = gx
            while m:
                y = (m & -m).bit_length() - 1
                adj[u] |= 1 << (y * hv + v)
                m &= m - 1
    return Graph(vcount, tuple(adj), tuple(loop), f"product({g.label},{h.label})")


def hamming_power(g: Graph, t: int) -> Graph:
    if t < 1:
        raise UnsupportedSizeError(f"need t >= 1, got {t}")
    out = g
    for _ in range(t - 1):
        out = hamming_product(out, g)
    if t > 1:
        out = Graph(out.vcount, out.adj, out.self_loop, f"power({g.label},{t})")
    return out


def shift_graph(m: int) -> Graph:
    """Vertices are ordered pairs over [m]; (i,j) meets (j,k) whenever i != k.

    The i != k restriction means (i,j)-(j,i) is not an edge and no vertex is
    self-adjacent.
    """
    if not 2 <= m <= MAX_SHIFT_M:
        raise UnsupportedSizeError(f"shift_graph supports 2 <= m <= {MAX_SHIFT_M}, got {m}")
    vcount = m * m
    adj = _empty_adj(vcount)
    for i in range(m):
        for j in range(m):
            u = i * m + j
            for k in range(m):
                if k == i:
                    continue
                v = j * m + k
                if v != u:
                    adj[u] |= 1 << v
                    adj[v] |= 1 << u
    return Graph(vcount, tuple(adj), (False,) * vcount, f"shift({m})")


def complete_graph(m: int) -> Graph:
    full = (1 << m) - 1
    adj = tuple(full ^ (1 << v) for v in range(m))
    return Graph(m, adj, (False,) * m, f"complete({m})")


def edgeless_graph(m: int) -> Graph:
    return Graph(m, (0,) * m, (False,) * m, f"edgeless({m})")


def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with edges drawn pair-by-pair from random.Random(seed)."""
    if not 0 <= p <= 1:
        raise ValueError(f"need 0 <= p <= 1, got {p}")
    if n > 4096:
        raise UnsupportedSizeError(f"random_graph supports n <= 4096, got {n}")
    rng = random.Random(seed)
    adj = _empty_adj(n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return Graph(n, tuple(adj), (False,) * n, f"gnp({n},{p},{seed})")


@dataclass(frozen=True)
class MisResult:
    set_bits: int
    size: int
    alpha_bar: Fraction
    nodes_explored: int

    def vertices(self) -> tuple[int, ...]:
        out = []
        m = self.set_bits
        while m:
            out.append((m & -m).bit_length() - 1)
            m &= m - 1
        return tuple(out)


def _eligible_mask(g: Graph) -> int:
    mask = 0
    for v in range(g.vcount):
        if not g.self_loop[v]:
            mask |= 1 << v
    return mask


def _clique_cover_bound(adj: tuple[int, ...], pool: int) -> int:
    """Greedy partition of the pool into cliques; an IS takes at most one each."""
    cnt = 0
    rem = pool
    while rem:
        v = (rem & -rem).bit_length() - 1
        cand = rem & adj[v]
        rem &= ~(1 << v)
        while cand:
            u = (cand & -cand).bit_length() - 1
            rem &= ~(1 << u)
            cand &= adj[u]
        cnt += 1
    return cnt


def _greedy_lower(adj: tuple[int, ...], pool: int, vcount: int) -> tuple[int, int]:
    order = sorted(
        (v for v in range(vcount) if pool >> v & 1),
        key=lambda v: ((adj[v] & pool).bit_count(), v),
    )
    chosen = 0
    blocked = 0
    for v in order:
        if not (blocked >> v & 1):
            chosen |= 1 << v
            blocked |= adj[v] | (1 << v)
    return chosen.bit_count(), chosen


def _mis_search(adj: tuple[int, ...], pool: int, vcount: int) -> tuple[int, int, int]:
    """Exact max independent set within pool: (size, set_bits, nodes)."""
    best_size, best_set = _greedy_lower(adj, pool, vcount)
    nodes = 0

    def rec(p: int, size: int, chosen: int) -> None:
        nonlocal best_size, best_set, nodes
        nodes += 1
        # peel isolated and degree-1 vertices: always safe to take
        while True:
            changed = False
            m = p
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if not (p >> v & 1):
                    continue
                d = adj[v] & p
                if d == 0:
                    p &= ~(1 << v)
                    chosen |= 1 << v
                    size += 1
                    changed = True
                elif d & (d - 1) == 0:
                    p &= ~(adj[v] | (1 << v))
                    chosen |= 1 << v
                    size += 1
                    changed = True
            if not changed:
                break
        if p == 0:
            if size > best_size:
                best_size, best_set = size, chosen
            return
        if size + _clique_cover_bound(adj, p) <= best_size:
            return
        # branch on a maximum-degree vertex (lowest index on ties)
        bv, bd = -1, -1
        m = p
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            d = (adj[v] & p).bit_count()
            if d > bd:
                bd, bv = d, v
        rec(p & ~adj[bv] & ~(1 << bv), size + 1, chosen | (1 << bv))
        rec(p & ~(1 << bv), size, chosen)

    rec(pool, 0, 0)
    return best_size, best_set, nodes


def _verify_independent(g: Graph, set_bits: int) -> None:
    m = set_bits
    while m:
        v = (m & -m).bit_length() - 1
        m &= m - 1
        if g.self_loop[v]:
            raise AssertionError(f"vertex {v} is self-looped but was selected")
        if g.adj[v] & set_bits:
            raise AssertionError(f"vertex {v} has a neighbour inside the set")


def max_independent_set(g: Graph) -> MisResult:
    """Exact maximum independent set via branch and bound. Always exact."""
    if g.vcount > MAX_MIS_VERTICES:
        raise UnsupportedSizeError(
            f"exact MIS supports up to {MAX_MIS_VERTICES} vertices, got {g.vcount}; "
            "use a sampling lower bound instead"
        )
    size, set_bits, nodes = _mis_search(g.adj, _eligible_mask(g), g.vcount)
    _verify_independent(g, set_bits)
    return MisResult(
        set_bits=set_bits,
        size=size,
        alpha_bar=Fraction(size, g.vcount),
        nodes_explored=nodes,
    )


def mis_size_in_subset(g: Graph, subset: int) -> int:
    """Size of the largest independent set using only vertices in `subset`."""
    size, _, _ = _mis_search(g.adj, subset & _eligible_mask(g), g.vcount)
    return size


def mis_size_all_subsets(g: Graph) -> list[int]:
    """alpha(G[W]) for every W, by subset DP. Needs vcount <= 20."""
    if g.vcount > 20:
        raise UnsupportedSizeError(
            f"subset DP needs vcount <= 20, got {g.vcount}"
        )
    n = g.vcount
    a = [0] * (1 << n)
    adj = g.adj
    loop = g.self_loop
    for w in range(1, 1 << n):
        v = (w & -w).bit_length() - 1
        rest = w & (w - 1)
        if loop[v]:
            a[w] = a[rest]
        else:
            take = 1 + a[w & ~adj[v] & ~(1 << v)]
            skip = a[rest]
            a[w] = take if take > skip else skip
    return a


def inclusion_maximal_independent_sets(g: Graph, limit: int = 200_000) -> list[int]:
    """Every inclusion-maximal independent set (Bron-Kerbosch with pivoting).

    A strictly larger family than maximum_independent_sets; useful when the
    distinction between "largest" and "unextendable" matters.
    """
    eligible = _eligible_mask(g)
    nonadj = [
        eligible & ~g.adj[v] & ~(1 << v) if eligible >> v & 1 else 0
        for v in range(g.vcount)
    ]
    out: list[int] = []

    def bk(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            out.append(r)
            if len(out) > limit:
                raise UnsupportedSizeError(
                    f"more than {limit} maximal independent sets"
                )
            return
        px = p | x
        pivot = (px & -px).bit_length() - 1
        best = -1
        m = px
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            c = (nonadj[u] & p).bit_count()
            if c > best:
                best, pivot = c, u
        cand = p & ~nonadj[pivot]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            bk(r | (1 << v), p & nonadj[v], x & nonadj[v])
            p &= ~(1 << v)
            x |= 1 << v

    bk(0, eligible, 0)
    return sorted(out)


def maximum_independent_sets(g: Graph, limit: int = 200_000) -> list[int]:
    """Every maximum independent set, as bitmasks in ascending order."""
    alpha = max_independent_set(g).size
    pool = _eligible_mask(g)
    adj = g.adj
    out: list[int] = []

    def rec(p: int, size: int, chosen: int) -> None:
        if size + p.bit_count() < alpha:
            return
        if size == alpha:
            out.append(chosen)
            if len(out) > limit:
                raise UnsupportedSizeError(
                    f"more than {limit} maximum independent sets"
                )
            return
        if size + _clique_cover_bound(adj, p) < alpha:
            return
        v = (p & -p).bit_length() - 1
        rec(p & ~adj[v] & ~(1 << v), size + 1, chosen | (1 << v))
        rec(p & ~(1 << v), size, chosen)

    rec(pool, 0, 0)
    return sorted(out)


# --- import / export -------------------------------------------------------

BINARY_MAGIC = b"HLG1"


def graph_to_text(g: Graph) -> str:
    """Adjacency-list text; a vertex listing itself marks a self-loop."""
    lines = [str(g.vcount)]
    for v in range(g.vcount):
        nbrs = []
        if g.self_loop[v]:
            nbrs.append(v)
        m = g.adj[v]
        while m:
            u = (m & -m).bit_length() - 1
            nbrs.append(u)
            m &= m - 1
        lines.append(f"{v}: " + " ".join(str(u) for u in sorted(nbrs)))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str, label: str = "imported") -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    vcount = int(lines[0])
    adj = _empty_adj(vcount)
    loop = [False] * vcount
    for ln in lines[1:]:
        head, _, rest = ln.partition(":")
        v = int(head)
        for tok in rest.split():
            u = int(tok)
            if u == v:
                loop[v] = True
            else:
                adj[v] |= 1 << u
                adj[u] |= 1 << v
    return Graph(vcount, tuple(adj), tuple(loop), label)


def graph_to_bytes(g: Graph) -> bytes:
    """Compact bitset format: magic, u32 vcount, then one row per vertex.

    Each row is ceil(vcount / 8) bytes little-endian; bit v of row u is set
    for an edge u-v, and bit u of row u marks a self-loop.
    """
    row_len = (g.vcount + 7) // 8
    out = [BINARY_MAGIC, struct.pack("<I", g.vcount)]
    for v in range(g.vcount):
        row = g.adj[v] | (1 << v if g.self_loop[v] else 0)
        out.append(row.to_bytes(row_len, "little"))
    return b"".join(out)


def graph_from_bytes(data: bytes, label: str = "imported") -> Graph:
    if data[:4] != BINARY_MAGIC:
        raise ValueError(f"bad magic {data[:4]!r}, expected {BINARY_MAGIC!r}")
    (vcount,) = struct.unpack("<I", data[4:8])
    row_len = (vcount + 7) // 8
    adj = []
    loop = []
    off = 8
    for v in range(vcount):
        row = int.from_bytes(data[off : off + row_len], "little")
        off += row_len
        loop.append(bool(row >> v & 1))
        adj.append(row & ~(1 << v))
    return Graph(vcount, tuple(adj), tuple(loop), label)
