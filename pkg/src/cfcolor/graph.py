"""Simple undirected graphs with lexicographically indexed edges.

Edges are stored as an ``(m, 2)`` integer array with ``u < v`` in each row,
sorted by ``(u, v)``; the row index is the edge id.  Adjacency is a CSR
structure built on first use, so very large random graphs can be generated
and summarised without paying for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "DegreeStats",
    "GraphFormatError",
    "complete_graph",
    "gnp_random",
    "random_regular",
    "path_graph",
    "star_graph",
    "degree_stats",
    "near_regularity_gap",
    "read_graph",
    "write_graph",
]


class GraphFormatError(ValueError):
    """Raised for malformed graph files or invalid edge lists."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "_keys", "_indptr", "_nbr", "_eid", "_deg")

    def __init__(self, n: int, edges=None, *, _trusted: bool = False):
        if n < 0:
            raise GraphFormatError(f"negative vertex count {n}")
        self.n = int(n)
        if edges is None:
            e = np.zeros((0, 2), dtype=np.int64)
        else:
            e = np.asarray(edges, dtype=np.int64)
            if e.size == 0:
                e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise GraphFormatError("edges must be a sequence of vertex pairs")
        if not _trusted:
            if e.size and (e.min() < 0 or e.max() >= n):
                raise GraphFormatError("vertex id out of range")
            if np.any(e[:, 0] == e[:, 1]):
                bad = e[e[:, 0] == e[:, 1]][0]
                raise GraphFormatError(f"self-loop at vertex {int(bad[0])}")
            e = np.sort(e, axis=1)
            keys = e[:, 0] * n + e[:, 1]
            order = np.argsort(keys, kind="stable")
            e, keys = e[order], keys[order]
            dup = np.nonzero(keys[1:] == keys[:-1])[0]
            if dup.size:
                u, v = e[dup[0]]
                raise GraphFormatError(f"duplicate edge {int(u)} {int(v)}")
        else:
            keys = e[:, 0] * n + e[:, 1]
        self.edges = _frozen(np.ascontiguousarray(e))
        self._keys = _frozen(keys)
        self._indptr = None
        self._nbr = None
        self._eid = None
        self._deg = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.m, self._keys[:16].tobytes()))

    @property
    def degrees(self) -> np.ndarray:
        if self._deg is None:
            self._deg = _frozen(
                np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
            )
        return self._deg

    def _build_adjacency(self) -> None:
        m = self.m
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        self._nbr = _frozen(dst[order])
        self._eid = _frozen(eid[order])
        self._indptr = _frozen(indptr)

    @property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, neighbors, edge_ids)``; neighbors sorted per vertex."""
        if self._indptr is None:
            self._build_adjacency()
        return self._indptr, self._nbr, self._eid

    def neighbors(self, v: int) -> np.ndarray:
        indptr, nbr, _ = self.csr
        return nbr[indptr[v]:indptr[v + 1]]

    def incident_edges(self, v: int) -> np.ndarray:
        indptr, _, eid = self.csr
        return eid[indptr[v]:indptr[v + 1]]

    def adjacency(self, v: int) -> list[tuple[int, int]]:
        """Sorted ``(neighbor, edge_id)`` pairs of vertex ``v``."""
        return list(zip(self.neighbors(v).tolist(), self.incident_edges(v).tolist()))

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        if u == v or u < 0 or v >= self.n:
            raise KeyError((u, v))
        key = u * self.n + v
        i = int(np.searchsorted(self._keys, key))
        if i == self.m or self._keys[i] != key:
            raise KeyError((u, v))
        return i

    def edge_ids(self, pairs) -> np.ndarray:
        """Vectorised :meth:`edge_id`; raises ``KeyError`` on a missing pair."""
        p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        p = np.sort(p, axis=1)
        keys = p[:, 0] * self.n + p[:, 1]
        idx = np.searchsorted(self._keys, keys)
        idx_c = np.minimum(idx, max(self.m - 1, 0))
        ok = (idx < self.m) & (p[:, 0] != p[:, 1]) & (p[:, 0] >= 0) & (p[:, 1] < self.n)
        if self.m:
            ok &= self._keys[idx_c] == keys
        if not ok.all():
            bad = p[~ok][0]
            raise KeyError((int(bad[0]), int(bad[1])))
        return idx

    def has_edge(self, u: int, v: int) -> bool:
        try:
            self.edge_id(u, v)
        except KeyError:
            return False
        return True

    def edge_subgraph(self, edge_ids) -> Graph:
        """Graph on the same vertex set keeping the given edges (re-indexed)."""
        ids = np.unique(np.asarray(edge_ids, dtype=np.int64))
        return Graph(self.n, self.edges[ids], _trusted=True)


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    min_degree: int
    histogram: dict[int, int]

    def __post_init__(self):
        assert self.min_degree <= self.max_degree or not self.histogram


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete_graph needs n >= 1")
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.stack([u, v], axis=1).astype(np.int64), _trusted=True)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def gnp_random(n: int, p: float, seed=None) -> Graph:
    """Erdos-Renyi ``G(n, p)``; identical output for identical ``(n, p, seed)``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if p == 1.0:
        return complete_graph(n) if n else Graph(0)
    rng = np.random.default_rng(seed)
    dtype = np.int32 if n < 2**31 else np.int64
    us, vs = [], []
    for u in range(n - 1):
        hit = np.flatnonzero(rng.random(n - u - 1) < p)
        if hit.size:
            us.append(np.full(hit.size, u, dtype=dtype))
            vs.append((hit + (u + 1)).astype(dtype))
    if not us:
        return Graph(n)
    e = np.stack([np.concatenate(us), np.concatenate(vs)], axis=1)
    return Graph(n, e, _trusted=True)


def random_regular(n: int, d: int, seed=None, max_retries: int = 50) -> Graph:
    """Simple ``d``-regular graph from the pairing model.

    Points are paired in shuffled batches; pairs that would form a loop or a
    multi-edge are rejected and returned to the pool.  When the pool stalls,
    the leftover points are placed by edge switches (remove ``xy``, add
    ``ax`` and ``by``), which keeps every degree exact.  A sample that cannot
    be completed is discarded and retried, up to ``max_retries`` times.
    """
    if d < 0 or n < 0:
        raise ValueError("n and d must be nonnegative")
    if (n * d) % 2:
        raise ValueError("n*d must be even")
    if d >= n and not (n == 0 and d == 0):
        raise ValueError("need d < n")
    if d == 0:
        return Graph(n)
    if d > (n - 1) // 2:
        comp = random_regular(n, n - 1 - d, seed, max_retries)
        full = complete_graph(n)
        keep = np.ones(full.m, dtype=bool)
        if comp.m:
            keep[full.edge_ids(comp.edges)] = False
        return Graph(n, full.edges[keep], _trusted=True)
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        edges = _pairing_attempt(n, d, rng)
        if edges is not None:
            return Graph(n, edges)
    raise RuntimeError(f"random_regular({n}, {d}) failed after {max_retries} retries")


def _pairing_attempt(n: int, d: int, rng: np.random.Generator):
    pool = np.repeat(np.arange(n, dtype=np.int64), d)
    present: set[int] = set()
    stalls = 0
    while pool.size and stalls < 20:
        rng.shuffle(pool)
        a, b = pool[0::2], pool[1::2]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = lo * n + hi
        ok = lo != hi
        seen_batch: set[int] = set()
        for j in np.flatnonzero(ok):
            k = int(keys[j])
            if k in present or k in seen_batch:
                ok[j] = False
            else:
                seen_batch.add(k)
        if not ok.any():
            stalls += 1
            continue
        stalls = 0
        present.update(seen_batch)
        pool = np.concatenate([a[~ok], b[~ok]])
    if not pool.size:
        return _keys_to_edges(present, n)

    # switching repair for the stalled remainder
    adj = [set() for _ in range(n)]
    for k in present:
        u, v = divmod(k, n)
        adj[u].add(v)
        adj[v].add(u)
    edge_list = [divmod(k, n) for k in present]
    rest = pool.tolist()
    rng.shuffle(rest)
    while rest:
        a, b = rest.pop(), rest.pop()
        if a != b and b not in adj[a]:
            adj[a].add(b)
            adj[b].add(a)
            edge_list.append((min(a, b), max(a, b)))
            continue
        for _ in range(200 * n):
            j = int(rng.integers(len(edge_list)))
            x, y = edge_list[j]
            if rng.random() < 0.5:
                x, y = y, x
            if x in (a, b) or y in (a, b):
                continue
            if x in adj[a] or y in adj[b]:
                continue
            adj[x].discard(y)
            adj[y].discard(x)
            adj[a].add(x)
            adj[x].add(a)
            adj[b].add(y)
            adj[y].add(b)
            edge_list[j] = (min(a, x), max(a, x))
            edge_list.append((min(b, y), max(b, y)))
            break
        else:
            return None
    return np.array(edge_list, dtype=np.int64)


def _keys_to_edges(keys, n: int) -> np.ndarray:
    k = np.fromiter(keys, dtype=np.int64, count=len(keys))
    return np.stack([k // n, k % n], axis=1)


def degree_stats(G: Graph) -> DegreeStats:
    deg = G.degrees
    if G.n == 0:
        return DegreeStats(0, 0, {})
    values, counts = np.unique(deg, return_counts=True)
    hist = {int(a): int(c) for a, c in zip(values, counts)}
    return DegreeStats(int(deg.max()), int(deg.min()), hist)


def near_regularity_gap(G: Graph) -> int:
    """``delta - (Delta - 2 sqrt(Delta) ln(Delta)^(3/4))`` truncated toward zero.

    Nonnegative exactly when ``G`` is nearly regular in the sense used by the
    nearly-regular construction.
    """
    st = degree_stats(G)
    D = st.max_degree
    if D < 2:
        raise ValueError(f"near-regularity gap undefined for max degree {D} < 2")
    threshold = D - 2.0 * math.sqrt(D) * math.log(D) ** 0.75
    return int(st.min_degree - threshold)


def write_graph(G: Graph, path) -> None:
    lines = [f"p cf {G.n} {G.m}"]
    lines.extend(f"e {u} {v}" for u, v in G.edges.tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> Graph:
    n = m = None
    edges = []
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            tok = line.split()
            if tok[0] == "p":
                if n is not None:
                    raise GraphFormatError(f"line {lineno}: second header")
                if len(tok) != 4 or tok[1] != "cf":
                    raise GraphFormatError(f"line {lineno}: malformed header {line!r}")
                try:
                    n, m = int(tok[2]), int(tok[3])
                except ValueError:
                    raise GraphFormatError(f"line {lineno}: malformed header {line!r}") from None
                if n < 0 or m < 0:
                    raise GraphFormatError(f"line {lineno}: negative counts")
            elif tok[0] == "e":
                if n is None:
                    raise GraphFormatError(f"line {lineno}: edge before header")
                if len(tok) != 3:
                    raise GraphFormatError(f"line {lineno}: malformed edge {line!r}")
                try:
                    u, v = int(tok[1]), int(tok[2])
                except ValueError:
                    raise GraphFormatError(f"line {lineno}: malformed edge {line!r}") from None
                if u == v:
                    raise GraphFormatError(f"line {lineno}: self-loop at {u}")
                if not (0 <= u < n and 0 <= v < n):
                    raise GraphFormatError(f"line {lineno}: vertex id out of range")
                edges.append((u, v))
            else:
                raise GraphFormatError(f"line {lineno}: unknown line type {tok[0]!r}")
    if n is None:
        raise GraphFormatError("missing header")
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    return Graph(n, edges)
