"""Exact conflict-free chromatic index of small graphs by depth-first search.

Edges are assigned colors in a fixed order with canonical symmetry breaking
(a color may be opened only after all smaller ones are in use).  A branch is
cut when some edge can no longer get a unique color: either its whole
neighborhood is assigned and no color occurs exactly once, or every color
already occurs at least twice in it (multiplicities never drop along a
branch).
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph
from .verify import EdgeColoring, check_structure, verify

__all__ = [
    "SearchConfig",
    "SearchLimitExceeded",
    "EdgeCapExceeded",
    "is_cf_colorable",
    "exact_cf_index",
]

DEFAULT_EDGE_CAP = 21


class SearchLimitExceeded(RuntimeError):
    """The node budget ran out before the search was decided."""


class EdgeCapExceeded(ValueError):
    """The graph has more edges than the configured cap."""


@dataclass(frozen=True)
class SearchConfig:
    max_colors: int | None = None
    node_limit: int = 50_000_000
    mode: str = "closed"
    symmetry_breaking: bool = True
    max_edges: int = DEFAULT_EDGE_CAP

    def __post_init__(self):
        if self.max_colors is not None and self.max_colors < 1:
            raise ValueError("max_colors must be >= 1")
        if self.node_limit <= 0:
            raise ValueError("node_limit must be positive")


def _edge_order(G: Graph) -> list[int]:
    # Sweep vertices in id order, adding each vertex's edges to earlier
    # vertices; neighborhoods of low vertices close early.
    return sorted(range(G.m), key=lambda e: (int(G.edges[e, 1]), int(G.edges[e, 0])))


def is_cf_colorable(G: Graph, q: int, mode: str = "closed", cfg: SearchConfig | None = None):
    """A conflict-free coloring with at most ``q`` colors, or ``None`` if none exists."""
    cfg = cfg or SearchConfig(mode=mode)
    check_structure(G, mode)
    if G.m > cfg.max_edges:
        raise EdgeCapExceeded(f"graph has {G.m} edges, exact search is capped at {cfg.max_edges}")
    if q < 1:
        return None
    m = G.m
    if m == 0:
        return EdgeColoring([])
    open_mode = mode == "open"
    ends = [(int(u), int(v)) for u, v in G.edges]
    order = _edge_order(G)
    pos = {e: i for i, e in enumerate(order)}
    nbhd = []
    for e, (u, v) in enumerate(ends):
        s = set(G.incident_edges(u).tolist()) | set(G.incident_edges(v).tolist())
        if open_mode:
            s.discard(e)
        nbhd.append(sorted(s))
    # edges whose neighborhood contains e: exactly the closed neighborhood of e
    watchers = [[f for f in range(m) if e in nbhd[f]] for e in range(m)]
    closes_at = [[] for _ in range(m)]
    for f in range(m):
        closes_at[max(pos[e] for e in nbhd[f])].append(f)

    # cnt[f][k]: multiplicity of color k in the neighborhood of f
    cnt = [[0] * q for _ in range(m)]
    color = [-1] * m
    nodes = 0
    limit = cfg.node_limit
    sym = cfg.symmetry_breaking

    def dead(f, complete):
        row = cnt[f]
        if complete:
            return 1 not in row
        return min(row) >= 2

    def search(i, used):
        nonlocal nodes
        if i == m:
            return True
        e = order[i]
        top = min(q, used + 1) if sym else q
        closing = set(closes_at[i])  # all of these are watchers of e
        for k in range(top):
            nodes += 1
            if nodes > limit:
                raise SearchLimitExceeded(f"node limit {limit} exhausted at q={q}")
            color[e] = k
            w = watchers[e]
            for f in w:
                cnt[f][k] += 1
            ok = True
            for f in w:
                if dead(f, f in closing):
                    ok = False
                    break
            if ok and search(i + 1, max(used, k + 1)):
                return True
            for f in w:
                cnt[f][k] -= 1
            color[e] = -1
        return False

    if not search(0, 0):
        return None
    c = EdgeColoring(color)
    assert verify(G, c, mode).conflict_free
    return c


def exact_cf_index(G: Graph, mode: str = "closed", cfg: SearchConfig | None = None) -> int:
    """Least ``q`` admitting a conflict-free coloring of ``G``."""
    cfg = cfg or SearchConfig(mode=mode)
    top = cfg.max_colors if cfg.max_colors is not None else max(G.m, 1)
    for q in range(1, top + 1):
        if is_cf_colorable(G, q, mode, cfg) is not None:
            return q
    raise SearchLimitExceeded(f"no conflict-free coloring with at most {top} colors")
