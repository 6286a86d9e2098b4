"""Conflict-free satisfaction checks for (partial) edge colorings.

An edge is satisfied when some color occurs exactly once among the colored
edges of its neighborhood: the closed neighborhood (all edges touching either
endpoint, the edge included) or the open one (the same set minus the edge).
Uncolored edges do not count toward any multiplicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph, GraphFormatError

UNCOLORED = -1
MODES = ("closed", "open")

__all__ = [
    "UNCOLORED",
    "EdgeColoring",
    "SatisfactionReport",
    "StructuralError",
    "closed_neighborhood",
    "is_satisfied",
    "verify",
    "unsatisfied_subgraph",
    "color_count",
    "read_coloring",
    "write_coloring",
]


class StructuralError(ValueError):
    """The input violates a structural precondition (isolated vertex/edge)."""


class EdgeColoring:
    """Per-edge color ids; :data:`UNCOLORED` marks an unassigned edge."""

    __slots__ = ("colors",)

    def __init__(self, colors):
        c = np.array(colors, dtype=np.int64)
        if c.ndim != 1:
            raise ValueError("coloring must be one-dimensional")
        if c.size and c.min() < UNCOLORED:
            raise ValueError("color ids must be nonnegative")
        self.colors = c

    @classmethod
    def empty(cls, m: int) -> EdgeColoring:
        return cls(np.full(m, UNCOLORED, dtype=np.int64))

    @classmethod
    def from_dict(cls, m: int, assignment: dict[int, int]) -> EdgeColoring:
        c = cls.empty(m)
        for e, col in assignment.items():
            c.colors[e] = col
        return c

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, e: int):
        col = int(self.colors[e])
        return None if col == UNCOLORED else col

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeColoring):
            return NotImplemented
        return np.array_equal(self.colors, other.colors)

    def __repr__(self) -> str:
        return f"EdgeColoring(m={len(self)}, colors={len(self.palette)}, total={self.total})"

    @property
    def palette(self) -> frozenset[int]:
        return frozenset(_dense_palette(self.colors[self.colors != UNCOLORED])[0].tolist())

    @property
    def total(self) -> bool:
        return bool(np.all(self.colors != UNCOLORED))

    @property
    def colored(self) -> np.ndarray:
        return np.flatnonzero(self.colors != UNCOLORED)

    def copy(self) -> EdgeColoring:
        return EdgeColoring(self.colors.copy())

    def fill(self, color: int) -> EdgeColoring:
        """Copy with every uncolored edge painted ``color``."""
        c = self.colors.copy()
        c[c == UNCOLORED] = color
        return EdgeColoring(c)


def color_count(c: EdgeColoring) -> int:
    return len(c.palette)


@dataclass
class SatisfactionReport:
    mode: str
    satisfied: np.ndarray
    witness: np.ndarray  # smallest unique color per edge, -1 where unsatisfied
    unsatisfied: list[int]
    colors_used: int
    edges: np.ndarray = field(repr=False)

    @property
    def conflict_free(self) -> bool:
        return not self.unsatisfied

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "conflict_free": self.conflict_free,
            "colors_used": self.colors_used,
            "unsatisfied": [[int(u), int(v)] for u, v in self.edges[self.unsatisfied]],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check_edge(G: Graph, e: int) -> None:
    if not 0 <= e < G.m:
        raise IndexError(f"edge id {e} out of range for graph with {G.m} edges")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def isolated_edges(G: Graph) -> np.ndarray:
    deg = G.degrees
    if not G.m:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero((deg[G.edges[:, 0]] == 1) & (deg[G.edges[:, 1]] == 1))


def check_structure(G: Graph, mode: str) -> None:
    """Raise :class:`StructuralError` if ``G`` is outside the domain of ``mode``."""
    _check_mode(mode)
    iso = np.flatnonzero(G.degrees == 0)
    if iso.size:
        raise StructuralError(f"isolated vertex {int(iso[0])}")
    if mode == "open":
        ie = isolated_edges(G)
        if ie.size:
            u, v = G.edges[ie[0]]
            raise StructuralError(f"isolated edge {int(u)} {int(v)} has an empty open neighborhood")


def closed_neighborhood(G: Graph, e: int) -> set[int]:
    _check_edge(G, e)
    u, v = G.edges[e]
    return set(G.incident_edges(int(u)).tolist()) | set(G.incident_edges(int(v)).tolist())


def is_satisfied(G: Graph, c: EdgeColoring, e: int, mode: str = "closed"):
    """``(satisfied, witness)`` for a single edge; witness is the smallest unique color."""
    _check_mode(mode)
    nb = closed_neighborhood(G, e)
    if mode == "open":
        nb.discard(e)
        if not nb:
            raise StructuralError("open neighborhood of an isolated edge is empty")
    counts: dict[int, int] = {}
    for f in nb:
        col = int(c.colors[f])
        if col != UNCOLORED:
            counts[col] = counts.get(col, 0) + 1
    unique = [k for k, cnt in counts.items() if cnt == 1]
    if not unique:
        return False, None
    return True, min(unique)


def _dense_palette(cols: np.ndarray):
    """Sorted distinct colors and the dense index of each entry."""
    if cols.size and cols.max() < 4 * cols.size + 1024:
        present = np.bincount(cols)
        palette = np.flatnonzero(present)
        lookup = np.cumsum(present > 0) - 1
        return palette, lookup[cols]
    return np.unique(cols, return_inverse=True)


def _satisfaction(G: Graph, colors: np.ndarray, mode: str):
    """Vectorised per-edge satisfaction and witness (dense color index space)."""
    m = G.m
    if m == 0:
        return np.zeros(0, dtype=bool), np.zeros(0, dtype=np.int64)
    colored = colors != UNCOLORED
    palette, inv = _dense_palette(colors[colored])
    k = len(palette)
    witness = np.full(m, UNCOLORED, dtype=np.int64)
    if k == 0:
        return np.zeros(m, dtype=bool), witness
    dense = np.full(m, -1, dtype=np.int64)
    dense[colored] = inv
    ends = G.edges[colored]
    cnt = np.bincount(ends[:, 0] * k + inv, minlength=G.n * k)
    cnt += np.bincount(ends[:, 1] * k + inv, minlength=G.n * k)
    cnt = cnt.reshape(G.n, k)
    u, v = G.edges[:, 0], G.edges[:, 1]
    if k <= 63:
        w = np.uint64(1) << np.arange(k, dtype=np.uint64)
        zero = ((cnt == 0) * w).sum(axis=1, dtype=np.uint64)
        one = ((cnt == 1) * w).sum(axis=1, dtype=np.uint64)
        own = np.where(dense >= 0, np.uint64(1) << np.maximum(dense, 0).astype(np.uint64), np.uint64(0))
        uniq = (one[u] & zero[v]) | (zero[u] & one[v])
        if mode == "closed":
            uniq |= one[u] & one[v] & own
        else:
            two = ((cnt == 2) * w).sum(axis=1, dtype=np.uint64)
            uniq |= ((two[u] & one[v]) | (one[u] & two[v])) & own
        sat = uniq != 0
        low = uniq & (~uniq + np.uint64(1))
        idx = np.zeros(m, dtype=np.int64)
        idx[sat] = np.log2(low[sat].astype(np.float64)).astype(np.int64)
    else:
        sat = np.zeros(m, dtype=bool)
        idx = np.zeros(m, dtype=np.int64)
        step = max(1, 4_000_000 // k)
        sub = 1 if mode == "closed" else 2
        for lo in range(0, m, step):
            hi = min(m, lo + step)
            tot = cnt[u[lo:hi]] + cnt[v[lo:hi]]
            d = dense[lo:hi]
            rows = np.flatnonzero(d >= 0)
            tot[rows, d[rows]] -= sub
            hit = tot == 1
            sat[lo:hi] = hit.any(axis=1)
            idx[lo:hi] = hit.argmax(axis=1)
    witness[sat] = palette[idx[sat]]
    return sat, witness


def verify(G: Graph, c: EdgeColoring, mode: str = "closed") -> SatisfactionReport:
    check_structure(G, mode)
    if len(c) != G.m:
        raise ValueError(f"coloring has {len(c)} entries for a graph with {G.m} edges")
    sat, witness = _satisfaction(G, c.colors, mode)
    return SatisfactionReport(
        mode=mode,
        satisfied=sat,
        witness=witness,
        unsatisfied=np.flatnonzero(~sat).tolist(),
        colors_used=color_count(c),
        edges=G.edges,
    )


def satisfied_mask(G: Graph, c: EdgeColoring, mode: str = "closed") -> np.ndarray:
    """Per-edge satisfaction without structural precondition checks."""
    _check_mode(mode)
    return _satisfaction(G, c.colors, mode)[0]


def unsatisfied_subgraph(G: Graph, c: EdgeColoring, mode: str = "closed"):
    """``(residual, back_map)``: the unsatisfied edges as a graph on ``V(G)``.

    ``back_map[j]`` is the id in ``G`` of edge ``j`` of the residual graph.
    """
    sat = satisfied_mask(G, c, mode)
    back = np.flatnonzero(~sat)
    return G.edge_subgraph(back), back


def write_coloring(G: Graph, c: EdgeColoring, path) -> None:
    lines = [f"{u} {v} {col}" for (u, v), col in zip(G.edges.tolist(), c.colors.tolist()) if col != UNCOLORED]
    Path(path).write_text("".join(line + "\n" for line in lines))


def read_coloring(G: Graph, path) -> EdgeColoring:
    c = EdgeColoring.empty(G.m)
    seen = set()
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            tok = line.split()
            if len(tok) != 3:
                raise GraphFormatError(f"line {lineno}: expected '<u> <v> <color>'")
            try:
                u, v, col = map(int, tok)
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer field") from None
            if col < 0:
                raise GraphFormatError(f"line {lineno}: negative color")
            try:
                e = G.edge_id(u, v)
            except KeyError:
                raise GraphFormatError(f"line {lineno}: {u} {v} is not an edge of the graph") from None
            if e in seen:
                raise GraphFormatError(f"line {lineno}: edge {u} {v} colored twice")
            seen.add(e)
            c.colors[e] = col
    return c
