"""Proper edge colorings.

A proper edge coloring is conflict-free in the closed regime: each edge's
own color occurs exactly once in its closed neighborhood.  These are the
fallback satisfiers for the residual graph of the nearly-regular pipeline.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph

__all__ = ["misra_gries", "greedy_edge_coloring", "matching_decomposition", "is_proper"]


def is_proper(G: Graph, colors) -> bool:
    colors = np.asarray(colors)
    if G.m == 0:
        return True
    if np.any(colors < 0):
        return False
    ends = np.concatenate([G.edges[:, 0], G.edges[:, 1]])
    cols = np.concatenate([colors, colors])
    keys = ends * (int(cols.max()) + 1) + cols
    return np.unique(keys).size == keys.size


def greedy_edge_coloring(G: Graph) -> np.ndarray:
    """Smallest color free at both ends, edges in id order (at most ``2*Delta - 1``)."""
    used = [set() for _ in range(G.n)]
    out = np.empty(G.m, dtype=np.int64)
    for e, (u, v) in enumerate(G.edges.tolist()):
        k = 0
        bu, bv = used[u], used[v]
        while k in bu or k in bv:
            k += 1
        out[e] = k
        bu.add(k)
        bv.add(k)
    return out


def matching_decomposition(G: Graph) -> np.ndarray:
    """Peel greedy maximal matchings off ``G``; matching ``j`` gets color ``j``."""
    out = np.full(G.m, -1, dtype=np.int64)
    left = list(range(G.m))
    edges = G.edges.tolist()
    k = 0
    while left:
        busy = set()
        rest = []
        for e in left:
            u, v = edges[e]
            if u in busy or v in busy:
                rest.append(e)
            else:
                busy.update((u, v))
                out[e] = k
        left = rest
        k += 1
    return out


def misra_gries(G: Graph) -> np.ndarray:
    """Proper edge coloring with at most ``Delta + 1`` colors (Misra-Gries fans)."""
    if G.m == 0:
        return np.zeros(0, dtype=np.int64)
    delta = int(G.degrees.max())
    ncol = delta + 1
    # at[v][c] = neighbor joined to v by the edge colored c
    at: list[dict[int, int]] = [dict() for _ in range(G.n)]
    adj = [G.neighbors(v).tolist() for v in range(G.n)]

    def color_of(u, v):
        for c, w in at[u].items():
            if w == v:
                return c
        return None

    def free(v):
        a = at[v]
        for c in range(ncol):
            if c not in a:
                return c
        raise AssertionError("no free color")

    def is_free(v, c):
        return c not in at[v]

    def set_color(u, v, c):
        at[u][c] = v
        at[v][c] = u

    def unset(u, v, c):
        del at[u][c]
        del at[v][c]

    for u, v in G.edges.tolist():
        # maximal fan of u starting at v
        fan = [v]
        in_fan = {v}
        grown = True
        while grown:
            grown = False
            last = fan[-1]
            for w in adj[u]:
                if w in in_fan:
                    continue
                cw = color_of(u, w)
                if cw is not None and is_free(last, cw):
                    fan.append(w)
                    in_fan.add(w)
                    grown = True
                    break
        c = free(u)
        d = free(fan[-1])
        # invert the cd-path starting at u (it starts with a d-edge, since c is free at u)
        if c != d:
            path = [u]
            x, want = u, d
            while want in at[x]:
                y = at[x][want]
                path.append(y)
                x = y
                want = c if want == d else d
            cols = []
            for i in range(len(path) - 1):
                cols.append(d if i % 2 == 0 else c)
            for i, col in enumerate(cols):
                unset(path[i], path[i + 1], col)
            for i, col in enumerate(cols):
                set_color(path[i], path[i + 1], c if col == d else d)
        # find the fan prefix ending at a vertex where d is free
        w_idx = None
        for i, w in enumerate(fan):
            if i > 0:
                cw = color_of(u, w)
                if cw is None or not is_free(fan[i - 1], cw):
                    break
            if is_free(w, d):
                w_idx = i
                break
        assert w_idx is not None, "Misra-Gries invariant broken"
        # rotate the prefix fan[0..w_idx]
        for i in range(w_idx):
            a, b = fan[i], fan[i + 1]
            cb = color_of(u, b)
            unset(u, b, cb)
            set_color(u, a, cb)
        set_color(u, fan[w_idx], d)

    out = np.empty(G.m, dtype=np.int64)
    for e, (u, v) in enumerate(G.edges.tolist()):
        out[e] = color_of(u, v)
    return out
