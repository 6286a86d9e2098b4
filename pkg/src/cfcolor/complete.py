"""Recursive conflict-free coloring of complete graphs.

``color_complete_partial`` colors some edges of ``K_n`` with at most
``ceil(log2(n-1))`` colors so that every edge is satisfied and no edge of a
given blocked matching is colored.  Each recursion step splits the vertices
into two nearly equal halves ``V1``/``V2``, paints a perfect matching of
``V1`` with the first palette color (this satisfies every ``V1``-``V2``
edge) and recurses into both halves with the remaining palette.
``cf_color_complete`` adds one more color for the leftover edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .verify import UNCOLORED, EdgeColoring

__all__ = [
    "h",
    "h_tilde",
    "h_tilde_cases",
    "log_bound",
    "PartitionChoice",
    "choose_partition",
    "extend_matching",
    "color_complete_partial",
    "cf_color_complete",
    "complete_edge_id",
]


def h(n: int) -> int:
    """``2 * ceil(floor(n/2) / 2)``; even and close to ``n/2``."""
    return 2 * (((n // 2) + 1) // 2)


def h_tilde(n: int) -> int:
    return max(h(n), n - h(n))


def h_tilde_cases(n: int) -> int:
    """Closed form of :func:`h_tilde` split on ``n mod 4``."""
    if n % 4 == 2:
        return n // 2 + 1
    return (n + 1) // 2


def log_bound(n: int) -> int:
    """``ceil(log2(n - 1))`` for ``n >= 2``, in exact integer arithmetic."""
    if n < 2:
        raise ValueError("log_bound needs n >= 2")
    return (n - 2).bit_length()


@dataclass(frozen=True)
class PartitionChoice:
    V1: tuple[int, ...]
    V2: tuple[int, ...]
    case: str  # "n%4==2" or "n%4!=2"

    def validate(self, vertices: Sequence[int], pairs: Sequence[tuple[int, int]]) -> None:
        n = len(vertices)
        s1, s2 = set(self.V1), set(self.V2)
        assert not s1 & s2 and s1 | s2 == set(vertices), "V1, V2 must partition V"
        assert len(self.V1) % 2 == 0, "|V1| must be even"
        assert {len(self.V1), len(self.V2)} == {h(n), n - h(n)}, "part sizes must be h(n), n-h(n)"
        assert len(self.V1) >= 3 and len(self.V2) >= 3, "parts need at least 3 vertices"
        A = [a for a, _ in pairs]
        B = [b for _, b in pairs]
        assert set(A[1:]) <= s1, "A minus a1 must lie in V1"
        assert set(B) <= s2, "B must lie in V2"


def extend_matching(vertices: Sequence[int], blocked: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Blocked pairs followed by consecutive free vertices paired in id order."""
    used = {v for p in blocked for v in p}
    free = sorted(v for v in vertices if v not in used)
    return list(blocked) + [(free[i], free[i + 1]) for i in range(0, len(free) - 1, 2)]


def choose_partition(vertices: Sequence[int], pairs: Sequence[tuple[int, int]]) -> PartitionChoice:
    """Split ``vertices`` given a matching ``pairs = [(a1, b1), ...]`` of size ``floor(n/2)``.

    ``a1 b1`` is the first pair.  The result keeps ``A - {a1}`` in ``V1``,
    all of ``B`` in ``V2`` and has parts of sizes ``h(n)`` and ``n - h(n)``.
    """
    n = len(vertices)
    if n < 7:
        raise ValueError("choose_partition needs n >= 7")
    if len(pairs) != n // 2:
        raise ValueError(f"expected {n // 2} pairs, got {len(pairs)}")
    A = [a for a, _ in pairs]
    matched = {v for p in pairs for v in p}
    C = [v for v in vertices if v not in matched]
    if n % 4 == 2:
        V1 = A[1:]
        case = "n%4==2"
    else:
        V1 = A + C[: h(n) - len(A)]
        case = "n%4!=2"
    s1 = set(V1)
    V2 = [v for v in vertices if v not in s1]
    choice = PartitionChoice(tuple(sorted(V1)), tuple(sorted(V2)), case)
    choice.validate(vertices, pairs)
    return choice


def _base_case(vertices: list[int], blocked: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Maximal matching avoiding ``blocked`` that touches every edge of ``K[vertices]``."""
    blocked_set = {frozenset(p) for p in blocked}
    mate: dict[int, int] = {}
    chosen = []
    for i, u in enumerate(vertices):
        if u in mate:
            continue
        for v in vertices[i + 1:]:
            if v not in mate and frozenset((u, v)) not in blocked_set:
                mate[u], mate[v] = v, u
                chosen.append((u, v))
                break
    # Greedy can strand both ends of a blocked pair (e.g. K4 with 23 blocked);
    # then every other vertex is matched and one swap makes the matching perfect.
    for a, b in blocked:
        if a not in mate and b not in mate and chosen:
            x, y = chosen.pop()
            del mate[x], mate[y]
            for p, q in ((a, x), (b, y)):
                mate[p], mate[q] = q, p
                chosen.append((p, q))
    return chosen


def _recurse(vertices, blocked, palette, out, depth=0):
    n = len(vertices)
    assert n >= 3
    need = log_bound(n)
    if len(palette) < need:
        raise ValueError(f"palette of size {len(palette)} too small for K_{n} (needs {need})")
    if n <= 6:
        mm = _base_case(vertices, blocked)
        assert len(mm) <= need
        out.extend((u, v, palette[j]) for j, (u, v) in enumerate(mm))
        return
    pairs = extend_matching(vertices, blocked)
    part = choose_partition(vertices, pairs)
    V1, V2 = list(part.V1), list(part.V2)
    perfect = [(V1[j], V1[j + 1]) for j in range(0, len(V1), 2)]
    blocked_set = {frozenset(p) for p in blocked}
    assert not any(frozenset(p) in blocked_set for p in perfect), "V1 must contain no blocked edge"
    out.extend((u, v, palette[0]) for u, v in perfect)
    _recurse(V1, perfect, palette[1:], out, depth + 1)
    in_v2 = set(V2)
    inner = [p for p in blocked if p[0] in in_v2 and p[1] in in_v2]
    assert len(inner) <= 1, "V2 may hold at most one originally blocked edge"
    _recurse(V2, inner, palette[1:], out, depth + 1)


def complete_edge_id(n: int, u, v):
    """Lexicographic edge id of ``uv`` in ``K_n`` (works elementwise on arrays)."""
    u, v = np.minimum(u, v), np.maximum(u, v)
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def _check_blocked(n: int, blocked) -> list[tuple[int, int]]:
    seen = set()
    out = []
    for a, b in blocked:
        a, b = int(a), int(b)
        if not (0 <= a < n and 0 <= b < n) or a == b:
            raise ValueError(f"invalid blocked pair {(a, b)}")
        if a in seen or b in seen:
            raise ValueError("blocked pairs must be disjoint (a matching)")
        seen.update((a, b))
        out.append((a, b))
    return out


def color_complete_partial(n: int, blocked=(), palette: Sequence[int] | None = None) -> EdgeColoring:
    """Partial coloring of ``K_n`` satisfying all edges and leaving ``blocked`` uncolored."""
    if n < 3:
        raise ValueError("color_complete_partial needs n >= 3")
    blocked = _check_blocked(n, blocked)
    if palette is None:
        palette = list(range(log_bound(n)))
    out: list[tuple[int, int, int]] = []
    _recurse(list(range(n)), blocked, list(palette), out)
    c = EdgeColoring.empty(n * (n - 1) // 2)
    if out:
        arr = np.array(out, dtype=np.int64)
        ids = complete_edge_id(n, arr[:, 0], arr[:, 1])
        assert np.all(c.colors[ids] == UNCOLORED), "an edge was colored twice"
        c.colors[ids] = arr[:, 2]
    return c


def cf_color_complete(n: int) -> EdgeColoring:
    """Total conflict-free coloring of ``K_n`` with at most ``ceil(log2(n-1)) + 1`` colors."""
    if n < 2:
        raise ValueError("cf_color_complete needs n >= 2")
    if n == 2:
        return EdgeColoring([0])
    partial = color_complete_partial(n)
    return partial.fill(log_bound(n))
