"""Bipartite matchings with Hall-violator certificates.

``maximum_matching`` runs Hopcroft-Karp phases.  ``augment_preserving`` grows
a given matching one augmenting path at a time, so every vertex that was
matched stays matched.  ``saturating_matching`` returns either a matching
covering a chosen side or a set ``S`` with ``|N(S)| < |S|``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

__all__ = [
    "Bipartition",
    "Matching",
    "HallViolator",
    "maximum_matching",
    "saturating_matching",
    "augment_preserving",
    "find_augmenting_path",
]

INF = float("inf")


class Bipartition:
    """Bipartite graph with sides ``left`` and ``right``.

    Vertices may be any hashable ids; the two sides must be disjoint.
    Neighbor lists are kept sorted so scans are deterministic.
    """

    def __init__(self, left: Iterable[Hashable], right: Iterable[Hashable], edges: Iterable[tuple]):
        self.left = tuple(sorted(set(left)))
        self.right = tuple(sorted(set(right)))
        lset, rset = set(self.left), set(self.right)
        if lset & rset:
            raise ValueError("bipartition sides overlap")
        adj: dict = {x: set() for x in self.left}
        radj: dict = {y: set() for y in self.right}
        for a, b in edges:
            if a in lset and b in rset:
                x, y = a, b
            elif b in lset and a in rset:
                x, y = b, a
            else:
                raise ValueError(f"edge {(a, b)} does not cross the bipartition")
            adj[x].add(y)
            radj[y].add(x)
        self.adj = {x: sorted(ys) for x, ys in adj.items()}
        self.radj = {y: sorted(xs) for y, xs in radj.items()}

    def __repr__(self) -> str:
        return f"Bipartition(|X|={len(self.left)}, |Y|={len(self.right)}, m={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return sum(len(v) for v in self.adj.values())

    def edges(self):
        for x in self.left:
            for y in self.adj[x]:
                yield x, y

    def neighbors(self, v) -> list:
        if v in self.adj:
            return self.adj[v]
        return self.radj[v]

    def swapped(self) -> Bipartition:
        return Bipartition(self.right, self.left, ((y, x) for x, y in self.edges()))


@dataclass
class Matching:
    """Matching stored as an involutive mate map."""

    mate: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges) -> Matching:
        mate = {}
        for a, b in edges:
            if a in mate or b in mate:
                raise ValueError(f"edge {(a, b)} shares a vertex with the matching")
            mate[a] = b
            mate[b] = a
        return cls(mate)

    def __len__(self) -> int:
        return len(self.mate) // 2

    def __contains__(self, v) -> bool:
        return v in self.mate

    def edges(self, H: Bipartition | None = None) -> set[tuple]:
        """Edges as ``(left, right)`` pairs when ``H`` is given, else as frozensets."""
        if H is None:
            return {frozenset((a, b)) for a, b in self.mate.items()}
        lset = set(H.left)
        return {(a, b) for a, b in self.mate.items() if a in lset}

    @property
    def saturated(self) -> set:
        return set(self.mate)

    def saturates(self, vertices) -> bool:
        return all(v in self.mate for v in vertices)

    def copy(self) -> Matching:
        return Matching(dict(self.mate))

    def is_valid(self, H: Bipartition | None = None) -> bool:
        for a, b in self.mate.items():
            if self.mate.get(b) != a or a == b:
                return False
            if H is not None and b not in H.neighbors(a):
                return False
        return True


@dataclass(frozen=True)
class HallViolator:
    """``S`` on the designated side with ``|N(S)| < |S|``."""

    S: frozenset
    neighborhood: frozenset

    @property
    def deficiency(self) -> int:
        return len(self.S) - len(self.neighborhood)


def _hopcroft_karp(H: Bipartition, mate: dict) -> None:
    left = H.left
    adj = H.adj
    while True:
        dist = {}
        q = deque()
        for x in left:
            if x not in mate:
                dist[x] = 0
                q.append(x)
        found = INF
        while q:
            x = q.popleft()
            if dist[x] >= found:
                continue
            for y in adj[x]:
                x2 = mate.get(y)
                if x2 is None:
                    found = min(found, dist[x] + 1)
                elif x2 not in dist:
                    dist[x2] = dist[x] + 1
                    q.append(x2)
        if found == INF:
            return
        for x in left:
            if x not in mate:
                _layered_dfs(x, adj, mate, dist, found)


def _layered_dfs(root, adj, mate, dist, limit) -> bool:
    # iterative DFS along the BFS layers; a dead vertex gets dist = INF
    stack = [(root, iter(adj[root]))]
    path = []
    while stack:
        x, it = stack[-1]
        advanced = False
        for y in it:
            x2 = mate.get(y)
            if x2 is None:
                if dist[x] + 1 != limit:
                    continue
                path.append((x, y))
                for a, b in path:
                    mate[a] = b
                    mate[b] = a
                return True
            if dist.get(x2) == dist[x] + 1:
                path.append((x, y))
                stack.append((x2, iter(adj[x2])))
                advanced = True
                break
        if not advanced:
            dist[x] = INF
            stack.pop()
            if path:
                path.pop()
    return False


def maximum_matching(H: Bipartition, initial: Matching | None = None) -> Matching:
    mate = dict(initial.mate) if initial is not None else {}
    _hopcroft_karp(H, mate)
    return Matching(mate)


def find_augmenting_path(H: Bipartition, M: Matching):
    """Shortest alternating path between a free left and a free right vertex, or ``None``."""
    mate = M.mate
    parent = {}
    q = deque()
    for x in H.left:
        if x not in mate:
            parent[x] = None
            q.append(x)
    while q:
        x = q.popleft()
        for y in H.adj[x]:
            if y in parent:
                continue
            parent[y] = x
            x2 = mate.get(y)
            if x2 is None:
                path = [y]
                v = x
                while v is not None:
                    path.append(v)
                    v = parent[v]
                return path[::-1]
            if x2 not in parent:
                parent[x2] = y
                q.append(x2)
    return None


def augment_preserving(H: Bipartition, M: Matching, strategy: str = "phases") -> Matching:
    """Maximum matching reached from ``M`` by augmenting-path flips.

    Flipping an augmenting path keeps its interior vertices matched and
    matches its two ends, so the saturated set only grows.  ``"single"``
    searches one shortest path per BFS; ``"phases"`` batches flips in
    Hopcroft-Karp phases (each still a single path flip).
    """
    if not M.is_valid(H):
        raise ValueError("initial matching is not a matching of H")
    if strategy == "phases":
        return maximum_matching(H, M)
    if strategy != "single":
        raise ValueError("strategy must be 'phases' or 'single'")
    out = M.copy()
    mate = out.mate
    while True:
        path = find_augmenting_path(H, out)
        if path is None:
            return out
        for i in range(0, len(path) - 1, 2):
            a, b = path[i], path[i + 1]
            mate[a] = b
            mate[b] = a


def hall_violator(H: Bipartition, M: Matching, root) -> HallViolator:
    """Alternating-reachability set from an unmatched left vertex of a maximum matching."""
    mate = M.mate
    S = {root}
    N = set()
    q = deque([root])
    while q:
        x = q.popleft()
        for y in H.adj[x]:
            if y in N:
                continue
            N.add(y)
            x2 = mate.get(y)
            if x2 is None:
                raise ValueError("matching is not maximum: augmenting path found")
            if x2 not in S:
                S.add(x2)
                q.append(x2)
    return HallViolator(frozenset(S), frozenset(N))


def saturating_matching(H: Bipartition, side: str = "left"):
    """A matching saturating one side of ``H``, or a :class:`HallViolator`."""
    if side == "right":
        H = H.swapped()
    elif side != "left":
        raise ValueError("side must be 'left' or 'right'")
    M = maximum_matching(H)
    for x in H.left:
        if x not in M.mate:
            return hall_violator(H, M, x)
    return M
