"""Simple undirected graphs over integer vertex labels."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator

Edge = tuple[int, int]


def canon(i: int, j: int) -> Edge:
    """Return the unordered pair ``{i, j}`` as a sorted tuple."""
    if i == j:
        raise ValueError(f"self-pair ({i}, {j})")
    return (i, j) if i < j else (j, i)


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        """Merge the sets of ``a`` and ``b``; False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def is_acyclic(edges: Iterable[Edge]) -> bool:
    uf = UnionFind()
    for i, j in edges:
        if not uf.union(i, j):
            return False
    return True


@dataclass(frozen=True)
class InteractionGraph:
    """Vertex set plus a simple edge set.

    Vertices are ``1..d``; graphs over an augmented model also carry the
    auxiliary vertex ``0`` (set ``aux=True``).
    """

    d: int
    edges: frozenset = field(default_factory=frozenset)
    aux: bool = False

    def __post_init__(self):
        edges = frozenset(canon(i, j) for i, j in self.edges)
        lo = 0 if self.aux else 1
        for i, j in edges:
            if not (lo <= i and j <= self.d):
                raise ValueError(f"edge ({i}, {j}) outside vertex range {lo}..{self.d}")
        object.__setattr__(self, "edges", edges)

    @property
    def vertices(self) -> list[int]:
        return list(range(0 if self.aux else 1, self.d + 1))

    def is_acyclic(self) -> bool:
        return is_acyclic(self.edges)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = defaultdict(list)
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def components(self) -> list[set[int]]:
        uf = UnionFind(self.vertices)
        for i, j in self.edges:
            uf.union(i, j)
        groups: dict = defaultdict(set)
        for v in self.vertices:
            groups[uf.find(v)].add(v)
        return sorted(groups.values(), key=min)

    def path(self, s: int, t: int) -> list[int] | None:
        """Vertex sequence of a shortest path from ``s`` to ``t`` (BFS), or None."""
        adj = self.adjacency()
        prev = {s: None}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if u == t:
                break
            for v in adj[u]:
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if t not in prev:
            return None
        out = [t]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return out[::-1]

    def simple_paths(self, min_length: int = 2) -> Iterator[list[int]]:
        """All simple paths with at least ``min_length`` edges, one per vertex pair.

        Only meaningful on forests, where the path between two vertices is unique.
        """
        vs = self.vertices
        for a_idx, a in enumerate(vs):
            for b in vs[a_idx + 1:]:
                p = self.path(a, b)
                if p is not None and len(p) - 1 >= min_length:
                    yield p

    def is_star_forest(self) -> bool:
        if not self.is_acyclic():
            return False
        adj = self.adjacency()
        for comp in self.components():
            if len(comp) <= 2:
                continue
            centers = [v for v in comp if len(adj[v]) > 1]
            if len(centers) != 1:
                return False
        return True
