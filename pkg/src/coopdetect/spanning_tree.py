"""Maximum-weight spanning trees over complete weighted vertex sets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import ContractError, ResourceError
from .graph import Edge, UnionFind, canon
from .influence import WeightAssignment

BRUTE_CAP = 7


@dataclass(frozen=True)
class SpanningTree:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    total_weight: float

    @property
    def d(self) -> int:
        return len(self.vertices)

    def is_spanning_tree(self) -> bool:
        if len(self.edges) != max(self.d - 1, 0):
            return False
        uf = UnionFind(self.vertices)
        for i, j in self.edges:
            if i not in uf.parent or j not in uf.parent or not uf.union(i, j):
                return False
        return len({uf.find(v) for v in self.vertices}) <= 1


def _all_pairs(vertices) -> list[Edge]:
    return [canon(i, j) for i, j in itertools.combinations(vertices, 2)]


def _require_complete(weights: WeightAssignment) -> list[Edge]:
    pairs = _all_pairs(weights.vertices)
    missing = [p for p in pairs if p not in weights.weights]
    if missing:
        raise ContractError(f"missing weights for {len(missing)} pairs, e.g. {missing[0]}")
    return pairs


def max_weight_spanning_tree(weights: WeightAssignment) -> SpanningTree:
    """Kruskal on weights sorted descending; ties go to the lexicographically smaller pair."""
    pairs = _require_complete(weights)
    w = weights.weights
    order = sorted(pairs, key=lambda e: (-w[e], e))
    vertices = tuple(weights.vertices)
    uf = UnionFind(vertices)
    chosen: list[Edge] = []
    for e in order:
        if uf.union(*e):
            chosen.append(e)
            if len(chosen) == len(vertices) - 1:
                break
    chosen.sort()
    return SpanningTree(vertices, tuple(chosen), math.fsum(w[e] for e in chosen))


def _prufer_decode(seq: tuple[int, ...], m: int) -> list[tuple[int, int]]:
    degree = [1] * m
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = next(u for u in range(m) if degree[u] == 1)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
    u, v = (k for k in range(m) if degree[k] == 1)
    edges.append((u, v))
    return edges


def brute_force_mwst(weights: WeightAssignment) -> float:
    """Maximum spanning-tree weight by enumerating every labelled tree (Pruefer codes)."""
    _require_complete(weights)
    vs = weights.vertices
    m = len(vs)
    if m > BRUTE_CAP:
        raise ResourceError(f"brute-force spanning trees over {m} vertices exceeds cap {BRUTE_CAP}")
    if m <= 1:
        return 0.0
    w = weights.weights
    best = -float("inf")
    for seq in itertools.product(range(m), repeat=m - 2):
        # fsum is correctly rounded, so equal edge sets give bit-identical totals
        total = math.fsum(w[canon(vs[a], vs[b])] for a, b in _prufer_decode(seq, m))
        best = max(best, total)
    return best
