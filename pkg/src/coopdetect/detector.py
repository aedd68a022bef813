"""Spanning-tree detection of the interaction graph, exact and from samples."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ContractError, ParameterError
from .graph import InteractionGraph
from .influence import (
    WeightAssignment,
    empirical_weights,
    exact_weights,
    extended_empirical_weights,
    extended_exact_weights,
    gamma,
)
from .model import Dataset, ModelSpec, sigmoid
from .spanning_tree import SpanningTree, max_weight_spanning_tree

EXACT_POSITIVITY = 1e-9


@dataclass(frozen=True)
class DetectionResult:
    recovered: InteractionGraph
    tree: SpanningTree
    weights: WeightAssignment
    gamma: float
    threshold: float

    def __post_init__(self):
        w = self.weights.weights
        tree_edges = set(self.tree.edges)
        if not self.recovered.edges <= tree_edges:
            raise ContractError("recovered edges must be a subset of the tree")
        for e in tree_edges:
            if (w[e] > self.threshold) != (e in self.recovered.edges):
                raise ContractError(f"edge {e} inconsistent with threshold {self.threshold}")

    @property
    def individual(self) -> list[int]:
        """Covariates joined to the auxiliary vertex 0 (extended detection only)."""
        return sorted(j for i, j in self.recovered.edges if i == 0)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted(e for e in self.recovered.edges if e[0] != 0)

    def to_json(self) -> dict:
        w = self.weights.weights
        out = {
            "edges": [list(e) for e in sorted(self.recovered.edges)],
            "gamma": self.gamma,
            "tree": [[i, j, w[(i, j)]] for i, j in self.tree.edges],
        }
        if self.weights.extended:
            out["individual"] = self.individual
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def detect_from_weights(weights: WeightAssignment, threshold: float, gamma_value: float = math.nan) -> DetectionResult:
    """Keep the maximum-weight spanning tree edges whose weight strictly exceeds ``threshold``."""
    tree = max_weight_spanning_tree(weights)
    kept = frozenset(e for e in tree.edges if weights.weights[e] > threshold)
    graph = InteractionGraph(weights.d, kept, aux=weights.extended)
    return DetectionResult(graph, tree, weights, gamma_value, threshold)


def _check_detect_args(data: Dataset, lam: float, mu: float) -> None:
    if data.n < 1:
        raise ParameterError("dataset is empty")
    if data.d < 2:
        raise ParameterError(f"need at least 2 covariates, got {data.d}")
    if not 0 < lam <= mu:
        raise ParameterError(f"need 0 < lambda <= mu, got ({lam}, {mu})")


def detect(data: Dataset, lam: float, mu: float) -> DetectionResult:
    """Plug-in influences, maximum-weight spanning tree, then threshold at gamma/2."""
    _check_detect_args(data, lam, mu)
    g = gamma(data.d, lam, mu)
    return detect_from_weights(empirical_weights(data), g / 2.0, g)


def detect_extended(data: Dataset, lam: float, mu: float, estimator: str = "contrast") -> DetectionResult:
    """Detection over {0..d}: edges to vertex 0 are individual effects.

    The separation constant is evaluated with d + 1 covariates, matching the
    augmented model. ``estimator`` selects the plug-in form, see
    :func:`coopdetect.influence.extended_empirical_weights`.
    """
    _check_detect_args(data, lam, mu)
    g = gamma(data.d + 1, lam, mu)
    return detect_from_weights(extended_empirical_weights(data, estimator), g / 2.0, g)


def detect_from_exact(model: ModelSpec) -> DetectionResult:
    """Spanning tree on exact influences, keeping edges with weight above 1e-9."""
    if not model.is_pure_interaction:
        raise ContractError("detect_from_exact needs a pure-interaction model")
    return detect_from_weights(exact_weights(model), EXACT_POSITIVITY)


def detect_extended_from_exact(model: ModelSpec) -> DetectionResult:
    return detect_from_weights(extended_exact_weights(model), EXACT_POSITIVITY)


def required_sample_size(d: int, lam: float, mu: float, eps: float) -> int:
    """Samples sufficient for recovery with probability at least ``1 - eps``."""
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    g = gamma(d, lam, mu)
    return math.ceil(128.0 / g**2 * math.log(d * d / eps))


def required_sample_size_closed_form(d: int, lam: float, mu: float, eps: float) -> float:
    """The same bound written through the sigmoid gap; unrounded."""
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    gap = sigmoid(lam + 3 * mu) - sigmoid(-lam + 3 * mu)
    return 64.0 * math.pi * d / gap**2 * math.log(d * d / eps)
