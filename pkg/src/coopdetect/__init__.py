"""Recovery of acyclic pairwise-interaction graphs in logistic models on ±1 covariates."""

from .detector import DetectionResult, detect, detect_extended, detect_from_exact, required_sample_size
from .errors import ContractError, DimensionError, ParameterError, ResourceError
from .influence import (
    WeightAssignment,
    empirical_weights,
    exact_weight,
    exact_weights,
    extended_empirical_weights,
    extended_exact_weights,
    gamma,
)
from .model import Dataset, ModelSpec, augment_to_pure_interaction, random_acyclic_model, sample_dataset, sigmoid
from .spanning_tree import SpanningTree, max_weight_spanning_tree

__all__ = [
    "ContractError",
    "Dataset",
    "DetectionResult",
    "DimensionError",
    "ModelSpec",
    "ParameterError",
    "ResourceError",
    "SpanningTree",
    "WeightAssignment",
    "augment_to_pure_interaction",
    "detect",
    "detect_extended",
    "detect_from_exact",
    "empirical_weights",
    "exact_weight",
    "exact_weights",
    "extended_empirical_weights",
    "extended_exact_weights",
    "gamma",
    "max_weight_spanning_tree",
    "random_acyclic_model",
    "required_sample_size",
    "sample_dataset",
    "sigmoid",
]
