"""Influence weights: exact (by enumeration), empirical plug-in, and extended.

The influence of a pair is ``|2 Pr(y=+1 | x_i=+1, x_j=+1) - 1|``, which
equals ``|8 Pr(x_i=+1, x_j=+1, y=+1) - 1|`` since covariates are uniform.
Exact values come from summing the model's conditional probability over
every covariate configuration; they serve as the oracle for everything
estimated from samples.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._io import text_sink
from .errors import ContractError, ParameterError, ResourceError
from .graph import Edge, canon
from .model import ENUM_CAP, Dataset, ModelSpec, augment_to_pure_interaction, enumerate_configs, sigmoid

ZETA_CAP = 16
ANTICONC_CAP = 20

EXACT = "exact"
EMPIRICAL = "empirical"
EXTENDED_EXACT = "extended-exact"
EXTENDED_EMPIRICAL = "extended-empirical"
_KINDS = (EXACT, EMPIRICAL, EXTENDED_EXACT, EXTENDED_EMPIRICAL)


@dataclass(frozen=True)
class WeightAssignment:
    """Symmetric weights over all unordered vertex pairs.

    Extended kinds include the auxiliary vertex 0, so vertices are 0..d;
    otherwise 1..d.
    """

    d: int
    weights: Mapping[Edge, float] = field(default_factory=dict)
    kind: str = EXACT

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown weight kind {self.kind!r}")
        w = {canon(i, j): float(v) for (i, j), v in self.weights.items()}
        for key, v in w.items():
            if not v >= 0:
                raise ParameterError(f"negative weight {v} on {key}")
        object.__setattr__(self, "weights", dict(sorted(w.items())))

    @property
    def extended(self) -> bool:
        return self.kind in (EXTENDED_EXACT, EXTENDED_EMPIRICAL)

    @property
    def vertices(self) -> list[int]:
        return list(range(0 if self.extended else 1, self.d + 1))

    def __getitem__(self, pair) -> float:
        return self.weights[canon(*pair)]

    def to_csv(self, path) -> None:
        with text_sink(path) as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "weight"])
            for (i, j), v in self.weights.items():
                w.writerow([i, j, repr(v)])


def _check_pure(model: ModelSpec) -> None:
    if not model.is_pure_interaction:
        raise ContractError(
            "model has individual terms; augment it to a pure-interaction model first"
        )


def _check_cap(d: int, cap: int = ENUM_CAP) -> None:
    if d > cap:
        raise ResourceError(f"enumeration over d={d} exceeds cap {cap}")


def outcome_prob(model: ModelSpec, fixed: Mapping[int, int]) -> float:
    """Pr(y=+1 | x_k = v for (k, v) in fixed), by exhaustive summation."""
    _check_cap(model.d)
    total, count = 0.0, 0
    for X in enumerate_configs(model.d, fixed):
        total += float(sigmoid(model.scores(X)).sum())
        count += X.shape[0]
    return total / count


def joint_tables(model: ModelSpec) -> dict[str, np.ndarray]:
    """Low-order joint probabilities with the event y=+1, all at once.

    Returns ``p`` = Pr(x_i=+1, y=+1) (shape d), ``pp`` = Pr(x_i=+1, x_j=+1, y=+1)
    and ``mm`` = Pr(x_i=-1, x_j=-1, y=+1) (shape d x d, 0-based).
    """
    _check_cap(model.d)
    d = model.d
    p1 = np.zeros(d)
    pp = np.zeros((d, d))
    mm = np.zeros((d, d))
    for X in enumerate_configs(d):
        prob = sigmoid(model.scores(X))
        up = (X > 0).astype(np.float64)
        dn = 1.0 - up
        p1 += up.T @ prob
        pp += up.T @ (up * prob[:, None])
        mm += dn.T @ (dn * prob[:, None])
    scale = 2.0 ** -d
    return {"p": p1 * scale, "pp": pp * scale, "mm": mm * scale}


def exact_weight(model: ModelSpec, pair: tuple[int, int]) -> float:
    """Influence of one pair, summing over the ``2**(d-2)`` completions."""
    _check_pure(model)
    _check_cap(model.d)
    i, j = canon(*pair)
    if not (1 <= i and j <= model.d):
        raise ParameterError(f"pair {(i, j)} outside 1..{model.d}")
    joint = outcome_prob(model, {i: 1, j: 1}) / 4.0
    return abs(8.0 * joint - 1.0)


def exact_weights(model: ModelSpec) -> WeightAssignment:
    """Influence of every pair from a single enumeration pass."""
    _check_pure(model)
    pp = joint_tables(model)["pp"]
    w = {
        (i + 1, j + 1): abs(8.0 * pp[i, j] - 1.0)
        for i, j in itertools.combinations(range(model.d), 2)
    }
    return WeightAssignment(model.d, w, EXACT)


def _require_rows(data: Dataset) -> None:
    if data.n < 1:
        raise ParameterError("dataset is empty")


def empirical_weights(data: Dataset) -> WeightAssignment:
    """Plug-in influences ``|8/n * #{x_i = x_j = y = +1} - 1|`` for every pair."""
    _require_rows(data)
    hits = ((data.x > 0) & (data.y[:, None] > 0)).astype(np.int64)
    up = (data.x > 0).astype(np.int64)
    counts = up.T @ hits
    n = data.n
    w = {
        (i + 1, j + 1): abs(8.0 * counts[i, j] / n - 1.0)
        for i, j in itertools.combinations(range(data.d), 2)
    }
    return WeightAssignment(data.d, w, EMPIRICAL)


def gamma(d: int, lam: float, mu: float) -> float:
    """Lower bound on direct influences (and on the local-dominance gap)."""
    if d < 1:
        raise ParameterError(f"d must be >= 1, got {d}")
    if not 0 < lam <= mu:
        raise ParameterError(f"need 0 < lambda <= mu, got ({lam}, {mu})")
    return math.sqrt(2.0 / (math.pi * d)) * (sigmoid(lam + 3 * mu) - sigmoid(-lam + 3 * mu))


def extended_exact_weights(model: ModelSpec, mode: str = "identity") -> WeightAssignment:
    """Influences over {0..d} for a model that may carry individual effects.

    ``identity`` evaluates the low-order conditional probabilities of the
    original model directly; ``oracle`` computes ordinary influences on the
    augmented pure-interaction model and relabels its last vertex as 0.
    """
    d = model.d
    if mode == "oracle":
        aug = augment_to_pure_interaction(model)
        _check_cap(aug.d)
        base = exact_weights(aug)
        w = {}
        for (i, j), v in base.weights.items():
            w[(0, i) if j == aug.d else (i, j)] = v
        return WeightAssignment(d, w, EXTENDED_EXACT)
    if mode != "identity":
        raise ParameterError(f"mode must be 'identity' or 'oracle', got {mode!r}")
    t = joint_tables(model)
    w = {}
    for i in range(d):
        # Pr(y=+1 | x_i=+1) = 2 Pr(x_i=+1, y=+1)
        w[(0, i + 1)] = abs(4.0 * t["p"][i] - 1.0)
    for i, j in itertools.combinations(range(d), 2):
        # conditionals on two coordinates are 4x the joint
        w[(i + 1, j + 1)] = abs(4.0 * t["pp"][i, j] + 4.0 * t["mm"][i, j] - 1.0)
    return WeightAssignment(d, w, EXTENDED_EXACT)


def _cond(hits: np.ndarray, total: np.ndarray) -> np.ndarray:
    # an empty conditioning cell carries no information: treat it as 1/2
    safe = np.where(total > 0, total, 1)
    return np.where(total > 0, hits / safe, 0.5)


EXTENDED_ESTIMATORS = ("exact", "conditional", "contrast")


def extended_empirical_weights(data: Dataset, estimator: str = "exact") -> WeightAssignment:
    """Plug-in analogue of the extended influences.

    Three forms; the first two are consistent for any model:

    ``exact``
        divides joint counts by the known covariate marginals (n/2 for one
        coordinate, n/4 for two), e.g. ``|4/n * #{x_i=+1, y=+1} - 1|``.
    ``conditional``
        plugs in empirical conditional frequencies, e.g.
        ``|2 #{x_i=+1, y=+1} / #{x_i=+1} - 1|``.
    ``contrast``
        ``|P^(y=+1 | z=+1) - P^(y=+1 | z=-1)|`` with ``z = x_i`` for the edge to
        0 and ``z = x_i x_j`` otherwise. It equals the influence whenever
        Pr(y=+1) = 1/2, which holds for every acyclic extended graph, and uses
        all samples in both arms. :func:`coopdetect.detector.detect_extended`
        uses this form by default.
    """
    _require_rows(data)
    if estimator not in EXTENDED_ESTIMATORS:
        raise ParameterError(f"estimator must be one of {EXTENDED_ESTIMATORS}, got {estimator!r}")
    n = data.n
    up = (data.x > 0).astype(np.int64)
    dn = 1 - up
    ypos = (data.y > 0).astype(np.int64)
    single = up.T @ ypos
    pp = up.T @ (up * ypos[:, None])
    mm = dn.T @ (dn * ypos[:, None])
    if estimator == "exact":
        p_single = 2.0 * single / n
        p_pp, p_mm = 4.0 * pp / n, 4.0 * mm / n
        w = {(0, i + 1): abs(2.0 * p_single[i] - 1.0) for i in range(data.d)}
        for i, j in itertools.combinations(range(data.d), 2):
            w[(i + 1, j + 1)] = abs(p_pp[i, j] + p_mm[i, j] - 1.0)
        return WeightAssignment(data.d, w, EXTENDED_EMPIRICAL)
    n_up = up.sum(axis=0)
    n_same = up.T @ up + dn.T @ dn
    if estimator == "conditional":
        p_single = _cond(single, n_up)
        p_pp, p_mm = _cond(pp, up.T @ up), _cond(mm, dn.T @ dn)
        w = {(0, i + 1): abs(2.0 * p_single[i] - 1.0) for i in range(data.d)}
        for i, j in itertools.combinations(range(data.d), 2):
            w[(i + 1, j + 1)] = abs(p_pp[i, j] + p_mm[i, j] - 1.0)
        return WeightAssignment(data.d, w, EXTENDED_EMPIRICAL)
    total_pos = int(ypos.sum())
    single_gap = _cond(single, n_up) - _cond(total_pos - single, n - n_up)
    same_pos = pp + mm
    pair_gap = _cond(same_pos, n_same) - _cond(total_pos - same_pos, n - n_same)
    w = {(0, i + 1): abs(single_gap[i]) for i in range(data.d)}
    for i, j in itertools.combinations(range(data.d), 2):
        w[(i + 1, j + 1)] = abs(pair_gap[i, j])
    return WeightAssignment(data.d, w, EXTENDED_EMPIRICAL)


def zeta(model: ModelSpec, pair: tuple[int, int], x) -> np.ndarray | float:
    """``sigmoid(b + S) - sigmoid(-b + S)`` where S is the score without the pair's term.

    ``x`` may be a single ±1 vector or a matrix of rows.
    """
    _check_pure(model)
    i, j = canon(*pair)
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    b = model.pairwise.get((i, j), 0.0)
    rest = model.scores(X) - b * X[:, i - 1] * X[:, j - 1]
    out = sigmoid(b + rest) - sigmoid(-b + rest)
    return float(out[0]) if single else out


def zeta_decomposition_check(model: ModelSpec, pair: tuple[int, int]) -> float:
    """Residual between the conditional outcome difference and the averaged zeta.

    Left side: ``Pr(y=+1|x_i=x_j=+1) - Pr(y=-1|x_i=x_j=+1)`` from the model's
    conditionals. Right side: mean of ``zeta`` over all completions.
    """
    _check_pure(model)
    _check_cap(model.d, ZETA_CAP)
    i, j = canon(*pair)
    pos = outcome_prob(model, {i: 1, j: 1})
    lhs = pos - (1.0 - pos)
    total, count = 0.0, 0
    for X in enumerate_configs(model.d, {i: 1, j: 1}):
        total += float(np.sum(zeta(model, (i, j), X)))
        count += X.shape[0]
    return abs(lhs - total / count)


def anticoncentration(coeffs, mode: str = "bound") -> float:
    """Small-ball probability for a Rademacher sum, or its lower bound.

    ``bound``: sqrt(2 / (pi (q + 2))). ``brute``: Pr(|sum a_i z_i| <= max |a_i|)
    by enumerating all sign patterns; comparisons allow 1e-12 relative slack
    for roundoff in the sum.
    """
    a = np.asarray(coeffs, dtype=np.float64).reshape(-1)
    q = a.size
    if mode == "bound":
        return math.sqrt(2.0 / (math.pi * (q + 2)))
    if mode != "brute":
        raise ParameterError(f"mode must be 'bound' or 'brute', got {mode!r}")
    _check_cap(q, ANTICONC_CAP)
    if q == 0:
        return 1.0
    amax = float(np.max(np.abs(a)))
    tol = 1e-12 * float(np.sum(np.abs(a)))
    hits = 0
    for Z in enumerate_configs(q):
        hits += int(np.count_nonzero(np.abs(Z @ a) <= amax + tol))
    return hits / float(1 << q)
