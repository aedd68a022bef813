"""Generic feature-selection baselines and logistic fitting.

Every single covariate ``x_i`` and every product ``x_i x_j`` is treated as a
separate ±1 feature. Selection methods assume the number of features to
keep is known.
"""

from __future__ import annotations

import csv
import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._io import text_sink
from .errors import DimensionError, ParameterError
from .model import Dataset, ModelSpec

log = logging.getLogger(__name__)

COEF_CAP = 30.0
KKT_TOL = 1e-7


@functools.total_ordering
@dataclass(frozen=True)
class Feature:
    """``Feature(i)`` is the single covariate x_i; ``Feature(i, j)`` the product x_i x_j."""

    i: int
    j: int | None = None

    def __post_init__(self):
        if self.j is not None:
            if self.i == self.j:
                raise ParameterError(f"pair feature needs distinct indices, got ({self.i}, {self.j})")
            if self.j < self.i:
                i, j = self.j, self.i
                object.__setattr__(self, "i", i)
                object.__setattr__(self, "j", j)
        if self.i < 1:
            raise ParameterError(f"indices are 1-based, got {self.i}")

    @property
    def is_pair(self) -> bool:
        return self.j is not None

    @property
    def key(self) -> tuple[int, int]:
        """Edge label in the extended graph: (0, i) for singles, (i, j) for pairs."""
        return (self.i, self.j) if self.j is not None else (0, self.i)

    @classmethod
    def from_edge(cls, edge: tuple[int, int]) -> "Feature":
        a, b = sorted(edge)
        return cls(b) if a == 0 else cls(a, b)

    def __lt__(self, other: "Feature") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Pair({self.i},{self.j})" if self.is_pair else f"Single({self.i})"


def all_features(d: int) -> list[Feature]:
    """Canonical order: singles 1..d, then pairs lexicographically."""
    return [Feature(i) for i in range(1, d + 1)] + [
        Feature(i, j) for i, j in itertools.combinations(range(1, d + 1), 2)
    ]


def model_features(model: ModelSpec) -> set[Feature]:
    return {Feature(i) for i in model.individual} | {Feature(i, j) for i, j in model.pairwise}


def feature_value(f: Feature, x) -> int:
    x = np.asarray(x)
    hi = f.j if f.is_pair else f.i
    if hi > x.shape[-1]:
        raise DimensionError(f"{f!r} out of range for d={x.shape[-1]}")
    v = x[f.i - 1] * (x[f.j - 1] if f.is_pair else 1)
    return int(v)


def feature_matrix(x: np.ndarray, features: Sequence[Feature]) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[1]
    cols = np.empty((x.shape[0], len(features)))
    for k, f in enumerate(features):
        if (f.j or f.i) > d:
            raise DimensionError(f"{f!r} out of range for d={d}")
        cols[:, k] = x[:, f.i - 1] * x[:, f.j - 1] if f.is_pair else x[:, f.i - 1]
    return cols


# ---------------------------------------------------------------- mutual information


def mi_from_counts(npp, npm, nmp, nmm) -> np.ndarray:
    """Plug-in MI (nats) of two ±1 variables from their 2x2 count table; vectorised."""
    table = np.stack([np.asarray(c, dtype=np.float64) for c in (npp, npm, nmp, nmm)], axis=-1)
    n = table.sum(axis=-1, keepdims=True)
    p = table / n
    row = np.stack([p[..., 0] + p[..., 1], p[..., 0] + p[..., 1], p[..., 2] + p[..., 3], p[..., 2] + p[..., 3]], -1)
    col = np.stack([p[..., 0] + p[..., 2], p[..., 1] + p[..., 3], p[..., 0] + p[..., 2], p[..., 1] + p[..., 3]], -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(p / (row * col)), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


def _mi_against(Z: np.ndarray, target: np.ndarray) -> np.ndarray:
    zp = Z > 0
    tp = target > 0
    npp = np.count_nonzero(zp & tp[:, None], axis=0)
    npm = np.count_nonzero(zp & ~tp[:, None], axis=0)
    nmp = np.count_nonzero(~zp & tp[:, None], axis=0)
    nmm = Z.shape[0] - npp - npm - nmp
    return mi_from_counts(npp, npm, nmp, nmm)


def plug_in_mi(f: Feature, data: Dataset) -> float:
    if data.n < 1:
        raise ParameterError("dataset is empty")
    z = feature_matrix(data.x, [f])
    return float(_mi_against(z, data.y)[0])


@dataclass(frozen=True)
class SelectionResult:
    items: tuple[tuple[Feature, float], ...]
    truncated: bool = False
    trace: tuple[tuple[float, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        feats = [f for f, _ in self.items]
        if len(set(feats)) != len(feats):
            raise ParameterError("duplicate features in selection")

    @property
    def features(self) -> list[Feature]:
        return [f for f, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def to_csv(self, path) -> None:
        with text_sink(path) as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "kind", "i", "j", "score"])
            for r, (f, s) in enumerate(self.items, 1):
                w.writerow([r, "pair" if f.is_pair else "single", f.i, f.j if f.is_pair else "", repr(s)])


def _check_k(data: Dataset, k: int) -> list[Feature]:
    if data.n < 1:
        raise ParameterError("dataset is empty")
    feats = all_features(data.d)
    if not 0 <= k <= len(feats):
        raise ParameterError(f"k must be in 0..{len(feats)}, got {k}")
    return feats


def mi_ranking(data: Dataset, k: int) -> SelectionResult:
    feats = _check_k(data, k)
    mi = _mi_against(feature_matrix(data.x, feats), data.y)
    order = sorted(range(len(feats)), key=lambda a: (-mi[a], feats[a]))
    return SelectionResult(tuple((feats[a], float(mi[a])) for a in order[:k]))


def mrmr_select(data: Dataset, k: int) -> SelectionResult:
    """Greedy max-relevance min-redundancy (difference form)."""
    feats = _check_k(data, k)
    Z = feature_matrix(data.x, feats)
    relevance = _mi_against(Z, data.y)
    redundancy = np.zeros(len(feats))
    chosen: list[int] = []
    scores: list[float] = []
    available = np.ones(len(feats), dtype=bool)
    for step in range(k):
        crit = relevance - (redundancy / step if step else 0.0)
        crit = np.where(available, crit, -np.inf)
        # np.argmax returns the first maximum, i.e. the canonical tie-break
        best = int(np.argmax(crit))
        chosen.append(best)
        scores.append(float(crit[best]))
        available[best] = False
        redundancy += _mi_against(Z, Z[:, best])
    return SelectionResult(tuple((feats[a], s) for a, s in zip(chosen, scores)))


# ---------------------------------------------------------------- logistic regression


@dataclass(frozen=True)
class LogRegFit:
    coef: dict = field(default_factory=dict)
    objective: float = 0.0
    iterations: int = 0
    converged: bool = True
    kkt: float = 0.0
    reg: float = 0.0

    @classmethod
    def from_model(cls, model: ModelSpec) -> "LogRegFit":
        coef = {Feature(i): b for i, b in model.individual.items()}
        coef.update({Feature(i, j): b for (i, j), b in model.pairwise.items()})
        return cls(coef)

    @property
    def support(self) -> list[Feature]:
        return sorted(f for f, c in self.coef.items() if c != 0)

    def scores(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        feats = sorted(self.coef)
        if not feats:
            return np.zeros(x.shape[0])
        return feature_matrix(x, feats) @ np.array([self.coef[f] for f in feats])


def predict(fit: LogRegFit, x) -> np.ndarray | int:
    """Sign of the linear score, with a score of exactly 0 mapped to +1."""
    x = np.asarray(x)
    out = np.where(fit.scores(x) >= 0, 1, -1)
    return int(out[0]) if x.ndim == 1 else out


def accuracy(fit: LogRegFit, test: Dataset) -> float:
    if test.n == 0:
        raise ParameterError("test set is empty")
    return float(np.mean(predict(fit, test.x) == test.y))


def _loss(Z: np.ndarray, y: np.ndarray, theta: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, -y * (Z @ theta))))


def _grad(Z: np.ndarray, y: np.ndarray, theta: np.ndarray) -> np.ndarray:
    m = -y * (Z @ theta)
    # d/ds log(1 + exp(-y s)) = -y * sigmoid(-y s)
    s = np.where(m >= 0, 1.0 / (1.0 + np.exp(-m)), np.exp(m) / (1.0 + np.exp(m)))
    return -(Z.T @ (y * s)) / Z.shape[0]


def kkt_residual(grad: np.ndarray, theta: np.ndarray, reg: float) -> float:
    nz = theta != 0
    r_nz = np.abs(grad[nz] + reg * np.sign(theta[nz]))
    r_z = np.maximum(np.abs(grad[~nz]) - reg, 0.0)
    return float(max(r_nz.max(initial=0.0), r_z.max(initial=0.0)))


def lipschitz_constant(Z: np.ndarray) -> float:
    """Largest eigenvalue of Z'Z / (4n): a valid Lipschitz bound for the logistic gradient."""
    if Z.shape[1] == 0:
        return 1.0
    return float(np.linalg.eigvalsh(Z.T @ Z / Z.shape[0])[-1]) / 4.0


def _ista(Z, y, reg, theta0=None, max_iter=10_000, tol=KKT_TOL, history=None):
    n, p = Z.shape
    L = lipschitz_constant(Z)
    theta = np.zeros(p) if theta0 is None else np.array(theta0, dtype=np.float64)
    obj = _loss(Z, y, theta) + reg * np.abs(theta).sum()
    if history is not None:
        history.append(obj)
    it = 0
    g = _grad(Z, y, theta)
    res = kkt_residual(g, theta, reg)
    while res >= tol and it < max_iter:
        it += 1
        v = theta - g / L
        theta = np.sign(v) * np.maximum(np.abs(v) - reg / L, 0.0)
        new_obj = _loss(Z, y, theta) + reg * np.abs(theta).sum()
        if history is not None:
            history.append(new_obj)
        g = _grad(Z, y, theta)
        res = kkt_residual(g, theta, reg)
        if new_obj == obj and res >= tol:
            # no representable progress left; report the residual as is
            obj = new_obj
            break
        obj = new_obj
    return theta, obj, it, res


def l1_logreg(
    data: Dataset,
    reg: float,
    features: Sequence[Feature] | None = None,
    warm_start: LogRegFit | None = None,
    max_iter: int = 10_000,
    history: list | None = None,
) -> LogRegFit:
    """Proximal-gradient (ISTA) fit of the L1-penalised logistic loss, no intercept.

    Stops once the KKT residual drops below 1e-7 or after ``max_iter`` steps.
    ``history``, if given, receives the objective after every step.
    """
    if reg < 0:
        raise ParameterError(f"reg must be non-negative, got {reg}")
    if data.n < 1:
        raise ParameterError("dataset is empty")
    feats = list(features) if features is not None else all_features(data.d)
    Z = feature_matrix(data.x, feats)
    y = data.y.astype(np.float64)
    theta0 = None
    if warm_start is not None:
        theta0 = np.array([warm_start.coef.get(f, 0.0) for f in feats])
    theta, obj, it, res = _ista(Z, y, reg, theta0, max_iter=max_iter, history=history)
    return LogRegFit(
        coef={f: float(c) for f, c in zip(feats, theta)},
        objective=obj,
        iterations=it,
        converged=res < KKT_TOL,
        kkt=res,
        reg=reg,
    )


def reg_max(data: Dataset, features: Sequence[Feature] | None = None) -> float:
    """Smallest penalty at which the all-zero vector is optimal."""
    feats = list(features) if features is not None else all_features(data.d)
    Z = feature_matrix(data.x, feats)
    return float(np.max(np.abs(Z.T @ data.y.astype(np.float64))) / (2 * data.n))


def _nnz(fit: LogRegFit) -> int:
    return sum(1 for c in fit.coef.values() if c != 0)


def l1_support_of_size(data: Dataset, k: int, max_steps: int = 60) -> SelectionResult:
    """Bisect the penalty until exactly ``k`` coefficients are nonzero.

    If the path jumps over ``k``, the smallest support larger than ``k`` seen
    during the search is truncated to its ``k`` largest coefficients.
    """
    feats = _check_k(data, k)
    hi = reg_max(data, feats)
    if k == 0:
        return SelectionResult((), trace=((hi, 0),))
    lo = 0.0
    trace: list[tuple[float, int]] = []
    best_over: LogRegFit | None = None
    warm: LogRegFit | None = None
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        fit = l1_logreg(data, mid, feats, warm_start=warm)
        warm = fit
        size = _nnz(fit)
        trace.append((mid, size))
        if size == k:
            return _selection_from_fit(fit, k, False, trace)
        if size > k:
            lo = mid
            if best_over is None or size < _nnz(best_over) or (size == _nnz(best_over) and mid > best_over.reg):
                best_over = fit
        else:
            hi = mid
    if best_over is None:
        best_over = l1_logreg(data, 0.0, feats, warm_start=warm)
        trace.append((0.0, _nnz(best_over)))
    log.info("l1 path skipped support size %d; truncating a support of %d", k, _nnz(best_over))
    return _selection_from_fit(best_over, k, True, trace)


def _selection_from_fit(fit: LogRegFit, k: int, truncated: bool, trace) -> SelectionResult:
    ranked = sorted((f for f, c in fit.coef.items() if c != 0), key=lambda f: (-abs(fit.coef[f]), f))
    return SelectionResult(
        tuple((f, abs(fit.coef[f])) for f in ranked[:k]), truncated=truncated, trace=tuple(trace)
    )


def fit_logistic(data: Dataset, support: Iterable[Feature], max_iter: int = 100) -> LogRegFit:
    """Unpenalised maximum likelihood on ``support`` by damped Newton steps.

    Coefficients are capped at +-30; hitting the cap, separable data (pushed
    out to the cap) or the iteration limit returns ``converged=False``.
    """
    feats = sorted(set(support))
    if not feats:
        raise ParameterError("support must be nonempty")
    if data.n < 1:
        raise ParameterError("dataset is empty")
    Z = feature_matrix(data.x, feats)
    y = data.y.astype(np.float64)
    n, p = Z.shape
    theta = np.zeros(p)
    obj = _loss(Z, y, theta)
    g = _grad(Z, y, theta)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        s = Z @ theta
        e = np.exp(-np.abs(s))
        w = e / (1.0 + e) ** 2
        H = (Z.T * w) @ Z / n
        try:
            step = np.linalg.solve(H + 1e-12 * np.eye(p), g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        while True:
            cand = theta - t * step
            cand_obj = _loss(Z, y, cand)
            if cand_obj <= obj - 1e-4 * t * float(g @ step) or t < 1e-10:
                break
            t *= 0.5
        theta, obj = cand, cand_obj
        if np.max(np.abs(theta)) > COEF_CAP:
            theta = np.clip(theta, -COEF_CAP, COEF_CAP)
            obj = _loss(Z, y, theta)
            g = _grad(Z, y, theta)
            break
        g = _grad(Z, y, theta)
        if np.linalg.norm(g) < 1e-9:
            if np.all(y * (Z @ theta) > 0):
                # every row classified correctly: separable, the likelihood has no finite maximiser
                theta = theta * (COEF_CAP / np.max(np.abs(theta)))
                obj = _loss(Z, y, theta)
                g = _grad(Z, y, theta)
                break
            converged = True
            break
    return LogRegFit(
        coef={f: float(c) for f, c in zip(feats, theta)},
        objective=obj,
        iterations=it,
        converged=converged,
        kkt=float(np.linalg.norm(g)),
    )
