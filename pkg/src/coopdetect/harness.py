"""Simulation harness: random models, per-trial detection, aggregation, curve fit.

Seeds: the model for ``model_index`` comes from ``mix_seed(master, 0, index)``;
training data from ``mix_seed(master, 1, index, n)``; test data from
``mix_seed(master, 2, index, n)``. Every method therefore sees the same model
and the same samples at a given (index, n), which keeps comparisons paired.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from ._io import text_sink
from .baselines import (
    Feature,
    LogRegFit,
    accuracy,
    fit_logistic,
    l1_support_of_size,
    mi_ranking,
    model_features,
    mrmr_select,
)
from .detector import detect, detect_extended
from .errors import ParameterError
from .influence import EXTENDED_ESTIMATORS
from .model import ModelSpec, random_acyclic_model, sample_dataset
from .rng import mix_seed

METHODS = ("algorithm1", "mi", "mrmr", "l1")
RESULT_COLUMNS = ("method", "n", "detection_rate", "fp_rate", "accuracy", "stderr_detection", "n_models")


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 10
    k_individual: int = 5
    k_pairs: int = 5
    lam: float = 1.0
    mu: float = 2.0
    sample_sizes: tuple[int, ...] = (300, 600, 900, 1200, 1500)
    n_models: int = 300
    n_test: int = 200
    methods: tuple[str, ...] = ("algorithm1",)
    master_seed: int = 0
    extended_estimator: str = "contrast"

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        counts = (self.d, self.n_models, self.n_test) + self.sample_sizes
        if any(c <= 0 for c in counts) or not self.sample_sizes:
            raise ParameterError("d, n_models, n_test and sample sizes must be positive")
        if self.k_individual < 0 or self.k_pairs < 0 or self.k_individual + self.k_pairs == 0:
            raise ParameterError("need at least one true feature")
        if not 0 < self.lam <= self.mu:
            raise ParameterError(f"need 0 < lambda <= mu, got ({self.lam}, {self.mu})")
        if self.extended_estimator not in EXTENDED_ESTIMATORS:
            raise ParameterError(f"extended_estimator must be one of {EXTENDED_ESTIMATORS}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ParameterError(f"unknown methods {bad}; choose from {METHODS}")

    @property
    def k_true(self) -> int:
        return self.k_individual + self.k_pairs

    def to_json(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        out["sample_sizes"] = list(self.sample_sizes)
        out["methods"] = list(self.methods)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        if "lambda" in obj:
            obj["lam"] = obj.pop("lambda")
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParameterError(f"unknown config fields: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class TrialResult:
    model_index: int
    method: str
    n: int
    exact_detection: bool
    n_missed: int
    n_false: int
    n_correct: int
    n_test: int
    seed: int
    error: str | None = None

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_test if self.n_test else math.nan


def trial_model(config: ExperimentConfig, model_index: int) -> ModelSpec:
    return random_acyclic_model(
        config.d,
        config.k_individual,
        config.k_pairs,
        config.lam,
        config.mu,
        seed=mix_seed(config.master_seed, 0, model_index),
    )


def select_features(method: str, data, config: ExperimentConfig) -> set[Feature]:
    if method == "algorithm1":
        if config.k_individual > 0:
            res = detect_extended(data, config.lam, config.mu, config.extended_estimator)
        else:
            res = detect(data, config.lam, config.mu)
        return {Feature.from_edge(e) for e in res.recovered.edges}
    if method == "mi":
        return set(mi_ranking(data, config.k_true).features)
    if method == "mrmr":
        return set(mrmr_select(data, config.k_true).features)
    if method == "l1":
        return set(l1_support_of_size(data, config.k_true).features)
    raise ParameterError(f"unknown method {method!r}")


def run_trial(config: ExperimentConfig, model_index: int, n: int, method: str) -> TrialResult:
    model = trial_model(config, model_index)
    seed = mix_seed(config.master_seed, 1, model_index, n)
    data = sample_dataset(model, n, seed)
    test = sample_dataset(model, config.n_test, mix_seed(config.master_seed, 2, model_index, n))
    chosen = select_features(method, data, config)
    truth = model_features(model)
    fit = fit_logistic(data, chosen) if chosen else LogRegFit()
    n_correct = int(round(accuracy(fit, test) * test.n))
    missed = len(truth - chosen)
    false = len(chosen - truth)
    return TrialResult(
        model_index=model_index,
        method=method,
        n=n,
        exact_detection=missed == 0 and false == 0,
        n_missed=missed,
        n_false=false,
        n_correct=n_correct,
        n_test=test.n,
        seed=seed,
    )


def _safe_trial(args) -> TrialResult:
    config, index, n, method = args
    try:
        return run_trial(config, index, n, method)
    except Exception as exc:  # recorded per trial, surfaced in the aggregate
        return TrialResult(index, method, n, False, 0, 0, 0, 0, mix_seed(config.master_seed, 1, index, n), repr(exc))


def run_trials(config: ExperimentConfig, workers: int = 1) -> list[TrialResult]:
    tasks = [
        (config, idx, n, m)
        for m in config.methods
        for n in config.sample_sizes
        for idx in range(config.n_models)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_trial, tasks, chunksize=16))
    else:
        results = [_safe_trial(t) for t in tasks]
    order = {m: k for k, m in enumerate(METHODS)}
    return sorted(results, key=lambda r: (order[r.method], r.n, r.model_index))


@dataclass(frozen=True)
class CellSummary:
    method: str
    n: int
    detection_rate: float
    fp_rate: float
    accuracy: float
    stderr_detection: float
    n_models: int
    n_failed: int = 0

    def row(self) -> list:
        return [getattr(self, c) for c in RESULT_COLUMNS]


def aggregate(trials: Sequence[TrialResult], k_true: int) -> list[CellSummary]:
    """Per (method, n) averages; integer counts are summed before dividing."""
    cells: dict[tuple[str, int], list[TrialResult]] = {}
    for t in trials:
        cells.setdefault((t.method, t.n), []).append(t)
    order = {m: k for k, m in enumerate(METHODS)}
    out = []
    for (method, n) in sorted(cells, key=lambda c: (order[c[0]], c[1])):
        group = cells[(method, n)]
        ok = [t for t in group if t.error is None]
        m = len(ok)
        if m == 0:
            out.append(CellSummary(method, n, math.nan, math.nan, math.nan, math.nan, 0, len(group)))
            continue
        hits = sum(t.exact_detection for t in ok)
        p = hits / m
        out.append(
            CellSummary(
                method=method,
                n=n,
                detection_rate=p,
                fp_rate=sum(t.n_false for t in ok) / (m * k_true),
                accuracy=sum(t.n_correct for t in ok) / sum(t.n_test for t in ok),
                stderr_detection=math.sqrt(p * (1 - p) / m),
                n_models=m,
                n_failed=len(group) - m,
            )
        )
    return out


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[CellSummary]:
    return aggregate(run_trials(config, workers), config.k_true)


def write_results(rows: Sequence[CellSummary], path) -> None:
    with text_sink(path) as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            w.writerow(r.row())


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["n"] = int(r["n"])
        r["n_models"] = int(r["n_models"])
        for c in ("detection_rate", "fp_rate", "accuracy", "stderr_detection"):
            r[c] = float(r[c])
    return rows


class CurveFit(NamedTuple):
    B: float
    c: float
    residual: float


def curve_rate(n, B: float, c: float):
    return 1.0 - B * np.exp(-np.asarray(n, dtype=np.float64) / c)


def fit_complexity_curve(points: Sequence[tuple[float, float]]) -> CurveFit:
    """Fit ``rate(n) = 1 - B exp(-n / c)`` by regressing log(1 - rate) on n.

    Points with rate 1 are left out of the regression but count toward the
    returned sum of squared residuals (in rate space).
    """
    pts = [(float(n), float(r)) for n, r in points]
    usable = [(n, r) for n, r in pts if r < 1.0]
    if len(usable) < 2:
        raise ParameterError("need at least two points with detection rate below 1")
    ns = np.array([n for n, _ in usable])
    logs = np.log1p(-np.array([r for _, r in usable]))
    if np.ptp(ns) == 0:
        raise ParameterError("sample sizes must not all coincide")
    slope, intercept = np.polyfit(ns, logs, 1)
    if slope >= 0:
        raise ParameterError("miss probability does not decrease with n; no positive scale c")
    B, c = float(np.exp(intercept)), float(-1.0 / slope)
    all_n = np.array([n for n, _ in pts])
    all_r = np.array([r for _, r in pts])
    resid = float(np.sum((all_r - curve_rate(all_n, B, c)) ** 2))
    return CurveFit(B, c, resid)
