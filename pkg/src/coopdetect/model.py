"""Logistic outcome model with individual and pairwise terms on ±1 covariates.

Covariates are i.i.d. uniform on {+1, -1}. Given ``x``, the outcome is +1
with probability ``sigmoid(sum_i b_i x_i + sum_{i<j} b_ij x_i x_j)``.
Indices are 1-based throughout the public API.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from ._io import text_sink
from .errors import DimensionError, ParameterError, ResourceError
from .graph import InteractionGraph, UnionFind, canon
from .rng import make_rng

ENUM_CAP = 24
_CHUNK_BITS = 16


def sigmoid(x):
    """Overflow-safe logistic function; accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class ModelSpec:
    d: int
    pairwise: Mapping[tuple[int, int], float] = field(default_factory=dict)
    individual: Mapping[int, float] = field(default_factory=dict)
    bounds: tuple[float, float] | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError(f"d must be positive, got {self.d}")
        pw = {}
        for (i, j), b in self.pairwise.items():
            if i == j:
                raise ParameterError(f"self-pair ({i}, {j})")
            key = canon(i, j)
            if not (1 <= key[0] and key[1] <= self.d):
                raise ParameterError(f"pair {key} outside 1..{self.d}")
            if key in pw:
                raise ParameterError(f"duplicate pair {key}")
            if b != 0:
                pw[key] = float(b)
        ind = {}
        for i, b in self.individual.items():
            if not 1 <= i <= self.d:
                raise ParameterError(f"index {i} outside 1..{self.d}")
            if b != 0:
                ind[int(i)] = float(b)
        if self.bounds is not None:
            lam, mu = self.bounds
            if not 0 < lam <= mu:
                raise ParameterError(f"bounds need 0 < lambda <= mu, got {self.bounds}")
            for b in list(pw.values()) + list(ind.values()):
                if not lam <= abs(b) <= mu:
                    raise ParameterError(f"|{b}| outside [{lam}, {mu}]")
        object.__setattr__(self, "pairwise", dict(sorted(pw.items())))
        object.__setattr__(self, "individual", dict(sorted(ind.items())))

    @property
    def is_pure_interaction(self) -> bool:
        return not self.individual

    def graph(self) -> InteractionGraph:
        return InteractionGraph(self.d, frozenset(self.pairwise))

    def extended_graph(self) -> InteractionGraph:
        """Graph over {0..d} where individual effects become edges to vertex 0."""
        edges = set(self.pairwise) | {(0, i) for i in self.individual}
        return InteractionGraph(self.d, frozenset(edges), aux=True)

    def coefficient_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(b, B)``: individual vector and symmetric pair matrix (0-based)."""
        b = np.zeros(self.d)
        B = np.zeros((self.d, self.d))
        for i, v in self.individual.items():
            b[i - 1] = v
        for (i, j), v in self.pairwise.items():
            B[i - 1, j - 1] = B[j - 1, i - 1] = v
        return b, B

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Linear predictor for each row of a ±1 matrix."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise DimensionError(f"expected (*, {self.d}) covariates, got {X.shape}")
        b, B = self.coefficient_arrays()
        s = X @ b
        for (i, j), v in self.pairwise.items():
            s += v * X[:, i - 1] * X[:, j - 1]
        return s

    def to_json(self) -> dict:
        lam, mu = self.bounds if self.bounds else (None, None)
        return {
            "d": self.d,
            "individual": [[i, b] for i, b in self.individual.items()],
            "pairwise": [[i, j, b] for (i, j), b in self.pairwise.items()],
            "lambda": lam,
            "mu": mu,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ModelSpec":
        lam, mu = obj.get("lambda"), obj.get("mu")
        return cls(
            d=int(obj["d"]),
            pairwise={(int(i), int(j)): float(b) for i, j, b in obj.get("pairwise", [])},
            individual={int(i): float(b) for i, b in obj.get("individual", [])},
            bounds=None if lam is None or mu is None else (float(lam), float(mu)),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path) -> "ModelSpec":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.int8, copy=True)
        y = np.array(self.y, dtype=np.int8, copy=True).reshape(-1)
        if x.ndim != 2:
            raise DimensionError(f"x must be 2-D, got shape {x.shape}")
        if x.shape[0] != y.shape[0]:
            raise DimensionError(f"{x.shape[0]} covariate rows vs {y.shape[0]} outcomes")
        if not (np.all(np.abs(x) == 1) and np.all(np.abs(y) == 1)):
            raise ParameterError("entries must be +1 or -1")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def to_csv(self, path) -> None:
        with text_sink(path) as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i}" for i in range(1, self.d + 1)] + ["y"])
            for row, yv in zip(self.x.tolist(), self.y.tolist()):
                w.writerow(row + [yv])

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if not header or header[-1] != "y":
                raise ParameterError("CSV header must end with column 'y'")
            rows = [[int(v) for v in row] for row in r if row]
        d = len(header) - 1
        arr = np.array(rows, dtype=np.int64).reshape(-1, d + 1)
        return cls(arr[:, :d], arr[:, d])


def conditional_prob(model: ModelSpec, x) -> float:
    """Pr(y = +1 | x) for a single ±1 covariate vector."""
    x = np.asarray(x)
    if x.shape != (model.d,):
        raise DimensionError(f"expected length {model.d}, got shape {x.shape}")
    return float(sigmoid(model.scores(x[None, :])[0]))


def conditional_prob_neg(model: ModelSpec, x) -> float:
    return 1.0 - conditional_prob(model, x)


def enumerate_configs(d: int, fixed: Mapping[int, int] | None = None) -> Iterator[np.ndarray]:
    """Yield all ±1 vectors of length ``d`` in chunks, optionally pinning coordinates.

    ``fixed`` maps 1-based index to its pinned value. Free coordinates run over
    all ``2**k`` assignments; chunks hold at most 2**16 rows.
    """
    fixed = dict(fixed or {})
    if d > ENUM_CAP:
        raise ResourceError(f"enumeration over d={d} exceeds cap {ENUM_CAP}")
    free = [i for i in range(d) if i + 1 not in fixed]
    k = len(free)
    total = 1 << k
    step = 1 << _CHUNK_BITS
    bits = np.arange(k, dtype=np.int64)
    for start in range(0, total, step):
        idx = np.arange(start, min(total, start + step), dtype=np.int64)
        X = np.empty((idx.size, d), dtype=np.float64)
        if k:
            X[:, free] = 1.0 - 2.0 * ((idx[:, None] >> bits) & 1)
        for i, v in fixed.items():
            X[:, i - 1] = v
        yield X


def sample_dataset(model: ModelSpec, n: int, seed: int) -> Dataset:
    """Draw ``n`` i.i.d. samples; covariates first, then one uniform per outcome."""
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    rng = make_rng(seed)
    x = 1 - 2 * rng.integers(0, 2, size=(n, model.d), dtype=np.int8)
    u = rng.random(n)
    p = sigmoid(model.scores(x)) if n else np.zeros(0)
    y = np.where(u < p, 1, -1).astype(np.int8)
    return Dataset(x, y)


def _uniform_signed(rng: np.random.Generator, lam: float, mu: float) -> float:
    mag = rng.uniform(lam, mu)
    return float(mag if rng.random() < 0.5 else -mag)


def random_acyclic_model(
    d: int,
    k_individual: int,
    k_pairs: int,
    lam: float,
    mu: float,
    seed: int,
) -> ModelSpec:
    """Random model whose extended graph (individual effects as edges to 0) is a forest.

    Individual-effect indices are drawn first, then candidate pairs are drawn
    uniformly and accepted unless they close a cycle. Any forest extends to a
    spanning tree, so the rejection loop always terminates when
    ``k_individual + k_pairs <= d``.
    """
    if not 0 < lam <= mu:
        raise ParameterError(f"need 0 < lambda <= mu, got ({lam}, {mu})")
    if d < 1 or k_individual < 0 or k_pairs < 0:
        raise ParameterError("counts must be non-negative and d positive")
    if k_individual > d or k_pairs > d - 1 or k_individual + k_pairs > d:
        raise ParameterError(
            f"infeasible counts: d={d}, k_individual={k_individual}, k_pairs={k_pairs}"
        )
    rng = make_rng(seed)
    uf = UnionFind(range(d + 1))
    individual = {}
    for i in sorted(rng.choice(np.arange(1, d + 1), size=k_individual, replace=False).tolist()):
        uf.union(0, i)
        individual[int(i)] = _uniform_signed(rng, lam, mu)
    pairwise: dict[tuple[int, int], float] = {}
    while len(pairwise) < k_pairs:
        i, j = (int(v) for v in rng.choice(np.arange(1, d + 1), size=2, replace=False))
        key = canon(i, j)
        if key in pairwise or not uf.union(i, j):
            continue
        pairwise[key] = _uniform_signed(rng, lam, mu)
    return ModelSpec(d, pairwise, individual, bounds=(lam, mu))


def augment_to_pure_interaction(model: ModelSpec) -> ModelSpec:
    """Move individual effects onto an auxiliary covariate.

    The auxiliary vertex (label 0 in extended graphs) is stored as index
    ``d + 1`` of the returned model, so ``b_i`` becomes the pair ``(i, d+1)``.
    """
    aux = model.d + 1
    pairwise = dict(model.pairwise)
    for i, b in model.individual.items():
        pairwise[(i, aux)] = b
    return ModelSpec(aux, pairwise, {}, bounds=model.bounds)
