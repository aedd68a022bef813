import itertools
import math

import numpy as np
import pytest

from coopdetect.model import ModelSpec, random_acyclic_model


def brute_outcome_prob(model: ModelSpec, fixed=None) -> float:
    """Pr(y=+1 | fixed coordinates) by a plain-Python sum over {±1}^d."""
    fixed = fixed or {}
    total, count = 0.0, 0
    for x in itertools.product((1, -1), repeat=model.d):
        if any(x[i - 1] != v for i, v in fixed.items()):
            continue
        s = sum(b * x[i - 1] for i, b in model.individual.items())
        s += sum(b * x[i - 1] * x[j - 1] for (i, j), b in model.pairwise.items())
        total += 1.0 / (1.0 + math.exp(-s))
        count += 1
    return total / count


def random_pure_models(count, d_range, bounds, seed, full_tree_prob=0.5):
    """Seeded random acyclic pure-interaction models with varied edge counts."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        d = int(rng.integers(d_range[0], d_range[1] + 1))
        lam, mu = bounds[k % len(bounds)]
        k_pairs = d - 1 if rng.random() < full_tree_prob else int(rng.integers(0, d))
        out.append(random_acyclic_model(d, 0, k_pairs, lam, mu, seed=int(rng.integers(2**63))))
    return out


def random_star_forest(d, lam, mu, seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(np.arange(1, d + 1)).tolist()
    pairwise = {}
    while len(perm) >= 2:
        size = int(rng.integers(2, min(len(perm), 5) + 1))
        center, *leaves = perm[:size]
        perm = perm[size:]
        for leaf in leaves:
            sign = 1 if rng.random() < 0.5 else -1
            pairwise[tuple(sorted((center, leaf)))] = sign * rng.uniform(lam, mu)
    return ModelSpec(d, pairwise, bounds=(lam, mu))


@pytest.fixture
def chain4():
    return ModelSpec(4, {(1, 2): 1.0, (2, 3): 1.0, (3, 4): 1.0})


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(label: str, ok: bool, detail: str) -> bool:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
