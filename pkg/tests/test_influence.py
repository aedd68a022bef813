import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopdetect.errors import ContractError, ParameterError, ResourceError
from coopdetect.influence import (
    anticoncentration,
    empirical_weights,
    exact_weight,
    exact_weights,
    extended_empirical_weights,
    extended_exact_weights,
    gamma,
    outcome_prob,
    zeta,
    zeta_decomposition_check,
)
from coopdetect.model import Dataset, ModelSpec, augment_to_pure_interaction, random_acyclic_model, sample_dataset, sigmoid

from conftest import brute_outcome_prob, random_pure_models, random_star_forest


class TestExactWeight:
    def test_chain_closed_form(self, chain4):
        expected = (math.e - 1) ** 3 / (2 * (math.e**3 + 1))
        assert abs(exact_weight(chain4, (1, 4)) - expected) < 1e-12
        assert abs(expected - 0.1203008045337907) < 1e-15

    def test_single_edge(self):
        assert exact_weight(ModelSpec(2, {(1, 2): 1.0}), (1, 2)) == pytest.approx(0.4621171572600098, abs=1e-14)

    def test_different_components(self):
        m = ModelSpec(5, {(1, 2): 1.3, (3, 4): -0.8})
        assert exact_weight(m, (1, 3)) < 1e-12
        assert exact_weight(m, (2, 5)) < 1e-12

    def test_matches_plain_python_oracle(self):
        for m in random_pure_models(10, (3, 7), [(0.3, 2.0)], seed=1):
            for i, j in itertools.combinations(range(1, m.d + 1), 2):
                ref = abs(2 * brute_outcome_prob(m, {i: 1, j: 1}) - 1)
                assert abs(exact_weight(m, (i, j)) - ref) < 1e-12

    def test_batch_agrees_with_single(self):
        for m in random_pure_models(10, (3, 9), [(0.3, 0.5), (1, 2)], seed=2):
            batch = exact_weights(m)
            for pair in itertools.combinations(range(1, m.d + 1), 2):
                assert abs(batch[pair] - exact_weight(m, pair)) < 1e-12

    def test_requires_pure_model(self):
        with pytest.raises(ContractError):
            exact_weight(ModelSpec(3, {(1, 2): 1.0}, {3: 1.0}), (1, 2))

    def test_cap(self):
        with pytest.raises(ResourceError):
            exact_weight(ModelSpec(25, {(1, 2): 1.0}), (1, 2))

    def test_weights_bounded_by_one(self):
        for m in random_pure_models(20, (2, 8), [(1, 5)], seed=3):
            assert all(0 <= v <= 1 for v in exact_weights(m).weights.values())


class TestStructuralProperties:
    """Structural properties of exact influences on acyclic models."""

    models = random_pure_models(60, (3, 10), [(0.3, 0.5), (1, 2)], seed=11)

    def test_alternative_form(self):
        for m in self.models[:25]:
            w = exact_weights(m)
            for i, j in itertools.combinations(range(1, m.d + 1), 2):
                alt = abs(outcome_prob(m, {i: 1, j: 1}) - outcome_prob(m, {i: 1, j: -1}))
                assert abs(alt - w[(i, j)]) < 1e-12

    def test_direct_influence_exceeds_gamma(self):
        for m in self.models:
            lam, mu = m.bounds
            g = gamma(m.d, lam, mu)
            w = exact_weights(m)
            assert all(w[e] >= g for e in m.pairwise)

    def test_zero_influence(self):
        for m in self.models:
            g, w = m.graph(), exact_weights(m)
            for i, j in itertools.combinations(range(1, m.d + 1), 2):
                p = g.path(i, j)
                if p is None or (len(p) - 1) % 2 == 0:
                    assert w[(i, j)] <= 1e-12

    def test_local_dominance_with_margin(self):
        for m in self.models:
            lam, mu = m.bounds
            g, w = gamma(m.d, lam, mu), exact_weights(m)
            for path in m.graph().simple_paths(2):
                ends = w[(path[0], path[-1])]
                weakest = min(w[(a, b)] for a, b in zip(path, path[1:]))
                assert ends <= weakest - g + 1e-12

    def test_union_of_stars(self):
        for s in range(30):
            m = random_star_forest(int(3 + s % 10), 0.3, 2.0, seed=s)
            w = exact_weights(m)
            for pair in itertools.combinations(range(1, m.d + 1), 2):
                assert (pair in m.pairwise) == (w[pair] > 1e-9)

    def test_indirect_influence_is_real(self, chain4):
        assert exact_weight(chain4, (1, 4)) > 0.1


class TestEmpiricalWeights:
    def test_balanced_hits_give_zero(self):
        x = np.array([[1, 1]] * 1 + [[-1, 1]] * 7)
        y = np.ones(8)
        assert empirical_weights(Dataset(x, y))[(1, 2)] == 0.0

    def test_all_hits(self):
        data = Dataset(np.ones((10, 3)), np.ones(10))
        assert all(v == 7.0 for v in empirical_weights(data).weights.values())

    def test_empty(self):
        with pytest.raises(ParameterError):
            empirical_weights(Dataset(np.ones((0, 3)), np.ones(0)))

    def test_matches_loop_definition(self):
        data = sample_dataset(random_acyclic_model(6, 0, 5, 1, 2, seed=0), 333, 1)
        w = empirical_weights(data)
        for i, j in itertools.combinations(range(6), 2):
            hits = sum(1 for t in range(data.n) if data.x[t, i] == data.x[t, j] == data.y[t] == 1)
            assert w[(i + 1, j + 1)] == abs(8 * hits / data.n - 1)

    def test_converges_to_exact(self):
        m = random_acyclic_model(10, 0, 9, 0.5, 1.5, seed=21)
        w, what = exact_weights(m), empirical_weights(sample_dataset(m, 100_000, 22))
        # plug-in sd is about 8 * 0.33 / sqrt(n); 0.04 is ~5 sd over 45 pairs
        assert max(abs(w.weights[k] - what.weights[k]) for k in w.weights) < 0.04


class TestGamma:
    def test_reference_setting(self):
        assert gamma(10, 0.3, 0.5) == pytest.approx(0.0226, abs=1e-4)

    def test_equal_bounds(self):
        assert gamma(10, 1, 1) == pytest.approx(0.02554, abs=1e-5)
        expected = math.sqrt(2 / (10 * math.pi)) * (sigmoid(4) - sigmoid(2))
        assert gamma(10, 1, 1) == pytest.approx(expected, rel=1e-15)

    def test_vanishes_as_lambda_shrinks(self):
        assert gamma(10, 1e-12, 1) < 1e-12

    @pytest.mark.parametrize("args", [(0, 1, 1), (5, 0, 1), (5, 2, 1)])
    def test_invalid(self, args):
        with pytest.raises(ParameterError):
            gamma(*args)


class TestExtendedWeights:
    def test_identity_vs_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = int(rng.integers(2, 9))
            k_ind = int(rng.integers(1, d + 1))
            m = random_acyclic_model(d, k_ind, int(rng.integers(0, d - k_ind + 1)) if k_ind < d else 0, 0.3, 2, seed=int(rng.integers(2**32)))
            a, b = extended_exact_weights(m, "identity"), extended_exact_weights(m, "oracle")
            assert a.weights.keys() == b.weights.keys()
            assert max(abs(a.weights[k] - b.weights[k]) for k in a.weights) < 1e-12

    def test_identity_vs_oracle_cyclic_model(self):
        m = ModelSpec(4, {(1, 2): 1.0, (2, 3): -0.5, (1, 3): 0.7}, {1: 0.4, 4: -1.1})
        a, b = extended_exact_weights(m, "identity"), extended_exact_weights(m, "oracle")
        assert max(abs(a.weights[k] - b.weights[k]) for k in a.weights) < 1e-12

    def test_pure_model_has_no_aux_influence(self):
        m = random_acyclic_model(7, 0, 6, 0.3, 2, seed=8)
        w = extended_exact_weights(m)
        assert all(w[(0, i)] < 1e-12 for i in range(1, 8))

    def test_single_individual_effect(self):
        w = extended_exact_weights(ModelSpec(1, individual={1: 2.0}))
        assert w[(0, 1)] == pytest.approx(2 * sigmoid(2.0) - 1, abs=1e-14)
        assert w[(0, 1)] == pytest.approx(0.7615941559557646, abs=1e-14)

    def test_sign_flip_identity(self):
        """Pr(y~=+1 | x_i=x_j=+1, x_0=-1) on the augmented model equals Pr(y=+1 | x_i=x_j=-1)."""
        rng = np.random.default_rng(9)
        for _ in range(10):
            d = int(rng.integers(2, 9))
            m = random_acyclic_model(d, 1, min(1, d - 1), 0.3, 2, seed=int(rng.integers(2**32)))
            aug = augment_to_pure_interaction(m)
            for i, j in itertools.combinations(range(1, d + 1), 2):
                lhs = outcome_prob(aug, {i: 1, j: 1, d + 1: -1})
                rhs = outcome_prob(m, {i: -1, j: -1})
                assert abs(lhs - rhs) < 1e-12

    def test_bad_mode(self):
        with pytest.raises(ParameterError):
            extended_exact_weights(ModelSpec(2), "nope")


class TestExtendedEmpirical:
    def test_quarter_hits_zero_weight(self):
        x = np.array([[1], [1], [-1], [-1]])
        y = np.array([1, -1, 1, -1])
        assert extended_empirical_weights(Dataset(x, y))[(0, 1)] == 0.0

    def test_all_positive(self):
        data = Dataset(np.ones((12, 3)), np.ones(12))
        w = extended_empirical_weights(data)
        assert all(w[(0, i)] == 3.0 for i in (1, 2, 3))

    def test_empty(self):
        with pytest.raises(ParameterError):
            extended_empirical_weights(Dataset(np.ones((0, 2)), np.ones(0)))

    def test_unknown_estimator(self):
        with pytest.raises(ParameterError):
            extended_empirical_weights(Dataset(np.ones((2, 2)), np.ones(2)), "median")

    def test_contrast_and_conditional_loop_definitions(self):
        data = sample_dataset(random_acyclic_model(4, 2, 2, 1, 2, seed=1), 200, 2)
        x, y = data.x, data.y

        def cond(mask):
            return (y[mask] == 1).mean()

        con, ctr = extended_empirical_weights(data, "conditional"), extended_empirical_weights(data, "contrast")
        for i in range(4):
            assert con[(0, i + 1)] == pytest.approx(abs(2 * cond(x[:, i] == 1) - 1), abs=1e-15)
            assert ctr[(0, i + 1)] == pytest.approx(abs(cond(x[:, i] == 1) - cond(x[:, i] == -1)), abs=1e-15)
        for i, j in itertools.combinations(range(4), 2):
            pp, mm = (x[:, i] == 1) & (x[:, j] == 1), (x[:, i] == -1) & (x[:, j] == -1)
            z = x[:, i] * x[:, j]
            assert con[(i + 1, j + 1)] == pytest.approx(abs(cond(pp) + cond(mm) - 1), abs=1e-15)
            assert ctr[(i + 1, j + 1)] == pytest.approx(abs(cond(z == 1) - cond(z == -1)), abs=1e-15)

    def test_empty_cell_is_uninformative(self):
        data = Dataset(np.ones((5, 2)), np.ones(5))
        assert extended_empirical_weights(data, "conditional")[(1, 2)] == 0.5
        assert extended_empirical_weights(data, "contrast")[(0, 1)] == 0.5

    @pytest.mark.parametrize("estimator", ["exact", "conditional", "contrast"])
    def test_converges_to_exact(self, estimator):
        m = random_acyclic_model(10, 5, 5, 1, 2, seed=4)
        w = extended_exact_weights(m)
        what = extended_empirical_weights(sample_dataset(m, 100_000, 5), estimator)
        assert max(abs(w.weights[k] - what.weights[k]) for k in w.weights) < 0.03


class TestZeta:
    def test_decomposition_residual(self):
        for m in random_pure_models(30, (2, 10), [(0.3, 0.5), (1, 2)], seed=6, full_tree_prob=0.8):
            for pair in m.pairwise:
                assert zeta_decomposition_check(m, pair) < 1e-12

    def test_absent_pair_is_zero(self):
        m = ModelSpec(4, {(1, 2): 1.0, (2, 3): 0.5})
        for x in itertools.product((1, -1), repeat=4):
            assert zeta(m, (1, 4), x) == 0.0

    def test_sign_follows_coefficient(self):
        m = ModelSpec(5, {(1, 2): -0.7, (2, 3): 1.4, (3, 4): 2.0, (4, 5): -3.0})
        for x in itertools.product((1, -1), repeat=5):
            assert zeta(m, (1, 2), x) < 0 < zeta(m, (3, 4), x)

    def test_holds_on_cyclic_models_too(self):
        m = ModelSpec(3, {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 1.0})
        assert zeta_decomposition_check(m, (1, 2)) < 1e-12

    def test_cap(self):
        with pytest.raises(ResourceError):
            zeta_decomposition_check(ModelSpec(17, {(1, 2): 1.0}), (1, 2))


class TestAnticoncentration:
    def test_single_coefficient(self):
        assert anticoncentration([3.7], "brute") == 1.0
        assert anticoncentration([3.7], "bound") == pytest.approx(0.46065886596178063, abs=1e-15)

    def test_two_equal(self):
        assert anticoncentration([1, 1], "brute") == 0.5
        assert anticoncentration([1, 1], "bound") == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)

    def test_matches_itertools(self):
        a = [0.3, 1.2, -0.7, 0.9, 2.2]
        hits = sum(abs(sum(s * v for s, v in zip(z, a))) <= 2.2 + 1e-12 for z in itertools.product((1, -1), repeat=5))
        assert anticoncentration(a, "brute") == hits / 32

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=12))
    def test_bound_holds(self, a):
        assert anticoncentration(a, "brute") >= anticoncentration(a, "bound")

    def test_cap(self):
        with pytest.raises(ResourceError):
            anticoncentration(np.ones(21), "brute")
