import json

import numpy as np
import pytest

from gossip_accuracy import (
    NetworkParams,
    generator_from_json,
    load_generator,
    rate_triple,
    solve_linear,
    stationary_distribution,
    validate_generator,
)
from gossip_accuracy.errors import (
    BadShape,
    InvalidParameter,
    KOutOfRange,
    NegativeRate,
    Reducible,
    RowSumViolation,
    SingularSystem,
)
from gossip_accuracy.presets import FOUR_STATE_RATES

from conftest import power_iteration_stationary, substitution_solve

# frozen via the power-iteration oracle (agrees with the dense solve to 8e-16)
PI_FOUR_STATE = (
    0.21373915029693927,
    0.34136592051164916,
    0.2091708542713568,
    0.23572407492005487,
)


class TestValidateGenerator:
    def test_binary_demo(self, binary_gen):
        assert binary_gen.size == 2
        assert np.allclose(binary_gen.exit_rates, [0.25, 0.75])

    def test_all_zero_is_reducible(self):
        with pytest.raises(Reducible):
            validate_generator([[0.0, 0.0], [0.0, 0.0]])

    def test_four_state_demo(self, four_state_gen):
        assert four_state_gen.size == 4
        assert np.allclose(four_state_gen.exit_rates, [1.00, 0.85, 1.15, 0.85])

    def test_rows_renormalized(self, four_state_gen):
        # diagonal is the exact negation of the off-diagonal sum; summation
        # order still leaves O(eps) residue, bounded by the structural tolerance
        assert np.abs(four_state_gen.rates.sum(axis=1)).max() < 1e-12

    def test_exit_rates_positive(self, four_state_gen):
        nu = four_state_gen.exit_rates
        assert np.all(nu >= 0) and nu.max() > 0

    def test_negative_rate(self):
        with pytest.raises(NegativeRate):
            validate_generator([[-0.25, 0.25], [-0.1, 0.1]])

    def test_row_sum_violation(self):
        with pytest.raises(RowSumViolation):
            validate_generator([[-0.30, 0.25], [0.75, -0.75]])

    def test_small_diagonal_slack_accepted(self):
        g = validate_generator([[-0.25 + 1e-12, 0.25], [0.75, -0.75]])
        assert g.rates[0, 0] == -0.25

    def test_bad_shapes(self):
        with pytest.raises(BadShape):
            validate_generator([[0.0, 1.0, 2.0]])
        with pytest.raises(BadShape):
            validate_generator([[0.0]])
        with pytest.raises(BadShape):
            validate_generator(np.zeros((41, 41)))

    def test_one_way_chain_reducible(self):
        with pytest.raises(Reducible):
            validate_generator([[-1.0, 1.0], [0.0, 0.0]])


class TestGeneratorJson:
    def test_round_trip(self, tmp_path):
        doc = {"states": 4, "rates": FOUR_STATE_RATES}
        path = tmp_path / "gen.json"
        path.write_text(json.dumps(doc))
        g = load_generator(path)
        assert g.size == 4

    def test_state_count_mismatch(self):
        with pytest.raises(BadShape):
            generator_from_json({"states": 3, "rates": FOUR_STATE_RATES})

    def test_missing_key(self):
        with pytest.raises(BadShape):
            generator_from_json({"rates": FOUR_STATE_RATES})

    def test_same_taxonomy_as_validate(self):
        with pytest.raises(NegativeRate):
            generator_from_json({"states": 2, "rates": [[-0.25, 0.25], [-0.1, 0.1]]})


class TestStationary:
    def test_binary_closed_form(self, binary_gen):
        pi = stationary_distribution(binary_gen).probs
        assert pi == pytest.approx([0.75, 0.25], abs=1e-14)

    def test_symmetric_binary(self):
        g = validate_generator([[-0.7, 0.7], [0.7, -0.7]])
        pi = stationary_distribution(g).probs
        assert pi == pytest.approx([0.5, 0.5], abs=1e-14)

    def test_four_state_vs_power_iteration(self, four_state_gen):
        pi = stationary_distribution(four_state_gen).probs
        oracle = power_iteration_stationary(four_state_gen.rates)
        assert np.abs(pi - oracle).max() < 1e-9
        assert pi == pytest.approx(PI_FOUR_STATE, abs=1e-12)

    def test_residual_and_normalization(self, four_state_gen):
        pi = stationary_distribution(four_state_gen).probs
        assert abs(pi.sum() - 1.0) < 1e-12
        assert np.abs(pi @ four_state_gen.rates).max() <= 1e-10
        assert pi.min() >= 0

    @pytest.mark.parametrize("scale", [0.1, 1.0, 10.0])
    def test_invariant_under_uniform_scaling(self, four_state_gen, scale):
        scaled = validate_generator(np.asarray(FOUR_STATE_RATES) * scale)
        pi = stationary_distribution(scaled).probs
        assert pi == pytest.approx(PI_FOUR_STATE, abs=1e-10)


class TestRateTriple:
    def test_direct_evaluation(self):
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=1.0)
        rt = rate_triple(p, 3)
        assert rt.alpha_k == pytest.approx(0.3)
        assert rt.beta_k == pytest.approx(7.0 / 3.0)
        assert rt.gamma_k == pytest.approx(2.0 / 3.0)

    def test_full_set(self):
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=1.0)
        rt = rate_triple(p, 10)
        assert rt.beta_k == 0.0
        assert rt.alpha_k == pytest.approx(1.0)

    def test_single_node(self):
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=1.0)
        assert rate_triple(p, 1).gamma_k == 0.0

    def test_out_of_range(self):
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=1.0)
        with pytest.raises(KOutOfRange):
            rate_triple(p, 0)
        with pytest.raises(KOutOfRange):
            rate_triple(p, 11)

    def test_partitioned_event_rate_increasing(self):
        # the three rates partition all events touching the subset; their sum
        # k lambda_s / n + k lambda grows strictly with k (beta_k alone peaks
        # at k = n/2 and falls back to zero, so it is not monotone)
        p = NetworkParams(n=10, lambda_s=0.7, lambda_=1.3)
        sums = []
        for k in range(1, 11):
            rt = rate_triple(p, k)
            assert rt.alpha_k + rt.beta_k + rt.gamma_k == pytest.approx(
                k * p.lambda_s / p.n + k * p.lambda_
            )
            sums.append(rt.alpha_k + rt.beta_k + rt.gamma_k)
        assert all(b > a for a, b in zip(sums, sums[1:]))

    def test_bad_params(self):
        with pytest.raises(InvalidParameter):
            NetworkParams(n=1, lambda_s=1.0, lambda_=1.0)
        with pytest.raises(InvalidParameter):
            NetworkParams(n=5, lambda_s=-1.0, lambda_=1.0)


class TestSolveLinear:
    def test_identity(self):
        b = np.array([3.0, -1.0, 0.5])
        assert np.array_equal(solve_linear(np.eye(3), b), b)

    def test_boundary_system_closed_form(self):
        # 2x2 full-network balance system with a known closed-form solution
        q12, q21, ls = 0.25, 0.75, 1.0
        s = q12 + q21
        pi1, pi2 = q21 / s, q12 / s
        w = np.array([[q12 + ls, q21], [q12, q21 + ls]])
        v = np.array([q21 * pi2 + ls * pi1, q12 * pi1 + ls * pi2])
        x = solve_linear(w, v)
        expect = np.array([q21 * (ls + q21), q12 * (ls + q12)]) / (s * (ls + s))
        assert np.abs(x - expect).max() < 1e-14

    def test_random_16x16_vs_substitution_solver(self):
        rng = np.random.default_rng(1234)
        a = rng.standard_normal((16, 16)) + 16 * np.eye(16)
        b = rng.standard_normal(16)
        x = solve_linear(a, b)
        assert np.abs(a @ x - b).max() <= 1e-10 * (1 + np.abs(b).max())
        assert np.abs(x - substitution_solve(a, b)).max() < 1e-10

    def test_singular(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularSystem):
            solve_linear(a, np.array([1.0, 1.0]))

    def test_shape_errors(self):
        with pytest.raises(BadShape):
            solve_linear(np.zeros((2, 3)), np.zeros(2))
        with pytest.raises(BadShape):
            solve_linear(np.eye(2), np.zeros(3))
