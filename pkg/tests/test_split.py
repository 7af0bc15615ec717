import numpy as np
import pytest

from gossip_accuracy import (
    NetworkParams,
    average_accuracy,
    backward_construct,
    fresh_accurate_fraction,
    freshness_recursion,
    g_limits,
    g_recursion,
    mode_tagged_accuracy,
    stationary_distribution,
)
from gossip_accuracy.errors import InvalidParameter, ModeMismatch
from gossip_accuracy.split import binary_matrix_form

from conftest import Q12, Q21


class TestGRecursion:
    def test_no_gossip_full_set(self, binary_gen):
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=0.0)
        occ = g_recursion(binary_gen, p)
        assert occ.per_k(10)[0] == pytest.approx(0.6, abs=1e-12)
        assert occ.per_k(10)[1] == pytest.approx(1.0 / 7.0, abs=1e-12)

    def test_no_gossip_is_k_dependent_closed_form(self, binary_gen):
        # with lambda = 0 the recursion reduces to alpha_k pi_m / (nu_m + alpha_k)
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=0.0)
        occ = g_recursion(binary_gen, p)
        pi = np.array([0.75, 0.25])
        nu = np.array([0.25, 0.75])
        for k in range(1, 11):
            alpha = k / 10
            assert np.abs(occ.per_k(k) - alpha * pi / (nu + alpha)).max() < 1e-14

    def test_no_push_vanishes(self, binary_gen):
        p = NetworkParams(n=10, lambda_s=0.0, lambda_=1.0)
        occ = g_recursion(binary_gen, p)
        assert np.all(occ.values == 0.0)

    def test_fast_gossip_flattens(self, binary_gen):
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=1e6)
        occ = g_recursion(binary_gen, p)
        gn = occ.per_k(10)
        assert np.abs(occ.values - gn[None, :]).max() <= 1e-3

    def test_mode_ceiling(self, four_state_gen, params10):
        pi = stationary_distribution(four_state_gen).probs
        occ = g_recursion(four_state_gen, params10)
        assert np.all(occ.values <= pi[None, :] + 1e-12)
        assert np.all(occ.values >= 0)

    def test_telescoping_bound(self, four_state_gen, params10):
        nu = four_state_gen.exit_rates
        occ = g_recursion(four_state_gen, params10)
        n = params10.n
        for k in range(1, n):
            alpha = k * params10.lambda_s / n
            beta = k * (n - k) * params10.lambda_ / (n - 1)
            bound = (alpha + nu) / (nu + alpha + beta)
            assert np.all(np.abs(occ.per_k(k) - occ.per_k(k + 1)) <= bound + 1e-12)

    def test_binary_matrix_form_agrees(self, binary_gen, params10):
        occ = g_recursion(binary_gen, params10)
        pi = np.array([0.75, 0.25])
        for k in range(1, 10):
            a, b = binary_matrix_form(Q12, Q21, params10, k)
            stepped = a @ pi + b @ occ.per_k(k + 1)
            assert np.abs(stepped - occ.per_k(k)).max() < 1e-14


class TestFreshAccurateFraction:
    def _c_modes(self, gen, params):
        if gen.size == 2:
            prof = freshness_recursion(Q12, Q21, params)
            rep = average_accuracy(Q12, Q21, params, prof.pair(2))
            return np.array([rep.c1, rep.c2])
        return mode_tagged_accuracy(backward_construct(gen, params).by_k[1])

    def test_fast_push_approaches_sum_pi_squared(self, binary_gen):
        p = NetworkParams(n=10, lambda_s=1e7, lambda_=1.0)
        occ = g_recursion(binary_gen, p)
        split = fresh_accurate_fraction(occ, self._c_modes(binary_gen, p))
        assert abs(split.g_value(10) - 0.625) < 1e-3

    def test_no_push_vanishes(self, binary_gen):
        p = NetworkParams(n=10, lambda_s=1e-9, lambda_=1.0)
        occ = g_recursion(binary_gen, p)
        split = fresh_accurate_fraction(occ, self._c_modes(binary_gen, p))
        assert split.g_value(10) < 1e-8

    def test_four_state_fast_gossip_operating_point(self, four_state_gen):
        # frozen from the backward construction + recursion at this point
        p = NetworkParams(n=10, lambda_s=1.0, lambda_=100.0)
        occ = g_recursion(four_state_gen, p)
        split = fresh_accurate_fraction(occ, self._c_modes(four_state_gen, p))
        assert split.g_value(10) == pytest.approx(0.0794927170791169, abs=1e-12)
        assert split.c == pytest.approx(0.5732877210620352, abs=1e-12)

    def test_report_invariants(self, four_state_gen, params10):
        occ = g_recursion(four_state_gen, params10)
        split = fresh_accurate_fraction(occ, self._c_modes(four_state_gen, params10))
        g_totals = occ.values.sum(axis=1)
        for k in range(1, 11):
            gk = split.fresh_accurate[k - 1]
            assert 0 <= gk <= split.c <= 1
            assert gk <= g_totals[k - 1] + 1e-12
            assert split.stale_accurate[k - 1] >= 0

    def test_mode_mismatch(self, binary_gen, params10):
        occ = g_recursion(binary_gen, params10)
        with pytest.raises(ModeMismatch):
            fresh_accurate_fraction(occ, np.array([0.1, 0.2, 0.3]))


class TestGLimits:
    def test_ls_inf(self, binary_gen, params10):
        occ = g_limits(binary_gen, params10, "ls_inf")
        assert np.allclose(occ.values, [0.75, 0.25])

    def test_ls_zero(self, binary_gen, params10):
        occ = g_limits(binary_gen, params10, "ls_zero")
        assert np.all(occ.values == 0.0)

    def test_l_zero_full_set(self, binary_gen, params10):
        occ = g_limits(binary_gen, params10, "l_zero")
        assert occ.per_k(10) == pytest.approx([0.6, 1.0 / 7.0], abs=1e-14)

    def test_l_zero_matches_recursion_exactly(self, four_state_gen):
        p = NetworkParams(n=10, lambda_s=0.7, lambda_=0.0)
        assert np.array_equal(
            g_limits(four_state_gen, p, "l_zero").values,
            g_recursion(four_state_gen, p).values,
        )

    def test_l_inf_constant_at_boundary(self, binary_gen, params10):
        occ = g_limits(binary_gen, params10, "l_inf")
        assert np.allclose(occ.values, occ.per_k(10)[None, :])
        assert occ.per_k(10) == pytest.approx([0.6, 1.0 / 7.0], abs=1e-14)

    def test_unknown_regime(self, binary_gen, params10):
        with pytest.raises(InvalidParameter):
            g_limits(binary_gen, params10, "bogus")
