"""Tests for the brute-force, Monte Carlo, and binomial-order-statistics oracles."""

import math

import numpy as np
import pytest

from permpe.oracle import (
    binomial_top_gap_simulator,
    brute_force_permutation_average,
    binomial_top_gap_bound,
    monte_carlo_permutation_average,
)
from permpe.permdyn import SeedSpec
from permpe.qstate import TiltedParams, make_tilted_state


def purity_n2_fn(amps):
    m = amps.reshape(2, 2)
    rho = m @ m.conj().T
    return float(np.vdot(rho, rho).real)


class TestBruteForce:
    def test_single_qubit_averages_two_permutations(self):
        state = make_tilted_state(1, TiltedParams(0.6, 0.2))
        report = brute_force_permutation_average(state, lambda amps: float(np.abs(amps[0]) ** 2))
        assert report.n_evaluations == 2
        assert report.value == pytest.approx(0.5)  # weights swap places across the two perms
        assert report.se is None

    def test_enumeration_cap(self):
        state = make_tilted_state(4, TiltedParams(0.5))
        with pytest.raises(ValueError, match="capped"):
            brute_force_permutation_average(state, lambda a: 0.0)

    def test_reruns_are_bit_identical(self):
        state = make_tilted_state(2, TiltedParams(1.0, 0.4))
        r1 = brute_force_permutation_average(state, purity_n2_fn)
        r2 = brute_force_permutation_average(state, purity_n2_fn)
        assert r1.value == r2.value

    def test_matrix_functional(self):
        state = make_tilted_state(2, TiltedParams(0.8, 0.1))
        report = brute_force_permutation_average(state, lambda amps: np.outer(amps, amps.conj()))
        assert report.value.shape == (4, 4)
        assert np.trace(report.value).real == pytest.approx(1.0, abs=1e-14)
        # permutation averaging cannot change the diagonal multiset average
        assert np.allclose(np.diagonal(report.value).real, 0.25, atol=1e-14)


class TestMonteCarlo:
    def test_agrees_with_brute_force_within_errors(self):
        state = make_tilted_state(3, TiltedParams(math.pi / 4, math.pi / 4))

        def purity_fn(amps):
            m = amps.reshape(2, 4)
            rho = m @ m.conj().T
            return float(np.vdot(rho, rho).real)

        exact = brute_force_permutation_average(state, purity_fn).value
        mc = monte_carlo_permutation_average(state, purity_fn, 1000, SeedSpec(5).stream(0))
        assert abs(mc.value - exact) < 4 * mc.se

    def test_error_shrinks_like_sqrt_n(self):
        state = make_tilted_state(3, TiltedParams(math.pi / 4, math.pi / 4))

        def weight_fn(amps):
            return float(np.abs(amps[0]) ** 2)

        se_small = monte_carlo_permutation_average(state, weight_fn, 500, SeedSpec(6).stream(0)).se
        se_large = monte_carlo_permutation_average(state, weight_fn, 2000, SeedSpec(6).stream(1)).se
        assert se_large == pytest.approx(se_small / 2.0, rel=0.2)

    def test_fixed_seed_reproducible(self):
        state = make_tilted_state(2, TiltedParams(0.9))
        a = monte_carlo_permutation_average(state, purity_n2_fn, 50, SeedSpec(7).stream(0))
        b = monte_carlo_permutation_average(state, purity_n2_fn, 50, SeedSpec(7).stream(0))
        assert a.value == b.value and a.se == b.se


class TestBinomialTopGap:
    def test_empirical_below_bound(self):
        rng = np.random.default_rng(8)
        emp = binomial_top_gap_simulator(4, 100, 0.3, 100_000, rng)
        se = math.sqrt(emp * (1 - emp) / 100_000)
        assert emp <= binomial_top_gap_bound(4, 100, 0.3) + 3 * se

    def test_full_range_alpha_gives_certainty(self):
        rng = np.random.default_rng(9)
        emp = binomial_top_gap_simulator(3, 16, 1.0, 2000, rng)
        assert emp == 1.0

    def test_m2_n2_exact_enumeration(self):
        # two Binomial(2, 1/2) draws take values {0, 1, 2} with weights
        # (1/4, 1/2, 1/4); enumerate all nine pairs for the exact gap law
        weights = {0: 0.25, 1: 0.5, 2: 0.25}
        threshold = 2**0.5
        exact = sum(
            weights[a] * weights[b]
            for a in weights
            for b in weights
            if abs(a - b) <= threshold
        )
        assert exact == pytest.approx(7 / 8)
        rng = np.random.default_rng(10)
        n_trials = 200_000
        emp = binomial_top_gap_simulator(2, 2, 0.5, n_trials, rng)
        se = math.sqrt(exact * (1 - exact) / n_trials)
        assert abs(emp - exact) < 4 * se

    def test_needs_two_variables(self):
        with pytest.raises(ValueError):
            binomial_top_gap_simulator(1, 10, 0.5, 100, np.random.default_rng(0))
