"""Tests for coherence, participation, and ensemble statistics."""

import math

import numpy as np
import pytest

from permpe.projens import ProjectedEnsemble, sample_reference_ensemble
from permpe.resources import (
    dominance_ratio,
    dominant_weight_fraction,
    ensemble_average,
    haar_average_coherence,
    ipr,
    relative_entropy_of_coherence,
)


def single_state_pe(vec):
    v = np.asarray(vec, dtype=complex)
    return ProjectedEnsemble(
        d_a=v.size, n_b=0, outcomes=np.array([0]), probs=np.array([1.0]), states=v[None, :]
    )


class TestRelativeEntropyOfCoherence:
    def test_basis_state_is_zero(self):
        assert relative_entropy_of_coherence(np.array([1.0, 0.0])) == 0.0

    def test_plus_state_is_ln2(self):
        v = np.array([1.0, 1.0]) / math.sqrt(2)
        assert relative_entropy_of_coherence(v) == pytest.approx(math.log(2))

    def test_phase_and_relabeling_invariance(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        v /= np.linalg.norm(v)
        base = relative_entropy_of_coherence(v)
        phases = np.exp(1j * rng.uniform(0, 2 * math.pi, 8))
        assert relative_entropy_of_coherence(v * phases) == pytest.approx(base, abs=1e-12)
        assert relative_entropy_of_coherence(v[rng.permutation(8)]) == pytest.approx(base, abs=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="norm"):
            relative_entropy_of_coherence(np.array([1.0, 1.0]))

    def test_haar_mean_matches_harmonic_formula(self):
        pe = sample_reference_ensemble("complex-haar", 4, 10_000, np.random.default_rng(11))
        stat = ensemble_average(pe, "coherence")
        assert stat.mean == pytest.approx(13 / 12, abs=0.01)


class TestHaarAverageCoherence:
    def test_values(self):
        assert haar_average_coherence(1) == 0.0
        assert haar_average_coherence(2) == pytest.approx(0.5)
        assert haar_average_coherence(4) == pytest.approx(13 / 12)


class TestIpr:
    def test_basis_state(self):
        assert ipr(np.array([0.0, 1.0, 0.0])) == pytest.approx(1.0)

    def test_uniform_superposition(self):
        d = 8
        assert ipr(np.ones(d) / math.sqrt(d)) == pytest.approx(1 / d)

    def test_tilted_product_value(self):
        from permpe.qstate import TiltedParams, make_tilted_state

        params = TiltedParams(0.7, 0.2)
        state = make_tilted_state(5, params)
        assert ipr(state.amplitudes) == pytest.approx(params.g**5, abs=1e-12)

    def test_relabeling_invariance_and_lower_bound(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        v /= np.linalg.norm(v)
        assert ipr(v[rng.permutation(16)]) == pytest.approx(ipr(v), abs=1e-14)
        assert ipr(v) >= 1 / 16


class TestDominanceRatio:
    def test_basis_state_is_infinite(self):
        assert dominance_ratio(np.array([0.0, 1.0])) == math.inf

    def test_uniform_is_one(self):
        assert dominance_ratio(np.ones(4) / 2) == pytest.approx(1.0)

    def test_direct_ratio(self):
        v = np.array([math.sqrt(0.8), math.sqrt(0.2)])
        assert dominance_ratio(v) == pytest.approx(4.0)

    def test_dimension_one_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            dominance_ratio(np.array([1.0]))


class TestEnsembleAverage:
    def test_classical_ensemble_coherence_is_zero(self):
        pe = sample_reference_ensemble("classical", 4, 500, np.random.default_rng(2))
        stat = ensemble_average(pe, "coherence")
        assert stat.mean == pytest.approx(0.0, abs=1e-14)

    def test_single_state_has_zero_error(self):
        v = np.array([1.0, 1.0, 0.0, 0.0]) / math.sqrt(2)
        stat = ensemble_average(single_state_pe(v), "coherence")
        assert stat.mean == pytest.approx(math.log(2))
        assert stat.standard_error == 0.0
        assert stat.n_samples == 1

    def test_bounds_hold_for_random_ensembles(self):
        pe = sample_reference_ensemble("complex-haar", 4, 300, np.random.default_rng(3))
        coh = ensemble_average(pe, "coherence")
        part = ensemble_average(pe, "ipr")
        assert 0.0 <= coh.mean <= math.log(4)
        assert 0.25 <= part.mean <= 1.0

    def test_histogram_weights_sum_to_one(self):
        pe = sample_reference_ensemble("complex-haar", 4, 1000, np.random.default_rng(4))
        stat = ensemble_average(pe, "coherence", bins=50)
        edges, weights = stat.histogram
        assert edges.size == 51
        assert edges[0] == 0.0 and edges[-1] == pytest.approx(math.log(4))
        assert weights.sum() == pytest.approx(1.0, abs=1e-8)

    def test_unknown_functional(self):
        pe = sample_reference_ensemble("classical", 2, 10, np.random.default_rng(5))
        with pytest.raises(ValueError, match="functional"):
            ensemble_average(pe, "magic")


class TestDominantWeightFraction:
    def test_classical_ensemble_is_all_dominant(self):
        pe = sample_reference_ensemble("classical", 4, 100, np.random.default_rng(6))
        assert dominant_weight_fraction(pe) == pytest.approx(1.0)

    def test_haar_ensemble_is_rarely_dominant(self):
        pe = sample_reference_ensemble("complex-haar", 4, 1000, np.random.default_rng(7))
        assert dominant_weight_fraction(pe) < 0.01
