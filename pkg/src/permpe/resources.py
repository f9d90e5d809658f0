"""Coherence and participation functionals of pure states and their ensemble statistics.

All entropic quantities are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .projens import ProjectedEnsemble

DOMINANCE_ZERO = 1e-28
DEFAULT_HIST_BINS = 50


@dataclass(frozen=True)
class EnsembleStatistic:
    mean: float
    standard_error: float
    n_samples: int
    histogram: tuple[np.ndarray, np.ndarray] | None = None  # (bin edges, weights)


def _populations(state: np.ndarray) -> np.ndarray:
    return np.abs(np.asarray(state, dtype=np.complex128)) ** 2


def relative_entropy_of_coherence(state: np.ndarray) -> float:
    """Shannon entropy (nats) of the computational-basis populations of a pure state."""
    p = _populations(state)
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"state norm deviates from 1 by {abs(math.sqrt(total) - 1.0):.3e}")
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum())


def haar_average_coherence(d_a: int) -> float:
    """Mean coherence of unitarily random pure states: sum_{k=2..d} 1/k."""
    if d_a < 1:
        raise ValueError("dimension must be positive")
    return float(sum(1.0 / k for k in range(2, d_a + 1)))


def ipr(state: np.ndarray) -> float:
    """Inverse participation ratio sum_z |c_z|^4."""
    p = _populations(state)
    return float((p * p).sum())


def dominance_ratio(state: np.ndarray) -> float:
    """Ratio of the two largest Born weights; inf when the second is numerically zero."""
    p = _populations(state)
    if p.size < 2:
        raise ValueError("dominance ratio needs dimension >= 2")
    top2 = np.partition(p, p.size - 2)[-2:]
    second, first = float(top2.min()), float(top2.max())
    if second < DOMINANCE_ZERO:
        return math.inf
    return first / second


def _batch_coherence(states: np.ndarray) -> np.ndarray:
    p = np.abs(states) ** 2
    logp = np.where(p > 0.0, np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return -(p * logp).sum(axis=1)


def _batch_ipr(states: np.ndarray) -> np.ndarray:
    p = np.abs(states) ** 2
    return (p * p).sum(axis=1)


def ensemble_average(
    pe: ProjectedEnsemble, functional: str, bins: int | None = None
) -> EnsembleStatistic:
    """Probability-weighted mean, standard error, and optional histogram of a functional.

    ``functional`` is "coherence" or "ipr".  The histogram covers
    [0, ln d_a] for coherence and [0, 1] for the IPR, with probability
    weights summing to 1.
    """
    if functional == "coherence":
        values = _batch_coherence(pe.states)
        hist_range = (0.0, math.log(pe.d_a)) if pe.d_a > 1 else (0.0, 1.0)
    elif functional == "ipr":
        values = _batch_ipr(pe.states)
        hist_range = (0.0, 1.0)
    else:
        raise ValueError(f"unknown functional: {functional!r}")
    mean = float(pe.probs @ values)
    var = float(pe.probs @ (values - mean) ** 2)
    se = math.sqrt(max(var, 0.0) / len(pe))
    histogram = None
    if bins is not None:
        # values can exceed the exact range bound by float dust (e.g. the
        # entropy of an exactly uniform state); clip so no weight is lost
        clipped = np.clip(values, *hist_range)
        weights, edges = np.histogram(clipped, bins=bins, range=hist_range, weights=pe.probs)
        histogram = (edges, weights)
    return EnsembleStatistic(mean=mean, standard_error=se, n_samples=len(pe), histogram=histogram)


def dominant_weight_fraction(pe: ProjectedEnsemble, threshold: float = 0.99) -> float:
    """Probability-weighted fraction of entries whose largest Born weight exceeds threshold."""
    top = (np.abs(pe.states) ** 2).max(axis=1)
    return float(pe.probs @ (top > threshold))
