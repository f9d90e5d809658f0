"""Brute-force and Monte Carlo ground-truth generators for the validation suite.

These oracles deliberately avoid the analytic machinery they are used to
check: the exhaustive path enumerates every permutation of the basis labels
in lexicographic order, the Monte Carlo path samples permutations from a
seeded stream, and the binomial simulator draws order statistics directly.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .qstate import StateVector

BRUTE_FORCE_MAX_QUBITS = 3  # 8! = 40320 permutations; 16! is out of reach


@dataclass(frozen=True)
class OracleReport:
    """Result of an oracle run: exact value (se None) or Monte Carlo mean with errors."""

    value: float | np.ndarray
    se: float | np.ndarray | None
    n_evaluations: int
    elapsed: float


def brute_force_permutation_average(state: StateVector, functional) -> OracleReport:
    """Exact uniform average of ``functional`` over every relabeling of ``state``.

    ``functional`` receives the permuted amplitude vector (ndarray) and may
    return a float or an ndarray.  Permutations are enumerated in
    lexicographic order; scalars are totaled with exact summation and arrays
    with pairwise summation, so reruns are bit-identical.
    """
    if state.num_qubits > BRUTE_FORCE_MAX_QUBITS:
        raise ValueError(f"exhaustive enumeration is capped at N = {BRUTE_FORCE_MAX_QUBITS}")
    start = time.perf_counter()
    d = state.dim
    amps = state.amplitudes
    permuted = np.empty(d, dtype=np.complex128)
    values = []
    for images in itertools.permutations(range(d)):
        permuted[list(images)] = amps
        values.append(functional(permuted))
    count = len(values)
    if np.isscalar(values[0]) or getattr(values[0], "ndim", 0) == 0:
        mean = math.fsum(float(v) for v in values) / count
    else:
        mean = np.stack(values).mean(axis=0)
    return OracleReport(value=mean, se=None, n_evaluations=count, elapsed=time.perf_counter() - start)


def monte_carlo_permutation_average(
    state: StateVector, functional, n: int, rng: np.random.Generator
) -> OracleReport:
    """Mean and standard error of ``functional`` over n sampled relabelings."""
    if n < 2:
        raise ValueError("need at least two samples for a standard error")
    start = time.perf_counter()
    d = state.dim
    amps = state.amplitudes
    permuted = np.empty(d, dtype=np.complex128)
    values = []
    for _ in range(n):
        permuted[rng.permutation(d)] = amps
        values.append(functional(permuted))
    if np.isscalar(values[0]) or getattr(values[0], "ndim", 0) == 0:
        arr = np.asarray(values, dtype=np.float64)
        mean: float | np.ndarray = float(arr.mean())
        se: float | np.ndarray = float(arr.std(ddof=1) / math.sqrt(n))
    else:
        stacked = np.stack(values)
        mean = stacked.mean(axis=0)
        se = stacked.std(axis=0, ddof=1) / math.sqrt(n)
    return OracleReport(value=mean, se=se, n_evaluations=n, elapsed=time.perf_counter() - start)


def binomial_top_gap_simulator(
    m: int, num_draws: int, alpha: float, n_trials: int, rng: np.random.Generator
) -> float:
    """Empirical P(gap between the two largest of m Binomial(N, 1/2) draws <= N^alpha)."""
    if m < 2:
        raise ValueError("need at least two binomial variables")
    samples = rng.binomial(num_draws, 0.5, size=(n_trials, m))
    part = np.partition(samples, m - 2, axis=1)
    gap = part[:, -1] - part[:, -2]
    return float(np.mean(gap <= num_draws**alpha))


def binomial_top_gap_bound(m: int, num_draws: int, alpha: float) -> float:
    """Analytic bound m (m - 1) / 2 * (2 [N^alpha] + 3) / sqrt(pi N) on the top-gap probability."""
    return (
        m * (m - 1) / 2.0 * (2.0 * math.floor(num_draws**alpha) + 3.0) / math.sqrt(math.pi * num_draws)
    )
