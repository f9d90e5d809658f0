"""Random permutation states and local thermalization.

A random permutation state is a product state whose computational basis
labels have been shuffled by a uniformly random permutation.  Even though
the dynamics never creates superpositions, the reduced state of a small
subsystem looks maximally mixed for almost every permutation, as long as
the input state carries some superposition to begin with.

This script builds tilted-basis and mixed-basis inputs, samples a few
relabelings, and compares the observed trace-norm deviation of the
subsystem state from maximally mixed against the analytic probability
bound and the exact averaged purity.
"""

import math

import numpy as np

from permpe.permdyn import SeedSpec, apply_global_permutation, sample_permutation
from permpe.qstate import (
    Bipartition,
    MixedParams,
    TiltedParams,
    distance_to_maximally_mixed,
    make_mixed_state,
    make_tilted_state,
    purity,
    reduced_density_matrix,
)
from permpe.weingarten import expected_purity_exact, thermalization_probability_bound

N, N_A, SAMPLES, EPS = 16, 2, 200, 0.2
params = TiltedParams(theta0=math.pi / 4, phi0=math.pi / 4)
part = Bipartition(N_A, N - N_A)
seeds = SeedSpec(2024)

print(f"tilted input, N = {N}, N_A = {N_A}")
print(f"  per-qubit participation factor g = {params.g:.4f}  (input IPR = g^N = {params.g**N:.3e})")

state = make_tilted_state(N, params)
distances = []
for s in range(SAMPLES):
    shuffled = apply_global_permutation(state, sample_permutation(state.dim, seeds.stream(s)))
    distances.append(distance_to_maximally_mixed(reduced_density_matrix(shuffled, part)))
distances = np.array(distances)

exceed = float(np.mean(distances > EPS))
bound = thermalization_probability_bound(N, N_A, params, EPS)
print(f"  trace-norm deviation from I/d_A over {SAMPLES} relabelings:")
print(f"    mean = {distances.mean():.4f}, max = {distances.max():.4f}")
print(f"    P(deviation > {EPS}) = {exceed:.3f}  vs analytic bound {bound:.3f}")

avg_purity = expected_purity_exact(N, N_A, params)
print(f"  exact permutation-averaged purity = {avg_purity:.6f} (maximally mixed would be {1/2**N_A})")

print()
print("mixed input (half the qubits in |Y+>), same check:")
mixed = MixedParams(alpha0=0.5, num_qubits=N)
state = make_mixed_state(mixed)
sample_purities = []
for s in range(SAMPLES):
    shuffled = apply_global_permutation(state, sample_permutation(state.dim, seeds.stream(10_000 + s)))
    sample_purities.append(purity(reduced_density_matrix(shuffled, part)))
print(f"  sampled subsystem purity: mean = {np.mean(sample_purities):.6f}")
print(f"  exact averaged purity:    {expected_purity_exact(N, N_A, mixed):.6f}")
