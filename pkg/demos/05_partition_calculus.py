"""Set-partition calculus behind the exact permutation averages.

Averages of tensor powers of a random permutation matrix project onto the
span of partition-labeled vectors.  The projector's weight table is the
inverse of the partition Gram matrix, or equivalently the Moebius transform
of the orthogonal distinct-pattern basis; both routes are computed exactly
in rational arithmetic and compared here.  The same table turns subsystem
purity and outcome-class average states into closed-form scalars, checked
against an exhaustive average over all 40320 relabelings of a 3-qubit
state.
"""

import math

import numpy as np

from permpe.oracle import brute_force_permutation_average
from permpe.qstate import TiltedParams, make_tilted_state
from permpe.weingarten import (
    class_states,
    common_coarsening,
    enumerate_partitions,
    expected_purity_exact,
    finest_common_refinement,
    mean_state_coeffs,
    mobius,
    weingarten_asymptotic,
    weingarten_exact,
    weingarten_mobius_route,
)

print("partitions of a 4-element set (canonical order):")
parts = enumerate_partitions(4)
for i, p in enumerate(parts, start=1):
    print(f"  {i:>2}: {p.blocks}")

a, b = parts[5], parts[7]  # {{1,2},{3,4}} and {{1,3},{2,4}}
print(f"\ncoarsening of {a.blocks} and {b.blocks}: {common_coarsening(a, b).blocks}")
print(f"refinement of the same pair: {finest_common_refinement(a, b).blocks}")
print(f"Moebius value from all singletons to the full block: {mobius(parts[-1], parts[0])}")

print("\nweight table at order 2, dimension 8 (exact rationals rounded once):")
print(weingarten_exact(2, 8).wg)

d = 256
gram_route = weingarten_exact(4, d).wg
pattern_route = weingarten_mobius_route(4, d)
print(f"\norder 4, d = {d}: the two exact routes differ by "
      f"{np.abs(gram_route - pattern_route).max():.2e}")
worst = max(
    abs(weingarten_asymptotic(p, q, d) - gram_route[i, j]) / abs(gram_route[i, j])
    for i, p in enumerate(parts)
    for j, q in enumerate(parts)
)
print(f"leading-order asymptotic worst relative error: {worst:.4f} (O(1/d) with d = {d})")

params = TiltedParams(math.pi / 4, math.pi / 4)
state = make_tilted_state(3, params)


def purity_fn(amps):
    m = amps.reshape(2, 4)
    rho = m @ m.conj().T
    return float(np.vdot(rho, rho).real)


brute = brute_force_permutation_average(state, purity_fn)
print(f"\n3-qubit subsystem purity, exhaustive over 8! relabelings: {brute.value:.12f}")
print(f"closed-form order-4 sum:                                  {expected_purity_exact(3, 1, params):.12f}")

a_coef, b_coef = mean_state_coeffs(3, params)
print(f"averaged state = {a_coef:.6f} * I + {b_coef:.6f} * (all-ones)")

print("\noutcome-class average states at N = 12 (label = aligned outcome count):")
print(f"{'nu+':>4} {'class prob':>12} {'flat/identity ratio':>20}")
for c in class_states(12, 2, params, theta_m=0.3 * math.pi):
    print(f"{c.nu_plus:>4} {c.class_p:>12.3e} {c.ratio_c:>20.3e}")
