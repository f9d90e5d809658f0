"""Exact and asymptotic moment calculus for averages over random permutation matrices.

The average of ``U^{x 2m}`` over all permutation matrices of size ``d`` is the
orthogonal projector onto the span of the partition basis vectors
``|sigma> = sum over index tuples constant on the blocks of sigma``.  Writing
that projector as ``sum_ij wg[i, j] |sigma_i><sigma_j|`` defines the weight
table computed here.  Two independent constructions are provided:

* the inverse of the Gram matrix ``<sigma_i|sigma_j> = d**#join(sigma_i, sigma_j)``,
  evaluated in exact rational arithmetic (the primary route);
* the zeta/Moebius transform of the orthogonal distinct-index pattern basis,
  whose squared norms are the falling factorials ``d (d-1) ... (d - #sigma + 1)``.

Their agreement is a required cross-check that guards against lattice
convention bugs.  On top of the table sit scalar closed forms for the
permutation-averaged subsystem purity, the thermalization probability bound,
the outcome-class average states, and the annealed participation predictor.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qstate import MixedParams, TiltedParams

MAX_GROUND_SIZE = 8  # Bell numbers explode beyond this
MARGINAL_LOG_TOL = 1e-9


# ---------------------------------------------------------------------------
# Set partitions and lattice operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SetPartition:
    """Partition of {1, ..., ground_size} into canonical blocks.

    Blocks are sorted by their minimum element and elements are sorted
    within each block, so equal partitions compare equal.
    """

    ground_size: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            if len(block) == 0:
                raise ValueError("empty block in set partition")
            seen.update(block)
        if seen != set(range(1, self.ground_size + 1)) or sum(map(len, self.blocks)) != self.ground_size:
            raise ValueError("blocks do not partition the ground set")
        canonical = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0]))
        object.__setattr__(self, "blocks", canonical)

    @classmethod
    def of(cls, ground_size: int, *blocks) -> "SetPartition":
        return cls(ground_size, tuple(tuple(b) for b in blocks))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_index(self) -> dict[int, int]:
        """Map each element to the index of its block."""
        out = {}
        for i, block in enumerate(self.blocks):
            for x in block:
                out[x] = i
        return out

    def refines(self, other: "SetPartition") -> bool:
        """True when every block of self lies inside a single block of other."""
        if self.ground_size != other.ground_size:
            raise ValueError("ground-size mismatch")
        where = other.block_index()
        return all(len({where[x] for x in block}) == 1 for block in self.blocks)


def enumerate_partitions(n: int) -> list[SetPartition]:
    """All partitions of {1, ..., n} in canonical order.

    The order lists the full block first and all singletons last (restricted
    growth strings in lexicographic order).  For n = 4 the fifteen partitions
    are pinned to the fixed table used by the closed-form moment expressions,
    so formulas can refer to entries by index.
    """
    if not 1 <= n <= MAX_GROUND_SIZE:
        raise ValueError(f"partition enumeration supports 1 <= n <= {MAX_GROUND_SIZE}")
    results: list[SetPartition] = []

    def grow(i: int, blocks: list[list[int]]) -> None:
        if i > n:
            results.append(SetPartition(n, tuple(tuple(b) for b in blocks)))
            return
        for block in blocks:
            block.append(i)
            grow(i + 1, blocks)
            block.pop()
        blocks.append([i])
        grow(i + 1, blocks)
        blocks.pop()

    grow(2, [[1]])
    if n == 4:
        pinned = [
            ((1, 2, 3, 4),),
            ((1, 2, 3), (4,)),
            ((1, 2, 4), (3,)),
            ((1, 3, 4), (2,)),
            ((1,), (2, 3, 4)),
            ((1, 2), (3, 4)),
            ((1, 4), (2, 3)),
            ((1, 3), (2, 4)),
            ((1, 2), (3,), (4,)),
            ((1, 3), (2,), (4,)),
            ((1, 4), (2,), (3,)),
            ((1,), (2, 4), (3,)),
            ((1,), (2, 3), (4,)),
            ((1,), (2,), (3, 4)),
            ((1,), (2,), (3,), (4,)),
        ]
        results = [SetPartition(4, blocks) for blocks in pinned]
    return results


def common_coarsening(a: SetPartition, b: SetPartition) -> SetPartition:
    """Finest partition coarser than both: transitive closure of block unions."""
    if a.ground_size != b.ground_size:
        raise ValueError("ground-size mismatch")
    n = a.ground_size
    parent = list(range(n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (a, b):
        for block in part.blocks:
            root = find(block[0])
            for x in block[1:]:
                parent[find(x)] = root
    groups: dict[int, list[int]] = {}
    for x in range(1, n + 1):
        groups.setdefault(find(x), []).append(x)
    return SetPartition(n, tuple(tuple(g) for g in groups.values()))


def finest_common_refinement(a: SetPartition, b: SetPartition) -> SetPartition:
    """Coarsest partition refining both: nonempty pairwise block intersections."""
    if a.ground_size != b.ground_size:
        raise ValueError("ground-size mismatch")
    blocks = []
    for p in a.blocks:
        pset = set(p)
        for q in b.blocks:
            inter = pset.intersection(q)
            if inter:
                blocks.append(tuple(sorted(inter)))
    return SetPartition(a.ground_size, tuple(blocks))


def mobius(fine: SetPartition, coarse: SetPartition) -> int:
    """Moebius function of the partition lattice interval [fine, coarse].

    Equals the product over coarse blocks of (-1)^(n_B - 1) (n_B - 1)! with
    n_B the number of fine blocks merged into that block.
    """
    if not fine.refines(coarse):
        raise ValueError("first argument must refine the second")
    where = coarse.block_index()
    merged = [0] * coarse.block_count
    for block in fine.blocks:
        merged[where[block[0]]] += 1
    value = 1
    for n_b in merged:
        value *= (-1) ** (n_b - 1) * math.factorial(n_b - 1)
    return value


def partition_vector(sigma: SetPartition, d: int) -> np.ndarray:
    """Dense vector of the partition basis state on (C^d)^(x n): 1 on tuples constant per block."""
    n = sigma.ground_size
    vec = np.zeros(d**n)
    where = sigma.block_index()
    for idx in range(d**n):
        digits = []
        rem = idx
        for _ in range(n):
            digits.append(rem % d)
            rem //= d
        digits.reverse()
        ok = True
        for block in sigma.blocks:
            v0 = digits[block[0] - 1]
            if any(digits[x - 1] != v0 for x in block[1:]):
                ok = False
                break
        if ok:
            vec[idx] = 1.0
    return vec


# ---------------------------------------------------------------------------
# Exact and asymptotic weight tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeingartenTable:
    """Weight table of the permutation-average projector at one (order, dimension)."""

    order: int
    dimension: int
    partitions: tuple[SetPartition, ...]
    wg: np.ndarray
    gram: np.ndarray

    def index_of(self, sigma: SetPartition) -> int:
        return self.partitions.index(sigma)


def _invert_fraction_matrix(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = aug[col][col]
        aug[col] = [v / scale for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _gram_integer(partitions: list[SetPartition], d: int) -> list[list[int]]:
    n = len(partitions)
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            count = common_coarsening(partitions[i], partitions[j]).block_count
            gram[i][j] = gram[j][i] = d**count
    return gram


def weingarten_exact(order_2m: int, d: int) -> WeingartenTable:
    """Exact weight table, computed as the rational inverse of the Gram matrix.

    Requires ``d >= order_2m`` so the partition vectors are linearly
    independent and the Gram inverse exists (the pseudo-inverse then equals
    the true inverse).  Entries are exact rationals rounded once to float.
    """
    if d < order_2m:
        raise ValueError(f"need d >= {order_2m} for independent partition vectors, got d = {d}")
    partitions = enumerate_partitions(order_2m)
    gram_int = _gram_integer(partitions, d)
    inverse = _invert_fraction_matrix([[Fraction(v) for v in row] for row in gram_int])
    wg = np.array([[float(v) for v in row] for row in inverse])
    gram = np.array([[float(v) for v in row] for row in gram_int])
    return WeingartenTable(order=order_2m, dimension=d, partitions=tuple(partitions), wg=wg, gram=gram)


def weingarten_mobius_route(order_2m: int, d: int) -> np.ndarray:
    """Independent weight table from the orthogonal distinct-index pattern basis.

    The pattern vector of sigma has squared norm ``d (d-1) ... (d - #sigma + 1)``
    and expands into the partition basis through the lattice Moebius
    transform, giving
    ``wg[i, j] = sum over common refinements s of mu(s, i) mu(s, j) / (d)_{#s}``.
    """
    if d < order_2m:
        raise ValueError(f"need d >= {order_2m}, got d = {d}")
    partitions = enumerate_partitions(order_2m)
    n = len(partitions)
    falling = []
    for p in partitions:
        val = 1
        for t in range(p.block_count):
            val *= d - t
        falling.append(Fraction(val))
    mob = [[0] * n for _ in range(n)]
    for s in range(n):
        for t in range(n):
            if partitions[s].refines(partitions[t]):
                mob[s][t] = mobius(partitions[s], partitions[t])
    wg = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            total = Fraction(0)
            for s in range(n):
                if mob[s][i] != 0 and mob[s][j] != 0:
                    total += Fraction(mob[s][i] * mob[s][j]) / falling[s]
            wg[i, j] = wg[j, i] = float(total)
    return wg


def weingarten_asymptotic(a: SetPartition, b: SetPartition, d: int) -> float:
    """Leading large-d weight: mu(m, a) mu(m, b) d^(-#m) with m the common refinement.

    ``m`` is the coarsest partition refining both arguments (blockwise
    intersections), which is the partition whose falling-factorial norm
    dominates the exact Moebius-transform sum; relative corrections are
    O(1/d).
    """
    meet = finest_common_refinement(a, b)
    return mobius(meet, a) * mobius(meet, b) * float(d) ** (-meet.block_count)


def invariant_projector(table: WeingartenTable) -> np.ndarray:
    """Dense ``d**order`` projector sum_ij wg[i, j] |sigma_i><sigma_j| (small d only)."""
    dim = table.dimension**table.order
    vectors = [partition_vector(p, table.dimension) for p in table.partitions]
    out = np.zeros((dim, dim))
    for i, vi in enumerate(vectors):
        for j, vj in enumerate(vectors):
            w = table.wg[i, j]
            if w != 0.0:
                out += w * np.outer(vi, vj)
    return out


# ---------------------------------------------------------------------------
# Scalar closed forms for the two input-state families
# ---------------------------------------------------------------------------

# Slot convention for order-4 partitions: (ket 1, bra 1, ket 2, bra 2).
TAU_ID = SetPartition.of(4, (1, 2), (3, 4))      # vectorized identity on two copies
TAU_SWAP = SetPartition.of(4, (1, 4), (2, 3))    # vectorized two-copy swap
_KET_SLOTS = frozenset({1, 3})


def _tilted_block_factor(block: tuple[int, ...], params: TiltedParams) -> complex:
    """Single-qubit contraction of one partition block against the tilted state copies."""
    c = math.cos(0.5 * params.theta0)
    s = math.sin(0.5 * params.theta0)
    n_ket = sum(1 for slot in block if slot in _KET_SLOTS)
    phase = cmath.exp(1j * (2 * n_ket - len(block)) * params.phi0)
    return c ** len(block) + (s ** len(block)) * phase


def _mixed_block_factor(block: tuple[int, ...]) -> complex:
    """Single |Y+> qubit contraction of one partition block; |0> qubits contribute 1."""
    n_ket = sum(1 for slot in block if slot in _KET_SLOTS)
    return 2.0 ** (-0.5 * len(block)) * (1.0 + 1j ** ((2 * n_ket - len(block)) % 4))


def _state_overlap(sigma: SetPartition, num_qubits: int, params) -> complex:
    """<sigma|(Psi0 x Psi0*)^(x2)> as a product of per-qubit block factors.

    Products over N qubits are taken in log space to stay finite at large N.
    """
    if isinstance(params, TiltedParams):
        log_total = 0.0 + 0.0j
        for block in sigma.blocks:
            chi = _tilted_block_factor(block, params)
            if chi == 0.0:
                return 0.0
            log_total += num_qubits * cmath.log(chi)
        return cmath.exp(log_total)
    if isinstance(params, MixedParams):
        y_count = params.y_count
        log_total = 0.0 + 0.0j
        for block in sigma.blocks:
            chi = _mixed_block_factor(block)
            if chi == 0.0:
                return 0.0 if y_count > 0 else 1.0
            log_total += y_count * cmath.log(chi)
        return cmath.exp(log_total)
    raise TypeError(f"unsupported parameter type: {type(params).__name__}")


def expected_purity_exact(num_qubits: int, n_a: int, params) -> float:
    """Permutation-averaged subsystem purity E[Tr rho_A^2] from the exact order-4 table.

    Evaluates the full 15 x 15 sum
    ``sum_ij wg[i, j] <S_A x I_B|sigma_i> <sigma_j|(Psi0 x Psi0*)^(x2)>``
    where ``<S_A x I_B|sigma> = d_a**#join(sigma, tau_swap) * d_b**#join(sigma, tau_id)``.
    Pure scalar formula; no state vector is built, so N up to 60 is fine.
    """
    if not 1 <= n_a < num_qubits:
        raise ValueError("need 1 <= n_a < N")
    if num_qubits > 60:
        raise ValueError("scalar formula supported up to N = 60")
    if isinstance(params, TiltedParams):
        if min(abs(params.theta0), abs(params.theta0 - math.pi)) < 1e-12:
            warnings.warn(
                "theta0 in {0, pi}: input is a basis state and no thermalization occurs; "
                "formula still evaluates",
                stacklevel=2,
            )
    d = 1 << num_qubits
    d_a = 1 << n_a
    d_b = 1 << (num_qubits - n_a)
    table = weingarten_exact(4, d)
    parts = table.partitions
    swap_counts = [common_coarsening(p, TAU_SWAP).block_count for p in parts]
    id_counts = [common_coarsening(p, TAU_ID).block_count for p in parts]
    side_a = [float(d_a) ** sc * float(d_b) ** ic for sc, ic in zip(swap_counts, id_counts)]
    overlaps = [_state_overlap(p, num_qubits, params) for p in parts]
    total = 0.0 + 0.0j
    for i in range(len(parts)):
        for j in range(len(parts)):
            w = table.wg[i, j]
            if w != 0.0:
                total += w * side_a[i] * overlaps[j]
    return float(total.real)


def purity_large_n_expansion(num_qubits: int, n_a: int, params: TiltedParams) -> float:
    """Four-term large-N expansion of the averaged purity (drops o(1/d) corrections)."""
    d = 2.0**num_qubits
    d_a = 2.0**n_a
    g_n = params.g**num_qubits
    f_2n = params.f ** (2 * num_qubits)
    return (
        1.0 / d_a
        + g_n * (1.0 - 1.0 / d_a)
        + (1.0 - g_n) * (d_a - 2.0 + 1.0 / d_a) / d
        + (1.0 - 1.0 / d_a) * f_2n / d**2
    )


EXCLUDED_TILTED_TOL = 1e-12


def _check_tilted_not_excluded(params: TiltedParams) -> None:
    t, p = params.theta0, params.phi0
    if min(abs(t), abs(t - math.pi)) < EXCLUDED_TILTED_TOL:
        raise ValueError("theta0 in {0, pi}: basis-state input, bound is vacuous")
    if abs(t - 0.5 * math.pi) < EXCLUDED_TILTED_TOL and abs(p) < EXCLUDED_TILTED_TOL:
        raise ValueError("(theta0, phi0) = (pi/2, 0): permutation-invariant input, bound is vacuous")


def thermalization_probability_bound(num_qubits: int, n_a: int, params: TiltedParams, eps: float) -> float:
    """Probability bound on ||rho_A - I/d_A||_1 > eps for a random permutation input.

    Equals ``(d**-alpha0 (d_A - 1) + d**(-2 beta0) (d_A - 1) + d**-1 (d_A^2 - d_A + 1)) / eps^2``
    with the exponents taken from the input-state parameters.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_tilted_not_excluded(params)
    d_a = 2.0**n_a
    n = num_qubits
    term_alpha = 2.0 ** (-n * params.alpha0_exp) * (d_a - 1.0)
    term_beta = 2.0 ** (-2.0 * n * params.beta0_exp) * (d_a - 1.0)
    term_d = 2.0 ** (-n) * (d_a * d_a - d_a + 1.0)
    return (term_alpha + term_beta + term_d) / eps**2


@dataclass(frozen=True)
class ClassState:
    """Average post-measurement state of one outcome equivalence class.

    The class is labeled by ``nu_plus``, the number of aligned outcome bits;
    its average state is ``identity_coeff * I_A + flat_coeff * M_A`` with
    ``M_A`` the all-ones matrix.  ``ratio_c`` is the flat-to-identity
    coefficient ratio before normalization, whose decay signals convergence
    of the class state to the maximally mixed state.
    """

    nu_plus: int
    identity_coeff: float
    flat_coeff: float
    born_p: float
    class_p: float
    ratio_c: float


def _log_power(base: float, exponent: int) -> float:
    """base**exponent via logs with the 0**0 = 1 convention; safe for large exponents."""
    if exponent == 0:
        return 1.0
    if base == 0.0:
        return 0.0
    return math.exp(exponent * math.log(base))


def class_states(
    num_qubits: int,
    n_a: int,
    params: TiltedParams,
    theta_m: float,
    phi_m: float = 0.0,
) -> list[ClassState]:
    """Exact average class states for every aligned-count label nu_plus = 0 .. N_B."""
    if not 1 <= n_a < num_qubits:
        raise ValueError("need 1 <= n_a < N")
    f = params.f
    if abs(f - 2.0) < EXCLUDED_TILTED_TOL:
        raise ValueError("f = 2 ((theta0, phi0) = (pi/2, 0)): state invariant under permutations")
    n_b = num_qubits - n_a
    d = 2.0**num_qubits
    d_a = 2**n_a
    s_m = math.sin(theta_m) * math.cos(phi_m)
    g_plus = 1.0 + s_m
    g_minus = 1.0 - s_m
    f_n = _log_power(f, num_qubits)
    base = d * (d - 1.0)
    a_raw = (d - f_n) / base
    out = []
    for nu_plus in range(n_b + 1):
        big_g = _log_power(g_plus, nu_plus) * _log_power(g_minus, n_b - nu_plus)
        b_raw = (f_n - 1.0) * big_g / base
        born_p = d_a * (a_raw + b_raw)
        if born_p <= 0.0:
            raise ValueError(f"non-positive Born probability for class nu_plus = {nu_plus}")
        out.append(
            ClassState(
                nu_plus=nu_plus,
                identity_coeff=a_raw / born_p,
                flat_coeff=b_raw / born_p,
                born_p=born_p,
                class_p=math.comb(n_b, nu_plus) * born_p,
                ratio_c=b_raw / a_raw,
            )
        )
    return out


def mean_state_coeffs(num_qubits: int, params: TiltedParams) -> tuple[float, float]:
    """Coefficients (a, b) of the permutation-averaged state a * I + b * M.

    ``b = (f**N - 1) / (2**N (2**N - 1))`` and ``a = 2**-N - b``, so the trace
    ``2**N (a + b)`` is exactly 1.
    """
    d = 2.0**num_qubits
    f_n = _log_power(params.f, num_qubits)
    b = (f_n - 1.0) / (d * (d - 1.0))
    return 1.0 / d - b, b


def annealed_ipr_prediction(
    ipr0: float, ipr_basis: float, d_a: int, d_b: int
) -> tuple[float, str]:
    """Annealed participation predictor (d_b / d_a) IPR(input) IPR(basis) with phase label.

    Values below 1 mean the projected states delocalize (ergodic); above 1
    the predictor diverges with system size (non-ergodic).  A band of width
    1e-9 around log value = 0 is labeled marginal.
    """
    if not (0.0 < ipr0 <= 1.0 and 0.0 < ipr_basis <= 1.0):
        raise ValueError("IPR inputs must lie in (0, 1]")
    value = (d_b / d_a) * ipr0 * ipr_basis
    log_value = math.log(value)
    if abs(log_value) < MARGINAL_LOG_TOL:
        phase = "marginal"
    elif log_value < 0.0:
        phase = "ergodic"
    else:
        phase = "non-ergodic"
    return value, phase


def annealed_boundary_mixed(alpha0: float) -> float:
    """Measurement fraction where the annealed predictor rate changes sign: 1 - alpha0."""
    if not 0.0 <= alpha0 <= 1.0:
        raise ValueError("alpha0 must lie in [0, 1]")
    return 1.0 - alpha0


def _per_qubit_participation(theta: float) -> float:
    half = 0.5 * theta
    return math.sin(half) ** 4 + math.cos(half) ** 4


def annealed_boundary_angle_tilted(theta0: float, tol: float = 1e-12) -> float:
    """Measurement angle where the annealed predictor's per-qubit rate vanishes.

    For uniform product inputs and bases the large-N rate per bath qubit is
    ``ln 2 + ln g(theta0) + ln g(theta_m)`` with ``g`` the per-qubit
    participation factor; the root in [0, pi/2] is found by bisection.
    """
    g0 = _per_qubit_participation(theta0)

    def rate(theta_m: float) -> float:
        return math.log(2.0) + math.log(g0) + math.log(_per_qubit_participation(theta_m))

    lo, hi = 0.0, 0.5 * math.pi
    if rate(lo) <= 0.0:
        return lo
    if rate(hi) >= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rate(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
