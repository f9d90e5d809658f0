"""Measurement bases, projected ensembles, moment operators, and trace distances.

The projected ensemble of a state ``|Psi>`` under a product measurement of
subsystem B collects, for every outcome bit-string ``nu``, the Born
probability ``p(nu)`` and the normalized post-measurement state on A.  All
``2**n_b`` outcomes are enumerated exactly via matricization; outcomes whose
probability falls below a floor (numerically zero columns) are dropped and
the retained probabilities renormalized.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .qstate import Bipartition, StateVector

DEFAULT_P_FLOOR = 1e-14
DEFAULT_MOMENT_DIM_CAP = 4096
_MOMENT_CHUNK = 65536


@dataclass(frozen=True)
class MeasurementBasis:
    """Per-qubit measurement directions for subsystem B.

    Each qubit is measured along the Bloch direction with polar angle
    ``thetas[l]`` and azimuth ``phis[l]``; outcome bit 0 corresponds to the
    eigenstate aligned with that direction.  ``uniform`` gives every qubit
    the same angles; ``mixed`` tags the leading qubits Z (theta = 0) and the
    trailing ones X (theta = pi/2, phi = 0).
    """

    thetas: np.ndarray
    phis: np.ndarray

    def __post_init__(self):
        thetas = np.ascontiguousarray(self.thetas, dtype=np.float64)
        phis = np.ascontiguousarray(self.phis, dtype=np.float64)
        if thetas.ndim != 1 or thetas.shape != phis.shape:
            raise ValueError("thetas and phis must be 1-d arrays of equal length")
        if thetas.size < 1:
            raise ValueError("measurement basis must cover at least one qubit")
        thetas.setflags(write=False)
        phis.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)

    @property
    def n_b(self) -> int:
        return self.thetas.size

    @classmethod
    def uniform(cls, n_b: int, theta_m: float, phi_m: float = 0.0) -> "MeasurementBasis":
        return cls(np.full(n_b, theta_m), np.full(n_b, phi_m))

    @classmethod
    def mixed(cls, n_b: int, alpha_m: float | None = None, x_count: int | None = None) -> "MeasurementBasis":
        """Z tags on the first qubits, X tags on the trailing ``alpha_m * n_b``."""
        if (alpha_m is None) == (x_count is None):
            raise ValueError("pass exactly one of alpha_m or x_count")
        if x_count is None:
            raw = alpha_m * n_b
            if abs(raw - round(raw)) > 1e-9:
                raise ValueError(f"alpha_m * n_b = {raw} is not an integer X-tag count")
            x_count = round(raw)
        if not 0 <= x_count <= n_b:
            raise ValueError(f"x_count {x_count} outside 0..{n_b}")
        thetas = np.concatenate([np.zeros(n_b - x_count), np.full(x_count, 0.5 * math.pi)])
        return cls(thetas, np.zeros(n_b))

    def basis_state_ipr(self) -> float:
        """IPR of any measurement product state |Phi_nu>; outcome independent."""
        half = 0.5 * self.thetas
        return float(np.prod(np.sin(half) ** 4 + np.cos(half) ** 4))


@dataclass(frozen=True)
class ProjectedEnsemble:
    """Weighted collection of normalized subsystem-A states.

    ``outcomes[i]`` is the outcome bit-string of entry ``i`` encoded as an
    integer over ``n_b`` bits (for reference ensembles ``n_b`` is 0 and the
    outcome is just the sample index), ``probs[i]`` its weight and
    ``states[i]`` the unit vector on A.
    """

    d_a: int
    n_b: int
    outcomes: np.ndarray
    probs: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        outcomes = np.ascontiguousarray(self.outcomes, dtype=np.int64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        states = np.ascontiguousarray(self.states, dtype=np.complex128)
        n = probs.size
        if outcomes.shape != (n,) or states.shape != (n, self.d_a):
            raise ValueError("inconsistent entry shapes in projected ensemble")
        if n == 0:
            raise ValueError("projected ensemble has no entries")
        if np.any(probs < 0):
            raise ValueError("negative probability in projected ensemble")
        if abs(probs.sum() - 1.0) > 1e-8:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")
        norms = np.linalg.norm(states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("projected states are not all unit norm")
        for arr in (outcomes, probs, states):
            arr.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.probs.size

    def entries(self):
        """Iterate (outcome, probability, state) triples."""
        for i in range(len(self)):
            yield int(self.outcomes[i]), float(self.probs[i]), self.states[i]


@dataclass(frozen=True)
class MomentOperator:
    """k-th moment of a state ensemble on the k-fold tensor power of A."""

    d_a: int
    k: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        dim = self.d_a**self.k
        if mat.shape != (dim, dim):
            raise ValueError(f"moment matrix has shape {mat.shape}, expected ({dim}, {dim})")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError("moment operator is not Hermitian within tolerance")
        if abs(np.trace(mat).real - 1.0) > 1e-8:
            raise ValueError("moment operator trace deviates from 1")
        # Full eigenvalue checks get expensive; bound positivity only at small dims.
        if dim <= 512 and np.linalg.eigvalsh(mat)[0] < -1e-9:
            raise ValueError("moment operator has a negative eigenvalue beyond tolerance")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.d_a**self.k


def _rotation_to_frame(theta: float, phi: float) -> np.ndarray:
    """Inverse of the single-qubit rotation taking |0> to the +n eigenstate."""
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    phase = complex(math.cos(phi), math.sin(phi))
    # R = [[c, -s/phase], [s*phase, c]] maps |0> to cos|0> + e^{i phi} sin|1>.
    return np.array([[c, s / phase], [-s * phase, c]], dtype=np.complex128)


def _apply_single_qubit(amps: np.ndarray, num_qubits: int, qubit: int, gate: np.ndarray) -> np.ndarray:
    """Apply a 2x2 gate to 1-based qubit index ``qubit`` (qubit 1 = MSB)."""
    view = amps.reshape(1 << (qubit - 1), 2, 1 << (num_qubits - qubit))
    return np.einsum("ij,ajb->aib", gate, view).reshape(-1)


def build_projected_ensemble(
    state: StateVector,
    part: Bipartition,
    basis: MeasurementBasis,
    p_floor: float = DEFAULT_P_FLOOR,
) -> ProjectedEnsemble:
    """Enumerate all outcomes of measuring B in the given product basis.

    Every B qubit is rotated into its measurement frame, the amplitudes are
    matricized as d_a x d_b, and column ``nu`` yields the unnormalized
    projected state with ``p(nu)`` its squared norm.
    """
    part.check_state(state)
    if basis.n_b != part.n_b:
        raise ValueError(f"basis covers {basis.n_b} qubits but B has {part.n_b}")
    amps = np.array(state.amplitudes)
    for l in range(part.n_b):
        theta = basis.thetas[l]
        phi = basis.phis[l]
        if theta == 0.0:
            continue  # measurement frame is already the z basis
        gate = _rotation_to_frame(theta, phi)
        amps = _apply_single_qubit(amps, state.num_qubits, part.n_a + l + 1, gate)
    mat = amps.reshape(part.d_a, part.d_b)
    p = np.einsum("an,an->n", mat, mat.conj()).real
    keep = p >= p_floor
    if not np.any(keep):
        raise ValueError("all measurement outcomes fell below the probability floor")
    kept_p = p[keep]
    states = (mat[:, keep] / np.sqrt(kept_p)).T
    return ProjectedEnsemble(
        d_a=part.d_a,
        n_b=part.n_b,
        outcomes=np.nonzero(keep)[0],
        probs=kept_p / kept_p.sum(),
        states=states,
    )


def _tensor_power_rows(states: np.ndarray, k: int) -> np.ndarray:
    """Row-wise k-fold tensor power: (n, d) -> (n, d**k)."""
    out = states
    for _ in range(k - 1):
        out = np.einsum("ni,nj->nij", out, states).reshape(states.shape[0], -1)
    return out


def pe_moment(pe: ProjectedEnsemble, k: int, dim_cap: int = DEFAULT_MOMENT_DIM_CAP) -> MomentOperator:
    """Probability-weighted k-th moment sum, accumulated in fixed outcome order."""
    if k < 1:
        raise ValueError("moment order k must be at least 1")
    dim = pe.d_a**k
    if dim > dim_cap:
        raise ValueError(f"moment dimension {dim} exceeds cap {dim_cap}")
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for lo in range(0, len(pe), _MOMENT_CHUNK):
        chunk = slice(lo, lo + _MOMENT_CHUNK)
        rows = _tensor_power_rows(pe.states[chunk], k)
        acc += (rows.T * pe.probs[chunk]) @ rows.conj()
    return MomentOperator(pe.d_a, k, acc)


def haar_moment(d_a: int, k: int, max_k: int = 4) -> MomentOperator:
    """Unitarily invariant k-th moment: all k! factor permutations over a rising factorial."""
    if k < 1:
        raise ValueError("moment order k must be at least 1")
    if k > max_k:
        raise ValueError(f"k = {k} exceeds the factorial-sum bound {max_k}")
    dim = d_a**k
    digits = np.stack(np.unravel_index(np.arange(dim), (d_a,) * k))  # (k, dim)
    acc = np.zeros((dim, dim), dtype=np.complex128)
    src = np.arange(dim)
    for tau in itertools.permutations(range(k)):
        target = np.ravel_multi_index(tuple(digits[list(tau)]), (d_a,) * k)
        acc[target, src] += 1.0
    rising = math.prod(range(d_a, d_a + k))
    return MomentOperator(d_a, k, acc / rising)


def classical_moment(d_a: int, k: int) -> MomentOperator:
    """Uniform bit-string ensemble moment: d_a diagonal entries of weight 1/d_a."""
    if k < 1:
        raise ValueError("moment order k must be at least 1")
    dim = d_a**k
    mat = np.zeros((dim, dim), dtype=np.complex128)
    stride = (dim - 1) // (d_a - 1) if d_a > 1 else 0
    for z in range(d_a):
        mat[z * stride, z * stride] = 1.0 / d_a
    return MomentOperator(d_a, k, mat)


def orthogonal_haar_moment(d_a: int, k: int) -> MomentOperator:
    """Moments of uniformly random real unit vectors; closed form for k <= 2."""
    if k == 1:
        return MomentOperator(d_a, 1, np.eye(d_a, dtype=np.complex128) / d_a)
    if k == 2:
        dim = d_a * d_a
        swap = np.zeros((dim, dim))
        pair_trans = np.zeros((dim, dim))
        for i in range(d_a):
            for j in range(d_a):
                swap[j * d_a + i, i * d_a + j] = 1.0
                pair_trans[i * d_a + i, j * d_a + j] = 1.0
        mat = (np.eye(dim) + swap + pair_trans) / (d_a * (d_a + 2))
        return MomentOperator(d_a, 2, mat.astype(np.complex128))
    raise ValueError("closed form implemented only for k in {1, 2}; sample instead")


def sample_reference_ensemble(
    kind: str, d_a: int, n: int, rng: np.random.Generator
) -> ProjectedEnsemble:
    """Equal-weight Monte Carlo ensemble used as an oracle for reference moments."""
    if n < 1:
        raise ValueError("need at least one sample")
    if kind == "complex-haar":
        states = rng.standard_normal((n, d_a)) + 1j * rng.standard_normal((n, d_a))
    elif kind == "real-haar":
        states = rng.standard_normal((n, d_a)).astype(np.complex128)
    elif kind == "classical":
        states = np.zeros((n, d_a), dtype=np.complex128)
        states[np.arange(n), rng.integers(0, d_a, size=n)] = 1.0
    else:
        raise ValueError(f"unknown reference ensemble kind: {kind!r}")
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    return ProjectedEnsemble(
        d_a=d_a,
        n_b=0,
        outcomes=np.arange(n),
        probs=np.full(n, 1.0 / n),
        states=states,
    )


def trace_distance(a: MomentOperator, b: MomentOperator) -> float:
    """Half the absolute eigenvalue sum of the Hermitian difference; lies in [0, 1]."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.abs(eigs).sum())
