"""Dense qubit state vectors, model product states, and reduced density matrices.

Conventions used throughout the package:

* qubit 1 is the most significant bit of the computational-basis index,
  so index ``z`` encodes the bit-string ``z_1 ... z_N``;
* subsystem A is always the leading ``n_a`` qubits, which makes the
  ``d_a x d_b`` matricization of an amplitude vector a plain reshape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

# Dense vectors above 26 qubits exceed ~1 GiB of complex128 storage.
MAX_QUBITS = 26
NORM_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10


def _check_num_qubits(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"number of qubits must be a positive integer, got {n!r}")
    if n > MAX_QUBITS:
        raise ValueError(f"refusing {n} qubits; dense vectors are capped at {MAX_QUBITS}")


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of ``num_qubits`` qubits as a dense complex vector."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"amplitude vector has length {amps.shape}, expected 2**{self.num_qubits}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state vector is not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def probabilities(self) -> np.ndarray:
        """Born weights |c_z|^2 over the computational basis."""
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Bipartition:
    """Split into subsystem A (leading ``n_a`` qubits) and bath B (trailing ``n_b``)."""

    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError("both parts of a bipartition need at least one qubit")

    @property
    def num_qubits(self) -> int:
        return self.n_a + self.n_b

    @property
    def d_a(self) -> int:
        return 1 << self.n_a

    @property
    def d_b(self) -> int:
        return 1 << self.n_b

    def check_state(self, state: StateVector) -> None:
        if self.num_qubits != state.num_qubits:
            raise ValueError(
                f"bipartition covers {self.num_qubits} qubits but state has {state.num_qubits}"
            )


@dataclass(frozen=True)
class TiltedParams:
    """Bloch angles of the uniform product input state.

    Derived quantities (recomputed on access, never stored):

    * ``g``: single-qubit participation factor sin^4(theta0/2) + cos^4(theta0/2);
      the full-state IPR is ``g**N``.
    * ``f``: 1 + sin(theta0) cos(phi0), controlling the flat component of the
      permutation-averaged state.
    * ``alpha0_exp = -log2 g`` and ``beta0_exp = 1 - log2 f``, the decay
      exponents entering the thermalization bound.
    """

    theta0: float
    phi0: float = 0.0

    @property
    def g(self) -> float:
        half = 0.5 * self.theta0
        return math.sin(half) ** 4 + math.cos(half) ** 4

    @property
    def f(self) -> float:
        return 1.0 + math.sin(self.theta0) * math.cos(self.phi0)

    @property
    def alpha0_exp(self) -> float:
        return -math.log2(self.g)

    @property
    def beta0_exp(self) -> float:
        if self.f == 0.0:
            return math.inf
        return 1.0 - math.log2(self.f)


@dataclass(frozen=True)
class MixedParams:
    """Input with ``(1 - alpha0) N`` qubits in |0> followed by ``alpha0 N`` in |Y+>."""

    alpha0: float
    num_qubits: int

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)
        if not 0.0 <= self.alpha0 <= 1.0:
            raise ValueError(f"alpha0 must lie in [0, 1], got {self.alpha0}")
        count = self.alpha0 * self.num_qubits
        if abs(count - round(count)) > 1e-9:
            raise ValueError(
                f"alpha0 * N = {count} is not an integer qubit count (alpha0={self.alpha0}, N={self.num_qubits})"
            )

    @property
    def y_count(self) -> int:
        """Number of |Y+> qubits."""
        return round(self.alpha0 * self.num_qubits)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive matrix on a ``dim``-dimensional space."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density operator must be square, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("density operator is not Hermitian within tolerance")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density operator trace {tr} deviates from 1")
        if np.linalg.eigvalsh(mat)[0] < -1e-10:
            raise ValueError("density operator has a negative eigenvalue beyond tolerance")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def make_tilted_state(num_qubits: int, params: TiltedParams) -> StateVector:
    """Uniform product state with per-qubit amplitudes (cos(t/2), e^{i phi} sin(t/2))."""
    _check_num_qubits(num_qubits)
    half = 0.5 * params.theta0
    qubit = np.array(
        [math.cos(half), complex(math.cos(params.phi0), math.sin(params.phi0)) * math.sin(half)],
        dtype=np.complex128,
    )
    amps = reduce(np.kron, [qubit] * num_qubits)
    return StateVector(num_qubits, amps)


def make_mixed_state(params: MixedParams) -> StateVector:
    """Product of |0> qubits followed by |Y+> = (|0> + i|1>)/sqrt(2) qubits."""
    zero = np.array([1.0, 0.0], dtype=np.complex128)
    y_plus = np.array([1.0, 1.0j], dtype=np.complex128) / math.sqrt(2.0)
    factors = [zero] * (params.num_qubits - params.y_count) + [y_plus] * params.y_count
    amps = reduce(np.kron, factors)
    return StateVector(params.num_qubits, amps)


def reduced_density_matrix(state: StateVector, part: Bipartition) -> DensityOperator:
    """Trace out B: matricize the amplitudes as d_a x d_b and form the row Gram matrix."""
    part.check_state(state)
    mat = state.amplitudes.reshape(part.d_a, part.d_b)
    return DensityOperator(mat @ mat.conj().T)


def purity(rho: DensityOperator) -> float:
    """Tr rho^2, equal to the squared Frobenius norm for Hermitian rho."""
    return float(np.vdot(rho.matrix, rho.matrix).real)


def distance_to_maximally_mixed(rho: DensityOperator) -> float:
    """Full trace norm ||rho - I/d||_1 (no 1/2 factor), from a Hermitian eigendecomposition."""
    diff = rho.matrix - np.eye(rho.dim) / rho.dim
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())
