"""Global random permutation unitaries and local brickwork permutation circuits."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .qstate import StateVector


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a fixed, platform-independent stream derivation rule.

    The per-task seed is the first 16 bytes (big endian) of
    ``SHA-256("permpe:<master_seed>:<i1>:<i2>:...")`` where the ``i``s are the
    task indices passed to :meth:`stream`.  Identical inputs therefore yield
    an identical PCG64 stream everywhere.
    """

    master_seed: int

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < (1 << 64):
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")

    def derive(self, *indices: int) -> int:
        data = ":".join(str(int(v)) for v in (self.master_seed, *indices))
        digest = hashlib.sha256(("permpe:" + data).encode("ascii")).digest()
        return int.from_bytes(digest[:16], "big")

    def stream(self, *indices: int) -> np.random.Generator:
        return np.random.default_rng(self.derive(*indices))


@dataclass(frozen=True)
class Permutation:
    """Bijection on {0, ..., size-1} stored as an image array."""

    size: int
    images: np.ndarray

    def __post_init__(self):
        images = np.ascontiguousarray(self.images, dtype=np.int64)
        if images.shape != (self.size,):
            raise ValueError(f"image array has shape {images.shape}, expected ({self.size},)")
        if self.size < 1:
            raise ValueError("permutation size must be positive")
        counts = np.bincount(images, minlength=self.size)
        if counts.size != self.size or not np.all(counts == 1):
            raise ValueError("image array is not a bijection on {0, ..., size-1}")
        images.setflags(write=False)
        object.__setattr__(self, "images", images)

    def inverse(self) -> "Permutation":
        inv = np.empty(self.size, dtype=np.int64)
        inv[self.images] = np.arange(self.size)
        return Permutation(self.size, inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """Permutation mapping z -> self(other(z))."""
        if self.size != other.size:
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(self.size, self.images[other.images])


@dataclass(frozen=True)
class BrickworkConfig:
    """Layers of contiguous ``gate_width``-qubit gates with alternating offsets.

    Even layers start at qubit 1, odd layers at qubit ``gate_width // 2 + 1``;
    the chain is open, so windows that would stick out are simply absent.
    """

    gate_width: int = 3
    depth: int = 0

    def __post_init__(self):
        if self.gate_width < 1:
            raise ValueError("gate width must be at least 1")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")

    def layer_windows(self, num_qubits: int, layer: int) -> list[int]:
        """Start positions (0-based qubit offsets) of the gates in one layer."""
        offset = 0 if layer % 2 == 0 else self.gate_width // 2
        return list(range(offset, num_qubits - self.gate_width + 1, self.gate_width))


def sample_permutation(size: int, rng: np.random.Generator) -> Permutation:
    """Uniform element of S_size via the generator's unbiased shuffle."""
    if size < 1:
        raise ValueError("permutation size must be positive")
    return Permutation(size, rng.permutation(size))


def apply_global_permutation(state: StateVector, perm: Permutation) -> StateVector:
    """Relabel basis states: the amplitude at z moves to perm(z)."""
    if perm.size != state.dim:
        raise ValueError(f"permutation acts on {perm.size} labels but state has {state.dim}")
    out = np.empty_like(state.amplitudes)
    out[perm.images] = state.amplitudes
    return StateVector(state.num_qubits, out)


def _apply_window_permutation(amps: np.ndarray, start: int, width: int, images: np.ndarray) -> np.ndarray:
    """Scatter amplitudes along the window axis; qubits start+1..start+width (1-based)."""
    n = amps.size.bit_length() - 1
    view = amps.reshape(1 << start, 1 << width, 1 << (n - start - width))
    out = np.empty_like(view)
    out[:, images, :] = view
    return out.reshape(-1)


def evolve_brickwork(
    state: StateVector,
    cfg: BrickworkConfig,
    rng: np.random.Generator,
    keep_all: bool = True,
) -> list[StateVector]:
    """Evolve under layers of independently sampled local permutation gates.

    Returns the trajectory ``[state after 0 layers, ..., state after depth
    layers]`` when ``keep_all`` is set, otherwise just ``[final state]``.
    Gates are sampled layer by layer, left to right, from the given stream,
    so the circuit is reproducible for a fixed generator state.
    """
    n = state.num_qubits
    if cfg.gate_width > n:
        raise ValueError(f"gate width {cfg.gate_width} exceeds {n} qubits")
    amps = np.array(state.amplitudes)
    snaps = [state]
    for layer in range(cfg.depth):
        for start in cfg.layer_windows(n, layer):
            gate = sample_permutation(1 << cfg.gate_width, rng)
            amps = _apply_window_permutation(amps, start, cfg.gate_width, gate.images)
        if keep_all:
            snaps.append(StateVector(n, amps.copy()))
    if keep_all:
        return snaps
    return [StateVector(n, amps)]
