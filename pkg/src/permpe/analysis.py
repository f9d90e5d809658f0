"""Statistical post-processing: sample statistics, crossing points, scaling collapse.

The estimators here deliberately mirror the simplest defensible procedures:
two-point linear crossings with first-order error propagation, and a
variance-minimizing collapse with leave-one-size-out jackknife errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import TiltedParams

DEFAULT_NU_GRID = np.arange(0.5, 2.5 + 1e-9, 0.05)
COLLAPSE_GRID_POINTS = 100


@dataclass(frozen=True)
class SizeCurve:
    """One system size's sampled curve: y(x) with standard errors."""

    size: int
    x: np.ndarray
    y: np.ndarray
    y_err: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        y_err = np.ascontiguousarray(self.y_err, dtype=np.float64)
        if not (x.shape == y.shape == y_err.shape) or x.ndim != 1:
            raise ValueError("curve arrays must be 1-d and equally shaped")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x values must be strictly increasing")
        if np.any(y_err < 0):
            raise ValueError("negative y error")
        for arr in (x, y, y_err):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "y_err", y_err)


@dataclass(frozen=True)
class CurveFamily:
    curves: tuple[SizeCurve, ...]

    def __post_init__(self):
        sizes = [c.size for c in self.curves]
        if len(set(sizes)) != len(sizes):
            raise ValueError("duplicate system sizes in curve family")


@dataclass(frozen=True)
class CrossingEstimate:
    x_star: float
    x_star_err: float
    method: str = "two-size-linear"


@dataclass(frozen=True)
class CollapseResult:
    nu: float
    nu_err: float
    objective: float
    grid: np.ndarray


def mean_se(samples) -> tuple[float, float]:
    """Arithmetic mean and standard error with the unbiased (M - 1) variance."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("need at least two samples")
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(arr.size))
    return mean, se


def crossing_point(curve_a: SizeCurve, curve_b: SizeCurve) -> CrossingEstimate:
    """Crossing of two two-point linear fits sharing the same pair of x values.

    The difference of the curves must change sign between the two x values.
    The uncertainty comes from first-order propagation of the four y errors
    through the linear-crossing relation.
    """
    if curve_a.x.size != 2 or curve_b.x.size != 2:
        raise ValueError("crossing estimator uses exactly two points per size")
    if not np.array_equal(curve_a.x, curve_b.x):
        raise ValueError("the two sizes must share the same x grid")
    x1, x2 = curve_a.x
    h = x2 - x1
    u = curve_a.y[0] - curve_b.y[0]
    v = curve_a.y[1] - curve_b.y[1]
    if u == v:
        raise ValueError("parallel lines: no crossing")
    if u * v > 0:
        raise ValueError("no sign change between the two x values")
    denom = u - v
    x_star = x1 + h * u / denom
    # d x*/d y_{A1} = -h v / denom^2, d x*/d y_{A2} = h u / denom^2; B signs flip.
    w1 = h * v / denom**2
    w2 = h * u / denom**2
    var = w1**2 * (curve_a.y_err[0] ** 2 + curve_b.y_err[0] ** 2) + w2**2 * (
        curve_a.y_err[1] ** 2 + curve_b.y_err[1] ** 2
    )
    return CrossingEstimate(x_star=float(x_star), x_star_err=float(math.sqrt(var)))


def _collapse_objective(curves, x_star: float, nu: float) -> float | None:
    """Mean across-size variance after rescaling; None when the overlap window is empty."""
    scaled = [((c.x - x_star) * c.size ** (1.0 / nu), c.y) for c in curves]
    lo = max(u.min() for u, _ in scaled)
    hi = min(u.max() for u, _ in scaled)
    if not lo < hi:
        return None
    grid = np.linspace(lo, hi, COLLAPSE_GRID_POINTS)
    stacked = np.stack([np.interp(grid, u, y) for u, y in scaled])
    return float(stacked.var(axis=0).mean())


def _argmin_nu(curves, x_star: float, nu_grid: np.ndarray) -> tuple[float, float]:
    best_nu, best_obj = None, math.inf
    for nu in nu_grid:
        obj = _collapse_objective(curves, x_star, float(nu))
        if obj is not None and obj < best_obj:
            best_nu, best_obj = float(nu), obj
    if best_nu is None:
        raise ValueError("empty overlap window for every candidate exponent")
    return best_nu, best_obj


def fss_collapse(
    family: CurveFamily, x_star: float, nu_grid: np.ndarray | None = None
) -> CollapseResult:
    """Finite-size scaling collapse onto y = f((x - x*) N^(1/nu)).

    Scans the exponent grid, rescales each size's curve, linearly
    interpolates onto a common grid restricted to the overlapping window and
    minimizes the mean across-size variance.  The error bar is half the
    spread of the argmin under leave-one-size-out jackknife.
    """
    curves = family.curves
    if len(curves) < 3:
        raise ValueError("collapse needs at least three system sizes")
    if any(c.x.size < 4 for c in curves):
        raise ValueError("collapse needs at least four points per size")
    grid = DEFAULT_NU_GRID if nu_grid is None else np.asarray(nu_grid, dtype=np.float64)
    nu, objective = _argmin_nu(curves, x_star, grid)
    jack = []
    for drop in range(len(curves)):
        subset = tuple(c for i, c in enumerate(curves) if i != drop)
        jack.append(_argmin_nu(subset, x_star, grid)[0])
    nu_err = 0.5 * (max(jack) - min(jack))
    return CollapseResult(nu=nu, nu_err=nu_err, objective=objective, grid=grid)


def binary_entropy(p: float) -> float:
    """H2(p) = -p ln p - (1-p) ln(1-p) in nats."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def coherence_matched_threshold(theta0: float, tol: float = 1e-12) -> float:
    """Angle theta_m in [0, pi/2] solving H2(cos^2(t0/2)) + H2(cos^2(tm/2)) = ln 2.

    Matches the per-qubit coherence budget of the input state and the
    measurement basis against one bit; solved by bisection since the left
    side is monotone in theta_m on [0, pi/2].
    """
    if not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 must lie strictly inside (0, pi)")
    target = math.log(2.0) - binary_entropy(math.cos(0.5 * theta0) ** 2)

    def excess(theta_m: float) -> float:
        return binary_entropy(math.cos(0.5 * theta_m) ** 2) - target

    lo, hi = 0.0, 0.5 * math.pi
    if excess(lo) >= 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dominance_exceedance(
    ratios, num_qubits: int, n_a: int, alpha: float, params: TiltedParams
) -> tuple[float, float]:
    """Empirical probability that the top-two Born weight ratio exceeds omega^(N^alpha),
    together with the corresponding analytic lower bound.

    ``omega = max(cot^2, tan^2)(theta0 / 2)``; theta0 in {0, pi/2, pi} is
    rejected because omega degenerates to 1 there.
    """
    t = params.theta0
    if min(abs(t), abs(t - 0.5 * math.pi), abs(t - math.pi)) < 1e-12:
        raise ValueError("theta0 in {0, pi/2, pi}: weight ratio is degenerate")
    half_tan = math.tan(0.5 * t) ** 2
    omega = max(half_tan, 1.0 / half_tan)
    log_threshold = num_qubits**alpha * math.log(omega)
    arr = np.asarray(ratios, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no ratio samples given")
    with np.errstate(divide="ignore"):
        empirical = float(np.mean(np.log(arr) >= log_threshold))
    d_a = 2**n_a
    pairs = d_a * (d_a - 1) / 2.0
    bound = 1.0 - (
        pairs * (2.0 * math.floor(num_qubits**alpha) + 3.0) / math.sqrt(math.pi * num_qubits)
        + pairs * 2.0 ** (-num_qubits)
    )
    return empirical, bound
