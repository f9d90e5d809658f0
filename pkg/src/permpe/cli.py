"""Config-driven experiment runner and analysis commands.

Commands::

    permpe run-sweep CONFIG [--seed S] [--threads T] [--out PATH]
    permpe analyze crossing INPUT... [--observable OBS] [--k K] [--sizes N1,N2] [--out PATH]
    permpe analyze fss INPUT... [--observable OBS] --x-star X [--nu-min A --nu-max B --nu-step H] [--out PATH]
    permpe analyze distributions INPUT... [--out PATH]
    permpe analyze validate [--out PATH]

The config file is TOML with ``[model]``, ``[dynamics]`` and ``[sweep]``
tables plus top-level ``master_seed`` and ``output`` keys; angles are given
in units of pi.  Sweep output is a CSV with the fixed column order
``model,N,n_a,axis,k,observable,mean,se,n_samples`` preceded by comment
lines echoing the resolved config; histograms go to a ``.hist.json``
sidecar.  Numbers are serialized with 17 significant digits, per-task
random streams are derived from ``hash(master_seed, grid_index, sample)``
and aggregation runs in ascending sample order, so output files are
byte-identical regardless of the worker-thread count.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import oracle, weingarten
from .analysis import CurveFamily, SizeCurve, crossing_point, fss_collapse, mean_se
from .permdyn import BrickworkConfig, SeedSpec, apply_global_permutation, evolve_brickwork, sample_permutation
from .projens import (
    MeasurementBasis,
    build_projected_ensemble,
    classical_moment,
    haar_moment,
    orthogonal_haar_moment,
    pe_moment,
    trace_distance,
)
from .qstate import (
    Bipartition,
    MixedParams,
    TiltedParams,
    make_mixed_state,
    make_tilted_state,
    purity,
    reduced_density_matrix,
)
from .resources import dominant_weight_fraction, ensemble_average

FILE_TAG = "# permpe-sweep v1"
CSV_COLUMNS = ("model", "N", "n_a", "axis", "k", "observable", "mean", "se", "n_samples")
MOMENT_OBSERVABLES = ("trace_dist_haar", "trace_dist_cl", "trace_dist_ohaar")
SCALAR_OBSERVABLES = ("coherence", "ipr", "dominance", "purity")
ALL_OBSERVABLES = MOMENT_OBSERVABLES + SCALAR_OBSERVABLES
THREADS_ENV_VAR = "PERMPE_THREADS"

# Default per-size sample counts (large sizes are expensive; overridable).
_SAMPLE_LADDER = ((12, 10_000), (16, 5_000), (18, 1_000), (20, 500), (26, 100))


def default_samples(num_qubits: int) -> int:
    for cap, count in _SAMPLE_LADDER:
        if num_qubits <= cap:
            return count
    raise ValueError(f"no default sample count for N = {num_qubits}")


def fmt17(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated sweep description; one grid point per (size, axis value)."""

    model_kind: str
    dynamics_kind: str
    sizes: tuple[int, ...]
    n_a: int
    axis_name: str
    axis_values: tuple[float, ...]
    moments: tuple[int, ...]
    observables: tuple[str, ...]
    master_seed: int
    output: str
    theta0_over_pi: float | None = None
    phi0_over_pi: float | None = None
    alpha0: float | None = None
    phi_m_over_pi: float = 0.0
    gate_width: int = 3
    depth: int | None = None
    depth_factor: int | None = None
    samples: int | None = None
    histogram_bins: int = 0

    def __post_init__(self):
        if self.model_kind not in ("tilted", "mixed"):
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if self.dynamics_kind not in ("global", "brickwork"):
            raise ValueError(f"unknown dynamics kind {self.dynamics_kind!r}")
        if not self.sizes:
            raise ValueError("no system sizes given")
        if any(not 1 <= n <= 26 for n in self.sizes):
            raise ValueError("system sizes must lie in 1..26")
        if not 1 <= self.n_a < min(self.sizes):
            raise ValueError("need 1 <= n_a < min(sizes)")
        if self.model_kind == "tilted":
            if self.theta0_over_pi is None:
                raise ValueError("tilted model needs theta0_over_pi")
            if self.axis_name != "theta_m_over_pi":
                raise ValueError("tilted model sweeps theta_m_over_pi")
        else:
            if self.alpha0 is None:
                raise ValueError("mixed model needs alpha0")
            if self.axis_name != "alpha_m":
                raise ValueError("mixed model sweeps alpha_m")
            for n in self.sizes:
                MixedParams(self.alpha0, n)  # integer-count validation
                for a in self.axis_values:
                    raw = a * (n - self.n_a)
                    if abs(raw - round(raw)) > 1e-9:
                        raise ValueError(
                            f"alpha_m = {a} gives non-integer X count {raw} at N = {n}"
                        )
        if not self.axis_values:
            raise ValueError("empty sweep axis")
        if any(k < 1 for k in self.moments):
            raise ValueError("moment orders must be >= 1")
        d_a = 1 << self.n_a
        if any(d_a**k > 4096 for k in self.moments):
            raise ValueError("moment dimension exceeds the 4096 cap")
        if "trace_dist_ohaar" in self.observables and any(k > 2 for k in self.moments):
            raise ValueError("the real-orthogonal reference moment has closed form only for k <= 2")
        unknown = set(self.observables) - set(ALL_OBSERVABLES)
        if unknown:
            raise ValueError(f"unknown observables: {sorted(unknown)}")
        if not self.observables:
            raise ValueError("no observables requested")
        if self.dynamics_kind == "brickwork":
            if self.gate_width > min(self.sizes):
                raise ValueError("gate width exceeds the smallest system size")
            if (self.depth is None) == (self.depth_factor is None):
                raise ValueError("brickwork dynamics needs exactly one of depth or depth_factor")
        if self.samples is not None and self.samples < 2:
            raise ValueError("need at least two samples per grid point")
        if self.histogram_bins < 0:
            raise ValueError("histogram_bins must be >= 0")
        if self.histogram_bins and not ({"coherence", "ipr"} & set(self.observables)):
            raise ValueError("histograms require the coherence or ipr observable")
        SeedSpec(self.master_seed)  # range check

    @classmethod
    def from_toml(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        model = raw.get("model", {})
        dynamics = raw.get("dynamics", {"kind": "global"})
        sweep = raw.get("sweep", {})
        axis_name = "theta_m_over_pi" if "theta_m_over_pi" in sweep else "alpha_m"
        return cls(
            model_kind=model.get("kind", ""),
            theta0_over_pi=model.get("theta0_over_pi"),
            phi0_over_pi=model.get("phi0_over_pi", 0.0),
            alpha0=model.get("alpha0"),
            dynamics_kind=dynamics.get("kind", "global"),
            gate_width=dynamics.get("gate_width", 3),
            depth=dynamics.get("depth"),
            depth_factor=dynamics.get("depth_factor"),
            sizes=tuple(sweep.get("sizes", ())),
            n_a=sweep.get("n_a", 0),
            axis_name=axis_name,
            axis_values=tuple(sweep.get(axis_name, ())),
            phi_m_over_pi=sweep.get("phi_m_over_pi", 0.0),
            moments=tuple(sweep.get("moments", (2,))),
            observables=tuple(sweep.get("observables", ())),
            samples=sweep.get("samples"),
            histogram_bins=sweep.get("histogram_bins", 0),
            master_seed=raw.get("master_seed", 0),
            output=raw.get("output", "sweep.csv"),
        )

    def resolved(self, seed: int | None = None, out: str | None = None) -> "ExperimentConfig":
        updates = {}
        if seed is not None:
            updates["master_seed"] = seed
        if out is not None:
            updates["output"] = out
        if not updates:
            return self
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(updates)
        return ExperimentConfig(**data)

    def canonical_json(self) -> str:
        data = {}
        for name in sorted(self.__dataclass_fields__):
            value = getattr(self, name)
            if isinstance(value, tuple):
                value = list(value)
            data[name] = value
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def samples_for(self, num_qubits: int) -> int:
        return self.samples if self.samples is not None else default_samples(num_qubits)

    def grid(self) -> list[tuple[int, int, float]]:
        """(grid_index, size, axis value) in deterministic size-major order."""
        points = itertools.product(self.sizes, self.axis_values)
        return [(i, n, a) for i, (n, a) in enumerate(points)]


@dataclass
class SweepRecord:
    model: str
    num_qubits: int
    n_a: int
    axis: float
    k: int
    observable: str
    mean: float
    se: float
    n_samples: int

    def to_csv_row(self) -> str:
        return ",".join(
            (
                self.model,
                str(self.num_qubits),
                str(self.n_a),
                fmt17(self.axis),
                str(self.k),
                self.observable,
                fmt17(self.mean),
                fmt17(self.se),
                str(self.n_samples),
            )
        )

    @classmethod
    def from_csv_row(cls, line: str) -> "SweepRecord":
        parts = line.rstrip("\n").split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(f"malformed record line: {line!r}")
        return cls(
            model=parts[0],
            num_qubits=int(parts[1]),
            n_a=int(parts[2]),
            axis=float(parts[3]),
            k=int(parts[4]),
            observable=parts[5],
            mean=float(parts[6]),
            se=float(parts[7]),
            n_samples=int(parts[8]),
        )


def _record_keys_per_point(config: ExperimentConfig) -> list[tuple[str, int]]:
    keys = []
    for obs in config.observables:
        if obs in MOMENT_OBSERVABLES:
            keys.extend((obs, k) for k in config.moments)
        else:
            keys.append((obs, 0))
    return keys


def _reference_moment(obs: str, d_a: int, k: int):
    if obs == "trace_dist_haar":
        return haar_moment(d_a, k)
    if obs == "trace_dist_cl":
        return classical_moment(d_a, k)
    return orthogonal_haar_moment(d_a, k)


class _SweepEngine:
    """Holds the per-run caches and evaluates one (grid point, sample) task."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.seeds = SeedSpec(config.master_seed)
        d_a = 1 << config.n_a
        self.refs = {}
        for obs in config.observables:
            if obs in MOMENT_OBSERVABLES:
                for k in config.moments:
                    self.refs[obs, k] = _reference_moment(obs, d_a, k)
        # single-slot cache: grid points run size-major, and a dense vector
        # at the 26-qubit cap costs ~1 GiB, so only keep the current size
        self._initial_slot: tuple[int, object] | None = None

    def _initial(self, num_qubits: int):
        slot = self._initial_slot
        if slot is not None and slot[0] == num_qubits:
            return slot[1]
        if self.config.model_kind == "tilted":
            params = TiltedParams(
                self.config.theta0_over_pi * math.pi, self.config.phi0_over_pi * math.pi
            )
            state = make_tilted_state(num_qubits, params)
        else:
            state = make_mixed_state(MixedParams(self.config.alpha0, num_qubits))
        self._initial_slot = (num_qubits, state)
        return state

    def _basis(self, num_qubits: int, axis_value: float) -> MeasurementBasis:
        n_b = num_qubits - self.config.n_a
        if self.config.model_kind == "tilted":
            return MeasurementBasis.uniform(
                n_b, axis_value * math.pi, self.config.phi_m_over_pi * math.pi
            )
        return MeasurementBasis.mixed(n_b, alpha_m=axis_value)

    def _evolve(self, num_qubits: int, rng: np.random.Generator):
        state = self._initial(num_qubits)
        if self.config.dynamics_kind == "global":
            perm = sample_permutation(state.dim, rng)
            return apply_global_permutation(state, perm)
        depth = self.config.depth
        if depth is None:
            depth = self.config.depth_factor * num_qubits
        cfg = BrickworkConfig(self.config.gate_width, depth)
        return evolve_brickwork(state, cfg, rng, keep_all=False)[0]

    def run_task(self, grid_index: int, num_qubits: int, axis_value: float, sample: int):
        """Returns ({(observable, k): value}, {(observable): histogram weights})."""
        cfg = self.config
        rng = self.seeds.stream(grid_index, sample)
        state = self._evolve(num_qubits, rng)
        part = Bipartition(cfg.n_a, num_qubits - cfg.n_a)
        pe = build_projected_ensemble(state, part, self._basis(num_qubits, axis_value))
        values = {}
        hists = {}
        moments = {}
        for obs in cfg.observables:
            if obs in MOMENT_OBSERVABLES:
                for k in cfg.moments:
                    if k not in moments:
                        moments[k] = pe_moment(pe, k)
                    values[obs, k] = trace_distance(moments[k], self.refs[obs, k])
            elif obs in ("coherence", "ipr"):
                bins = cfg.histogram_bins or None
                stat = ensemble_average(pe, obs, bins=bins)
                values[obs, 0] = stat.mean
                if bins:
                    hists[obs] = stat.histogram
            elif obs == "dominance":
                values[obs, 0] = dominant_weight_fraction(pe)
            else:  # purity
                values[obs, 0] = purity(reduced_density_matrix(state, part))
        return values, hists


def _read_existing(path: Path, config_json: str) -> dict[tuple[int, str], int]:
    """Completed-row counts keyed by (size, formatted axis); validates the config echo."""
    counts: dict[tuple[int, str], int] = {}
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != FILE_TAG:
        raise ValueError(f"{path} is not a sweep output file")
    if len(lines) < 2 or not lines[1].startswith("# config: "):
        raise ValueError(f"{path} is missing its config echo")
    existing_json = lines[1][len("# config: "):]
    if existing_json != config_json:
        raise ValueError(
            f"{path} was produced by a different configuration; refusing to resume"
        )
    for line in lines[3:]:
        if not line:
            continue
        rec = SweepRecord.from_csv_row(line)
        key = (rec.num_qubits, fmt17(rec.axis))
        counts[key] = counts.get(key, 0) + 1
    return counts


def run_sweep(config: ExperimentConfig, threads: int = 1) -> Path:
    """Execute all pending grid points and append records to the output CSV."""
    out_path = Path(config.output)
    config_json = config.canonical_json()
    keys_per_point = _record_keys_per_point(config)
    done: dict[tuple[int, str], int] = {}
    if out_path.exists():
        done = _read_existing(out_path, config_json)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(f"{FILE_TAG}\n# config: {config_json}\n")
            fh.write(",".join(CSV_COLUMNS) + "\n")

    engine = _SweepEngine(config)
    hist_path = out_path.with_name(out_path.name + ".hist.json")
    histograms = {}
    if config.histogram_bins and hist_path.exists():
        histograms = json.loads(hist_path.read_text(encoding="ascii"))

    for grid_index, num_qubits, axis_value in config.grid():
        point_key = (num_qubits, fmt17(axis_value))
        n_samples = config.samples_for(num_qubits)
        have = done.get(point_key, 0)
        if have == len(keys_per_point):
            continue
        if have not in (0, len(keys_per_point)):
            raise ValueError(
                f"output file holds a partial grid point {point_key}; delete it and rerun"
            )

        def task(sample: int):
            return engine.run_task(grid_index, num_qubits, axis_value, sample)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(task, range(n_samples)))
        else:
            results = [task(s) for s in range(n_samples)]

        rows = []
        for obs, k in keys_per_point:
            series = [res[0][obs, k] for res in results]
            mean, se = mean_se(series)
            rows.append(
                SweepRecord(
                    model=config.model_kind,
                    num_qubits=num_qubits,
                    n_a=config.n_a,
                    axis=axis_value,
                    k=k,
                    observable=obs,
                    mean=mean,
                    se=se,
                    n_samples=n_samples,
                ).to_csv_row()
            )
        with open(out_path, "a", encoding="ascii") as fh:
            fh.write("\n".join(rows) + "\n")

        if config.histogram_bins:
            for obs in ("coherence", "ipr"):
                pooled = None
                edges = None
                for res in results:
                    if obs in res[1]:
                        e, w = res[1][obs]
                        edges = e
                        pooled = w if pooled is None else pooled + w
                if pooled is not None:
                    key = f"{config.model_kind}|N={num_qubits}|axis={fmt17(axis_value)}|{obs}"
                    histograms[key] = {
                        "edges": [float(v) for v in edges],
                        "weights": [float(v) for v in pooled / len(results)],
                    }

    if config.histogram_bins and histograms:
        hist_path.write_text(
            json.dumps(histograms, sort_keys=True, indent=1) + "\n", encoding="ascii"
        )
    return out_path


# ---------------------------------------------------------------------------
# Analysis commands
# ---------------------------------------------------------------------------

def load_records(paths) -> list[SweepRecord]:
    records = []
    for path in paths:
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#") or line.startswith("model,"):
                    continue
                records.append(SweepRecord.from_csv_row(line))
    if not records:
        raise ValueError("no records found in the given files")
    return records


def _curve_for_size(records, size, observable, k):
    pts = sorted(
        (r.axis, r.mean, r.se)
        for r in records
        if r.num_qubits == size and r.observable == observable and r.k == k
    )
    if not pts:
        raise ValueError(f"no records for N = {size}, observable {observable!r}, k = {k}")
    arr = np.array(pts)
    return SizeCurve(size, arr[:, 0], arr[:, 1], arr[:, 2])


def analyze_crossing(records, observable: str, k: int, sizes=None) -> dict:
    """Two-size linear crossing on the adjacent axis pair bracketing the sign change."""
    present = sorted({r.num_qubits for r in records})
    if sizes is None:
        if len(present) < 2:
            raise ValueError("crossing needs records at two system sizes")
        sizes = present[-2:]
    n1, n2 = sorted(sizes)
    c1 = _curve_for_size(records, n1, observable, k)
    c2 = _curve_for_size(records, n2, observable, k)
    common = sorted(set(c1.x).intersection(c2.x))
    if len(common) < 2:
        raise ValueError("the two sizes share fewer than two axis values")

    def at(curve, x):
        i = int(np.nonzero(curve.x == x)[0][0])
        return curve.y[i], curve.y_err[i]

    for x_lo, x_hi in zip(common, common[1:]):
        y1l, e1l = at(c1, x_lo)
        y1h, e1h = at(c1, x_hi)
        y2l, e2l = at(c2, x_lo)
        y2h, e2h = at(c2, x_hi)
        diff_lo, diff_hi = y1l - y2l, y1h - y2h
        if diff_lo == diff_hi or diff_lo * diff_hi > 0:
            continue
        est = crossing_point(
            SizeCurve(n1, np.array([x_lo, x_hi]), np.array([y1l, y1h]), np.array([e1l, e1h])),
            SizeCurve(n2, np.array([x_lo, x_hi]), np.array([y2l, y2h]), np.array([e2l, e2h])),
        )
        return {
            "x_star": est.x_star,
            "x_star_err": est.x_star_err,
            "method": est.method,
            "sizes": [n1, n2],
            "observable": observable,
            "k": k,
            "bracket": [x_lo, x_hi],
        }
    raise ValueError("no adjacent axis pair brackets a sign change of the size difference")


def analyze_fss(records, observable: str, x_star: float, nu_grid) -> dict:
    sizes = sorted({r.num_qubits for r in records})
    k = 0 if observable not in MOMENT_OBSERVABLES else min(r.k for r in records if r.observable == observable)
    family = CurveFamily(tuple(_curve_for_size(records, n, observable, k) for n in sizes))
    res = fss_collapse(family, x_star, nu_grid)
    return {
        "nu": res.nu,
        "nu_err": res.nu_err,
        "objective": res.objective,
        "nu_grid": [float(res.grid[0]), float(res.grid[-1])],
        "observable": observable,
        "x_star": x_star,
        "sizes": sizes,
    }


def analyze_distributions(paths) -> dict:
    merged = {}
    for path in paths:
        sidecar = Path(path).with_name(Path(path).name + ".hist.json")
        if sidecar.exists():
            merged.update(json.loads(sidecar.read_text(encoding="ascii")))
    if not merged:
        raise ValueError("no histogram sidecars found next to the input files")
    return {"histograms": merged}


def _validate_battery() -> list[tuple[str, bool, str]]:
    """Deterministic oracle checks; each entry is (name, passed, detail)."""
    checks = []

    table = weingarten.weingarten_exact(2, 8)
    expected = np.array([[1 / 7, -1 / 56], [-1 / 56, 1 / 56]])
    err = float(np.abs(table.wg - expected).max())
    checks.append(("second-moment-closed-form", err == 0.0, f"max deviation {err:.2e}"))

    diff = float(
        np.abs(weingarten.weingarten_exact(4, 16).wg - weingarten.weingarten_mobius_route(4, 16)).max()
    )
    checks.append(("fourth-moment-route-agreement", diff <= 1e-10, f"max |diff| {diff:.2e}"))

    proj = weingarten.invariant_projector(weingarten.weingarten_exact(2, 4))
    avg = np.zeros((16, 16))
    for images in itertools.permutations(range(4)):
        u = np.zeros((4, 4))
        u[list(images), range(4)] = 1.0
        avg += np.kron(u, u)
    avg /= math.factorial(4)
    perr = float(np.abs(proj - avg).max())
    checks.append(("projector-vs-exhaustive-average", perr < 1e-12, f"max |diff| {perr:.2e}"))

    params = TiltedParams(math.pi / 4, math.pi / 4)
    state = make_tilted_state(3, params)

    def purity_fn(amps):
        m = amps.reshape(2, 4)
        rho = m @ m.conj().T
        return float(np.vdot(rho, rho).real)

    brute = oracle.brute_force_permutation_average(state, purity_fn)
    formula = weingarten.expected_purity_exact(3, 1, params)
    perr2 = abs(brute.value - formula)
    checks.append(("purity-formula-vs-brute-force", perr2 <= 1e-10, f"|diff| {perr2:.2e}"))

    mean_report = oracle.brute_force_permutation_average(state, lambda a: np.outer(a, a.conj()))
    a_coef, b_coef = weingarten.mean_state_coeffs(3, params)
    recon = a_coef * np.eye(8) + b_coef * np.ones((8, 8))
    merr = float(np.abs(mean_report.value - recon).max())
    checks.append(("mean-state-vs-brute-force", merr <= 1e-12, f"max |diff| {merr:.2e}"))

    rng = np.random.default_rng(12345)
    v = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    from .qstate import StateVector  # local import to keep the module header light

    psi = StateVector(6, v / np.linalg.norm(v))
    part = Bipartition(2, 4)
    pe = build_projected_ensemble(psi, part, MeasurementBasis.uniform(4, 0.4, 0.2), p_floor=0.0)
    berr = abs(float(pe.probs.sum()) - 1.0)
    checks.append(("born-completeness", berr <= 1e-8, f"|sum p - 1| {berr:.2e}"))

    rho = reduced_density_matrix(psi, part)
    cerr = float(np.abs(pe_moment(pe, 1).matrix - rho.matrix).max())
    checks.append(("first-moment-vs-rdm", cerr <= 1e-8, f"max |diff| {cerr:.2e}"))

    emp = oracle.binomial_top_gap_simulator(2, 2, 0.5, 100_000, np.random.default_rng(99))
    exact = 7 / 8
    se = math.sqrt(exact * (1 - exact) / 100_000)
    checks.append(
        ("binomial-gap-exact-enumeration", abs(emp - exact) <= 4 * se, f"|diff| {abs(emp - exact):.2e}")
    )
    return checks


def analyze_validate() -> tuple[dict, bool]:
    checks = _validate_battery()
    all_ok = all(ok for _, ok, _ in checks)
    report = {
        "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
        "all_passed": all_ok,
    }
    return report, all_ok


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permpe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run-sweep", help="execute a sweep described by a TOML config")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None, help="override master_seed")
    run.add_argument("--threads", type=int, default=None, help="worker threads")
    run.add_argument("--out", default=None, help="override the output path")

    analyze = sub.add_parser("analyze", help="post-process sweep records")
    asub = analyze.add_subparsers(dest="subcommand", required=True)

    crossing = asub.add_parser("crossing", help="two-size linear crossing estimate")
    crossing.add_argument("inputs", nargs="+")
    crossing.add_argument("--observable", default="trace_dist_haar")
    crossing.add_argument("--k", type=int, default=2)
    crossing.add_argument("--sizes", default=None, help="comma-separated pair, e.g. 14,18")
    crossing.add_argument("--out", default=None)

    fss = asub.add_parser("fss", help="finite-size scaling collapse")
    fss.add_argument("inputs", nargs="+")
    fss.add_argument("--observable", default="coherence")
    fss.add_argument("--x-star", type=float, required=True)
    fss.add_argument("--nu-min", type=float, default=0.5)
    fss.add_argument("--nu-max", type=float, default=2.5)
    fss.add_argument("--nu-step", type=float, default=0.05)
    fss.add_argument("--out", default=None)

    dist = asub.add_parser("distributions", help="collect histogram sidecars")
    dist.add_argument("inputs", nargs="+")
    dist.add_argument("--out", default=None)

    val = asub.add_parser("validate", help="run the exact-oracle check battery")
    val.add_argument("--out", default=None)

    return parser


def _thread_count(arg_value: int | None) -> int:
    if arg_value is not None:
        return max(1, arg_value)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run-sweep":
            config = ExperimentConfig.from_toml(args.config).resolved(seed=args.seed, out=args.out)
            out_path = run_sweep(config, threads=_thread_count(args.threads))
            sys.stdout.write(f"wrote {out_path}\n")
            return 0
        if args.subcommand == "crossing":
            sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else None
            report = analyze_crossing(load_records(args.inputs), args.observable, args.k, sizes)
            _emit(report, args.out)
            return 0
        if args.subcommand == "fss":
            grid = np.arange(args.nu_min, args.nu_max + 1e-9, args.nu_step)
            report = analyze_fss(load_records(args.inputs), args.observable, args.x_star, grid)
            _emit(report, args.out)
            return 0
        if args.subcommand == "distributions":
            report = analyze_distributions(args.inputs)
            _emit(report, args.out)
            return 0
        # validate
        report, all_ok = analyze_validate()
        for entry in report["checks"]:
            status = "PASS" if entry["passed"] else "FAIL"
            sys.stdout.write(f"{status} {entry['name']} ({entry['detail']})\n")
        if args.out:
            _emit(report, args.out)
        return 0 if all_ok else 1
    except Exception as exc:  # one machine-readable error line, nonzero exit
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
