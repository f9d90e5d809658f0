"""Tests for the sweep runner and analysis commands."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from permpe.cli import (
    ExperimentConfig,
    SweepRecord,
    analyze_crossing,
    analyze_fss,
    analyze_validate,
    default_samples,
    load_records,
    main,
    run_sweep,
)

TILTED_CONFIG = """\
master_seed = 11
output = "{out}"

[model]
kind = "tilted"
theta0_over_pi = 0.25
phi0_over_pi = 0.25

[dynamics]
kind = "global"

[sweep]
sizes = [6, 8]
n_a = 2
theta_m_over_pi = [0.1, 0.3]
moments = [2]
observables = ["trace_dist_haar", "trace_dist_cl", "coherence"]
samples = 12
"""


def write_config(tmp_path, text, name="sweep.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestConfigValidation:
    def test_parses_tilted_config(self, tmp_path):
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, TILTED_CONFIG.format(out="o.csv")))
        assert cfg.model_kind == "tilted"
        assert cfg.sizes == (6, 8)
        assert cfg.axis_values == (0.1, 0.3)
        assert cfg.samples_for(6) == 12

    def test_sample_ladder(self):
        assert default_samples(12) == 10_000
        assert default_samples(16) == 5_000
        assert default_samples(18) == 1_000
        assert default_samples(20) == 500
        assert default_samples(24) == 100

    def test_mixed_fraction_must_give_integer_counts(self, tmp_path):
        text = """\
master_seed = 1
output = "x.csv"
[model]
kind = "mixed"
alpha0 = 0.5
[sweep]
sizes = [8, 10]
n_a = 2
alpha_m = [0.25]
observables = ["coherence"]
samples = 4
"""
        # alpha_m = 0.25 gives 1.5 X qubits at N = 8 (n_b = 6)
        with pytest.raises(ValueError, match="non-integer X count"):
            ExperimentConfig.from_toml(write_config(tmp_path, text))

    def test_alpha0_must_give_integer_counts(self, tmp_path):
        text = """\
master_seed = 1
output = "x.csv"
[model]
kind = "mixed"
alpha0 = 0.3
[sweep]
sizes = [8]
n_a = 2
alpha_m = [0.5]
observables = ["coherence"]
samples = 4
"""
        with pytest.raises(ValueError, match="integer"):
            ExperimentConfig.from_toml(write_config(tmp_path, text))

    def test_subsystem_must_fit(self, tmp_path):
        text = TILTED_CONFIG.format(out="o.csv").replace("n_a = 2", "n_a = 6")
        with pytest.raises(ValueError, match="n_a"):
            ExperimentConfig.from_toml(write_config(tmp_path, text))

    def test_unknown_observable_rejected(self, tmp_path):
        text = TILTED_CONFIG.format(out="o.csv").replace('"coherence"', '"magic"')
        with pytest.raises(ValueError, match="unknown observables"):
            ExperimentConfig.from_toml(write_config(tmp_path, text))

    def test_moment_cap(self, tmp_path):
        text = TILTED_CONFIG.format(out="o.csv").replace("moments = [2]", "moments = [7]")
        with pytest.raises(ValueError, match="cap"):
            ExperimentConfig.from_toml(write_config(tmp_path, text))

    def test_orthogonal_reference_limited_to_k2(self, tmp_path):
        text = TILTED_CONFIG.format(out="o.csv").replace("moments = [2]", "moments = [3]")
        text = text.replace('"trace_dist_haar"', '"trace_dist_ohaar"')
        with pytest.raises(ValueError, match="k <= 2"):
            ExperimentConfig.from_toml(write_config(tmp_path, text))


class TestRunSweep:
    def test_byte_identical_across_thread_counts_and_reruns(self, tmp_path, monkeypatch):
        # identical config (same relative output path) in two directories,
        # once serial and once with eight workers
        outputs = []
        for sub, threads in (("one", 1), ("eight", 8)):
            workdir = tmp_path / sub
            workdir.mkdir()
            monkeypatch.chdir(workdir)
            cfg = ExperimentConfig.from_toml(
                write_config(workdir, TILTED_CONFIG.format(out="out.csv"))
            )
            run_sweep(cfg, threads=threads)
            outputs.append((workdir / "out.csv").read_bytes())
        assert outputs[0] == outputs[1]
        # rerunning over a complete file changes nothing
        monkeypatch.chdir(tmp_path / "one")
        cfg = ExperimentConfig.from_toml(
            write_config(tmp_path / "one", TILTED_CONFIG.format(out="out.csv"), "re.toml")
        )
        run_sweep(cfg, threads=4)
        assert (tmp_path / "one" / "out.csv").read_bytes() == outputs[0]

    def test_record_layout(self, tmp_path):
        cfg = ExperimentConfig.from_toml(
            write_config(tmp_path, TILTED_CONFIG.format(out=tmp_path / "o.csv"))
        )
        run_sweep(cfg)
        lines = (tmp_path / "o.csv").read_text().splitlines()
        assert lines[0] == "# permpe-sweep v1"
        assert lines[1].startswith("# config: ")
        assert lines[2] == "model,N,n_a,axis,k,observable,mean,se,n_samples"
        records = load_records([tmp_path / "o.csv"])
        # 2 sizes x 2 angles x (2 moment observables + coherence)
        assert len(records) == 12
        assert all(r.n_samples == 12 for r in records)

    def test_resume_skips_completed_points(self, tmp_path):
        out = tmp_path / "o.csv"
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, TILTED_CONFIG.format(out=out)))
        run_sweep(cfg)
        before = out.read_bytes()
        marker = tmp_path / "marker"
        assert not marker.exists()
        run_sweep(cfg)  # nothing pending
        assert out.read_bytes() == before

    def test_resume_completes_interrupted_sweep(self, tmp_path):
        out = tmp_path / "o.csv"
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, TILTED_CONFIG.format(out=out)))
        run_sweep(cfg)
        full = out.read_bytes()
        lines = out.read_text().splitlines(keepends=True)
        # keep the header plus the first grid point's three records
        out.write_text("".join(lines[:6]))
        run_sweep(cfg)
        assert out.read_bytes() == full

    def test_partial_grid_point_is_detected(self, tmp_path):
        out = tmp_path / "o.csv"
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, TILTED_CONFIG.format(out=out)))
        run_sweep(cfg)
        lines = out.read_text().splitlines(keepends=True)
        out.write_text("".join(lines[:5]))  # header + 2 of 3 records
        with pytest.raises(ValueError, match="partial grid point"):
            run_sweep(cfg)

    def test_resume_rejects_config_mismatch(self, tmp_path):
        out = tmp_path / "o.csv"
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, TILTED_CONFIG.format(out=out)))
        run_sweep(cfg)
        other = cfg.resolved(seed=99)
        with pytest.raises(ValueError, match="different configuration"):
            run_sweep(other)

    def test_seed_override_changes_results(self, tmp_path):
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        base = ExperimentConfig.from_toml(write_config(tmp_path, TILTED_CONFIG.format(out=out1)))
        run_sweep(base)
        run_sweep(base.resolved(seed=999, out=str(out2)))
        r1, r2 = load_records([out1]), load_records([out2])
        assert any(a.mean != b.mean for a, b in zip(r1, r2))

    def test_mixed_model_with_histograms(self, tmp_path):
        out = tmp_path / "mixed.csv"
        text = f"""\
master_seed = 3
output = "{out}"
[model]
kind = "mixed"
alpha0 = 0.5
[sweep]
sizes = [8]
n_a = 2
alpha_m = [0.0, 0.5, 1.0]
observables = ["coherence", "ipr"]
samples = 10
histogram_bins = 20
"""
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, text))
        run_sweep(cfg)
        sidecar = tmp_path / "mixed.csv.hist.json"
        assert sidecar.exists()
        hists = json.loads(sidecar.read_text())
        key = "mixed|N=8|axis=0.5|coherence"
        assert key in hists
        weights = np.array(hists[key]["weights"])
        assert weights.sum() == pytest.approx(1.0, abs=1e-8)

    def test_brickwork_dynamics_runs(self, tmp_path):
        out = tmp_path / "bw.csv"
        text = f"""\
master_seed = 5
output = "{out}"
[model]
kind = "tilted"
theta0_over_pi = 0.25
phi0_over_pi = 0.25
[dynamics]
kind = "brickwork"
gate_width = 3
depth_factor = 2
[sweep]
sizes = [6]
n_a = 2
theta_m_over_pi = [0.0, 0.5]
observables = ["coherence", "purity"]
samples = 6
"""
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, text))
        run_sweep(cfg)
        records = load_records([out])
        for r in records:
            if r.observable == "purity":
                assert 0.25 <= r.mean <= 1.0

    def test_incoherent_input_gives_exactly_zero_coherence(self, tmp_path):
        # alpha0 = 0 input is a basis state; relabelings keep it one, and a
        # product measurement on B leaves a basis state on A
        out = tmp_path / "flat.csv"
        text = f"""\
master_seed = 6
output = "{out}"
[model]
kind = "mixed"
alpha0 = 0.0
[sweep]
sizes = [8]
n_a = 2
alpha_m = [0.0, 0.5, 1.0]
observables = ["coherence"]
samples = 8
"""
        cfg = ExperimentConfig.from_toml(write_config(tmp_path, text))
        run_sweep(cfg)
        for r in load_records([out]):
            assert r.mean == 0.0 and r.se == 0.0


def synthetic_records(tmp_path):
    """Records with a known crossing at axis 0.25 and collapsing curves."""
    rows = []
    for size in (10, 14, 18):
        for axis in (0.1, 0.2, 0.3, 0.4):
            # linear fan through (0.25, 0.5): slope grows with size
            mean = 0.5 + (axis - 0.25) * (-size / 10.0)
            rows.append(
                SweepRecord("tilted", size, 2, axis, 2, "trace_dist_haar", mean, 0.01, 100)
            )
        # coherence curves sampled evenly in the rescaled variable, so the
        # collapse at the planted exponent nu = 1 is exact
        for u in np.linspace(-2.0, 2.0, 9):
            axis = 0.25 + u / size
            rows.append(
                SweepRecord("tilted", size, 2, axis, 0, "coherence", math.tanh(u), 0.01, 100)
            )
    path = tmp_path / "synthetic.csv"
    with open(path, "w") as fh:
        fh.write("# permpe-sweep v1\n# config: {}\n")
        fh.write("model,N,n_a,axis,k,observable,mean,se,n_samples\n")
        for r in rows:
            fh.write(r.to_csv_row() + "\n")
    return path


class TestAnalyze:
    def test_crossing_on_synthetic_fan(self, tmp_path):
        records = load_records([synthetic_records(tmp_path)])
        report = analyze_crossing(records, "trace_dist_haar", 2)
        assert report["sizes"] == [14, 18]
        assert report["x_star"] == pytest.approx(0.25, abs=1e-12)
        assert report["bracket"] == [0.2, 0.3]

    def test_crossing_size_selection(self, tmp_path):
        records = load_records([synthetic_records(tmp_path)])
        report = analyze_crossing(records, "trace_dist_haar", 2, sizes=(10, 18))
        assert report["sizes"] == [10, 18]
        assert report["x_star"] == pytest.approx(0.25, abs=1e-12)

    def test_fss_on_synthetic_curves(self, tmp_path):
        records = load_records([synthetic_records(tmp_path)])
        report = analyze_fss(records, "coherence", 0.25, np.arange(0.5, 2.5, 0.05))
        assert abs(report["nu"] - 1.0) <= 0.1

    def test_validate_battery_passes(self):
        report, all_ok = analyze_validate()
        assert all_ok
        assert len(report["checks"]) == 8


class TestMainEntry:
    def test_run_sweep_and_crossing_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "cli.csv"
        config = write_config(tmp_path, TILTED_CONFIG.format(out=out))
        assert main(["run-sweep", str(config)]) == 0
        assert out.exists()
        report_path = tmp_path / "crossing.json"
        code = main(
            [
                "analyze",
                "crossing",
                str(out),
                "--observable",
                "trace_dist_cl",
                "--out",
                str(report_path),
            ]
        )
        # tiny desk sweep: the sign change may or may not exist; both paths
        # must produce either a report or a machine-readable error
        if code == 0:
            assert "x_star" in json.loads(report_path.read_text())
        else:
            err = capsys.readouterr().err.strip()
            assert json.loads(err)["error"]

    def test_error_line_is_machine_readable(self, capsys):
        code = main(["analyze", "crossing", "/nonexistent/file.csv"])
        assert code == 2
        err = capsys.readouterr().err.strip()
        payload = json.loads(err)
        assert payload["error"] == "FileNotFoundError"

    def test_threads_env_override(self, tmp_path, monkeypatch):
        out = tmp_path / "env.csv"
        config = write_config(tmp_path, TILTED_CONFIG.format(out=out))
        monkeypatch.setenv("PERMPE_THREADS", "4")
        assert main(["run-sweep", str(config)]) == 0
        assert out.exists()

    def test_console_script_entry(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "permpe.cli", "analyze", "validate"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "PASS purity-formula-vs-brute-force" in result.stdout
