"""End-to-end sweep through the command-line interface.

Writes a small TOML config, runs the sweep twice (serial, then with four
worker threads over a fresh copy) to show byte-identical output, estimates
the crossing angle from the records, and finishes with the exact-oracle
validation battery.  Everything goes through the same entry point the
``permpe`` console script uses.
"""

import json
import shutil
import tempfile
from pathlib import Path

from permpe.cli import main

CONFIG = """\
master_seed = 99
output = "records.csv"

[model]
kind = "tilted"
theta0_over_pi = 0.25
phi0_over_pi = 0.25

[sweep]
sizes = [10, 12]
n_a = 2
theta_m_over_pi = [0.08, 0.12, 0.16]
moments = [2]
observables = ["trace_dist_haar", "trace_dist_cl", "coherence"]
samples = 60
"""

workdir = Path(tempfile.mkdtemp(prefix="permpe-demo-"))
print(f"working in {workdir}")
(workdir / "sweep.toml").write_text(CONFIG)

serial = workdir / "serial"
threaded = workdir / "threaded"
for sub in (serial, threaded):
    sub.mkdir()
    shutil.copy(workdir / "sweep.toml", sub / "sweep.toml")

import os

os.chdir(serial)
assert main(["run-sweep", "sweep.toml"]) == 0
os.chdir(threaded)
assert main(["run-sweep", "sweep.toml", "--threads", "4"]) == 0

same = (serial / "records.csv").read_bytes() == (threaded / "records.csv").read_bytes()
print(f"serial and 4-thread records byte-identical: {same}")

report_path = workdir / "crossing.json"
code = main(
    ["analyze", "crossing", str(serial / "records.csv"), "--out", str(report_path)]
)
if code == 0:
    report = json.loads(report_path.read_text())
    print(
        f"crossing of sizes {report['sizes']}: theta_m = {report['x_star']:.4f} pi "
        f"+- {report['x_star_err']:.4f} pi (bracket {report['bracket']})"
    )
    print("(small sizes place the apparent crossing well below its large-size limit)")
else:
    print("no crossing bracket on this small grid (expected occasionally at desk scale)")

print("\nexact-oracle validation battery:")
main(["analyze", "validate"])
