"""Projected ensembles and exact moment calculus for random permutation dynamics.

Modules:

* ``qstate``: dense state vectors, model product states, reduced density matrices.
* ``permdyn``: global permutation unitaries and local brickwork circuits.
* ``projens``: measurement bases, projected ensembles, moment operators.
* ``resources``: coherence and participation functionals with ensemble statistics.
* ``weingarten``: set-partition calculus and closed-form permutation averages.
* ``analysis``: crossing points, scaling collapse, matched thresholds.
* ``oracle``: brute-force and Monte Carlo ground-truth generators.
* ``cli``: config-driven sweep runner and analysis commands.
"""

from . import analysis, oracle, permdyn, projens, qstate, resources, weingarten

__all__ = [
    "analysis",
    "oracle",
    "permdyn",
    "projens",
    "qstate",
    "resources",
    "weingarten",
]

__version__ = "0.1.0"
