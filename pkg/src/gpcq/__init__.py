"""Pseudospectral Gross-Pitaevskii (4-D) and cubic-quintic (3-D) NLS in the excitation variable.

The package is split by concern:

- :mod:`gpcq.grid`: periodic lattices, fields, FFT-based operators and norms
- :mod:`gpcq.equations`: nonlinearities and parameter reduction
- :mod:`gpcq.energy`: energies, the modified energy and coercivity bounds
- :mod:`gpcq.integrator`: Strang split-step evolution and run diagnostics
- :mod:`gpcq.strichartz`: admissible pairs, mixed space-time norms, interval partitions
- :mod:`gpcq.perturbation`: paired runs against the energy-critical equation
- :mod:`gpcq.io`, :mod:`gpcq.cli`: configs, file formats and the ``gpcq`` command
"""
__version__ = "0.1.0"

from .energy import coercivity_constant, energy_excitation, energy_gl, energy_report, gronwall_rate, m_functional
from .equations import EquationSpec, GeneralCQParams, nonlinearity, reduce_general, remainder_R
from .grid import ComplexField, Grid, free_propagator, h1dot_norm, lp_norm
from .integrator import StepConfig, Trajectory, energy_drift, evolve, strang_step
from .io import InitialData, generate_initial, load_config
from .perturbation import ComparisonSetup, compare_runs
from .strichartz import LebesguePair, is_admissible, mixed_norm, partition_by_x1

__all__ = [
    "__version__",
    "Grid",
    "ComplexField",
    "EquationSpec",
    "GeneralCQParams",
    "StepConfig",
    "Trajectory",
    "InitialData",
    "LebesguePair",
    "ComparisonSetup",
    "lp_norm",
    "h1dot_norm",
    "free_propagator",
    "nonlinearity",
    "remainder_R",
    "reduce_general",
    "energy_gl",
    "energy_excitation",
    "energy_report",
    "m_functional",
    "coercivity_constant",
    "gronwall_rate",
    "strang_step",
    "evolve",
    "energy_drift",
    "generate_initial",
    "load_config",
    "is_admissible",
    "mixed_norm",
    "partition_by_x1",
    "compare_runs",
]
