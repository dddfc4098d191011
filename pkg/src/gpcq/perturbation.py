"""Paired runs of the full equation against the energy-critical comparison.

The full GP4/CQ3 flow is viewed as the energy-critical NLS plus a forcing
``e``: for GP4 ``e = 2 Re(v) v + |v|^2 + 2 Re(v)``, for CQ3 ``e = R(v)``.
:func:`compare_runs` evolves both equations with identical stepping and
measures every hypothesis and conclusion quantity of long-time
perturbation theory for energy-critical NLS.  No constants of that theory
are assumed; the quantities are only measured.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .energy import COERCIVITY_K, gronwall_rate, m_functional
from .equations import EquationSpec, nonlinearity
from .grid import ComplexField, h1dot_norm, lp_norm
from .integrator import StepConfig, Trajectory, evolve
from .strichartz import (
    LebesguePair,
    critical_exponent,
    free_trajectory,
    mixed_norm,
    n0_proxy,
    s1_finite_norm,
    x1_norm,
)

__all__ = [
    "ComparisonSetup",
    "PerturbationReport",
    "UniquenessResult",
    "perturbation_field",
    "difference_trajectory",
    "compare_runs",
    "scaling_study",
    "uniqueness_probe",
    "hdot1_growth_bound",
    "REPORT_ROLES",
]


@dataclass(frozen=True)
class ComparisonSetup:
    """Data for a paired run; both fields are taken at the left end ``t0`` of the interval."""

    spec: EquationSpec
    v0: ComplexField
    w0: ComplexField
    cfg: StepConfig
    t0: float = 0.0

    def __post_init__(self):
        if self.spec.variant not in ("GP4", "CQ3"):
            raise ValueError("the full equation must be GP4 or CQ3")
        if self.v0.grid != self.w0.grid:
            raise ValueError("v0 and w0 must live on the same grid")
        if self.v0.grid.dim != self.spec.dim:
            raise ValueError(f"{self.spec.label()} needs a {self.spec.dim}-D grid")

    @property
    def grid(self):
        return self.v0.grid

    @property
    def interval(self) -> tuple[float, float]:
        return (self.t0, self.t0 + self.cfg.total_time)


REPORT_ROLES = {
    "L_value": "hypothesis: critical spacetime norm of v",
    "E0_value": "hypothesis: sup in time of the Hdot^1 norm of v",
    "Eprime_value": "hypothesis: Hdot^1 distance between v and w at t0",
    "eps_free": "hypothesis: critical norm of the free evolution of v(t0) - w(t0)",
    "eps_e": "hypothesis: dual Strichartz proxy of grad e",
    "diff_crit": "conclusion: critical spacetime norm of w - v",
    "diff_s1": "conclusion: finite-family S^1 norm of w - v",
    "w_s1": "conclusion: finite-family S^1 norm of w",
}


@dataclass(frozen=True)
class PerturbationReport:
    interval: tuple
    L_value: float
    E0_value: float
    Eprime_value: float
    eps_free: float
    eps_e: float
    diff_crit: float
    diff_s1: float
    w_s1: float
    w_x1: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        return d

    def labelled(self) -> dict:
        """Quantities with their roles, for serialization."""
        return {
            "interval": list(self.interval),
            **{k: {"value": getattr(self, k), "role": role} for k, role in REPORT_ROLES.items()},
            "w_x1": {"value": self.w_x1, "role": "reference: X^1 norm of w"},
        }


def perturbation_field(spec: EquationSpec, v: ComplexField) -> ComplexField:
    """``e = N_full(v) - |v|^p v``, the part of the nonlinearity beyond the critical power."""
    crit = nonlinearity(EquationSpec.energy_critical(spec.dim), v.values)
    return v.replace(nonlinearity(spec, v.values) - crit)


def difference_trajectory(a: Trajectory, b: Trajectory) -> Trajectory:
    """Snapshot-wise ``a - b``; the two runs must share timestamps."""
    if a.timestamps != b.timestamps:
        raise ValueError("trajectories are not sampled at the same times")
    out = Trajectory(EquationSpec.energy_critical(a.grid.dim), a.grid)
    for t, x, y in zip(a.timestamps, a.snapshots, b.snapshots):
        out.append(t, x - y)
    return out


def compare_runs(setup: ComparisonSetup, *, return_runs: bool = False):
    """Evolve ``v`` (full equation) and ``w`` (energy-critical) and fill a PerturbationReport.

    Blow-up in either run propagates as :class:`~gpcq.integrator.BlowUpError`.
    With ``return_runs`` the two trajectories are returned alongside.
    """
    n = setup.spec.dim
    crit = critical_exponent(n)
    crit_pair = LebesguePair(crit, crit)
    v_run = evolve(setup.spec, setup.v0, setup.cfg, t0=setup.t0, with_diagnostics=False)
    w_run = evolve(EquationSpec.energy_critical(n), setup.w0, setup.cfg, t0=setup.t0, with_diagnostics=False)
    diff = difference_trajectory(w_run, v_run)
    d0 = setup.v0 - setup.w0
    free = free_trajectory(d0, v_run.times)
    interval = setup.interval
    report = PerturbationReport(
        interval=interval,
        L_value=mixed_norm(v_run, "v", crit_pair),
        E0_value=mixed_norm(v_run, "grad", LebesguePair.of("inf", 2)),
        Eprime_value=h1dot_norm(d0),
        eps_free=mixed_norm(free, "v", crit_pair),
        eps_e=n0_proxy(v_run, None, setup.spec),
        diff_crit=mixed_norm(diff, "v", crit_pair),
        diff_s1=s1_finite_norm(diff),
        w_s1=s1_finite_norm(w_run),
        w_x1=x1_norm(w_run),
    )
    if return_runs:
        return report, v_run, w_run
    return report


def scaling_study(spec: EquationSpec, base_v0: ComplexField, amplitudes, cfg: StepConfig, t0: float = 0.0):
    """One paired run per amplitude with ``v0 = w0 = amplitude * base_v0``.

    Returns ``[(amplitude, report), ...]`` in decreasing amplitude order.
    """
    amps = [float(a) for a in amplitudes]
    if any(a < 0 for a in amps):
        raise ValueError("amplitudes must be nonnegative")
    rows = []
    for a in sorted(amps, reverse=True):
        data = base_v0 * a
        rows.append((a, compare_runs(ComparisonSetup(spec, data, data, cfg, t0))))
    return rows


@dataclass(frozen=True)
class UniquenessResult:
    l2_gap_final: float
    order: float
    gaps: tuple
    dts: tuple


def uniqueness_probe(spec: EquationSpec, v0: ComplexField, cfg_coarse: StepConfig, cfg_fine: StepConfig) -> UniquenessResult:
    """Evolve the same data on a halving ``dt`` ladder from coarse to fine.

    ``l2_gap_final`` is the L^2 distance between the two finest final states;
    ``order`` is the Richardson order from the three finest levels (NaN when
    fewer than three levels exist or every gap is at rounding level).
    """
    T = cfg_coarse.total_time
    if abs(cfg_fine.total_time - T) > 1e-9 * max(1.0, T):
        raise ValueError("coarse and fine runs must cover the same horizon")
    ratio = cfg_coarse.dt / cfg_fine.dt
    levels = round(math.log2(ratio)) if ratio >= 1 else -1
    if levels < 1 or abs(2.0**levels - ratio) > 1e-9 * ratio:
        raise ValueError(f"fine dt must be the coarse dt divided by a power of two (ratio {ratio})")
    dts = [cfg_coarse.dt / 2**j for j in range(levels + 1)]
    finals = []
    for dt in dts:
        n = round(T / dt)
        cfg = StepConfig(dt, n, snapshot_stride=n, dealias=cfg_fine.dealias, guard=cfg_fine.guard)
        finals.append(evolve(spec, v0, cfg, with_diagnostics=False).final)
    gaps = tuple(lp_norm(a - b, 2) for a, b in zip(finals, finals[1:]))
    scale = max(1.0, lp_norm(finals[-1], 2))
    order = math.nan
    if len(gaps) >= 2 and gaps[-1] > 1e-12 * scale and gaps[-2] > 0:
        order = math.log2(gaps[-2] / gaps[-1])
    return UniquenessResult(gaps[-1], order, gaps, tuple(dts))


def hdot1_growth_bound(v0: ComplexField, gamma: float, tau: float) -> float:
    """Bound on ``sup_{t<=tau} ||v(t)||_{Hdot^1}`` for CQ3 from the modified-energy growth.

    ``||grad v||^2 <= 48 M(t) <= 48 M(0) exp(C1 tau)``.
    """
    m0 = m_functional(v0, gamma).m_value
    if m0 <= 0.0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(np.sqrt(COERCIVITY_K * m0) * np.exp(0.5 * gronwall_rate(gamma) * tau))
