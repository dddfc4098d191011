"""Strang split-step time stepping with exact substeps.

One step is: half nonlinear substep, full free propagation, half nonlinear
substep.  The nonlinear flow of ``i u_t = F(|u|^2) u`` keeps ``|u|`` fixed,
so it is the pointwise phase rotation ``u -> u exp(-i F dt/2)``; the linear
flow is the Fourier multiplier ``exp(-i |k|^2 dt)``.  Both are exact, which
makes spatially constant data an exact test case.

GP4 and CQ3 rotate the full field ``u = 1 + v`` but store ``v``; the update
``v + (1 + v) expm1(i theta)`` keeps small excitations accurate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import EnergyReport, energy_report, gronwall_rate, mass_identity_rhs, re_l2_sq
from .equations import EquationSpec, phase_rate
from .grid import ComplexField, Grid, boundary_shell_max, fft, h1dot_norm, ifft, lp_norm

__all__ = [
    "StepConfig",
    "Diagnostics",
    "Trajectory",
    "BlowUpError",
    "NumericalFailureError",
    "InconclusiveOrderError",
    "ConvergenceResult",
    "GronwallMonitor",
    "MassIdentityCheck",
    "dealias_mask",
    "strang_step",
    "evolve",
    "diagnose",
    "energy_drift",
    "mass_identity_check",
    "gronwall_monitor",
    "convergence_order",
]

log = logging.getLogger(__name__)

DEFAULT_GUARD = 1e6


class BlowUpError(RuntimeError):
    """A norm exceeded the guard; ``trajectory`` holds everything up to the last valid state."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NumericalFailureError(FloatingPointError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class InconclusiveOrderError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepConfig:
    dt: float
    n_steps: int
    snapshot_stride: int = 1
    dealias: bool = False
    guard: float = DEFAULT_GUARD

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1 or self.snapshot_stride < 1:
            raise ValueError("n_steps and snapshot_stride must be positive")

    @classmethod
    def from_horizon(cls, dt: float, T: float, **kw) -> "StepConfig":
        n = round(T / dt)
        if n < 1 or abs(n * dt - T) > 1e-9 * max(1.0, abs(T)):
            raise ValueError(f"T = {T} is not a whole number of steps of dt = {dt}")
        return cls(dt=dt, n_steps=n, **kw)

    @property
    def total_time(self) -> float:
        return self.n_steps * self.dt


@dataclass(frozen=True)
class Diagnostics:
    report: EnergyReport
    h1dot: float
    l2: float
    l4: float
    l6: float
    linf: float
    boundary_shell_max: float


def diagnose(v: ComplexField, spec: EquationSpec) -> Diagnostics:
    return Diagnostics(
        report=energy_report(v, spec),
        h1dot=h1dot_norm(v),
        l2=lp_norm(v, 2),
        l4=lp_norm(v, 4),
        l6=lp_norm(v, 6),
        linf=lp_norm(v, np.inf),
        boundary_shell_max=boundary_shell_max(v),
    )


@dataclass
class Trajectory:
    spec: EquationSpec
    grid: Grid
    timestamps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def append(self, t: float, v: ComplexField, diag: Diagnostics | None = None):
        if self.timestamps and not t > self.timestamps[-1]:
            raise ValueError("timestamps must be strictly increasing")
        self.timestamps.append(float(t))
        self.snapshots.append(v)
        if diag is not None:
            self.diagnostics.append(diag)
        self._cache.clear()

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.timestamps)

    @property
    def final(self) -> ComplexField:
        return self.snapshots[-1]

    def __len__(self):
        return len(self.snapshots)

    def series(self, name: str) -> np.ndarray:
        """Diagnostic column by name (``energy``, ``m_value``, ``h1dot``, ...)."""
        out = []
        for d in self.diagnostics:
            out.append(getattr(d.report, name) if hasattr(d.report, name) else getattr(d, name))
        return np.asarray(out)


def dealias_mask(grid: Grid) -> np.ndarray:
    """Keep modes with ``|k|`` at most half the per-axis Nyquist wavenumber."""
    k_nyq = np.pi / grid.spacing
    return (grid.k_squared <= (0.5 * k_nyq) ** 2).astype(float)


class _Stepper:
    def __init__(self, spec: EquationSpec, grid: Grid, dt: float, dealias: bool = False):
        self.spec = spec
        self.dt = dt
        self.linear = np.exp(-1j * dt * grid.k_squared)
        if dealias:
            self.linear = self.linear * dealias_mask(grid)

    def half_nonlinear(self, v: np.ndarray) -> np.ndarray:
        theta = -0.5 * self.dt * phase_rate(self.spec, v)
        if self.spec.variant == "EC":
            return v * np.exp(1j * theta)
        return v + (1.0 + v) * np.expm1(1j * theta)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = self.half_nonlinear(v)
        v = ifft(self.linear * fft(v))
        return self.half_nonlinear(v)


def _check_grid(spec: EquationSpec, grid: Grid):
    if spec.dim != grid.dim:
        raise ValueError(f"{spec.label()} needs a {spec.dim}-D grid, got dim {grid.dim}")


def strang_step(spec: EquationSpec, v: ComplexField, dt: float, dealias: bool = False) -> ComplexField:
    """Advance ``v`` by one Strang step.  Negative ``dt`` steps backwards exactly."""
    if dt == 0:
        raise ValueError("dt must be nonzero")
    _check_grid(spec, v.grid)
    return v.replace(_Stepper(spec, v.grid, dt, dealias)(v.values))


def evolve(
    spec: EquationSpec,
    v0: ComplexField,
    cfg: StepConfig,
    *,
    t0: float = 0.0,
    with_diagnostics: bool = True,
) -> Trajectory:
    """Apply ``cfg.n_steps`` Strang steps, recording every ``snapshot_stride`` steps.

    The final state is always recorded.  Raises :class:`BlowUpError` when the
    sup norm passes ``cfg.guard`` and :class:`NumericalFailureError` on
    non-finite values; both carry the trajectory recorded so far.
    """
    _check_grid(spec, v0.grid)
    step = _Stepper(spec, v0.grid, cfg.dt, cfg.dealias)
    traj = Trajectory(spec, v0.grid)

    def record(k, arr):
        f = v0.replace(arr) if k else v0
        traj.append(t0 + k * cfg.dt, f, diagnose(f, spec) if with_diagnostics else None)

    v = v0.values
    record(0, v)
    for k in range(1, cfg.n_steps + 1):
        v = step(v)
        peak = float(np.max(np.abs(v)))
        if not math.isfinite(peak):
            raise NumericalFailureError(f"non-finite values at step {k}", traj)
        if peak > cfg.guard:
            raise BlowUpError(f"sup norm {peak:.3e} exceeded guard {cfg.guard:.1e} at step {k}", traj)
        if k % cfg.snapshot_stride == 0 or k == cfg.n_steps:
            record(k, v)
    return traj


def energy_drift(traj: Trajectory) -> float:
    """``max_t |E(t) - E(0)| / |E(0)|`` over the recorded snapshots."""
    e = traj.series("energy")
    if e[0] == 0:
        return float(np.max(np.abs(e - e[0])))
    return float(np.max(np.abs(e - e[0])) / abs(e[0]))


@dataclass(frozen=True)
class MassIdentityCheck:
    times: np.ndarray
    finite_difference: np.ndarray
    rhs: np.ndarray

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.finite_difference - self.rhs)))


def mass_identity_check(traj: Trajectory) -> MassIdentityCheck:
    """Centered difference of ``int|Re v|^2`` against its exact time derivative.

    Compared at interior snapshots; snapshot spacing must be uniform.
    """
    t = traj.times
    if len(t) < 3:
        raise ValueError("need at least three snapshots")
    spacing = np.diff(t)
    if np.ptp(spacing) > 1e-9 * spacing.mean():
        raise ValueError("mass identity check needs uniformly spaced snapshots")
    m = np.array([re_l2_sq(s) for s in traj.snapshots])
    fd = (m[2:] - m[:-2]) / (t[2:] - t[:-2])
    rhs = np.array([mass_identity_rhs(s, traj.spec) for s in traj.snapshots[1:-1]])
    return MassIdentityCheck(t[1:-1], fd, rhs)


@dataclass(frozen=True)
class GronwallMonitor:
    c1: float
    times: np.ndarray
    m: np.ndarray
    dm_dt: np.ndarray

    @property
    def margin(self) -> np.ndarray:
        return self.c1 * self.m - self.dm_dt

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margin))

    @property
    def derivative_holds(self) -> bool:
        return bool(np.all(self.margin >= 0))

    @property
    def bound_holds(self) -> bool:
        # M(t) <= M(0) exp(C1 t), with a rounding allowance on M itself
        with np.errstate(over="ignore"):
            bound = self.m[0] * np.exp(self.c1 * (self.times - self.times[0]))
        return bool(np.all(self.m <= bound + 1e-12 * np.abs(self.m).max()))


def gronwall_monitor(traj: Trajectory) -> GronwallMonitor:
    """Finite-differenced ``dM/dt`` against ``C1 M`` along a CQ3 trajectory."""
    if traj.spec.variant != "CQ3":
        raise ValueError("the Gronwall monitor applies to CQ3 trajectories")
    t = traj.times
    m = traj.series("m_value")
    dm = np.gradient(m, t) if len(t) > 1 else np.zeros_like(m)
    return GronwallMonitor(gronwall_rate(traj.spec.gamma), t, m, dm)


@dataclass(frozen=True)
class ConvergenceResult:
    order: float
    orders: tuple
    gaps: tuple
    dts: tuple
    exact: bool
    finals: tuple = field(repr=False, default=())


def convergence_order(
    spec: EquationSpec,
    v0: ComplexField,
    T: float,
    dt_list,
    *,
    dealias: bool = False,
    exact_tol: float = 1e-12,
) -> ConvergenceResult:
    """Richardson estimate of the temporal order from a halving ``dt`` ladder.

    Gaps are L^2 distances between final states of consecutive levels; the
    order from levels ``i, i+1, i+2`` is ``log2(gap_i / gap_{i+1})`` and the
    reported ``order`` is the finest estimate.  When every gap is at rounding
    level (e.g. constant data, integrated exactly) ``exact`` is set and
    ``order`` is NaN.
    """
    dts = [float(d) for d in dt_list]
    if len(dts) < 3:
        raise ValueError("need at least three step sizes")
    for a, b in zip(dts, dts[1:]):
        if abs(a / b - 2.0) > 1e-9:
            raise ValueError(f"step sizes must halve: {a} -> {b}")
    finals = []
    for dt in dts:
        cfg = StepConfig.from_horizon(dt, T, dealias=dealias)
        cfg = StepConfig(dt, cfg.n_steps, snapshot_stride=cfg.n_steps, dealias=dealias)
        finals.append(evolve(spec, v0, cfg, with_diagnostics=False).final)
    gaps = [lp_norm(a - b, 2) for a, b in zip(finals, finals[1:])]
    scale = max(1.0, lp_norm(finals[-1], 2))
    if max(gaps) <= exact_tol * scale:
        return ConvergenceResult(math.nan, (), tuple(gaps), tuple(dts), True, tuple(finals))
    if any(g1 <= g2 for g1, g2 in zip(gaps, gaps[1:])):
        raise InconclusiveOrderError(f"differences do not decrease under refinement: {gaps}")
    orders = tuple(math.log2(g1 / g2) for g1, g2 in zip(gaps, gaps[1:]))
    return ConvergenceResult(orders[-1], orders, tuple(gaps), tuple(dts), False, tuple(finals))
