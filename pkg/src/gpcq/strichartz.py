"""Mixed space-time Lebesgue norms over recorded trajectories.

Admissibility is decided with exact rationals.  Time integrals use the
trapezoid rule on ``t -> ||f(t)||_{L^r}^q`` sampled at the snapshots; an
integration interval may end between snapshots, in which case the
integrand is linearly interpolated.  This makes the time integral exactly
additive over any split point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .equations import EquationSpec
from .grid import ComplexField, free_propagator, gradient_magnitude, h1dot_norm, lp_norm_real
from .integrator import Trajectory

__all__ = [
    "Exponent",
    "LebesguePair",
    "InsufficientSamplingError",
    "MixedNormAccumulator",
    "Partition",
    "ADMISSIBLE_PAIRS",
    "X1_PAIRS",
    "critical_exponent",
    "is_admissible",
    "spatial_norms",
    "time_integral",
    "mixed_norm",
    "x1_norm",
    "s1_finite_norm",
    "n0_proxy",
    "n0_terms",
    "partition_profile",
    "partition_by_x1",
    "TooManyChunksError",
    "MAX_CHUNKS",
    "free_trajectory",
    "homogeneous_ratio",
]

INF = math.inf
Exponent = Union[Fraction, float]


class InsufficientSamplingError(ValueError):
    pass


def _exponent(x) -> Exponent:
    if isinstance(x, str):
        x = x.strip().lower()
        if x in ("inf", "infinity", "oo"):
            return INF
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x):
            return INF
        return Fraction(x).limit_denominator(10**6)
    return Fraction(x)


def _recip(x: Exponent) -> Fraction:
    return Fraction(0) if x == INF else 1 / Fraction(x)


@dataclass(frozen=True)
class LebesguePair:
    """Time exponent ``q`` and space exponent ``r`` of ``L_t^q L_x^r``."""

    q: Exponent
    r: Exponent

    @classmethod
    def of(cls, q, r) -> "LebesguePair":
        return cls(_exponent(q), _exponent(r))

    def __str__(self):
        return f"L_t^{self.q} L_x^{self.r}"

    def as_floats(self) -> tuple[float, float]:
        return float(self.q), float(self.r)


def is_admissible(q, r, n: int) -> bool:
    """Exact test of ``2/q + n/r = n/2`` with ``2 <= q, r <= inf`` and ``(q, r, n) != (2, inf, 2)``."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    q, r = _exponent(q), _exponent(r)
    if q < 2 or r < 2:
        return False
    if q == 2 and r == INF and n == 2:
        return False
    return 2 * _recip(q) + n * _recip(r) == Fraction(n, 2)


ADMISSIBLE_PAIRS = {
    4: tuple(LebesguePair.of(q, r) for q, r in [(2, 4), (6, "12/5"), (INF, 2)]),
    3: tuple(
        LebesguePair.of(q, r)
        for q, r in [(2, 6), ("8/3", 4), ("20/7", "30/8"), (5, "30/11"), (10, "30/13"), (20, "15/7"), (INF, 2)]
    ),
}

X1_PAIRS = {4: LebesguePair.of(6, "12/5"), 3: LebesguePair.of(10, "30/13")}

# dual pairs for the subcritical perturbation terms, keyed by the power of |v|
# multiplying |grad v|; power 0 is the linear term
_N0_PAIRS = {
    "GP4": {1: LebesguePair.of("6/5", "12/7"), 0: LebesguePair.of(1, 2)},
    "CQ3": {
        3: LebesguePair.of("20/13", "30/22"),
        2: LebesguePair.of("5/4", "30/19"),
        1: LebesguePair.of("20/19", "30/16"),
        0: LebesguePair.of(1, 2),
    },
}


def critical_exponent(n: int) -> Fraction:
    """Exponent ``2(n+2)/(n-2)`` of the scale-invariant ``L_{t,x}`` norm."""
    return Fraction(2 * (n + 2), n - 2)


Selector = Union[str, Callable[[ComplexField], np.ndarray]]


def _magnitudes(f: ComplexField, selector: Selector) -> np.ndarray:
    if selector == "v":
        return np.abs(f.values)
    if selector == "grad":
        return gradient_magnitude(f)
    if callable(selector):
        return selector(f)
    raise ValueError(f"unknown field selector {selector!r}")


def spatial_norms(traj: Trajectory, selector: Selector, r) -> np.ndarray:
    """``||f(t_k)||_{L^r}`` for every snapshot; cached on the trajectory for named selectors."""
    r = float(_exponent(r))
    key = ("spatial", selector, r) if isinstance(selector, str) else None
    if key is not None and key in traj._cache:
        return traj._cache[key]
    out = np.array([lp_norm_real(_magnitudes(s, selector), traj.grid, r) for s in traj.snapshots])
    if key is not None:
        traj._cache[key] = out
    return out


def _interp(t, y, s):
    return float(np.interp(s, t, y))


def time_integral(times, values, a: float, b: float) -> float:
    """Trapezoid integral over ``[a, b]`` of the piecewise-linear interpolant of ``values``."""
    t = np.asarray(times, float)
    y = np.asarray(values, float)
    if b < a:
        raise ValueError("empty interval")
    if b == a:
        return 0.0
    inside = (t > a) & (t < b)
    tt = np.concatenate([[a], t[inside], [b]])
    yy = np.concatenate([[_interp(t, y, a)], y[inside], [_interp(t, y, b)]])
    return float(np.sum(0.5 * (yy[1:] + yy[:-1]) * np.diff(tt)))


def _resolve_interval(traj: Trajectory, interval) -> tuple[float, float]:
    t = traj.times
    if interval is None:
        return float(t[0]), float(t[-1])
    a, b = float(interval[0]), float(interval[1])
    slack = 1e-12 * max(1.0, abs(t[-1]))
    if a > b or a < t[0] - slack or b > t[-1] + slack:
        raise ValueError(f"interval [{a}, {b}] outside trajectory range [{t[0]}, {t[-1]}]")
    return max(a, float(t[0])), min(b, float(t[-1]))


def _mixed_from_series(t, norms, pair: LebesguePair, a, b) -> float:
    slack = 1e-12 * max(1.0, abs(b))
    inside = (t >= a - slack) & (t <= b + slack)
    if pair.q == INF:
        if not inside.any():
            raise InsufficientSamplingError(f"no snapshots in [{a}, {b}]")
        return float(np.max(norms[inside]))
    if inside.sum() < 2:
        raise InsufficientSamplingError(f"fewer than two snapshots in [{a}, {b}]")
    q = float(pair.q)
    return time_integral(t, norms**q, a, b) ** (1.0 / q)


def mixed_norm(traj: Trajectory, selector: Selector, pair: LebesguePair, interval=None) -> float:
    """``(int_a^b ||f(t)||_{L^r}^q dt)^(1/q)``, or the snapshot max of the spatial norm for ``q = inf``.

    ``selector`` is ``"v"`` for the field, ``"grad"`` for ``|grad v|``, or a
    callable returning pointwise magnitudes of a snapshot.
    """
    if not isinstance(pair, LebesguePair):
        pair = LebesguePair.of(*pair)
    if pair.q < 1 or pair.r < 1:
        raise ValueError(f"exponents must be >= 1, got {pair}")
    a, b = _resolve_interval(traj, interval)
    return _mixed_from_series(traj.times, spatial_norms(traj, selector, pair.r), pair, a, b)


def x1_norm(traj: Trajectory, interval=None) -> float:
    """``||grad v||`` in the dimension's Strichartz pair: ``L_t^6 L_x^{12/5}`` (n=4), ``L_t^10 L_x^{30/13}`` (n=3)."""
    return mixed_norm(traj, "grad", X1_PAIRS[traj.grid.dim], interval)


def s1_finite_norm(traj: Trajectory, interval=None, n: int | None = None) -> float:
    """Max over the listed admissible pairs of the gradient mixed norm."""
    n = traj.grid.dim if n is None else n
    if n != traj.grid.dim:
        raise ValueError(f"dimension {n} does not match trajectory dimension {traj.grid.dim}")
    return max(mixed_norm(traj, "grad", p, interval) for p in ADMISSIBLE_PAIRS[n])


def _power_times_grad(power: int):
    def magnitudes(f: ComplexField) -> np.ndarray:
        g = gradient_magnitude(f)
        return g if power == 0 else np.abs(f.values) ** power * g

    return magnitudes


def n0_terms(traj: Trajectory, spec: EquationSpec, interval=None) -> dict[int, float]:
    """Each dual-pair norm ``|| |v|^p |grad v| ||`` of the perturbation, keyed by ``p``."""
    if spec.variant not in _N0_PAIRS:
        raise ValueError(f"no perturbation term for {spec.variant}")
    a, b = _resolve_interval(traj, interval)
    out = {}
    for power, pair in _N0_PAIRS[spec.variant].items():
        if power == 0:
            norms = spatial_norms(traj, "grad", pair.r)
        else:
            key = ("n0", power, float(pair.r))
            if key not in traj._cache:
                fn = _power_times_grad(power)
                traj._cache[key] = np.array(
                    [lp_norm_real(fn(s), traj.grid, float(pair.r)) for s in traj.snapshots]
                )
            norms = traj._cache[key]
        out[power] = _mixed_from_series(traj.times, norms, pair, a, b)
    return out


def n0_proxy(traj: Trajectory, interval, spec: EquationSpec) -> float:
    """Dual Strichartz size of ``grad e`` bounded through the Hölder splitting of the perturbation.

    GP4: ``||v grad v||_{L^{6/5} L^{12/7}} + ||grad v||_{L^1 L^2}``.
    CQ3: ``sum_{p=1}^{3} || |v|^p grad v ||`` in the matching dual pairs plus ``||grad v||_{L^1 L^2}``.
    """
    return float(sum(n0_terms(traj, spec, interval).values()))


class MixedNormAccumulator:
    """Running trapezoid value of ``int ||f(t)||_{L^r}^q dt`` as samples arrive."""

    def __init__(self, pair: LebesguePair):
        self.pair = pair
        self.samples = []
        self.integrated = 0.0
        self._peak = 0.0

    def append(self, t: float, norm: float):
        if self.samples and not t > self.samples[-1][0]:
            raise ValueError("timestamps must be strictly increasing")
        if norm < 0:
            raise ValueError("spatial norms are nonnegative")
        if self.pair.q != INF and self.samples:
            t0, n0 = self.samples[-1]
            q = float(self.pair.q)
            self.integrated += 0.5 * (n0**q + norm**q) * (t - t0)
        self._peak = max(self._peak, norm)
        self.samples.append((float(t), float(norm)))

    @property
    def value(self) -> float:
        if self.pair.q == INF:
            return self._peak
        return self.integrated ** (1.0 / float(self.pair.q))


@dataclass(frozen=True)
class Partition:
    eta: float
    q: float
    breakpoints: tuple
    chunk_values: tuple
    total: float

    @property
    def J(self) -> int:
        return len(self.chunk_values)

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))


def _crossing(t0, t1, f0, f1, need):
    """Offset ``s`` in ``[0, t1-t0]`` where ``f0 s + (f1-f0) s^2 / (2 dt) = need``."""
    dt = t1 - t0
    c = (f1 - f0) / (2.0 * dt)
    if c == 0:
        return need / f0
    disc = f0 * f0 + 4.0 * c * need
    # stable root of c s^2 + f0 s - need = 0
    return 2.0 * need / (f0 + math.sqrt(max(disc, 0.0)))


MAX_CHUNKS = 10**7


class TooManyChunksError(ValueError):
    pass


def partition_profile(times, density, eta: float, q: float, max_chunks: int = MAX_CHUNKS) -> Partition:
    """Greedy split of ``[t_0, t_end]`` into chunks whose integral of ``density`` is ``eta**q``.

    ``density`` holds ``||grad w(t_k)||^q`` at the sample times; it is treated
    as piecewise linear, so chunk boundaries fall between samples exactly.
    The chunk count is about ``(total / eta)**q``; more than ``max_chunks``
    raises :class:`TooManyChunksError` before any work is done.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    t = np.asarray(times, float)
    f = np.asarray(density, float)
    if len(t) < 1:
        raise ValueError("empty profile")
    budget = eta**q
    if len(t) > 1:
        expected = time_integral(t, f, t[0], t[-1]) / budget
        if expected > max_chunks:
            raise TooManyChunksError(f"eta = {eta} would give about {expected:.3g} chunks (limit {max_chunks})")
    end = float(t[-1])
    tol = 1e-12 * max(1.0, abs(end))
    cuts = [float(t[0])]
    acc = 0.0
    for k in range(len(t) - 1):
        t0, t1, f0, f1 = float(t[k]), float(t[k + 1]), float(f[k]), float(f[k + 1])
        seg = 0.5 * (f0 + f1) * (t1 - t0)
        start, f_start = t0, f0
        while acc + seg >= budget and seg > 0:
            s = _crossing(start, t1, f_start, f1, budget - acc)
            cut = min(start + s, t1)
            if cut >= end - tol:
                break
            cuts.append(cut)
            f_cut = f_start + (f1 - f_start) * (cut - start) / (t1 - start)
            seg -= budget - acc
            start, f_start, acc = cut, f_cut, 0.0
        acc += seg
    cuts.append(end)
    chunks = tuple(time_integral(t, f, a, b) ** (1.0 / q) for a, b in zip(cuts[:-1], cuts[1:]))
    total = time_integral(t, f, t[0], end) ** (1.0 / q) if len(t) > 1 else 0.0
    return Partition(eta, q, tuple(cuts), chunks, total)


def partition_by_x1(traj: Trajectory, eta: float, max_chunks: int = MAX_CHUNKS) -> Partition:
    """Split the trajectory's time range into chunks of Strichartz size ``eta``."""
    pair = X1_PAIRS[traj.grid.dim]
    q = float(pair.q)
    density = spatial_norms(traj, "grad", pair.r) ** q
    return partition_profile(traj.times, density, eta, q, max_chunks)


def free_trajectory(f0: ComplexField, times, spec: EquationSpec | None = None) -> Trajectory:
    """Exact free evolution ``exp(i (t - t_0) Lap) f0`` sampled at ``times``."""
    times = np.asarray(times, float)
    spec = spec or EquationSpec.energy_critical(f0.grid.dim)
    traj = Trajectory(spec, f0.grid)
    for t in times:
        traj.append(t, free_propagator(f0, t - times[0]))
    return traj


def homogeneous_ratio(v0: ComplexField, T: float = 1.0, n_samples: int = 201, pair=None) -> float:
    """``||grad exp(it Lap) v0||_{L_t^q L_x^r([0,T])} / ||v0||_{Hdot^1}`` for the X1 pair by default."""
    pair = X1_PAIRS[v0.grid.dim] if pair is None else pair
    traj = free_trajectory(v0, np.linspace(0.0, T, n_samples))
    return mixed_norm(traj, "grad", pair) / h1dot_norm(v0)
