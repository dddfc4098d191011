"""Run configuration, initial data and on-disk formats.

Config files are JSON::

    {
      "equation": {"type": "CQ3", "gamma": 0.5},
      "grid": {"n": 3, "N": 32, "L": 16.0},
      "stepping": {"dt": 1e-3, "T": 0.5, "snapshot_stride": 10, "dealias": false},
      "initial_data": {"kind": "gaussian", "amplitude": 0.5, "sigma": 2.0},
      "outputs": {"csv_path": "run.csv", "json_path": "run.json"},
      "seed": 0
    }

``equation.type`` is one of ``GP4``, ``CQ3`` (needs ``gamma``), ``EC``
(needs ``n``) or ``GENERAL_CQ`` (needs ``alpha1``, ``alpha3``, ``alpha5``).
A GENERAL_CQ run is reduced to CQ3 first; grid, time step and initial data
are then read in the reduced units.

Random Fourier data use ``numpy.random.Generator(numpy.random.Philox(seed))``.
Philox is a counter-based generator with a fixed specification, so a given
seed yields the same field on every platform.
"""
from __future__ import annotations

import json
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .equations import EquationSpec, GeneralCQParams, Reduction, reduce_general
from .grid import ComplexField, Grid, boundary_shell_max, ifft
from .integrator import Diagnostics, StepConfig, Trajectory

__all__ = [
    "ConfigError",
    "InitialData",
    "RunConfig",
    "parse_config",
    "load_config",
    "read_config_json",
    "generate_initial",
    "CSV_COLUMNS",
    "diagnostics_rows",
    "write_csv",
    "read_csv",
    "write_json",
    "save_trajectory",
    "load_trajectory",
    "BOUNDARY_THRESHOLD",
]

log = logging.getLogger(__name__)

# boundary-shell values above this are reported as torus-size warnings
BOUNDARY_THRESHOLD = 1e-3


class ConfigError(ValueError):
    """Malformed configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _get(d: dict, key: str, path: str, kind=None, default=...):
    full = f"{path}.{key}" if path else key
    if not isinstance(d, dict):
        raise ConfigError(path or "<root>", "expected an object")
    if key not in d:
        if default is ...:
            raise ConfigError(full, "missing")
        return default
    value = d[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(full, f"expected a finite number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(full, f"expected an integer, got {value!r}")
        return value
    if kind is bool and not isinstance(value, bool):
        raise ConfigError(full, f"expected true/false, got {value!r}")
    if kind is dict and not isinstance(value, dict):
        raise ConfigError(full, f"expected an object, got {value!r}")
    return value


def _complex(value, key: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(key, f"expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(key, f"expected a number or [re, im], got {value!r}")


@dataclass(frozen=True)
class InitialData:
    """Initial excitation: ``constant``, ``gaussian`` or ``random_fourier``.

    ``constant``: ``v = c``.
    ``gaussian``: ``v = A exp(-|x - x0|^2 / sigma^2)``, ``x0`` given as
    offsets from the box centre.
    ``random_fourier``: ``v = sum_k xi_k (1 + |k|^2)^(-s/2) e^{ik.x}`` over
    ``|k| <= cutoff`` with unit-variance complex Gaussian ``xi_k``; an
    optional ``amplitude`` rescales the result to that sup norm.
    """

    kind: str
    c: complex = 0j
    amplitude: complex | None = None
    sigma: float = 1.0
    center: tuple = ()
    seed: int | None = None
    decay_exponent: float = 0.0
    cutoff: float = math.inf

    @classmethod
    def constant(cls, c) -> "InitialData":
        return cls("constant", c=complex(c))

    @classmethod
    def gaussian(cls, amplitude, sigma: float, center=()) -> "InitialData":
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return cls("gaussian", amplitude=complex(amplitude), sigma=float(sigma), center=tuple(center))

    @classmethod
    def random_fourier(cls, seed: int, decay_exponent: float, cutoff: float = math.inf, amplitude=None) -> "InitialData":
        return cls(
            "random_fourier",
            seed=int(seed),
            decay_exponent=float(decay_exponent),
            cutoff=float(cutoff),
            amplitude=None if amplitude is None else complex(amplitude),
        )

    @classmethod
    def from_dict(cls, d: dict, *, default_seed: int = 0, path: str = "initial_data") -> "InitialData":
        kind = _get(d, "kind", path)
        if kind == "constant":
            return cls.constant(_complex(_get(d, "c", path), f"{path}.c"))
        if kind == "gaussian":
            amp = _complex(_get(d, "amplitude", path), f"{path}.amplitude")
            sigma = _get(d, "sigma", path, float)
            if not sigma > 0:
                raise ConfigError(f"{path}.sigma", f"must be positive, got {sigma}")
            center = _get(d, "center", path, default=[])
            if not isinstance(center, list) or not all(isinstance(x, (int, float)) for x in center):
                raise ConfigError(f"{path}.center", "expected a list of offsets")
            return cls.gaussian(amp, sigma, [float(x) for x in center])
        if kind == "random_fourier":
            seed = _get(d, "seed", path, int, default=default_seed)
            s = _get(d, "decay_exponent", path, float)
            cutoff = _get(d, "cutoff", path, float, default=math.inf)
            if not cutoff > 0:
                raise ConfigError(f"{path}.cutoff", f"must be positive, got {cutoff}")
            amp = d.get("amplitude")
            amp = None if amp is None else _complex(amp, f"{path}.amplitude")
            return cls.random_fourier(seed, s, cutoff, amp)
        raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}")


def generate_initial(data: InitialData, grid: Grid) -> ComplexField:
    """Sample the initial excitation on ``grid``.

    Gaussian and random data whose boundary shell exceeds
    :data:`BOUNDARY_THRESHOLD` are logged, since periodicity then matters.
    """
    if data.kind == "constant":
        return ComplexField(grid, np.full(grid.shape, data.c, dtype=complex))
    if data.kind == "gaussian":
        center = data.center or (0.0,) * grid.dim
        if len(center) != grid.dim:
            raise ValueError(f"center has {len(center)} entries for a {grid.dim}-D grid")
        r2 = grid.radius_squared(center)
        v = ComplexField(grid, data.amplitude * np.exp(-r2 / data.sigma**2))
    elif data.kind == "random_fourier":
        s = data.decay_exponent
        if not s > grid.dim / 2 + 1:
            raise ValueError(f"decay_exponent must exceed n/2 + 1 = {grid.dim / 2 + 1}, got {s}")
        rng = np.random.Generator(np.random.Philox(data.seed))
        xi = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) / math.sqrt(2.0)
        k2 = grid.k_squared
        coeff = xi * (1.0 + k2) ** (-0.5 * s)
        coeff[k2 > data.cutoff**2] = 0.0
        values = ifft(coeff) * grid.size
        if data.amplitude is not None:
            peak = np.max(np.abs(values))
            if peak > 0:
                values = values * (abs(data.amplitude) / peak)
        v = ComplexField(grid, values)
    else:
        raise ValueError(f"unknown initial data kind {data.kind!r}")
    shell = boundary_shell_max(v)
    if shell > BOUNDARY_THRESHOLD:
        log.warning("initial data reach %.3e on the boundary shell (threshold %.0e)", shell, BOUNDARY_THRESHOLD)
    return v


@dataclass(frozen=True)
class RunConfig:
    spec: EquationSpec
    grid: Grid
    stepping: StepConfig
    initial_data: InitialData
    csv_path: str | None = None
    json_path: str | None = None
    seed: int = 0
    reduction: Reduction | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def section(self, name: str):
        return self.raw.get(name)


def _parse_equation(d: dict) -> tuple[EquationSpec, Reduction | None]:
    path = "equation"
    kind = _get(d, "type", path)
    try:
        if kind == "GP4":
            return EquationSpec.gp4(), None
        if kind == "CQ3":
            gamma = _get(d, "gamma", path, float)
            if not 0 < gamma < 1:
                raise ConfigError(f"{path}.gamma", f"must lie in (0, 1), got {gamma}")
            return EquationSpec.cq3(gamma), None
        if kind == "EC":
            n = _get(d, "n", path, int)
            if n not in (3, 4):
                raise ConfigError(f"{path}.n", f"must be 3 or 4, got {n}")
            return EquationSpec.energy_critical(n), None
        if kind == "GENERAL_CQ":
            alphas = [_get(d, k, path, float) for k in ("alpha1", "alpha3", "alpha5")]
            red = reduce_general(GeneralCQParams(*alphas))
            return EquationSpec.cq3(r1_sq=red.r1_sq_reduced), red
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.type", f"unknown equation type {kind!r}")


def parse_config(raw: dict, *, seed: int | None = None) -> RunConfig:
    """Validate a config mapping; ``seed`` overrides the file's seed."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a JSON object")
    spec, red = _parse_equation(_get(raw, "equation", "", dict))

    g = _get(raw, "grid", "", dict)
    n = _get(g, "n", "grid", int)
    if n != spec.dim:
        raise ConfigError("grid.n", f"{spec.label()} needs n = {spec.dim}, got {n}")
    n_points, box = _get(g, "N", "grid", int), _get(g, "L", "grid", float)
    try:
        grid = Grid(n, n_points, box)
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from exc

    st = _get(raw, "stepping", "", dict)
    dt = _get(st, "dt", "stepping", float)
    T = _get(st, "T", "stepping", float)
    stride = _get(st, "snapshot_stride", "stepping", int, default=1)
    dealias = _get(st, "dealias", "stepping", bool, default=False)
    guard = _get(st, "guard", "stepping", float, default=1e6)
    if not dt > 0:
        raise ConfigError("stepping.dt", f"must be positive, got {dt}")
    if stride < 1:
        raise ConfigError("stepping.snapshot_stride", f"must be positive, got {stride}")
    try:
        stepping = StepConfig.from_horizon(dt, T, snapshot_stride=stride, dealias=dealias, guard=guard)
    except ValueError as exc:
        raise ConfigError("stepping.T", str(exc)) from exc

    file_seed = _get(raw, "seed", "", int, default=0)
    if not 0 <= file_seed < 2**64:
        raise ConfigError("seed", "must be an unsigned 64-bit integer")
    seed = file_seed if seed is None else seed
    initial = InitialData.from_dict(_get(raw, "initial_data", "", dict), default_seed=seed)
    if initial.kind == "gaussian" and initial.center and len(initial.center) != n:
        raise ConfigError("initial_data.center", f"needs {n} entries, got {len(initial.center)}")
    if initial.kind == "random_fourier" and not initial.decay_exponent > n / 2 + 1:
        raise ConfigError("initial_data.decay_exponent", f"must exceed n/2 + 1 = {n / 2 + 1}")

    out = _get(raw, "outputs", "", dict, default={})
    return RunConfig(
        spec=spec,
        grid=grid,
        stepping=stepping,
        initial_data=initial,
        csv_path=_get(out, "csv_path", "outputs", default=None),
        json_path=_get(out, "json_path", "outputs", default=None),
        seed=seed,
        reduction=red,
        raw=raw,
    )


def read_config_json(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError("--config", f"no such file {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a JSON object")
    return raw


def load_config(path, *, seed: int | None = None) -> RunConfig:
    return parse_config(read_config_json(path), seed=seed)


CSV_COLUMNS = ("t", "E", "reL2sq", "M", "C0", "h1dot", "l2", "l4", "l6", "linf", "boundary_shell_max")


def _row(t: float, d: Diagnostics) -> tuple:
    r = d.report
    return (t, r.energy, r.re_l2_sq, r.m_value, r.c0, d.h1dot, d.l2, d.l4, d.l6, d.linf, d.boundary_shell_max)


def diagnostics_rows(traj: Trajectory) -> list[tuple]:
    return [_row(t, d) for t, d in zip(traj.timestamps, traj.diagnostics)]


def write_csv(path, traj: Trajectory) -> None:
    """Diagnostics table, 17 significant digits so values round-trip exactly."""
    lines = [",".join(CSV_COLUMNS)]
    for row in diagnostics_rows(traj):
        lines.append(",".join(format(float(x), ".17g") for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> dict[str, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, j] for j, name in enumerate(CSV_COLUMNS)}


def _jsonable(x: Any):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


_MAGIC = b"GPCQTRJ1"
_SNAP = struct.Struct("<4sIIdd")


def save_trajectory(path, traj: Trajectory) -> None:
    """Binary trajectory file.

    Layout: ``GPCQTRJ1``, a little-endian uint32 header length, a UTF-8 JSON
    header (equation and grid), then per snapshot a ``<4sIIdd`` record
    ``(b"SNAP", dim, N, L, t)`` followed by ``N**dim`` little-endian
    complex128 values in C order.
    """
    g = traj.grid
    header = json.dumps(
        {
            "variant": traj.spec.variant,
            "dim": traj.spec.dim,
            "r1_sq": traj.spec.r1_sq,
            "grid": [g.dim, g.n_points, g.box_length],
            "count": len(traj),
        },
        sort_keys=True,
    ).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        for t, snap in zip(traj.timestamps, traj.snapshots):
            fh.write(_SNAP.pack(b"SNAP", g.dim, g.n_points, g.box_length, t))
            fh.write(np.ascontiguousarray(snap.values, dtype="<c16").tobytes())


def load_trajectory(path) -> Trajectory:
    """Inverse of :func:`save_trajectory`; diagnostics are not stored and come back empty."""
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path} is not a trajectory file")
    (hlen,) = struct.unpack_from("<I", raw, 8)
    header = json.loads(raw[12 : 12 + hlen])
    dim, n_points, box = header["grid"]
    grid = Grid(dim, n_points, box)
    spec = EquationSpec(header["variant"], header["dim"], header["r1_sq"])
    traj = Trajectory(spec, grid)
    pos = 12 + hlen
    nbytes = grid.size * 16
    for _ in range(header["count"]):
        tag, d, n, length, t = _SNAP.unpack_from(raw, pos)
        if tag != b"SNAP" or (d, n, length) != (dim, n_points, box):
            raise ValueError(f"corrupt snapshot record at byte {pos}")
        pos += _SNAP.size
        values = np.frombuffer(raw, dtype="<c16", count=grid.size, offset=pos).reshape(grid.shape)
        pos += nbytes
        traj.append(t, ComplexField(grid, values.astype(complex)))
    return traj
