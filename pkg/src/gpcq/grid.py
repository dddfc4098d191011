"""Periodic grids, spectral differential operators and quadrature norms.

The whole space is replaced by the box ``[-L/2, L/2)^n`` with periodic
boundary conditions.  All integrals are grid sums weighted by the cell
volume ``h**n``; derivatives are Fourier multipliers.

Transforms go through :mod:`scipy.fft`.  The number of worker threads can
be set with :func:`scipy.fft.set_workers`; it changes speed only, every
line transform and every reduction is evaluated in the same order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "ComplexField",
    "InvalidExponentError",
    "fft",
    "ifft",
    "lp_norm",
    "lp_norm_real",
    "spectral_gradient",
    "gradient_magnitude",
    "laplacian",
    "h1dot_norm",
    "free_propagator",
    "boundary_shell_max",
]


class InvalidExponentError(ValueError):
    """Lebesgue exponent below 1."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice with ``N`` points per axis on a box of side ``L``.

    Parameters
    ----------
    dim : int
        Spatial dimension, 3 or 4.
    n_points : int
        Points per axis; a power of two, at least 8.
    box_length : float
        Side length ``L`` of the periodic box.
    """

    dim: int
    n_points: int
    box_length: float

    def __post_init__(self):
        if self.dim not in (3, 4):
            raise ValueError(f"dim must be 3 or 4, got {self.dim}")
        n = self.n_points
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")
        object.__setattr__(self, "box_length", float(self.box_length))

    @property
    def spacing(self) -> float:
        # exact: n_points is a power of two
        return self.box_length / self.n_points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_points,) * self.dim

    @property
    def size(self) -> int:
        return self.n_points**self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        """Coordinates along one axis, starting at ``-L/2``."""
        return -0.5 * self.box_length + self.spacing * np.arange(self.n_points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers ``2*pi*m/L`` for ``m`` in ``[-N/2, N/2)``, FFT order."""
        return 2.0 * np.pi * sfft.fftfreq(self.n_points, d=self.spacing)

    def coords(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        return [self._along(j, self.axis) for j in range(self.dim)]

    def kvecs(self) -> list[np.ndarray]:
        return [self._along(j, self.wavenumbers) for j in range(self.dim)]

    @cached_property
    def k_squared(self) -> np.ndarray:
        k2 = np.zeros(self.shape)
        for kj in self.kvecs():
            k2 = k2 + kj**2
        k2.flags.writeable = False
        return k2

    def radius_squared(self, center=None) -> np.ndarray:
        center = np.zeros(self.dim) if center is None else np.asarray(center, float)
        if center.shape != (self.dim,):
            raise ValueError(f"center must have {self.dim} components")
        r2 = np.zeros(self.shape)
        for xj, cj in zip(self.coords(), center):
            r2 = r2 + (xj - cj) ** 2
        return r2

    def _along(self, j: int, vec: np.ndarray) -> np.ndarray:
        shape = [1] * self.dim
        shape[j] = self.n_points
        return vec.reshape(shape)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on a grid.  The value array is made read-only."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if vals is self.values and vals.flags.writeable:
            vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: Grid) -> "ComplexField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    def replace(self, values) -> "ComplexField":
        return ComplexField(self.grid, values)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    def __add__(self, other):
        return self.replace(self.values + _vals(other))

    def __sub__(self, other):
        return self.replace(self.values - _vals(other))

    def __mul__(self, c):
        return self.replace(self.values * _vals(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.replace(-self.values)


def _vals(x):
    return x.values if isinstance(x, ComplexField) else x


def fft(values: np.ndarray) -> np.ndarray:
    return sfft.fftn(values)


def ifft(values: np.ndarray) -> np.ndarray:
    return sfft.ifftn(values)


def lp_norm_real(mags: np.ndarray, grid: Grid, r: float) -> float:
    """Quadrature ``L^r`` norm of a nonnegative array of pointwise magnitudes."""
    r = float(r)
    if np.isinf(r) and r > 0:
        return float(np.max(mags)) if mags.size else 0.0
    if not r >= 1:
        raise InvalidExponentError(f"Lebesgue exponent must be >= 1 or inf, got {r}")
    mags = np.asarray(mags, dtype=float).ravel()
    peak = float(np.max(mags)) if mags.size else 0.0
    if peak == 0.0 or not np.isfinite(peak):
        return peak
    if r == 1:
        return float(grid.cell_volume * mags.sum())
    # scale by the peak so |f|^r neither underflows nor overflows
    scaled = mags / peak
    s = np.dot(scaled, scaled) if r == 2 else np.sum(scaled**r)
    return float(peak * (grid.cell_volume * s) ** (1.0 / r))


def lp_norm(f: ComplexField, r: float) -> float:
    """``(h^n sum |f|^r)^(1/r)``, or the grid maximum for ``r = inf``."""
    return lp_norm_real(np.abs(f.values), f.grid, r)


def spectral_gradient(f: ComplexField) -> tuple[ComplexField, ...]:
    fhat = fft(f.values)
    return tuple(f.replace(ifft(1j * kj * fhat)) for kj in f.grid.kvecs())


def gradient_magnitude(f: ComplexField) -> np.ndarray:
    """Pointwise Euclidean length ``|grad f|`` of the spectral gradient."""
    total = np.zeros(f.grid.shape)
    for comp in spectral_gradient(f):
        total += comp.values.real**2 + comp.values.imag**2
    return np.sqrt(total)


def laplacian(f: ComplexField) -> ComplexField:
    return f.replace(ifft(-f.grid.k_squared * fft(f.values)))


def h1dot_norm(f: ComplexField) -> float:
    """Homogeneous Sobolev seminorm via Parseval on the Fourier coefficients."""
    g = f.grid
    fhat = fft(f.values)
    s = np.sum(g.k_squared * (fhat.real**2 + fhat.imag**2))
    return float(np.sqrt(g.cell_volume * s / g.size))


def free_propagator(f: ComplexField, t: float) -> ComplexField:
    """Apply ``exp(i t Laplacian)``: multiply each mode by ``exp(-i |k|^2 t)``."""
    if t == 0:
        return f
    return f.replace(ifft(np.exp(-1j * t * f.grid.k_squared) * fft(f.values)))


def boundary_shell_max(f: ComplexField) -> float:
    """Largest ``|f|`` on grid points whose index is first or last along some axis."""
    a = np.abs(f.values)
    best = 0.0
    for j in range(f.grid.dim):
        best = max(best, float(np.take(a, 0, axis=j).max()), float(np.take(a, -1, axis=j).max()))
    return best
