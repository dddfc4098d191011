"""Nonlinearities of the three evolution laws in the excitation variable.

For the Gross-Pitaevskii (GP4) and cubic-quintic (CQ3) models the field is
the excitation ``v = u - 1`` around the unit background; the energy-critical
comparison equation (EC) acts on ``w`` directly.  Every function here is
pointwise and accepts scalars or arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import ComplexField

__all__ = [
    "EquationSpec",
    "GeneralCQParams",
    "Reduction",
    "NoRealRootsError",
    "InvalidParametersError",
    "nonlinearity",
    "remainder_R",
    "cq_nonlinearity",
    "phase_rate",
    "density",
    "general_rhs",
    "reduced_rhs",
    "reduce_general",
    "gauge_reduce",
]

Variant = Literal["GP4", "CQ3", "EC"]


class NoRealRootsError(ValueError):
    """The quadratic ``alpha1 - alpha3 s + alpha5 s^2`` has no two distinct real roots."""


class InvalidParametersError(ValueError):
    pass


@dataclass(frozen=True)
class EquationSpec:
    """Which evolution law a field obeys.

    Use the constructors :meth:`gp4`, :meth:`cq3` and :meth:`energy_critical`
    rather than filling the fields by hand.
    """

    variant: Variant
    dim: int
    r1_sq: float | None = None

    def __post_init__(self):
        if self.variant == "GP4" and self.dim != 4:
            raise ValueError("GP4 lives in dimension 4")
        if self.variant == "CQ3":
            if self.dim != 3:
                raise ValueError("CQ3 lives in dimension 3")
            if self.r1_sq is None or not 0.0 < self.r1_sq < 1.0:
                raise ValueError(f"CQ3 needs r1_sq in (0, 1), got {self.r1_sq}")
        elif self.r1_sq is not None:
            raise ValueError(f"r1_sq only applies to CQ3, not {self.variant}")
        if self.variant == "EC" and self.dim not in (3, 4):
            raise ValueError(f"energy-critical comparison is set up for n = 3, 4, got {self.dim}")
        if self.variant not in ("GP4", "CQ3", "EC"):
            raise ValueError(f"unknown variant {self.variant!r}")

    @classmethod
    def gp4(cls) -> "EquationSpec":
        return cls("GP4", 4)

    @classmethod
    def cq3(cls, gamma: float | None = None, *, r1_sq: float | None = None) -> "EquationSpec":
        if (gamma is None) == (r1_sq is None):
            raise ValueError("give exactly one of gamma, r1_sq")
        if r1_sq is None:
            if not 0.0 < gamma < 1.0:
                raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
            r1_sq = 1.0 - gamma
        return cls("CQ3", 3, float(r1_sq))

    @classmethod
    def energy_critical(cls, n: int) -> "EquationSpec":
        return cls("EC", n)

    @property
    def gamma(self) -> float | None:
        return None if self.r1_sq is None else 1.0 - self.r1_sq

    @property
    def critical_exponent(self) -> float:
        """Power ``p`` of the critical term ``|z|^p z``: 2 for n = 4, 4 for n = 3."""
        return 4.0 / (self.dim - 2)

    def label(self) -> str:
        if self.variant == "CQ3":
            return f"CQ3(gamma={self.gamma!r})"
        if self.variant == "EC":
            return f"EC(n={self.dim})"
        return "GP4"


def density(z):
    """``|z|^2 + 2 Re z``, which equals ``|1+z|^2 - 1`` without cancellation."""
    z = np.asarray(z)
    return z.real * z.real + z.imag * z.imag + 2.0 * z.real


# Near the zero set of q (q + gamma) the nine terms cancel to a tiny result,
# so the polynomials are summed in extended precision and rounded once.
_EXT = np.longdouble


def _parts(z):
    z = np.asarray(z, dtype=complex)
    return z.real.astype(_EXT), z.imag.astype(_EXT)


def _pack(re, im):
    return (re.astype(float) + 1j * im.astype(float))[()]


def _remainder_parts(x, y, gamma):
    g = np.asarray(gamma).astype(_EXT)
    a = x
    m2 = x * x + y * y
    # terms carrying a factor z contribute (x, y); real terms only x
    zc = 4 * m2 * a + g * m2 + 4 * a * a + 2 * g * a
    re = m2 * m2 + 4 * m2 * a + g * m2 + 4 * a * a + 2 * g * a + x * zc
    return re, y * zc


def remainder_R(z, gamma):
    """Cubic-quintic remainder, summed term by term (nine terms)."""
    return _pack(*_remainder_parts(*_parts(z), gamma))


def cq_nonlinearity(z, gamma):
    """``|z|^4 z + R(z)``; unlike ``nonlinearity`` it accepts an array of ``gamma``."""
    x, y = _parts(z)
    re, im = _remainder_parts(x, y, gamma)
    m4 = (x * x + y * y) ** 2
    return _pack(m4 * x + re, m4 * y + im)


def nonlinearity(spec: EquationSpec, z):
    """Right-hand side ``N(z)`` of ``i z_t + Laplacian z = N(z)``."""
    if spec.variant == "EC":
        z = np.asarray(z, dtype=complex)
        return _critical_power(z.real**2 + z.imag**2, spec.dim) * z
    if spec.variant == "CQ3":
        return cq_nonlinearity(z, spec.gamma)
    x, y = _parts(z)
    # |z|^2 z + 2 Re(z) z + |z|^2 + 2 Re(z)
    m2 = x * x + y * y
    zc = m2 + 2 * x
    return _pack(x * zc + m2 + 2 * x, y * zc)


def phase_rate(spec: EquationSpec, z):
    """Real rate ``F`` with ``N(z) = F * (1 + z)`` (GP4, CQ3) or ``N(w) = F * w`` (EC).

    ``F`` depends only on the modulus of the full field, so the flow of
    ``i u_t = F u`` is a pointwise phase rotation.
    """
    if spec.variant == "EC":
        z = np.asarray(z)
        return _critical_power(z.real**2 + z.imag**2, spec.dim)
    q = density(z)
    if spec.variant == "GP4":
        return q
    return q * (q + spec.gamma)


def _critical_power(m2, dim):
    # |w|^(4/(n-2)) written in |w|^2 to avoid a sqrt
    return m2 if dim == 4 else m2 * m2


@dataclass(frozen=True)
class GeneralCQParams:
    """Coefficients of ``i u_t + Lap u = a1 u - a3 |u|^2 u + a5 |u|^4 u``."""

    alpha1: float
    alpha3: float
    alpha5: float

    def __post_init__(self):
        for name in ("alpha1", "alpha3", "alpha5"):
            if not getattr(self, name) > 0:
                raise InvalidParametersError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def discriminant(self) -> float:
        return self.alpha3**2 - 4.0 * self.alpha1 * self.alpha5


@dataclass(frozen=True)
class Reduction:
    r0_sq: float
    r1_sq: float
    r1_sq_reduced: float
    amplitude_scale: float
    time_scale: float
    space_scale: float

    @property
    def gamma(self) -> float:
        return 1.0 - self.r1_sq_reduced


def general_rhs(p: GeneralCQParams, u):
    u = np.asarray(u, dtype=complex)
    m2 = u.real**2 + u.imag**2
    return p.alpha1 * u - p.alpha3 * m2 * u + p.alpha5 * m2**2 * u


def reduced_rhs(r1_sq: float, u):
    u = np.asarray(u, dtype=complex)
    m2 = u.real**2 + u.imag**2
    return (m2 - 1.0) * (m2 - r1_sq) * u


def reduce_general(p: GeneralCQParams) -> Reduction:
    """Rescale the general cubic-quintic model to unit background.

    With ``A = r0``, ``tau = alpha5 * r0^4`` and ``sigma = sqrt(tau)``, the
    substitution ``u(t, x) = A U(tau t, sigma x)`` turns the general equation
    into ``i U_t + Lap U = (|U|^2 - 1)(|U|^2 - r1^2/r0^2) U``.
    """
    disc = p.discriminant
    if not disc > 0:
        raise NoRealRootsError(f"discriminant nonpositive: {disc!r}")
    sq = math.sqrt(disc)
    # stable quadratic roots of alpha5 s^2 - alpha3 s + alpha1
    big = (p.alpha3 + sq) / (2.0 * p.alpha5)
    small = p.alpha1 / (p.alpha5 * big)
    if not (big > 0 and small > 0):
        raise InvalidParametersError(f"roots must be positive, got {big}, {small}")
    tau = p.alpha5 * big * big
    return Reduction(
        r0_sq=big,
        r1_sq=small,
        r1_sq_reduced=small / big,
        amplitude_scale=math.sqrt(big),
        time_scale=tau,
        space_scale=math.sqrt(tau),
    )


def gauge_reduce(u: ComplexField, alpha: complex) -> ComplexField:
    """Rotate the background phase ``alpha`` to 1 and return ``conj(alpha) u - 1``."""
    if abs(abs(alpha) - 1.0) > 1e-12:
        raise ValueError(f"alpha must lie on the unit circle, |alpha| = {abs(alpha)!r}")
    return u.replace(np.conj(alpha) * u.values - 1.0)
