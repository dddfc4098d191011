"""Energy functionals, the modified energy and the coercivity bounds.

Cubic-quintic constants
-----------------------
Write ``q = |v|^2 + 2 Re v``, ``a = Re v`` and ``rho = |v|``.  The pointwise
bounds

    gamma rho^4 <= 2 gamma q^2 + 8 gamma a^2
    rho^6       <= 8 q^3 + 144 a^2

together with ``48 E = 24 int|grad v|^2 + 12 gamma int q^2 + 8 int q^3`` give

    int|grad v|^2 + int rho^6 + gamma int rho^4 <= 48 (E + C0 int a^2)

with ``C0 = (144 + 8 gamma) / 48 = 3 + gamma/6``.  The same computation
leaves a spare ``10 gamma int q^2`` on the right, and since
``4 a^2 = (q - rho^2)^2 <= 2 q^2 + 2 rho^4`` this also yields
``int a^2 <= 24 M / gamma``.

Gronwall rate.  Along the flow ``dM/dt = C0 (I + II)`` with
``I = -2 int a Im(Lap v)`` and ``II = 2 int a Im(|v|^4 v + R(v))``.
Parseval gives ``|I| <= int|grad v|^2``.  Pointwise, with ``b = Im v``,

    |2ab rho^4|        <= rho^6
    |8 a^2 b rho^2|    <= 2 a^2 + 6 rho^6
    |2 gamma ab rho^2| <= gamma a^2 + gamma rho^6
    |8 a^3 b|          <= 4 a^2 + 4 rho^6
    |4 gamma a^2 b|    <= 2 gamma a^2 + 2 gamma rho^4

using ``|a|, |b| <= rho`` and weighted AM-GM.  Hence

    |I + II| <= (11 + gamma)(int|grad v|^2 + int rho^6 + gamma int rho^4)
                + (6 + 3 gamma) int a^2
             <= [48 (11 + gamma) + 24 (6 + 3 gamma) / gamma] M

so ``dM/dt <= C1 M`` with ``C1 = C0 [48 (11 + gamma) + 24 (6 + 3 gamma) / gamma]``.

GP analog
---------
For the Gross-Pitaevskii energy ``rho^4 <= 2 q^2 + 8 a^2`` gives
``int|grad v|^2 + int rho^4 <= 8 (E + int a^2)``, i.e. ``K = 8``, ``C0 = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equations import EquationSpec, density, nonlinearity
from .grid import ComplexField, h1dot_norm, laplacian, lp_norm

__all__ = [
    "COERCIVITY_K",
    "GP_COERCIVITY_K",
    "GP_C0",
    "EnergyReport",
    "PointwiseCoercivity",
    "IntegratedCoercivity",
    "energy_gl",
    "energy_excitation",
    "coercivity_constant",
    "gronwall_rate",
    "gronwall_bound",
    "coercivity_pointwise",
    "coercivity_integrated",
    "m_functional",
    "energy_report",
    "mass_identity_rhs",
    "energy_space_norm",
    "re_l2_sq",
]

COERCIVITY_K = 48.0
GP_COERCIVITY_K = 8.0
GP_C0 = 1.0

_ULP = np.finfo(float).eps


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    re_l2_sq: float
    m_value: float
    c0: float


def _integral(grid, arr) -> float:
    return float(grid.cell_volume * np.sum(arr))


def _grad_sq(f: ComplexField) -> float:
    return h1dot_norm(f) ** 2


def re_l2_sq(v: ComplexField) -> float:
    """``int |Re v|^2``."""
    return _integral(v.grid, v.real**2)


def energy_gl(u: ComplexField, gamma: float | None = None) -> float:
    """Ginzburg-Landau energy of the full field ``u``.

    ``gamma=None`` selects the GP form ``1/2 int|grad u|^2 + 1/4 int(|u|^2-1)^2``;
    a number selects the cubic-quintic Hamiltonian with that ``gamma``.
    """
    g = u.grid
    s = u.real**2 + u.imag**2 - 1.0
    e = 0.5 * _grad_sq(u)
    if gamma is None:
        return e + 0.25 * _integral(g, s * s)
    return e + 0.25 * gamma * _integral(g, s * s) + _integral(g, s**3) / 6.0


def energy_excitation(v: ComplexField, spec: EquationSpec) -> float:
    """Hamiltonian written in the excitation ``v``.

    For EC specs this is the energy-critical energy
    ``1/2 int|grad w|^2 + (n-2)/(2n) int|w|^(2n/(n-2))``.
    """
    g = v.grid
    if spec.variant == "EC":
        p = 2.0 * spec.dim / (spec.dim - 2)
        return 0.5 * _grad_sq(v) + (spec.dim - 2) / (2.0 * spec.dim) * lp_norm(v, p) ** p
    q = density(v.values)
    e = 0.5 * _grad_sq(v)
    if spec.variant == "GP4":
        return e + 0.25 * _integral(g, q * q)
    return e + 0.25 * spec.gamma * _integral(g, q * q) + _integral(g, q**3) / 6.0


def _check_gamma(gamma):
    if not np.all((np.asarray(gamma) > 0.0) & (np.asarray(gamma) <= 1.0)):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")


def coercivity_constant(gamma: float) -> float:
    """``C0 = 3 + gamma/6``."""
    _check_gamma(gamma)
    return 3.0 + gamma / 6.0


def gronwall_rate(gamma: float) -> float:
    """Explicit ``C1`` with ``dM/dt <= C1 M`` (derivation in the module docstring)."""
    _check_gamma(gamma)
    return coercivity_constant(gamma) * (48.0 * (11.0 + gamma) + 24.0 * (6.0 + 3.0 * gamma) / gamma)


def gronwall_bound(m0: float, gamma: float, t: float) -> float:
    return m0 * np.exp(gronwall_rate(gamma) * t)


@dataclass(frozen=True)
class PointwiseCoercivity:
    ineq42_holds: np.ndarray
    ineq43_holds: np.ndarray
    slack42: np.ndarray
    slack43: np.ndarray


def coercivity_pointwise(z, gamma: float) -> PointwiseCoercivity:
    """Evaluate both pointwise bounds directly (LHS and RHS separately).

    Each bound is an equality on a curve (e.g. ``|z|^2 = -4 Re z`` for the
    quartic one), so ``holds`` allows a few ulps of the operand magnitude
    for rounding.
    """
    _check_gamma(gamma)
    z = np.asarray(z, dtype=complex)
    a = z.real
    m2 = z.real**2 + z.imag**2
    q = density(z)
    lhs42 = gamma * m2 * m2
    rhs42 = 2.0 * gamma * q * q + 8.0 * gamma * a * a
    lhs43 = m2**3
    rhs43 = 8.0 * q**3 + 144.0 * a * a
    tol42 = 16 * _ULP * (lhs42 + 2.0 * gamma * q * q + 8.0 * gamma * a * a)
    tol43 = 16 * _ULP * (lhs43 + 8.0 * np.abs(q) ** 3 + 144.0 * a * a)
    return PointwiseCoercivity(
        ineq42_holds=lhs42 <= rhs42 + tol42,
        ineq43_holds=lhs43 <= rhs43 + tol43,
        slack42=rhs42 - lhs42,
        slack43=rhs43 - lhs43,
    )


@dataclass(frozen=True)
class IntegratedCoercivity:
    lhs: float
    rhs: float
    holds: bool


def coercivity_integrated(v: ComplexField, gamma: float) -> IntegratedCoercivity:
    spec = EquationSpec.cq3(gamma)
    lhs = _grad_sq(v) + lp_norm(v, 6) ** 6 + gamma * lp_norm(v, 4) ** 4
    rhs = COERCIVITY_K * (energy_excitation(v, spec) + coercivity_constant(gamma) * re_l2_sq(v))
    return IntegratedCoercivity(lhs, rhs, bool(lhs <= rhs + 1e-9 * abs(rhs)))


def m_functional(v: ComplexField, gamma: float) -> EnergyReport:
    """Modified energy ``M = E + C0 int|Re v|^2`` for the cubic-quintic model."""
    c0 = coercivity_constant(gamma)
    e = energy_excitation(v, EquationSpec.cq3(gamma))
    r = re_l2_sq(v)
    return EnergyReport(energy=e, re_l2_sq=r, m_value=e + c0 * r, c0=c0)


def energy_report(v: ComplexField, spec: EquationSpec) -> EnergyReport:
    """EnergyReport for any variant (GP4 uses ``C0 = 1``, EC uses ``C0 = 0``)."""
    if spec.variant == "CQ3":
        return m_functional(v, spec.gamma)
    c0 = GP_C0 if spec.variant == "GP4" else 0.0
    e = energy_excitation(v, spec)
    r = re_l2_sq(v)
    return EnergyReport(energy=e, re_l2_sq=r, m_value=e + c0 * r, c0=c0)


def mass_identity_rhs(v: ComplexField, spec: EquationSpec) -> float:
    """``d/dt int|Re v|^2 = -2 int Re v Im(Lap v) + 2 int Re v Im N(v)``."""
    a = v.real
    # Im(Lap v) = Lap(Im v); the real-field path keeps real data exactly real
    lin = -2.0 * _integral(v.grid, a * laplacian(v.replace(v.imag)).real)
    nl = 2.0 * _integral(v.grid, a * np.imag(nonlinearity(spec, v.values)))
    return lin + nl


def energy_space_norm(v: ComplexField, space: str) -> float:
    """``||Re v||_{H^1} + ||Im v||_{Hdot^1}`` plus ``||v||_{L^4}`` for ``space="CQ3"``."""
    if space not in ("GP4", "CQ3"):
        raise ValueError(f"space must be 'GP4' or 'CQ3', got {space!r}")
    re = v.replace(v.real)
    im = v.replace(v.imag)
    total = np.sqrt(lp_norm(re, 2) ** 2 + h1dot_norm(re) ** 2) + h1dot_norm(im)
    if space == "CQ3":
        total += lp_norm(v, 4)
    return float(total)

