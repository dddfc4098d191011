"""Randomized property suites behind ``gpcq verify``.

Each suite returns ``{"suite", "samples", "violations", "worst_slack"}``.
``worst_slack`` is the smallest margin seen, normalized so that a negative
value means a violation.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .energy import coercivity_pointwise
from .equations import EquationSpec, cq_nonlinearity, nonlinearity
from .strichartz import ADMISSIBLE_PAIRS, INF, is_admissible

__all__ = ["SUITES", "run_suite", "identity_suite", "coercivity_suite", "strichartz_suite", "factored_oracle"]

IDENTITY_RTOL = 1e-12


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def factored_oracle(z, gamma=None):
    """Factored forms evaluated in extended precision, independent of the expansions.

    ``gamma=None`` gives the GP form ``(|1+z|^2 - 1)(1+z)``; otherwise
    ``(|1+z|^2 - 1)(|1+z|^2 - (1 - gamma))(1+z)``.
    """
    z = np.asarray(z, dtype=complex)
    x = 1 + z.real.astype(np.longdouble)
    y = z.imag.astype(np.longdouble)
    s = x * x + y * y
    f = s - 1
    if gamma is not None:
        f = f * (s - (1 - np.asarray(gamma, dtype=np.longdouble)))
    return (f * x).astype(float) + 1j * (f * y).astype(float)


def _relative_error(got, want):
    scale = np.abs(want)
    err = np.abs(got - want)
    return np.where(scale > 0, err / np.where(scale > 0, scale, 1.0), err)


def identity_suite(samples: int, seed: int = 0) -> dict:
    """Expanded CQ and GP nonlinearities against their factored forms, ``|z| <= 100``."""
    rng = _rng(seed)
    r = 100.0 * rng.random(samples)
    theta = 2 * np.pi * rng.random(samples)
    gamma = rng.random(samples)
    z = r * np.exp(1j * theta)

    cq = cq_nonlinearity(z, gamma)
    gp = nonlinearity(EquationSpec.gp4(), z)
    err = np.maximum(_relative_error(cq, factored_oracle(z, gamma)), _relative_error(gp, factored_oracle(z)))
    return {
        "suite": "identities",
        "samples": samples,
        "violations": int(np.count_nonzero(err > IDENTITY_RTOL)),
        "worst_slack": float(IDENTITY_RTOL - err.max()) if samples else IDENTITY_RTOL,
        "max_relative_error": float(err.max()) if samples else 0.0,
    }


def coercivity_samples(samples: int, seed: int = 0, max_modulus: float = 1e3):
    """Log-uniform moduli in ``[1e-6, max_modulus]``, uniform phase and ``gamma`` in (0, 1)."""
    rng = _rng(seed)
    r = np.exp(rng.uniform(np.log(1e-6), np.log(max_modulus), samples))
    theta = 2 * np.pi * rng.random(samples)
    gamma = rng.uniform(np.nextafter(0.0, 1.0), 1.0, samples)
    return r * np.exp(1j * theta), gamma


def coercivity_suite(samples: int, seed: int = 0) -> dict:
    """Both pointwise bounds of the modified-energy coercivity argument."""
    z, gamma = coercivity_samples(samples, seed)
    res = coercivity_pointwise(z, gamma)
    bad = ~(res.ineq42_holds & res.ineq43_holds)
    m2 = np.abs(z) ** 2
    # slack relative to the size of the left-hand sides
    s42 = res.slack42 / np.maximum(gamma * m2 * m2, np.finfo(float).tiny)
    s43 = res.slack43 / np.maximum(m2**3, np.finfo(float).tiny)
    worst = float(min(s42.min(), s43.min())) if samples else 0.0
    return {"suite": "coercivity", "samples": samples, "violations": int(bad.sum()), "worst_slack": worst}


def _perturbations(q, r):
    step = Fraction(1, 100)
    out = []
    for dq, dr in ((step, 0), (-step, 0), (0, step), (0, -step)):
        if (q == INF and dq) or (r == INF and dr):
            continue
        out.append((q + dq, r + dr))
    return out


def strichartz_suite(samples: int = 0, seed: int = 0) -> dict:
    """Listed pairs are admissible, 1/100 perturbations are not, ``(2, inf, 2)`` is excluded.

    ``samples`` extra random rational pairs are checked against the scaling
    relation computed independently from floats.
    """
    checks = []
    for n, pairs in ADMISSIBLE_PAIRS.items():
        for p in pairs:
            checks.append(is_admissible(p.q, p.r, n))
            for q, r in _perturbations(p.q, p.r):
                checks.append(not is_admissible(q, r, n))
    checks.append(not is_admissible(2, INF, 2))
    rng = _rng(seed)
    for _ in range(samples):
        n = int(rng.integers(3, 5))
        q = Fraction(int(rng.integers(2, 60)), int(rng.integers(1, 6)))
        if q < 2:
            q = Fraction(2)
        # 1/r from the scaling relation, sometimes nudged off it
        inv_r = (Fraction(n, 2) - 2 / q) / n
        nudge = Fraction(int(rng.integers(-1, 2)), 97)
        inv_r += nudge
        if inv_r <= 0 or inv_r > Fraction(1, 2):
            continue
        expect = abs(2 / float(q) + n * float(inv_r) - n / 2) < 1e-12
        checks.append(is_admissible(q, 1 / inv_r, n) == expect)
    checks = np.asarray(checks)
    violations = int((~checks).sum())
    return {
        "suite": "strichartz",
        "samples": samples,
        "checks": len(checks),
        "violations": violations,
        "worst_slack": 0.0 if not violations else -1.0,
    }


SUITES = {"identities": identity_suite, "coercivity": coercivity_suite, "strichartz": strichartz_suite}


def run_suite(name: str, samples: int, seed: int = 0) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](samples, seed)
