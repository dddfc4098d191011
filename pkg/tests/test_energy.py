from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpcq.energy import (
    COERCIVITY_K,
    coercivity_constant,
    coercivity_integrated,
    coercivity_pointwise,
    energy_excitation,
    energy_gl,
    energy_report,
    energy_space_norm,
    gronwall_rate,
    m_functional,
    mass_identity_rhs,
    re_l2_sq,
)
from gpcq.equations import EquationSpec, nonlinearity
from gpcq.grid import ComplexField, Grid, h1dot_norm, lp_norm
from gpcq.verification import coercivity_suite

from conftest import random_field

G3 = Grid(3, 16, 8.0)
G4 = Grid(4, 8, 8.0)


def const(grid, c):
    return ComplexField(grid, np.full(grid.shape, complex(c)))


class TestGinzburgLandau:
    def test_ground_state(self):
        assert energy_gl(const(G3, 1.0)) == 0
        assert energy_gl(const(G3, 1.0), 0.5) == 0

    def test_zero_field(self):
        assert energy_gl(const(G4, 0.0)) == pytest.approx(G4.volume / 4, rel=1e-14)
        gamma = 0.3
        assert energy_gl(const(G3, 0.0), gamma) == pytest.approx(G3.volume * (gamma / 4 - 1 / 6), rel=1e-14)


class TestExcitationEnergy:
    def test_vacuum(self):
        assert energy_excitation(const(G4, 0), EquationSpec.gp4()) == 0

    def test_imaginary_constant(self):
        s = 0.7
        assert energy_excitation(const(G4, 1j * s), EquationSpec.gp4()) == pytest.approx(G4.volume * s**4 / 4, rel=1e-13)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_u_form(self, seed):
        v4 = random_field(G4, seed)
        assert energy_excitation(v4, EquationSpec.gp4()) == pytest.approx(energy_gl(v4 + 1.0), rel=1e-10)
        v3 = random_field(G3, seed)
        spec = EquationSpec.cq3(0.4)
        assert energy_excitation(v3, spec) == pytest.approx(energy_gl(v3 + 1.0, spec.gamma), rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32), amp=st.floats(0.01, 3.0))
    def test_gp_energy_nonnegative(self, seed, amp):
        v = random_field(G4, seed, amplitude=amp)
        assert energy_excitation(v, EquationSpec.gp4()) >= -1e-12 * G4.volume


class TestConstants:
    @pytest.mark.parametrize("gamma,want", [(0.5, Fraction(37, 12)), (1.0, Fraction(19, 6)), (1e-12, Fraction(3))])
    def test_c0(self, gamma, want):
        assert coercivity_constant(gamma) == pytest.approx(float(want), rel=1e-12)

    def test_c0_budget(self):
        for gamma in (0.1, 0.5, 0.9):
            assert coercivity_constant(gamma) * COERCIVITY_K == pytest.approx(144 + 8 * gamma, rel=1e-15)

    @pytest.mark.parametrize("gamma", [0.0, -0.1, 1.5])
    def test_out_of_range(self, gamma):
        with pytest.raises(ValueError):
            coercivity_constant(gamma)

    def test_gronwall_rate_value(self):
        # C0 (48 (11 + g) + 24 (6 + 3 g) / g) at g = 1/2
        assert gronwall_rate(0.5) == pytest.approx(37 / 12 * (48 * 11.5 + 24 * 7.5 / 0.5), rel=1e-14)


class TestPointwiseCoercivity:
    def test_imaginary_axis(self):
        y = 1.7
        res = coercivity_pointwise(1j * y, 0.5)
        assert res.ineq43_holds and res.slack43 == pytest.approx(7 * y**6, rel=1e-13)

    def test_minus_two(self):
        res = coercivity_pointwise(-2.0 + 0j, 0.5)
        assert res.ineq43_holds and res.slack43 == pytest.approx(512.0, rel=1e-15)

    def test_equality_curve(self):
        # |z|^2 = -4 Re z makes the quartic bound tight
        theta = np.linspace(0.6 * np.pi, 1.4 * np.pi, 1001)
        r = -4 * np.cos(theta)
        res = coercivity_pointwise(r * np.exp(1j * theta), 0.7)
        assert res.ineq42_holds.all()

    @settings(max_examples=300, deadline=None)
    @given(
        r=st.floats(0, 1e3),
        theta=st.floats(0, 2 * np.pi),
        gamma=st.floats(1e-9, 1.0, exclude_min=True),
    )
    def test_both_hold(self, r, theta, gamma):
        res = coercivity_pointwise(r * np.exp(1j * theta), gamma)
        assert res.ineq42_holds and res.ineq43_holds

    def test_bulk_sampling(self):
        out = coercivity_suite(200_000, seed=5)
        assert out["violations"] == 0


class TestIntegratedCoercivity:
    def test_zero(self):
        res = coercivity_integrated(const(G3, 0), 0.5)
        assert res.lhs == 0 and res.rhs == 0 and res.holds

    def test_imaginary_constant(self):
        y, gamma = 0.9, 0.3
        res = coercivity_integrated(const(G3, 1j * y), gamma)
        V = G3.volume
        assert res.lhs == pytest.approx((y**6 + gamma * y**4) * V, rel=1e-12)
        assert res.rhs == pytest.approx(48 * (gamma / 4 * y**4 + y**6 / 6) * V, rel=1e-12)
        assert res.holds

    @pytest.mark.parametrize("seed", range(8))
    def test_random_and_negative_real_fields(self, seed):
        v = random_field(G3, seed, amplitude=1.5)
        assert coercivity_integrated(v, 0.5).holds
        dip = v.replace(v.values.imag * 1j - 1.8 * np.exp(-G3.radius_squared() / 4))
        assert coercivity_integrated(dip, 0.5).holds


class TestModifiedEnergy:
    def test_zero(self):
        rep = m_functional(const(G3, 0), 0.5)
        assert rep.energy == rep.re_l2_sq == rep.m_value == 0 and rep.c0 == coercivity_constant(0.5)

    def test_real_constant(self):
        c, gamma = 0.4, 0.6
        rep = m_functional(const(G3, c), gamma)
        q = c * c + 2 * c
        assert rep.energy == pytest.approx((gamma / 4 * q**2 + q**3 / 6) * G3.volume, rel=1e-13)
        assert rep.re_l2_sq == pytest.approx(c * c * G3.volume, rel=1e-13)

    def test_consistency(self):
        rep = m_functional(random_field(G3, 2), 0.5)
        assert rep.m_value == rep.energy + rep.c0 * rep.re_l2_sq

    def test_report_constants(self):
        v = random_field(G4, 1)
        assert energy_report(v, EquationSpec.gp4()).c0 == 1.0
        assert energy_report(v, EquationSpec.energy_critical(4)).c0 == 0.0

    def test_norm_controlled_by_m(self):
        gamma = 0.5
        for seed in range(4):
            v = random_field(G3, seed, amplitude=1.0)
            lhs = h1dot_norm(v) ** 2 + lp_norm(v, 6) ** 6 + gamma * lp_norm(v, 4) ** 4
            assert lhs <= COERCIVITY_K * m_functional(v, gamma).m_value * (1 + 1e-9)


class TestMassIdentity:
    def test_real_field(self):
        v = random_field(G3, 3)
        v = v.replace(v.values.real)
        assert mass_identity_rhs(v, EquationSpec.cq3(0.5)) == 0
        assert mass_identity_rhs(random_field(G4, 3).replace(random_field(G4, 3).values.real), EquationSpec.gp4()) == 0

    def test_constant_closed_form(self):
        z, spec = 1 + 1j, EquationSpec.cq3(0.5)
        m2 = abs(z) ** 2
        q = m2 + 2 * z.real
        # |z|^4 z + R(z) = q (q + gamma) (1 + z)
        n_val = q * (q + 0.5) * (1 + z)
        want = 2 * G3.volume * z.real * n_val.imag
        assert mass_identity_rhs(const(G3, z), spec) == pytest.approx(want, rel=1e-12)

    def test_gp_uses_same_nonlinearity(self):
        v = random_field(G4, 4)
        got = mass_identity_rhs(v, EquationSpec.gp4())
        lap_term = mass_identity_rhs(v, EquationSpec.energy_critical(4)) - 2 * G4.cell_volume * np.sum(
            v.real * np.imag(nonlinearity(EquationSpec.energy_critical(4), v.values))
        )
        nl = 2 * G4.cell_volume * np.sum(v.real * v.imag * (np.abs(v.values) ** 2 + 2 * v.real))
        assert got == pytest.approx(lap_term + nl, rel=1e-10, abs=1e-12)


class TestEnergySpaceNorm:
    def test_zero(self):
        assert energy_space_norm(const(G3, 0), "CQ3") == 0

    def test_imaginary_constant(self):
        s = 0.6
        assert energy_space_norm(const(G3, 1j * s), "CQ3") == pytest.approx(s * G3.volume**0.25, rel=1e-13)

    def test_component_oracle(self):
        v = random_field(G3, 6)
        re, im = v.replace(v.real), v.replace(v.imag)
        want = np.sqrt(lp_norm(re, 2) ** 2 + h1dot_norm(re) ** 2) + h1dot_norm(im)
        assert energy_space_norm(v, "GP4") == pytest.approx(want, rel=1e-12)
        assert energy_space_norm(v, "CQ3") == pytest.approx(want + lp_norm(v, 4), rel=1e-12)

    def test_bad_space(self):
        with pytest.raises(ValueError):
            energy_space_norm(const(G3, 0), "EC")

    def test_re_l2(self):
        v = random_field(G3, 7)
        assert re_l2_sq(v) == pytest.approx(lp_norm(v.replace(v.real), 2) ** 2, rel=1e-13)
