import math

import numpy as np
import pytest

from gpcq.energy import energy_excitation
from gpcq.equations import EquationSpec
from gpcq.grid import ComplexField, Grid, lp_norm
from gpcq.integrator import StepConfig, evolve
from gpcq.perturbation import (
    REPORT_ROLES,
    ComparisonSetup,
    compare_runs,
    difference_trajectory,
    hdot1_growth_bound,
    perturbation_field,
    scaling_study,
    uniqueness_probe,
)

from conftest import gaussian_field, random_field

GP = EquationSpec.gp4()
CQ = EquationSpec.cq3(0.5)
G4 = Grid(4, 8, 8.0)
G3 = Grid(3, 16, 8.0)
SHORT = StepConfig(1e-3, 20, snapshot_stride=2)


class TestPerturbationField:
    def test_gp_closed_form(self):
        v = random_field(G4, 1)
        a, m2 = v.real, np.abs(v.values) ** 2
        want = 2 * a * v.values + m2 + 2 * a
        np.testing.assert_allclose(perturbation_field(GP, v).values, want, atol=1e-13)

    def test_cq_is_remainder(self):
        from gpcq.equations import remainder_R

        v = random_field(G3, 2)
        np.testing.assert_allclose(perturbation_field(CQ, v).values, remainder_R(v.values, CQ.gamma), atol=1e-12)

    def test_vanishes_at_zero(self):
        assert np.all(perturbation_field(GP, ComplexField.zeros(G4)).values == 0)


class TestCompareRuns:
    def test_zero_data(self):
        z = ComplexField.zeros(G4)
        rep = compare_runs(ComparisonSetup(GP, z, z, SHORT))
        assert all(v == 0 for k, v in rep.to_dict().items() if k != "interval")

    def test_same_data_has_no_initial_gap(self):
        v0 = gaussian_field(G3, 0.1, 1.5)
        rep = compare_runs(ComparisonSetup(CQ, v0, v0, SHORT))
        assert rep.Eprime_value == 0 and rep.eps_free == 0
        assert rep.diff_crit > 0 and rep.eps_e > 0

    def test_report_structure(self):
        v0 = gaussian_field(G3, 0.1, 1.5)
        rep = compare_runs(ComparisonSetup(CQ, v0, v0 * 0.9, SHORT, t0=0.25))
        assert rep.interval == pytest.approx((0.25, 0.27))
        assert rep.w_s1 >= rep.w_x1
        assert rep.Eprime_value <= rep.diff_s1 * (1 + 1e-12)
        labelled = rep.labelled()
        assert set(REPORT_ROLES) <= set(labelled)
        assert labelled["L_value"]["value"] == rep.L_value

    def test_returns_runs(self):
        v0 = gaussian_field(G3, 0.1, 1.5)
        rep, v_run, w_run = compare_runs(ComparisonSetup(CQ, v0, v0, SHORT), return_runs=True)
        diff = difference_trajectory(w_run, v_run)
        assert lp_norm(diff.snapshots[0], 2) == 0
        assert len(v_run) == len(w_run) == len(diff)

    def test_setup_validation(self):
        with pytest.raises(ValueError):
            ComparisonSetup(EquationSpec.energy_critical(3), ComplexField.zeros(G3), ComplexField.zeros(G3), SHORT)
        with pytest.raises(ValueError):
            ComparisonSetup(GP, ComplexField.zeros(G3), ComplexField.zeros(G3), SHORT)
        with pytest.raises(ValueError):
            ComparisonSetup(CQ, ComplexField.zeros(G3), ComplexField.zeros(Grid(3, 8, 8.0)), SHORT)

    def test_gp_energy_controls_gradient(self):
        v0 = gaussian_field(G4, 0.3, 1.5)
        rep = compare_runs(ComparisonSetup(GP, v0, v0, SHORT))
        assert rep.E0_value**2 <= 2 * energy_excitation(v0, GP) * (1 + 1e-3)

    def test_cq_gradient_below_growth_bound(self):
        v0 = gaussian_field(G3, 0.3, 1.5)
        rep = compare_runs(ComparisonSetup(CQ, v0, v0, SHORT))
        assert rep.E0_value <= hdot1_growth_bound(v0, CQ.gamma, SHORT.total_time)

    def test_energy_critical_pair_agrees_with_itself(self):
        v0 = gaussian_field(G3, 0.2, 1.5)
        spec = EquationSpec.energy_critical(3)
        a = evolve(spec, v0, SHORT, with_diagnostics=False)
        b = evolve(spec, v0, SHORT, with_diagnostics=False)
        assert all(lp_norm(d, 2) == 0 for d in difference_trajectory(a, b).snapshots)


class TestScalingStudy:
    def test_differences_shrink_with_amplitude(self):
        rows = scaling_study(GP, gaussian_field(G4, 1.0, 1.5), [5e-4, 1e-3], StepConfig(1e-3, 20, snapshot_stride=2))
        assert [a for a, _ in rows] == [1e-3, 5e-4]
        (_, big), (_, small) = rows
        for name in ("diff_crit", "diff_s1", "eps_e", "L_value"):
            assert getattr(big, name) > getattr(small, name)
        assert big.diff_crit / small.diff_crit >= 1.5

    def test_negative_amplitude(self):
        with pytest.raises(ValueError):
            scaling_study(GP, ComplexField.zeros(G4), [-1.0], SHORT)


class TestUniqueness:
    def test_constant_data(self):
        v0 = ComplexField(G3, np.full(G3.shape, 0.2 + 0.1j))
        res = uniqueness_probe(CQ, v0, StepConfig(1e-2, 5), StepConfig(2.5e-3, 20))
        assert res.l2_gap_final <= 1e-12 and math.isnan(res.order)
        assert res.dts == (1e-2, 5e-3, 2.5e-3)

    def test_second_order_gaps(self):
        v0 = gaussian_field(G3, 0.3, 1.5)
        res = uniqueness_probe(CQ, v0, StepConfig(4e-3, 25), StepConfig(1e-3, 100))
        assert res.order == pytest.approx(2.0, abs=0.2)
        assert res.gaps[0] > res.gaps[1]

    @pytest.mark.parametrize("fine", [StepConfig(3e-3, 33), StepConfig(1e-3, 50)])
    def test_bad_ladder(self, fine):
        with pytest.raises(ValueError):
            uniqueness_probe(CQ, ComplexField.zeros(G3), StepConfig(1e-2, 10), fine)


def test_growth_bound_zero_data():
    assert hdot1_growth_bound(ComplexField.zeros(G3), 0.5, 1.0) == 0
