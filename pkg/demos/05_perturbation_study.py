# %% [markdown]
# # Comparison with the energy-critical equation
#
# The full equation is the energy-critical NLS plus a forcing term. Running
# both from the same data shows how the gap between them scales with the
# size of the data.

# %%
from gpcq.equations import EquationSpec
from gpcq.grid import Grid
from gpcq.integrator import StepConfig
from gpcq.io import InitialData, generate_initial
from gpcq.perturbation import ComparisonSetup, compare_runs, scaling_study, uniqueness_probe

grid = Grid(4, 8, 8.0)
spec = EquationSpec.gp4()
base = generate_initial(InitialData.gaussian(1.0, 1.5), grid)
cfg = StepConfig.from_horizon(1e-3, 0.05, snapshot_stride=2)

for amp, rep in scaling_study(spec, base, [1e-2, 5e-3, 2.5e-3], cfg):
    print(f"A={amp:.1e} diff_crit={rep.diff_crit:.3e} diff_s1={rep.diff_s1:.3e} eps_e={rep.eps_e:.3e}")

# %% [markdown]
# Each report carries its quantities with role labels.

# %%
rep = compare_runs(ComparisonSetup(spec, base * 0.1, base * 0.09, cfg))
for key, entry in rep.labelled().items():
    print(key, entry)

# %% [markdown]
# Refining the step converges to one solution at second order.

# %%
res = uniqueness_probe(spec, base * 0.5, StepConfig.from_horizon(4e-3, 0.2), StepConfig.from_horizon(1e-3, 0.2))
print("gaps:", res.gaps, "order:", res.order)
