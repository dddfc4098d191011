# %% [markdown]
# # Strang split-step evolution
#
# Each step is a half nonlinear phase rotation, an exact linear step in
# Fourier space and another half rotation. Both substeps are exact, so the
# scheme is second order and time reversible.

# %%
import numpy as np

from gpcq.equations import EquationSpec
from gpcq.grid import ComplexField, Grid
from gpcq.integrator import StepConfig, convergence_order, energy_drift, evolve, gronwall_monitor, mass_identity_check
from gpcq.io import InitialData, generate_initial

grid = Grid(3, 32, 16.0)
spec = EquationSpec.cq3(0.5)
v0 = generate_initial(InitialData.gaussian(0.5, 2.0), grid)

# %% [markdown]
# Constant data solve the equation with a pure phase, and the scheme
# reproduces it to rounding.

# %%
c = 1.3 - 0.4j
const = ComplexField(grid, np.full(grid.shape, c - 1))
traj = evolve(spec, const, StepConfig(1e-3, 200, snapshot_stride=200), with_diagnostics=False)
m2 = abs(c) ** 2
exact = c * np.exp(-1j * (m2 - 1) * (m2 - spec.r1_sq) * 0.2) - 1
print("constant-data error:", np.abs(traj.final.values - exact).max())

# %% [markdown]
# Energy drift shrinks by about 4 when the step halves.

# %%
drifts = []
for dt in (2e-3, 1e-3):
    run = evolve(spec, v0, StepConfig.from_horizon(dt, 0.2, snapshot_stride=10))
    drifts.append(energy_drift(run))
print("drifts:", drifts, "ratio:", drifts[0] / drifts[1])

# %% [markdown]
# The same run carries the mass identity and the Gronwall monitor for the
# modified energy.

# %%
print("mass identity max error:", mass_identity_check(run).max_error)
mon = gronwall_monitor(run)
print("Gronwall bound holds:", mon.derivative_holds and mon.bound_holds, " min margin:", mon.min_margin)

res = convergence_order(spec, v0, 0.1, [4e-3, 2e-3, 1e-3])
print("observed order:", res.order)
