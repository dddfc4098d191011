# %% [markdown]
# # Nonlinearities around the unit background
#
# Writing ``u = 1 + v`` turns both the Gross-Pitaevskii (GP4) and the
# cubic-quintic (CQ3) equations into equations for the excitation ``v``.
# The expanded polynomial forms are what the integrator uses; here we check
# them against the compact factored forms and look at how a general
# cubic-quintic model is rescaled to unit background.

# %%
import numpy as np

from gpcq.equations import EquationSpec, GeneralCQParams, nonlinearity, reduce_general, remainder_R
from gpcq.verification import factored_oracle, identity_suite

gp = EquationSpec.gp4()
cq = EquationSpec.cq3(0.5)
print("GP4 at z=1:", nonlinearity(gp, 1 + 0j))
print("CQ3 at z=1:", nonlinearity(cq, 1 + 0j))

# %% [markdown]
# The CQ3 nonlinearity is ``|v|^4 v`` plus a lower-order remainder. On the
# imaginary axis the remainder has a simple closed form.

# %%
y = 0.8
print(remainder_R(1j * y, cq.gamma), complex(y**4 + cq.gamma * y**2, cq.gamma * y**3))

# %% [markdown]
# Large-sample check of both identities. The expanded forms are evaluated in
# extended precision, which keeps cancellation near the zero set in check.

# %%
report = identity_suite(100_000, seed=0)
print(report)

z = np.array([0.5 + 0.5j, -2 + 1j, 30j])
print(np.abs(nonlinearity(cq, z) - factored_oracle(z, cq.gamma)))

# %% [markdown]
# ## Rescaling a general model
#
# ``i u_t + Lap u = (alpha1 - alpha3 |u|^2 + alpha5 |u|^4) u`` has background
# ``|u|^2 = r0^2``. Rescaling amplitude, time and space maps it to unit
# background with a single parameter ``gamma = 1 - r1^2 / r0^2``.

# %%
red = reduce_general(GeneralCQParams(3.0, 4.0, 1.0))
print(f"r0^2 = {red.r0_sq}, gamma = {red.gamma:.6f}, time scale = {red.time_scale}")
