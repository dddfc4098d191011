# %% [markdown]
# # Energies, the modified energy and coercivity
#
# The excitation energy is a rewriting of the Ginzburg-Landau energy of
# ``u = 1 + v``. For CQ3 it is not coercive on its own; adding
# ``C0 * ||Re v||^2`` gives a functional ``M`` that controls the gradient and
# the L4 and L6 norms.

# %%
import numpy as np

from gpcq.energy import (
    COERCIVITY_K,
    coercivity_constant,
    coercivity_integrated,
    energy_excitation,
    energy_gl,
    gronwall_rate,
    m_functional,
)
from gpcq.equations import EquationSpec
from gpcq.grid import Grid
from gpcq.io import InitialData, generate_initial
from gpcq.verification import coercivity_suite

grid = Grid(3, 16, 16.0)
v = generate_initial(InitialData.random_fourier(seed=3, decay_exponent=3.0, cutoff=4.0, amplitude=1.0), grid)
spec = EquationSpec.cq3(0.5)
print("v-form:", energy_excitation(v, spec))
print("u-form:", energy_gl(v + 1.0, spec.gamma))

# %% [markdown]
# Constants for gamma = 0.5, including the derived growth rate used by the
# runtime monitor.

# %%
print("C0 =", coercivity_constant(0.5), " K =", COERCIVITY_K, " C1 =", gronwall_rate(0.5))
print(m_functional(v, 0.5))

# %% [markdown]
# The integrated bound also holds for fields pushed toward ``Re v < 0``,
# where the quartic part of the energy density is negative.

# %%
dip = v.replace(v.values - 1.8 * np.exp(-grid.radius_squared() / 4))
for field in (v, dip):
    res = coercivity_integrated(field, 0.5)
    print(f"lhs {res.lhs:.4e}  rhs {res.rhs:.4e}  holds {res.holds}")

print(coercivity_suite(200_000, seed=1))
