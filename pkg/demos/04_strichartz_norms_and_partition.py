# %% [markdown]
# # Mixed space-time norms and interval partitioning
#
# Space-time norms are computed from snapshot norms with a trapezoid rule in
# time, so they are additive over adjacent intervals. The partitioner splits
# a run into chunks whose X^1 norm is a fixed ``eta``.

# %%
import math

import numpy as np

from gpcq.grid import Grid
from gpcq.io import InitialData, generate_initial
from gpcq.strichartz import (
    ADMISSIBLE_PAIRS,
    free_trajectory,
    is_admissible,
    partition_by_x1,
    partition_profile,
    s1_finite_norm,
    x1_norm,
)

for n, pairs in ADMISSIBLE_PAIRS.items():
    print(n, [str(p) for p in pairs])
print("(2, inf) admissible in 2-D?", is_admissible(2, "inf", 2))

# %% [markdown]
# A synthetic profile with ``||grad w(t)||^6 = 2t`` has chunk boundaries at
# ``sqrt(j / 4)`` when ``eta^6 = 1/4``.

# %%
t = np.linspace(0, 1, 10_000)
part = partition_profile(t, 2 * t, 0.25 ** (1 / 6), 6)
print(part.breakpoints, [0, 0.5, math.sqrt(0.5), math.sqrt(0.75), 1])

# %% [markdown]
# The same on a free Schrodinger evolution in 3-D.

# %%
grid = Grid(3, 16, 8.0)
traj = free_trajectory(generate_initial(InitialData.gaussian(0.5, 1.0), grid), np.linspace(0, 0.5, 51))
total = x1_norm(traj)
print("X1:", total, " S1 (finite family):", s1_finite_norm(traj))
split = partition_by_x1(traj, total / 2 ** 0.1)
print("chunks:", split.J, "sizes:", split.chunk_values)
