# %% [markdown]
# # The kernels K and H_c
#
# Build the Whitham kernel and the resolvent kernel on the default grid, look at
# the near-origin behaviour and at the exponential tail.

# %%
import numpy as np

from whithamlab import Grid, Multiplier, synthesize_kernel, strip_halfwidth
from whithamlab.kernels import kernel_by_quadrature, near_origin_profile, fit_decay_rate

np.set_printoptions(precision=6)
grid = Grid()
print(grid, "h =", grid.h, "xi_max =", grid.xi_max)

# %% [markdown]
# Unit mass of K is a quick sanity check of the origin treatment.

# %%
K = synthesize_kernel(Multiplier.whitham(), grid)
print("h * sum K =", grid.h * K.values.sum())

# %%
tables = {c: synthesize_kernel(Multiplier.resolvent(c), grid) for c in (1.1, 1.5, 2.0)}

# %% [markdown]
# sqrt(x) H_c(x) for small x. It tends to 1/(c sqrt(2 pi)) but the log and
# constant corrections are still visible around x = 1e-2.

# %%
xs = np.geomspace(1e-6, 1e-2, 9)
for c, t in tables.items():
    prof = near_origin_profile(t, xs)
    print(f"c={c}", prof, "limit", 1 / (c * np.sqrt(2 * np.pi)))

# %%
# spot check against the arbitrary-precision oracle (takes a second per point)
x = 1e-3
print(tables[1.5].evaluate(np.array([x]))[0], kernel_by_quadrature(Multiplier.resolvent(1.5), x))

# %% [markdown]
# Tail rate on [2, 8] against the strip half-width.

# %%
for c, t in tables.items():
    nu = fit_decay_rate((grid.x, t.values), (2, 8))
    print(f"c={c}  nu={nu:.5f}  delta_c={strip_halfwidth(c):.5f}")
