# %% [markdown]
# # Solitary waves
#
# Petviashvili iteration for a few speeds, then the symmetry and decay checks.

# %%
import numpy as np

from whithamlab import Grid, petviashvili_solve, verify_symmetry, decay_report, strip_halfwidth

grid = Grid()
speeds = [1.02, 1.05, 1.1, 1.2]
waves = {c: petviashvili_solve(c, grid) for c in speeds}

# %%
for c, w in waves.items():
    print(f"c={c}  sup={w.amplitude:.6f}  KdV={1.5 * (c - 1):.6f}  iterations={w.iterations}  "
          f"residuals=({w.residual_physical:.1e}, {w.residual_convolution:.1e})")

# %% [markdown]
# Reflection error about the crest and the moving-plane stopping point.

# %%
for c, w in waves.items():
    rep = verify_symmetry(w.phi, c=c)
    print(c, rep.passed, f"{rep.reflection_error:.1e}", rep.crest_location, rep.moving_plane_sup)

# %% [markdown]
# The profile decays at essentially the strip half-width.

# %%
for c, w in waves.items():
    rep = decay_report(w.phi, c)
    print(f"c={c}  nu={rep.fitted_rate:.6f}  delta_c={strip_halfwidth(c):.6f}  window={rep.window}")

# %%
# the tail near the crest for c = 1.2
w = waves[1.2]
x = np.asarray(grid.x)
sel = (x >= 0) & (x <= 10)
print(np.c_[x[sel][::80], w.phi.values[sel][::80]])
