# %% [markdown]
# # Propagating a two-soliton
#
# In normalized units the fiber obeys j q_z = q_tt + 2|q|^2 q.  Eigenvalues
# are conserved and each discrete amplitude rotates as exp(-4j lambda^2 z),
# so the ratio of the two amplitudes of 2 sech(t) turns by
# 4 (1.5^2 - 0.5^2) = 8 rad per unit distance.

# %%
import numpy as np

from nftnoise import (FiberSpec, PropagationConfig, TimeGrid, find_discrete_eigenvalues,
                      propagate_with_taps, sech_pulse)

fiber = FiberSpec.nz_dsf()
nm = fiber.normalization()
print(f"power scale {nm.power_scale * 1e3:.3f} mW, time scale {nm.time_scale * 1e12:.1f} ps")
print(f"400 km is z = {float(nm.to_z(400.0)):.4f}")

# %%
grid = TimeGrid.symmetric(16.0, 2048)
q0 = sech_pulse(2.0, grid)
taps = np.round(np.linspace(0, 0.5, 6), 12)
_, fields = propagate_with_taps(q0, 0.5, PropagationConfig(n_steps=4000), taps=taps)

ratio0 = None
for z, f in zip(taps, fields):
    spec = find_discrete_eigenvalues(f)
    r = spec.amplitudes[1] / spec.amplitudes[0]
    ratio0 = r if ratio0 is None else ratio0
    print(f"z = {z:.1f}  eigenvalues {np.round(spec.eigenvalues, 5)}  "
          f"ratio phase {np.angle(r / ratio0):+.4f} rad (expected {np.angle(np.exp(8j * z)):+.4f})")

# %% [markdown]
# ## Adding amplifier noise
#
# With noise_sigma > 0 every step adds band-limited white Gaussian noise.
# The eigenvalues now wander; `steps_for` picks a step count that keeps the
# nonlinear phase per step small for the breathing two-soliton.

# %%
noisy = PropagationConfig(n_steps=2000, noise_sigma=0.05, noise_bandwidth=0.25, rng_seed=1)
out, _ = propagate_with_taps(q0, 0.25, noisy)
print("after noisy propagation:", np.round(find_discrete_eigenvalues(out).eigenvalues, 4))
