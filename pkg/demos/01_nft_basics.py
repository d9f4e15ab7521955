# %% [markdown]
# # Discrete eigenvalues of a pulse
#
# The nonlinear Fourier transform maps a pulse q(t) to a set of discrete
# eigenvalues in the upper half plane plus a continuous spectrum.  For the
# family A*sech(t) the eigenvalues are known in closed form: (A - 0.5 - k)j
# for every k that keeps the imaginary part positive.

# %%
import numpy as np

from nftnoise import (SolitonPrescription, TimeGrid, darboux_synthesize,
                      find_discrete_eigenvalues, sech_pulse)

grid = TimeGrid.symmetric(16.0, 2048)

for amp in (1.0, 2.0, 2.2, 3.0):
    spec = find_discrete_eigenvalues(sech_pulse(amp, grid))
    print(f"A = {amp}: eigenvalues {np.round(spec.eigenvalues, 6)}")

# %% [markdown]
# The search seeds Newton iterations from local minima of |a(lambda)| on a
# lattice, then deflates the roots it already has so that close pairs are
# not merged.  Every root comes with a convergence report.

# %%
spec = find_discrete_eigenvalues(sech_pulse(2.0, grid))
rep = spec.report
print(f"{rep.n_seeds} seeds, {rep.n_converged} converged, {rep.n_failed} failed or duplicated")
print("discrete amplitudes b/a':", np.round(spec.amplitudes, 6))

# %% [markdown]
# ## Going the other way
#
# A multi-soliton with any eigenvalues and norming constants can be built
# with the Darboux transformation.  Recovering the spectrum from the
# synthesized pulse closes the loop.  The slowest-decaying component goes
# like exp(-2 Im(lambda) |t|), so the smallest imaginary part sets the window.

# %%
wide = TimeGrid.symmetric(32.0, 4096)
prescription = SolitonPrescription.symmetric([0.4j + 0.2, 0.9j, 1.3j - 0.1])
q = darboux_synthesize(prescription, wide)
back = find_discrete_eigenvalues(q)
print("prescribed:", np.round(np.sort_complex(prescription.eigenvalues), 6))
print("recovered: ", np.round(np.sort_complex(back.eigenvalues), 6))
print("peak |q|:", round(float(np.max(np.abs(q.samples))), 4))
