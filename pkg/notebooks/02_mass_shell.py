"""
Mass shells from the tau spectrum
=================================

Three grid modes, two of them on the shell q^2 = 1 and one on q^2 = 4.
A windowed Fourier transform over tau separates them again.
"""

# %%
import numpy as np

from spacetime_crystal import (
    EvolutionSpec,
    GridSpec,
    ShellSpec,
    SpacetimeField,
    evolve,
    expect_p2,
    field_energy,
    frequency_split,
    normalize,
    shell_project,
    tau_fourier,
)

grid = GridSpec(32, 32, 8 * np.pi, 8 * np.pi)  # k and w in steps of 1/4
A = np.zeros(grid.shape, dtype=complex)
A[0, 4] = A[3, 5] = np.sqrt(0.3)  # (k, w) = (0, 1), (3/4, 5/4): q^2 = 1
A[0, 8] = np.sqrt(0.4)            # (0, 2): q^2 = 4
f = normalize(SpacetimeField(grid, A, "momentum"))
print("<p^2> =", expect_p2(f), " field energy =", field_energy(f))

# %%
traj = evolve(f, EvolutionSpec("relativistic-free", 0.1, 2000))
mu = np.linspace(0, 5, 501)
spec = tau_fourier(traj, mu)
print("spectral peaks at mu =", spec.peaks(2))

# %%
on_shell = shell_project(f, ShellSpec(1.0, 1e-9))
print("q^2 = 1 component: field energy", field_energy(on_shell), "(mc^2/2)")

particle, anti = frequency_split(f)
print("all modes have w > 0, antiparticle weight", np.sum(np.abs(anti.values) ** 2) * grid.cell)
