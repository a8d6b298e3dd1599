"""
A crystal in space and time
===========================

Wannier orbitals displaced in both x and t, the hopping amplitude between
neighbours, and the tight-binding band it produces.
"""

# %%
import numpy as np

from spacetime_crystal import ChainState, CrystalSpec, GridSpec, WannierSpec, chain_spectrum, evolve_chain, hopping_J
from spacetime_crystal.crystal import band_curvature_mass, effective_mass, hopping_J_fd

grid = GridSpec(256, 256, 32.0, 32.0)
spec = CrystalSpec(8, 2.0, 1.0, WannierSpec("gaussian", 1.2, 1.0))
rep = hopping_J(spec, grid, sigma_tau=1.0)
print("J spectral       ", rep.j_quadrature)
print("J finite diff.   ", hopping_J_fd(spec, grid))
print("closed form      ", rep.j_closed_form, rep.notes)

# %%
J = rep.j_quadrature
evals, _ = chain_spectrum(8, J)
print("ring band:", np.round(evals, 6))
print("m* =", effective_mass(J, 1.0), " from 64-site curvature:", band_curvature_mass(64, J, 1.0))

# %%
# a particle released on site 0 spreads around the ring
state = ChainState.localized(8, 0)
for tau in (0.0, 2.0, 5.0):
    print(tau, np.round(evolve_chain(state, J, tau).probabilities, 3))

# %%
# exponential orbitals (cusped) decay with distance too, but need a fine grid
fine = GridSpec(1024, 64, 64.0, 32.0)
for d in (4.0, 6.0, 8.0):
    s = CrystalSpec(2, d, 0.0, WannierSpec("exponential", 1.0, 4.0))
    print(f"d={d}: J={hopping_J(s, fine).j_quadrature:.3e}")
