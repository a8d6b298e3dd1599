"""
Entanglement between spacetime modes
====================================

One particle shared between two point modes.  The pair can be separated in
space, in time, or both, and the reduced state carries one bit in each case.
"""

# %%
from spacetime_crystal import GridSpec, entanglement_entropy, reduced_density, single_particle_superposition
from spacetime_crystal.fock import point_modes

grid = GridSpec(16, 16, 16.0, 16.0)
pairs = {"spatial": [(3, 5), (9, 5)], "temporal": [(3, 5), (3, 11)], "mixed": [(3, 5), (9, 11)]}
for name, pts in pairs.items():
    s = single_particle_superposition(point_modes(grid, pts), 0, 1, 1.0, 1.0)
    rho = reduced_density(s, [0])
    print(f"{name:8s} S = {entanglement_entropy(rho):.12f} bits, eigenvalues {rho.eigenvalues().round(12)}")

# %%
# unequal weights give the binary entropy of the split
s = single_particle_superposition(point_modes(grid, pairs["mixed"]), 0, 1, 0.6, 0.8)
print("0.36 / 0.64 split:", entanglement_entropy(reduced_density(s, [0])))
