"""
Dynamics from a static history state
====================================

A system entangled with a ring clock.  Conditioning on a clock reading
recovers the evolved system state; the global constraint holds exactly only
when the system energies sit on the clock's frequency lattice.
"""

# %%
import numpy as np

from spacetime_crystal import ClockSpec, aliasing_residual, build_history, constraint_residual
from spacetime_crystal.pagewootters import nearest_commensurate, recovery_fidelities

rng = np.random.default_rng(1)
M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
H = (M + M.conj().T) / 2
psi0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
psi0 /= np.linalg.norm(psi0)

clock = ClockSpec(64, 0.1)
h = build_history(psi0, H, clock)
print("worst recovery fidelity:", recovery_fidelities(h, psi0, H).min())

# %%
for E_s in (0.3, 0.5, nearest_commensurate(0.5, clock)[0]):
    hs = build_history(np.array([1.0 + 0j]), np.array([[-E_s]]), clock)
    print(f"E_s={E_s:.6f}  residual {constraint_residual(hs, np.array([[-E_s]])):.3e}"
          f"  formula {aliasing_residual(-E_s, clock):.3e}")
