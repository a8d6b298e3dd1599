"""
The commutator function and the light cone
==========================================

On-shell quadrature of the 1+1 dimensional commutator function against its
Bessel closed form.
"""

# %%

from spacetime_crystal import commutator_delta, pauli_jordan_closed_form
from spacetime_crystal.massshell import boost

mu = 1.0
for x, t in [(0.0, 1.0), (0.5, 2.0), (2.0, 1.0), (3.0, 0.0)]:
    num = commutator_delta(x, t, mu)
    ref = pauli_jordan_closed_form(x, t, mu)
    where = "inside" if abs(t) > abs(x) else "outside"
    print(f"({x:4.1f}, {t:4.1f}) {where:7s} quadrature {num.imag: .10f}i  closed form {ref.imag: .10f}i")

# %%
# a boost at half the speed of light moves the point along its hyperbola
x, t = 0.5, 2.0
xb, tb = boost(x, t, 0.5)
print(f"({x}, {t}) -> ({xb:.4f}, {tb:.4f});  difference",
      abs(commutator_delta(x, t, mu) - commutator_delta(xb, tb, mu)))
