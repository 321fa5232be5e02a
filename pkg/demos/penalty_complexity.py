"""
Penalised complexity and its response to the penalty
====================================================

Strings acting on three or more agents cost extra.  For two agents there is
nothing to penalise; for three, the variation K of the optimal generator
is driven only when H mixes cheap and expensive parts.
"""
import numpy as np

from geoecon.complexity import VariationState, cost, integrate_brandt
from geoecon.pauli import AlgebraElement

h2 = AlgebraElement.from_terms({"XX": 0.5, "ZI": 1.0})
print("two agents, cost for q = 0.5, 1, 10:", [cost(h2, q) for q in (0.5, 1.0, 10.0)])

h3 = AlgebraElement.from_terms({"ZII": 1.0, "XXX": 1.0})
print("three agents, cost for q = 0.5, 1, 10:", [cost(h3, q) for q in (0.5, 1.0, 10.0)])

# %%
# Variation of the geodesic generator under a constant mixed Hamiltonian
times, ks = integrate_brandt(h3, VariationState.zero(3), q=2.0, duration=5.0, step=1e-2, record_every=50)
for t, k in zip(times, ks):
    print(f"t = {t:4.1f}  |K| = {np.linalg.norm(k):.4f}")

# %%
# A purely collective economy does not respond at all
collective = AlgebraElement.from_terms({"XXX": 1.0, "ZYX": 0.3})
_, ks = integrate_brandt(collective, VariationState.zero(3), q=2.0, duration=5.0)
print("max |K| for a pure weight-3 Hamiltonian:", np.abs(ks).max())
