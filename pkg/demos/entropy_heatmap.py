"""
Smoothing the design landscape with entropy
===========================================

In the prisoner's dilemma two relationship weights (how much each player
cares about the other) decide which outcome is stable. With pure equilibria
the social cost jumps between plateaus, so it has no useful gradient. Adding
entropy to each player's choice turns the landscape smooth. This script
prints both on a coarse grid.
"""

import numpy as np

from reldesign import make_individual, make_prisoners_dilemma
from reldesign.experiments import heatmap_array, identical_adjacent_fraction, run_heatmap

pd = make_prisoners_dilemma()
phi = make_individual(2)
res = 11
grid = np.linspace(0, 1, res)

pure = heatmap_array(run_heatmap(pd, phi, res, solver="pure_nash_grid")[None], res)
print("pure Nash social cost (rows w1, columns w2)")
print(np.array2string(pure, precision=1, max_line_width=120))
print("identical neighbours:", round(identical_adjacent_fraction(pure), 3))

for lam in (0.1, 0.3, 1.0):
    rows = run_heatmap(pd, phi, res, lams=(lam,))[lam]
    a = heatmap_array(rows, res)
    jump = max(np.abs(np.diff(a, axis=0)).max(), np.abs(np.diff(a, axis=1)).max())
    print(f"\nlambda = {lam}: cost range {a.min():.3f}..{a.max():.3f}, "
          f"largest step between neighbours {jump:.3f}")

# the gradient at the origin points toward cooperation
g = next(r for r in run_heatmap(pd, phi, res, lams=(0.3,))[0.3] if r["w1"] == 0 and r["w2"] == 0)
print("\ngradient at w = (0, 0):", round(g["grad_w1"], 4), round(g["grad_w2"], 4))
