"""
Designing relationships for a commuting game
============================================

Three commuters pick between a car-pool route A, whose fixed cost is split
among its riders, and a congested route B. Left alone they settle on an
outcome that is worse for everyone. Here we ask how little mutual concern is
needed to make the all-car-pool outcome stable.
"""

import numpy as np

from reldesign import (DesignConfig, best_social_profile, design, enumerate_pure_nash,
                       make_individual, make_traffic_game, modify_costs,
                       order_and_design, social_cost)

g = make_traffic_game(3)

# the socially best profile and what selfish play actually produces
best, v = best_social_profile(g)
print("social optimum", best, "cost", round(v, 3))
for s in enumerate_pure_nash(g):
    print("selfish equilibrium", s, "cost", round(social_cost(g, None, s), 3))

# one network per ordered pair: player i weighs player j's cost
phi = make_individual(3)
found, w = design(g, phi, (1, 1, 1))
print("\nweights making (A, A, A) stable:", np.round(w, 3), " L1 =", round(np.abs(w).sum(), 6))

g_mod = modify_costs(g, phi, w)
print("equilibria of the modified game:", enumerate_pure_nash(g_mod))

# Order-and-Design does the search over targets for us
res = order_and_design(g, None, phi, DesignConfig(k=1.0))
print("\nOrder-and-Design target", res.target_profile, "cost", round(res.social_cost, 3),
      "after", res.profiles_visited, "profile(s)")

# a tighter budget forces a worse target
tight = order_and_design(g, None, phi, DesignConfig(k=0.3))
print("with k = 0.3:", tight.target_profile, "cost", round(tight.social_cost, 3))
