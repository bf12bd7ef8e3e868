"""Relationship-weight design for n-player static games.

Players internalize each other's costs through weighted relationship
networks; the weights are chosen so the equilibrium of the modified game has
low social cost, either exactly over pure profiles (Order-and-Design) or by
gradient descent through an entropy-regularized equilibrium.
"""
from .design import DesignConfig, build_design_lp, design
from .entropy_nash import (EntropyNashConfig, GDConfig, equilibrium_gradient,
                           fixed_point_map, gradient_descent, jacobian_F,
                           social_cost_gradient, softmax, solve)
from .game import (SocialCost, StaticGame, best_social_profile,
                   enumerate_pure_nash, expected_cost, expected_cost_vector,
                   expected_social_cost, is_pure_nash, social_cost)
from .lp import LinearProgram, solve_lp
from .order_and_design import achieved_outcome, order_and_design
from .relationship import (RelationshipNetworkSet, make_all_people,
                           make_individual, make_reciprocity, modify_costs)
from .scenarios import (make_prisoners_dilemma, make_traffic_game,
                        symmetric_traffic_mixed_nash)

__version__ = "0.1.0"
