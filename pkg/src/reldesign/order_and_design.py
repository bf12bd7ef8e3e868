"""Order-and-Design: visit pure profiles by ascending social cost, design the first one possible."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .design import DesignConfig, design
from .game import (StaticGame, _check_guard, is_pure_nash, social_cost_tensor,
                   to_index, to_profile)
from .lp import LPNumericalError
from .relationship import RelationshipNetworkSet, check_compatible, modify_costs

# social costs equal up to this relative gap are ordered lexicographically
TIE_TOL = 1e-9


class DesignFailure(LPNumericalError):
    """An LP failed numerically while designing for ``profile``."""

    def __init__(self, profile, cause):
        super().__init__(f"design failed numerically at profile {list(profile)}: {cause}")
        self.profile = profile


@dataclass
class OrderAndDesignResult:
    found: bool
    w: Optional[np.ndarray]
    target_profile: Optional[tuple]
    social_cost: Optional[float]
    profiles_visited: int
    lp_iterations: int
    elapsed_seconds: float
    visited_costs: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "w": None if self.w is None else [float(v) for v in self.w],
            "target_profile": None if self.target_profile is None else list(self.target_profile),
            "social_cost": self.social_cost,
            "profiles_visited": self.profiles_visited,
            "elapsed_seconds": self.elapsed_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def ordered_profiles(V: np.ndarray):
    """Yield ``(profile, cost)`` in ascending cost, ties broken lexicographically."""
    flat = V.ravel()
    scale = max(1.0, float(np.abs(flat).max())) if flat.size else 1.0
    keys = np.round(flat / (TIE_TOL * scale))
    # C-order flat index is lexicographic order of profiles; lexsort is stable
    order = np.lexsort((np.arange(flat.size), keys))
    for k in order:
        yield to_profile(np.unravel_index(k, V.shape)), float(flat[k])


def order_and_design(g: StaticGame, V, phi: RelationshipNetworkSet,
                     cfg: DesignConfig = DesignConfig()) -> OrderAndDesignResult:
    """Return the weights for the cheapest pure profile that DESIGN can enforce.

    ``V`` may be None (sum of player costs), a :class:`SocialCost`, or a tensor.
    On failure for every profile the result has ``found=False`` and ``w=None``.
    """
    _check_guard(g)
    check_compatible(g, phi)
    t0 = time.perf_counter()
    Vt = social_cost_tensor(g, V)
    visited, iters, costs = 0, 0, []
    for s, v in ordered_profiles(Vt):
        visited += 1
        costs.append(v)
        try:
            res = design(g, phi, s, cfg)
        except LPNumericalError as exc:
            raise DesignFailure(s, exc) from exc
        iters += res.lp_iterations
        if res.found:
            return OrderAndDesignResult(True, res.w, s, v, visited, iters,
                                        time.perf_counter() - t0, costs)
    return OrderAndDesignResult(False, None, None, None, visited, iters,
                                time.perf_counter() - t0, costs)


@dataclass(frozen=True)
class Outcome:
    profile: tuple
    social_cost: float
    is_nash: bool


def achieved_outcome(g: StaticGame, V, phi: RelationshipNetworkSet, w, target) -> Outcome:
    """Recheck a designed ``w``: social cost of ``target`` and whether it is Nash under ``w``."""
    modified = modify_costs(g, phi, w)
    Vt = social_cost_tensor(g, V)
    return Outcome(tuple(int(a) for a in target),
                   float(Vt[to_index(target, g.strategy_counts)]),
                   is_pure_nash(modified, target))
