"""Traffic (car-pool vs congested routes) and prisoner's dilemma games.

Route 1 is the car-pool route: its players split ``carpool_total(n)`` evenly.
Route ``r >= 2`` is congested: each of its ``l_r`` players pays ``c_r * l_r``.
"""
from __future__ import annotations

from math import comb
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .game import StaticGame

DEFAULT_COEFFS = (1.5, 2.0, 4.0, 4.5, 5.0)


def carpool_table(n: int) -> float:
    """Total car-pool cost ``5n/3``; reproduces the optimal column 3.33, 5.0, 6.67, 8.33."""
    return 5.0 * n / 3.0


def carpool_text(n: int) -> float:
    """Total car-pool cost ``2.5n`` as written in the experiment description."""
    return 2.5 * n


CARPOOL_MODES = {"paper_table": carpool_table, "paper_text": carpool_text}

CarpoolSpec = Union[None, float, str, Callable[[int], float]]


def resolve_carpool(spec: CarpoolSpec) -> Callable[[int], float]:
    if spec is None:
        return carpool_table
    if callable(spec):
        return spec
    if isinstance(spec, str):
        try:
            return CARPOOL_MODES[spec]
        except KeyError:
            raise ValueError(f"unknown carpool mode {spec!r}") from None
    total = float(spec)
    return lambda n: total


def make_traffic_game(n: int, num_routes: int = 2, carpool_total: CarpoolSpec = None,
                      congestion_coeffs: Optional[Sequence[float]] = None) -> StaticGame:
    if n < 2:
        raise ValueError(f"traffic games need n >= 2 players, got {n}")
    if num_routes < 2:
        raise ValueError(f"traffic games need at least 2 routes, got {num_routes}")
    if congestion_coeffs is None:
        if num_routes - 1 > len(DEFAULT_COEFFS):
            raise ValueError(f"no default coefficients for {num_routes} routes")
        congestion_coeffs = DEFAULT_COEFFS[:num_routes - 1]
    coeffs = np.asarray(congestion_coeffs, dtype=float)
    if coeffs.shape != (num_routes - 1,):
        raise ValueError(
            f"need {num_routes - 1} congestion coefficients, got {len(coeffs)}")
    total = resolve_carpool(carpool_total)(n)

    choice = np.indices((num_routes,) * n)  # choice[i][s] = route of player i
    loads = np.stack([(choice == r).sum(axis=0) for r in range(num_routes)])
    per_route = np.empty_like(loads, dtype=float)
    per_route[0] = np.where(loads[0] > 0, total / np.maximum(loads[0], 1), 0.0)
    for r in range(1, num_routes):
        per_route[r] = coeffs[r - 1] * loads[r]
    costs = tuple(np.take_along_axis(per_route, choice[i][None], axis=0)[0]
                  for i in range(n))
    labels = tuple(tuple(f"route {chr(ord('A') + r)}" for r in range(num_routes))
                   for _ in range(n))
    return StaticGame(costs, labels)


def make_prisoners_dilemma() -> StaticGame:
    """Canonical cost-form dilemma; strategy 1 cooperates, 2 defects."""
    u1 = np.array([[1.0, 3.0], [0.0, 2.0]])
    return StaticGame((u1, u1.T.copy()), (("cooperate", "defect"),) * 2)


class NoInteriorEquilibrium(ValueError):
    pass


def _indifference_gap(p: float, n: int, total: float, c_b: float) -> float:
    """E[cost of route A] - E[cost of route B] when the other n-1 players pick A w.p. p."""
    gap = 0.0
    for k in range(n):  # k others on route A
        prob = comb(n - 1, k) * p**k * (1 - p) ** (n - 1 - k)
        gap += prob * (total / (k + 1) - c_b * (n - k))
    return gap


def symmetric_traffic_mixed_nash(n: int, carpool_total: CarpoolSpec = None,
                                 c_b: float = 1.5, grid: int = 2000) -> float:
    """Probability of route A in the lowest-p symmetric interior mixed equilibrium.

    Scans ``(0, 1)`` for the first sign change of the indifference gap and
    refines it with Brent's method.
    """
    total = resolve_carpool(carpool_total)(n)
    ps = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    gaps = np.array([_indifference_gap(p, n, total, c_b) for p in ps])
    change = np.flatnonzero(np.sign(gaps[:-1]) * np.sign(gaps[1:]) <= 0)
    if change.size == 0:
        raise NoInteriorEquilibrium(
            f"indifference gap keeps one sign on (0, 1) for n={n}, c_B={c_b}")
    k = change[0]
    if gaps[k] == 0.0:
        return float(ps[k])
    return float(brentq(_indifference_gap, ps[k], ps[k + 1],
                        args=(n, total, c_b), xtol=1e-15, rtol=1e-15))
