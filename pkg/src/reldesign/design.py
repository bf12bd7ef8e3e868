"""Minimum-L1 weight design that makes a target pure profile a Nash equilibrium.

For a target ``t`` every unilateral deviation ``(i, a)`` yields one row

    sum_r w_r * sum_j phi_r[i, j] (u^j(t) - u^j(a, t_-i))  <=  u^i(a, t_-i) - u^i(t)

and the L1 norm is linearized with the split ``w = w_plus - w_minus``.
A budget row caps ``||w||_1 <= k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .game import StaticGame, is_pure_nash, to_index
from .lp import LinearProgram, LPNumericalError, solve_lp
from .relationship import RelationshipNetworkSet, check_compatible, modify_costs

SIGNED = "signed"
NONNEGATIVE = "nonnegative"


@dataclass(frozen=True)
class DesignConfig:
    """Budget ``k`` on ``||w||_1`` and whether weights may be negative."""

    k: float = 1.0
    sign_mode: str = SIGNED

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"budget k must be positive, got {self.k}")
        if self.sign_mode not in (SIGNED, NONNEGATIVE):
            raise ValueError(f"sign_mode must be {SIGNED!r} or {NONNEGATIVE!r}")


@dataclass(frozen=True)
class DesignResult:
    found: bool
    w: Optional[np.ndarray]
    lp_iterations: int = 0

    def __iter__(self):
        # allows ``found, w = design(...)``
        return iter((self.found, self.w))


def deviation_rows(g: StaticGame, phi: RelationshipNetworkSet, target: Sequence[int]):
    """Coefficient matrix (rows x m) and rhs of the Nash conditions at ``target``."""
    check_compatible(g, phi)
    idx = to_index(target, g.strategy_counts)
    U = g.stacked_costs()
    at_target = U[(slice(None),) + idx]
    rows, rhs = [], []
    for i, count in enumerate(g.strategy_counts):
        for a in range(count):
            if a == idx[i]:
                continue
            dev = idx[:i] + (a,) + idx[i + 1:]
            at_dev = U[(slice(None),) + dev]
            # sum_j phi_r[i, j] * (u^j(t) - u^j(dev)) for every r
            rows.append(phi.networks[:, i, :] @ (at_target - at_dev))
            rhs.append(at_dev[i] - at_target[i])
    m = phi.num_networks
    return np.array(rows).reshape(-1, m), np.array(rhs)


def build_design_lp(g: StaticGame, phi: RelationshipNetworkSet, target: Sequence[int],
                    cfg: DesignConfig = DesignConfig()) -> LinearProgram:
    D, rhs = deviation_rows(g, phi, target)
    m = phi.num_networks
    if cfg.sign_mode == SIGNED:
        A = np.hstack([D, -D])
        nvar = 2 * m
    else:
        A = D
        nvar = m
    ones = np.ones(nvar)
    A = np.vstack([A, ones])
    b = np.append(rhs, cfg.k)
    return LinearProgram(ones, A, b, nonnegative=True)


def weights_from_solution(z: np.ndarray, m: int, sign_mode: str) -> np.ndarray:
    if sign_mode == SIGNED:
        return z[:m] - z[m:]
    return z[:m].copy()


def design(g: StaticGame, phi: RelationshipNetworkSet, target: Sequence[int],
           cfg: DesignConfig = DesignConfig()) -> DesignResult:
    """Smallest-L1 ``w`` within budget making ``target`` a pure Nash of the modified game.

    A found ``w`` is re-checked against the modified game before it is
    returned; if float error breaks the Nash inequalities the LP is re-solved
    with a small safety margin on every row.

    Raises
    ------
    LPNumericalError
        If the simplex pivot cap is hit or no verified solution can be found
        for a feasible LP.
    """
    lp = build_design_lp(g, phi, target, cfg)
    m = phi.num_networks
    iters = 0
    for margin in (0.0, 1e-9, 1e-7):
        if margin:
            rhs = lp.constraint_rhs.copy()
            rhs[:-1] -= margin * (1.0 + np.abs(rhs[:-1]))
            lp = LinearProgram(lp.objective, lp.constraint_matrix, rhs)
        res = solve_lp(lp)
        iters += res.iterations
        if not res.optimal:
            if margin == 0.0:
                return DesignResult(False, None, iters)
            break
        w = weights_from_solution(res.z, m, cfg.sign_mode)
        if is_pure_nash(modify_costs(g, phi, w), target):
            return DesignResult(True, w, iters)
    raise LPNumericalError(
        f"design LP for target {tuple(target)} was feasible but no solution "
        f"passed the post-hoc Nash check")
