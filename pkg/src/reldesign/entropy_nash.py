"""Entropy-regularized Nash equilibria, their derivatives, and weight descent.

With Shannon entropy (natural log) and weight ``lam`` each player's best
response is ``softmax(-h_i / lam)``, where ``h_i`` is its vector of expected
costs per pure strategy. This is the logit quantal response equilibrium.
The equilibrium solves ``F(x) = x - s(x) = 0``; it is found with Newton's
method and differentiated with respect to the relationship weights by the
implicit function theorem.

A mixed profile is handled internally as one flat vector, player blocks in
order.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .game import StaticGame, contract, social_cost_tensor
from .relationship import RelationshipNetworkSet, check_weights, modify_costs

COND_LIMIT = 1e12
RIDGE = 1e-10
BACKTRACK = (1.0, 0.5, 0.25, 0.125)


class ConvergenceError(RuntimeError):
    """The solver ran out of iterations; carries the last residual and iterate."""

    def __init__(self, message, residual=None, x=None):
        super().__init__(message)
        self.residual = residual
        self.x = x


class DivergenceError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class IllConditionedWarning(RuntimeWarning):
    """The equilibrium Jacobian was near-singular; a ridge-regularized solve was used."""


@dataclass(frozen=True)
class EntropyNashConfig:
    lam: float = 0.3
    epsilon: float = 1e-6
    max_iter: int = 200
    seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"entropy weight must be positive, got {self.lam}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class GDConfig:
    """Step size, gradient-norm threshold, L1 penalty and step cap for weight descent.

    ``warm_start`` seeds each equilibrium solve with the previous step's
    equilibrium instead of a fresh random draw.
    """

    alpha: float = 0.01
    beta: float = 0.1
    gamma: float = 1.0
    max_steps: int = 2000
    warm_start: bool = False
    patience: int = 50

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


# -- flat layout helpers -------------------------------------------------------

def _offsets(counts):
    return np.concatenate([[0], np.cumsum(counts)])


def flatten(x: Sequence) -> np.ndarray:
    return np.concatenate([np.asarray(xi, dtype=float) for xi in x])


def unflatten(v: np.ndarray, counts) -> list:
    off = _offsets(counts)
    return [v[off[i]:off[i + 1]] for i in range(len(counts))]


# -- softmax -------------------------------------------------------------------

def softmax(v, lam: float = 1.0) -> np.ndarray:
    """Probability vector with entry ``k`` proportional to ``exp(-v[k] / lam)``."""
    z = -np.asarray(v, dtype=float) / lam
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def softmax_jacobian(p: np.ndarray) -> np.ndarray:
    """Jacobian of softmax with respect to its logits, given its output ``p``."""
    return np.diag(p) - np.outer(p, p)


# -- fixed-point map -----------------------------------------------------------

def expected_cost_vectors(g: StaticGame, x: Sequence) -> list:
    """``h_i`` for every player; ``x`` need not lie on the simplex."""
    return [contract(u, x, keep=(i,)) for i, u in enumerate(g.cost_tensors)]


def fixed_point_map(g: StaticGame, x: Sequence, lam: float) -> list:
    """Each player's smoothed best response ``softmax(-h_i / lam)`` to ``x``."""
    return [softmax(h, lam) for h in expected_cost_vectors(g, x)]


def residual(g: StaticGame, x: Sequence, lam: float) -> float:
    """``||x - s(x)||_2``."""
    return float(np.linalg.norm(flatten(x) - flatten(fixed_point_map(g, x, lam))))


def _cross(t, x, i, j):
    """Matrix ``[a_i, a_j]`` of ``t`` contracted with every player but ``i`` and ``j``."""
    m = contract(t, x, keep=(i, j))
    return m if i < j else m.T


def jacobian_F(g: StaticGame, x: Sequence, lam: float) -> np.ndarray:
    """Jacobian of ``F(x) = x - s(x)``; rows index F blocks, columns index x blocks.

    Block ``(j, i)`` for ``i != j`` equals ``J_softmax(s^j) @ dh_j/dx^i / lam``;
    diagonal blocks are the identity because ``h_j`` does not depend on ``x^j``.
    """
    counts = g.strategy_counts
    off = _offsets(counts)
    J = np.eye(off[-1])
    for j, u in enumerate(g.cost_tensors):
        p = softmax(contract(u, x, keep=(j,)), lam)
        Jsm = softmax_jacobian(p)
        for i in range(g.num_players):
            if i == j:
                continue
            dh = _cross(u, x, j, i)
            J[off[j]:off[j + 1], off[i]:off[i + 1]] = Jsm @ dh / lam
    return J


# -- solver --------------------------------------------------------------------

@dataclass
class EntropyNashResult:
    x: list
    iterations: int
    residual: float
    fallback_steps: int = 0
    continued: bool = False

    @property
    def flat(self) -> np.ndarray:
        return flatten(self.x)


def _random_profile(counts, seed):
    rng = np.random.default_rng(seed)
    return [rng.dirichlet(np.ones(c)) for c in counts]


def _newton(g, x, lam, eps, max_iter):
    """Run the safeguarded Newton loop. Returns (profile, iterations, residual, fallbacks, ok)."""
    counts = g.strategy_counts
    fallbacks = 0
    for it in range(1, max_iter + 1):
        xs = unflatten(x, counts)
        s = flatten(fixed_point_map(g, xs, lam))
        F = x - s
        res = np.linalg.norm(F)
        J = jacobian_F(g, xs, lam)
        d = None
        if np.linalg.cond(J) < COND_LIMIT:
            d = np.linalg.solve(J, F)
        if d is not None and np.linalg.norm(d) < eps:
            out = fixed_point_map(g, xs, lam)
            out_res = residual(g, out, lam)
            if out_res < eps:
                return out, it, out_res, fallbacks, True
            x = flatten(out)
            continue
        if d is not None:
            accepted = False
            for t in BACKTRACK:
                x_new = x - t * d
                if residual(g, unflatten(x_new, counts), lam) <= res:
                    x, accepted = x_new, True
                    break
            if accepted:
                continue
        fallbacks += 1
        x = x + 0.5 * (s - x)
    out = fixed_point_map(g, unflatten(x, counts), lam)
    out_res = residual(g, out, lam)
    return out, max_iter, out_res, fallbacks, out_res < eps


def _continuation(g, lam, eps, max_iter):
    """Track the equilibrium from a large entropy weight down to ``lam``.

    At large weights the smoothed best-response map is a contraction with a
    near-uniform fixed point; log-spaced steps shrink on failure.
    """
    span = max(float(np.ptp(u)) for u in g.cost_tensors)
    lam_hi = max(lam, 10.0 * span, 1.0)
    if lam_hi == lam:
        return None
    x = flatten([np.full(c, 1.0 / c) for c in g.strategy_counts])
    t, h, total = 0.0, 0.1, 0
    while t < 1.0:
        t_next = min(1.0, t + h)
        lam_t = lam_hi * (lam / lam_hi) ** t_next
        out, it, res, _, ok = _newton(g, x, lam_t, eps, 50)
        total += it
        if ok:
            x, t, h = flatten(out), t_next, min(0.25, 1.5 * h)
        else:
            h /= 2
            if h < 1e-4 or total > 50 * max_iter:
                return None
    return out, total, res


def solve(g: StaticGame, cfg: EntropyNashConfig = EntropyNashConfig(),
          x0: Optional[Sequence] = None, continuation: bool = True) -> EntropyNashResult:
    """Newton iteration on ``x - s(x) = 0``.

    Starts from ``x0`` or a seeded Dirichlet draw. A Newton step that would
    raise the residual is shortened up to three times; if that fails, or the
    Jacobian is near-singular, the damped update ``x + (s - x) / 2`` is used.
    If the loop still fails and ``continuation`` is set, the equilibrium is
    traced from a large entropy weight down to ``cfg.lam`` instead.
    The returned profile is ``s(x)`` at the final iterate, so every
    distribution lies exactly on the simplex.

    Raises
    ------
    ConvergenceError
        If no profile with residual below ``cfg.epsilon`` is found.
    """
    counts = g.strategy_counts
    x = flatten(x0) if x0 is not None else flatten(_random_profile(counts, cfg.seed))
    out, it, res, fallbacks, ok = _newton(g, x, cfg.lam, cfg.epsilon, cfg.max_iter)
    if ok:
        return EntropyNashResult(out, it, res, fallbacks)
    if continuation:
        traced = _continuation(g, cfg.lam, cfg.epsilon, cfg.max_iter)
        if traced is not None:
            out2, it2, res2 = traced
            return EntropyNashResult(out2, it + it2, res2, fallbacks, continued=True)
    raise ConvergenceError(
        f"entropy-Nash solve did not converge in {cfg.max_iter} iterations "
        f"(residual {res:.3e}, epsilon {cfg.epsilon:.1e})", res, out)


# -- implicit differentiation -------------------------------------------------

def _regularized_solve(A, B):
    if np.linalg.cond(A) < COND_LIMIT:
        return np.linalg.solve(A, B)
    warnings.warn("near-singular equilibrium Jacobian; using ridge-regularized solve",
                  IllConditionedWarning, stacklevel=3)
    return np.linalg.solve(A.T @ A + RIDGE * np.eye(A.shape[1]), A.T @ B)


def jacobian_w(g: StaticGame, phi: RelationshipNetworkSet, w, x: Sequence,
               lam: float) -> np.ndarray:
    """Partial Jacobian of ``F`` with respect to the weights at fixed ``x``.

    Uses ``d u~^i / d w_r = sum_j phi_r[i, j] u^j`` with ``g`` the unmodified game.
    """
    w = check_weights(phi, w)
    modified = modify_costs(g, phi, w)
    counts = g.strategy_counts
    off = _offsets(counts)
    out = np.zeros((off[-1], phi.num_networks))
    for i in range(g.num_players):
        p = softmax(contract(modified.cost_tensors[i], x, keep=(i,)), lam)
        # column j: expected cost vector of player j's original costs, seen by i
        H = np.stack([contract(u, x, keep=(i,)) for u in g.cost_tensors], axis=1)
        out[off[i]:off[i + 1]] = softmax_jacobian(p) @ H @ phi.networks[:, i, :].T / lam
    return out


def equilibrium_gradient(g: StaticGame, phi: RelationshipNetworkSet, w,
                         x_solved: Sequence, lam: float) -> np.ndarray:
    """``dx/dw`` at an equilibrium of the modified game, shape ``(sum |S^i|, m)``."""
    modified = modify_costs(g, phi, w)
    Jx = jacobian_F(modified, x_solved, lam)
    Jw = jacobian_w(g, phi, w, x_solved, lam)
    return -_regularized_solve(Jx, Jw)


def social_cost_partials(g: StaticGame, V, x: Sequence) -> np.ndarray:
    """Gradient of the expected social cost with respect to the flat profile."""
    Vt = social_cost_tensor(g, V)
    return np.concatenate([contract(Vt, x, keep=(i,)) for i in range(g.num_players)])


def _value_and_gradient(g, V, phi, w, cfg, x0=None):
    modified = modify_costs(g, phi, w)
    sol = solve(modified, cfg, x0)
    Vt = social_cost_tensor(g, V)
    J = float(contract(Vt, sol.x))
    dxdw = equilibrium_gradient(g, phi, w, sol.x, cfg.lam)
    grad = social_cost_partials(g, Vt, sol.x) @ dxdw
    return J, grad, sol


def social_cost_gradient(g: StaticGame, V, phi: RelationshipNetworkSet, w,
                         cfg: EntropyNashConfig = EntropyNashConfig(),
                         x0: Optional[Sequence] = None) -> np.ndarray:
    """Gradient of ``w -> J(x*(w), V)`` where ``x*(w)`` is the entropy-Nash equilibrium."""
    return _value_and_gradient(g, V, phi, check_weights(phi, w), cfg, x0)[1]


# -- weight descent ------------------------------------------------------------

@dataclass
class GDResult:
    w: np.ndarray
    x: list
    steps: int
    converged: bool
    trace: list = field(default_factory=list, repr=False)

    @property
    def expected_social_cost(self) -> float:
        return self.trace[-1]["expected_social_cost"]


TRACE_FIELDS = ("step", "objective", "expected_social_cost", "l1_norm", "grad_norm")


def gradient_descent(g: StaticGame, V, phi: RelationshipNetworkSet,
                     en_cfg: EntropyNashConfig = EntropyNashConfig(),
                     gd_cfg: GDConfig = GDConfig(), w0=None) -> GDResult:
    """Minimize ``J(x*(w), V) + gamma * ||w||_1`` by (sub)gradient descent.

    Starts at ``w = 1/m`` unless ``w0`` is given. The L1 subgradient uses
    ``sign(0) = 0``. Stops once the Euclidean norm of the full gradient drops
    below ``beta``, or after ``max_steps`` updates (``converged=False``).

    Raises
    ------
    DivergenceError
        If the objective rises for ``gd_cfg.patience`` consecutive steps.
    """
    m = phi.num_networks
    w = np.full(m, 1.0 / m) if w0 is None else check_weights(phi, w0).copy()
    trace = []
    x_prev = None
    rises = 0
    converged = False
    step = 0
    while True:
        J, gJ, sol = _value_and_gradient(g, V, phi, w, en_cfg,
                                         x_prev if gd_cfg.warm_start else None)
        x_prev = sol.x
        grad = gJ + gd_cfg.gamma * np.sign(w)
        gnorm = float(np.linalg.norm(grad))
        l1 = float(np.abs(w).sum())
        obj = J + gd_cfg.gamma * l1
        if trace and obj > trace[-1]["objective"]:
            rises += 1
        else:
            rises = 0
        trace.append(dict(zip(TRACE_FIELDS, (step, obj, J, l1, gnorm))))
        if gnorm < gd_cfg.beta:
            converged = True
            break
        if rises >= gd_cfg.patience:
            raise DivergenceError(
                f"objective rose for {rises} consecutive steps (last {obj:.6g})", trace)
        if step >= gd_cfg.max_steps:
            break
        w = w - gd_cfg.alpha * grad
        step += 1
    return GDResult(w, sol.x, step, converged, trace)
