"""Finite n-player static games in cost form.

Pure strategy profiles are 1-based tuples at the public surface (``(1, 1, 1)``
means every player picks its first strategy); all array work is 0-based.
Cost tensors are dense, player-1 axis outermost.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

PROB_TOL = 1e-9
NASH_TOL = 1e-9
MAX_PROFILES = 10**7


class ProfileSpaceTooLarge(ValueError):
    """Raised when a brute-force routine would enumerate too many profiles."""


@dataclass(frozen=True, eq=False)
class StaticGame:
    """An n-player game given by one cost tensor per player.

    Parameters
    ----------
    cost_tensors : sequence of array_like
        ``cost_tensors[i][s]`` is player ``i``'s cost at pure profile ``s``.
        Every tensor has shape ``strategy_counts``.
    strategy_labels : sequence of sequence of str, optional
        Human-readable strategy names, one list per player.
    """

    cost_tensors: tuple
    strategy_labels: Optional[tuple] = None

    def __post_init__(self):
        tensors = [np.array(t, dtype=float) for t in self.cost_tensors]
        n = len(tensors)
        if n < 2:
            raise ValueError(f"a game needs at least 2 players, got {n}")
        shape = tensors[0].shape
        if len(shape) != n:
            raise ValueError(
                f"player 1 cost tensor has {len(shape)} axes, expected {n}")
        if any(c < 1 for c in shape):
            raise ValueError(f"every player needs >= 1 strategy, got {shape}")
        for i, t in enumerate(tensors):
            if t.shape != shape:
                raise ValueError(
                    f"player {i + 1} cost tensor has shape {t.shape}, "
                    f"expected {shape}")
            if not np.all(np.isfinite(t)):
                raise ValueError(f"player {i + 1} costs contain non-finite values")
            t.setflags(write=False)
        object.__setattr__(self, "cost_tensors", tuple(tensors))
        if self.strategy_labels is not None:
            labels = tuple(tuple(str(a) for a in lab) for lab in self.strategy_labels)
            if len(labels) != n or any(len(l) != c for l, c in zip(labels, shape)):
                raise ValueError("strategy_labels do not match strategy counts")
            object.__setattr__(self, "strategy_labels", labels)

    @property
    def num_players(self) -> int:
        return len(self.cost_tensors)

    @property
    def strategy_counts(self) -> tuple:
        return self.cost_tensors[0].shape

    @property
    def num_profiles(self) -> int:
        return int(np.prod(self.strategy_counts))

    def stacked_costs(self) -> np.ndarray:
        """Costs as one array of shape ``(n, |S^1|, ..., |S^n|)``."""
        return np.stack(self.cost_tensors)

    def __repr__(self):
        return f"StaticGame(num_players={self.num_players}, strategy_counts={self.strategy_counts})"


@dataclass(frozen=True, eq=False)
class SocialCost:
    """Social cost ``V`` over pure profiles: the player-cost sum or an explicit tensor."""

    tensor: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.tensor is not None:
            t = np.array(self.tensor, dtype=float)
            if not np.all(np.isfinite(t)):
                raise ValueError("social cost tensor contains non-finite values")
            t.setflags(write=False)
            object.__setattr__(self, "tensor", t)

    @property
    def is_sum(self) -> bool:
        return self.tensor is None

    def materialize(self, g: StaticGame) -> np.ndarray:
        if self.tensor is None:
            return np.sum(g.stacked_costs(), axis=0)
        if self.tensor.shape != g.strategy_counts:
            raise ValueError(
                f"social cost shape {self.tensor.shape} does not match game "
                f"shape {g.strategy_counts}")
        return self.tensor


SUM_OF_COSTS = SocialCost()


def _social_tensor(g: StaticGame, V) -> np.ndarray:
    if V is None:
        V = SUM_OF_COSTS
    if isinstance(V, SocialCost):
        return V.materialize(g)
    return SocialCost(V).materialize(g)


# -- profiles -----------------------------------------------------------------

def to_index(s: Sequence[int], counts: Sequence[int]) -> tuple:
    """Convert a 1-based profile to a 0-based index tuple, validating it."""
    if len(s) != len(counts):
        raise ValueError(f"profile {list(s)} has {len(s)} entries, expected {len(counts)}")
    idx = []
    for i, (a, c) in enumerate(zip(s, counts)):
        a = int(a)
        if not 1 <= a <= c:
            raise ValueError(f"player {i + 1} strategy {a} outside 1..{c}")
        idx.append(a - 1)
    return tuple(idx)


def to_profile(index: Sequence[int]) -> tuple:
    """0-based index tuple to the 1-based public profile."""
    return tuple(int(a) + 1 for a in index)


def validate_mixed(x: Sequence, counts: Sequence[int]) -> list:
    """Check a mixed profile against strategy counts and return it as arrays.

    Distributions off the simplex by more than ``PROB_TOL`` are rejected, not
    renormalized.
    """
    if len(x) != len(counts):
        raise ValueError(f"mixed profile has {len(x)} players, expected {len(counts)}")
    out = []
    for i, (xi, c) in enumerate(zip(x, counts)):
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (c,):
            raise ValueError(f"player {i + 1} distribution has shape {xi.shape}, expected ({c},)")
        if np.any(xi < -PROB_TOL) or abs(xi.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"player {i + 1} distribution is not a probability vector: {xi}")
        out.append(xi)
    return out


def point_mass(s: Sequence[int], counts: Sequence[int]) -> list:
    """Mixed profile putting all mass on the 1-based pure profile ``s``."""
    idx = to_index(s, counts)
    out = []
    for a, c in zip(idx, counts):
        e = np.zeros(c)
        e[a] = 1.0
        out.append(e)
    return out


def uniform_profile(counts: Sequence[int]) -> list:
    return [np.full(c, 1.0 / c) for c in counts]


# -- contractions -------------------------------------------------------------

def contract(t: np.ndarray, x: Sequence, keep: Sequence[int] = ()) -> np.ndarray:
    """Contract every axis of ``t`` not in ``keep`` with the matching ``x[axis]``.

    Kept axes stay in their original relative order. Entries of ``x`` at kept
    positions are ignored and may be None. No simplex validation is done, so
    this also serves as the multilinear extension off the simplex.
    """
    keep = set(keep)
    out = np.asarray(t)
    for ax in reversed(range(out.ndim)):
        if ax not in keep:
            shape = out.shape
            before = int(np.prod(shape[:ax]))
            # (c,) @ (before, c, after) -> (before, 1, after)
            out = np.matmul(x[ax], out.reshape(before, shape[ax], -1))
            out = out.reshape(shape[:ax] + shape[ax + 1:])
    return out


def expected_cost(x: Sequence, t) -> float:
    """Expected value of the tensor ``t`` when player ``i`` plays ``x[i]`` independently."""
    t = np.asarray(t, dtype=float)
    x = validate_mixed(x, t.shape)
    return float(contract(t, x))


def expected_cost_vector(x_others: Sequence, t, i: int) -> np.ndarray:
    """Expected cost of each pure strategy of player ``i`` (0-based) against ``x_others``.

    ``x_others`` lists the mixed strategies of all players except ``i``, in
    player order.
    """
    t = np.asarray(t, dtype=float)
    n = t.ndim
    if not 0 <= i < n:
        raise ValueError(f"player index {i} outside 0..{n - 1}")
    if len(x_others) != n - 1:
        raise ValueError(f"expected {n - 1} opponent distributions, got {len(x_others)}")
    counts = [c for k, c in enumerate(t.shape) if k != i]
    full = list(validate_mixed(x_others, counts))
    full.insert(i, None)
    return contract(t, full, keep=(i,))


# -- pure equilibria ----------------------------------------------------------

def _check_guard(g: StaticGame):
    if g.num_profiles > MAX_PROFILES:
        raise ProfileSpaceTooLarge(
            f"{g.num_profiles} profiles exceeds the enumeration limit of {MAX_PROFILES}")


def _tol(values, tol):
    return tol * (1.0 + np.abs(values))


def is_pure_nash(g: StaticGame, s: Sequence[int], tol: float = NASH_TOL) -> bool:
    """Weak pure-Nash test: no unilateral deviation strictly lowers a player's cost.

    Ties count as equilibria. ``tol`` absorbs float noise relative to the cost
    magnitude; pass 0 for an exact comparison.
    """
    idx = to_index(s, g.strategy_counts)
    for i, u in enumerate(g.cost_tensors):
        fiber = u[idx[:i] + (slice(None),) + idx[i + 1:]]
        here = fiber[idx[i]]
        if np.any(fiber < here - _tol(here, tol)):
            return False
    return True


def pure_nash_mask(g: StaticGame, tol: float = NASH_TOL) -> np.ndarray:
    """Boolean tensor marking every pure Nash profile."""
    _check_guard(g)
    mask = np.ones(g.strategy_counts, dtype=bool)
    for i, u in enumerate(g.cost_tensors):
        best = u.min(axis=i, keepdims=True)
        mask &= u <= best + _tol(u, tol)
    return mask


def enumerate_pure_nash(g: StaticGame, tol: float = NASH_TOL) -> list:
    """All pure Nash profiles, 1-based, in lexicographic order."""
    return [to_profile(ix) for ix in np.argwhere(pure_nash_mask(g, tol))]


# -- social cost --------------------------------------------------------------

def social_cost(g: StaticGame, V, s: Sequence[int]) -> float:
    """``V(s)`` for a 1-based pure profile; ``V=None`` means the sum of player costs."""
    return float(_social_tensor(g, V)[to_index(s, g.strategy_counts)])


def expected_social_cost(g: StaticGame, V, x: Sequence) -> float:
    return expected_cost(x, _social_tensor(g, V))


def social_cost_tensor(g: StaticGame, V=None) -> np.ndarray:
    return _social_tensor(g, V)


def best_social_profile(g: StaticGame, V=None, tol: float = 1e-12):
    """Minimizer of ``V`` over pure profiles and its value.

    Ties (within ``tol`` relative) go to the lexicographically smallest profile.
    """
    _check_guard(g)
    t = _social_tensor(g, V)
    flat = t.ravel()
    vmin = flat.min()
    first = int(np.flatnonzero(flat <= vmin + tol * (1 + abs(vmin)))[0])
    ix = np.unravel_index(first, t.shape)
    return to_profile(ix), float(flat[first])
