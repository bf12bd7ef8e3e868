"""Relationship networks and the cost modification they induce.

A relationship set is an ordered stack of ``m`` n-by-n adjacency matrices.
Given weights ``w`` the aggregate matrix ``W = sum_r w[r] * phi[r]`` makes
player ``i`` add ``W[i, j]`` times player ``j``'s cost to its own.

Network orderings are fixed because weights are positional:

* ``individual``: ordered pairs ``(i, j)``, ``i != j``, lexicographic.
* ``all_people``: one network per player ``i``, ones across row ``i``.
* ``reciprocity``: unordered pairs ``i < j``, lexicographic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .game import StaticGame

TYPES = ("individual", "all_people", "reciprocity", "custom")


@dataclass(frozen=True, eq=False)
class RelationshipNetworkSet:
    networks: np.ndarray
    type_tag: str = "custom"

    def __post_init__(self):
        nets = np.array(self.networks, dtype=float)
        if nets.ndim != 3 or nets.shape[1] != nets.shape[2]:
            raise ValueError(f"networks must have shape (m, n, n), got {nets.shape}")
        if nets.shape[0] < 1:
            raise ValueError("a relationship set needs at least one network")
        if not np.all(np.isfinite(nets)):
            raise ValueError("networks contain non-finite entries")
        for r, phi in enumerate(nets):
            if np.any(np.diag(phi) != 0):
                raise ValueError(f"network {r + 1} has a nonzero diagonal")
        if self.type_tag not in TYPES:
            raise ValueError(f"unknown relationship type {self.type_tag!r}")
        nets.setflags(write=False)
        object.__setattr__(self, "networks", nets)

    @property
    def num_networks(self) -> int:
        return self.networks.shape[0]

    @property
    def num_players(self) -> int:
        return self.networks.shape[1]

    def __len__(self):
        return self.num_networks

    def aggregate(self, w) -> np.ndarray:
        """``sum_r w[r] * phi[r]`` as an n-by-n matrix."""
        w = check_weights(self, w)
        return np.tensordot(w, self.networks, axes=1)


def _check_n(n):
    if n < 2:
        raise ValueError(f"relationship sets need n >= 2 players, got {n}")


def make_individual(n: int) -> RelationshipNetworkSet:
    _check_n(n)
    pairs = [(i, j) for i, j in itertools.product(range(n), repeat=2) if i != j]
    nets = np.zeros((len(pairs), n, n))
    for r, (i, j) in enumerate(pairs):
        nets[r, i, j] = 1.0
    return RelationshipNetworkSet(nets, "individual")


def make_all_people(n: int) -> RelationshipNetworkSet:
    _check_n(n)
    nets = np.zeros((n, n, n))
    for i in range(n):
        nets[i, i, :] = 1.0
        nets[i, i, i] = 0.0
    return RelationshipNetworkSet(nets, "all_people")


def make_reciprocity(n: int) -> RelationshipNetworkSet:
    _check_n(n)
    pairs = list(itertools.combinations(range(n), 2))
    nets = np.zeros((len(pairs), n, n))
    for r, (i, j) in enumerate(pairs):
        nets[r, i, j] = nets[r, j, i] = 1.0
    return RelationshipNetworkSet(nets, "reciprocity")


_MAKERS = {
    "individual": make_individual,
    "all_people": make_all_people,
    "reciprocity": make_reciprocity,
}


def make_relationships(kind: str, n: int) -> RelationshipNetworkSet:
    """Build one of the standard relationship sets by name."""
    try:
        return _MAKERS[kind.replace("-", "_")](n)
    except KeyError:
        raise ValueError(
            f"unknown relationship type {kind!r}; expected one of {sorted(_MAKERS)}") from None


def check_weights(phi: RelationshipNetworkSet, w, nonnegative: bool = False) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (phi.num_networks,):
        raise ValueError(
            f"weight vector has shape {w.shape}, relationship set has "
            f"{phi.num_networks} networks")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if nonnegative and np.any(w < 0):
        raise ValueError("negative weight in nonnegative mode")
    return w


def check_compatible(g: StaticGame, phi: RelationshipNetworkSet):
    if phi.num_players != g.num_players:
        raise ValueError(
            f"relationship networks are {phi.num_players}x{phi.num_players} "
            f"but the game has {g.num_players} players")


def modify_costs(g: StaticGame, phi: RelationshipNetworkSet, w) -> StaticGame:
    """Return the game with costs ``u~^i = u^i + sum_j W[i, j] u^j``.

    The input game is left untouched.
    """
    check_compatible(g, phi)
    W = np.eye(g.num_players) + phi.aggregate(w)
    mixed = np.tensordot(W, g.stacked_costs(), axes=(1, 0))
    return StaticGame(tuple(mixed), g.strategy_labels)
