"""JSON formats for games, relationship sets and scenario specs.

Game file::

    {"players": 2,
     "strategies": [["C", "D"], ["C", "D"]],
     "costs": [[[1, 3], [0, 2]], [[1, 0], [3, 2]]],
     "social_cost": "sum"}

``costs[i]`` is player ``i + 1``'s tensor, nested with player 1 outermost.
``social_cost`` is optional: ``"sum"`` (default) or an explicit nested array.
A file holding a ``"scenario"`` key is built from the scenario generators.
"""
from __future__ import annotations

import json
import os
from typing import Union

import numpy as np

from .game import SUM_OF_COSTS, SocialCost, StaticGame
from .relationship import RelationshipNetworkSet, make_relationships
from .scenarios import make_prisoners_dilemma, make_traffic_game


class GameFormatError(ValueError):
    pass


def _load_json(src):
    if isinstance(src, dict):
        return src
    if isinstance(src, (str, os.PathLike)):
        try:
            with open(src) as f:
                return json.load(f)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"{src}: invalid JSON ({exc})") from None
    raise TypeError(f"cannot load JSON from {type(src).__name__}")


def _require(d, key, what):
    if key not in d:
        raise GameFormatError(f"{what} is missing required key {key!r}")
    return d[key]


def game_from_dict(d: dict):
    """Parse a game (or scenario) mapping into ``(StaticGame, SocialCost)``."""
    if not isinstance(d, dict):
        raise GameFormatError("game description must be a JSON object")
    if "scenario" in d:
        return scenario_from_dict(d)
    n = _require(d, "players", "game")
    strategies = _require(d, "strategies", "game")
    costs = _require(d, "costs", "game")
    if not isinstance(n, int) or n < 2:
        raise GameFormatError(f"'players' must be an integer >= 2, got {n!r}")
    if len(strategies) != n:
        raise GameFormatError(f"'strategies' lists {len(strategies)} players, expected {n}")
    if len(costs) != n:
        raise GameFormatError(f"'costs' lists {len(costs)} players, expected {n}")
    shape = tuple(len(s) for s in strategies)
    tensors = []
    for i, c in enumerate(costs):
        try:
            t = np.array(c, dtype=float)
        except (TypeError, ValueError):
            raise GameFormatError(f"costs for player {i + 1} are ragged or non-numeric") from None
        if t.shape != shape:
            raise GameFormatError(
                f"costs for player {i + 1} have shape {t.shape}, expected {shape}")
        tensors.append(t)
    sc = d.get("social_cost", "sum")
    if sc == "sum":
        V = SUM_OF_COSTS
    else:
        V = SocialCost(np.array(sc, dtype=float))
        if V.tensor.shape != shape:
            raise GameFormatError(
                f"social_cost has shape {V.tensor.shape}, expected {shape}")
    try:
        return StaticGame(tuple(tensors), strategies), V
    except ValueError as exc:
        raise GameFormatError(str(exc)) from None


def load_game(src: Union[str, os.PathLike, dict]):
    return game_from_dict(_load_json(src))


def game_to_dict(g: StaticGame, V: SocialCost = SUM_OF_COSTS) -> dict:
    labels = g.strategy_labels or tuple(
        tuple(str(a + 1) for a in range(c)) for c in g.strategy_counts)
    return {
        "players": g.num_players,
        "strategies": [list(l) for l in labels],
        "costs": [t.tolist() for t in g.cost_tensors],
        "social_cost": "sum" if V is None or V.is_sum else V.tensor.tolist(),
    }


def save_game(path, g: StaticGame, V: SocialCost = SUM_OF_COSTS):
    with open(path, "w") as f:
        json.dump(game_to_dict(g, V), f)


def scenario_from_dict(d: dict):
    kind = _require(d, "scenario", "scenario")
    if kind == "prisoners_dilemma":
        return make_prisoners_dilemma(), SUM_OF_COSTS
    if kind == "traffic":
        n = _require(d, "n", "traffic scenario")
        g = make_traffic_game(int(n), int(d.get("routes", 2)),
                              d.get("carpool_total", "paper_table"), d.get("coeffs"))
        return g, SUM_OF_COSTS
    raise GameFormatError(f"unknown scenario {kind!r}")


def relationships_from_spec(spec, n: int) -> RelationshipNetworkSet:
    """Relationship set from a type name, a JSON file path, or a parsed mapping."""
    if isinstance(spec, str) and not os.path.exists(spec):
        return make_relationships(spec, n)
    d = _load_json(spec)
    kind = _require(d, "type", "relationship spec")
    if kind == "custom":
        nets = np.array(_require(d, "networks", "custom relationship spec"), dtype=float)
        phi = RelationshipNetworkSet(nets, "custom")
    else:
        phi = make_relationships(kind, n)
    if phi.num_players != n:
        raise GameFormatError(
            f"relationship networks are {phi.num_players}x{phi.num_players} "
            f"but the game has {n} players")
    return phi
