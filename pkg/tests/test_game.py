import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reldesign.game import (MAX_PROFILES, ProfileSpaceTooLarge, SocialCost,
                            StaticGame, best_social_profile, enumerate_pure_nash,
                            expected_cost, expected_cost_vector,
                            expected_social_cost, is_pure_nash, point_mass,
                            social_cost)
from reldesign.scenarios import make_traffic_game

from conftest import random_game
import oracles

seeds = st.integers(0, 2**32 - 1)


def zero_game(shape):
    return StaticGame(tuple(np.zeros(shape) for _ in shape))


# -- construction -------------------------------------------------------------

def test_rejects_mismatched_tensor_shape():
    with pytest.raises(ValueError, match="player 2"):
        StaticGame((np.zeros((2, 2)), np.zeros((2, 3))))


def test_rejects_single_player_and_nonfinite():
    with pytest.raises(ValueError):
        StaticGame((np.zeros(2),))
    with pytest.raises(ValueError, match="non-finite"):
        StaticGame((np.zeros((2, 2)), np.full((2, 2), np.nan)))


def test_cost_tensors_are_read_only(traffic3):
    with pytest.raises(ValueError):
        traffic3.cost_tensors[0][0, 0, 0] = 1.0


# -- expected_cost --------------------------------------------------------------

def test_expected_cost_point_mass_is_entry(rng):
    t = rng.normal(size=(2, 3, 2))
    for s in itertools.product(range(2), range(3), range(2)):
        x = point_mass(tuple(a + 1 for a in s), t.shape)
        assert expected_cost(x, t) == t[s]


def test_expected_cost_symmetric_traffic_mix(traffic3):
    x = [np.array([0.355, 0.645])] * 3
    V = sum(traffic3.cost_tensors)
    assert expected_cost(x, V) == pytest.approx(10.30, abs=0.01)


def test_expected_cost_uniform_is_average(rng):
    t = rng.normal(size=(2, 2, 2))
    x = [np.full(2, 0.5)] * 3
    assert expected_cost(x, t) == pytest.approx(t.mean(), abs=1e-14)


def test_expected_cost_matches_brute_force(rng):
    t = rng.normal(size=(3, 2, 4))
    x = [rng.dirichlet(np.ones(c)) for c in t.shape]
    assert expected_cost(x, t) == pytest.approx(oracles.expected_value(t, x), rel=1e-12)


def test_expected_cost_rejects_unnormalized():
    with pytest.raises(ValueError, match="probability"):
        expected_cost([np.array([0.5, 0.6]), np.array([0.5, 0.5])], np.zeros((2, 2)))


def test_expected_cost_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        expected_cost([np.array([1.0]), np.array([0.5, 0.5])], np.zeros((2, 2)))


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.0, 1.0))
def test_expected_cost_is_affine_in_each_player(seed, a):
    rng = np.random.default_rng(seed)
    t = rng.normal(size=(2, 3, 2))
    x = [rng.dirichlet(np.ones(c)) for c in t.shape]
    for i in range(3):
        y0, y1 = rng.dirichlet(np.ones(t.shape[i])), rng.dirichlet(np.ones(t.shape[i]))
        mix = list(x)
        mix[i] = a * y0 + (1 - a) * y1
        e0, e1 = list(x), list(x)
        e0[i], e1[i] = y0, y1
        assert expected_cost(mix, t) == pytest.approx(
            a * expected_cost(e0, t) + (1 - a) * expected_cost(e1, t), abs=1e-12)


# -- expected_cost_vector -----------------------------------------------------

def test_cost_vector_point_masses_gives_fiber(rng):
    t = rng.normal(size=(2, 3, 2))
    v = expected_cost_vector([np.array([0.0, 1.0]), np.array([1.0, 0.0])], t, 1)
    np.testing.assert_array_equal(v, t[1, :, 0])


def test_cost_vector_indifference_at_mixed_equilibrium(traffic3):
    mix = np.array([0.355, 0.645])
    v = expected_cost_vector([mix, mix], traffic3.cost_tensors[0], 0)
    assert v[0] == pytest.approx(v[1], abs=1e-2)


def test_cost_vector_contracts_to_expected_cost(rng):
    for _ in range(10):
        t = rng.normal(size=(3, 2, 2))
        x = [rng.dirichlet(np.ones(c)) for c in t.shape]
        for i in range(3):
            v = expected_cost_vector(x[:i] + x[i + 1:], t, i)
            assert v @ x[i] == pytest.approx(expected_cost(x, t), abs=1e-12)
            np.testing.assert_allclose(v, oracles.strategy_costs(t, x, i), atol=1e-12)


# -- pure Nash --------------------------------------------------------------------

def test_table_nash_four_players():
    assert is_pure_nash(make_traffic_game(4), (2, 1, 1, 1))


def test_zero_game_every_profile_nash():
    g = zero_game((2, 3))
    assert all(is_pure_nash(g, s) for s in [(1, 1), (2, 3), (1, 2)])
    assert len(enumerate_pure_nash(g)) == 6


def test_is_pure_nash_agrees_with_exhaustive_check(rng):
    for _ in range(50):
        g = random_game(rng, 3, 2)
        for s in itertools.product((1, 2), repeat=3):
            expected = oracles.is_nash(g.cost_tensors, [a - 1 for a in s])
            assert is_pure_nash(g, s) == expected


def test_weak_inequality_admits_ties():
    u = np.array([[1.0, 1.0], [1.0, 1.0]])
    g = StaticGame((u, u))
    assert is_pure_nash(g, (1, 2), tol=0.0)


def test_enumerate_two_player_traffic():
    assert enumerate_pure_nash(make_traffic_game(2)) == [(2, 2)]


def test_enumerate_matches_oracle_three_player(traffic3):
    assert set(enumerate_pure_nash(traffic3)) == oracles.nash_set(traffic3.cost_tensors)


def test_enumerate_guard(monkeypatch):
    import reldesign.game as game
    monkeypatch.setattr(game, "MAX_PROFILES", 3)
    with pytest.raises(ProfileSpaceTooLarge):
        enumerate_pure_nash(zero_game((2, 2)))
    assert MAX_PROFILES == 10**7


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(0, 2), st.floats(-50, 50))
def test_nash_set_invariant_under_constant_shift(seed, player, shift):
    rng = np.random.default_rng(seed)
    g = random_game(rng, 3, 2)
    costs = list(g.cost_tensors)
    costs[player] = costs[player] + shift
    assert enumerate_pure_nash(StaticGame(tuple(costs))) == enumerate_pure_nash(g)


def test_nash_iff_best_response_fibers(rng):
    for _ in range(20):
        g = random_game(rng, 3, (2, 3, 2))
        for s in itertools.product(range(2), range(3), range(2)):
            pm = point_mass(tuple(a + 1 for a in s), g.strategy_counts)
            best = all(
                expected_cost_vector(pm[:i] + pm[i + 1:], u, i).min() >= u[s]
                for i, u in enumerate(g.cost_tensors))
            assert is_pure_nash(g, tuple(a + 1 for a in s)) == best


def test_profile_validation(traffic3):
    with pytest.raises(ValueError, match="player 2"):
        is_pure_nash(traffic3, (1, 3, 1))
    with pytest.raises(ValueError):
        is_pure_nash(traffic3, (1, 1))


# -- social cost --------------------------------------------------------------------

def test_social_cost_all_carpool(traffic3):
    assert social_cost(traffic3, None, (1, 1, 1)) == pytest.approx(5.0)


def test_social_cost_five_player_nash():
    assert social_cost(make_traffic_game(5), None, (1, 2, 1, 1, 1)) == pytest.approx(9.83, abs=0.01)


def test_expected_social_cost_point_mass(traffic3):
    for s in itertools.product((1, 2), repeat=3):
        x = point_mass(s, traffic3.strategy_counts)
        assert expected_social_cost(traffic3, None, x) == pytest.approx(
            social_cost(traffic3, None, s), abs=1e-12)


def test_explicit_social_cost_tensor(traffic3):
    V = SocialCost(np.arange(8.0).reshape(2, 2, 2))
    assert social_cost(traffic3, V, (2, 1, 2)) == 5.0
    with pytest.raises(ValueError, match="shape"):
        social_cost(traffic3, SocialCost(np.zeros((2, 2))), (1, 1, 1))


@pytest.mark.parametrize("n, profile, value", [
    (3, (1, 1, 1), 5.0),
    (4, (1, 1, 1, 1), 6.67),
])
def test_best_social_profile(n, profile, value):
    s, v = best_social_profile(make_traffic_game(n))
    assert s == profile
    assert v == pytest.approx(value, abs=0.01)


def test_best_social_profile_ties_lexicographic():
    g = zero_game((2, 3, 2))
    assert best_social_profile(g, np.ones((2, 3, 2))) == ((1, 1, 1), 1.0)
