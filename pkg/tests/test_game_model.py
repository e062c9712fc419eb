import numpy as np
import pytest

from groupgame.game_model import (
    DomainError,
    GameError,
    GroupedGame,
    GroupSpec,
    Interval,
    InvalidPairError,
    InvalidPlayerError,
    StrategyProfile,
    check_group_symmetry,
    check_group_zero_sum,
    evaluate_payoff,
    relativize,
)


def toy_game(groups=GroupSpec(3, 2)):
    def absolute(player, g1, g2):
        if player < groups.m:
            x = g1[player]
            return 3 * x - x * x + 0.5 * x * sum(g2)
        y = g2[player - groups.m]
        return 2 * y - y * y - 0.25 * y * sum(g1)

    box = Interval(0.0, 2.0)
    return GroupedGame(groups, box, box, relativize(groups, absolute))


def test_labels_follow_fixed_order():
    assert GroupSpec().labels() == ["A", "B", "E", "C", "D"]
    assert [GroupSpec().group_of(i) for i in range(5)] == [1, 1, 1, 2, 2]


@pytest.mark.parametrize("m,n", [(1, 2), (3, 1), (0, 0)])
def test_groups_need_two_members(m, n):
    with pytest.raises(GameError):
        GroupSpec(m, n)


@pytest.mark.parametrize("player", [-1, 5, 17])
def test_invalid_player(player):
    with pytest.raises(InvalidPlayerError):
        GroupSpec().group_of(player)
    with pytest.raises(InvalidPlayerError):
        evaluate_payoff(toy_game(), player, StrategyProfile([1, 1, 1], [1, 1]))


def test_interval_validation():
    with pytest.raises(GameError):
        Interval(1.0, 1.0)
    with pytest.raises(GameError):
        Interval(0.0, float("inf"))
    assert Interval(0.0, 4.0).midpoint == 2.0


def test_profile_outside_domain_rejected():
    game = toy_game()
    with pytest.raises(DomainError):
        evaluate_payoff(game, 0, StrategyProfile([3.0, 1, 1], [1, 1]))
    with pytest.raises(DomainError):
        evaluate_payoff(game, 0, StrategyProfile([1, 1], [1, 1]))


@pytest.mark.parametrize("groups", [GroupSpec(3, 2), GroupSpec(2, 2), GroupSpec(4, 3)])
def test_relativized_game_is_group_zero_sum_and_symmetric(groups):
    game = toy_game(groups)
    rng = np.random.default_rng(1)
    pairs = [(i, j) for i in range(groups.size) for j in range(i + 1, groups.size)
             if groups.group_of(i) == groups.group_of(j)]
    for _ in range(100):
        p = game.random_profile(rng)
        assert check_group_zero_sum(game, p).ok
        for i, j in pairs:
            assert check_group_symmetry(game, p, i, j)


def test_corrupted_oracle_is_detected():
    base = toy_game()

    def corrupted(player, g1, g2):
        return base.payoff(player, g1, g2) + (1.0 if player == 0 else 0.0)

    game = GroupedGame(base.groups, base.space1, base.space2, corrupted)
    res = check_group_zero_sum(game, StrategyProfile([0.3, 0.7, 1.1], [0.2, 0.9]))
    assert not res.ok
    assert res.residual_g1 == pytest.approx(1.0, abs=1e-12)
    assert abs(res.residual_g2) <= 1e-12


def test_asymmetric_oracle_is_detected():
    groups = GroupSpec(3, 2)

    def absolute(player, g1, g2):
        if player < 3:
            return g1[player] * (1 + player)  # player weight breaks symmetry
        return g2[player - 3]

    game = GroupedGame(groups, Interval(0, 1), Interval(0, 1), relativize(groups, absolute))
    assert not check_group_symmetry(game, StrategyProfile([0.2, 0.5, 0.9], [0.1, 0.4]), 0, 1)


def test_cross_group_pair_rejected():
    with pytest.raises(InvalidPairError):
        check_group_symmetry(toy_game(), StrategyProfile([1, 1, 1], [1, 1]), 0, 3)


def test_evaluate_payoff_is_pure():
    game = toy_game()
    p = StrategyProfile([0.1234, 1.5, 0.77], [1.9, 0.001])
    first = [evaluate_payoff(game, k, p) for k in range(5)]
    for _ in range(5):
        assert [evaluate_payoff(game, k, p) for k in range(5)] == first


def test_profile_helpers():
    p = StrategyProfile.symmetric(GroupSpec(3, 2), 1.0, 2.0)
    assert p.g1 == (1.0, 1.0, 1.0) and p.g2 == (2.0, 2.0)
    q = p.with_strategy(1, 5.0).swapped(0, 1)
    assert q.g1 == (5.0, 1.0, 1.0)
    assert q.strategy(3) == 2.0
