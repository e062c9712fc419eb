import numpy as np
import pytest
import sympy as sp

from groupgame.acceptance import sweep_params
from groupgame.equilibrium import SymmetricPoint, pair_slice, solve_best_response, solve_fixed_point
from groupgame.game_model import GroupSpec, StrategyProfile, check_group_symmetry, check_group_zero_sum, evaluate_payoff
from groupgame.oligopoly import (
    OligopolyParamError,
    OligopolyParams,
    build_game,
    closed_form_equilibrium,
    closed_form_saddle_strategies,
    inverse_demand,
)
from groupgame.scalar_opt import saddle_check


def test_reference_instance(ref_params):
    eq = closed_form_equilibrium(ref_params)
    assert eq.point.s1 == pytest.approx(14 / 9, abs=1e-12)
    assert eq.point.s2 == pytest.approx(10 / 3, abs=1e-12)
    assert eq.price1 == pytest.approx(2.0, abs=1e-9)
    assert eq.price2 == pytest.approx(1.0, abs=1e-9)


def test_b_zero():
    eq = closed_form_equilibrium(OligopolyParams(10.0, 0.0, 2.0, 1.0))
    assert (eq.point.s1, eq.point.s2) == pytest.approx((8 / 3, 9 / 2), abs=1e-12)


def test_equal_costs_ratio():
    eq = closed_form_equilibrium(OligopolyParams(10.0, 0.5, 3.0, 3.0))
    assert eq.point.s1 / eq.point.s2 == pytest.approx(2 / 3, rel=1e-12)


@pytest.mark.parametrize("groups", [GroupSpec(3, 2), GroupSpec(2, 2), GroupSpec(4, 5)])
def test_foc_and_price_identities(groups):
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 30:
        a = rng.uniform(2, 50)
        params = OligopolyParams(a, rng.uniform(0, 0.95), rng.uniform(0, a), rng.uniform(0, a), groups)
        try:
            eq = closed_form_equilibrium(params)
        except OligopolyParamError:
            continue
        m, n, b = groups.m, groups.n, params.b
        s1, s2 = eq.point.s1, eq.point.s2
        assert abs(a - m * s1 - n * b * s2 - params.c_A) <= 1e-9 * a
        assert abs(a - n * s2 - m * b * s1 - params.c_C) <= 1e-9 * a
        p1, p2 = inverse_demand(params, m * s1, n * s2)
        assert abs(p1 - params.c_A) <= 1e-9 * a and abs(p2 - params.c_C) <= 1e-9 * a
        game = build_game(params, cap=2 * a)
        prof = StrategyProfile.symmetric(groups, s1, s2)
        assert all(abs(evaluate_payoff(game, k, prof)) <= 1e-12 * a * a for k in range(groups.size))
        checked += 1


def test_closed_form_symbolically():
    """The closed form solves the first-order conditions of the relative profits."""
    a, b, cA, cC = sp.symbols("a b c_A c_C", real=True)
    xA, xB, xE, xC, xD = sp.symbols("x_A x_B x_E x_C x_D", real=True)
    p1 = a - (xA + xB + xE) - b * (xC + xD)
    p2 = a - (xC + xD) - b * (xA + xB + xE)
    bar = {xA: (p1 - cA) * xA, xB: (p1 - cA) * xB, xE: (p1 - cA) * xE,
           xC: (p2 - cC) * xC, xD: (p2 - cC) * xD}
    uA = bar[xA] - (bar[xB] + bar[xE]) / 2
    uC = bar[xC] - bar[xD]
    s1 = (b * cC - cA - a * b + a) / (3 * (1 - b) * (1 + b))
    s2 = (b * cA - cC - a * b + a) / (2 * (1 - b) * (1 + b))
    at = {xA: s1, xB: s1, xE: s1, xC: s2, xD: s2}
    assert sp.simplify(sp.diff(uA, xA).subs(at)) == 0
    assert sp.simplify(sp.diff(uC, xC).subs(at)) == 0
    # own-strategy curvature is negative (concave), rival curvature positive
    assert sp.diff(uA, xA, 2) == -2
    assert sp.diff(uA, xB, 2) == 1
    # prices at the closed form equal marginal costs
    assert sp.simplify(p1.subs(at) - cA) == 0
    assert sp.simplify(p2.subs(at) - cC) == 0


def test_ref_game_invariants(ref_game):
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = ref_game.random_profile(rng)
        assert check_group_zero_sum(ref_game, p).ok
        for i, j in ((0, 1), (0, 2), (1, 2), (3, 4)):
            assert check_group_symmetry(ref_game, p, i, j)


def test_b_zero_decouples_groups():
    game = build_game(OligopolyParams(10.0, 0.0, 2.0, 1.0))
    g1 = [1.0, 2.0, 0.5]
    assert game.payoff(0, g1, [0.0, 0.0]) == game.payoff(0, g1, [7.0, 3.0])
    assert game.payoff(3, [0.0] * 3, [1.0, 2.0]) == game.payoff(3, [5.0] * 3, [1.0, 2.0])


@pytest.mark.parametrize("kwargs,field", [
    (dict(a=10, b=1.0, c_A=2, c_C=1), "b"),
    (dict(a=10, b=-0.1, c_A=2, c_C=1), "b"),
    (dict(a=10, b=0.5, c_A=11, c_C=1), "c_A"),
    (dict(a=10, b=0.9, c_A=9, c_C=0), "c_A"),
])
def test_invalid_params(kwargs, field):
    with pytest.raises(OligopolyParamError) as info:
        build_game(OligopolyParams(**kwargs))
    assert info.value.field == field


def test_cap_must_cover_outputs(ref_params):
    with pytest.raises(OligopolyParamError):
        build_game(ref_params, cap=2.0)


def test_saddle_strategies(ref_params, ref_game):
    strategies = {ps.pair: ps for ps in closed_form_saddle_strategies(ref_params)}
    assert set(strategies) == {"A,B", "A,E", "C,D"}
    assert strategies["A,B"].maximin == pytest.approx(14 / 9)
    assert strategies["C,D"].minimax == pytest.approx(10 / 3)
    eq = SymmetricPoint(14 / 9, 10 / 3)
    for (i, j), ps in zip(((0, 1), (0, 2), (3, 4)), (strategies["A,B"], strategies["A,E"],
                                                     strategies["C,D"])):
        box = ref_game.space_of(i)
        r = saddle_check(pair_slice(ref_game, i, j, eq), box, box, vectorized=True)
        assert r.maximin_arg == pytest.approx(ps.maximin, abs=1e-4)
        assert r.minimax_arg == pytest.approx(ps.minimax, abs=1e-4)


def test_solver_agreement_sweep():
    for params in sweep_params(20, seed=99):
        game = build_game(params)
        closed = closed_form_equilibrium(params).point
        br = solve_best_response(game)
        fp = solve_fixed_point(game, damping=1.0)
        assert br.converged and fp.converged
        for p in (br.point, fp.point):
            assert p.s1 == pytest.approx(closed.s1, abs=1e-4)
            assert p.s2 == pytest.approx(closed.s2, abs=1e-4)
