"""Relative-profit Cournot oligopoly with two groups of firms.

Group-1 firms face inverse demand ``a - X - b*Y`` and group-2 firms
``a - Y - b*X``, where X and Y are the group output totals. Marginal costs
are constant (``c_A`` in group 1, ``c_C`` in group 2). Each firm maximizes
its profit minus the mean profit of its in-group rivals.

Closed forms, valid for general group sizes (m, n)::

    s1 = (a - c_A - b*(a - c_C)) / (m * (1 - b) * (1 + b))
    s2 = (a - c_C - b*(a - c_A)) / (n * (1 - b) * (1 + b))

They solve the first-order conditions at the symmetric point,
``a - m*s1 - n*b*s2 = c_A`` and ``a - n*s2 - m*b*s1 = c_C``: every price
equals its group's marginal cost. For m=3 the same value applies to every
group-1 firm (including the third one, E).
"""
from __future__ import annotations

from dataclasses import dataclass

from groupgame.equilibrium import SymmetricPoint
from groupgame.game_model import GameError, GroupedGame, GroupSpec, Interval


class OligopolyParamError(GameError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class OligopolyParams:
    a: float
    b: float
    c_A: float
    c_C: float
    groups: GroupSpec = GroupSpec()

    def validate(self) -> None:
        if not 0 <= self.b < 1:
            raise OligopolyParamError("b", f"must satisfy 0 <= b < 1, got {self.b}")
        if not self.c_A < self.a:
            raise OligopolyParamError("c_A", f"must be below a={self.a}, got {self.c_A}")
        if not self.c_C < self.a:
            raise OligopolyParamError("c_C", f"must be below a={self.a}, got {self.c_C}")
        s1, s2 = _outputs(self)
        if s1 < 0:
            raise OligopolyParamError("c_A", f"equilibrium group-1 output is negative ({s1:.6g})")
        if s2 < 0:
            raise OligopolyParamError("c_C", f"equilibrium group-2 output is negative ({s2:.6g})")


@dataclass(frozen=True)
class OligopolyEquilibrium:
    point: SymmetricPoint
    price1: float
    price2: float


@dataclass(frozen=True)
class PairStrategies:
    pair: str
    players: tuple[int, int]
    maximin: float
    minimax: float


def _outputs(params: OligopolyParams) -> tuple[float, float]:
    a, b, cA, cC = params.a, params.b, params.c_A, params.c_C
    m, n = params.groups.m, params.groups.n
    denom = (1 - b) * (1 + b)
    return (b * cC - cA - a * b + a) / (m * denom), (b * cA - cC - a * b + a) / (n * denom)


def inverse_demand(params: OligopolyParams, total1, total2):
    """Prices (group 1, group 2) at the given group output totals."""
    return params.a - total1 - params.b * total2, params.a - total2 - params.b * total1


def build_game(params: OligopolyParams, cap: float | None = None) -> GroupedGame:
    """The relative-profit game on the strategy box [0, cap] per group.

    ``cap`` defaults to ``a``; it must exceed both equilibrium outputs.
    """
    params.validate()
    cap = params.a if cap is None else cap
    s1, s2 = _outputs(params)
    if not cap > max(s1, s2):
        raise OligopolyParamError("cap", f"must exceed the equilibrium outputs ({s1:.6g}, {s2:.6g})")
    a, b, cA, cC = params.a, params.b, params.c_A, params.c_C
    m, n = params.groups.m, params.groups.n
    w1, w2 = 1.0 / (m - 1), 1.0 / (n - 1)

    def payoff(player, g1, g2):
        X = sum(g1)
        Y = sum(g2)
        if player < m:
            own = g1[player]
            margin = a - X - b * Y - cA
            return margin * own - w1 * (margin * (X - own))
        own = g2[player - m]
        margin = a - Y - b * X - cC
        return margin * own - w2 * (margin * (Y - own))

    box = Interval(0.0, float(cap))
    return GroupedGame(params.groups, box, box, payoff, name="oligopoly")


def closed_form_equilibrium(params: OligopolyParams) -> OligopolyEquilibrium:
    params.validate()
    s1, s2 = _outputs(params)
    m, n = params.groups.m, params.groups.n
    p1, p2 = inverse_demand(params, m * s1, n * s2)
    return OligopolyEquilibrium(SymmetricPoint(s1, s2), p1, p2)


def closed_form_saddle_strategies(params: OligopolyParams) -> list[PairStrategies]:
    """Maximin and minimax strategies of the (A,B), (A,E) and (C,D) pairs.

    All coincide with the equilibrium output of the pair's group.
    """
    eq = closed_form_equilibrium(params).point
    groups = params.groups
    m = groups.m
    pairs = [(0, 1), (0, m - 1), (m, m + 1)] if m > 2 else [(0, 1), (m, m + 1)]
    out = []
    for i, j in pairs:
        value = eq.s1 if i < m else eq.s2
        out.append(PairStrategies(f"{groups.label(i)},{groups.label(j)}", (i, j), value, value))
    return out
