"""Built-in game families besides the oligopoly.

``quadratic_saddle``
    Absolute payoff of a group-1 player with own strategy x, in-group rival
    total R and group-2 total Y::

        h1*x - p1/2*x^2 + r1*x*R + d1*x*Y

    and symmetrically for group 2 with (h2, p2, r2, d2). Relative payoffs
    are formed as in every other family. The pair slices are concave in the
    maximizer (curvature -p) and convex in the minimizer (curvature
    p/(m-1)), and the symmetric equilibrium solves a 2x2 linear system.
    The oligopoly is the member h=a-c, p=2, r=-1, d=-b.

``custom_expr``
    Absolute payoffs written in the expression language: one template per
    group, stated for the group's first player (``x1`` or ``y1`` is the own
    strategy) and instantiated for the others by swapping variables.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from groupgame.equilibrium import SymmetricPoint
from groupgame.expr import Expr
from groupgame.game_model import (
    GameError,
    GroupedGame,
    GroupSpec,
    Interval,
    check_group_symmetry,
    relativize,
)


@dataclass(frozen=True)
class QuadraticSaddleParams:
    h1: float
    p1: float
    r1: float
    d1: float
    h2: float
    p2: float
    r2: float
    d2: float
    groups: GroupSpec = GroupSpec()

    def validate(self) -> None:
        if not self.p1 > 0:
            raise GameError(f"p1: own curvature must be positive, got {self.p1}")
        if not self.p2 > 0:
            raise GameError(f"p2: own curvature must be positive, got {self.p2}")
        if abs(np.linalg.det(_foc_matrix(self))) < 1e-12:
            raise GameError("first-order system is singular")


def _foc_matrix(q: QuadraticSaddleParams) -> np.ndarray:
    m, n = q.groups.m, q.groups.n
    return np.array([
        [q.p1 - q.r1 * (m - 2), -q.d1 * n],
        [-q.d2 * m, q.p2 - q.r2 * (n - 2)],
    ])


def quadratic_equilibrium(q: QuadraticSaddleParams) -> SymmetricPoint:
    """Interior symmetric equilibrium from the first-order conditions.

    At a symmetric point the own-strategy derivative of player 1's relative
    payoff in group 1 is ``h1 - p1*s1 + r1*(m-2)*s1 + d1*n*s2``.
    """
    s1, s2 = np.linalg.solve(_foc_matrix(q), [q.h1, q.h2])
    return SymmetricPoint(float(s1), float(s2))


def quadratic_from_equilibrium(groups: GroupSpec, e1: float, e2: float, p1: float, r1: float,
                               d1: float, p2: float, r2: float, d2: float) -> QuadraticSaddleParams:
    """Choose the linear terms so that (e1, e2) is the symmetric equilibrium."""
    m, n = groups.m, groups.n
    h1 = (p1 - r1 * (m - 2)) * e1 - d1 * n * e2
    h2 = (p2 - r2 * (n - 2)) * e2 - d2 * m * e1
    return QuadraticSaddleParams(h1, p1, r1, d1, h2, p2, r2, d2, groups)


def build_quadratic_game(q: QuadraticSaddleParams, space1: Interval, space2: Interval) -> GroupedGame:
    q.validate()
    m = q.groups.m

    def absolute(player, g1, g2):
        X = sum(g1)
        Y = sum(g2)
        if player < m:
            x = g1[player]
            return q.h1 * x - 0.5 * q.p1 * x * x + q.r1 * x * (X - x) + q.d1 * x * Y
        y = g2[player - m]
        return q.h2 * y - 0.5 * q.p2 * y * y + q.r2 * y * (Y - y) + q.d2 * y * X

    return GroupedGame(q.groups, space1, space2, relativize(q.groups, absolute), name="quadratic_saddle")


def _swap(values, k):
    out = list(values)
    out[0], out[k] = out[k], out[0]
    return out


def custom_expr_game(groups: GroupSpec, space1: Interval, space2: Interval, template1: Expr,
                     template2: Expr, symmetry_samples: int = 20, seed: int = 0) -> GroupedGame:
    """Game from per-group absolute-payoff templates.

    Raises:
        GameError: the templates are not symmetric in the rival strategies,
            detected by swap checks on ``symmetry_samples`` random profiles.
    """
    if template1.groups != groups or template2.groups != groups:
        raise GameError("templates were parsed for different group sizes")
    m = groups.m

    def absolute(player, g1, g2):
        if player < m:
            return template1(_swap(g1, player), g2)
        return template2(g1, _swap(g2, player - m))

    game = GroupedGame(groups, space1, space2, relativize(groups, absolute), name="custom_expr")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(groups.size) for j in range(i + 1, groups.size)
             if groups.group_of(i) == groups.group_of(j)]
    for _ in range(symmetry_samples):
        profile = game.random_profile(rng)
        scale = 1.0 + max(abs(float(game.payoff(k, profile.g1, profile.g2))) for k in range(groups.size))
        for i, j in pairs:
            if not check_group_symmetry(game, profile, i, j, tol=1e-9 * scale):
                raise GameError(
                    f"payoff templates are not symmetric for players "
                    f"{groups.label(i)} and {groups.label(j)}"
                )
    return game
