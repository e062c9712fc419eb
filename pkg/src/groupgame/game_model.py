"""Two-group games that are zero-sum and symmetric inside each group.

Players are indexed globally: group 1 first (``0 .. m-1``), then group 2
(``m .. m+n-1``). For the five-player configuration (m=3, n=2) the labels are
A, B, E for group 1 and C, D for group 2, in that order.

Payoff oracles receive the strategies *column-wise*: ``payoff(i, g1, g2)``
where ``g1`` is a sequence of m values and ``g2`` a sequence of n values.
Every value may be a float or a numpy array; oracles must use plain
arithmetic so that both broadcast. The solvers rely on this to evaluate
whole grids in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

PayoffOracle = Callable[[int, Sequence[Any], Sequence[Any]], Any]
AbsoluteOracle = Callable[[int, Sequence[Any], Sequence[Any]], Any]

FIVE_PLAYER_LABELS = ("A", "B", "E", "C", "D")


class GameError(ValueError):
    """Base class for malformed games, profiles and player requests."""


class InvalidPlayerError(GameError):
    pass


class InvalidPairError(GameError):
    pass


class DomainError(GameError):
    """A strategy lies outside its group's interval."""


@dataclass(frozen=True)
class GroupSpec:
    m: int = 3
    n: int = 2

    def __post_init__(self) -> None:
        if int(self.m) != self.m or int(self.n) != self.n:
            raise GameError("group sizes must be integers")
        if self.m < 2 or self.n < 2:
            raise GameError(f"each group needs at least 2 players, got m={self.m}, n={self.n}")

    @property
    def size(self) -> int:
        return self.m + self.n

    def group_of(self, player: int) -> int:
        """Return 1 or 2 for a global player index."""
        if not isinstance(player, (int, np.integer)) or not 0 <= player < self.size:
            raise InvalidPlayerError(f"player index {player!r} out of range 0..{self.size - 1}")
        return 1 if player < self.m else 2

    def label(self, player: int) -> str:
        self.group_of(player)
        if (self.m, self.n) == (3, 2):
            return FIVE_PLAYER_LABELS[player]
        if player < self.m:
            return f"g1[{player}]"
        return f"g2[{player - self.m}]"

    def labels(self) -> list[str]:
        return [self.label(i) for i in range(self.size)]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise GameError("interval bounds must be finite")
        if not self.lo < self.hi:
            raise GameError(f"degenerate interval [{self.lo}, {self.hi}]")

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class StrategyProfile:
    g1: tuple[float, ...]
    g2: tuple[float, ...]

    def __init__(self, g1: Sequence[float], g2: Sequence[float]):
        object.__setattr__(self, "g1", tuple(float(v) for v in g1))
        object.__setattr__(self, "g2", tuple(float(v) for v in g2))

    @classmethod
    def symmetric(cls, groups: GroupSpec, s1: float, s2: float) -> "StrategyProfile":
        return cls([s1] * groups.m, [s2] * groups.n)

    def strategy(self, player: int) -> float:
        m = len(self.g1)
        return self.g1[player] if player < m else self.g2[player - m]

    def swapped(self, i: int, j: int) -> "StrategyProfile":
        flat = list(self.g1 + self.g2)
        flat[i], flat[j] = flat[j], flat[i]
        m = len(self.g1)
        return StrategyProfile(flat[:m], flat[m:])

    def with_strategy(self, player: int, value: float) -> "StrategyProfile":
        flat = list(self.g1 + self.g2)
        flat[player] = value
        m = len(self.g1)
        return StrategyProfile(flat[:m], flat[m:])


@dataclass(frozen=True)
class GroupedGame:
    groups: GroupSpec
    space1: Interval
    space2: Interval
    payoff: PayoffOracle = field(compare=False)
    name: str = "custom"

    def space_of(self, player: int) -> Interval:
        return self.space1 if self.groups.group_of(player) == 1 else self.space2

    def validate_profile(self, profile: StrategyProfile) -> None:
        m, n = self.groups.m, self.groups.n
        if len(profile.g1) != m or len(profile.g2) != n:
            raise DomainError(
                f"profile has shape ({len(profile.g1)}, {len(profile.g2)}), game expects ({m}, {n})"
            )
        for k, v in enumerate(profile.g1):
            if not self.space1.contains(v):
                raise DomainError(f"g1[{k}]={v} outside [{self.space1.lo}, {self.space1.hi}]")
        for k, v in enumerate(profile.g2):
            if not self.space2.contains(v):
                raise DomainError(f"g2[{k}]={v} outside [{self.space2.lo}, {self.space2.hi}]")

    def random_profile(self, rng: np.random.Generator) -> StrategyProfile:
        return StrategyProfile(
            rng.uniform(self.space1.lo, self.space1.hi, self.groups.m),
            rng.uniform(self.space2.lo, self.space2.hi, self.groups.n),
        )


def relativize(groups: GroupSpec, absolute: AbsoluteOracle) -> PayoffOracle:
    """Turn absolute payoffs into relative ones, zero-sum inside each group.

    Player i's relative payoff is its absolute payoff minus the mean absolute
    payoff of its in-group rivals.
    """
    m, n = groups.m, groups.n

    def payoff(player: int, g1: Sequence[Any], g2: Sequence[Any]) -> Any:
        if player < m:
            members, weight = range(m), 1.0 / (m - 1)
        else:
            members, weight = range(m, m + n), 1.0 / (n - 1)
        own = absolute(player, g1, g2)
        rivals = 0.0
        for j in members:
            if j != player:
                rivals = rivals + absolute(j, g1, g2)
        return own - weight * rivals

    return payoff


def evaluate_payoff(game: GroupedGame, player: int, profile: StrategyProfile) -> float:
    game.groups.group_of(player)
    game.validate_profile(profile)
    return float(game.payoff(player, profile.g1, profile.g2))


@dataclass(frozen=True)
class ZeroSumCheck:
    ok: bool
    residual_g1: float
    residual_g2: float


def check_group_zero_sum(game: GroupedGame, profile: StrategyProfile, tol: float = 1e-9) -> ZeroSumCheck:
    m = game.groups.m
    values = [evaluate_payoff(game, i, profile) for i in range(game.groups.size)]
    r1 = math.fsum(values[:m])
    r2 = math.fsum(values[m:])
    return ZeroSumCheck(abs(r1) <= tol and abs(r2) <= tol, r1, r2)


def check_group_symmetry(
    game: GroupedGame, profile: StrategyProfile, i: int, j: int, tol: float = 1e-9
) -> bool:
    """Swap the strategies of same-group players i and j and compare payoffs.

    Holds when u_i at the swapped profile equals u_j at the original one and
    every other player's payoff is unchanged.
    """
    gi, gj = game.groups.group_of(i), game.groups.group_of(j)
    if gi != gj:
        raise InvalidPairError(f"players {i} and {j} are in different groups")
    swapped = profile.swapped(i, j)
    if abs(evaluate_payoff(game, i, swapped) - evaluate_payoff(game, j, profile)) > tol:
        return False
    if abs(evaluate_payoff(game, j, swapped) - evaluate_payoff(game, i, profile)) > tol:
        return False
    for k in range(game.groups.size):
        if k in (i, j):
            continue
        if abs(evaluate_payoff(game, k, swapped) - evaluate_payoff(game, k, profile)) > tol:
            return False
    return True
