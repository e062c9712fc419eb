"""Symmetric-in-group equilibria of two-group games.

Two iterations locate candidates: the maximin map, which sends a symmetric
point (s1, s2) to the maximin strategies of the first pair in each group,
and ordinary best-response dynamics. Both are damped,

    p <- (1 - damping) * p + damping * T(p),

and stop once the sup-norm residual |T(p) - p| drops to ``fp_tol``.

The verification routines check the two directions of the equivalence
between symmetric Nash equilibria and saddle points of the pair slices:
``verify_theorem1`` starts from a Nash point and checks the saddle
conditions, ``verify_theorem2`` starts from a converged maximin fixed point
and checks the Nash inequalities.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from groupgame.game_model import GroupedGame, StrategyProfile
from groupgame.scalar_opt import (
    DEFAULT_COINCIDENCE_TOL,
    DEFAULT_TOL,
    SaddleResult,
    argmax_interval,
    maximin,
    saddle_check,
)

log = logging.getLogger(__name__)

DEFAULT_DAMPING = 0.5
DEFAULT_FP_TOL = 1e-6
DEFAULT_MAX_ITER = 500
DEFAULT_DEV_TOL = 1e-4
DEFAULT_GAP_TOL = 1e-5


class EquilibriumError(ValueError):
    pass


class HypothesisNotSatisfiedError(EquilibriumError):
    """The point handed to ``verify_theorem1`` is not a Nash equilibrium."""


class CoincidenceFailedError(EquilibriumError):
    """Maximin and minimax strategies differ at the fixed point."""


class InvalidTraceError(EquilibriumError):
    pass


@dataclass(frozen=True)
class SymmetricPoint:
    s1: float
    s2: float

    def distance(self, other: "SymmetricPoint") -> float:
        return max(abs(self.s1 - other.s1), abs(self.s2 - other.s2))

    def profile(self, game: GroupedGame) -> StrategyProfile:
        return StrategyProfile.symmetric(game.groups, self.s1, self.s2)


@dataclass
class FixedPointTrace:
    iterates: list[SymmetricPoint]
    converged: bool
    residual: float
    iterations: int
    method: str = "maximin"

    @property
    def point(self) -> SymmetricPoint:
        return self.iterates[-1]


@dataclass
class EquilibriumReport:
    point: SymmetricPoint
    deviation_gaps: list[float]
    is_nash: bool
    payoffs: list[float]
    sion_g1: SaddleResult | None = None
    sion_g2: SaddleResult | None = None
    coincidence_g1: bool | None = None
    coincidence_g2: bool | None = None
    theorem: str | None = None
    holds: bool | None = None
    # other same-group pairs; reported, never part of ``holds``
    other_pairs: dict[str, SaddleResult] = field(default_factory=dict)


def _columns(game: GroupedGame, p: SymmetricPoint, overrides: dict[int, Any]):
    m = game.groups.m
    g1 = [p.s1] * m
    g2 = [p.s2] * game.groups.n
    for k, v in overrides.items():
        if k < m:
            g1[k] = v
        else:
            g2[k - m] = v
    return g1, g2


def pair_slice(game: GroupedGame, i: int, j: int, p: SymmetricPoint) -> Callable[[Any, Any], Any]:
    """(x, y) -> u_i with player i at x, player j at y, everyone else at ``p``."""
    if game.groups.group_of(i) != game.groups.group_of(j) or i == j:
        raise EquilibriumError(f"players {i} and {j} do not form a same-group pair")
    payoff = game.payoff
    m = game.groups.m
    n = game.groups.n
    if i < m:
        def f(x, y):
            g1 = [p.s1] * m
            g1[i] = x
            g1[j] = y
            return payoff(i, g1, [p.s2] * n)
    else:
        def f(x, y):
            g2 = [p.s2] * n
            g2[i - m] = x
            g2[j - m] = y
            return payoff(i, [p.s1] * m, g2)
    return f


def deviation_slice(game: GroupedGame, i: int, p: SymmetricPoint) -> Callable[[Any], Any]:
    payoff = game.payoff

    def f(x):
        g1, g2 = _columns(game, p, {i: x})
        return payoff(i, g1, g2)

    return f


def _check_point(game: GroupedGame, p: SymmetricPoint) -> None:
    if not game.space1.contains(p.s1) or not game.space2.contains(p.s2):
        raise EquilibriumError(f"{p} lies outside the strategy intervals")


def maximin_map(game: GroupedGame, p: SymmetricPoint, tol: float = DEFAULT_TOL) -> SymmetricPoint:
    _check_point(game, p)
    m = game.groups.m
    t1 = maximin(pair_slice(game, 0, 1, p), game.space1, game.space1, tol, vectorized=True)
    t2 = maximin(pair_slice(game, m, m + 1, p), game.space2, game.space2, tol, vectorized=True)
    return SymmetricPoint(t1.arg, t2.arg)


def best_response_map(game: GroupedGame, p: SymmetricPoint, tol: float = DEFAULT_TOL) -> SymmetricPoint:
    _check_point(game, p)
    m = game.groups.m
    b1 = argmax_interval(deviation_slice(game, 0, p), game.space1, tol, vectorized=True)
    b2 = argmax_interval(deviation_slice(game, m, p), game.space2, tol, vectorized=True)
    return SymmetricPoint(b1.arg, b2.arg)


def _iterate(step, start: SymmetricPoint, damping: float, fp_tol: float, max_iter: int,
             method: str, on_iteration=None) -> FixedPointTrace:
    if not 0 < damping <= 1:
        raise EquilibriumError(f"damping must lie in (0, 1], got {damping}")
    if max_iter < 1:
        raise EquilibriumError("max_iter must be at least 1")
    p = start
    iterates = [p]
    q = step(p)
    residual = p.distance(q)
    for k in range(max_iter):
        if residual <= fp_tol:
            break
        p = SymmetricPoint((1 - damping) * p.s1 + damping * q.s1,
                           (1 - damping) * p.s2 + damping * q.s2)
        iterates.append(p)
        q = step(p)
        residual = p.distance(q)
        if on_iteration is not None:
            on_iteration(k + 1, p, residual)
        log.debug("%s iteration %d: %s residual %.3e", method, k + 1, p, residual)
    return FixedPointTrace(iterates, residual <= fp_tol, residual, len(iterates) - 1, method)


def default_start(game: GroupedGame) -> SymmetricPoint:
    return SymmetricPoint(game.space1.midpoint, game.space2.midpoint)


def solve_fixed_point(game: GroupedGame, start: SymmetricPoint | None = None,
                      damping: float = DEFAULT_DAMPING, fp_tol: float = DEFAULT_FP_TOL,
                      max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL,
                      on_iteration=None) -> FixedPointTrace:
    """Damped iteration of the maximin map.

    Non-convergence is reported through ``converged=False``, not raised.
    """
    start = default_start(game) if start is None else start
    return _iterate(lambda p: maximin_map(game, p, tol), start, damping, fp_tol, max_iter,
                    "maximin", on_iteration)


def solve_best_response(game: GroupedGame, start: SymmetricPoint | None = None,
                        damping: float = DEFAULT_DAMPING, fp_tol: float = DEFAULT_FP_TOL,
                        max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL,
                        on_iteration=None) -> FixedPointTrace:
    start = default_start(game) if start is None else start
    return _iterate(lambda p: best_response_map(game, p, tol), start, damping, fp_tol, max_iter,
                    "best_response", on_iteration)


def nash_check(game: GroupedGame, p: SymmetricPoint, dev_tol: float = DEFAULT_DEV_TOL,
               opt_tol: float = DEFAULT_TOL, all_players: bool = False) -> EquilibriumReport:
    """Largest gain from a unilateral deviation, for every player.

    By within-group symmetry one representative per group suffices; pass
    ``all_players=True`` to optimize every player explicitly.
    """
    _check_point(game, p)
    m, size = game.groups.m, game.groups.size
    g1, g2 = _columns(game, p, {})
    payoffs = [float(game.payoff(i, g1, g2)) for i in range(size)]
    players: Iterable[int] = range(size) if all_players else (0, m)
    gaps: dict[int, float] = {}
    for i in players:
        best = argmax_interval(deviation_slice(game, i, p), game.space_of(i), opt_tol, vectorized=True)
        gaps[i] = max(0.0, best.value - payoffs[i])
    if not all_players:
        gaps = {i: gaps[0] if i < m else gaps[m] for i in range(size)}
    deviation = [gaps[i] for i in range(size)]
    return EquilibriumReport(p, deviation, all(g <= dev_tol for g in deviation), payoffs)


def _other_pairs(game: GroupedGame) -> dict[str, tuple[int, int]]:
    m = game.groups.m
    label = game.groups.label
    pairs = [(m - 1, 1), (1, 0), (0, m - 1), (m - 1, 0), (1, m - 1), (m + 1, m)]
    out = {}
    for i, j in pairs:
        if i != j:
            out[f"u_{label(i)}({label(i)},{label(j)})"] = (i, j)
    return out


def _slice_saddles(game: GroupedGame, p: SymmetricPoint, tol: float, coincidence_tol: float,
                   report_other_pairs: bool):
    m = game.groups.m
    g1 = saddle_check(pair_slice(game, 0, 1, p), game.space1, game.space1, tol, coincidence_tol,
                      vectorized=True)
    g2 = saddle_check(pair_slice(game, m, m + 1, p), game.space2, game.space2, tol, coincidence_tol,
                      vectorized=True)
    extra = {}
    if report_other_pairs:
        for key, (i, j) in _other_pairs(game).items():
            box = game.space_of(i)
            extra[key] = saddle_check(pair_slice(game, i, j, p), box, box, tol, coincidence_tol,
                                      vectorized=True)
    return g1, g2, extra


def _args_at(result: SaddleResult, target: float, tol: float) -> bool:
    return abs(result.maximin_arg - target) <= tol and abs(result.minimax_arg - target) <= tol


def verify_theorem1(game: GroupedGame, p: SymmetricPoint, tol: float = DEFAULT_TOL,
                    dev_tol: float = DEFAULT_DEV_TOL, gap_tol: float = DEFAULT_GAP_TOL,
                    coincidence_tol: float = DEFAULT_COINCIDENCE_TOL,
                    report_other_pairs: bool = True) -> EquilibriumReport:
    """From a symmetric Nash point to saddle points of the pair slices.

    Checks that the (player 1, player 2) slice of each group has zero duality
    gap and that its maximin and minimax strategies both equal the point.

    Raises:
        HypothesisNotSatisfiedError: ``p`` fails ``nash_check``.
    """
    report = nash_check(game, p, dev_tol, tol)
    if not report.is_nash:
        raise HypothesisNotSatisfiedError(
            f"{p} is not a Nash equilibrium (max deviation gain {max(report.deviation_gaps):.3e})"
        )
    s1, s2, extra = _slice_saddles(game, p, tol, coincidence_tol, report_other_pairs)
    report.sion_g1, report.sion_g2, report.other_pairs = s1, s2, extra
    report.coincidence_g1 = _args_at(s1, p.s1, coincidence_tol)
    report.coincidence_g2 = _args_at(s2, p.s2, coincidence_tol)
    report.theorem = "nash_implies_saddle"
    report.holds = (abs(s1.gap) <= gap_tol and abs(s2.gap) <= gap_tol
                    and report.coincidence_g1 and report.coincidence_g2)
    return report


def verify_theorem2(game: GroupedGame, trace: FixedPointTrace, tol: float = DEFAULT_TOL,
                    dev_tol: float = DEFAULT_DEV_TOL, coincidence_tol: float = DEFAULT_COINCIDENCE_TOL,
                    report_other_pairs: bool = True) -> EquilibriumReport:
    """From a converged maximin fixed point with coinciding strategies to Nash.

    Raises:
        InvalidTraceError: the trace did not converge.
        CoincidenceFailedError: maximin and minimax strategies of a pair
            slice differ by more than ``coincidence_tol``.
    """
    if not trace.converged or not trace.iterates:
        raise InvalidTraceError("verify_theorem2 needs a converged fixed-point trace")
    p = trace.point
    s1, s2, extra = _slice_saddles(game, p, tol, coincidence_tol, report_other_pairs)
    if not (s1.coincident and s2.coincident):
        raise CoincidenceFailedError(
            f"maximin/minimax strategies differ at {p}: "
            f"group 1 {s1.maximin_arg:.6g} vs {s1.minimax_arg:.6g}, "
            f"group 2 {s2.maximin_arg:.6g} vs {s2.minimax_arg:.6g}"
        )
    report = nash_check(game, p, dev_tol, tol)
    report.sion_g1, report.sion_g2, report.other_pairs = s1, s2, extra
    report.coincidence_g1 = _args_at(s1, p.s1, coincidence_tol)
    report.coincidence_g2 = _args_at(s2, p.s2, coincidence_tol)
    report.theorem = "saddle_implies_nash"
    report.holds = report.is_nash
    return report
