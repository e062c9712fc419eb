"""Acceptance criteria, runnable from ``groupgame selftest`` and pytest.

Each criterion returns a ``CriterionResult``; ``run_all`` runs them in
order. Tolerances and time limits are fixed here, not configurable.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from groupgame.equilibrium import (
    SymmetricPoint,
    pair_slice,
    solve_best_response,
    solve_fixed_point,
    verify_theorem1,
    verify_theorem2,
)
from groupgame.expr import BinOp, Neg, Num, Param, Var, parse, to_source
from groupgame.families import build_quadratic_game, custom_expr_game, quadratic_from_equilibrium
from groupgame.game_model import (
    GroupSpec,
    Interval,
    StrategyProfile,
    check_group_symmetry,
    check_group_zero_sum,
    evaluate_payoff,
)
from groupgame.oligopoly import (
    OligopolyParams,
    build_game,
    closed_form_equilibrium,
    inverse_demand,
)
from groupgame.scalar_opt import maximin, minimax, saddle_check

SEED = 20190101
REFERENCE_PARAMS = OligopolyParams(a=10.0, b=0.5, c_A=2.0, c_C=1.0)
# damping 1 is the fastest contraction of the maximin map for this family
SWEEP_FP_DAMPING = 1.0


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.limit:g} s)" if self.limit else ""
        return f"[{flag}] {self.number:2d} {self.name}: {self.detail} [{self.seconds:.2f} s{limit}]"


def _timed(number: int, name: str, limit: float | None, body: Callable[[], tuple[bool, str]]):
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok = False
        detail += f"; runtime {dt:.2f} s exceeds {limit:g} s"
    return CriterionResult(number, name, ok, detail, dt, limit)


def sweep_params(count: int = 20, seed: int = SEED) -> list[OligopolyParams]:
    """Seeded oligopoly draws with 0 < b <= 0.9 and interior outputs.

    Outputs are kept within [0.02a, 0.8a] so that the default strategy box
    [0, a] contains the equilibrium with room to spare.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a = float(rng.uniform(5.0, 20.0))
        b = float(rng.uniform(0.0, 0.9))
        if b == 0.0:
            continue
        c_A = float(rng.uniform(0.0, a))
        c_C = float(rng.uniform(0.0, a))
        params = OligopolyParams(a, b, c_A, c_C)
        try:
            eq = closed_form_equilibrium(params).point
        except ValueError:
            continue
        if 0.02 * a <= min(eq.s1, eq.s2) and max(eq.s1, eq.s2) <= 0.8 * a:
            out.append(params)
    return out


@dataclass
class SweepRecord:
    params: OligopolyParams
    closed: SymmetricPoint
    br_point: SymmetricPoint
    br_converged: bool
    fp_point: SymmetricPoint
    fp_converged: bool
    theorem1: object
    theorem2: object
    error1: str | None
    error2: str | None


@lru_cache(maxsize=2)
def _sweep_br(seed: int = SEED):
    rows = []
    for params in sweep_params(seed=seed):
        game = build_game(params)
        br = solve_best_response(game)
        rep, err = None, None
        if br.converged:
            try:
                rep = verify_theorem1(game, br.point, report_other_pairs=False)
            except ValueError as exc:
                err = str(exc)
        rows.append((params, br, rep, err))
    return rows


@lru_cache(maxsize=2)
def _sweep_fp(seed: int = SEED):
    rows = []
    for params in sweep_params(seed=seed):
        game = build_game(params)
        fp = solve_fixed_point(game, damping=SWEEP_FP_DAMPING)
        rep, err = None, None
        try:
            rep = verify_theorem2(game, fp, report_other_pairs=False)
        except ValueError as exc:
            err = str(exc)
        rows.append((params, fp, rep, err))
    return rows


def criterion_closed_form() -> CriterionResult:
    def body():
        params = REFERENCE_PARAMS
        game = build_game(params)
        target = SymmetricPoint(14 / 9, 10 / 3)
        fp = solve_fixed_point(game, damping=SWEEP_FP_DAMPING)
        br = solve_best_response(game)
        errs, price_errs = [], []
        for trace in (fp, br):
            p = trace.point
            errs.append(max(abs(p.s1 - target.s1), abs(p.s2 - target.s2)))
            p1, p2 = inverse_demand(params, 3 * p.s1, 2 * p.s2)
            price_errs.append(max(abs(p1 - 2.0), abs(p2 - 1.0)))
        ok = fp.converged and br.converged and max(errs) <= 1e-4 and max(price_errs) <= 1e-4
        return ok, (f"converged fp={fp.converged} br={br.converged}, max |s - (14/9, 10/3)| = "
                    f"{max(errs):.2e}, max |price - cost| = {max(price_errs):.2e} (tol 1e-4)")
    return _timed(1, "closed-form reproduction", 1.0, body)


def criterion_saddle_coincidence() -> CriterionResult:
    def body():
        game = build_game(REFERENCE_PARAMS)
        point = SymmetricPoint(14 / 9, 10 / 3)
        worst_gap, worst_arg = 0.0, 0.0
        for i, j, target in ((0, 1, point.s1), (3, 4, point.s2), (0, 2, point.s1)):
            box = game.space_of(i)
            res = saddle_check(pair_slice(game, i, j, point), box, box, vectorized=True)
            worst_gap = max(worst_gap, abs(res.gap))
            worst_arg = max(worst_arg, abs(res.maximin_arg - target), abs(res.minimax_arg - target))
        ok = worst_gap <= 1e-5 and worst_arg <= 1e-4
        return ok, f"(A,B),(C,D),(A,E): max gap {worst_gap:.2e} (tol 1e-5), max arg error {worst_arg:.2e} (tol 1e-4)"
    return _timed(2, "saddle coincidence", 1.0, body)


def criterion_theorem1() -> CriterionResult:
    def body():
        rows = _sweep_br()
        bad = []
        worst_gap = worst_arg = 0.0
        for k, (params, br, rep, err) in enumerate(rows):
            if rep is None:
                bad.append(f"draw {k}: {'not converged' if not br.converged else err}")
                continue
            closed = closed_form_equilibrium(params).point
            worst_gap = max(worst_gap, abs(rep.sion_g1.gap), abs(rep.sion_g2.gap))
            for res, target in ((rep.sion_g1, closed.s1), (rep.sion_g2, closed.s2)):
                worst_arg = max(worst_arg, abs(res.maximin_arg - target), abs(res.minimax_arg - target))
            if not rep.holds:
                bad.append(f"draw {k}: theorem check failed")
        ok = not bad and worst_gap <= 1e-5 and worst_arg <= 1e-4
        detail = f"{len(rows)} draws, max gap {worst_gap:.2e} (tol 1e-5), max arg error {worst_arg:.2e} (tol 1e-4)"
        if bad:
            detail += "; " + "; ".join(bad[:3])
        return ok, detail
    return _timed(3, "Nash implies saddle (20-draw sweep)", 20.0, body)


def criterion_theorem2() -> CriterionResult:
    def body():
        rows = _sweep_fp()
        bad = []
        worst_dev = 0.0
        for k, (params, fp, rep, err) in enumerate(rows):
            if rep is None:
                bad.append(f"draw {k}: {err}")
                continue
            worst_dev = max(worst_dev, max(rep.deviation_gaps))
            if not (rep.is_nash and rep.sion_g1.coincident and rep.sion_g2.coincident):
                bad.append(f"draw {k}: not Nash or no coincidence")
        ok = not bad
        detail = f"{len(rows)} draws, max deviation gain {worst_dev:.2e} (dev_tol 1e-4)"
        if bad:
            detail += "; " + "; ".join(bad[:3])
        return ok, detail
    return _timed(4, "saddle implies Nash (20-draw sweep)", 20.0, body)


def random_quadratic_saddle(rng: np.random.Generator):
    """-alpha (x-x0)^2 + beta (y-y0)^2 + gamma (x-x0)(y-y0) with gamma^2 < 4 alpha beta."""
    alpha = float(rng.uniform(0.1, 3.0))
    beta = float(rng.uniform(0.1, 3.0))
    bound = 2.0 * math.sqrt(alpha * beta)
    gamma = float(rng.uniform(-0.95, 0.95)) * bound
    x0 = float(rng.uniform(-0.5, 1.5))
    y0 = float(rng.uniform(-0.5, 1.5))

    def f(x, y):
        dx = x - x0
        dy = y - y0
        return -alpha * dx * dx + beta * dy * dy + gamma * dx * dy

    return f, (alpha, beta, gamma, x0, y0)


def criterion_weak_duality() -> CriterionResult:
    def body():
        rng = np.random.default_rng(SEED + 5)
        box = Interval(0.0, 1.0)
        violations = 0
        worst = -math.inf
        for _ in range(100):
            f, _ = random_quadratic_saddle(rng)
            res = saddle_check(f, box, box, vectorized=True)
            scale = max(1.0, abs(res.maximin_value), abs(res.minimax_value))
            excess = (res.maximin_value - res.minimax_value) / scale
            worst = max(worst, excess)
            if res.maximin_value > res.minimax_value + 1e-9 * scale:
                violations += 1
        return violations == 0, f"100 games, {violations} violations, max (maximin - minimax)/scale = {worst:.2e}"
    return _timed(5, "weak duality", None, body)


def random_interior_quadratic(rng: np.random.Generator):
    """f = A x^2 + B y^2 + C xy + D x + E y, A < 0 < B, saddle inside [0.05, 0.95]^2.

    Returns the function and the saddle from the first-order conditions
    [[2A, C], [C, 2B]] (x, y) = -(D, E).
    """
    while True:
        A = -float(rng.uniform(0.2, 3.0))
        B = float(rng.uniform(0.2, 3.0))
        C = float(rng.uniform(-2.0, 2.0))
        D = float(rng.uniform(-3.0, 3.0))
        E = float(rng.uniform(-3.0, 3.0))
        x, y = np.linalg.solve([[2 * A, C], [C, 2 * B]], [-D, -E])
        if 0.05 <= x <= 0.95 and 0.05 <= y <= 0.95:
            break

    def f(u, v):
        return A * u * u + B * v * v + C * u * v + D * u + E * v

    return f, (float(x), float(y))


def criterion_quadratic_oracle() -> CriterionResult:
    def body():
        rng = np.random.default_rng(SEED + 6)
        box = Interval(0.0, 1.0)
        worst = 0.0
        for _ in range(50):
            f, (x, y) = random_interior_quadratic(rng)
            lo = maximin(f, box, box, vectorized=True)
            hi = minimax(f, box, box, vectorized=True)
            worst = max(worst, abs(lo.arg - x), abs(hi.arg - y))
        return worst <= 1e-6, f"50 interior saddles, max arg error vs linear solve {worst:.2e} (tol 1e-6)"
    return _timed(6, "quadratic-saddle oracle", None, body)


def builtin_games():
    """One instance of every built-in family, for the invariant sweeps."""
    groups = GroupSpec(3, 2)
    olig = build_game(REFERENCE_PARAMS)
    quad = build_quadratic_game(
        quadratic_from_equilibrium(groups, 1.2, 0.7, 2.0, -0.3, 0.2, 1.5, 0.4, -0.25),
        Interval(0.0, 3.0), Interval(0.0, 3.0),
    )
    prm = {"a": 10.0, "b": 0.5, "cA": 2.0, "cC": 1.0}
    custom = custom_expr_game(
        groups, Interval(0.0, 10.0), Interval(0.0, 10.0),
        parse("(a - x1 - x2 - x3 - b*y1 - b*y2)*x1 - cA*x1", groups, prm),
        parse("(a - y1 - y2 - b*x1 - b*x2 - b*x3)*y1 - cC*y1", groups, prm),
    )
    return {"oligopoly": olig, "quadratic_saddle": quad, "custom_expr": custom}


def criterion_invariants(profiles: int = 1000) -> CriterionResult:
    def body():
        rng = np.random.default_rng(SEED + 7)
        problems = []
        for name, game in builtin_games().items():
            size = game.groups.size
            pairs = [(i, j) for i in range(size) for j in range(i + 1, size)
                     if game.groups.group_of(i) == game.groups.group_of(j)]
            samples = [game.random_profile(rng) for _ in range(profiles)]
            scale = max(1.0, max(abs(evaluate_payoff(game, k, p)) for p in samples for k in range(size)))
            zs_fail = sum(not check_group_zero_sum(game, p, 1e-9 * scale).ok for p in samples)
            sym_fail = sum(not check_group_symmetry(game, p, i, j, 1e-9) for p in samples for i, j in pairs)
            if zs_fail or sym_fail:
                problems.append(f"{name}: {zs_fail} zero-sum, {sym_fail} symmetry failures")
        detail = f"{profiles} profiles x 3 families" + ("; " + "; ".join(problems) if problems else ", all pass")
        return not problems, detail
    return _timed(7, "zero-sum and symmetry invariants", None, body)


def criterion_zero_payoff() -> CriterionResult:
    def body():
        worst = 0.0
        count = 0
        for rows in (_sweep_br(), _sweep_fp()):
            for _, _, rep, _ in rows:
                if rep is not None and (rep.is_nash and rep.holds):
                    worst = max(worst, max(abs(u) for u in rep.payoffs))
                    count += 1
        ok = count == 40 and worst <= 1e-6
        return ok, f"{count} verified equilibria, max |payoff| {worst:.2e} (tol 1e-6)"
    return _timed(8, "zero payoff at equilibrium", None, body)


def criterion_decoupling() -> CriterionResult:
    def body():
        params = OligopolyParams(10.0, 0.0, 2.0, 1.0)
        game = build_game(params)
        target = ((10 - 2) / 3, (10 - 1) / 2)
        worst = 0.0
        ok = True
        for trace in (solve_best_response(game), solve_fixed_point(game, damping=SWEEP_FP_DAMPING)):
            ok &= trace.converged
            worst = max(worst, abs(trace.point.s1 - target[0]), abs(trace.point.s2 - target[1]))
        return ok and worst <= 1e-4, f"b=0: max |s - ((a-cA)/3, (a-cC)/2)| = {worst:.2e} (tol 1e-4)"
    return _timed(9, "decoupling limit", None, body)


# (source, exact value) pairs; every value is representable exactly in binary
PRECEDENCE_VECTOR = [
    ("2^3^2", 512.0),
    ("(2^3)^2", 64.0),
    ("-2^2", -4.0),
    ("(-2)^2", 4.0),
    ("2^-1", 0.5),
    ("2+3*4", 14.0),
    ("(2+3)*4", 20.0),
    ("2*3+4", 10.0),
    ("8-4-2", 2.0),
    ("8/4/2", 1.0),
    ("1-2+3", 2.0),
    ("2*3^2", 18.0),
    ("-3*-2", 6.0),
    ("--3", 3.0),
    ("12/4*3", 9.0),
    ("2^3*2", 16.0),
    ("1.5e1 - 0.5", 14.5),
]


def random_tree(rng: random.Random, depth: int, groups: GroupSpec, params: dict[str, float]):
    """Random expression tree over literals, variables and parameters."""
    if depth <= 0 or rng.random() < 0.25:
        kind = rng.randrange(4)
        if kind == 0:
            return Num(float(rng.randint(0, 20)))
        if kind == 1:
            return Num(round(rng.uniform(0, 10), 3))
        if kind == 2:
            if rng.random() < 0.5:
                return Var(1, rng.randint(1, groups.m))
            return Var(2, rng.randint(1, groups.n))
        name = rng.choice(sorted(params))
        return Param(name, params[name])
    r = rng.random()
    if r < 0.12:
        return Neg(random_tree(rng, depth - 1, groups, params))
    op = rng.choice("+-*/^")
    return BinOp(op, random_tree(rng, depth - 1, groups, params), random_tree(rng, depth - 1, groups, params))


def criterion_expr() -> CriterionResult:
    def body():
        groups = GroupSpec(3, 2)
        profile = StrategyProfile([0, 0, 0], [0, 0])
        from groupgame.expr import evaluate
        mismatches = [s for s, want in PRECEDENCE_VECTOR if evaluate(parse(s, groups), profile) != want]
        tree_ok = parse("x1 + 2*y1", groups).root == BinOp("+", Var(1, 1), BinOp("*", Num(2.0), Var(2, 1)))
        rng = random.Random(SEED + 10)
        params = {"a": 10.0, "b": 0.5, "cA": 2.0}
        round_trip_fail = 0
        for _ in range(1000):
            tree = random_tree(rng, 5, groups, params)
            if parse(to_source(tree), groups, params).root != tree:
                round_trip_fail += 1
        ok = not mismatches and tree_ok and round_trip_fail == 0
        detail = (f"{len(PRECEDENCE_VECTOR)} precedence cases, {len(mismatches)} mismatches; "
                  f"tree shape {'ok' if tree_ok else 'wrong'}; 1000 round trips, {round_trip_fail} failures")
        return ok, detail
    return _timed(10, "expression language exactness", None, body)


CRITERIA = [
    criterion_closed_form,
    criterion_saddle_coincidence,
    criterion_theorem1,
    criterion_theorem2,
    criterion_weak_duality,
    criterion_quadratic_oracle,
    criterion_invariants,
    criterion_zero_payoff,
    criterion_decoupling,
    criterion_expr,
]


def run_all(echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for criterion in CRITERIA:
        res = criterion()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
