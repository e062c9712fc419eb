"""Solver orchestration: config in, report out.

Exit codes: 0 success, 1 usage/config/IO error, 2 non-convergence,
3 verification failure.
"""
from __future__ import annotations

import math
import time
from contextlib import contextmanager
from typing import Any, Callable

from groupgame import __version__
from groupgame.cli.config import ConfigError, RunConfig, build_game_from_config
from groupgame.cli.report import REPORT_SCHEMA_VERSION, RunReport
from groupgame.equilibrium import (
    EquilibriumError,
    EquilibriumReport,
    FixedPointTrace,
    SymmetricPoint,
    maximin_map,
    nash_check,
    pair_slice,
    solve_best_response,
    solve_fixed_point,
    verify_theorem1,
    verify_theorem2,
)
from groupgame.game_model import GroupedGame
from groupgame.oligopoly import closed_form_equilibrium, closed_form_saddle_strategies, inverse_demand
from groupgame.scalar_opt import SaddleResult, quasiconcavity_diagnostic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
EXIT_VERIFICATION = 3


def _point(p: SymmetricPoint | None) -> dict | None:
    return None if p is None else {"s1": p.s1, "s2": p.s2}


def _trace_summary(trace: FixedPointTrace, start: SymmetricPoint, damping: float) -> dict:
    return {
        "converged": trace.converged,
        "iterations": trace.iterations,
        "residual": trace.residual,
        "start": _point(start),
        "damping": damping,
        "point": _point(trace.point),
    }


def _saddle(res: SaddleResult | None) -> dict | None:
    return None if res is None else res.to_dict()


def _equilibrium_block(game: GroupedGame, rep: EquilibriumReport) -> dict:
    labels = game.groups.labels()
    return {
        "point": _point(rep.point),
        "players": labels,
        "payoffs": list(rep.payoffs),
        "deviation_gaps": list(rep.deviation_gaps),
        "max_deviation_gap": max(rep.deviation_gaps),
        "is_nash": rep.is_nash,
    }


def _theorem_block(rep: EquilibriumReport) -> dict:
    return {
        "holds": rep.holds,
        "point": _point(rep.point),
        "is_nash": rep.is_nash,
        "max_deviation_gap": max(rep.deviation_gaps),
        "sion_g1": _saddle(rep.sion_g1),
        "sion_g2": _saddle(rep.sion_g2),
        "coincidence_g1": rep.coincidence_g1,
        "coincidence_g2": rep.coincidence_g2,
        "other_pairs": {k: v.to_dict() for k, v in rep.other_pairs.items()},
    }


class _Clock:
    def __init__(self):
        self.stages: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = self.stages.get(name, 0.0) + time.perf_counter() - t0


def run(config: RunConfig, verify_only: bool = False,
        on_iteration: Callable[[str, int, SymmetricPoint, float], None] | None = None) -> RunReport:
    """Build the game, solve, verify and assemble the report.

    With ``verify_only`` the solvers are skipped and the checks run at
    ``config.point``.
    """
    clock = _Clock()
    t_start = time.perf_counter()
    errors: list[dict] = []
    data: dict[str, Any] = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "toolkit_version": __version__,
        "mode": "verify" if verify_only else "solve",
        "config": config.echo(),
        "status": None,
        "solvers": {},
        "equilibrium": None,
        "theorem1": None,
        "theorem2": None,
        "closed_form": None,
        "diagnostics": None,
    }
    status = {"exit_code": EXIT_OK, "converged": None, "is_nash": None, "verified": None, "errors": errors}
    data["status"] = status
    csv_row: dict[str, Any] = {"family": config.family}

    def finish(code: int) -> RunReport:
        status["exit_code"] = code
        csv_row["exit_code"] = code
        if config.timings:
            clock.stages["total"] = time.perf_counter() - t_start
            data["timings"] = dict(clock.stages)
            csv_row["seconds"] = clock.stages["total"]
        return RunReport(data, code, csv_row)

    try:
        game = build_game_from_config(config)
    except ConfigError as exc:
        errors.append({"type": "config", "message": str(exc)})
        return finish(EXIT_USAGE)

    s = config.solver
    v = config.verify
    traces: dict[str, FixedPointTrace] = {}
    start = config.start_point() or SymmetricPoint(game.space1.midpoint, game.space2.midpoint)

    def hook(method):
        if on_iteration is None:
            return None
        return lambda k, p, r: on_iteration(method, k, p, r)

    try:
        if verify_only:
            if config.point is None:
                raise ConfigError("verify needs a point (config 'point' or --point)", "/point")
            target = SymmetricPoint(*config.point)
            with clock.stage("fixed_point_residual"):
                q = maximin_map(game, target, s.opt_tol)
            residual = target.distance(q)
            traces["supplied"] = FixedPointTrace([target], residual <= s.fp_tol, residual, 0, "supplied")
            data["solvers"]["supplied"] = {
                "converged": residual <= s.fp_tol,
                "iterations": 0,
                "residual": residual,
                "start": _point(target),
                "damping": None,
                "point": _point(target),
            }
        else:
            if s.method in ("maximin-fp", "both"):
                with clock.stage("maximin-fp"):
                    traces["maximin-fp"] = solve_fixed_point(
                        game, start, s.damping, s.fp_tol, s.max_iter, s.opt_tol, hook("maximin-fp"))
                data["solvers"]["maximin-fp"] = _trace_summary(traces["maximin-fp"], start, s.damping)
            if s.method in ("best-response", "both"):
                with clock.stage("best-response"):
                    traces["best-response"] = solve_best_response(
                        game, start, s.damping, s.fp_tol, s.max_iter, s.opt_tol, hook("best-response"))
                data["solvers"]["best-response"] = _trace_summary(traces["best-response"], start, s.damping)
            if len(traces) == 2:
                data["solvers"]["agreement"] = traces["maximin-fp"].point.distance(traces["best-response"].point)
    except (EquilibriumError, ConfigError, ArithmeticError) as exc:
        # bad start point, non-total payoff expression, non-finite oracle values
        errors.append({"type": type(exc).__name__, "message": str(exc)})
        return finish(EXIT_USAGE)

    primary_name = next(iter(traces))
    primary = traces[primary_name]
    # a supplied point that is not a fixed point fails verification, not convergence
    converged = verify_only or all(t.converged for t in traces.values())
    status["converged"] = None if verify_only else converged
    csv_row.update(method=primary_name, converged=primary.converged, iterations=primary.iterations,
                   residual=primary.residual, s1=primary.point.s1, s2=primary.point.s2)

    code = EXIT_OK
    verified: bool | None = None
    try:
        with clock.stage("nash_check"):
            base = nash_check(game, primary.point, v.dev_tol, s.opt_tol, v.all_players)
        data["equilibrium"] = _equilibrium_block(game, base)
        status["is_nash"] = base.is_nash
        csv_row.update(max_deviation_gap=max(base.deviation_gaps), is_nash=base.is_nash)
        if v.theorem1 or v.theorem2:
            verified = base.is_nash

        if v.theorem1:
            t1_point = traces.get("best-response", primary).point
            with clock.stage("theorem1"):
                try:
                    rep1 = verify_theorem1(game, t1_point, s.opt_tol, v.dev_tol, v.gap_tol,
                                           v.coincidence_tol, v.other_pairs)
                    data["theorem1"] = _theorem_block(rep1)
                    verified = bool(rep1.holds) if verified is None else verified and bool(rep1.holds)
                    csv_row.update(saddle_gap_g1=rep1.sion_g1.gap, saddle_gap_g2=rep1.sion_g2.gap)
                except EquilibriumError as exc:
                    data["theorem1"] = {"holds": False, "error": {"type": type(exc).__name__, "message": str(exc)}}
                    errors.append({"type": type(exc).__name__, "message": str(exc)})
                    verified = False
        fp_trace = traces.get("maximin-fp", traces.get("supplied"))
        if v.theorem2 and fp_trace is not None:
            with clock.stage("theorem2"):
                try:
                    rep2 = verify_theorem2(game, fp_trace, s.opt_tol, v.dev_tol, v.coincidence_tol,
                                           v.other_pairs)
                    data["theorem2"] = _theorem_block(rep2)
                    verified = bool(rep2.holds) if verified is None else verified and bool(rep2.holds)
                    csv_row.setdefault("saddle_gap_g1", rep2.sion_g1.gap)
                    csv_row.setdefault("saddle_gap_g2", rep2.sion_g2.gap)
                except EquilibriumError as exc:
                    data["theorem2"] = {"holds": False, "error": {"type": type(exc).__name__, "message": str(exc)}}
                    errors.append({"type": type(exc).__name__, "message": str(exc)})
                    verified = False

        if v.diagnostics:
            with clock.stage("diagnostics"):
                data["diagnostics"] = _diagnostics(game, primary.point, v.diagnostic_samples, config.seed)
    except ArithmeticError as exc:
        errors.append({"type": type(exc).__name__, "message": str(exc)})
        verified = False

    if config.family == "oligopoly":
        data["closed_form"] = _closed_form_block(config, game, traces)
        csv_row["closed_form_error"] = data["closed_form"]["max_abs_error"]

    status["verified"] = verified
    csv_row["verified"] = verified
    if not converged:
        code = EXIT_NONCONVERGENCE
    elif verified is False:
        code = EXIT_VERIFICATION
    return finish(code)


def _diagnostics(game: GroupedGame, p: SymmetricPoint, samples: int, seed: int) -> dict:
    m = game.groups.m
    out = {}
    for key, (i, j), box in (("g1", (0, 1), game.space1), ("g2", (m, m + 1), game.space2)):
        rep = quasiconcavity_diagnostic(pair_slice(game, i, j, p), box, box, samples, seed=seed)
        out[key] = {
            "samples": rep.samples,
            "violations_x": rep.violations_x,
            "violations_y": rep.violations_y,
            "witnesses": rep.witnesses[:5],
        }
    return out


def _closed_form_block(config: RunConfig, game: GroupedGame, traces: dict[str, FixedPointTrace]) -> dict:
    params = config.oligopoly_params()
    eq = closed_form_equilibrium(params)
    m, n = params.groups.m, params.groups.n
    solvers = {}
    worst = 0.0
    for name, trace in traces.items():
        p = trace.point
        err = max(abs(p.s1 - eq.point.s1), abs(p.s2 - eq.point.s2))
        price1, price2 = inverse_demand(params, m * p.s1, n * p.s2)
        solvers[name] = {"abs_error": err, "price1": price1, "price2": price2}
        worst = max(worst, err)
    return {
        "point": _point(eq.point),
        "price1": eq.price1,
        "price2": eq.price2,
        "marginal_cost1": params.c_A,
        "marginal_cost2": params.c_C,
        "saddle_strategies": [
            {"pair": ps.pair, "maximin": ps.maximin, "minimax": ps.minimax}
            for ps in closed_form_saddle_strategies(params)
        ],
        "solvers": solvers,
        "max_abs_error": worst if traces else math.nan,
    }
