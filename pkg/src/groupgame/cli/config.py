"""Run configuration: JSON ingestion, schema validation and defaulting."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from groupgame.equilibrium import (
    DEFAULT_DAMPING,
    DEFAULT_DEV_TOL,
    DEFAULT_FP_TOL,
    DEFAULT_GAP_TOL,
    DEFAULT_MAX_ITER,
    SymmetricPoint,
)
from groupgame.expr import Expr, ExprError, parse
from groupgame.families import QuadraticSaddleParams, build_quadratic_game, custom_expr_game
from groupgame.game_model import GameError, GroupedGame, GroupSpec, Interval
from groupgame.oligopoly import OligopolyParams, build_game
from groupgame.scalar_opt import DEFAULT_COINCIDENCE_TOL, DEFAULT_TOL

SCHEMA_VERSION = "1"
DEFAULT_SEED = 20190101
METHODS = ("maximin-fp", "best-response", "both")


class ConfigError(ValueError):
    """Configuration problem; ``pointer`` is a JSON pointer into the document."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer


@lru_cache(maxsize=1)
def config_schema() -> dict:
    text = resources.files("groupgame.cli").joinpath("config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _pointer(path) -> str:
    return "".join(f"/{str(p).replace('~', '~0').replace('/', '~1')}" for p in path)


@dataclass(frozen=True)
class SolverSettings:
    method: str = "maximin-fp"
    damping: float = DEFAULT_DAMPING
    fp_tol: float = DEFAULT_FP_TOL
    opt_tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    start: tuple[float, float] | None = None


@dataclass(frozen=True)
class VerifySettings:
    theorem1: bool = True
    theorem2: bool = True
    diagnostics: bool = False
    all_players: bool = False
    other_pairs: bool = True
    dev_tol: float = DEFAULT_DEV_TOL
    gap_tol: float = DEFAULT_GAP_TOL
    coincidence_tol: float = DEFAULT_COINCIDENCE_TOL
    diagnostic_samples: int = 16


@dataclass(frozen=True)
class RunConfig:
    family: str
    params: dict[str, float]
    groups: GroupSpec
    space1: Interval
    space2: Interval
    solver: SolverSettings
    verify: VerifySettings
    seed: int = DEFAULT_SEED
    point: tuple[float, float] | None = None
    payoffs: dict[str, str] | None = None
    templates: tuple[Expr, Expr] | None = field(default=None, compare=False)
    output_path: str | None = None
    output_format: str = "json"
    timings: bool = False

    def echo(self) -> dict[str, Any]:
        """The resolved configuration, defaults filled in, in schema order."""
        out: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "family": self.family,
            "params": dict(self.params),
            "groups": {"m": self.groups.m, "n": self.groups.n},
            "intervals": {"g1": [self.space1.lo, self.space1.hi], "g2": [self.space2.lo, self.space2.hi]},
        }
        if self.payoffs is not None:
            out["payoffs"] = dict(self.payoffs)
        s = self.solver
        out["solver"] = {
            "method": s.method, "damping": s.damping, "fp_tol": s.fp_tol, "opt_tol": s.opt_tol,
            "max_iter": s.max_iter, "start": list(s.start) if s.start else None,
        }
        v = self.verify
        out["verify"] = {
            "theorem1": v.theorem1, "theorem2": v.theorem2, "diagnostics": v.diagnostics,
            "all_players": v.all_players, "other_pairs": v.other_pairs, "dev_tol": v.dev_tol,
            "gap_tol": v.gap_tol, "coincidence_tol": v.coincidence_tol,
            "diagnostic_samples": v.diagnostic_samples,
        }
        out["point"] = list(self.point) if self.point else None
        out["seed"] = self.seed
        out["output"] = {"path": self.output_path, "format": self.output_format, "timings": self.timings}
        return out

    def oligopoly_params(self) -> OligopolyParams:
        p = self.params
        return OligopolyParams(p["a"], p["b"], p["cA"], p["cC"], self.groups)

    def quadratic_params(self) -> QuadraticSaddleParams:
        p = self.params
        return QuadraticSaddleParams(p["h1"], p["p1"], p["r1"], p["d1"],
                                     p["h2"], p["p2"], p["r2"], p["d2"], self.groups)

    def start_point(self) -> SymmetricPoint | None:
        return SymmetricPoint(*self.solver.start) if self.solver.start else None


def build_game_from_config(config: RunConfig) -> GroupedGame:
    """Construct the configured game.

    Raises:
        ConfigError: the family parameters violate the family's invariants.
    """
    try:
        if config.family == "oligopoly":
            cap = config.space1.hi
            return build_game(config.oligopoly_params(), cap)
        if config.family == "quadratic_saddle":
            return build_quadratic_game(config.quadratic_params(), config.space1, config.space2)
        t1, t2 = config.templates
        return custom_expr_game(config.groups, config.space1, config.space2, t1, t2, seed=config.seed)
    except GameError as exc:
        field_name = getattr(exc, "field", None)
        if field_name in ("c_A", "c_C"):
            field_name = field_name.replace("_", "")
        pointer = f"/params/{field_name}" if field_name and field_name != "cap" else ""
        raise ConfigError(f"invalid {config.family} game: {exc}", pointer) from exc
    except ArithmeticError as exc:
        # template evaluation during the build-time symmetry check
        raise ConfigError(f"payoff expression cannot be evaluated: {exc}", "/payoffs") from exc


def _interval(raw, pointer: str) -> Interval:
    try:
        return Interval(float(raw[0]), float(raw[1]))
    except GameError as exc:
        raise ConfigError(str(exc), pointer) from exc


def config_from_dict(doc: Any) -> RunConfig:
    """Validate a decoded JSON document and resolve defaults.

    Raises:
        ConfigError: schema violation (with JSON pointer), bad intervals or
            payoff expressions that fail to parse.
    """
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = errors[0]
        raise ConfigError(err.message, _pointer(err.absolute_path))

    family = doc["family"]
    params = {k: float(v) for k, v in doc.get("params", {}).items()}
    g = doc.get("groups", {})
    try:
        groups = GroupSpec(g.get("m", 3), g.get("n", 2))
    except GameError as exc:
        raise ConfigError(str(exc), "/groups") from exc

    if "intervals" in doc:
        if family == "oligopoly":
            g1, g2 = doc["intervals"]["g1"], doc["intervals"]["g2"]
            if g1[0] != 0 or g2[0] != 0 or g1[1] != g2[1]:
                raise ConfigError("oligopoly strategy intervals must both be [0, cap]", "/intervals")
        space1 = _interval(doc["intervals"]["g1"], "/intervals/g1")
        space2 = _interval(doc["intervals"]["g2"], "/intervals/g2")
    else:
        # oligopoly default: [0, cap] with cap = a
        cap = float(doc.get("cap", params["a"]))
        if cap <= 0:
            raise ConfigError(f"strategy cap must be positive, got {cap}", "/params/a")
        space1 = space2 = Interval(0.0, cap)

    templates = None
    payoffs = None
    if family == "custom_expr":
        payoffs = {"g1": doc["payoffs"]["g1"], "g2": doc["payoffs"]["g2"]}
        parsed = []
        for key in ("g1", "g2"):
            try:
                parsed.append(parse(payoffs[key], groups, params))
            except ExprError as exc:
                raise ConfigError(str(exc), f"/payoffs/{key}") from exc
        templates = (parsed[0], parsed[1])

    s = doc.get("solver", {})
    solver = SolverSettings(
        method=s.get("method", "maximin-fp"),
        damping=float(s.get("damping", DEFAULT_DAMPING)),
        fp_tol=float(s.get("fp_tol", DEFAULT_FP_TOL)),
        opt_tol=float(s.get("opt_tol", DEFAULT_TOL)),
        max_iter=int(s.get("max_iter", DEFAULT_MAX_ITER)),
        start=tuple(float(x) for x in s["start"]) if s.get("start") is not None else None,
    )
    v = doc.get("verify", {})
    verify = VerifySettings(
        theorem1=v.get("theorem1", True),
        theorem2=v.get("theorem2", True),
        diagnostics=v.get("diagnostics", False),
        all_players=v.get("all_players", False),
        other_pairs=v.get("other_pairs", True),
        dev_tol=float(v.get("dev_tol", DEFAULT_DEV_TOL)),
        gap_tol=float(v.get("gap_tol", DEFAULT_GAP_TOL)),
        coincidence_tol=float(v.get("coincidence_tol", DEFAULT_COINCIDENCE_TOL)),
        diagnostic_samples=int(v.get("diagnostic_samples", 16)),
    )
    out = doc.get("output", {})
    point = tuple(float(x) for x in doc["point"]) if doc.get("point") is not None else None
    return RunConfig(
        family=family, params=params, groups=groups, space1=space1, space2=space2,
        solver=solver, verify=verify, seed=int(doc.get("seed", DEFAULT_SEED)), point=point,
        payoffs=payoffs, templates=templates, output_path=out.get("path"),
        output_format=out.get("format", "json"), timings=bool(out.get("timings", False)),
    )


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON run configuration.

    Raises:
        ConfigError: missing file, malformed JSON or any validation failure.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(doc)
