"""Maximin, minimax and Nash equilibria of two-group games that are zero-sum
and symmetric inside each group."""

__version__ = "0.1.0"

from groupgame.equilibrium import (  # noqa: E402
    EquilibriumReport,
    FixedPointTrace,
    SymmetricPoint,
    best_response_map,
    maximin_map,
    nash_check,
    solve_best_response,
    solve_fixed_point,
    verify_theorem1,
    verify_theorem2,
)
from groupgame.game_model import (  # noqa: E402
    GroupedGame,
    GroupSpec,
    Interval,
    StrategyProfile,
    check_group_symmetry,
    check_group_zero_sum,
    evaluate_payoff,
)
from groupgame.oligopoly import (  # noqa: E402
    OligopolyParams,
    build_game,
    closed_form_equilibrium,
    closed_form_saddle_strategies,
)
from groupgame.scalar_opt import (  # noqa: E402
    OptResult,
    SaddleResult,
    argmax_interval,
    argmin_interval,
    maximin,
    minimax,
    saddle_check,
)
