import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupgame.acceptance import random_interior_quadratic
from groupgame.equilibrium import SymmetricPoint, pair_slice
from groupgame.game_model import Interval
from groupgame.scalar_opt import (
    NumericError,
    argmax_interval,
    argmin_interval,
    maximin,
    minimax,
    quasiconcavity_diagnostic,
    saddle_check,
)

UNIT = Interval(0.0, 1.0)
SYM = Interval(-1.0, 1.0)
EQ = SymmetricPoint(14 / 9, 10 / 3)


class TestOneDimensional:
    def test_interior_quadratic_max(self):
        r = argmax_interval(lambda x: -(x - 1) ** 2, Interval(0, 3), 1e-8)
        assert r.arg == pytest.approx(1, abs=1e-7)
        assert r.value == pytest.approx(0, abs=1e-14)

    def test_boundary_max(self):
        r = argmax_interval(lambda x: x, Interval(0, 2))
        assert r.arg == 2 and r.value == 2

    def test_constant_breaks_ties_to_smallest(self):
        assert argmax_interval(lambda x: 5.0, UNIT).arg == 0.0
        assert argmin_interval(lambda x: 5.0, UNIT).arg == 0.0

    def test_min_examples(self):
        assert argmin_interval(lambda x: (x - 2) ** 2, Interval(0, 5)).arg == pytest.approx(2, abs=1e-7)
        assert argmin_interval(lambda x: -x, Interval(0, 2)).arg == 2
        assert argmin_interval(lambda x: abs(x - 0.5), UNIT).arg == pytest.approx(0.5, abs=1e-6)

    def test_non_finite_values_raise(self):
        with pytest.raises(NumericError):
            argmax_interval(lambda x: math.nan, UNIT)
        with pytest.raises(NumericError):
            argmax_interval(lambda x: math.inf if x > 0.5 else 0.0, UNIT)

    def test_vectorized_matches_scalar(self):
        f = lambda x: np.sin(3 * x) - 0.2 * x
        a = argmax_interval(f, Interval(0, 2), vectorized=True)
        b = argmax_interval(f, Interval(0, 2), vectorized=False)
        assert a.arg == b.arg and a.value == b.value


class TestNested:
    def test_bilinear(self):
        assert maximin(lambda x, y: x * y, SYM, SYM).value == pytest.approx(0, abs=1e-9)
        assert maximin(lambda x, y: x * y, SYM, SYM).arg == pytest.approx(0, abs=1e-6)
        assert minimax(lambda x, y: x * y, SYM, SYM).arg == pytest.approx(0, abs=1e-6)

    def test_separable_saddle(self):
        f = lambda x, y: -(x - 0.3) ** 2 + (y - 0.7) ** 2
        lo, hi = maximin(f, UNIT, UNIT), minimax(f, UNIT, UNIT)
        assert lo.arg == pytest.approx(0.3, abs=1e-7) and lo.value == pytest.approx(0, abs=1e-12)
        assert hi.arg == pytest.approx(0.7, abs=1e-7) and hi.value == pytest.approx(0, abs=1e-12)

    def test_saddle_check_examples(self):
        r = saddle_check(lambda x, y: x * y, SYM, SYM)
        assert abs(r.gap) <= 1e-6 and r.coincident
        r = saddle_check(lambda x, y: -x * x + y * y, SYM, SYM)
        assert r.maximin_value == pytest.approx(0, abs=1e-12)
        assert r.minimax_value == pytest.approx(0, abs=1e-12)

    def test_coincident_only_for_equal_boxes(self):
        r = saddle_check(lambda x, y: x * y, SYM, Interval(-1, 2))
        assert r.coincident is None

    def test_oligopoly_slices(self, ref_game):
        f = pair_slice(ref_game, 0, 1, EQ)
        box = ref_game.space1
        lo, hi = maximin(f, box, box), minimax(f, box, box)
        assert lo.arg == pytest.approx(14 / 9, abs=1e-4) and abs(lo.value) <= 1e-6
        assert hi.arg == pytest.approx(14 / 9, abs=1e-4)
        r = saddle_check(pair_slice(ref_game, 3, 4, EQ), box, box)
        assert abs(r.gap) <= 1e-5
        assert r.maximin_arg == pytest.approx(10 / 3, abs=1e-4)
        assert r.minimax_arg == pytest.approx(10 / 3, abs=1e-4)

    def test_oligopoly_slice_against_brute_force_grid(self, ref_game):
        f = pair_slice(ref_game, 0, 1, EQ)
        xs = np.linspace(0, 10, 2001)
        values = f(xs[:, None], xs[None, :])
        inner = values.min(axis=1)
        grid_arg = xs[int(np.argmax(inner))]
        got = maximin(f, ref_game.space1, ref_game.space1, vectorized=True)
        assert got.arg == pytest.approx(grid_arg, abs=10 / 2000)
        assert got.value == pytest.approx(inner.max(), abs=1e-4)

    def test_vectorized_and_scalar_agree(self, ref_game):
        f = pair_slice(ref_game, 0, 1, EQ)
        box = ref_game.space1
        a = maximin(f, box, box, vectorized=True)
        b = maximin(f, box, box, vectorized=False)
        assert a.arg == pytest.approx(b.arg, abs=1e-7)

    def test_deterministic(self):
        f = lambda x, y: np.cos(4 * x) * y - 0.3 * y * y
        results = {maximin(f, UNIT, UNIT, vectorized=True).arg for _ in range(3)}
        assert len(results) == 1

    def test_grid_refinement_stable(self, ref_game):
        tol = 1e-8
        f = pair_slice(ref_game, 0, 1, EQ)
        box = ref_game.space1
        v64 = maximin(f, box, box, tol, grid=64, vectorized=True).value
        v128 = maximin(f, box, box, tol, grid=128, vectorized=True).value
        assert abs(v64 - v128) < 10 * tol


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
)
def test_weak_duality_on_arbitrary_quadratics(a, b, c, d, e, k):
    # no curvature assumptions: maximin never exceeds minimax
    f = lambda x, y: a * x * x + b * y * y + c * x * y + d * x + e * y + k * np.sin(5 * x * y)
    r = saddle_check(f, UNIT, UNIT, vectorized=True)
    scale = max(1.0, abs(r.maximin_value), abs(r.minimax_value))
    assert r.maximin_value <= r.minimax_value + 1e-9 * scale


def test_quadratic_oracle_equivalence():
    rng = np.random.default_rng(3)
    for _ in range(10):
        f, (x, y) = random_interior_quadratic(rng)
        assert maximin(f, UNIT, UNIT, vectorized=True).arg == pytest.approx(x, abs=1e-6)
        assert minimax(f, UNIT, UNIT, vectorized=True).arg == pytest.approx(y, abs=1e-6)


class TestDiagnostic:
    def test_concave_convex_clean(self):
        rep = quasiconcavity_diagnostic(lambda x, y: -x * x + y * y, SYM, SYM, samples=8)
        assert rep.violations == 0

    def test_bimodal_flagged(self):
        rep = quasiconcavity_diagnostic(lambda x, y: (x - 0.2) ** 2 * (x - 0.8) ** 2 * -1.0 + 0 * y,
                                        UNIT, UNIT, samples=4)
        assert rep.violations_x >= 1
        assert rep.witnesses

    def test_oligopoly_slice_clean(self, ref_game):
        rep = quasiconcavity_diagnostic(pair_slice(ref_game, 0, 1, EQ),
                                        ref_game.space1, ref_game.space1, samples=8)
        assert rep.violations == 0
