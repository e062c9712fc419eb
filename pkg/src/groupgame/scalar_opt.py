"""Optimization of scalar functions on compact intervals.

Every search is a uniform grid scan that brackets the best grid point,
followed by golden-section refinement of the bracket down to width ``tol``.
The refined point competes with the best grid point at the end, so boundary
optima are returned exactly. Ties go to the smallest argument.

The nested ``maximin``/``minimax`` searches accept ``vectorized=True`` for
oracles that broadcast over numpy arrays; the inner searches for all outer
grid points then run as one batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from groupgame.game_model import Interval

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_TOL = 1e-8
DEFAULT_GRID = 64
DEFAULT_COINCIDENCE_TOL = 1e-4
INNER_TOL_RATIO = 0.1


class NumericError(ArithmeticError):
    """The objective returned a non-finite value."""


@dataclass(frozen=True)
class OptResult:
    arg: float
    value: float
    evaluations: int
    # location of the inner optimum at ``arg`` (nested searches only)
    inner_arg: float | None = None


@dataclass(frozen=True)
class SaddleResult:
    maximin_value: float
    minimax_value: float
    maximin_arg: float
    minimax_arg: float
    inner_min_at_maximin: float
    gap: float
    coincident: bool | None

    def to_dict(self) -> dict:
        return {
            "maximin_value": self.maximin_value,
            "minimax_value": self.minimax_value,
            "maximin_arg": self.maximin_arg,
            "minimax_arg": self.minimax_arg,
            "inner_min_at_maximin": self.inner_min_at_maximin,
            "gap": self.gap,
            "coincident": self.coincident,
        }


def _check_finite(value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NumericError(f"objective returned {value!r}")
    return value


def _check_finite_array(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NumericError("objective returned a non-finite value on the scan grid")
    return values


def _max_steps(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(INV_PHI))) + 2


def _golden(point: Callable[[float], float], a: float, b: float, sign: float, tol: float):
    """Golden-section maximization of ``sign * point`` on [a, b].

    Returns (arg, sign * point(arg), evaluations).
    """
    steps = _max_steps(b - a, tol)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = sign * _check_finite(point(c))
    fd = sign * _check_finite(point(d))
    evals = 2
    for _ in range(steps):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = sign * _check_finite(point(c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = sign * _check_finite(point(d))
        evals += 1
    x = 0.5 * (a + b)
    return x, sign * _check_finite(point(x)), evals + 1


def _search(point, scan, lo: float, hi: float, sign: float, tol: float, grid: int, xs=None):
    """Grid scan plus golden refinement. Returns (arg, value, evaluations).

    ``point`` evaluates one float; ``scan`` evaluates an array of grid points
    (``xs``, the uniform grid on [lo, hi], when precomputed by the caller).
    """
    if xs is None:
        xs = np.linspace(lo, hi, grid)
    vals = _check_finite_array(np.broadcast_to(np.asarray(scan(xs), dtype=float), xs.shape)) * sign
    k = int(np.argmax(vals))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, grid - 1)]
    x, fx, evals = _golden(point, float(a), float(b), sign, tol)
    best_x, best_f = float(xs[k]), float(vals[k])
    if fx > best_f or (fx == best_f and x < best_x):
        best_x, best_f = x, fx
    return best_x, sign * best_f, evals + grid


def _batch_inner(f2, us: np.ndarray, lo: float, hi: float, sign: float, tol: float, grid: int):
    """For every u in ``us`` optimize ``sign * f2(u, v)`` over v in [lo, hi].

    Same algorithm as ``_search``, run in lock step across the batch; rows
    freeze once their bracket is narrower than ``tol``.
    """
    vs = np.linspace(lo, hi, grid)
    vals = _check_finite_array(np.broadcast_to(f2(us[:, None], vs[None, :]), (us.size, grid))) * sign
    k = np.argmax(vals, axis=1)
    rows = np.arange(us.size)
    grid_v = vs[k]
    grid_f = vals[rows, k]
    a = vs[np.maximum(k - 1, 0)]
    b = vs[np.minimum(k + 1, grid - 1)]

    def ev(points):
        return sign * _check_finite_array(np.broadcast_to(f2(us, points), us.shape).astype(float))

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = ev(c)
    fd = ev(d)
    evals = us.size * (grid + 2)
    steps = _max_steps(float(np.max(b - a)), tol)
    for _ in range(steps):
        active = (b - a) > tol
        if not active.any():
            break
        keep_left = fc >= fd
        L = active & keep_left
        R = active & ~keep_left
        b = np.where(L, d, b)
        a = np.where(R, c, a)
        d, fd, c, fc = (np.where(L, c, d), np.where(L, fc, fd),
                        np.where(R, d, c), np.where(R, fd, fc))
        c = np.where(L, b - INV_PHI * (b - a), c)
        d = np.where(R, a + INV_PHI * (b - a), d)
        fp = ev(np.where(L, c, d))
        fc = np.where(L, fp, fc)
        fd = np.where(R, fp, fd)
        evals += us.size
    mid = 0.5 * (a + b)
    fm = ev(mid)
    take_mid = (fm > grid_f) | ((fm == grid_f) & (mid < grid_v))
    arg = np.where(take_mid, mid, grid_v)
    val = np.where(take_mid, fm, grid_f) * sign
    return arg, val, evals + us.size


def _scan_for(f, vectorized: bool):
    if vectorized:
        return f
    return lambda xs: [f(float(x)) for x in xs]


def argmax_interval(f: Callable[[float], float], box: Interval, tol: float = DEFAULT_TOL,
                    grid: int = DEFAULT_GRID, vectorized: bool = False) -> OptResult:
    """Maximize a quasi-concave scalar function on ``box``.

    Non-unimodal functions still return the best grid bracket's local optimum.

    Raises:
        NumericError: if ``f`` returns inf or nan.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, v, n = _search(f, _scan_for(f, vectorized), box.lo, box.hi, 1.0, tol, grid)
    return OptResult(x, v, n)


def argmin_interval(f: Callable[[float], float], box: Interval, tol: float = DEFAULT_TOL,
                    grid: int = DEFAULT_GRID, vectorized: bool = False) -> OptResult:
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, v, n = _search(f, _scan_for(f, vectorized), box.lo, box.hi, -1.0, tol, grid)
    return OptResult(x, v, n)


def _as_batched(f2, vectorized: bool):
    if vectorized:
        return f2
    return np.vectorize(f2, otypes=[float])


def _nested(f2, U: Interval, V: Interval, outer_sign: float, inner_sign: float, tol: float,
            grid: int, vectorized: bool) -> OptResult:
    """Optimize over u the inner optimum over v of f2(u, v)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    inner_tol = tol * INNER_TOL_RATIO
    batched = _as_batched(f2, vectorized)
    evals = 0

    def inner(u: float):
        nonlocal evals
        if vectorized:
            scan = lambda vs: f2(u, vs)
        else:
            scan = lambda vs: [f2(u, float(v)) for v in vs]
        v, val, n = _search(lambda v: f2(u, v), scan, V.lo, V.hi, inner_sign, inner_tol, grid, vs)
        evals += n
        return v, val

    vs = np.linspace(V.lo, V.hi, grid)
    us = np.linspace(U.lo, U.hi, grid)
    _, g, n = _batch_inner(batched, us, V.lo, V.hi, inner_sign, inner_tol, grid)
    evals += n
    g = g * outer_sign
    k = int(np.argmax(g))
    a = float(us[max(k - 1, 0)])
    b = float(us[min(k + 1, grid - 1)])
    u_mid, g_mid, _ = _golden(lambda u: inner(u)[1], a, b, outer_sign, tol)
    u_best = float(us[k])
    if g_mid > g[k] or (g_mid == g[k] and u_mid < u_best):
        u_best = u_mid
    # recompute at the winner so value and inner_arg are consistent with arg
    v_best, value = inner(u_best)
    return OptResult(u_best, float(value), evals, inner_arg=float(v_best))


def maximin(f: Callable[[float, float], float], X: Interval, Y: Interval, tol: float = DEFAULT_TOL,
            grid: int = DEFAULT_GRID, vectorized: bool = False) -> OptResult:
    """arg max over x of min over y of f(x, y); ``inner_arg`` is the minimizing y."""
    return _nested(f, X, Y, 1.0, -1.0, tol, grid, vectorized)


def minimax(f: Callable[[float, float], float], X: Interval, Y: Interval, tol: float = DEFAULT_TOL,
            grid: int = DEFAULT_GRID, vectorized: bool = False) -> OptResult:
    """arg min over y of max over x of f(x, y); ``inner_arg`` is the maximizing x."""
    return _nested(lambda y, x: f(x, y), Y, X, -1.0, 1.0, tol, grid, vectorized)


def saddle_check(f: Callable[[float, float], float], X: Interval, Y: Interval, tol: float = DEFAULT_TOL,
                 coincidence_tol: float = DEFAULT_COINCIDENCE_TOL, grid: int = DEFAULT_GRID,
                 vectorized: bool = False) -> SaddleResult:
    lower = maximin(f, X, Y, tol, grid, vectorized)
    upper = minimax(f, X, Y, tol, grid, vectorized)
    coincident = None
    if X == Y:
        coincident = abs(lower.arg - upper.arg) <= coincidence_tol
    return SaddleResult(
        maximin_value=lower.value,
        minimax_value=upper.value,
        maximin_arg=lower.arg,
        minimax_arg=upper.arg,
        inner_min_at_maximin=lower.inner_arg,
        gap=upper.value - lower.value,
        coincident=coincident,
    )


@dataclass
class QuasiConcavityReport:
    samples: int
    violations_x: int = 0
    violations_y: int = 0
    witnesses: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return self.violations_x + self.violations_y


def _interior_dips(vals: np.ndarray, eps: float) -> np.ndarray:
    """Indices strictly below some earlier value and some later value."""
    left = np.maximum.accumulate(vals)[:-2]
    right = np.maximum.accumulate(vals[::-1])[::-1][2:]
    mid = vals[1:-1]
    return np.nonzero((left > mid + eps) & (right > mid + eps))[0] + 1


def quasiconcavity_diagnostic(f: Callable[[float, float], float], X: Interval, Y: Interval,
                              samples: int = 16, grid: int = 101,
                              seed: int = 0) -> QuasiConcavityReport:
    """Sample slices of f and look for unimodality violations.

    f(., y) should be quasi-concave for every y and f(x, .) quasi-convex for
    every x. Advisory only.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    xs = np.linspace(X.lo, X.hi, grid)
    ys = np.linspace(Y.lo, Y.hi, grid)
    report = QuasiConcavityReport(samples=samples)
    for y in rng.uniform(Y.lo, Y.hi, samples):
        vals = np.array([f(float(x), float(y)) for x in xs])
        eps = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
        dips = _interior_dips(vals, eps)
        if dips.size:
            report.violations_x += 1
            report.witnesses.append({"slice": "x", "fixed": float(y), "at": float(xs[dips[0]])})
    for x in rng.uniform(X.lo, X.hi, samples):
        vals = np.array([f(float(x), float(y)) for y in ys])
        eps = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
        peaks = _interior_dips(-vals, eps)
        if peaks.size:
            report.violations_y += 1
            report.witnesses.append({"slice": "y", "fixed": float(x), "at": float(ys[peaks[0]])})
    return report
