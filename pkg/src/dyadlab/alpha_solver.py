"""Selection of the distinguished alpha0: shooting/bisection and curve crossing.

Away from one distinguished value, recursion orbits escape the invariant
strip; in the ab chart the deviation roughly doubles with a sign flip on
every step (the affine multiplier is -2).  classify_orbit turns that
into a two-sided verdict, bisect_alpha0 refines a bracket, and
intersect_with_curve cross-validates by locating where a forward image
of the entry segment crosses the invariant curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import mpmath
import numpy as np

from .params import ModelParams
from .plane_dynamics import chart_constants, map_ab
from .profile_recursion import OVERFLOW_LIMIT, next_alpha

if TYPE_CHECKING:
    from .invariant_curve import CurveGrid


class BracketError(ValueError):
    """Bisection endpoints do not have opposite decided verdicts."""


class NoIntersectionError(RuntimeError):
    """The iterated entry segment produced no sign change over the curve."""


class Verdict(str, Enum):
    POSITIVE_SIDE = "PositiveSide"
    NEGATIVE_SIDE = "NegativeSide"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class OrbitClass:
    """Escape-side classification of one recursion orbit.

    a_path holds the diagnostic coordinates a_n = ln(alpha_{n-1}/alpha_n)
    + c0/3 up to and including the escape step (as floats, whatever the
    working precision of the orbit itself was).
    """

    verdict: Verdict
    escape_index: int | None
    escape_value: float | None
    a_path: tuple[float, ...]


def _log(x):
    if isinstance(x, mpmath.mpf):
        return mpmath.log(x)
    return math.log(x)


def _third_of_c0(lam: float, like):
    if isinstance(like, mpmath.mpf):
        return 2 * mpmath.log(mpmath.mpf(lam)) / 3
    return 2.0 * math.log(lam) / 3.0


def classify_orbit(alpha0, params: ModelParams, threshold: float = 1.0, n_max: int = 200) -> OrbitClass:
    """Classify the orbit of alpha0 by the side on which it escapes.

    Iterates the recursion from (alpha_{-1}, alpha_0) = (0, alpha0) and
    stops at the first n with |a_n| > threshold, returning PositiveSide
    when (-1)^n * a_n > 0 and NegativeSide otherwise.  The parity factor
    undoes the sign flip the multiplier -2 applies on every step, so the
    verdict does not depend on which step crosses the threshold.
    Undecided means no escape within n_max steps.  alpha0 may be an
    mpmath.mpf, in which case the orbit runs at mp precision (needed to
    resolve brackets narrower than float epsilon).

    threshold must be at least 1: it has to dominate both the strip
    half-width and the entry transient, and escape deviations double per
    step so little resolution is lost by a large threshold.
    """
    if not alpha0 > 0:
        raise ValueError(f"alpha0 must be positive, got {alpha0!r}")
    if threshold < 1.0:
        raise ValueError(f"threshold must be at least 1, got {threshold}")
    if n_max < 10:
        raise ValueError(f"n_max must be at least 10, got {n_max}")
    third_c0 = _third_of_c0(params.lam, alpha0)
    x = alpha0 * 0
    y = alpha0
    a_path: list[float] = []
    for n in range(1, n_max + 1):
        x, y = y, next_alpha(x, y, params)
        if isinstance(y, float) and (not math.isfinite(y) or y > OVERFLOW_LIMIT):
            # Escape so fast the value overflowed: judge by the last
            # finite diagnostic coordinate.
            if not a_path:
                raise OverflowError("recursion overflowed before any diagnostic step")
            n_last = n - 1
            a_last = a_path[-1]
            verdict = Verdict.POSITIVE_SIDE if (-1) ** n_last * a_last > 0 else Verdict.NEGATIVE_SIDE
            return OrbitClass(verdict, n_last, a_last, tuple(a_path))
        a_n = float(_log(x / y) + third_c0)
        a_path.append(a_n)
        if abs(a_n) > threshold:
            verdict = Verdict.POSITIVE_SIDE if (-1) ** n * a_n > 0 else Verdict.NEGATIVE_SIDE
            return OrbitClass(verdict, n, a_n, tuple(a_path))
    return OrbitClass(Verdict.UNDECIDED, None, None, tuple(a_path))


@dataclass(frozen=True)
class AlphaResult:
    """Outcome of an alpha0 solve, with reproducibility records.

    alpha0 is a float normally and an mpmath.mpf when the bisection was
    run with mpf endpoints.
    """

    alpha0: float
    method: str
    bracket: tuple[float, float] | None = None
    iterations: int | None = None
    verdicts: str | None = None
    transversality_margin: float | None = None
    t_star: float | None = None
    b_at_crossing: float | None = None
    n_iter: int | None = None

    def __float__(self) -> float:
        return float(self.alpha0)


def _classify_decided(alpha0, params, threshold, n_max, what: str) -> OrbitClass:
    cls = classify_orbit(alpha0, params, threshold=threshold, n_max=n_max)
    if cls.verdict is Verdict.UNDECIDED:
        cls = classify_orbit(alpha0, params, threshold=threshold, n_max=2 * n_max)
    if cls.verdict is Verdict.UNDECIDED:
        raise BracketError(f"{what} alpha0 = {alpha0} is undecided even at n_max = {2 * n_max}")
    return cls


def bisect_alpha0(
    lo,
    hi,
    params: ModelParams,
    tol: float = 1e-12,
    threshold: float = 1.0,
    n_max: int = 200,
) -> AlphaResult:
    """Bisect a bracket with opposite verdicts down to width tol.

    Verdict monotonicity in alpha0 is not assumed: every midpoint is
    classified afresh and must reproduce one of the two endpoint
    verdicts (so each halving re-verifies the endpoint it replaces).
    Pass mpmath.mpf endpoints (with mpmath.mp.dps raised accordingly)
    for tol below float resolution.
    """
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got ({lo}, {hi})")
    cls_lo = _classify_decided(lo, params, threshold, n_max, "lower endpoint")
    cls_hi = _classify_decided(hi, params, threshold, n_max, "upper endpoint")
    if cls_lo.verdict is cls_hi.verdict:
        raise BracketError(
            f"both endpoints classify as {cls_lo.verdict.value}; widen the bracket"
        )
    verdict_record = [cls_lo.verdict.value[0], cls_hi.verdict.value[0]]
    iterations = 0
    while (hi - lo) > tol:
        mid = (lo + hi) / 2
        cls_mid = _classify_decided(mid, params, threshold, n_max, "midpoint")
        if cls_mid.verdict is cls_lo.verdict:
            lo = mid
        else:
            hi = mid
        verdict_record.append(cls_mid.verdict.value[0])
        iterations += 1
        if iterations > 20_000:
            raise RuntimeError("bisection failed to narrow the bracket (tol too small?)")
    return AlphaResult(
        alpha0=float((lo + hi) / 2) if not isinstance(lo, mpmath.mpf) else (lo + hi) / 2,
        method="bisect",
        bracket=(float(lo), float(hi)),
        iterations=iterations,
        verdicts="".join(verdict_record),
    )


def find_bracket(
    params: ModelParams,
    lo: float = 0.1,
    hi: float = 1.0,
    threshold: float = 1.0,
    n_max: int = 200,
    max_expansions: int = 60,
) -> tuple[float, float]:
    """Expand [lo, hi] geometrically until the endpoint verdicts differ."""
    for _ in range(max_expansions + 1):
        cls_lo = _classify_decided(lo, params, threshold, n_max, "lower endpoint")
        cls_hi = _classify_decided(hi, params, threshold, n_max, "upper endpoint")
        if cls_lo.verdict is not cls_hi.verdict:
            return (lo, hi)
        lo /= 2.0
        hi *= 2.0
    raise BracketError(f"no verdict change found in [{lo}, {hi}] after expansion")


def solve_alpha0(params: ModelParams, tol: float = 1e-12, threshold: float = 1.0, n_max: int = 200) -> AlphaResult:
    """Convenience: bracket search followed by bisection."""
    lo, hi = find_bracket(params, threshold=threshold, n_max=n_max)
    return bisect_alpha0(lo, hi, params, tol=tol, threshold=threshold, n_max=n_max)


def _entry_arrays(t, params: ModelParams):
    # ab coordinates of the recursion entry states (alpha0, alpha1) at
    # parameter t = ln(alpha0) + c0/3.  For beta = 0, alpha1 = 1 and this
    # is the line b = 2a - 2*c0/3; for beta > 0, alpha1 is the positive
    # root of the boundary quadratic, 2 / (1 + sqrt(1 + 4 beta/(lam a0))).
    cc = chart_constants(params.lam)
    t = np.asarray(t, dtype=float)
    if params.beta == 0.0:
        log_a1 = np.zeros_like(t)
    else:
        alpha0 = np.exp(t - cc.c0 / 3.0)
        alpha1 = 2.0 / (1.0 + np.sqrt(1.0 + 4.0 * params.beta / (params.lam * alpha0)))
        log_a1 = np.log(alpha1)
    return (t - log_a1, 2.0 * t - 2.0 * cc.c0 / 3.0 + log_a1)


def _iterated_entry(t, n_iter: int, params: ModelParams, affine_only: bool):
    a, b = _entry_arrays(t, params)
    c0 = chart_constants(params.lam).c0
    for _ in range(n_iter):
        if affine_only:
            a, b = -2.0 * a, b + c0
        else:
            a, b = map_ab(a, b, params)
    return a, b


@dataclass(frozen=True)
class IntersectionResult:
    t_star: float
    alpha0: float
    transversality_margin: float
    n_iter: int
    b_at_crossing: float


def intersect_with_curve(
    curve: "CurveGrid",
    params: ModelParams,
    n_iter: int = 2,
    t_range: tuple[float, float] = (-0.4, 0.0),
    scan: int = 512,
    tol_t: float = 1e-12,
    affine_only: bool = False,
) -> IntersectionResult:
    """Locate where an iterated entry segment crosses the invariant curve.

    n_iter counts applications of the map to the entry segment's first
    image, so the total number of applications to the entry segment is
    n_iter + 1.  The crossing gap g(t) = a(t) - gamma(b(t)) is scanned on
    a parameter grid (points whose b lies left of the curve's domain are
    skipped), the first sign change is bisected to tol_t, and alpha0 is
    recovered as exp(t* - c0/3).  The transversality margin is the
    secant slope of g at the crossing; a vanishing margin is reported as
    no intersection.
    """
    if n_iter < 0:
        raise ValueError("n_iter must be nonnegative")
    cc = chart_constants(params.lam)
    total = n_iter + 1

    def gap(tv):
        a, b = _iterated_entry(tv, total, params, affine_only)
        return a - curve(b), b

    t = np.linspace(t_range[0], t_range[1], scan)
    g, b = gap(t)
    valid = b >= curve.b[0]
    idx = None
    for i in range(len(t) - 1):
        if valid[i] and valid[i + 1] and g[i] == 0.0:
            idx = (i, i)
            break
        if valid[i] and valid[i + 1] and g[i] * g[i + 1] < 0.0:
            idx = (i, i + 1)
            break
    if idx is None:
        raise NoIntersectionError(
            f"no sign change of the crossing gap for n_iter = {n_iter} over t in {t_range}; "
            "try a larger n_iter"
        )
    lo, hi = float(t[idx[0]]), float(t[idx[1]])
    g_lo = float(g[idx[0]])
    while hi - lo > tol_t:
        mid = 0.5 * (lo + hi)
        g_mid = float(gap(mid)[0])
        if g_mid == 0.0:
            lo = hi = mid
            break
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    h = 1e-6
    margin = abs(float(gap(t_star + h)[0]) - float(gap(t_star - h)[0])) / (2.0 * h)
    if not margin > 0.0:
        raise NoIntersectionError(f"crossing at t = {t_star} is not transversal")
    b_cross = float(gap(t_star)[1])
    return IntersectionResult(
        t_star=t_star,
        alpha0=math.exp(t_star - cc.c0 / 3.0),
        transversality_margin=margin,
        n_iter=n_iter,
        b_at_crossing=b_cross,
    )


def solve_alpha0_by_intersection(
    curve: "CurveGrid",
    params: ModelParams,
    start_n_iter: int = 2,
    max_n_iter: int = 8,
    **kwargs,
) -> IntersectionResult:
    """Try increasing iterate counts until a crossing is found."""
    last: NoIntersectionError | None = None
    for n in range(start_n_iter, max_n_iter + 1):
        try:
            return intersect_with_curve(curve, params, n_iter=n, **kwargs)
        except NoIntersectionError as err:
            last = err
    raise NoIntersectionError(
        f"no crossing found for n_iter up to {max_n_iter}: {last}"
    )


def alpha_result_json_dict(result: AlphaResult, params: ModelParams) -> dict:
    return {
        "lambda": params.lam,
        "beta": params.beta,
        "alpha0": float(result.alpha0),
        "method": result.method,
        "bracket": list(result.bracket) if result.bracket else None,
        "iterations": result.iterations,
        "transversality_margin": result.transversality_margin,
    }
