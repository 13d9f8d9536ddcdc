"""Planar-map dynamics in three coordinate charts, with bound certificates.

One recursion step (alpha_prev, alpha_cur) -> (alpha_cur, alpha_next) is a
planar map F on the positive quadrant.  Two changes of variables simplify
it: logs (u, v) = (ln x, ln y), then the diagonalizing combination

    a = u - v + c0/3,    b = 2u + v,        c0 = ln(lam^2),

in which F becomes the affine map (a, b) -> (-2a, b + c0) plus an error
term e(a, b) that decays exponentially in b.  All dynamical routines here
(map evaluation, error term, Jacobians) use the exact conjugated error
coefficient; the closed-form rectangle certificates and the crossing
estimates evaluate a fixed set of printed expressions with their own
coefficient convention.  See README ("Two error-coefficient conventions")
for why both are kept and which routines use which.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .params import ModelParams, UnsupportedConfigurationError
from .profile_recursion import next_alpha


class Chart(str, Enum):
    XY = "xy"
    UV = "uv"
    AB = "ab"


@dataclass(frozen=True)
class PlanePoint:
    c1: float
    c2: float
    chart: Chart

    def __post_init__(self) -> None:
        if self.chart == Chart.XY and not (self.c1 > 0 and self.c2 > 0):
            raise ValueError(f"xy chart requires positive coordinates, got ({self.c1}, {self.c2})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.c1, self.c2)


@dataclass(frozen=True)
class ChartConstants:
    """Constants derived from lam.

    c2_exact = c1 * exp(4*c0/9) = lam^(-10/9) is the error coefficient
    obtained by pushing the (u,v)-chart error ln(1 + c1*e^{v-2u}) through
    the (a,b) chart, where v - 2u = 4*c0/9 - (4a+b)/3.  The dynamics use
    it.  c2 = lam^(-26/9) is the coefficient the closed-form certificate
    expressions are stated with; certify_rectangle, min_r0 and
    verify_crossing_estimates use that convention so the certificate
    arithmetic stays self-consistent.
    """

    lam: float
    c0: float
    c1: float
    c2: float
    c2_exact: float


def chart_constants(lam_or_params) -> ChartConstants:
    lam = getattr(lam_or_params, "lam", lam_or_params)
    if not lam > 1:
        raise ValueError(f"lam must exceed 1, got {lam}")
    return ChartConstants(
        lam=lam,
        c0=2.0 * math.log(lam),
        c1=lam**-2.0,
        c2=lam ** (-26.0 / 9.0),
        c2_exact=lam ** (-10.0 / 9.0),
    )


def to_chart(p: PlanePoint, target: Chart | str, lam_or_params) -> PlanePoint:
    """Convert a point between the xy, uv and ab charts.

    Conversions route through (u, v); round trips are identity to about
    1e-14.  Nonpositive xy input is rejected by PlanePoint itself.
    """
    target = Chart(target)
    cc = chart_constants(lam_or_params)
    if p.chart == target:
        return p
    if p.chart == Chart.XY:
        u, v = math.log(p.c1), math.log(p.c2)
    elif p.chart == Chart.UV:
        u, v = p.c1, p.c2
    else:
        u = (p.c1 + p.c2 - cc.c0 / 3.0) / 3.0
        v = (p.c2 - 2.0 * p.c1 + 2.0 * cc.c0 / 3.0) / 3.0
    if target == Chart.UV:
        return PlanePoint(u, v, Chart.UV)
    if target == Chart.XY:
        return PlanePoint(math.exp(u), math.exp(v), Chart.XY)
    return PlanePoint(u - v + cc.c0 / 3.0, 2.0 * u + v, Chart.AB)


def error_term(a, b, params: ModelParams):
    """Deviation e(a, b) of the ab-chart map from its affine part.

    beta = 0: e = log1p(c2_exact * exp(-(4a+b)/3)).  beta > 0: the same
    quantity for the backscatter map, evaluated in a closed form with no
    large-term cancellation, so it is accurate for all b (naively, e is
    a difference of two logs that both grow linearly in b).  Accepts
    scalars or numpy arrays.
    """
    lam = params.lam
    beta = params.beta
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cc = chart_constants(lam)
    if beta == 0.0:
        return np.log1p(cc.c2_exact * np.exp(-(4.0 * a + b) / 3.0))
    m = beta * lam ** (-1.0 / 3.0) * np.exp(-a) + cc.c2_exact * np.exp(-(4.0 * a + b) / 3.0)
    z = expansion_z(a, b, params)
    s = np.sqrt(1.0 + z)
    # ln(2(1+m)/(1+S)) with 1 - S rewritten as -Z/(1+S).
    return np.log1p((2.0 * m - z / (1.0 + s)) / (1.0 + s))


def expansion_z(a, b, params: ModelParams):
    """The quantity Z under the square root of the beta > 0 map.

    Series-based statements about the beta map are valid where Z <= 1/2;
    iterate_segment truncates polylines outside this region.
    """
    lam = params.lam
    beta = params.beta
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (4.0 * beta / lam) * (
        lam ** (2.0 / 3.0) * np.exp(2.0 * a)
        + beta * lam ** (1.0 / 3.0) * np.exp(a)
        + lam ** (-4.0 / 9.0) * np.exp((2.0 * a - b) / 3.0)
    )


def error_gradient(a, b, params: ModelParams):
    """(de/da, de/db); analytic for beta = 0, central differences otherwise."""
    if params.beta == 0.0:
        cc = chart_constants(params.lam)
        q = cc.c2_exact * np.exp(-(4.0 * np.asarray(a, dtype=float) + np.asarray(b, dtype=float)) / 3.0)
        w = q / (1.0 + q)
        return (-4.0 / 3.0 * w, -1.0 / 3.0 * w)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ha = 1e-6 * np.maximum(1.0, np.abs(a))
    hb = 1e-6 * np.maximum(1.0, np.abs(b))
    de_da = (error_term(a + ha, b, params) - error_term(a - ha, b, params)) / (2.0 * ha)
    de_db = (error_term(a, b + hb, params) - error_term(a, b - hb, params)) / (2.0 * hb)
    return (de_da, de_db)


def map_ab(a, b, params: ModelParams):
    """One application of the map in the ab chart (vectorized)."""
    e = error_term(a, b, params)
    cc = chart_constants(params.lam)
    return (-2.0 * np.asarray(a, dtype=float) - e, np.asarray(b, dtype=float) + cc.c0 + e)


def map_F(p: PlanePoint, params: ModelParams) -> PlanePoint:
    """Apply the planar map in the chart of the given point.

    xy: (x, y) -> (y, m(x, y)) with m shared with the profile recursion.
    ab: affine part plus error term, computed directly (not by chart
    conjugation; agreement with the conjugated xy map is a test).
    uv: conjugated through xy.
    """
    if p.chart == Chart.AB:
        a2, b2 = map_ab(p.c1, p.c2, params)
        return PlanePoint(float(a2), float(b2), Chart.AB)
    if p.chart == Chart.XY:
        return PlanePoint(p.c2, float(next_alpha(p.c1, p.c2, params)), Chart.XY)
    q = to_chart(p, Chart.XY, params.lam)
    return to_chart(map_F(q, params), Chart.UV, params.lam)


def jacobian_F_ab(a: float, b: float, params: ModelParams) -> np.ndarray:
    """Jacobian of the ab-chart map, rows = output components."""
    de_da, de_db = error_gradient(a, b, params)
    de_da = float(de_da)
    de_db = float(de_db)
    return np.array([[-2.0 - de_da, -de_db], [de_da, 1.0 + de_db]])


# --- entry segment ---------------------------------------------------------
#
# The recursion orbit of alpha0 enters the plane at (x, y) = (alpha0,
# alpha1), alpha1 = next_alpha(0, alpha0).  For beta = 0 alpha1 = 1, so the
# entry set is the line {y = 1}, whose ab image is {b = 2a - 2*c0/3}
# parametrized by t = ln(alpha0) + c0/3.

def alpha0_of_parameter(t: float, lam_or_params) -> float:
    cc = chart_constants(lam_or_params)
    return math.exp(t - cc.c0 / 3.0)


def parameter_of_alpha0(alpha0: float, lam_or_params) -> float:
    cc = chart_constants(lam_or_params)
    return math.log(alpha0) + cc.c0 / 3.0


def entry_point(t: float, params: ModelParams) -> PlanePoint:
    """ab coordinates of the recursion's entry state at parameter t."""
    cc = chart_constants(params.lam)
    alpha0 = alpha0_of_parameter(t, params.lam)
    alpha1 = next_alpha(0.0, alpha0, params)
    log_a1 = math.log(alpha1)
    return PlanePoint(t - log_a1, 2.0 * t - 2.0 * cc.c0 / 3.0 + log_a1, Chart.AB)


# --- rectangle certificates ------------------------------------------------

@dataclass(frozen=True)
class Rectangle:
    """The strip [-R1, R1] x [R0, inf) and its widened companion.

    The widened domain extends the abscissa range down to R0 - R1 - c0,
    which is where one inverse application of the affine part can land.
    """

    r0: float
    r1: float

    def __post_init__(self) -> None:
        if not (self.r0 > 0 and self.r1 > 0):
            raise ValueError(f"rectangle sides must be positive, got ({self.r0}, {self.r1})")

    def widened_floor(self, c0: float) -> float:
        return self.r0 - self.r1 - c0


@dataclass(frozen=True)
class BoundCertificate:
    """Closed-form sup bounds over the widened domain and the verdict.

    norm_E bounds the error sup via the corner evaluation
    c2 * exp(-(4*(R0-R1-c0) - R1)/3) = lam^(-2/9) * exp(-(4*R0-5*R1)/3);
    norm_gradE = (4/3)*norm_E; norm_H_bound = norm_E (componentwise the
    pulled-back correction is at most (norm_E/2, norm_E)); and
    norm_gradH_bound = 2*norm_gradE/(1 - norm_gradE) by a Neumann-series
    bound.  failed lists the names of the checks that did not hold.
    """

    rect: Rectangle
    norm_E: float
    norm_gradE: float
    norm_H_bound: float
    norm_gradH_bound: float
    admissible: bool
    failed: tuple[str, ...]


def certify_rectangle(rect: Rectangle, params: ModelParams) -> BoundCertificate:
    """Evaluate the closed-form admissibility certificate for a rectangle.

    Checks, in order: the widened domain is nonempty (R0 - R1 - c0 > 0);
    the error sup fits the strip and the translation slack
    (norm_E <= min(R1, c0)); the gradient sup is small (norm_gradE <=
    1/25); the pulled-back correction fits (norm_E/2 <= R1/2 and
    norm_E <= c0); and its gradient bound clears 1/10.
    """
    cc = chart_constants(params.lam)
    corner = 4.0 * rect.widened_floor(cc.c0) - rect.r1
    norm_e = cc.c2 * math.exp(-corner / 3.0)
    norm_grad_e = 4.0 / 3.0 * norm_e
    norm_grad_h = 2.0 * norm_grad_e / (1.0 - norm_grad_e) if norm_grad_e < 1.0 else math.inf
    failed = []
    if not rect.widened_floor(cc.c0) > 0.0:
        failed.append("domain")
    if not norm_e <= min(rect.r1, cc.c0):
        failed.append("error_sup")
    if not norm_grad_e <= 1.0 / 25.0:
        failed.append("grad_sup")
    if not (norm_e / 2.0 <= rect.r1 / 2.0 and norm_e <= cc.c0):
        failed.append("h_range")
    if not norm_grad_h <= 1.0 / 10.0:
        failed.append("grad_h")
    return BoundCertificate(
        rect=rect,
        norm_E=norm_e,
        norm_gradE=norm_grad_e,
        norm_H_bound=norm_e,
        norm_gradH_bound=norm_grad_h,
        admissible=not failed,
        failed=tuple(failed),
    )


def min_r0(r1: float, params: ModelParams) -> float:
    """Smallest R0 making (R0, r1) admissible.

    Solves the binding inequality norm_E <= r1 in closed form,
    R0 = (3/4)(ln(1/r1) - (2/9) ln lam) + (5/4) r1, then verifies with
    certify_rectangle (nudging by ulps if rounding lands on the wrong
    side of the equality case).  Requires 0 < r1 <= min(3/100, c0) so
    that this inequality is the binding one.
    """
    cc = chart_constants(params.lam)
    if not 0.0 < r1 <= min(3.0 / 100.0, cc.c0):
        raise ValueError(f"r1 must lie in (0, min(3/100, c0)], got {r1}")
    r0 = 0.75 * (math.log(1.0 / r1) - 2.0 / 9.0 * math.log(params.lam)) + 1.25 * r1
    for _ in range(8):
        if certify_rectangle(Rectangle(r0, r1), params).admissible:
            return r0
        r0 = math.nextafter(r0, math.inf)
    raise AssertionError("closed-form minimum failed to certify after nudging")


def certificate_json_dict(cert: BoundCertificate) -> dict:
    return {
        "r0": cert.rect.r0,
        "r1": cert.rect.r1,
        "norm_E": cert.norm_E,
        "norm_gradE": cert.norm_gradE,
        "norm_H_bound": cert.norm_H_bound,
        "norm_gradH_bound": cert.norm_gradH_bound,
        "admissible": cert.admissible,
        "failed": list(cert.failed),
    }


# --- g-term extraction for beta > 0 ----------------------------------------

class PlateauNotReachedError(RuntimeError):
    """The b-independent part of the error had not saturated at b_plateau."""


@dataclass(frozen=True)
class GRegion:
    """Grid on which the g terms are extracted: |a| <= a_max, b >= b_min."""

    a_max: float = 0.25
    b_min: float = 3.0
    b_span: float = 12.0
    n_a: int = 41
    n_b: int = 25
    b_plateau: float = 200.0


@dataclass(frozen=True)
class GBoundsReport:
    """Fitted constants for the structural error decomposition.

    The error term splits as exp(e) - 1 = g1(a) + g2(a, b) * exp(-(4a+b)/3)
    with g1 the large-b plateau.  c_g1 is the smallest C with
    |g1(a)| <= beta*C*|a| on the grid; c_g2 the smallest C with
    |g2 - limit| <= beta*C against the measured beta -> 0 limit
    lam^(-10/9); c_g2_printed is the same constant measured against the
    certificate-convention coefficient lam^(-26/9), reported for
    comparison (it does not stay bounded as beta -> 0).
    """

    beta: float
    c_g1: float | None
    c_g2: float | None
    c_g2_printed: float | None
    g1_at_zero: float
    g2_limit: float
    printed_const: float


def verify_g_bounds(params: ModelParams, region: GRegion | None = None, fit: bool = True) -> GBoundsReport:
    """Extract g1, g2 on a grid and fit the bound constants.

    g1(a) is read off at b = b_plateau where the b-dependent part is far
    below double precision; a plateau check compares against b_plateau/2
    and raises PlateauNotReachedError if they disagree.  g2 is normalized
    by the full corner exponential exp(-(4a+b)/3) so that its beta -> 0
    limit is the a-independent constant lam^(-10/9).
    """
    if params.beta < 0:
        raise ValueError("beta must be nonnegative")
    region = region or GRegion()
    cc = chart_constants(params.lam)
    a = np.linspace(-region.a_max, region.a_max, region.n_a)
    b = np.linspace(region.b_min, region.b_min + region.b_span, region.n_b)

    g1 = np.expm1(error_term(a, region.b_plateau, params))
    g1_check = np.expm1(error_term(a, region.b_plateau / 2.0, params))
    # absolute floor: where g1 vanishes (a = 0, or beta = 0 entirely) the
    # two evaluations still differ by the b-tail of the half-plateau,
    # about exp(-b_plateau/6)
    if np.any(np.abs(g1 - g1_check) > 1e-12 + 1e-10 * np.abs(g1)):
        raise PlateauNotReachedError(
            f"g1 changed between b = {region.b_plateau / 2} and b = {region.b_plateau}; raise b_plateau"
        )

    aa, bb = np.meshgrid(a, b, indexing="ij")
    g2 = (np.expm1(error_term(aa, bb, params)) - g1[:, None]) * np.exp((4.0 * aa + bb) / 3.0)
    g1_at_zero = float(np.abs(g1[np.argmin(np.abs(a))]))

    c_g1 = c_g2 = c_g2_printed = None
    if fit and params.beta > 0:
        mask = np.abs(a) > 1e-9
        c_g1 = float(np.max(np.abs(g1[mask]) / (params.beta * np.abs(a[mask]))))
        c_g2 = float(np.max(np.abs(g2 - cc.c2_exact)) / params.beta)
        c_g2_printed = float(np.max(np.abs(g2 - cc.c2)) / params.beta)
    return GBoundsReport(
        beta=params.beta,
        c_g1=c_g1,
        c_g2=c_g2,
        c_g2_printed=c_g2_printed,
        g1_at_zero=g1_at_zero,
        g2_limit=cc.c2_exact,
        printed_const=cc.c2,
    )


# --- crossing estimates (lam = 2, beta = 0) --------------------------------

@dataclass(frozen=True)
class CheckLine:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass(frozen=True)
class CrossingReport:
    """Result of verify_crossing_estimates.

    checks holds the gated inequalities (five sup bounds plus the two
    endpoint sign margins); diagnostics holds informational lines
    (monotonicity of the image arcs and whether the stated entry-segment
    parameter range actually covers the checked window).
    """

    checks: tuple[CheckLine, ...]
    diagnostics: tuple[CheckLine, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _a_after_one(t, cc: ChartConstants):
    # a-coordinate of the entry segment's image under one application,
    # with the exact conjugated coefficient: the entry segment satisfies
    # (4a+b)/3 = 2t - 2*c0/9, so the error along it is
    # log1p(lam^(-2/3) e^{-2t}).
    t = np.asarray(t, dtype=float)
    return -2.0 * t - np.log1p(cc.lam ** (-2.0 / 3.0) * np.exp(-2.0 * t))


def verify_crossing_estimates(params: ModelParams, n_grid: int = 10_000) -> CrossingReport:
    """Check the fixed numerical estimates behind the crossing argument.

    Specific to lam = 2, beta = 0 (the constants below are).  On a grid
    of s in [-0.1, -0.01], evaluates the printed per-application error
    bounds along the entry segment's first and second images,

        e1(s) = log1p(2^(-10/3) e^{-2s}),
        E2(s) = log1p(2^(-42/9) e^{6s + 2 e1(s)}),

    and checks |e1| < 1/8, |e1'| < 1/4, |E2| < 1/16, |E2'| < 3/8, that
    the second image stays above b = 3, and the endpoint sign margins
    of its a-coordinate 4s + 2 e1 - E2 (< -0.03 at s = -0.1, > +0.03 at
    s = -0.01).  Monotonicity of both image coordinates and coverage of
    the checked window by the stated entry-segment range are reported as
    diagnostics, not gates.
    """
    if params.lam != 2.0 or params.beta != 0.0:
        raise UnsupportedConfigurationError("crossing estimates are specific to lam = 2, beta = 0")
    cc = chart_constants(2.0)
    s = np.linspace(-0.1, -0.01, n_grid)

    q1 = 2.0 ** (-10.0 / 3.0) * np.exp(-2.0 * s)
    e1 = np.log1p(q1)
    e1p = -2.0 * q1 / (1.0 + q1)
    q2 = 2.0 ** (-42.0 / 9.0) * np.exp(6.0 * s + 2.0 * e1)
    E2 = np.log1p(q2)
    E2p = q2 * (6.0 + 2.0 * e1p) / (1.0 + q2)

    b_second = -s + cc.c0 / 3.0 + 2.0 * cc.c0 + e1 + E2
    a_second = 4.0 * s + 2.0 * e1 - E2

    checks = (
        CheckLine("sup_e1", float(np.max(np.abs(e1))) < 1 / 8, 1 / 8 - float(np.max(np.abs(e1)))),
        CheckLine("sup_e1_prime", float(np.max(np.abs(e1p))) < 1 / 4, 1 / 4 - float(np.max(np.abs(e1p)))),
        CheckLine("sup_E2", float(np.max(np.abs(E2))) < 1 / 16, 1 / 16 - float(np.max(np.abs(E2)))),
        CheckLine("sup_E2_prime", float(np.max(np.abs(E2p))) < 3 / 8, 3 / 8 - float(np.max(np.abs(E2p)))),
        CheckLine("b_above_3", float(np.min(b_second)) > 3.0, float(np.min(b_second)) - 3.0),
        CheckLine("endpoint_low", float(a_second[0]) < -0.03, -0.03 - float(a_second[0]),
                  f"a = {a_second[0]:.6f} at s = -0.1"),
        CheckLine("endpoint_high", float(a_second[-1]) > 0.03, float(a_second[-1]) - 0.03,
                  f"a = {a_second[-1]:.6f} at s = -0.01"),
    )

    mono_a = 4.0 + 2.0 * e1p - E2p
    mono_b = -1.0 + e1p + E2p
    cover_lo, cover_hi = _coverage_range(cc)
    stated = (-0.4, 0.0)
    covered = stated[0] <= cover_lo and cover_hi <= stated[1]
    diagnostics = (
        CheckLine("mono_a_second", float(np.min(mono_a)) > 0.0, float(np.min(mono_a))),
        CheckLine("mono_b_second", float(np.max(mono_b)) < 0.0, -float(np.max(mono_b))),
        CheckLine(
            "segment_coverage",
            covered,
            0.0,
            "checked window s in [-0.1, -0.01] needs entry parameters "
            f"t in [{cover_lo:.4f}, {cover_hi:.4f}]; the quoted segment range "
            f"{stated} reaches it only partially",
        ),
    )
    return CrossingReport(checks=checks, diagnostics=diagnostics)


def _coverage_range(cc: ChartConstants) -> tuple[float, float]:
    # Entry parameters whose one-application image has a-coordinate -0.1
    # and -0.01; _a_after_one is strictly decreasing, so bisect.
    def solve(target: float) -> float:
        lo, hi = -2.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if float(_a_after_one(mid, cc)) > target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    return (solve(-0.01), solve(-0.1))


# --- segment iteration (figure data) ----------------------------------------

@dataclass(frozen=True)
class SegmentIterates:
    """Sampled forward images of a parametrized segment in the ab chart.

    polylines[k] is the k-th image (k = 0 is the segment itself), an
    (m, 2) array of (a, b) rows; truncated[k] is True when beta > 0
    points left the series-validity region Z <= 1/2 and were dropped.
    t holds the parameter values of the surviving samples per polyline.
    """

    polylines: list[np.ndarray]
    truncated: list[bool]
    t: list[np.ndarray]


def iterate_segment(t0: float, t1: float, n_iter: int, params: ModelParams, samples: int = 400) -> SegmentIterates:
    """Sample the entry segment for t in [t0, t1] and its first n_iter images."""
    if n_iter < 0:
        raise ValueError("n_iter must be nonnegative")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    t = np.linspace(t0, t1, samples)
    pts = [entry_point(ti, params) for ti in t]
    a = np.array([p.c1 for p in pts])
    b = np.array([p.c2 for p in pts])
    polylines = [np.column_stack([a, b])]
    t_kept = [t]
    truncated = [False]
    for _ in range(n_iter):
        keep = np.ones(len(a), dtype=bool)
        if params.beta > 0:
            keep = expansion_z(a, b, params) <= 0.5
        was_truncated = bool(np.any(~keep))
        a, b = map_ab(a[keep], b[keep], params)
        t = t_kept[-1][keep]
        polylines.append(np.column_stack([a, b]))
        t_kept.append(t)
        truncated.append(was_truncated)
    return SegmentIterates(polylines=polylines, truncated=truncated, t=t_kept)


def write_iterates_csv(iterates: SegmentIterates, path) -> None:
    """CSV export with header iterate,s,a,b (17 significant digits)."""
    with open(path, "w") as fh:
        fh.write("iterate,s,a,b\n")
        for k, (poly, tk) in enumerate(zip(iterates.polylines, iterates.t)):
            for s, (a, b) in zip(tk, poly):
                fh.write(f"{k},{s:.17g},{a:.17g},{b:.17g}\n")


def crossing_report_json_dict(report: CrossingReport) -> dict:
    def lines(seq):
        return [
            {"name": c.name, "passed": c.passed, "margin": c.margin, "detail": c.detail}
            for c in seq
        ]

    return {"passed": report.passed, "checks": lines(report.checks), "diagnostics": lines(report.diagnostics)}
