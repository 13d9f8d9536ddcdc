"""Invariant curve of the ab-chart map via the graph transform.

A candidate curve is a Lipschitz graph a = gamma(b) over [R0, b_max].
The graph transform T sends gamma to the curve whose point over b solves

    a = -(e(a, b) + gamma(b + c0 + e(a, b))) / 2,

i.e. the preimage of the graph under one application of the map.  T is a
contraction on the class of 1-Lipschitz curves into [-R1, R1] whenever
the rectangle certificate admits (R0, R1); its fixed point is the
invariant curve.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .params import FitFailureError, ModelParams
from .plane_dynamics import BoundCertificate, Rectangle, certify_rectangle, chart_constants, error_term


class ContractionViolationError(RuntimeError):
    """Inner fixed-point solve failed; rectangle or b_max is unsuitable."""


class InadmissibleRectangleError(ValueError):
    """Rectangle failed its bound certificate."""

    def __init__(self, certificate: BoundCertificate):
        super().__init__(
            f"rectangle ({certificate.rect.r0}, {certificate.rect.r1}) failed checks: "
            f"{', '.join(certificate.failed)}"
        )
        self.certificate = certificate


@dataclass(frozen=True)
class CurveGrid:
    """A discretized curve b -> a over [R0, b_max].

    Evaluation interpolates linearly and extends by the boundary values
    outside the grid (only the right extension is ever exercised: the
    map moves b forward by at least c0).  clipped records whether the
    producing transform had to cut values back into [-R1, R1].
    """

    rect: Rectangle
    b: np.ndarray
    a: np.ndarray
    clipped: bool = False

    def __post_init__(self) -> None:
        if self.b.ndim != 1 or self.b.shape != self.a.shape:
            raise ValueError("b and a must be 1-d arrays of equal length")
        if len(self.b) < 2:
            raise ValueError("need at least two grid points")
        if float(np.max(np.abs(self.a))) > self.rect.r1 * (1.0 + 1e-12) + 1e-300:
            raise ValueError("ordinates exceed the strip half-width R1")

    @property
    def b_max(self) -> float:
        return float(self.b[-1])

    @property
    def spacing(self) -> float:
        return float(self.b[1] - self.b[0])

    @property
    def lipschitz_bound(self) -> float:
        return float(np.max(np.abs(np.diff(self.a))) / self.spacing)

    def __call__(self, bq):
        return np.interp(bq, self.b, self.a)

    @property
    def sup_abs(self) -> float:
        return float(np.max(np.abs(self.a)))


def zero_curve(rect: Rectangle, b_max: float | None = None, spacing: float = 0.01) -> CurveGrid:
    """The zero curve (invariant line of the affine part) on a fresh grid."""
    if b_max is None:
        b_max = rect.r0 + 60.0
    n = int(round((b_max - rect.r0) / spacing)) + 1
    if n < 2:
        raise ValueError("b_max too close to r0 for the requested spacing")
    b = rect.r0 + spacing * np.arange(n)
    return CurveGrid(rect=rect, b=b, a=np.zeros(n))


def graph_transform(
    curve: CurveGrid,
    params: ModelParams,
    inner_tol: float = 1e-14,
    max_inner: int = 100,
    affine_only: bool = False,
) -> CurveGrid:
    """One application of the graph transform.

    Solves the scalar fixed-point equation at every abscissa at once;
    the inner iteration contracts with rate about |de/da|/2 on
    admissible rectangles.  Output ordinates are clipped back into
    [-R1, R1]; the returned grid's clipped flag records whether that
    cut was active anywhere.  Admissibility of curve.rect is the
    caller's responsibility (solve_invariant enforces it).
    """
    b = curve.b
    r1 = curve.rect.r1
    c0 = chart_constants(params.lam).c0
    a = curve.a.copy()
    for _ in range(max_inner):
        e = np.zeros_like(a) if affine_only else error_term(a, b, params)
        target = -(e + curve(b + c0 + e)) / 2.0
        delta = float(np.max(np.abs(target - a)))
        a = target
        if delta < inner_tol:
            break
    else:
        raise ContractionViolationError(
            f"inner solve did not reach {inner_tol} in {max_inner} iterations"
        )
    clipped = bool(np.any(np.abs(a) > r1))
    if clipped:
        a = np.clip(a, -r1, r1)
    return CurveGrid(rect=curve.rect, b=b, a=a, clipped=clipped)


@dataclass(frozen=True)
class CurveDiagnostics:
    iterations: int
    residual: float
    contraction_ratio: float
    clipped: bool
    certificate: BoundCertificate


def solve_invariant(
    rect: Rectangle,
    params: ModelParams,
    tol: float = 1e-10,
    b_max: float | None = None,
    spacing: float = 0.01,
    max_iterations: int = 500,
    affine_only: bool = False,
) -> tuple[CurveGrid, CurveDiagnostics]:
    """Iterate the graph transform from the zero curve to its fixed point.

    Stops when the sup-norm change falls below tol.  The reported
    residual is sup |T(gamma) - gamma| for one extra application; the
    contraction ratio is the largest successive-change ratio observed
    while changes were still well above tol (ratios in the noise floor
    are excluded).  Raises InadmissibleRectangleError when the bound
    certificate rejects the rectangle.
    """
    cert = certify_rectangle(rect, params)
    if not cert.admissible:
        raise InadmissibleRectangleError(cert)
    if tol <= 0:
        raise ValueError("tol must be positive")
    curve = zero_curve(rect, b_max=b_max, spacing=spacing)
    inner_tol = min(1e-14, tol / 10.0)
    changes: list[float] = []
    clipped = False
    for iteration in range(1, max_iterations + 1):
        new = graph_transform(curve, params, inner_tol=inner_tol, affine_only=affine_only)
        change = float(np.max(np.abs(new.a - curve.a)))
        changes.append(change)
        clipped = clipped or new.clipped
        curve = new
        if change < tol:
            break
    else:
        raise ContractionViolationError(
            f"graph transform did not converge to {tol} in {max_iterations} iterations"
        )
    check = graph_transform(curve, params, inner_tol=inner_tol, affine_only=affine_only)
    residual = float(np.max(np.abs(check.a - curve.a)))
    floor = max(10.0 * tol, 1e-13)
    ratios = [
        changes[k] / changes[k - 1]
        for k in range(1, len(changes))
        if changes[k - 1] >= floor
    ]
    contraction_ratio = max(ratios) if ratios else math.nan
    diag = CurveDiagnostics(
        iterations=iteration,
        residual=residual,
        contraction_ratio=contraction_ratio,
        clipped=clipped,
        certificate=cert,
    )
    return curve, diag


@dataclass(frozen=True)
class DecayFit:
    c_prime: float
    fit_residual: float
    window: tuple[float, float]


def decay_rate(curve: CurveGrid, window: tuple[float, float] | None = None) -> DecayFit:
    """Least-squares exponential decay rate of |gamma| in b.

    Fits ln |gamma(b)| over the middle half of the grid by default,
    which avoids both the left transient (clipping or boundary effects)
    and the flat right extension.  Ordinates below 1e-15 are dropped;
    an empty window raises FitFailureError.
    """
    if window is None:
        span = curve.b_max - float(curve.b[0])
        window = (float(curve.b[0]) + span / 4.0, float(curve.b[0]) + 3.0 * span / 4.0)
    lo, hi = window
    mask = (curve.b >= lo) & (curve.b <= hi) & (np.abs(curve.a) > 1e-15)
    if int(np.sum(mask)) < 2:
        raise FitFailureError(f"no usable ordinates in window {window}")
    x = curve.b[mask]
    y = np.log(np.abs(curve.a[mask]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DecayFit(
        c_prime=float(-slope),
        fit_residual=float(np.sqrt(np.mean(resid**2))),
        window=window,
    )


def write_curve_csv(curve: CurveGrid, path) -> None:
    """CSV export with header b,a (17 significant digits)."""
    with open(path, "w") as fh:
        fh.write("b,a\n")
        for b, a in zip(curve.b, curve.a):
            fh.write(f"{b:.17g},{a:.17g}\n")


def diagnostics_json_dict(diag: CurveDiagnostics, fit: DecayFit | None = None) -> dict:
    return {
        "iterations": diag.iterations,
        "residual": diag.residual,
        "contraction_ratio": diag.contraction_ratio,
        "c_prime": None if fit is None else fit.c_prime,
        "clipped": diag.clipped,
    }
