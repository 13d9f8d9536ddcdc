"""Self-similar profile recursions and Kolmogorov-scaling diagnostics.

The normalized profile {alpha_n} satisfies a three-term recursion whose
each step is the positive root of a quadratic.  For beta = 0 the root
degenerates to the rational map alpha_{n+1} = 1 + lam^2 alpha_{n-1}^2 /
alpha_n.  The denormalized profile entries are a_j* = lam^{-j} alpha_j.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .params import ModelParams

# Past this value the orbit is treated as escaped; generic alpha0 reach it
# after a few dozen steps, so it is a flag rather than an error.
OVERFLOW_LIMIT = 1e300


def _sqrt(x):
    # x ** 0.5 keeps mpmath inputs at working precision where math.sqrt
    # would silently round through float.
    return x**0.5


def next_alpha(alpha_prev, alpha_cur, params: ModelParams):
    """Advance the normalized profile recursion by one index.

    Evaluated in a cancellation-free form: the textbook root expression
    subtracts two O(1/beta) quantities and loses about half the mantissa
    for small beta, so A*(sqrt(1+Z) - 1) is rewritten as the equivalent
    A*Z/(1 + sqrt(1+Z)).  At beta = 0 the expression reduces exactly to
    1 + lam^2 * alpha_prev^2 / alpha_cur.

    Arguments may be floats or mpmath.mpf; the arithmetic is duck-typed.
    """
    x, y = alpha_prev, alpha_cur
    if not y > 0:
        raise ValueError(f"alpha_cur must be positive, got {alpha_cur!r}")
    if x < 0:
        raise ValueError(f"alpha_prev must be nonnegative, got {alpha_prev!r}")
    lam = params.lam
    beta = params.beta
    if beta == 0.0:
        # exact linear case; also avoids 0 * inf = nan when an escaping
        # orbit overflows x*x
        return lam * lam * x * x / y + 1.0
    s = lam * lam * x * x / y + beta * lam * x + 1.0
    z = (4.0 * beta / lam) * (lam * lam * x * x / (y * y) + beta * lam * x / y + 1.0 / y)
    return 2.0 * s / (1.0 + _sqrt(1.0 + z))


def next_alpha_naive(alpha_prev, alpha_cur, params: ModelParams):
    """Textbook evaluation -(lam/2beta)*y + (lam/2beta)*y*sqrt(1+Z).

    Kept only as a cancellation witness for tests; loses ~8 digits at
    beta = 1e-8.  Requires beta > 0.
    """
    if params.beta <= 0.0:
        raise ValueError("naive form divides by beta; needs beta > 0")
    x, y = alpha_prev, alpha_cur
    if not y > 0:
        raise ValueError(f"alpha_cur must be positive, got {alpha_cur!r}")
    lam = params.lam
    beta = params.beta
    z = (4.0 * beta / lam) * (lam * lam * x * x / (y * y) + beta * lam * x / y + 1.0 / y)
    half = lam / (2.0 * beta) * y
    return -half + half * _sqrt(1.0 + z)


def quadratic_oracle(alpha_prev, alpha_cur, params: ModelParams):
    """Positive root of the stationarity quadratic, derived independently.

    Substituting the self-similar ansatz a_j(t) = a_j*/(t - t0) into the
    shell system and normalizing by alpha_j = lam^j a_j* gives, for the
    unknown z = alpha_{n+1},

        beta*z^2 + lam*y*z - (lam^3*x^2 + beta*lam^2*x*y + lam*y) = 0

    with x = alpha_{n-1}, y = alpha_n.  The unique positive root is
    returned via the product form -2C / (B + sqrt(B^2 - 4AC)), which is
    exact for beta = 0 (linear case) and has no subtractive cancellation
    since B > 0 > C.
    """
    x, y = alpha_prev, alpha_cur
    if not y > 0:
        raise ValueError(f"alpha_cur must be positive, got {alpha_cur!r}")
    lam = params.lam
    beta = params.beta
    a_coef = beta
    b_coef = lam * y
    c_coef = -(lam**3 * x * x + beta * lam * lam * x * y + lam * y)
    disc = b_coef * b_coef - 4.0 * a_coef * c_coef
    return -2.0 * c_coef / (b_coef + _sqrt(disc))


@dataclass(frozen=True)
class Profile:
    """A normalized profile orbit {alpha_n} and its model parameters."""

    alpha0: float
    alphas: np.ndarray
    params: ModelParams
    overflowed: bool = False

    def __len__(self) -> int:
        return len(self.alphas)

    @property
    def a_star(self) -> np.ndarray:
        """Denormalized profile a_j* = lam^{-j} alpha_j."""
        n = np.arange(len(self.alphas), dtype=float)
        return self.alphas * np.exp(-n * math.log(self.params.lam))

    def compensated(self) -> np.ndarray:
        """alpha_n * lam^{-2n/3}; constant iff the profile is Kolmogorov."""
        n = np.arange(len(self.alphas), dtype=float)
        return self.alphas * np.exp(-2.0 * n / 3.0 * math.log(self.params.lam))


def generate_profile(alpha0, n_max: int, params: ModelParams) -> Profile:
    """Iterate the recursion from (alpha_{-1}, alpha_0) = (0, alpha0).

    Stops early with overflowed=True once an entry exceeds 1e300 (the
    generic outcome away from the distinguished alpha0).  alpha0 may be
    an mpmath.mpf; the recursion then runs at that precision while the
    stored entries are rounded to float.
    """
    if not alpha0 > 0:
        raise ValueError(f"alpha0 must be positive, got {alpha0!r}")
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    x = alpha0 * 0  # zero of the same arithmetic type as alpha0
    y = alpha0
    out = [float(alpha0)]
    overflowed = False
    for _ in range(n_max):
        x, y = y, next_alpha(x, y, params)
        # written so that nan (possible for beta > 0 once x*x overflows)
        # also stops the iteration
        if not y <= OVERFLOW_LIMIT:
            overflowed = True
            break
        out.append(float(y))
    return Profile(
        alpha0=float(alpha0),
        alphas=np.asarray(out),
        params=params,
        overflowed=overflowed,
    )


@dataclass(frozen=True)
class KolmogorovFit:
    """Mean of alpha_n lam^{-2n/3} over a window and the worst deviation."""

    const: float
    residual: float
    diverged: bool
    window: tuple[int, int] | None  # inclusive index range used for the fit


def fit_kolmogorov(profile: Profile, window: tuple[int, int] | None = None) -> KolmogorovFit:
    """Fit the Kolmogorov constant over a trailing window.

    Returns the mean of alpha_n * lam^{-2n/3} over the window (default:
    the trailing half of the sequence) and the maximum relative
    deviation from that mean.  An overflowed profile reports divergence
    instead of a fit.
    """
    if profile.overflowed:
        return KolmogorovFit(const=math.nan, residual=math.inf, diverged=True, window=None)
    n = len(profile.alphas)
    if n < 10:
        raise ValueError(f"need at least 10 profile entries, got {n}")
    if window is None:
        window = (n // 2, n - 1)
    n0, n1 = window
    if not (0 <= n0 < n1 <= n - 1):
        raise ValueError(f"window {window} out of range for profile of length {n}")
    scaled = profile.compensated()[n0 : n1 + 1]
    const = float(np.mean(scaled))
    residual = float(np.max(np.abs(scaled / const - 1.0)))
    return KolmogorovFit(const=const, residual=residual, diverged=False, window=(n0, n1))


@dataclass(frozen=True)
class EnergySum:
    """Partial sum of (lam^{-n} alpha_n)^2 with a numerical ratio test."""

    value: float
    diverged: bool
    tail_ratio: float


def profile_energy(profile: Profile) -> EnergySum:
    """Sum (lam^{-n} alpha_n)^2, flagging divergence via the ratio test.

    The tail ratio is the largest successive term ratio over the trailing
    quarter of the sequence; the sum is flagged divergent when the
    profile overflowed or that ratio reaches 1.
    """
    with np.errstate(over="ignore"):
        terms = profile.a_star**2
    n = len(terms)
    tail = max(3, n // 4)
    prev = terms[-tail - 1 : -1]
    cur = terms[-tail:]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratios = np.where(prev > 0, cur / prev, np.inf)
    tail_ratio = float(np.max(ratios)) if len(ratios) else math.inf
    diverged = profile.overflowed or not tail_ratio < 1.0
    value = math.inf if diverged else float(np.sum(terms))
    return EnergySum(value=value, diverged=diverged, tail_ratio=tail_ratio)


def profile_json_dict(profile: Profile, fit: KolmogorovFit | None = None) -> dict:
    """Assemble the export dictionary for a profile."""
    if fit is None and not profile.overflowed and len(profile.alphas) >= 10:
        fit = fit_kolmogorov(profile)
    return {
        "lambda": profile.params.lam,
        "beta": profile.params.beta,
        "alpha0": profile.alpha0,
        "alphas": [float(v) for v in profile.alphas],
        "a_star": [float(v) for v in profile.a_star],
        "const_fit": None if fit is None or fit.diverged else fit.const,
        "residual": None if fit is None or fit.diverged else fit.residual,
    }


def write_profile_json(profile: Profile, path, fit: KolmogorovFit | None = None, extra: dict | None = None) -> None:
    doc = profile_json_dict(profile, fit)
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
