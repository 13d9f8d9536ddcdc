"""Profile recursion: stable evaluation, orbit generation, fits, energy."""

import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from conftest import ALPHA0_STAR
from dyadlab.params import ModelParams
from dyadlab.profile_recursion import (
    EnergySum,
    KolmogorovFit,
    Profile,
    fit_kolmogorov,
    generate_profile,
    next_alpha,
    next_alpha_naive,
    profile_energy,
    profile_json_dict,
    quadratic_oracle,
    write_profile_json,
)

P0 = ModelParams(lam=2.0, beta=0.0)


# ---------------------------------------------------------------- next_alpha


def test_next_alpha_frozen_oracle_beta_positive():
    # Frozen from an independent 50-digit evaluation of the quadratic root.
    got = next_alpha(1.0, 1.0, ModelParams(lam=2.0, beta=0.1))
    assert got == pytest.approx(4.282856857085701, rel=1e-15)


def test_next_alpha_beta_zero_closed_form():
    p = ModelParams(lam=2.0, beta=0.0)
    assert next_alpha(1.0, 1.0, p) == 5.0
    assert next_alpha(3.0, 2.0, p) == 4.0 * 9.0 / 2.0 + 1.0
    for y in (0.3, 1.0, 7.0):
        # zero predecessor: the quadratic degenerates and the root is 1
        assert next_alpha(0.0, y, p) == 1.0


def test_next_alpha_matches_independent_quadratic_root():
    rng = np.random.default_rng(42)
    for _ in range(200):
        x, y = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=2))
        beta = rng.uniform(0.0, 0.5)
        p = ModelParams(lam=2.0, beta=beta)
        a = next_alpha(x, y, p)
        b = quadratic_oracle(x, y, p)
        assert a == pytest.approx(b, rel=1e-12)


def test_next_alpha_small_beta_joins_beta_zero_limit():
    # The root moves by O(beta * lam * x^2 / y^2); at beta = 1e-15 that
    # stays below 1e-10 relative over the whole test box.
    rng = np.random.default_rng(3)
    p_eps = ModelParams(lam=2.0, beta=1e-15)
    for _ in range(50):
        x, y = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=2))
        lim = next_alpha(x, y, P0)
        assert next_alpha(x, y, p_eps) == pytest.approx(lim, rel=1e-10)


def test_stable_form_beats_naive_form_at_tiny_beta():
    # At beta = 1e-8 the naive root expression subtracts two O(1e8)
    # quantities; the rewritten form does not.  Reference values come
    # from running the same expressions at 40-digit precision.
    p = ModelParams(lam=2.0, beta=1e-8)
    rng = np.random.default_rng(11)
    worst_stable = 0.0
    worst_naive = 0.0
    with mpmath.workdps(40):
        for _ in range(60):
            x, y = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=2))
            ref = next_alpha(mpmath.mpf(x), mpmath.mpf(y), p)
            rs = abs(next_alpha(x, y, p) - ref) / ref
            rn = abs(next_alpha_naive(x, y, p) - ref) / ref
            worst_stable = max(worst_stable, float(rs))
            worst_naive = max(worst_naive, float(rn))
    assert worst_stable < 1e-13
    assert worst_naive > 1e-10


def test_next_alpha_monotone_in_predecessor():
    xs = np.linspace(0.0, 5.0, 40)
    for beta in (0.0, 0.1):
        p = ModelParams(lam=2.0, beta=beta)
        vals = [next_alpha(x, 1.7, p) for x in xs]
        assert np.all(np.diff(vals) > 0)


def test_next_alpha_rejects_bad_inputs():
    with pytest.raises(ValueError):
        next_alpha(1.0, 0.0, P0)
    with pytest.raises(ValueError):
        next_alpha(1.0, -2.0, P0)
    with pytest.raises(ValueError):
        next_alpha(-1.0, 1.0, P0)
    with pytest.raises(ValueError):
        next_alpha(1.0, math.nan, P0)


def test_naive_form_requires_positive_beta():
    with pytest.raises(ValueError):
        next_alpha_naive(1.0, 1.0, P0)


def test_next_alpha_mpf_stays_high_precision():
    p = ModelParams(lam=2.0, beta=0.25)
    with mpmath.workdps(50):
        hi = next_alpha(mpmath.mpf(1), mpmath.mpf(1), p)
        assert isinstance(hi, mpmath.mpf)
        lo = next_alpha(1.0, 1.0, p)
        # float evaluation agrees to float accuracy but not beyond
        assert abs(lo - hi) < 1e-14 * hi


# ----------------------------------------------------------- generate_profile


def test_profile_starts_from_zero_predecessor():
    prof = generate_profile(0.7, 5, P0)
    assert prof.alpha0 == 0.7
    assert prof.alphas[0] == 0.7
    # alpha_1 = 1 exactly when beta = 0, independent of alpha0
    for a0 in (0.2, ALPHA0_STAR, 3.0):
        assert generate_profile(a0, 3, P0).alphas[1] == 1.0


def test_profile_first_entry_below_one_for_positive_beta():
    p = ModelParams(lam=2.0, beta=0.3)
    prof = generate_profile(1.0, 3, p)
    assert prof.alphas[1] < 1.0


def test_profile_matches_exact_rational_recursion():
    # At alpha0 = 1, beta = 0 the whole orbit is rational:
    # 1, 1, 5, 9/5, 509/9, ...  Track it with Fraction arithmetic.
    prof = generate_profile(1.0, 12, P0)
    x, y = Fraction(0), Fraction(1)
    exact = [Fraction(1)]
    for _ in range(len(prof.alphas) - 1):
        x, y = y, 4 * x * x / y + 1
        exact.append(y)
    assert exact[2] == Fraction(5)
    assert exact[3] == Fraction(9, 5)
    assert exact[4] == Fraction(509, 9)
    for got, want in zip(prof.alphas, exact):
        assert got == pytest.approx(float(want), rel=1e-13)


def test_profile_entries_at_least_one_when_beta_zero():
    for a0 in (0.3, 0.6, 1.5):
        prof = generate_profile(a0, 20, P0)
        assert np.all(prof.alphas[1:] >= 1.0)


def test_profile_overflow_stops_cleanly():
    # Generic alpha0: the orbit escapes super-exponentially.  The stored
    # prefix must stay finite and the flag must be set.
    prof = generate_profile(2.0, 200, P0)
    assert prof.overflowed
    assert len(prof.alphas) < 60
    assert np.all(np.isfinite(prof.alphas))


def test_profile_overflow_with_beta_positive_never_stores_nan():
    # Regression: for beta > 0 the discriminant evaluation can produce
    # 0 * inf = nan one step after an entry overflows; the generator must
    # treat that as overflow, not crash or store it.
    for a0 in (2.0, 7.46e166):
        prof = generate_profile(a0, 400, ModelParams(lam=2.0, beta=0.05))
        assert prof.overflowed
        assert np.all(np.isfinite(prof.alphas))


def test_profile_near_critical_alpha0_plateaus_when_compensated():
    # Raw entries grow like lam^{2n/3} even on the distinguished orbit;
    # what singles it out is the bounded compensated sequence.
    prof = generate_profile(ALPHA0_STAR, 30, P0)
    assert not prof.overflowed
    assert len(prof) == 31
    comp = prof.compensated()
    assert np.all(comp[10:] > 0.85)
    assert np.all(comp[10:] < 0.95)


def test_profile_mpf_orbit_rounds_entries_to_float():
    with mpmath.workdps(40):
        prof = generate_profile(mpmath.mpf("0.45878814937859713"), 25, P0)
    assert prof.alphas.dtype == np.float64
    assert not prof.overflowed


def test_profile_input_validation():
    with pytest.raises(ValueError):
        generate_profile(0.0, 10, P0)
    with pytest.raises(ValueError):
        generate_profile(-1.0, 10, P0)
    with pytest.raises(ValueError):
        generate_profile(1.0, 1, P0)


def test_a_star_and_compensated_scalings():
    prof = generate_profile(ALPHA0_STAR, 20, P0)
    n = np.arange(len(prof))
    assert prof.a_star == pytest.approx(prof.alphas * 2.0 ** (-n.astype(float)), rel=1e-13)
    comp = prof.compensated()
    assert comp == pytest.approx(prof.alphas * 2.0 ** (-2.0 * n / 3.0), rel=1e-13)


# ------------------------------------------------------------------- fitting


def _synthetic_profile(alphas, params=P0, overflowed=False):
    return Profile(alpha0=float(alphas[0]), alphas=np.asarray(alphas, dtype=float),
                   params=params, overflowed=overflowed)


def test_fit_recovers_exact_power_law():
    n = np.arange(40, dtype=float)
    prof = _synthetic_profile(7.0 * 2.0 ** (2.0 * n / 3.0))
    fit = fit_kolmogorov(prof)
    assert isinstance(fit, KolmogorovFit)
    assert fit.const == pytest.approx(7.0, rel=1e-14)
    assert fit.residual < 1e-14
    assert fit.window == (20, 39)
    assert not fit.diverged


def test_fit_near_critical_orbit_plateaus():
    prof = generate_profile(ALPHA0_STAR, 30, P0)
    fit = fit_kolmogorov(prof)
    # The compensated sequence levels off near 0.896; the double-precision
    # alpha0 is only good to ~2e-12, which the doubling deviation turns
    # into a few-1e-3 wobble by index 30.
    assert fit.const == pytest.approx(0.896, abs=0.02)
    assert fit.residual < 0.05


def test_fit_reports_divergence_for_overflowed_profile():
    prof = generate_profile(2.0, 200, P0)
    fit = fit_kolmogorov(prof)
    assert fit.diverged
    assert math.isnan(fit.const)
    assert fit.residual == math.inf
    assert fit.window is None


def test_fit_window_validation():
    prof = generate_profile(ALPHA0_STAR, 30, P0)
    with pytest.raises(ValueError):
        fit_kolmogorov(prof, window=(20, 20))
    with pytest.raises(ValueError):
        fit_kolmogorov(prof, window=(5, 99))
    short = _synthetic_profile(np.ones(5))
    with pytest.raises(ValueError):
        fit_kolmogorov(short)


# -------------------------------------------------------------------- energy


def test_energy_partial_sum_matches_geometric_series():
    # alpha_n = lam^{2n/3} gives a_star_n = lam^{-n/3}, so the energy is
    # the partial geometric sum of ratio lam^{-2/3}.
    m = 30
    n = np.arange(m, dtype=float)
    prof = _synthetic_profile(2.0 ** (2.0 * n / 3.0))
    es = profile_energy(prof)
    q = 2.0 ** (-2.0 / 3.0)
    assert isinstance(es, EnergySum)
    assert not es.diverged
    assert es.value == pytest.approx((1.0 - q**m) / (1.0 - q), rel=1e-12)
    assert es.tail_ratio == pytest.approx(q, rel=1e-12)


def test_energy_flags_divergence():
    n = np.arange(30, dtype=float)
    prof = _synthetic_profile(4.0**n)  # a_star = 2^n grows
    es = profile_energy(prof)
    assert es.diverged


def test_energy_of_escaping_profile_does_not_warn():
    # Huge stored entries square to inf; that must be handled quietly.
    prof = generate_profile(2.0, 200, P0)
    with np.errstate(over="raise"):
        es = profile_energy(prof)
    assert es.diverged


# ------------------------------------------------------------- serialization


def test_json_dict_schema(tmp_path):
    prof = generate_profile(ALPHA0_STAR, 20, P0)
    fit = fit_kolmogorov(prof)
    d = profile_json_dict(prof, fit)
    assert set(d) == {"lambda", "beta", "alpha0", "alphas", "a_star", "const_fit", "residual"}
    assert d["lambda"] == 2.0
    assert d["beta"] == 0.0
    assert d["alpha0"] == ALPHA0_STAR
    assert len(d["alphas"]) == len(prof)
    assert d["const_fit"] == fit.const

    # with no fit supplied, a default one is computed when there is
    # enough data, and omitted otherwise
    bare = profile_json_dict(prof)
    assert bare["const_fit"] == pytest.approx(fit_kolmogorov(prof).const)
    short = profile_json_dict(generate_profile(ALPHA0_STAR, 5, P0))
    assert short["const_fit"] is None and short["residual"] is None

    out = tmp_path / "p.json"
    write_profile_json(prof, out, fit, extra={"energy": 1.23})
    back = json.loads(out.read_text())
    assert back["energy"] == 1.23
    assert back["alphas"] == list(prof.alphas)
