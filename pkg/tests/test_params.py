"""Validation behavior of the shared parameter container."""

import dataclasses
import math

import pytest

from dyadlab.params import FitFailureError, ModelParams, UnsupportedConfigurationError


def test_defaults():
    p = ModelParams()
    assert p.lam == 2.0
    assert p.beta == 0.0
    assert p.forcing == 0.0
    assert p.shells is None


def test_log_lam():
    assert ModelParams(lam=2.0).log_lam == pytest.approx(math.log(2.0), abs=0.0)
    assert ModelParams(lam=3.5).log_lam == pytest.approx(math.log(3.5), abs=0.0)


@pytest.mark.parametrize("bad", [1.0, 0.5, 0.0, -2.0, math.inf, math.nan])
def test_lam_must_be_finite_and_exceed_one(bad):
    with pytest.raises(ValueError):
        ModelParams(lam=bad)


@pytest.mark.parametrize("bad", [-1e-12, -0.3, math.nan])
def test_beta_must_be_finite_and_nonnegative(bad):
    with pytest.raises(ValueError):
        ModelParams(beta=bad)


@pytest.mark.parametrize("bad", [-1.0, math.inf])
def test_forcing_must_be_finite_and_nonnegative(bad):
    with pytest.raises(ValueError):
        ModelParams(forcing=bad)


@pytest.mark.parametrize("bad", [0, 1, -3, 2.0, True])
def test_shells_must_be_int_at_least_two_or_none(bad):
    with pytest.raises(ValueError):
        ModelParams(shells=bad)


def test_shells_accepts_small_truncations():
    assert ModelParams(shells=2).shells == 2
    assert ModelParams(shells=64).shells == 64


def test_params_are_immutable():
    p = ModelParams()
    with pytest.raises(dataclasses.FrozenInstanceError):
        p.lam = 3.0


def test_exception_hierarchy():
    # Callers catch configuration problems as ValueError and numerical
    # breakdowns as RuntimeError; keep the split stable.
    assert issubclass(UnsupportedConfigurationError, ValueError)
    assert issubclass(FitFailureError, RuntimeError)
