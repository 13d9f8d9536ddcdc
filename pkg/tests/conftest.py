"""Shared fixtures: model parameters, solved curves, and a kernel warm-up."""

import numpy as np
import pytest

from dyadlab.invariant_curve import solve_invariant
from dyadlab.params import ModelParams
from dyadlab.plane_dynamics import Rectangle
from dyadlab.shell_ode import ShellState, integrate

# Reference zero of the escape-side classifier at lam=2, beta=0: the
# nearest double to 0.4587881493788660958330881804569..., frozen from a
# 60-digit bisection (tolerance 1e-30) against this code base.  Float64
# bisection reproduces it to ~4e-13 and the curve-intersection route to
# ~8e-9.
ALPHA0_STAR = 0.45878814937886608


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # The first integrate() call triggers the JIT compile (disk cached);
    # paying it here keeps individual test timings honest.
    state = ShellState(np.array([1.0, 0.0, 0.0, 0.0]))
    integrate(state, ModelParams(), 0.1, tol=1e-8, t_eval=2)


@pytest.fixture(scope="session")
def p0():
    return ModelParams(lam=2.0, beta=0.0)


@pytest.fixture(scope="session")
def curve_small(p0):
    # Tight amplitude band: the fixed-point iteration clips at the band
    # edge near the domain floor.
    return solve_invariant(Rectangle(2.56, 0.03), p0, tol=1e-10)


@pytest.fixture(scope="session")
def curve_wide(p0):
    # Roomier rectangle on which the solve converges without clipping.
    return solve_invariant(Rectangle(3.0, 0.12), p0, tol=1e-10)
