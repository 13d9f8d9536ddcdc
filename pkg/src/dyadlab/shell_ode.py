"""Truncated shell system: vector field, adaptive integration, diagnostics.

The model couples amplitudes a_0..a_N on a geometric ladder of
frequencies lam^j.  Each shell exchanges with its nearest neighbours
only; the missing neighbours below shell 0 and above shell N are taken
to be zero, the single truncation convention used throughout.  With
that closure the quadratic terms telescope, so the unforced system
conserves the energy sum(a_j^2) exactly and any drift measures
integrator error alone.

Integration is an explicit embedded Runge-Kutta pair with PI step
control (see _rk).  The system is non-stiff away from blow-up; near
blow-up the step size underflows and integrate raises
IntegrationStalledError carrying the last reached time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _rk
from .params import FitFailureError, ModelParams, UnsupportedConfigurationError


class InvalidStateError(ValueError):
    """Shell state is malformed (wrong shape, non-finite entries, ...)."""


class IntegrationStalledError(RuntimeError):
    """Step size underflowed before reaching t_end.

    Attributes:
        t_reached: last time the integrator advanced to.
    """

    def __init__(self, t_reached: float, naccept: int, nreject: int):
        super().__init__(
            f"step size underflow at t={t_reached:.6g} "
            f"({naccept} accepted / {nreject} rejected steps)"
        )
        self.t_reached = float(t_reached)
        self.naccept = int(naccept)
        self.nreject = int(nreject)


@dataclass(frozen=True)
class ShellState:
    """Amplitudes a_0..a_N at a single time."""

    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise InvalidStateError(f"values must be a 1-d array of at least 2 shells, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InvalidStateError("non-finite shell amplitude")
        t = float(self.time)
        if not math.isfinite(t):
            raise InvalidStateError("non-finite time")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time", t)

    @property
    def shells(self) -> int:
        return int(self.values.size)


def _state_values(state) -> np.ndarray:
    if isinstance(state, ShellState):
        return state.values
    vals = np.asarray(state, dtype=float)
    if vals.ndim != 1 or vals.size < 2:
        raise InvalidStateError(f"expected a 1-d array of at least 2 shells, got shape {vals.shape}")
    if not np.all(np.isfinite(vals)):
        raise InvalidStateError("non-finite shell amplitude")
    return vals


def _check_shell_count(n: int, params: ModelParams) -> None:
    if params.shells is not None and params.shells != n:
        raise InvalidStateError(f"state has {n} shells but params.shells = {params.shells}")


def rhs(state, params: ModelParams) -> np.ndarray:
    """Time derivative of each shell.

    da_j/dt = lam^j a_{j-1}^2 - lam^{j+1} a_j a_{j+1}
              + beta (lam^j a_{j-1} a_j - lam^{j+1} a_{j+1}^2),
    with the forcing added to shell 0 and the out-of-range neighbours
    a_{-1}, a_{N+1} both zero.
    """
    y = _state_values(state)
    n = y.size
    _check_shell_count(n, params)
    lam = params.lam
    lj = lam ** np.arange(n, dtype=float)
    lj1 = lj * lam
    left = np.concatenate(([0.0], y[:-1]))
    right = np.concatenate((y[1:], [0.0]))
    out = lj * left * left - lj1 * y * right
    if params.beta != 0.0:
        out += params.beta * (lj * left * y - lj1 * right * right)
    out[0] += params.forcing
    return out


@dataclass
class Trajectory:
    """Sampled solution: times (m,) against amplitudes (m, shells)."""

    times: np.ndarray
    values: np.ndarray
    params: ModelParams
    naccept: int = 0
    nreject: int = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or self.values.ndim != 2 or self.values.shape[0] != self.times.size:
            raise ValueError(
                f"inconsistent shapes: times {self.times.shape}, values {self.values.shape}"
            )

    def __len__(self) -> int:
        return int(self.times.size)

    def __getitem__(self, i: int) -> ShellState:
        if not isinstance(i, (int, np.integer)):
            raise TypeError("trajectory indices must be integers")
        return ShellState(self.values[i], float(self.times[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def final(self) -> ShellState:
        return self[-1]

    def energy(self, delta: float = 0.0) -> np.ndarray:
        """Energy (or the weighted sum, delta > 0) at every sample time."""
        return energy(self.values, delta=delta, lam=self.params.lam)


def integrate(
    state,
    params: ModelParams,
    t_end: float,
    tol: float = 1e-10,
    t_eval=None,
    max_steps: int = 10_000_000,
) -> Trajectory:
    """Integrate the shell system from state.time to t_end.

    t_eval selects the output times: an integer n means n equally
    spaced samples from state.time to t_end inclusive (default 512),
    an array means those times verbatim (must be sorted and lie in
    [state.time, t_end]).  The sample at t_end, when requested, is the
    final accepted step endpoint rather than an interpolant.

    Raises IntegrationStalledError when the step size underflows (the
    blow-up regime) and RuntimeError when max_steps is exhausted.
    """
    if not isinstance(state, ShellState):
        state = ShellState(state)
    if not (isinstance(tol, (int, float)) and 0.0 < tol < 1.0):
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    t0 = state.time
    t_end = float(t_end)
    if not t_end > t0:
        raise ValueError(f"t_end ({t_end}) must exceed state.time ({t0})")
    n = state.shells
    _check_shell_count(n, params)

    if t_eval is None:
        t_eval = 512
    if isinstance(t_eval, (int, np.integer)) and not isinstance(t_eval, bool):
        if t_eval < 2:
            raise ValueError("t_eval count must be at least 2")
        times = np.linspace(t0, t_end, int(t_eval))
    else:
        times = np.ascontiguousarray(t_eval, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("t_eval must be a 1-d, non-empty array of times")
        if np.any(np.diff(times) < 0):
            raise ValueError("t_eval times must be non-decreasing")
        if times[0] < t0 or times[-1] > t_end:
            raise ValueError(f"t_eval times must lie within [{t0}, {t_end}]")

    lam_pows = params.lam ** np.arange(n + 1, dtype=float)
    status, t_reached, naccept, nreject, n_emitted, y_out, y_final = _rk.dp54(
        state.values.copy(),
        t0,
        t_end,
        float(tol),
        lam_pows,
        float(params.beta),
        float(params.forcing),
        times,
        int(max_steps),
    )
    if status == _rk.STATUS_STALLED:
        raise IntegrationStalledError(t_reached, naccept, nreject)
    if status == _rk.STATUS_STEP_BUDGET:
        raise RuntimeError(f"step budget {max_steps} exhausted at t={t_reached:.6g}")
    assert n_emitted == times.size
    if times[-1] == t_end:
        y_out[-1] = y_final

    if params.shells is None:
        params = ModelParams(lam=params.lam, beta=params.beta, forcing=params.forcing, shells=n)
    return Trajectory(times=times, values=y_out, params=params, naccept=naccept, nreject=nreject)


def energy(state, delta: float = 0.0, lam=None):
    """Sum of squared amplitudes, optionally frequency-weighted.

    delta=0 gives the plain energy sum(a_j^2).  delta>0 gives
    sum(lam^((2/3+delta) j) a_j^2), which stays bounded under shell
    refinement only for spectra decaying strictly faster than the
    self-similar rate; its growth is the standard truncation-
    contamination diagnostic.  lam (a number or ModelParams) is
    required in the weighted mode.

    Accepts a ShellState, a 1-d array (returns a float), or a 2-d
    array of stacked states (returns a per-row array).
    """
    if isinstance(state, ShellState):
        vals = state.values
    else:
        vals = np.asarray(state, dtype=float)
    if vals.ndim not in (1, 2):
        raise ValueError(f"expected a state or stack of states, got shape {vals.shape}")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        out = np.sum(vals * vals, axis=-1)
    else:
        if lam is None:
            raise ValueError("lam is required for the weighted energy (delta > 0)")
        lam = float(getattr(lam, "lam", lam))
        weights = lam ** ((2.0 / 3.0 + delta) * np.arange(vals.shape[-1], dtype=float))
        out = np.sum(weights * vals * vals, axis=-1)
    return float(out) if vals.ndim == 1 else out


def forced_fixed_point(params: ModelParams) -> np.ndarray:
    """Stationary amplitudes sqrt(f) * lam^(-(j+1)/3) of the forced system.

    The prefactor is pinned by the shell-0 balance lam*a0*a1 = f.  Only
    the beta=0 constant is available in closed form; a scaling-identical
    fixed point exists for beta>0 but its constant is out of scope here,
    so beta != 0 raises UnsupportedConfigurationError.
    """
    if params.beta != 0.0:
        raise UnsupportedConfigurationError("forced fixed point is only available for beta = 0")
    if not params.forcing > 0.0:
        raise ValueError("forcing must be positive")
    if params.shells is None:
        raise ValueError("params.shells must be set to size the fixed point")
    j = np.arange(params.shells, dtype=float)
    return math.sqrt(params.forcing) * params.lam ** (-(j + 1.0) / 3.0)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-time distance from the rescaled trajectory to a profile."""

    times: np.ndarray
    metric: np.ndarray
    t0: float
    decay_rate: float


def selfsim_convergence_metric(
    traj: Trajectory,
    profile,
    fit_fraction: float = 0.25,
    shells: int | None = None,
) -> ConvergenceReport:
    """How far a trajectory is from the self-similar form a_j* / (t - t0).

    The blow-up time t0 is not an input of the run, so it is estimated
    first: 1/a_j is affine in t along an exactly self-similar solution,
    and shell 0 is the largest and least truncation-affected, so t0
    comes from a least-squares line through 1/a_0(t) over the trailing
    fit_fraction of the output times.  The metric at each time is then

        sup_j |(t - t0) a_j(t) / a_j* - 1|

    over the compared shells (all shells the profile covers, or the
    first `shells` of them).  Also fits an exponential decay rate to
    the metric over the same trailing window; nan when the metric is
    too small or too short to fit.

    Raises FitFailureError when shell 0 vanishes somewhere on the fit
    window or the fitted line is flat.
    """
    prof = np.asarray(getattr(profile, "a_star", profile), dtype=float)
    if prof.ndim != 1 or prof.size == 0:
        raise ValueError("profile must be a non-empty 1-d sequence of amplitudes")
    n_cmp = prof.size if shells is None else int(shells)
    if not 1 <= n_cmp <= min(prof.size, traj.values.shape[1]):
        raise ValueError(f"cannot compare {n_cmp} shells")
    if np.any(prof[:n_cmp] == 0.0):
        raise ValueError("profile entries for compared shells must be nonzero")
    if not 0.0 < fit_fraction <= 1.0:
        raise ValueError("fit_fraction must lie in (0, 1]")

    m = len(traj)
    i0 = min(m - 2, int(math.floor((1.0 - fit_fraction) * m)))
    if i0 < 0:
        raise FitFailureError("trajectory too short for the t0 fit")
    t_win = traj.times[i0:]
    a0_win = traj.values[i0:, 0]
    if np.any(a0_win == 0.0) or not np.all(np.isfinite(a0_win)):
        raise FitFailureError("shell 0 vanishes on the fit window")
    slope, intercept = np.polyfit(t_win, 1.0 / a0_win, 1)
    # flat data fits to slope ~ 1e-17 rather than exactly zero; compare
    # the fitted rise across the window against the data scale instead
    rise = abs(slope) * float(t_win[-1] - t_win[0])
    scale = float(np.mean(np.abs(1.0 / a0_win)))
    if not math.isfinite(slope) or rise <= 1e-12 * scale:
        raise FitFailureError("degenerate 1/a0 fit (flat line)")
    t0 = float(-intercept / slope)

    dev = (traj.times - t0)[:, None] * traj.values[:, :n_cmp] / prof[None, :n_cmp] - 1.0
    metric = np.max(np.abs(dev), axis=1)

    rate = float("nan")
    tail = metric[i0:]
    mask = tail > 0.0
    if int(np.sum(mask)) >= 2:
        rate = float(-np.polyfit(t_win[mask], np.log(tail[mask]), 1)[0])

    return ConvergenceReport(times=traj.times, metric=metric, t0=t0, decay_rate=rate)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV dump: header t,a0,...,aN,energy; 17 significant digits."""
    n = traj.values.shape[1]
    header = "t," + ",".join(f"a{j}" for j in range(n)) + ",energy"
    e = traj.energy()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for i in range(len(traj)):
            fields = [traj.times[i], *traj.values[i], e[i]]
            fh.write(",".join(f"{v:.17g}" for v in fields) + "\n")
