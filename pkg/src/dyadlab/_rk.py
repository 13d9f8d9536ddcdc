"""Dormand-Prince 5(4) kernel, JIT-compiled.

Kept separate from the public module so the numba dependency and the
nopython restrictions stay contained.  The kernel integrates the shell
system in place, emits dense output at caller-supplied times via cubic
Hermite interpolation, and reports one of three statuses:

    0  reached t_end
    1  stalled (step size underflowed; t_reached says where)
    2  step budget exhausted

Step size control is the standard PI controller (orders 5/4, safety
0.9, exponents 0.7/5 and 0.4/5, factor clamped to [0.2, 5]).  The error
norm is the scaled RMS with atol = rtol = tol, so a single tolerance
knob governs both regimes.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_STALLED = 1
STATUS_STEP_BUDGET = 2

# Butcher tableau, Dormand-Prince 5(4).  E = b5 - b4 (error weights).
_C2, _C3, _C4, _C5, _C6 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@njit(cache=True)
def rhs_fill(y, lam_pows, beta, forcing, out):
    """Shell system right-hand side with closed ends.

    Shell j couples to j-1 and j+1; the missing neighbours below shell 0
    and above the last shell are taken to be zero, which makes the
    quadratic part conserve the sum of squares exactly.  Forcing enters
    shell 0 only.
    """
    n = y.shape[0]
    for j in range(n):
        left = y[j - 1] if j > 0 else 0.0
        right = y[j + 1] if j < n - 1 else 0.0
        out[j] = (
            lam_pows[j] * left * left
            - lam_pows[j + 1] * y[j] * right
            + beta * (lam_pows[j] * left * y[j] - lam_pows[j + 1] * right * right)
        )
    out[0] += forcing


@njit(cache=True)
def dp54(y0, t0, t_end, tol, lam_pows, beta, forcing, t_out, max_steps):
    """Integrate from (t0, y0) to t_end, sampling at t_out.

    t_out must be sorted and contained in [t0, t_end].  Returns
    (status, t_reached, naccept, nreject, n_emitted, y_out, y_final).
    The final state is the raw accepted step endpoint, not an
    interpolant, so a t_out entry equal to t_end is exact.
    """
    n = y0.shape[0]
    m = t_out.shape[0]
    y_out = np.empty((m, n))
    atol = tol
    rtol = tol

    y = y0.copy()
    t = t0

    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)
    ytmp = np.empty(n)
    ynew = np.empty(n)

    rhs_fill(y, lam_pows, beta, forcing, k1)

    io = 0
    while io < m and t_out[io] <= t:
        for i in range(n):
            y_out[io, i] = y[i]
        io += 1

    if t_end <= t0:
        return STATUS_OK, t, 0, 0, io, y_out, y

    # Crude first step from the scaled sizes of y and y'; the
    # controller corrects it within a few steps either way.
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y[i])
        d0 = max(d0, abs(y[i]) / sc)
        d1 = max(d1, abs(k1[i]) / sc)
    h = min(t_end - t0, 1e-2 * (1.0 + d0) / (1.0 + d1))

    err_old = 1e-4
    naccept = 0
    nreject = 0

    while t < t_end:
        if naccept + nreject >= max_steps:
            return STATUS_STEP_BUDGET, t, naccept, nreject, io, y_out, y
        if h < 1e-14 * max(1.0, abs(t)):
            return STATUS_STALLED, t, naccept, nreject, io, y_out, y
        # Land on t_end exactly; t + h alone can round an ulp short and
        # leave an unreachable sliver.
        last = t + h >= t_end
        if last:
            h = t_end - t

        for i in range(n):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        rhs_fill(ytmp, lam_pows, beta, forcing, k2)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        rhs_fill(ytmp, lam_pows, beta, forcing, k3)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        rhs_fill(ytmp, lam_pows, beta, forcing, k4)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        rhs_fill(ytmp, lam_pows, beta, forcing, k5)
        for i in range(n):
            ytmp[i] = y[i] + h * (
                _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
            )
        rhs_fill(ytmp, lam_pows, beta, forcing, k6)
        for i in range(n):
            ynew[i] = y[i] + h * (
                _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
            )
        rhs_fill(ynew, lam_pows, beta, forcing, k7)

        err = 0.0
        finite = True
        for i in range(n):
            if not np.isfinite(ynew[i]):
                finite = False
                break
            ei = h * (
                _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
            )
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            err += (ei / sc) ** 2
        if finite:
            err = np.sqrt(err / n)
            if not np.isfinite(err):
                finite = False

        if not finite:
            h *= 0.5
            nreject += 1
            continue

        if err <= 1.0:
            t_new = t_end if last else t + h
            # Emit dense output before FSAL reuse overwrites k1.
            while io < m and t_out[io] <= t_new:
                theta = (t_out[io] - t) / h
                th2 = theta * theta
                th3 = th2 * theta
                for i in range(n):
                    dy = ynew[i] - y[i]
                    y_out[io, i] = (
                        y[i]
                        + theta * h * k1[i]
                        + th2 * (3.0 * dy - h * (2.0 * k1[i] + k7[i]))
                        + th3 * (-2.0 * dy + h * (k1[i] + k7[i]))
                    )
                io += 1
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            t = t_new
            naccept += 1
            err = max(err, 1e-10)
            fac = 0.9 * err ** (-0.14) * err_old ** 0.08
            fac = min(5.0, max(0.2, fac))
            h *= fac
            err_old = max(err, 1e-4)
        else:
            nreject += 1
            h *= min(0.9, max(0.2, 0.9 * err ** (-0.2)))

    while io < m:
        for i in range(n):
            y_out[io, i] = y[i]
        io += 1

    return STATUS_OK, t, naccept, nreject, io, y_out, y
