"""Matplotlib renderings of the library's artifacts.

Every function takes the artifact plus an output path, writes a PNG
(150 dpi, Agg backend, no display needed), and returns the path.  These
back the CLI's report output; the delimited files remain the primary
artifacts and the figures are companions for quick inspection.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_trajectory(traj, path, max_shells: int = 8):
    """Leading shell amplitudes over time, with the energy below."""
    n = traj.values.shape[1]
    shown = min(max_shells, n)
    fig, (ax_a, ax_e) = plt.subplots(
        2, 1, figsize=(8.0, 6.0), sharex=True, height_ratios=[2, 1]
    )
    for j in range(shown):
        ax_a.plot(traj.times, traj.values[:, j], lw=1.0, label=f"a{j}")
    ax_a.set_ylabel("amplitude")
    ax_a.legend(ncol=4, fontsize=8, frameon=False)
    if shown < n:
        ax_a.set_title(f"first {shown} of {n} shells", fontsize=9)
    ax_e.plot(traj.times, traj.energy(), "k-", lw=1.0)
    ax_e.set_ylabel("energy")
    ax_e.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_profile(profile, path, fit=None):
    """Profile entries and the compensated spectrum side by side.

    The left panel shows alpha_n; the right panel shows
    alpha_n * lam^(-2n/3), whose plateau (dashed line when a fit is
    supplied) is the scaling constant.
    """
    n = np.arange(len(profile))
    comp = profile.compensated()
    fig, (ax_l, ax_r) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax_l.semilogy(n, np.abs(profile.alphas), "o-", ms=3, lw=1.0)
    ax_l.set_xlabel("n")
    ax_l.set_ylabel("alpha_n")
    ax_r.plot(n, comp, "o-", ms=3, lw=1.0)
    if fit is not None and np.isfinite(fit.const):
        ax_r.axhline(fit.const, color="k", ls="--", lw=1.0, label=f"const = {fit.const:.6g}")
        ax_r.legend(fontsize=8, frameon=False)
    ax_r.set_xlabel("n")
    ax_r.set_ylabel("alpha_n * lam^(-2n/3)")
    fig.suptitle(
        f"lam = {profile.params.lam:g}, beta = {profile.params.beta:g}, alpha0 = {profile.alpha0:.10g}",
        fontsize=9,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_curve(curve, path, label: str | None = None):
    """Invariant curve a = gamma(b) with the strip bounds."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(curve.b, curve.a, lw=1.2, label=label or "gamma(b)")
    r1 = curve.rect.r1
    ax.axhline(0.0, color="0.7", lw=0.8)
    ax.axhline(r1, color="k", ls=":", lw=0.8)
    ax.axhline(-r1, color="k", ls=":", lw=0.8, label=f"strip |a| = {r1:g}")
    ax.set_xlabel("b")
    ax.set_ylabel("a")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_iterates(iterates, path, curve=None):
    """Entry segment and its forward images in the (b, a) plane."""
    fig, ax = plt.subplots(figsize=(8.0, 5.0))
    cmap = plt.get_cmap("viridis")
    n_lines = len(iterates.polylines)
    for k, poly in enumerate(iterates.polylines):
        if poly.shape[0] == 0:
            continue
        color = cmap(k / max(1, n_lines - 1))
        name = "segment" if k == 0 else f"image {k}"
        ax.plot(poly[:, 1], poly[:, 0], lw=1.2, color=color, label=name)
    if curve is not None:
        ax.plot(curve.b, curve.a, "k--", lw=1.0, label="invariant curve")
    ax.set_xlabel("b")
    ax.set_ylabel("a")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
