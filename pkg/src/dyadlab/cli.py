"""Command-line entry point.

Five subcommands tie the library into reproducible experiments:

    simulate   integrate the shell system; trajectory CSV + PNG + energy report
    profile    solve for alpha0 and emit the profile JSON + PNG
    curve      compute the invariant curve; CSV + diagnostics JSON + PNG
    verify     run the rectangle certificate, crossing estimates, g-bounds
    figure     emit the entry segment and its forward images; CSV + PNG

Configuration comes from plain key=value files (--config) with flags
winning over file entries.  Exit codes: 0 success, 2 validation error,
3 numerical failure, 4 verification failure (a checked inequality did
not hold).  Outputs use fixed float formatting, so identical inputs
produce byte-identical data files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import plotting
from .alpha_solver import (
    AlphaResult,
    BracketError,
    NoIntersectionError,
    alpha_result_json_dict,
    bisect_alpha0,
    find_bracket,
    solve_alpha0_by_intersection,
)
from .invariant_curve import (
    ContractionViolationError,
    InadmissibleRectangleError,
    decay_rate,
    diagnostics_json_dict,
    solve_invariant,
    write_curve_csv,
)
from .params import FitFailureError, ModelParams, UnsupportedConfigurationError
from .plane_dynamics import (
    Rectangle,
    certificate_json_dict,
    certify_rectangle,
    crossing_report_json_dict,
    iterate_segment,
    min_r0,
    verify_crossing_estimates,
    verify_g_bounds,
    write_iterates_csv,
)
from .profile_recursion import fit_kolmogorov, generate_profile, profile_energy, write_profile_json
from .shell_ode import (
    IntegrationStalledError,
    InvalidStateError,
    ShellState,
    energy,
    forced_fixed_point,
    integrate,
    write_trajectory_csv,
)

# ---------------------------------------------------------------------------
# argument plumbing


def _common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--lambda", dest="lam", type=float, default=2.0, help="inter-shell ratio (> 1)")
    sp.add_argument("--beta", type=float, default=0.0, help="model coefficient (>= 0)")
    sp.add_argument("--forcing", type=float, default=0.0, help="forcing applied to shell 0 (>= 0)")
    sp.add_argument("--tol", type=float, default=None, help="tolerance (per-command default)")
    sp.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sp.add_argument("--config", type=Path, default=None, help="key=value config file; flags win")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="dyadlab",
        description="Numerical laboratory for self-similar solutions of dyadic shell models.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    submap: dict[str, argparse.ArgumentParser] = {}

    sp = subs.add_parser("simulate", help="integrate the shell system")
    _common_flags(sp)
    sp.add_argument("--shells", type=int, default=None, help="number of shells (entries), required")
    sp.add_argument("--t-end", type=float, default=10.0, help="final time")
    sp.add_argument(
        "--initial",
        choices=("auto", "delta", "zeros", "fixed-point"),
        default="auto",
        help="initial data: delta puts 1 in shell 0; auto = zeros when forced, else delta",
    )
    sp.add_argument("--t-eval", type=int, default=512, help="number of output samples")
    sp.add_argument("--plot-shells", type=int, default=8, help="shells shown in the figure")
    sp.set_defaults(func=cmd_simulate)
    submap["simulate"] = sp

    sp = subs.add_parser("profile", help="solve for alpha0 and emit the profile")
    _common_flags(sp)
    sp.add_argument("--method", choices=("bisect", "curve", "both"), default="both")
    sp.add_argument(
        "--n-max",
        type=int,
        default=30,
        help="profile length to generate (orbit deviations double per index, "
        "so double precision supports roughly 40 useful entries)",
    )
    sp.add_argument("--r0", type=float, default=3.0, help="rectangle R0 for the curve method")
    sp.add_argument("--r1", type=float, default=0.12, help="rectangle R1 for the curve method")
    sp.add_argument("--bracket-lo", type=float, default=0.1)
    sp.add_argument("--bracket-hi", type=float, default=1.0)
    sp.add_argument("--agree-tol", type=float, default=1e-6, help="method agreement gate for --method both")
    sp.set_defaults(func=cmd_profile)
    submap["profile"] = sp

    sp = subs.add_parser("curve", help="compute the invariant curve")
    _common_flags(sp)
    sp.add_argument("--r0", type=float, default=2.56)
    sp.add_argument("--r1", type=float, default=0.03)
    sp.add_argument("--b-max", type=float, default=None, help="right end of the grid (default r0 + 60)")
    sp.add_argument("--spacing", type=float, default=0.01, help="grid spacing in b")
    sp.add_argument("--max-iterations", type=int, default=500)
    sp.set_defaults(func=cmd_curve)
    submap["curve"] = sp

    sp = subs.add_parser("verify", help="rectangle certificate, crossing estimates, g-bounds")
    _common_flags(sp)
    sp.add_argument("--r0", type=float, default=2.56)
    sp.add_argument("--r1", type=float, default=0.03)
    sp.add_argument("--grid", type=int, default=10_000, help="grid points for the crossing estimates")
    sp.add_argument(
        "--betas",
        type=str,
        default="0.05,0.02,0.01,0.005",
        help="comma-separated beta values for the g-bound sweep ('' to skip)",
    )
    sp.set_defaults(func=cmd_verify)
    submap["verify"] = sp

    sp = subs.add_parser("figure", help="entry segment and its forward images")
    _common_flags(sp)
    sp.add_argument("--t-min", type=float, default=-0.40, help="segment parameter start")
    sp.add_argument("--t-max", type=float, default=-0.24, help="segment parameter end")
    sp.add_argument("--iterates", type=int, default=4, help="number of forward images")
    sp.add_argument("--samples", type=int, default=400)
    sp.add_argument("--no-curve", action="store_true", help="skip the invariant-curve overlay")
    sp.add_argument("--r0", type=float, default=2.56, help="overlay curve rectangle R0")
    sp.add_argument("--r1", type=float, default=0.03, help="overlay curve rectangle R1")
    sp.set_defaults(func=cmd_figure)
    submap["figure"] = sp

    return parser, submap


def load_config(path: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            entries[key.strip()] = value.strip()
    return entries


def apply_config(sub: argparse.ArgumentParser, entries: dict[str, str]) -> None:
    """Validate config entries against the subcommand and set them as defaults."""
    actions = {a.dest: a for a in sub._actions}
    typed: dict[str, object] = {}
    for key, raw in entries.items():
        dest = key.lower().replace("-", "_")
        if dest == "lambda":
            dest = "lam"
        action = actions.get(dest)
        if action is None or dest in ("help", "config", "func"):
            raise ValueError(f"unknown config key {key!r} for this command")
        if isinstance(action, argparse._StoreTrueAction):
            typed[dest] = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                typed[dest] = action.type(raw)
            except Exception as err:
                raise ValueError(f"config key {key!r}: cannot parse {raw!r} ({err})") from err
        else:
            typed[dest] = raw
    sub.set_defaults(**typed)


def _params(args, shells=None) -> ModelParams:
    return ModelParams(lam=args.lam, beta=args.beta, forcing=args.forcing, shells=shells)


def _outdir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _write_json(doc: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    if args.shells is None:
        raise ValueError("simulate requires --shells")
    params = _params(args, shells=args.shells)
    tol = 1e-10 if args.tol is None else args.tol

    initial = args.initial
    if initial == "auto":
        initial = "zeros" if params.forcing > 0 else "delta"
    if initial == "zeros":
        y0 = np.zeros(params.shells)
    elif initial == "delta":
        y0 = np.zeros(params.shells)
        y0[0] = 1.0
    else:
        y0 = forced_fixed_point(params)

    traj = integrate(ShellState(y0), params, args.t_end, tol=tol, t_eval=args.t_eval)
    out = _outdir(args)
    csv_path = out / "trajectory.csv"
    png_path = out / "trajectory.png"
    write_trajectory_csv(traj, csv_path)
    plotting.plot_trajectory(traj, png_path, max_shells=args.plot_shells)

    E = traj.energy()
    span = args.t_end - traj.times[0]
    print(f"wrote {csv_path}")
    print(f"wrote {png_path}")
    print(f"steps accepted={traj.naccept} rejected={traj.nreject}")
    print(f"energy initial={E[0]:.17g} final={E[-1]:.17g}")
    if params.forcing == 0.0:
        drift = float(np.max(np.abs(E - E[0])))
        print(f"energy max drift={drift:.6g} (reference bound 100*tol*T = {100 * tol * span:.6g})")
    print(f"weighted energy (delta=0.1) final={energy(traj.values[-1], delta=0.1, lam=params.lam):.6g}")
    if params.forcing > 0 and params.beta == 0.0:
        fp = forced_fixed_point(params)
        dev = np.abs(traj.values[-1] - fp)
        half = max(1, params.shells // 2)
        print(
            f"fixed-point deviation: leading half max={np.max(dev[:half]):.6g} "
            f"overall max={np.max(dev):.6g}"
        )
    return 0


def _profile_doc_paths(args, params, alpha0, result: AlphaResult, extra: dict):
    out = _outdir(args)
    profile = generate_profile(alpha0, args.n_max, params)
    fit = fit_kolmogorov(profile) if len(profile) >= 10 and not profile.overflowed else None
    esum = profile_energy(profile)
    json_path = out / "profile.json"
    write_profile_json(
        profile,
        json_path,
        fit,
        extra={"energy": None if esum.diverged else esum.value, **extra},
    )
    alpha_path = out / "alpha0.json"
    doc = alpha_result_json_dict(result, params)
    doc.update(extra)
    _write_json(doc, alpha_path)
    png_path = out / "profile.png"
    plotting.plot_profile(profile, png_path, fit=fit)
    for p in (json_path, alpha_path, png_path):
        print(f"wrote {p}")
    if fit is not None:
        print(f"scaling fit: const={fit.const:.10g} residual={fit.residual:.3g} window={fit.window}")
    return 0


def cmd_profile(args) -> int:
    params = _params(args)
    tol = 1e-12 if args.tol is None else args.tol

    res_bisect = None
    res_curve = None
    if args.method in ("bisect", "both"):
        lo, hi = find_bracket(params, lo=args.bracket_lo, hi=args.bracket_hi)
        res_bisect = bisect_alpha0(lo, hi, params, tol=tol)
        print(
            f"bisect: alpha0={float(res_bisect.alpha0):.17g} "
            f"bracket=({res_bisect.bracket[0]:.17g}, {res_bisect.bracket[1]:.17g}) "
            f"iterations={res_bisect.iterations}"
        )
    if args.method in ("curve", "both"):
        curve, _diag = solve_invariant(Rectangle(args.r0, args.r1), params, tol=1e-10)
        hit = solve_alpha0_by_intersection(curve, params)
        res_curve = AlphaResult(
            alpha0=hit.alpha0,
            method="curve",
            transversality_margin=hit.transversality_margin,
            t_star=hit.t_star,
            b_at_crossing=hit.b_at_crossing,
            n_iter=hit.n_iter,
        )
        print(
            f"curve: alpha0={hit.alpha0:.17g} t_star={hit.t_star:.12g} "
            f"n_iter={hit.n_iter} margin={hit.transversality_margin:.6g}"
        )

    if args.method == "bisect":
        return _profile_doc_paths(args, params, res_bisect.alpha0, res_bisect, {})
    if args.method == "curve":
        return _profile_doc_paths(
            args, params, res_curve.alpha0, res_curve, {"t_star": res_curve.t_star}
        )

    gap = abs(float(res_bisect.alpha0) - res_curve.alpha0)
    agree = gap <= args.agree_tol
    print(f"method agreement: |bisect - curve| = {gap:.6g} (gate {args.agree_tol:g})")
    merged = AlphaResult(
        alpha0=float(res_bisect.alpha0),
        method="both",
        bracket=res_bisect.bracket,
        iterations=res_bisect.iterations,
        transversality_margin=res_curve.transversality_margin,
        t_star=res_curve.t_star,
        b_at_crossing=res_curve.b_at_crossing,
        n_iter=res_curve.n_iter,
    )
    status = _profile_doc_paths(
        args,
        params,
        merged.alpha0,
        merged,
        {"alpha0_curve": res_curve.alpha0, "method_gap": gap},
    )
    if not agree:
        print("verification failure: methods disagree", file=sys.stderr)
        return 4
    return status


def cmd_curve(args) -> int:
    params = _params(args)
    tol = 1e-10 if args.tol is None else args.tol
    rect = Rectangle(args.r0, args.r1)
    curve, diag = solve_invariant(
        rect,
        params,
        tol=tol,
        b_max=args.b_max,
        spacing=args.spacing,
        max_iterations=args.max_iterations,
    )
    try:
        fit = decay_rate(curve)
    except FitFailureError:
        fit = None

    out = _outdir(args)
    csv_path = out / "curve.csv"
    json_path = out / "curve_diagnostics.json"
    png_path = out / "curve.png"
    write_curve_csv(curve, csv_path)
    _write_json(diagnostics_json_dict(diag, fit), json_path)
    plotting.plot_curve(curve, png_path, label=f"R0={rect.r0:g}, R1={rect.r1:g}, beta={params.beta:g}")
    for p in (csv_path, json_path, png_path):
        print(f"wrote {p}")
    print(
        f"iterations={diag.iterations} residual={diag.residual:.6g} "
        f"contraction_ratio={diag.contraction_ratio:.6g} clipped={diag.clipped} "
        f"sup|a|={curve.sup_abs:.6g}"
    )
    if fit is not None:
        print(f"decay: c_prime={fit.c_prime:.6g} fit_residual={fit.fit_residual:.3g}")
    return 0


def cmd_verify(args) -> int:
    params = _params(args)
    rect = Rectangle(args.r0, args.r1)
    report: dict = {}
    failures: list[str] = []

    cert = certify_rectangle(rect, params)
    report["certificate"] = certificate_json_dict(cert)
    print(f"rectangle ({rect.r0:g}, {rect.r1:g}): admissible={cert.admissible}")
    for name in ("domain", "error_sup", "grad_sup", "h_range", "grad_h"):
        ok = name not in cert.failed
        print(f"  {name}: {'PASS' if ok else 'FAIL'}")
        if not ok:
            failures.append(f"certificate:{name}")
    try:
        r0_min = min_r0(rect.r1, params)
        report["min_r0"] = r0_min
        print(f"min_r0(r1={rect.r1:g}) = {r0_min:.12g}")
    except ValueError as err:
        report["min_r0"] = None
        print(f"min_r0: not applicable ({err})")

    if params.lam == 2.0 and params.beta == 0.0:
        crossing = verify_crossing_estimates(params, n_grid=args.grid)
        report["crossing"] = crossing_report_json_dict(crossing)
        for line in crossing.checks:
            print(f"  crossing {line.name}: {'PASS' if line.passed else 'FAIL'} (margin {line.margin:.6g})")
            if not line.passed:
                failures.append(f"crossing:{line.name}")
        for line in crossing.diagnostics:
            print(f"  crossing [info] {line.name}: {'ok' if line.passed else 'no'} ({line.detail})")
    else:
        report["crossing"] = None
        print("crossing estimates skipped (specific to lambda=2, beta=0)")

    betas = [float(tok) for tok in args.betas.split(",") if tok.strip()] if args.betas else []
    g_section = []
    for beta in betas:
        gp = ModelParams(lam=params.lam, beta=beta)
        g = verify_g_bounds(gp)
        g_section.append(
            {
                "beta": beta,
                "c_g1": g.c_g1,
                "c_g2": g.c_g2,
                "c_g2_printed": g.c_g2_printed,
                "g1_at_zero": g.g1_at_zero,
                "g2_limit": g.g2_limit,
            }
        )
        print(
            f"  g-bounds beta={beta:g}: c_g1={g.c_g1:.6g} c_g2={g.c_g2:.6g} "
            f"g1(0)={g.g1_at_zero:.3g} g2_limit={g.g2_limit:.10g}"
        )
    report["g_bounds"] = g_section

    out = _outdir(args)
    json_path = out / "verify.json"
    report["passed"] = not failures
    _write_json(report, json_path)
    print(f"wrote {json_path}")
    if failures:
        print("verification failure: " + ", ".join(failures), file=sys.stderr)
        return 4
    print("all gated checks passed")
    return 0


def cmd_figure(args) -> int:
    params = _params(args)
    if not args.t_min < args.t_max:
        raise ValueError("need t-min < t-max")
    iterates = iterate_segment(args.t_min, args.t_max, args.iterates, params, samples=args.samples)

    curve = None
    if not args.no_curve:
        curve, _diag = solve_invariant(Rectangle(args.r0, args.r1), params, tol=1e-10)

    out = _outdir(args)
    csv_path = out / "figure.csv"
    png_path = out / "figure.png"
    write_iterates_csv(iterates, csv_path)
    plotting.plot_iterates(iterates, png_path, curve=curve)
    for p in (csv_path, png_path):
        print(f"wrote {p}")

    # Successive images move up in b; report the margin at matched
    # parameter values as a self-check.
    margins = []
    for k in range(len(iterates.polylines) - 1):
        t_lo, t_hi = iterates.t[k], iterates.t[k + 1]
        common, idx_lo, idx_hi = np.intersect1d(t_lo, t_hi, return_indices=True)
        if common.size == 0:
            continue
        margins.append(float(np.min(iterates.polylines[k + 1][idx_hi, 1] - iterates.polylines[k][idx_lo, 1])))
    if margins:
        print(f"b-ordering margin across images: min={min(margins):.6g} (positive = below to above)")
    if any(iterates.truncated):
        print("note: some samples left the series validity region and were dropped")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser, submap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            apply_config(submap[args.command], load_config(args.config))
            args = parser.parse_args(argv)
        return args.func(args)
    except InadmissibleRectangleError as err:
        print(f"validation error: {err}", file=sys.stderr)
        json.dump(certificate_json_dict(err.certificate), sys.stderr, indent=2)
        print(file=sys.stderr)
        return 2
    except (ValueError, InvalidStateError, UnsupportedConfigurationError, BracketError, OSError) as err:
        print(f"validation error: {err}", file=sys.stderr)
        return 2
    except (
        IntegrationStalledError,
        ContractionViolationError,
        NoIntersectionError,
        FitFailureError,
        OverflowError,
        RuntimeError,
    ) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
