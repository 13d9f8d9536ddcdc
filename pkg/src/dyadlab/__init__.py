"""Numerical laboratory for self-similar solutions of dyadic shell models.

The package has two computational layers.  The ODE layer (shell_ode)
integrates the truncated shell system and measures convergence to
self-similar or forced stationary states.  The recursion layer
(profile_recursion, plane_dynamics, invariant_curve, alpha_solver)
studies the normalized profile recursion as a planar dynamical system:
it certifies an error bound on a rectangle, computes the invariant
curve of the logarithmic-chart map by a contracting graph transform,
and selects the distinguished alpha0 whose orbit realizes a decaying
profile, by shooting/bisection and independently by intersecting an
entry segment's forward images with the invariant curve.
"""

from .alpha_solver import (
    AlphaResult,
    BracketError,
    IntersectionResult,
    NoIntersectionError,
    OrbitClass,
    Verdict,
    bisect_alpha0,
    classify_orbit,
    find_bracket,
    intersect_with_curve,
    solve_alpha0,
    solve_alpha0_by_intersection,
)
from .invariant_curve import (
    ContractionViolationError,
    CurveDiagnostics,
    CurveGrid,
    DecayFit,
    InadmissibleRectangleError,
    decay_rate,
    graph_transform,
    solve_invariant,
    write_curve_csv,
    zero_curve,
)
from .params import FitFailureError, ModelParams, UnsupportedConfigurationError
from .plane_dynamics import (
    BoundCertificate,
    Chart,
    ChartConstants,
    CrossingReport,
    GBoundsReport,
    PlanePoint,
    Rectangle,
    SegmentIterates,
    certify_rectangle,
    chart_constants,
    entry_point,
    error_term,
    iterate_segment,
    jacobian_F_ab,
    map_F,
    map_ab,
    min_r0,
    to_chart,
    verify_crossing_estimates,
    verify_g_bounds,
    write_iterates_csv,
)
from .profile_recursion import (
    EnergySum,
    KolmogorovFit,
    Profile,
    fit_kolmogorov,
    generate_profile,
    next_alpha,
    next_alpha_naive,
    profile_energy,
    quadratic_oracle,
    write_profile_json,
)
from .shell_ode import (
    ConvergenceReport,
    IntegrationStalledError,
    InvalidStateError,
    ShellState,
    Trajectory,
    energy,
    forced_fixed_point,
    integrate,
    rhs,
    selfsim_convergence_metric,
    write_trajectory_csv,
)

__version__ = "0.1.0"
