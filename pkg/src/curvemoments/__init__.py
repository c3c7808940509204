"""Moments and extension constants of exponential sums over integer power
curves on the torus: exact solution counting, Nyquist-grid quadrature,
shift-decomposition checks, lower-bound constructions, constant estimation,
and a sweep/fit harness."""

from ._version import __version__
from .core import (
    CoefficientVector,
    CurveSpec,
    TorusPoint,
    coefficients,
    eval_extension,
    eval_points,
    frequency_map,
    full_curve,
    generate,
    load_coefficients,
    make_curve,
    modulated,
    ones,
    random_gaussian_int,
    random_unit,
    save_coefficients,
    sup_norm_bound,
    zero_mean,
)
from .counting import (
    MomentValue,
    ShiftVector,
    SparseLattice,
    brute_force_moment,
    even_moment,
    even_moment_fft,
    moment_auto,
    representation_counts,
    shifted_moment,
    support_estimate,
)
from .estimator import AscentConfig, EstimateResult, estimate_K, moment_gradient, restriction_constant
from .harness import (
    FitResult,
    SweepConfig,
    SweepReport,
    SweepRow,
    emit_report,
    fit_exponent,
    load_rows,
    run_sweep,
)
from .quadrature import (
    TorusGrid,
    log_convexity_check,
    lp_norm,
    nyquist_dims,
    nyquist_grid,
)
from .reduction import (
    ReductionReport,
    complement_shifts,
    shift_box_count,
    theorem_bound_check,
    verify_decomposition,
    verify_dominance,
)
from .sharpness import (
    KLowerBound,
    MajorArcBox,
    SharpnessReport,
    diagonal_lower_bound,
    k_lower_bound,
    major_arc_min,
    major_arc_moment_bound,
    sharpness_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
