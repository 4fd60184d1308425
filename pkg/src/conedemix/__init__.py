"""Convex demixing of incoherent structured signals: decay-threshold phase
transitions, conic integral geometry, and Monte Carlo experiments."""

__version__ = "1.0.0"

from .cones import (
    IntrinsicVolumeProfile,
    PolyhedralCone,
    estimate_gaussian_width,
    exact_orthant_volumes,
    exact_subspace_volumes,
    face_dimension,
    intersects_nontrivially,
    kinematic_probability,
    l1_descent_cone,
    linf_descent_cone,
    mc_intrinsic_volumes,
    orthant_cone,
    project_cone,
)
from .curves import (
    CurvePoints,
    channel_strong_threshold,
    channel_weak_threshold,
    invert_threshold,
    matrix_demix_bounds,
    mca_strong_curve,
    mca_weak_curve,
    rank_sparsity_curve,
)
from .experiments import (
    ExperimentConfig,
    SuccessGrid,
    crossing_point,
    extract_contour,
    run_channel,
    run_mca,
    run_rank_sparsity,
)
from .numerics import RngState, bisect, nnls, qr_decompose, svd
from .random_models import (
    SparsityPattern,
    erase,
    haar_orthogonal,
    low_rank_matrix,
    sparse_signal,
)
from .solvers import (
    DemixProblem,
    GaugeSpec,
    SolveReport,
    gauge_value,
    project_ball,
    prox_l1,
    prox_schatten1,
    simplex_lp,
    solve_demix,
)
from .thresholds import (
    ExponentPoint,
    entropy,
    face_count_exponent,
    kappa_l1,
    psi_total,
    theta_l1,
    theta_operator,
    theta_orthant,
    theta_schatten1,
    theta_subspace,
)
