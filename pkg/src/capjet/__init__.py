"""Axisymmetric capillary jet flows with vorticity and swirl.

Laminar profiles, dispersion-based bifurcation points, spectral
certification, closed-form constant-vorticity classification, and
pseudo-arclength continuation of travelling surface waves.
"""

from .bessel import bessel_i, bessel_k1
from .cheb import RadialGrid, radial_grid
from .closed_form import (
    ConstVortCase,
    InequalityReport,
    RootCount,
    b_pm,
    chi,
    chi_inverse,
    classify_root_count,
    find_curvature_threshold,
    irrotational_dispersion_rhs,
    max_b_minus,
    verify_inequalities,
)
from .dispersion import (
    BifurcationPoint,
    PredictorField,
    ScanResult,
    dispersion_value,
    find_bifurcation_points,
    kernel_predictor,
    solve_beta,
    transversality,
)
from .errors import (
    BlowUp,
    CapjetError,
    ConfigError,
    DegenerateSurfaceSpeed,
    DomainCollapse,
    DomainError,
    EigensolveFailure,
    HardViolation,
    InequalityViolation,
    LinearSolveFailure,
    NoConvergence,
    OverflowRange,
    UnstableDerivative,
)
from .model import (
    FlowParameters,
    SwirlFunction,
    ValidationReport,
    VorticityFunction,
    parse_profile_config,
    validate_assumptions,
)
from .spectral import (
    MatrixPencil,
    SpectrumResult,
    build_operator_K,
    certified_eigenvalues,
    compute_spectrum,
    cross_validate_with_dispersion,
    quadratic_form_two_ways,
)
from .trivial_flow import (
    TrivialFlowProfile,
    boundary_coefficients,
    check_condition_h,
    make_profile_factory,
    solve_trivial,
    surface_speed,
)
from .validation import CheckRow, format_table, run_paper_validation
from .wave_solver import (
    Arclength,
    Branch,
    Discretization,
    FixedLambda,
    PhysicalFields,
    WaveState,
    bernoulli_Q,
    build_discretization,
    continue_branch,
    curvature,
    elliptic_solve_A,
    newton_correct,
    reconstruct_physical,
    reduced_elliptic_operator,
    residual_F,
    state_diagnostics,
    trivial_Q,
    vorticity_lp_norm,
)

__version__ = "0.1.0"
