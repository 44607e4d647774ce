"""Exact Wasserstein computations on finite metric-measure spaces.

Finite pointed metric spaces, discrete measures, exact optimal transport,
displacement geodesics, entropy-convexity curvature checks, and
tail-stabilization harnesses for refining families of instances.
"""

from .errors import (
    AbsoluteContinuityFailure,
    Asymmetric,
    Disconnected,
    EmptySubset,
    EmptyTruncation,
    FamilyLengthMismatch,
    InfiniteEntropy,
    NegativeDistance,
    NoGeodesicStructure,
    NonpositiveK,
    NonpositiveWeight,
    NotUniformCloud,
    NoValidPairs,
    QuantizationBudgetExceeded,
    SizeMismatch,
    SolverFailure,
    SpaceMismatch,
    TooLarge,
    TriangleViolation,
    WasserlimError,
    ZeroMass,
)
from .spaces import (
    CoveringCertificate,
    FiniteMetricSpace,
    covering_number,
    diameter,
    dyadic_interval_space,
    graph_metric,
    same_space,
    validate_metric,
)
from .measures import (
    Density,
    DiscreteMeasure,
    QuantizationResult,
    empirical_sample,
    normalize_density,
    pth_moment,
    quantize_at,
    total_variation,
    truncate_density,
    uniform_quantization,
)
from .transport import (
    Assignment,
    Coupling,
    ProjectionResult,
    alternate_optimal_couplings,
    assignment_wasserstein,
    brute_force_wasserstein,
    has_alternate_optimum,
    nearest_atom_projection,
    wasserstein_p,
)
from .geodesics import (
    InterpolationResult,
    MidpointReport,
    WassersteinPath,
    displacement_path,
    interpolate_coupling,
    point_interpolate,
    w2_midpoint,
)
from .curvature import (
    CdCheck,
    CurvatureReport,
    LogSobolevCheck,
    RajalaCheck,
    cd_midpoint_check,
    descending_slope,
    estimate_k,
    log_sobolev_check,
    rajala_bound_check,
    random_density_pair,
    relative_entropy,
)
from .limits import (
    AuditRow,
    QuantizationAudit,
    SpaceSequence,
    StabilizationVerdict,
    density_family,
    dyadic_sequence,
    escaping_mass_family,
    escaping_mass_sequence,
    quantization_uniformity_audit,
    sequence_cd,
    sequence_total_variation,
    sequence_wasserstein,
    tail_verdict,
)

__version__ = "0.1.0"

__all__ = [
    "AbsoluteContinuityFailure",
    "Assignment",
    "Asymmetric",
    "AuditRow",
    "CdCheck",
    "Coupling",
    "CoveringCertificate",
    "CurvatureReport",
    "Density",
    "Disconnected",
    "DiscreteMeasure",
    "EmptySubset",
    "EmptyTruncation",
    "FamilyLengthMismatch",
    "FiniteMetricSpace",
    "InfiniteEntropy",
    "InterpolationResult",
    "LogSobolevCheck",
    "MidpointReport",
    "NegativeDistance",
    "NoGeodesicStructure",
    "NonpositiveK",
    "NonpositiveWeight",
    "NotUniformCloud",
    "NoValidPairs",
    "ProjectionResult",
    "QuantizationAudit",
    "QuantizationBudgetExceeded",
    "QuantizationResult",
    "RajalaCheck",
    "SizeMismatch",
    "SolverFailure",
    "SpaceMismatch",
    "SpaceSequence",
    "StabilizationVerdict",
    "TooLarge",
    "TriangleViolation",
    "WasserlimError",
    "WassersteinPath",
    "ZeroMass",
    "alternate_optimal_couplings",
    "assignment_wasserstein",
    "brute_force_wasserstein",
    "cd_midpoint_check",
    "covering_number",
    "density_family",
    "descending_slope",
    "diameter",
    "displacement_path",
    "dyadic_interval_space",
    "dyadic_sequence",
    "empirical_sample",
    "escaping_mass_family",
    "escaping_mass_sequence",
    "estimate_k",
    "graph_metric",
    "has_alternate_optimum",
    "interpolate_coupling",
    "log_sobolev_check",
    "nearest_atom_projection",
    "normalize_density",
    "point_interpolate",
    "pth_moment",
    "quantization_uniformity_audit",
    "quantize_at",
    "rajala_bound_check",
    "random_density_pair",
    "relative_entropy",
    "same_space",
    "sequence_cd",
    "sequence_total_variation",
    "sequence_wasserstein",
    "tail_verdict",
    "total_variation",
    "truncate_density",
    "uniform_quantization",
    "validate_metric",
    "w2_midpoint",
    "wasserstein_p",
]
