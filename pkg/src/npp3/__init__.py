"""Spin-coefficient calculus and adapted contact structures on riemannian 3-manifolds."""

__version__ = "0.1.0"

from .tensor import (
    DiffConfig,
    MetricField,
    OneFormField,
    CurvatureAtPoint,
    GeometryError,
    DomainViolationError,
    DegenerateMetricError,
    euclidean_metric,
    christoffel,
    curvature,
    exterior_d,
    hodge_star_oneform,
    hodge_star_twoform,
    pullback_metric,
    pullback_oneform,
)
from .frames import (
    TriadField,
    SpinCoefficients,
    OpticalScalars,
    FrameDriftError,
    gram_schmidt_frame,
    spin_coefficients,
    congruence_coefficients,
    optical_scalars_direct,
    directional,
    commutator_residuals,
)
from .ricci import (
    FrameRicci,
    SpinDerivatives,
    SpinCoefficientField,
    ricci_from_spin_values,
    ricci_reduced_values,
    identity_residual_values,
    project_curvature,
    trace_identity_residual,
    geodesic_twist_residual,
)
from .contact import (
    ContactStructure,
    NotAdaptedError,
    check_adapted,
    reeb_field,
    pseudohermitian,
    scalar_relation_residual,
    constancy_check,
)
from .catalog import (
    NamedExample,
    IsometryMap,
    standard_flat,
    round_sphere,
    flat_b0zero,
    flat_b0nonzero,
    elliptic,
    make_example,
    einstein_branch,
    hyperbolic_obstruction,
    pullback_residuals,
    stage_residuals,
)
from .congruence import (
    GeodesicPath,
    BundleData,
    integrate_geodesic,
    integrate_connecting,
    constant_coefficient_solution,
    ellipse_fit,
    geodesic_bundle,
    empirical_optical_scalars,
)
