"""Sampled-curve toolkit for self-expanded curves, lambda-curves and lambda-eels."""

from .checks import (
    CheckReport,
    check_conical_split,
    check_lambda_cone,
    check_lambda_curve,
    check_lyapunov,
    check_noncollinear,
    check_self_contracted,
    check_self_expanded,
    find_min_lambda,
    run_check,
)
from .config import (
    DEFAULT_TOL,
    DegenerateSampleError,
    DomainError,
    PreconditionError,
    RunConfig,
)
from .constructions import (
    LAMBDA_EEL,
    CertificationRecord,
    CylinderSpec,
    EelParams,
    EelPlan,
    SampleBudgetError,
    certify_lemma,
    cylinder_eel,
    derive_M,
    derive_mu,
    derive_N,
    example_curve_3d,
    gradient_descent_trajectory,
    helix,
    infinite_eel,
    lambda_from_norm_equivalence,
    plan_cylinder_eel,
    plan_infinite_eel,
)
from .curve import (
    CurveFormatError,
    SampledCurve,
    concatenate,
    diameter,
    forward_secant,
    initial_cone,
    polyline_length,
    read_csv,
    reverse,
    write_csv,
)
from .geometry import (
    AxisCone,
    GeneratedCone,
    SphereNet,
    build_sphere_net,
    cone_projection_cos,
    enlarge_cone,
    pointedness_test,
    polar_contains,
    zero_in_convex_hull,
)
from .rectifiability import (
    length_bound,
    repulsion_constants,
    verify_length_bound,
    width_profile,
)

__version__ = "0.1.0"
