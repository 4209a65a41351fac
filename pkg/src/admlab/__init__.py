"""Hawking and ADM masses of rotationally symmetric asymptotically flat manifolds.

Geometry is given either as a warped-product profile h(s) (``Profile``) or
as a radial graph f(r) in Euclidean space (``RadialGraph``); the families
module builds the standard constructions and the convergence module studies
sequences of them.
"""

from .convergence import (
    FlatNormEstimate,
    LscReport,
    RegionExtract,
    SequenceScenario,
    derivative_convergence,
    detect_blowup,
    flat_norm_upper,
    lsc_check,
    region_with_area,
    uniform_limit,
)
from .errors import (
    AdmlabError,
    DomainMismatch,
    GlueInfeasible,
    NoSuchSphere,
    NotCauchy,
    NotDifferentiable,
    NotMonotone,
    ParseError,
    ProbeFailed,
    SmoothingFailed,
)
from .families import FamilySpec, GeneratedManifold, build, check_consistency
from .geometry import (
    AdmResult,
    MassCurve,
    Profile,
    RadialGraph,
    adm_mass_limit,
    hawking_mass_general,
    hawking_mass_graph,
    hawking_mass_profile,
    mass_curve,
    mean_curvature_sphere,
    minimal_sphere_scan,
    scalar_curvature,
    to_graph,
    to_profile,
    validate_rotsym,
)
from .numerics import Tolerances
from .scenario import emit_mass_curve, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AdmResult",
    "AdmlabError",
    "DomainMismatch",
    "FamilySpec",
    "FlatNormEstimate",
    "GeneratedManifold",
    "GlueInfeasible",
    "LscReport",
    "MassCurve",
    "NoSuchSphere",
    "NotCauchy",
    "NotDifferentiable",
    "NotMonotone",
    "ParseError",
    "ProbeFailed",
    "Profile",
    "RadialGraph",
    "RegionExtract",
    "SequenceScenario",
    "SmoothingFailed",
    "Tolerances",
    "adm_mass_limit",
    "build",
    "check_consistency",
    "derivative_convergence",
    "detect_blowup",
    "emit_mass_curve",
    "flat_norm_upper",
    "hawking_mass_general",
    "hawking_mass_graph",
    "hawking_mass_profile",
    "lsc_check",
    "mass_curve",
    "mean_curvature_sphere",
    "minimal_sphere_scan",
    "region_with_area",
    "run_scenario",
    "scalar_curvature",
    "to_graph",
    "to_profile",
    "uniform_limit",
    "validate_rotsym",
]
