"""Affine selections, convexity checks and transversals for compact set-valued maps."""

from .checks import (
    CertificateWitness,
    CheckOutcome,
    TripleGrid,
    check_concave,
    check_condition1,
    check_condition2,
    check_convex,
    witness_from_certificate,
)
from .geometry import (
    IntervalSet,
    Polytope,
    contains_point,
    intersects,
    membership_gap,
    minkowski_sum,
    project_drop_last,
    reduce,
    scale,
    separation_distance,
    slice_interval,
    subset,
)
from .instances import (
    NamedInstance,
    builtin,
    builtin_names,
    oracle_condition2_dense,
    oracle_lp_enumerate,
    oracle_sandwich,
    random_convex_graph,
    random_interval_pl,
)
from .lp import Halfspace, LpOutcome, chebyshev_center, solve, solve_standard
from .model import (
    AffineMap,
    DomainInterval,
    FiberFamily,
    GraphPolytope,
    IntervalPL,
    InvalidInstanceError,
    PiecewiseLinear,
    contains_value,
    evaluate,
    inf_sup,
    load_instance,
    parse_instance,
    serialize,
    validate,
    validate_raw,
)
from .select import (
    SelectionResult,
    affine_selection_convex,
    affine_selection_endpoint,
    fixed_point,
    sandwich_affine,
    transversal_solve,
)
from .tolerances import DEFAULT, Tolerances, with_base

__version__ = "0.1.0"

__all__ = [
    "AffineMap", "CertificateWitness", "CheckOutcome", "DEFAULT", "DomainInterval",
    "FiberFamily", "GraphPolytope", "Halfspace", "IntervalPL", "IntervalSet",
    "InvalidInstanceError", "LpOutcome", "NamedInstance", "PiecewiseLinear",
    "Polytope", "SelectionResult", "Tolerances", "TripleGrid",
    "affine_selection_convex", "affine_selection_endpoint", "builtin",
    "builtin_names", "chebyshev_center", "check_concave", "check_condition1",
    "check_condition2", "check_convex", "contains_point", "contains_value",
    "evaluate", "fixed_point", "inf_sup", "intersects", "load_instance",
    "membership_gap", "minkowski_sum", "oracle_condition2_dense",
    "oracle_lp_enumerate", "oracle_sandwich", "parse_instance",
    "project_drop_last", "random_convex_graph", "random_interval_pl", "reduce",
    "sandwich_affine", "scale", "separation_distance", "serialize",
    "slice_interval", "solve", "solve_standard", "subset", "transversal_solve",
    "validate", "validate_raw", "with_base", "witness_from_certificate",
]
