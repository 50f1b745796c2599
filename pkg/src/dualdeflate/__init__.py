"""Multiplicity structure and deflation of isolated singular polynomial roots."""

__version__ = "0.1.0"

from .poly import (
    GRLEX,
    Functional,
    MonomialOrder,
    Polynomial,
    PolySystem,
    UnivariateSupport,
    apply_functional,
    compare_monomials,
    substitute_line,
)
from .linalg import (
    RankReport,
    kernel_basis,
    least_squares,
    numerical_rank,
    prune_rows,
    subspace_distance,
)
from .dual import (
    DualBasis,
    MonomialFrame,
    MultiplicityReport,
    build_mdz,
    build_sigma,
    dual_space_dz,
    dual_space_st,
    initial_support,
)
from .deflate import (
    AugmentedSystem,
    DeflationOperator,
    OrderPrediction,
    SymbolicMatrix,
    corank_drop_order,
    deflate_first_order,
    deflate_higher_order,
    deflate_with_operator,
    deflation_matrix,
    predict_order,
    truncated_deflation_matrix,
)
from .solver import (
    DriverConfig,
    DriverResult,
    NewtonOptions,
    NewtonTrace,
    deflation_driver,
    gauss_newton,
    is_regular,
)
from .parsing import parse_point, parse_system, serialize_system

__all__ = [
    "GRLEX",
    "Functional",
    "MonomialOrder",
    "Polynomial",
    "PolySystem",
    "UnivariateSupport",
    "apply_functional",
    "compare_monomials",
    "substitute_line",
    "RankReport",
    "kernel_basis",
    "least_squares",
    "numerical_rank",
    "prune_rows",
    "subspace_distance",
    "DualBasis",
    "MonomialFrame",
    "MultiplicityReport",
    "build_mdz",
    "build_sigma",
    "dual_space_dz",
    "dual_space_st",
    "initial_support",
    "AugmentedSystem",
    "DeflationOperator",
    "OrderPrediction",
    "SymbolicMatrix",
    "corank_drop_order",
    "deflate_first_order",
    "deflate_higher_order",
    "deflate_with_operator",
    "deflation_matrix",
    "predict_order",
    "truncated_deflation_matrix",
    "DriverConfig",
    "DriverResult",
    "NewtonOptions",
    "NewtonTrace",
    "deflation_driver",
    "gauss_newton",
    "is_regular",
    "parse_point",
    "parse_system",
    "serialize_system",
]
