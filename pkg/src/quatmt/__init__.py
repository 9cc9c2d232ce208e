"""Slice regular Malmquist-Takenaka systems in the quaternionic Hardy space H^2(B).

Power series are ``sum_n q**n a_n`` with coefficients on the right throughout.
"""

from .blaschke import (
    BlaschkeParam,
    classical_blaschke,
    regular_blaschke_eval,
    regular_blaschke_series,
    t_a,
)
from .hardy import (
    SingularKernelError,
    SliceBoundaryGrid,
    cauchy_kernel,
    cauchy_slice_eval,
    extend_from_slice,
    inner_product_quadrature,
    poisson_eval,
    regular_cauchy_eval,
)
from .mt_system import (
    MTSystem,
    PoleSequence,
    build_mt,
    classical_mt_eval,
    gram_matrix,
    laguerre_closed_form,
    mt_eval_on_slice,
)
from .projection import (
    ProjectionResult,
    convergence_table,
    dirichlet_kernel,
    interpolation_residuals,
    mt_coefficients,
    project,
)
from .quat_core import (
    DomainError,
    Quaternion,
    SliceCoordinate,
    UnitImaginary,
    exp_slice,
    haar_integral,
    inverse,
    multiply,
    orthogonal_unit,
    rotate,
    slice_decompose,
    unit_from_spherical,
)
from .series import (
    ComplexSliceSeries,
    InvariantViolation,
    RegularSeries,
    evaluate,
    h2_inner_coeff,
    h2_norm,
    invert_real_series,
    regular_conjugate,
    regular_reciprocal,
    restrict_to_slice,
    star_product,
    symmetrization,
)

__version__ = "0.1.0"

__all__ = [
    "BlaschkeParam",
    "build_mt",
    "cauchy_kernel",
    "cauchy_slice_eval",
    "classical_blaschke",
    "classical_mt_eval",
    "ComplexSliceSeries",
    "convergence_table",
    "dirichlet_kernel",
    "DomainError",
    "evaluate",
    "exp_slice",
    "extend_from_slice",
    "gram_matrix",
    "h2_inner_coeff",
    "h2_norm",
    "haar_integral",
    "inner_product_quadrature",
    "interpolation_residuals",
    "InvariantViolation",
    "inverse",
    "invert_real_series",
    "laguerre_closed_form",
    "mt_coefficients",
    "mt_eval_on_slice",
    "MTSystem",
    "multiply",
    "orthogonal_unit",
    "poisson_eval",
    "PoleSequence",
    "project",
    "ProjectionResult",
    "Quaternion",
    "regular_blaschke_eval",
    "regular_blaschke_series",
    "regular_cauchy_eval",
    "regular_conjugate",
    "regular_reciprocal",
    "RegularSeries",
    "restrict_to_slice",
    "rotate",
    "SingularKernelError",
    "slice_decompose",
    "SliceBoundaryGrid",
    "SliceCoordinate",
    "star_product",
    "symmetrization",
    "t_a",
    "unit_from_spherical",
    "UnitImaginary",
]

