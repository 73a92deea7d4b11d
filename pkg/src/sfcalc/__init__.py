"""Numerical S-functional calculus for paravector operators over Clifford algebras and quaternions."""
from ._kernels import available as available_backends, use as use_backend
from .calculus import (
    CalculusResult,
    cauchy_eval,
    default_contour,
    func_calc,
    laplace_resolvent,
    left_right_agreement,
    lemma_integral,
    product_rule_residual,
    projector_residuals,
    riesz_projector,
)
from .errors import (
    DimensionError,
    DivergenceError,
    DomainError,
    GeometryError,
    InvalidUnitError,
    NonSeparableError,
    NumericalFailure,
    PreconditionError,
    SFCalcError,
    SingularScalarError,
    SpectrumError,
    UnsafeContourError,
)
from .hypercomplex import (
    Multivector,
    Quaternion,
    basis_vector,
    clifford_mul,
    conjugate,
    imaginary_unit,
    paravector,
    paravector_inverse,
    quaternion_unit,
    slice_point,
)
from .operator import (
    ParavectorOperator,
    QuaternionOperator,
    finite_sum_residual,
    new_resolvent_residual,
    operator_from_json,
    pseudo_commutation_residual,
    pseudo_resolvent,
    random_operator,
    random_quaternion_operator,
    rep_matrix,
    resolvent_equation_residuals,
    resolvent_series,
    s_resolvent,
    scalar_compose,
    sc_resolvent,
)
from .slicefun import (
    SliceFunction,
    cauchy_kernel,
    pointwise_product,
    representation_formula_eval,
    stem_residual,
)
from .spectrum import (
    Contour,
    SpectralSphere,
    Spectrum,
    build_contour,
    f_spectrum,
    q_singularity_margin,
    s_spectrum,
)

__version__ = "0.1.0"
