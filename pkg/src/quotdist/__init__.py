"""Exact finite-field harness for quotient sets of quadratic distance sets."""

__version__ = "0.1.0"

from .cyclotomic import Cyclotomic
from .errors import (
    DimensionMismatchError,
    DomainError,
    InternalConsistencyError,
    InvalidFormError,
    InvalidParameterError,
    ResourceError,
)
from .field import FieldElement, FiniteField, field_of_order, gauss_sum, make_field, parse_field
from .forms import QuadraticForm, StandardForm, dual, evaluate, parse_form, standardize
from .fourier import (
    PointSet,
    RatioSpec,
    closed_H_table,
    closed_sphere0_table,
    closed_VQr_table,
    diagonal_variety,
    fourier_bruteforce,
    fourier_closed_H,
    fourier_closed_sphere0,
    fourier_closed_VQr,
    fourier_set_table,
    sphere,
)
from .counting import (
    CountReport,
    distance_histogram,
    distance_set,
    quotient_set,
    verify_counting_lemma,
    w_of_r,
)
from .harness import (
    BoundReport,
    build_sharpness_even,
    build_sharpness_odd_ii,
    build_sharpness_odd_iii,
    bounds_sweep,
    case_rhs,
    quotient_corollary_check,
    theorem_check,
    w0_bound_check,
)
