"""Quantum states and oracles emulated by ensembles of classical Gaussian random fields."""

__version__ = "0.1.0"

from .errors import ConsumedEnsembleError, DimensionError, ParseError, PcsftError, ValidationError
from .hilbert_core import (
    RealPhaseVector,
    apply_symplectic,
    commutes_with_J,
    complex_operator_of,
    complexify,
    real_operator_of,
    realify,
)
from .gaussian_fields import (
    FieldEnsemble,
    GaussianFieldSpec,
    empirical_covariance_c,
    empirical_dispersion,
    empirical_mean,
    empirical_pseudo_covariance,
    field_scaling,
    mixed_state_spec,
    pure_state_spec,
    sample_fields,
    wick_quadratic,
    wick_quartic,
)
from .prequantum_variables import (
    PrequantumVariable,
    classical_average_exact,
    classical_average_mc,
    evaluate,
    finite_difference_hessian,
    hessian_at_zero,
)
from .dequantizer import (
    DensityOperator,
    Observable,
    asymptotic_gap,
    quantum_average,
    remainder_scaling_exponent,
    to_density_operator,
    to_observable,
)
from .quantum_register import (
    BooleanFunction,
    OracleUnitary,
    PureState,
    born_probabilities,
    deutsch_jozsa_demo,
    hadamard_transform,
    measure_and_consume,
    oracle_unitary,
    parallel_evaluation_state,
    pushforward_samples,
    pushforward_spec,
    uniform_superposition,
)
