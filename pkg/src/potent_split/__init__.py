"""Split nonderogatory matrices over GF(p^m), p odd, as E + V with E^p = E and V^3 = 0."""

from .canonical import (
    AlternatingBasis,
    CompanionSpec,
    SimilarityWitness,
    alternating_basis,
    companion_form,
    negate_companion,
    shifted_companion,
)
from .decomp import (
    CERTIFICATE_SCHEMA,
    Decomposition,
    Route,
    check_trace_condition,
    decompose,
    decompose_companion,
    main_lemma,
    trailing_p_potent_completion,
)
from .errors import (
    PotentSplitError,
    FieldMismatch,
    DivisionByZero,
    InvalidField,
    DimensionMismatch,
    SingularMatrix,
    NotNonderogatory,
    PreconditionViolated,
    CompletionFailed,
    NoViableA,
    TripotencyFailed,
    TraceNotPrimeSubfield,
    Unverifiable,
    SearchSpaceTooLarge,
    ParseError,
)
from .field import FieldElement, FieldSpec
from .matf import Matrix, Polynomial, char_poly, is_nonderogatory, min_poly, nilpotency_index
from .oracle import enumerate_p_potents, exhaustive_sweep, oracle_decompose, sharpness_scan

__version__ = "0.1.0"
