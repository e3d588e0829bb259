"""Exact algebra on finitely supported elements of infinite tensor products of matrix algebras."""

from .derivations import (
    BasisExpansion,
    GeneratorDerivation,
    Inner,
    ShiftFamily,
    SparseSum,
    SparseSystem,
    apply,
    build_yk,
    build_z,
    derivation_commutator,
    equal_on_truncation,
    expand_basis,
    inner_solve_local,
    leibniz_check,
    members_intersecting,
    peel_derivation,
)
from .endomorphisms import (
    ConjugatorSeq,
    UnitalEndo,
    apply_endo,
    example1_sequence,
    example2_closed_form,
    example2_sequence,
    factorize,
    integrability_profile,
    intertwiner_basis,
    recompose,
    skolem_noether,
    validate_endo,
)
from .errors import (
    LocmatError,
    FieldMismatch,
    ShapeMismatch,
    IndexOutOfRange,
    NotInvertible,
    NotInCentralizer,
    NotIdempotent,
    CharacteristicDividesSize,
    ShiftOutOfRange,
    ShapeMismatchAtShiftedSite,
    SupportError,
    WrongSupport,
    NotADerivation,
    NotSparse,
    InvalidEndomorphism,
    InvalidRestriction,
    SupportExceedsSource,
    NoConjugatorFound,
    NotFinitaryResult,
    ParseError,
)
from .field import GF, QQ, FieldSpec
from .minf import (
    AffineFamily,
    FinitaryMatrix,
    PatternMatrix,
    ad_apply,
    build_af,
    build_df,
    build_yk_minf,
    build_z_minf,
    conjugate_by_af,
    pattern_commutator,
    pattern_equal,
    pattern_mul,
    to_dense_window,
)
from .parser import SessionConfig, eval_ast, parse_and_eval, parse_element, parse_pattern
from .tensor import (
    Element,
    SiteShape,
    canonicalize,
    centralizer_check,
    commutator,
    conjugate,
    dense_expand,
    factor_site,
    from_dense,
    invert,
    normalized_trace,
    peirce_project,
    shift,
    solve_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "AffineFamily",
    "BasisExpansion",
    "CharacteristicDividesSize",
    "ConjugatorSeq",
    "Element",
    "FieldMismatch",
    "FieldSpec",
    "FinitaryMatrix",
    "GF",
    "GeneratorDerivation",
    "IndexOutOfRange",
    "Inner",
    "InvalidEndomorphism",
    "InvalidRestriction",
    "LocmatError",
    "NoConjugatorFound",
    "NotADerivation",
    "NotFinitaryResult",
    "NotIdempotent",
    "NotInCentralizer",
    "NotInvertible",
    "NotSparse",
    "ParseError",
    "PatternMatrix",
    "QQ",
    "SessionConfig",
    "ShapeMismatch",
    "ShapeMismatchAtShiftedSite",
    "ShiftFamily",
    "ShiftOutOfRange",
    "SiteShape",
    "SparseSum",
    "SparseSystem",
    "SupportError",
    "SupportExceedsSource",
    "UnitalEndo",
    "WrongSupport",
    "ad_apply",
    "apply",
    "apply_endo",
    "build_af",
    "build_df",
    "build_yk",
    "build_yk_minf",
    "build_z",
    "build_z_minf",
    "canonicalize",
    "centralizer_check",
    "commutator",
    "conjugate",
    "conjugate_by_af",
    "dense_expand",
    "derivation_commutator",
    "equal_on_truncation",
    "eval_ast",
    "example1_sequence",
    "example2_closed_form",
    "example2_sequence",
    "expand_basis",
    "factor_site",
    "factorize",
    "from_dense",
    "inner_solve_local",
    "integrability_profile",
    "intertwiner_basis",
    "invert",
    "leibniz_check",
    "members_intersecting",
    "normalized_trace",
    "parse_and_eval",
    "parse_element",
    "parse_pattern",
    "pattern_commutator",
    "pattern_equal",
    "pattern_mul",
    "peel_derivation",
    "peirce_project",
    "recompose",
    "shift",
    "skolem_noether",
    "solve_kernel",
    "to_dense_window",
    "validate_endo",
]
