"""Exact rewriting and verification for framized knot algebras."""

from .algebras import (
    TAGS,
    AlgebraKind,
    FramedBraidNF,
    SpanEnumeration,
    SpanningExhausted,
    SpanningSet,
    braid_permutation,
    conforms,
    dimension_bound,
    e_element,
    framed_nf,
    parameter_names,
    presentation,
    spanning_enumerate,
    spanning_reduce,
    specialize_t_to_one,
)
from .freealg import Context, Element, Gens, Letter, element_str, word_key, word_str
from .parser import ParseError, parse_element, parse_expression, parse_scalar, parse_word
from .rewrite import (
    CriticalPairReport,
    RewriteRule,
    RuleSystem,
    critical_pairs,
    extend_with_lemma,
    reduce,
    validate_critical_pair_report,
    verify_identity,
)
from .scalar import ParameterField, PoleError, Scalar
from .verify import SUITES, Report, replay_quartic_proof, run_suite, verify_quintic_polynomial

__all__ = [
    "TAGS", "AlgebraKind", "FramedBraidNF", "SpanEnumeration", "SpanningExhausted", "SpanningSet",
    "braid_permutation", "conforms", "dimension_bound", "e_element", "framed_nf", "parameter_names",
    "presentation", "spanning_enumerate", "spanning_reduce", "specialize_t_to_one",
    "Context", "Element", "Gens", "Letter", "element_str", "word_key", "word_str",
    "ParseError", "parse_element", "parse_expression", "parse_scalar", "parse_word",
    "CriticalPairReport", "RewriteRule", "RuleSystem", "critical_pairs", "extend_with_lemma",
    "reduce", "validate_critical_pair_report", "verify_identity",
    "ParameterField", "PoleError", "Scalar",
    "SUITES", "Report", "replay_quartic_proof", "run_suite", "verify_quintic_polynomial",
]
