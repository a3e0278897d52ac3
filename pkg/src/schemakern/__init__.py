"""schemakern: a small kernel for recursively specified sequent-calculus proofs."""

from .calculus import Proof, Report, Sequent, check_derivation, check_inference
from .evaluation import EvaluationError, UnfoldReport, unfold, verify_unfolded
from .herbrand import (
    HerbrandError,
    HerbrandSystem,
    extract_herbrand_system,
    normalize_witnesses,
    verify_herbrand_disjunction,
)
from .rewrite import DEFAULT_FUEL, E_PA, EqTheory, RewriteRule, normalize
from .schema import Component, PSchema, SchemaReport, sub_schemata, validate_schema
from .syntax import PskDocument, parse, parse_strict, print_document
from .translate import (
    TranslationError,
    eliminate_e_rule,
    from_pra,
    generalize,
    mvlkie_to_schema,
    schema_to_mvlkie,
    to_pra,
)

__version__ = "0.1.0"

__all__ = [
    "Component", "DEFAULT_FUEL", "E_PA", "EqTheory", "EvaluationError", "HerbrandError", "HerbrandSystem",
    "PSchema", "Proof", "PskDocument", "Report", "RewriteRule", "SchemaReport", "Sequent", "TranslationError",
    "UnfoldReport", "check_derivation", "check_inference", "eliminate_e_rule", "extract_herbrand_system",
    "from_pra", "generalize", "mvlkie_to_schema", "normalize", "normalize_witnesses", "parse", "parse_strict",
    "print_document", "schema_to_mvlkie", "sub_schemata", "to_pra", "unfold", "validate_schema",
    "verify_herbrand_disjunction", "verify_unfolded",
]
