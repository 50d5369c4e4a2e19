"""Fragment-based case models: validation, compilation to colored Petri
nets, and interactive case enactment."""

from .compiler import CompileError, CompileReport, compile_model, export_dot, model_hash
from .engine import (
    CaseState,
    CaseTerminated,
    Engine,
    SchemaError,
    StaleOption,
    StepOption,
    VersionMismatch,
)
from .explorer import check_invariants, explore
from .model import CaseModel, Violation
from .parsing import MissingSection, ParseError, parse_case_model, serialize_case_model
from .preprocess import augment_goal_guards, supporting_states
from .validation import (
    validate_all,
    validate_case_model,
    validate_domain_model,
    validate_fragments,
)

__all__ = [
    "CaseModel",
    "CaseState",
    "CaseTerminated",
    "CompileError",
    "CompileReport",
    "Engine",
    "MissingSection",
    "ParseError",
    "SchemaError",
    "StaleOption",
    "StepOption",
    "VersionMismatch",
    "Violation",
    "augment_goal_guards",
    "check_invariants",
    "compile_model",
    "explore",
    "export_dot",
    "model_hash",
    "parse_case_model",
    "serialize_case_model",
    "supporting_states",
    "validate_all",
    "validate_case_model",
    "validate_domain_model",
    "validate_fragments",
]

__version__ = "0.1.0"
