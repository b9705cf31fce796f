"""Static analysis: symbol collection, compatibility queries, type checking."""

from .checker import CheckResult, check_method
from .symbols import (
    ClassInfo,
    FieldInfo,
    MethodSig,
    SymbolTable,
    UnknownFunction,
    VariableInfo,
    candidate_classes,
    candidate_methods,
    collect_scope,
    type_compatible,
    visible_variables,
)
from .types import (
    BOOLEAN,
    EXCEPTION,
    NO_CONSTRAINT,
    RETURN_COMPATIBLE,
    CompatibleWith,
    Exact,
    SignatureFit,
    TypeConstraint,
)

__all__ = [
    "BOOLEAN", "CheckResult", "ClassInfo", "CompatibleWith", "EXCEPTION", "Exact",
    "FieldInfo", "MethodSig", "NO_CONSTRAINT", "RETURN_COMPATIBLE", "SignatureFit",
    "SymbolTable", "TypeConstraint", "UnknownFunction", "VariableInfo",
    "candidate_classes", "candidate_methods", "check_method", "collect_scope",
    "type_compatible", "visible_variables",
]
