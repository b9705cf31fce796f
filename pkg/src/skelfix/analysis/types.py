"""Type names, numeric widening and hole constraints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

PRIMITIVES = frozenset({"boolean", "byte", "short", "char", "int", "long", "float", "double"})
NUMERIC = ("byte", "short", "char", "int", "long", "float", "double")
INTEGRAL = frozenset({"byte", "short", "char", "int", "long"})
NULL = "null"
OBJECT = "Object"
STRING = "String"
EXCEPTION_ROOT = "Throwable"
CLASS_REF = "class:"

_WIDENS_TO = {
    "byte": {"byte", "short", "int", "long", "float", "double"},
    "short": {"short", "int", "long", "float", "double"},
    "char": {"char", "int", "long", "float", "double"},
    "int": {"int", "long", "float", "double"},
    "long": {"long", "float", "double"},
    "float": {"float", "double"},
    "double": {"double"},
}


def is_numeric(t: Optional[str]) -> bool:
    return t in _WIDENS_TO


def is_reference(t: Optional[str]) -> bool:
    return t is not None and t not in PRIMITIVES and t != "void" and not t.startswith(CLASS_REF)


def widens(have: str, want: str) -> bool:
    return want in _WIDENS_TO.get(have, ())


def promote(*types: str) -> str:
    """Binary numeric promotion."""
    for t in ("double", "float", "long"):
        if t in types:
            return t
    return "int"


def element_type(t: str) -> Optional[str]:
    return t[:-2] if t.endswith("[]") else None


def class_ref(name: str) -> str:
    return CLASS_REF + name


def class_ref_name(t: Optional[str]) -> Optional[str]:
    if t is not None and t.startswith(CLASS_REF):
        return t[len(CLASS_REF):]
    return None


@dataclass(frozen=True)
class TypeConstraint:
    """What a hole's filling must satisfy.

    ``kind`` is one of exact, compatible, boolean, exception, return, none,
    signature. Signature constraints carry the argument types of the original
    call (``None`` where unknown) and a constraint on the return type.
    """

    kind: str
    type_name: Optional[str] = None
    arg_types: tuple[Optional[str], ...] = ()
    returns: Optional["TypeConstraint"] = None

    def label(self) -> str:
        k = self.kind
        if k == "exact":
            return self.type_name
        if k == "compatible":
            return "num" if self.type_name == "double" else self.type_name
        if k == "boolean":
            return "boolean"
        if k == "exception":
            return "Exception"
        if k == "return":
            return "return"
        if k == "signature":
            args = ",".join(t for t in self.arg_types if t is not None)
            ret = self.returns.label() if self.returns and self.returns.kind != "none" else "?"
            return f"({args})->{ret}"
        return "?"

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.type_name is not None:
            out["type"] = self.type_name
        if self.kind == "signature":
            out["arg_types"] = list(self.arg_types)
            out["returns"] = self.returns.to_json() if self.returns else None
        return out


def Exact(t: str) -> TypeConstraint:
    return TypeConstraint("exact", t)


def CompatibleWith(t: str) -> TypeConstraint:
    return TypeConstraint("compatible", t)


def SignatureFit(arg_types, returns: TypeConstraint) -> TypeConstraint:
    return TypeConstraint("signature", None, tuple(arg_types), returns)


BOOLEAN = TypeConstraint("boolean")
EXCEPTION = TypeConstraint("exception")
RETURN_COMPATIBLE = TypeConstraint("return")
NO_CONSTRAINT = TypeConstraint("none")
NUMERIC_CONSTRAINT = CompatibleWith("double")


def category(t: Optional[str]) -> TypeConstraint:
    """Loosest constraint admitting values of the same sort as ``t``."""
    if t is None or t == NULL:
        return NO_CONSTRAINT
    if t == "boolean":
        return BOOLEAN
    if is_numeric(t):
        return NUMERIC_CONSTRAINT
    return CompatibleWith(t)
