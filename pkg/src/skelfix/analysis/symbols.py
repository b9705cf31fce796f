"""Program elements usable at a repair site and the queries over them."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..syntax.nodes import AstNode, NodeKind as K
from ..syntax.parser import (
    SourceUnit,
    class_name,
    class_supertype,
    method_body,
    method_name,
    method_params,
    method_return_type,
    modifiers,
)
from .prelude import PRELUDE_CLASSES
from .types import (
    EXCEPTION_ROOT,
    NULL,
    OBJECT,
    PRIMITIVES,
    TypeConstraint,
    class_ref_name,
    element_type,
    is_reference,
    widens,
)


class UnknownFunction(LookupError):
    pass


@dataclass(frozen=True)
class VariableInfo:
    name: str
    declared_type: str
    scope: tuple[int, int]
    kind: str  # local, parameter, field, inherited_field
    is_static: bool = False
    depth: int = 0

    def covers(self, site: int) -> bool:
        return self.scope[0] <= site < self.scope[1]


@dataclass(frozen=True)
class MethodSig:
    name: str
    owner: str
    param_types: tuple[str, ...]
    return_type: str
    is_static: bool = False
    is_private: bool = False

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def __str__(self) -> str:
        return f"{self.return_type} {self.owner}.{self.name}({', '.join(self.param_types)})"


@dataclass(frozen=True)
class FieldInfo:
    name: str
    declared_type: str
    owner: str
    is_static: bool = False
    is_private: bool = False


@dataclass(frozen=True)
class ClassInfo:
    name: str
    supertype: Optional[str]
    fields: tuple[FieldInfo, ...] = ()
    constructors: tuple[MethodSig, ...] = ()
    methods: tuple[MethodSig, ...] = ()
    is_prelude: bool = False


_MEMBER_RX = re.compile(r"^(static\s+)?(?:(\S+)\s+)?(\w+)?\s*(?:\((.*)\))?$")


def _prelude_class(name: str, supertype: Optional[str], members: list[str]) -> ClassInfo:
    fields, ctors, methods = [], [], []
    for spec in members:
        if spec.startswith("("):
            params = tuple(p.strip() for p in spec[1:-1].split(",") if p.strip())
            ctors.append(MethodSig("<init>", name, params, name))
            continue
        static = spec.startswith("static ")
        body = spec[len("static "):] if static else spec
        if "(" in body:
            head, params = body.split("(", 1)
            ret, mname = head.split()
            ptypes = tuple(p.strip() for p in params.rstrip(")").split(",") if p.strip())
            methods.append(MethodSig(mname, name, ptypes, ret, static))
        else:
            ftype, fname = body.split()
            fields.append(FieldInfo(fname, ftype, name, static))
    return ClassInfo(name, supertype, tuple(fields), tuple(ctors), tuple(methods), True)


PRELUDE = {name: _prelude_class(name, sup, members) for name, (sup, members) in PRELUDE_CLASSES.items()}


def class_info_from_decl(cls: AstNode) -> ClassInfo:
    name = class_name(cls)
    fields, ctors, methods = [], [], []
    for m in cls.children:
        mods = modifiers(m) if m.kind in (K.FieldDecl, K.MethodDecl, K.ConstructorDecl) else frozenset()
        static, private = "static" in mods, "private" in mods
        if m.kind is K.FieldDecl:
            ftype = next(c.token for c in m.children if c.kind is K.TypeName)
            for frag in m.children:
                if frag.kind is K.VarDeclFragment:
                    fields.append(FieldInfo(frag.children[0].token, ftype, name, static, private))
        elif m.kind is K.MethodDecl:
            ptypes = tuple(_param_type(p) for p in method_params(m))
            methods.append(MethodSig(method_name(m), name, ptypes, method_return_type(m), static, private))
        elif m.kind is K.ConstructorDecl:
            ptypes = tuple(_param_type(p) for p in method_params(m))
            ctors.append(MethodSig("<init>", name, ptypes, name, False, private))
    if not ctors:
        ctors.append(MethodSig("<init>", name, (), name))
    return ClassInfo(name, class_supertype(cls) or OBJECT, tuple(fields), tuple(ctors), tuple(methods))


def _param_type(p: AstNode) -> str:
    return next(c.token for c in p.children if c.kind is K.TypeName)


def _param_name(p: AstNode) -> str:
    return next(c.token for c in p.children if c.kind is K.SimpleName)


@dataclass(frozen=True)
class SymbolTable:
    """Everything usable inside one function, plus the class hierarchy."""

    variables: tuple[VariableInfo, ...]
    classes: dict[str, ClassInfo] = field(hash=False, compare=False)
    enclosing_class: str = ""
    enclosing_return_type: Optional[str] = None
    is_static_context: bool = False
    is_constructor: bool = False
    function_span: tuple[int, int] = (0, 0)

    # -- hierarchy ----------------------------------------------------------
    def supertypes(self, t: str) -> list[str]:
        """``t`` followed by its ancestors, nearest first."""
        if element_type(t) is not None:
            return [t, OBJECT]
        chain, seen = [], set()
        cur: Optional[str] = t
        while cur is not None and cur not in seen:
            seen.add(cur)
            chain.append(cur)
            info = self.classes.get(cur)
            if info is None:
                if cur != OBJECT and is_reference(cur):
                    chain.append(OBJECT)
                break
            cur = info.supertype
        return chain

    def is_subtype(self, have: str, want: str) -> bool:
        return want in self.supertypes(have)

    def assignable(self, have: Optional[str], want: Optional[str]) -> bool:
        if have is None or want is None:
            return False
        if have == want:
            return True
        if have in PRIMITIVES or want in PRIMITIVES:
            return widens(have, want)
        if have == NULL:
            return is_reference(want)
        if not is_reference(have) or not is_reference(want):
            return False
        return self.is_subtype(have, want)

    def castable(self, have: str, want: str) -> bool:
        if have in PRIMITIVES or want in PRIMITIVES:
            return (have in PRIMITIVES and want in PRIMITIVES
                    and (have == want or (have != "boolean" and want != "boolean")))
        return self.assignable(have, want) or self.assignable(want, have)

    # -- members --------------------------------------------------------------
    def fields_of(self, t: str) -> list[FieldInfo]:
        out = []
        for owner in self.supertypes(t):
            info = self.classes.get(owner)
            if info is None:
                continue
            for f in info.fields:
                if f.is_private and owner != t and owner != self.enclosing_class:
                    continue
                out.append(f)
        return out

    def lookup_field(self, t: str, name: str) -> Optional[FieldInfo]:
        for f in self.fields_of(t):
            if f.name == name:
                return f
        return None

    def methods_of(self, t: str) -> list[tuple[int, MethodSig]]:
        """``(proximity, sig)`` for every method callable on ``t``."""
        out = []
        for prox, owner in enumerate(self.supertypes(t)):
            info = self.classes.get(owner)
            if info is None:
                continue
            for m in info.methods:
                if m.is_private and owner != self.enclosing_class:
                    continue
                out.append((prox, m))
        return out

    def constructors_of(self, name: str) -> tuple[MethodSig, ...]:
        info = self.classes.get(name)
        return info.constructors if info else ()

    def args_fit(self, params: Sequence[str], args: Sequence[Optional[str]]) -> bool:
        if len(params) != len(args):
            return False
        return all(a is None or self.assignable(a, p) for p, a in zip(params, args))

    # -- indices ----------------------------------------------------------------
    def variables_named(self, name: str) -> list[VariableInfo]:
        return [v for v in self.variables if v.name == name]

    def variables_of_type(self, t: str) -> list[VariableInfo]:
        return [v for v in self.variables if v.declared_type == t]

    def to_json(self) -> dict:
        return {
            "enclosing_class": self.enclosing_class,
            "enclosing_return_type": self.enclosing_return_type,
            "is_static_context": self.is_static_context,
            "variables": [
                {"name": v.name, "type": v.declared_type, "scope": list(v.scope),
                 "kind": v.kind, "static": v.is_static}
                for v in self.variables
            ],
            "classes": {
                name: {
                    "supertype": c.supertype,
                    "prelude": c.is_prelude,
                    "fields": [f"{f.declared_type} {f.name}" for f in c.fields],
                    "constructors": [f"({', '.join(m.param_types)})" for m in c.constructors],
                    "methods": [str(m) for m in c.methods],
                }
                for name, c in sorted(self.classes.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def class_table(units: Iterable[SourceUnit]) -> dict[str, ClassInfo]:
    classes = dict(PRELUDE)
    for unit in units:
        for cls in unit.classes:
            info = class_info_from_decl(cls)
            classes[info.name] = info
    return classes


def _collect_locals(body: AstNode) -> list[VariableInfo]:
    out: list[VariableInfo] = []

    def declare(decl: AstNode, start: int, end: int, depth: int) -> None:
        type_ = next(c.token for c in decl.children if c.kind is K.TypeName)
        for frag in decl.children:
            if frag.kind is K.VarDeclFragment:
                out.append(VariableInfo(frag.children[0].token, type_, (start, end), "local", False, depth))

    def stmts(items: Iterable[AstNode], scope_end: int, depth: int) -> None:
        for s in items:
            stmt(s, scope_end, depth)

    def stmt(s: AstNode, scope_end: int, depth: int) -> None:
        k = s.kind
        if k is K.VarDeclStatement:
            declare(s, s.span[1], scope_end, depth)
        elif k is K.Block:
            stmts(s.children, s.span[1], depth + 1)
        elif k is K.IfStatement:
            for b in s.children[1:]:
                stmts(b.children, b.span[1], depth + 1)
        elif k is K.WhileStatement:
            stmts(s.children[1].children, s.children[1].span[1], depth + 1)
        elif k is K.DoStatement:
            stmts(s.children[0].children, s.children[0].span[1], depth + 1)
        elif k is K.ForStatement:
            init = s.children[0]
            for d in init.children:
                if d.kind is K.VarDeclExpression:
                    declare(d, d.span[1], s.span[1], depth + 1)
            body = s.children[3]
            stmts(body.children, body.span[1], depth + 2)
        elif k is K.SwitchStatement:
            for g in s.children[1:]:
                off = 1 if g.kind is K.SwitchCase else 0
                stmts(g.children[off:], s.span[1], depth + 1)

    stmts(body.children, body.span[1], 1)
    return out


def collect_scope(unit: SourceUnit, repair_function: str,
                  extra_units: Sequence[SourceUnit] = ()) -> SymbolTable:
    try:
        cls, m = unit.find_method(repair_function)
    except KeyError:
        raise UnknownFunction(repair_function) from None
    classes = class_table([*extra_units, unit])
    owner = class_name(cls)
    body = method_body(m)
    mods = modifiers(m)
    variables: list[VariableInfo] = []
    variables.extend(_collect_locals(body))
    for p in method_params(m):
        variables.append(VariableInfo(_param_name(p), _param_type(p), body.span, "parameter"))
    table = SymbolTable((), classes, owner)
    for f in table.fields_of(owner):
        kind = "field" if f.owner == owner else "inherited_field"
        variables.append(VariableInfo(f.name, f.declared_type, cls.span, kind, f.is_static))
    rt = method_return_type(m)
    return SymbolTable(
        tuple(variables), classes, owner,
        enclosing_return_type=rt if rt is not None else "void",
        is_static_context="static" in mods,
        is_constructor=m.kind is K.ConstructorDecl,
        function_span=m.span,
    )


# --- queries -------------------------------------------------------------------

def type_compatible(have: Optional[str], want: TypeConstraint, table: SymbolTable) -> bool:
    k = want.kind
    if k == "none":
        return True
    if have is None:
        return False
    if k == "boolean":
        return have == "boolean"
    if k == "exception":
        return is_reference(have) and have != NULL and table.is_subtype(have, EXCEPTION_ROOT)
    if k == "return":
        rt = table.enclosing_return_type
        return rt not in (None, "void") and table.assignable(have, rt)
    if k == "exact":
        return have == want.type_name
    if k == "compatible":
        return table.assignable(have, want.type_name)
    if k == "signature":
        return want.returns is None or type_compatible(have, want.returns, table)
    raise ValueError(f"unknown constraint kind {k}")


_TIER = {"local": 0, "parameter": 1, "field": 2, "inherited_field": 2}


def visible_variables(site: int, want: TypeConstraint, table: SymbolTable) -> list[VariableInfo]:
    """Variables in scope at ``site`` whose type satisfies ``want``.

    Locals come first (innermost nesting first), then parameters, then
    fields; names are alphabetical within each tier and shadowed names are
    dropped.
    """
    found = []
    for v in table.variables:
        if not v.covers(site):
            continue
        if table.is_static_context and v.kind != "local" and v.kind != "parameter" and not v.is_static:
            continue
        if type_compatible(v.declared_type, want, table):
            found.append(v)
    found.sort(key=lambda v: (_TIER[v.kind], -v.depth if v.kind == "local" else 0, v.name))
    seen, out = set(), []
    for v in found:
        if v.name not in seen:
            seen.add(v.name)
            out.append(v)
    return out


def candidate_methods(receiver_type: Optional[str], arity: int, want_return: TypeConstraint,
                      table: SymbolTable, arg_types: Optional[Sequence[Optional[str]]] = None,
                      static_only: bool = False) -> list[MethodSig]:
    """Methods callable on ``receiver_type`` with ``arity`` arguments.

    ``receiver_type`` may be a class reference (``class:Math``), which admits
    static methods only; ``None`` means an unqualified call inside the
    enclosing class. Ordered by owner proximity, then name.
    """
    static_ref = class_ref_name(receiver_type)
    if static_ref is not None:
        owner, static_only = static_ref, True
    elif receiver_type is None:
        owner, static_only = table.enclosing_class, static_only or table.is_static_context
    else:
        owner = receiver_type
    if owner in PRIMITIVES or owner == NULL:
        return []
    ret = want_return.returns if want_return.kind == "signature" else want_return
    hits = []
    for prox, m in table.methods_of(owner):
        if m.arity != arity or (static_only and not m.is_static):
            continue
        if m.return_type == "void":
            if ret is not None and ret.kind != "none":
                continue
        elif ret is not None and not type_compatible(m.return_type, ret, table):
            continue
        if arg_types is not None and not table.args_fit(m.param_types, arg_types):
            continue
        hits.append((prox, m.name, m))
    hits.sort(key=lambda h: (h[0], h[1]))
    return [m for _, _, m in hits]


def candidate_classes(want: TypeConstraint, arity: int, table: SymbolTable,
                      arg_types: Optional[Sequence[Optional[str]]] = None) -> list[ClassInfo]:
    """Classes assignable to ``want`` with a constructor taking ``arity`` arguments."""
    ret = want.returns if want.kind == "signature" else want
    hits = []
    for name, info in table.classes.items():
        ctors = [c for c in info.constructors if c.arity == arity
                 and (arg_types is None or table.args_fit(c.param_types, arg_types))]
        if not ctors:
            continue
        if ret is not None and not type_compatible(name, ret, table):
            continue
        hits.append(info)
    hits.sort(key=lambda c: (c.is_prelude, c.name))
    return hits
