"""A small static type checker for one method in its class context.

The checker is deliberately lenient about what it cannot see: it records a
type for every expression it can resolve and an error message for every
violation, so the same pass works as a typer for possibly-wrong guide code
and as the acceptance check for generated candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..syntax.nodes import AstNode, NodeKind as K
from ..syntax.parser import method_body, method_params, method_return_type, modifiers
from .symbols import FieldInfo, MethodSig, SymbolTable
from .types import (
    EXCEPTION_ROOT,
    INTEGRAL,
    NULL,
    PRIMITIVES,
    STRING,
    class_ref,
    class_ref_name,
    element_type,
    is_numeric,
    is_reference,
    promote,
)

STATEMENT_EXPRESSIONS = frozenset({
    K.Assignment, K.MethodInvocation, K.SuperMethodInvocation, K.ClassInstanceCreation,
})
_SWITCHABLE = frozenset({"byte", "short", "char", "int", STRING})


@dataclass
class CheckResult:
    errors: list[str] = field(default_factory=list)
    types: dict[int, Optional[str]] = field(default_factory=dict)
    calls: dict[int, MethodSig] = field(default_factory=dict)
    fields: dict[int, FieldInfo] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def type_of(self, n: AstNode) -> Optional[str]:
        return self.types.get(id(n))


def literal_type(token: str) -> str:
    if token in ("true", "false"):
        return "boolean"
    if token == "null":
        return NULL
    if token.startswith('"'):
        return STRING
    if token.startswith("'"):
        return "char"
    low = token.lower()
    if low.startswith("0x"):
        return "long" if low.endswith("l") else "int"
    if low.endswith("l"):
        return "long"
    if low.endswith("f"):
        return "float"
    if low.endswith("d") or "." in low or "e" in low:
        return "double"
    return "int"


class _Checker:
    def __init__(self, table: SymbolTable, return_type: Optional[str], static: bool, ctor: bool):
        self.t = table
        self.rt = return_type
        self.static = static
        self.ctor = ctor
        self.res = CheckResult()
        self.scopes: list[dict[str, str]] = [{}]
        self.loops = 0
        self.breakables = 0

    # -- helpers -----------------------------------------------------------
    def err(self, msg: str) -> None:
        self.res.errors.append(msg)

    def lookup_local(self, name: str) -> Optional[str]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def declare(self, name: str, type_: str) -> None:
        if self.lookup_local(name) is not None:
            self.err(f"variable {name} is already defined")
        self.scopes[-1][name] = type_

    def known_type(self, t: str) -> bool:
        base = t
        while element_type(base) is not None:
            base = element_type(base)
        if base in PRIMITIVES or base in self.t.classes:
            return True
        return "<" in base

    def assign_ok(self, have: Optional[str], want: Optional[str], what: str) -> None:
        if have is None or want is None:
            return
        if not self.t.assignable(have, want):
            self.err(f"incompatible types in {what}: {have} cannot be converted to {want}")

    # -- statements ----------------------------------------------------------
    def block(self, stmts, new_scope: bool = True) -> bool:
        """Check a statement list; returns whether it can complete normally."""
        if new_scope:
            self.scopes.append({})
        live = True
        for s in stmts:
            if not live:
                self.err("unreachable statement")
            live = self.stmt(s) and live
        if new_scope:
            self.scopes.pop()
        return live

    def cond(self, e: AstNode, what: str) -> None:
        t = self.expr(e)
        if t is not None and t != "boolean":
            self.err(f"{what} condition must be boolean, found {t}")

    def stmt(self, s: AstNode) -> bool:
        k = s.kind
        if k is K.Block:
            return self.block(s.children)
        if k is K.ExpressionStatement:
            e = s.children[0]
            ok_kind = e.kind in STATEMENT_EXPRESSIONS or (
                e.kind in (K.PrefixExpression, K.PostfixExpression) and _op(e) in ("++", "--"))
            if not ok_kind:
                self.err("not a statement")
            self.expr(e)
            return True
        if k is K.VarDeclStatement:
            self.decl(s)
            return True
        if k is K.IfStatement:
            self.cond(s.children[0], "if")
            then = self.stmt(s.children[1])
            if len(s.children) == 3:
                return self.stmt(s.children[2]) or then
            return True
        if k is K.WhileStatement:
            self.cond(s.children[0], "while")
            self.loop_body(s.children[1])
            return not (_is_true(s.children[0]) and not _breaks(s.children[1]))
        if k is K.DoStatement:
            self.loop_body(s.children[0])
            self.cond(s.children[1], "do")
            return not (_is_true(s.children[1]) and not _breaks(s.children[0]))
        if k is K.ForStatement:
            init, cond, update, body = s.children
            self.scopes.append({})
            for e in init.children:
                if e.kind is K.VarDeclExpression:
                    self.decl(e)
                else:
                    self.expr(e)
            if cond.children:
                self.cond(cond.children[0], "for")
            for e in update.children:
                self.expr(e)
            self.loop_body(body)
            self.scopes.pop()
            forever = not cond.children or _is_true(cond.children[0])
            return not (forever and not _breaks(body))
        if k is K.ReturnStatement:
            if s.children:
                t = self.expr(s.children[0])
                if self.rt in (None, "void"):
                    self.err("cannot return a value from a void method")
                else:
                    self.assign_ok(t, self.rt, "return")
            elif self.rt not in (None, "void"):
                self.err("missing return value")
            return False
        if k is K.ThrowStatement:
            t = self.expr(s.children[0])
            if t is not None and not (is_reference(t) and t != NULL and self.t.is_subtype(t, EXCEPTION_ROOT)):
                self.err(f"incompatible types: {t} is not throwable")
            return False
        if k is K.AssertStatement:
            self.cond(s.children[0], "assert")
            return True
        if k is K.BreakStatement:
            if not self.breakables:
                self.err("break outside switch or loop")
            return False
        if k is K.ContinueStatement:
            if not self.loops:
                self.err("continue outside of loop")
            return False
        if k is K.SwitchStatement:
            return self.switch(s)
        if k is K.ConstructorInvocation:
            if not self.ctor:
                self.err("call to this must be first statement in constructor")
            args = [self.expr(a) for a in s.children[0].children]
            if not any(self.t.args_fit(c.param_types, args) for c in self.t.constructors_of(self.t.enclosing_class)):
                self.err("no suitable constructor for this(...)")
            return True
        self.err(f"unsupported statement {k.name}")
        return True

    def loop_body(self, body: AstNode) -> None:
        self.loops += 1
        self.breakables += 1
        self.stmt(body)
        self.loops -= 1
        self.breakables -= 1

    def switch(self, s: AstNode) -> bool:
        sel = self.expr(s.children[0])
        if sel is not None and sel not in _SWITCHABLE:
            self.err(f"cannot switch on {sel}")
        self.breakables += 1
        self.scopes.append({})
        seen_default = False
        last_live = True
        for g in s.children[1:]:
            off = 0
            if g.kind is K.SwitchCase:
                off = 1
                lt = self.value(g.children[0])
                if sel is not None:
                    self.assign_ok(lt, sel, "case label")
            else:
                seen_default = True
            last_live = self.block(g.children[off:], new_scope=False)
        self.scopes.pop()
        self.breakables -= 1
        return True if (not seen_default or last_live or _breaks_switch(s)) else False

    def decl(self, d: AstNode) -> None:
        type_ = next(c.token for c in d.children if c.kind is K.TypeName)
        if not self.known_type(type_):
            self.err(f"cannot find symbol: class {type_}")
        for frag in d.children:
            if frag.kind is not K.VarDeclFragment:
                continue
            name = frag.children[0].token
            if len(frag.children) > 1:
                t = self.expr(frag.children[1])
                self.assign_ok(t, type_, "variable initializer")
            self.declare(name, type_)
            self.res.types[id(frag.children[0])] = type_

    # -- expressions ----------------------------------------------------------
    def expr(self, e: AstNode) -> Optional[str]:
        t = self._expr(e)
        self.res.types[id(e)] = t
        return t

    def name(self, n: AstNode) -> Optional[str]:
        nm = n.token
        t = self.lookup_local(nm)
        if t is not None:
            return t
        f = self.t.lookup_field(self.t.enclosing_class, nm)
        if f is not None:
            if self.static and not f.is_static:
                self.err(f"non-static variable {nm} cannot be referenced from a static context")
            self.res.fields[id(n)] = f
            return f.declared_type
        if nm in self.t.classes:
            return class_ref(nm)
        self.err(f"cannot find symbol: variable {nm}")
        return None

    def value(self, e: AstNode) -> Optional[str]:
        """Type of ``e`` used as a value (class references are rejected)."""
        t = self.expr(e)
        if class_ref_name(t) is not None:
            self.err(f"class {class_ref_name(t)} used as a value")
            return None
        return t

    def field_of(self, owner: str, name: AstNode, static_only: bool) -> Optional[str]:
        if element_type(owner) is not None and name.token == "length":
            return "int"
        f = self.t.lookup_field(owner, name.token)
        if f is None:
            self.err(f"cannot find symbol: field {name.token} in {owner}")
            return None
        if static_only and not f.is_static:
            self.err(f"non-static field {name.token} referenced through class {owner}")
        self.res.fields[id(name)] = f
        return f.declared_type

    def invoke(self, e: AstNode, owner: Optional[str], static_only: bool,
               name: AstNode, args_node: AstNode) -> Optional[str]:
        args = [self.value(a) for a in args_node.children]
        if owner is None:
            return None
        if owner in PRIMITIVES or owner == NULL:
            self.err(f"{owner} cannot be dereferenced")
            return None
        for _, m in self.t.methods_of(owner):
            if m.name != name.token or m.arity != len(args):
                continue
            if static_only and not m.is_static:
                continue
            if self.t.args_fit(m.param_types, args):
                self.res.calls[id(e)] = m
                self.res.types[id(name)] = m.return_type
                return m.return_type
        self.err(f"cannot find symbol: method {name.token}({', '.join(a or '?' for a in args)}) in {owner}")
        return None

    def lvalue(self, e: AstNode) -> Optional[str]:
        if e.kind not in (K.SimpleName, K.FieldAccess, K.ArrayAccess, K.SuperFieldAccess):
            self.err("unexpected type: required variable, found value")
            self.expr(e)
            return None
        t = self.expr(e)
        if e.kind is K.FieldAccess and element_type(self.res.type_of(e.children[0]) or "") is not None \
                and e.children[1].token == "length":
            self.err("cannot assign a value to final variable length")
        if class_ref_name(t) is not None:
            self.err("class used as a variable")
            return None
        return t

    def _expr(self, e: AstNode) -> Optional[str]:
        k = e.kind
        if k is K.Literal:
            return literal_type(e.token)
        if k is K.SimpleName:
            return self.name(e)
        if k is K.ThisExpression:
            if self.static:
                self.err("non-static variable this cannot be referenced from a static context")
            return self.t.enclosing_class
        if k is K.ParenthesizedExpression:
            return self.value(e.children[0])
        if k is K.FieldAccess:
            recv, nm = e.children
            rt = self.expr(recv)
            if rt is None:
                return None
            cls = class_ref_name(rt)
            return self.field_of(cls if cls else rt, nm, cls is not None)
        if k is K.SuperFieldAccess:
            sup = self._super()
            return self.field_of(sup, e.children[0], False) if sup else None
        if k is K.MethodInvocation:
            if len(e.children) == 2:
                nm, args = e.children
                return self.invoke(e, self.t.enclosing_class, self.static, nm, args)
            recv, nm, args = e.children
            rt = self.expr(recv)
            cls = class_ref_name(rt)
            return self.invoke(e, cls if cls else rt, cls is not None, nm, args)
        if k is K.SuperMethodInvocation:
            nm, args = e.children
            sup = self._super()
            return self.invoke(e, sup, False, nm, args)
        if k is K.ClassInstanceCreation:
            tn, args_node = e.children
            args = [self.value(a) for a in args_node.children]
            name = tn.token
            ctors = self.t.constructors_of(name)
            if not ctors:
                self.err(f"cannot find symbol: class {name}")
                return None
            if not any(self.t.args_fit(c.param_types, args) for c in ctors):
                self.err(f"no suitable constructor found for {name}")
            return name
        if k is K.CastExpression:
            tn, inner = e.children
            t = self.value(inner)
            if not self.known_type(tn.token):
                self.err(f"cannot find symbol: class {tn.token}")
            elif t is not None and not self.t.castable(t, tn.token):
                self.err(f"incompatible types: {t} cannot be cast to {tn.token}")
            return tn.token
        if k is K.ArrayAccess:
            arr, idx = e.children
            at = self.value(arr)
            it = self.value(idx)
            if it is not None and it not in INTEGRAL - {"long"}:
                self.err(f"array index must be int, found {it}")
            if at is None:
                return None
            el = element_type(at)
            if el is None:
                self.err(f"array required, but {at} found")
            return el
        if k is K.Assignment:
            lhs, op, rhs = e.children
            lt = self.lvalue(lhs)
            rt = self.value(rhs)
            o = op.token
            if o == "=":
                self.assign_ok(rt, lt, "assignment")
            elif lt is not None and rt is not None:
                if o == "+=" and lt == STRING:
                    pass
                elif o in ("&=", "|=", "^=") and lt == "boolean" and rt == "boolean":
                    pass
                elif not (is_numeric(lt) and is_numeric(rt)):
                    self.err(f"bad operand types for {o}: {lt}, {rt}")
                elif o in ("&=", "|=", "^=") and not (lt in INTEGRAL and rt in INTEGRAL):
                    self.err(f"bad operand types for {o}: {lt}, {rt}")
            return lt
        if k is K.InfixExpression:
            a, op, b = e.children
            return self.infix(op.token, self.value(a), self.value(b))
        if k is K.PrefixExpression:
            op, inner = e.children
            o = op.token
            if o in ("++", "--"):
                t = self.lvalue(inner)
                if t is not None and not is_numeric(t):
                    self.err(f"bad operand type {t} for {o}")
                return t
            t = self.value(inner)
            r, msg = prefix_result(o, t)
            if msg:
                self.err(msg)
            return r
        if k is K.PostfixExpression:
            inner, op = e.children
            t = self.lvalue(inner)
            if t is not None and not is_numeric(t):
                self.err(f"bad operand type {t} for {op.token}")
            return t
        if k is K.ConditionalExpression:
            c, a, b = e.children
            self.cond(c, "conditional")
            ta, tb = self.value(a), self.value(b)
            if ta is None or tb is None:
                return None
            if ta == tb:
                return ta
            if is_numeric(ta) and is_numeric(tb):
                return promote(ta, tb)
            if self.t.assignable(ta, tb):
                return tb
            if self.t.assignable(tb, ta):
                return ta
            self.err(f"incompatible types in conditional: {ta}, {tb}")
            return None
        if k is K.VarDeclExpression:
            self.decl(e)
            return None
        self.err(f"unsupported expression {k.name}")
        return None

    def _super(self) -> Optional[str]:
        if self.static:
            self.err("non-static variable super cannot be referenced from a static context")
        info = self.t.classes.get(self.t.enclosing_class)
        return info.supertype if info else None

    def infix(self, o: str, a: Optional[str], b: Optional[str]) -> Optional[str]:
        t, msg = infix_result(o, a, b, self.t)
        if msg:
            self.err(msg)
        return t


RELATIONAL = frozenset({"<", ">", "<=", ">="})


def infix_result(o: str, a: Optional[str], b: Optional[str],
                 table: SymbolTable) -> tuple[Optional[str], Optional[str]]:
    """Result type of ``a o b`` and an error message (or None)."""
    if o in ("==", "!="):
        if a is not None and b is not None:
            fine = ((is_numeric(a) and is_numeric(b)) or (a == b == "boolean")
                    or (is_reference(a) and is_reference(b) and table.castable(a, b)))
            if not fine:
                return "boolean", f"incomparable types: {a} and {b}"
        return "boolean", None
    if o in ("&&", "||"):
        for t in (a, b):
            if t is not None and t != "boolean":
                return "boolean", f"bad operand type {t} for {o}"
        return "boolean", None
    if a is None or b is None:
        return ("boolean" if o in RELATIONAL else None), None
    if o == "+" and (a == STRING or b == STRING):
        if "void" in (a, b):
            return STRING, "'void' type not allowed here"
        return STRING, None
    if o in ("&", "|", "^"):
        if a == b == "boolean":
            return "boolean", None
        if a in INTEGRAL and b in INTEGRAL:
            return promote(a, b), None
        return None, f"bad operand types for {o}: {a}, {b}"
    if not (is_numeric(a) and is_numeric(b)):
        return ("boolean" if o in RELATIONAL else None), f"bad operand types for {o}: {a}, {b}"
    if o in RELATIONAL:
        return "boolean", None
    return promote(a, b), None


def prefix_result(o: str, t: Optional[str]) -> tuple[Optional[str], Optional[str]]:
    """Result type of a non-incrementing prefix operator applied to ``t``."""
    if t is None:
        return ("boolean" if o == "!" else None), None
    if o == "!":
        return "boolean", (None if t == "boolean" else f"bad operand type {t} for !")
    if o == "~":
        if t not in INTEGRAL:
            return None, f"bad operand type {t} for ~"
        return promote(t), None
    if not is_numeric(t):
        return None, f"bad operand type {t} for unary {o}"
    return promote(t), None


def _op(e: AstNode) -> str:
    return next(c.token for c in e.children if c.kind is K.Operator)


def _is_true(e: AstNode) -> bool:
    return e.kind is K.Literal and e.token == "true"


def _breaks(body: AstNode) -> bool:
    """Whether ``body`` contains a ``break`` that exits the enclosing loop."""
    def go(n: AstNode) -> bool:
        if n.kind is K.BreakStatement:
            return True
        if n.kind in (K.WhileStatement, K.DoStatement, K.ForStatement, K.SwitchStatement):
            return False
        return any(go(c) for c in n.children)
    return go(body)


def _breaks_switch(s: AstNode) -> bool:
    return any(_breaks(g) for g in s.children[1:])


def check_method(method: AstNode, table: SymbolTable) -> CheckResult:
    """Type-check ``method`` against the class context described by ``table``.

    Only the class-level parts of ``table`` are used (fields, classes and the
    enclosing class name); locals and parameters come from ``method`` itself.
    """
    rt = method_return_type(method)
    ctor = method.kind is K.ConstructorDecl
    static = "static" in modifiers(method)
    c = _Checker(table, rt if rt is not None else "void", static, ctor)
    for p in method_params(method):
        ptype = next(x.token for x in p.children if x.kind is K.TypeName)
        pname = next(x for x in p.children if x.kind is K.SimpleName)
        if not c.known_type(ptype):
            c.err(f"cannot find symbol: class {ptype}")
        c.declare(pname.token, ptype)
        c.res.types[id(pname)] = ptype
    body = method_body(method)
    stmts = body.children
    if ctor and stmts and stmts[0].kind is K.ConstructorInvocation:
        c.ctor = True
        first, rest = stmts[0], stmts[1:]
        c.scopes.append({})
        c.stmt(first)
        c.ctor = False
        live = c.block(rest, new_scope=False)
        c.scopes.pop()
    else:
        c.ctor = False
        live = c.block(stmts)
    if live and rt not in (None, "void"):
        c.err("missing return statement")
    return c.res
