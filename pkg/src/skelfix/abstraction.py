"""Patch skeletons: introduced statements with program-specific tokens as typed holes.

Each Update/Insert statement is walked top-down. Variable names, method
names, class names and operators become holes constrained by the position
they occupy (a condition must stay boolean, a thrown value must stay
throwable, ...). Keywords, type names in declarations, literals and names
declared by the statement itself stay verbatim.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .analysis.checker import CheckResult
from .analysis.prelude import PRELUDE_CLASSES
from .analysis.symbols import SymbolTable, type_compatible
from .analysis.types import (
    BOOLEAN,
    EXCEPTION,
    NO_CONSTRAINT,
    NUMERIC_CONSTRAINT,
    RETURN_COMPATIBLE,
    NULL,
    OBJECT,
    CompatibleWith,
    Exact,
    SignatureFit,
    TypeConstraint,
    category,
    class_ref_name,
    element_type,
    is_reference,
)
from .differencing import Modification
from .syntax.lexer import lex_tokens
from .syntax.nodes import AstNode, NodeKind as K, is_statement, replace_at, statement_slots
from .syntax.printer import print_with


class NotAbstractable(ValueError):
    pass


class HoleKind(enum.Enum):
    VAR = "VAR"
    CNAME = "CNAME"
    FNAME = "FNAME"
    INFIX_OP = "INFIX_OP"
    PREFIX_OP = "PREFIX_OP"
    POSTFIX_OP = "POSTFIX_OP"

    @property
    def is_operator(self) -> bool:
        return self.name.endswith("_OP")


@dataclass(frozen=True)
class Hole:
    """One abstracted token.

    ``path`` locates the leaf inside the skeleton root. For member holes
    (method names and fields reached through a receiver) ``qualifier`` says
    how the owner is reached: ``none`` (unqualified), ``expr`` (a receiver
    expression of type ``owner``), ``class`` (static access through a class
    name) or ``super``.
    """

    hole_kind: HoleKind
    constraint: TypeConstraint
    origin_token: str
    hole_id: int
    path: tuple[int, ...]
    origin_type: Optional[str] = None
    qualifier: str = "none"
    owner: Optional[str] = None
    member: bool = False
    operand_types: tuple[Optional[str], ...] = ()
    operand_is_variable: bool = False
    arity: int = 0

    def label(self) -> str:
        if self.hole_kind.is_operator:
            return f"⟨{self.hole_kind.value}⟩"
        return f"⟨{self.hole_kind.value}:{self.constraint.label()}⟩"

    def to_json(self) -> dict:
        out = {
            "hole_id": self.hole_id,
            "hole_kind": self.hole_kind.value,
            "constraint": self.constraint.to_json(),
            "origin_token": self.origin_token,
            "path": list(self.path),
        }
        if self.origin_type is not None:
            out["origin_type"] = self.origin_type
        if self.hole_kind in (HoleKind.FNAME, HoleKind.CNAME) or self.member:
            out["qualifier"] = self.qualifier
            out["owner"] = self.owner
        return out


@dataclass(frozen=True)
class Skeleton:
    root: AstNode
    source_modification: Optional[Modification]
    holes: tuple[Hole, ...] = ()
    declared: frozenset[str] = field(default=frozenset())

    def fill(self, tokens: Sequence[str]) -> AstNode:
        """Instantiate every hole with the corresponding token."""
        if len(tokens) != len(self.holes):
            raise ValueError("one token per hole required")
        out = self.root
        for h, tok in zip(self.holes, tokens):
            if tok != h.origin_token:
                out = replace_at(out, h.path, out.at(h.path).with_token(tok))
        return out

    def identity(self) -> tuple[str, ...]:
        return tuple(h.origin_token for h in self.holes)

    def token_template(self) -> tuple[list[str], list[int]]:
        """Tokens of the origin statement and the token index of each hole."""
        marks = {h.path: f"__hole{h.hole_id}__" for h in self.holes}
        # padded so that a mark never fuses with a neighbouring token
        text = print_with(self.root, lambda n, p: f" {marks[p]} " if p in marks else None)
        toks = lex_tokens(text)
        where = {m: i for i, m in enumerate(toks) if m.startswith("__hole")}
        positions = [where[marks[h.path]] for h in self.holes]
        for h, i in zip(self.holes, positions):
            toks[i] = h.origin_token
        return toks, positions

    def to_json(self) -> dict:
        by_path = {h.path: h.hole_id for h in self.holes}

        def enc(n: AstNode, path: tuple) -> dict:
            d: dict = {"kind": n.kind.value}
            if path in by_path:
                d["hole"] = by_path[path]
            elif n.token is not None:
                d["token"] = n.token
            if n.children:
                d["children"] = [enc(c, path + (i,)) for i, c in enumerate(n.children)]
            return d

        return {
            "root": enc(self.root, ()),
            "holes": [h.to_json() for h in self.holes],
            "rendered": render_skeleton(self),
        }


@dataclass(frozen=True)
class Typer:
    """Types of the guide code, as computed by the checker."""

    result: CheckResult
    table: SymbolTable

    def type_of(self, n: AstNode) -> Optional[str]:
        return self.result.types.get(id(n))


_PLAIN_NAME = re.compile(r"^[A-Za-z_$][\w$]*$")
_LVALUE_KINDS = (K.SimpleName, K.FieldAccess, K.ArrayAccess, K.SuperFieldAccess)
_LOGICAL = frozenset({"&&", "||"})
_NUMERIC_OPS = frozenset({"-", "*", "/", "%", "<", ">", "<=", ">="})


def _declared_names(stmt: AstNode) -> frozenset[str]:
    names = set()
    for n in stmt.walk():
        if n.kind in (K.VarDeclStatement, K.VarDeclExpression):
            for frag in n.children:
                if frag.kind is K.VarDeclFragment:
                    names.add(frag.children[0].token)
    return frozenset(names)


class _Abstractor:
    def __init__(self, typer: Optional[Typer], declared: frozenset[str], header_only: bool = False):
        self.typer = typer
        self.table = typer.table if typer else None
        self.declared = declared
        self.header_only = header_only
        self.holes: list[Hole] = []
        self.counters = 0

    # -- helpers -------------------------------------------------------------
    def type_of(self, n: AstNode) -> Optional[str]:
        return self.typer.type_of(n) if self.typer else None

    def fit(self, c: TypeConstraint, origin: Optional[str]) -> TypeConstraint:
        """Loosen ``c`` when the guide's own element would violate it."""
        if self.table is None or origin is None or class_ref_name(origin) is not None:
            return c
        if c.kind == "signature":
            ret = c.returns or NO_CONSTRAINT
            return SignatureFit(c.arg_types, self.fit(ret, origin))
        if origin == "void" or type_compatible(origin, c, self.table):
            return c
        return category(origin)

    def is_class_name(self, tok: str, t: Optional[str]) -> bool:
        if class_ref_name(t) is not None:
            return True
        if t is None:
            classes = self.table.classes if self.table else PRELUDE_CLASSES
            return tok in classes and tok not in self.declared
        return False

    def hole(self, kind: HoleKind, constraint: TypeConstraint, leaf: AstNode, path, **kw) -> None:
        self.holes.append(Hole(kind, constraint, leaf.token, len(self.holes), path, **kw))

    def receiver_constraint(self, rt: Optional[str]) -> TypeConstraint:
        if rt is not None and is_reference(rt):
            return CompatibleWith(rt)
        return NO_CONSTRAINT

    # -- statements ------------------------------------------------------------
    def stmt(self, n: AstNode, path: tuple) -> None:
        k, ch = n.kind, n.children
        if k is K.AssertStatement:
            self.expr(ch[0], path + (0,), BOOLEAN)
        elif k in (K.IfStatement, K.WhileStatement):
            self.expr(ch[0], path + (0,), BOOLEAN)
        elif k is K.DoStatement:
            self.expr(ch[1], path + (1,), BOOLEAN)
        elif k is K.ForStatement:
            init, cond, update = ch[0], ch[1], ch[2]
            for i, e in enumerate(init.children):
                self.expr(e, path + (0, i), NO_CONSTRAINT)
            if cond.children:
                self.expr(cond.children[0], path + (1, 0), BOOLEAN)
            for i, e in enumerate(update.children):
                self.expr(e, path + (2, i), NO_CONSTRAINT)
        elif k is K.ReturnStatement:
            if ch:
                self.expr(ch[0], path + (0,), RETURN_COMPATIBLE)
        elif k is K.ThrowStatement:
            self.expr(ch[0], path + (0,), EXCEPTION)
        elif k is K.VarDeclStatement:
            self.decl(n, path)
        elif k is K.ExpressionStatement:
            self.expr(ch[0], path + (0,), NO_CONSTRAINT)
        elif k is K.SwitchStatement:
            st = self.type_of(ch[0])
            sel = CompatibleWith(st) if st else NO_CONSTRAINT
            self.expr(ch[0], path + (0,), sel)
            for gi, g in enumerate(ch[1:], start=1):
                if g.kind is K.SwitchCase:
                    self.expr(g.children[0], path + (gi, 0), sel)
        elif k is K.ConstructorInvocation:
            args = ch[0].children
            params = self.ctor_params(self.table.enclosing_class if self.table else None, args)
            self.args(args, path + (0,), params)
        if not self.header_only:
            for p, off in statement_slots(n):
                container = n.at(p)
                for i, s in enumerate(container.children[off:]):
                    self.stmt(s, path + p + (off + i,))

    def decl(self, n: AstNode, path: tuple) -> None:
        type_ = next(c.token for c in n.children if c.kind is K.TypeName)
        for i, frag in enumerate(n.children):
            if frag.kind is K.VarDeclFragment:
                self.fragment(frag, path + (i,), CompatibleWith(type_))

    def fragment(self, frag: AstNode, path: tuple, expected: TypeConstraint) -> None:
        if len(frag.children) > 1:
            self.expr(frag.children[1], path + (1,), expected)

    def ctor_params(self, cls: Optional[str], args: Sequence[AstNode]) -> Optional[tuple[str, ...]]:
        if self.table is None or cls is None:
            return None
        arg_types = [self.type_of(a) for a in args]
        for c in self.table.constructors_of(cls):
            if self.table.args_fit(c.param_types, arg_types):
                return c.param_types
        return None

    def args(self, args: Sequence[AstNode], path: tuple, params: Optional[Sequence[str]]) -> None:
        for i, a in enumerate(args):
            want = CompatibleWith(params[i]) if params else NO_CONSTRAINT
            self.expr(a, path + (i,), want)

    # -- expressions ------------------------------------------------------------
    def expr(self, n: AstNode, path: tuple, expected: TypeConstraint) -> None:
        k, ch = n.kind, n.children
        t = self.type_of(n)
        if k is K.SimpleName:
            if n.token in self.declared or self.is_class_name(n.token, t):
                return
            self.hole(HoleKind.VAR, self.fit(expected, t), n, path, origin_type=t)
        elif k in (K.Literal, K.ThisExpression):
            return
        elif k is K.ParenthesizedExpression:
            self.expr(ch[0], path + (0,), expected)
        elif k is K.ArrayAccess:
            self.expr(ch[0], path + (0,), self.receiver_constraint(self.type_of(ch[0])))
            self.expr(ch[1], path + (1,), CompatibleWith("int"))
        elif k is K.Assignment:
            lhs, op, rhs = ch
            lt = self.type_of(lhs)
            target = Exact(lt) if lt else NO_CONSTRAINT
            if lhs.kind is K.SimpleName:
                if lhs.token not in self.declared:
                    self.hole(HoleKind.VAR, target, lhs, path + (0,), origin_type=lt)
            else:
                self.expr(lhs, path + (0,), target)
            if op.token == "=":
                want = CompatibleWith(lt) if lt else NO_CONSTRAINT
            else:
                want = category(self.type_of(rhs)) if self.type_of(rhs) else NO_CONSTRAINT
            self.expr(rhs, path + (2,), want)
        elif k is K.CastExpression:
            self.expr(ch[1], path + (1,), CompatibleWith(ch[0].token))
        elif k is K.ClassInstanceCreation:
            tn, arglist = ch
            arg_types = tuple(self.type_of(a) for a in arglist.children)
            if _PLAIN_NAME.match(tn.token):
                c = self.fit(SignatureFit(arg_types, expected), tn.token)
                self.hole(HoleKind.CNAME, c, tn, path + (0,), origin_type=tn.token,
                          arity=len(arg_types))
            self.args(arglist.children, path + (1,), self.ctor_params(tn.token, arglist.children))
        elif k is K.ConditionalExpression:
            self.expr(ch[0], path + (0,), BOOLEAN)
            self.expr(ch[1], path + (1,), expected)
            self.expr(ch[2], path + (2,), expected)
        elif k is K.FieldAccess:
            recv, name = ch
            rt = self.type_of(recv)
            static_owner = class_ref_name(rt)
            if static_owner is None and recv.kind is K.SimpleName and rt is None and self.is_class_name(recv.token, rt):
                static_owner = recv.token
            if rt is not None and element_type(rt) is not None and name.token == "length":
                self.expr(recv, path + (0,), self.receiver_constraint(rt))
                return
            if static_owner is not None:
                qual, owner = "class", static_owner
            elif recv.kind is K.ThisExpression:
                qual, owner = "none", self.table.enclosing_class if self.table else None
            else:
                qual, owner = "expr", rt
                self.expr(recv, path + (0,), self.receiver_constraint(rt))
            self.hole(HoleKind.VAR, self.fit(expected, t), name, path + (1,), origin_type=t,
                      qualifier=qual, owner=owner, member=True)
        elif k is K.SuperFieldAccess:
            self.hole(HoleKind.VAR, self.fit(expected, t), ch[0], path + (0,), origin_type=t,
                      qualifier="super", owner=self.supertype(), member=True)
        elif k is K.MethodInvocation:
            self.call(n, path, expected, t)
        elif k is K.SuperMethodInvocation:
            self.call(n, path, expected, t, qualifier="super")
        elif k is K.InfixExpression:
            a, op, b = ch
            ta, tb = self.type_of(a), self.type_of(b)
            o = op.token
            if o in _LOGICAL:
                wa = wb = BOOLEAN
            elif o in _NUMERIC_OPS or (o == "+" and "String" not in (ta, tb)):
                wa = wb = NUMERIC_CONSTRAINT
            else:
                wa = category(ta) if ta else NO_CONSTRAINT
                wb = category(tb) if tb else NO_CONSTRAINT
                # against null any reference is acceptable
                if o in ("==", "!=") and tb == NULL and is_reference(ta):
                    wa = CompatibleWith(OBJECT)
                if o in ("==", "!=") and ta == NULL and is_reference(tb):
                    wb = CompatibleWith(OBJECT)
            self.expr(a, path + (0,), wa)
            self.hole(HoleKind.INFIX_OP, self.fit(expected, t), op, path + (1,), origin_type=t,
                      operand_types=(ta, tb))
            self.expr(b, path + (2,), wb)
        elif k is K.PrefixExpression:
            op, inner = ch
            if op.token in ("-", "+") and inner.kind is K.Literal:
                return  # a signed constant
            ti = self.type_of(inner)
            self.hole(HoleKind.PREFIX_OP, self.fit(expected, t), op, path + (0,), origin_type=t,
                      operand_types=(ti,), operand_is_variable=inner.kind in _LVALUE_KINDS)
            want = BOOLEAN if op.token == "!" else NUMERIC_CONSTRAINT
            if op.token in ("++", "--") and inner.kind is K.SimpleName:
                want = Exact(ti) if ti else NUMERIC_CONSTRAINT
            self.expr(inner, path + (1,), want)
        elif k is K.PostfixExpression:
            inner, op = ch
            ti = self.type_of(inner)
            self.expr(inner, path + (0,), Exact(ti) if ti else NUMERIC_CONSTRAINT)
            self.hole(HoleKind.POSTFIX_OP, self.fit(expected, t), op, path + (1,), origin_type=t,
                      operand_types=(ti,), operand_is_variable=True)
        elif k is K.VarDeclExpression:
            self.decl(n, path)
        elif k is K.VarDeclFragment:
            self.fragment(n, path, expected)

    def supertype(self) -> Optional[str]:
        if self.table is None:
            return None
        info = self.table.classes.get(self.table.enclosing_class)
        return info.supertype if info else None

    def call(self, n: AstNode, path: tuple, expected: TypeConstraint, t: Optional[str],
             qualifier: Optional[str] = None) -> None:
        ch = n.children
        if qualifier == "super":
            name, arglist = ch
            name_path, args_path = path + (0,), path + (1,)
            owner = self.supertype()
        elif len(ch) == 2:
            name, arglist = ch
            name_path, args_path = path + (0,), path + (1,)
            qualifier, owner = "none", self.table.enclosing_class if self.table else None
        else:
            recv, name, arglist = ch
            name_path, args_path = path + (1,), path + (2,)
            rt = self.type_of(recv)
            static_owner = class_ref_name(rt)
            if static_owner is None and recv.kind is K.SimpleName and self.is_class_name(recv.token, rt):
                static_owner = recv.token
            if static_owner is not None:
                qualifier, owner = "class", static_owner
            elif recv.kind is K.ThisExpression:
                qualifier, owner = "none", self.table.enclosing_class if self.table else None
            else:
                qualifier, owner = "expr", rt
                self.expr(recv, path + (0,), self.receiver_constraint(rt))
        sig = self.typer.result.calls.get(id(n)) if self.typer else None
        arg_types = tuple(self.type_of(a) for a in arglist.children)
        c = self.fit(SignatureFit(arg_types, expected), t if t != "void" else None)
        self.hole(HoleKind.FNAME, c, name, name_path, origin_type=t, qualifier=qualifier,
                  owner=owner, arity=len(arg_types))
        self.args(arglist.children, args_path, sig.param_types if sig else None)


def abstract_node(n: AstNode, expected: TypeConstraint = NO_CONSTRAINT,
                  typer: Optional[Typer] = None, header_only: bool = False) -> Skeleton:
    """Abstract a statement or an expression into a detached skeleton."""
    ab = _Abstractor(typer, _declared_names(n), header_only)
    if is_statement(n.kind):
        ab.stmt(n, ())
    else:
        ab.expr(n, (), expected)
    return Skeleton(n, None, tuple(ab.holes), ab.declared)


def abstract_modification(m: Modification, typer: Optional[Typer] = None) -> Skeleton:
    if m.op == "delete":
        raise NotAbstractable("a deletion introduces no code")
    shallow = m.op == "update" and m.shallow
    sk = abstract_node(m.introduced, NO_CONSTRAINT, typer, header_only=shallow)
    return Skeleton(sk.root, m, sk.holes, sk.declared)


def render_skeleton(s: Skeleton) -> str:
    """One-line, space-separated rendering with holes shown in angle brackets."""
    toks, positions = s.token_template()
    unnamed = 0
    for h, i in zip(s.holes, positions):
        if h.hole_kind is HoleKind.VAR and h.constraint.kind == "none":
            unnamed += 1
            toks[i] = f"⟨VAR:T{unnamed}⟩"
        else:
            toks[i] = h.label()
    return " ".join(toks)
