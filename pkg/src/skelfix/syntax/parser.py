"""Recursive-descent parser for the Java subset (grammar in docs/grammar.md)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lexer import PRIMITIVES, ParseError, Token, tokenize
from .nodes import AstNode, NodeKind as K, renumber

MODIFIERS = frozenset({"public", "private", "protected", "static", "final", "abstract"})
ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="})
BINARY_LEVELS = [
    ("||",), ("&&",), ("|",), ("^",), ("&",), ("==", "!="),
    ("<", ">", "<=", ">="), ("+", "-"), ("*", "/", "%"),
]
PREFIX_OPS = frozenset({"+", "-", "!", "~", "++", "--"})
LITERAL_KINDS = frozenset({"int", "float", "char", "string"})
LITERAL_KEYWORDS = frozenset({"true", "false", "null"})
_CAST_FOLLOW_KEYWORDS = frozenset({"this", "new", "super", "true", "false", "null"})


@dataclass(frozen=True)
class SourceUnit:
    package_name: Optional[str]
    classes: tuple[AstNode, ...]
    raw_text: str

    def methods(self):
        """Yield ``(class_decl, member)`` for every method and constructor."""
        for cls in self.classes:
            for m in cls.children:
                if m.kind in (K.MethodDecl, K.ConstructorDecl):
                    yield cls, m

    def find_method(self, name: str) -> tuple[AstNode, AstNode]:
        for cls, m in self.methods():
            if method_name(m) == name:
                return cls, m
        raise KeyError(name)


def method_name(m: AstNode) -> str:
    return next(c.token for c in m.children if c.kind is K.SimpleName)


def method_body(m: AstNode) -> AstNode:
    return m.children[-1]


def method_return_type(m: AstNode) -> Optional[str]:
    if m.kind is K.ConstructorDecl:
        return None
    return next(c.token for c in m.children if c.kind is K.TypeName)


def method_params(m: AstNode) -> list[AstNode]:
    return [c for c in m.children if c.kind is K.Parameter]


def class_name(cls: AstNode) -> str:
    return next(c.token for c in cls.children if c.kind is K.SimpleName)


def class_supertype(cls: AstNode) -> Optional[str]:
    for c in cls.children:
        if c.kind is K.TypeName:
            return c.token
    return None


def modifiers(n: AstNode) -> frozenset[str]:
    return frozenset(c.token for c in n.children if c.kind is K.Modifier)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[Token] = tokenize(text)
        self.i = 0
        self.last_end = 0
        self.return_type: Optional[str] = "?"   # "?" = unknown context

    # -- token helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "keyword") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        self.last_end = t.offset + len(t.text)
        return t

    def error(self, message: str, expected=()) -> ParseError:
        t = self.tok
        what = repr(t.text) if t.kind != "eof" else "end of input"
        return ParseError(f"{message}, found {what}", t.line, t.column, frozenset(expected))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", {text})
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error("expected identifier", {"<identifier>"})
        return self.advance()

    def mk(self, kind: K, start: int, *children: AstNode) -> AstNode:
        return AstNode(kind, tuple(children), None, (start, self.last_end))

    def mk_leaf(self, kind: K, t: Token) -> AstNode:
        return AstNode(kind, (), t.text, (t.offset, t.offset + len(t.text)))

    # -- declarations -------------------------------------------------------
    def unit(self) -> SourceUnit:
        package = None
        if self.at("package"):
            self.advance()
            parts = [self.ident().text]
            while self.at("."):
                self.advance()
                parts.append(self.ident().text)
            self.expect(";")
            package = ".".join(parts)
        classes = []
        while self.tok.kind != "eof":
            classes.append(self.class_decl())
        if not classes:
            raise self.error("expected a class declaration", {"class"})
        numbered, counter = [], 0
        for c in classes:
            c = renumber(c, counter)
            counter += c.size
            numbered.append(c)
        return SourceUnit(package, tuple(numbered), self.text)

    def modifiers(self) -> list[AstNode]:
        mods = []
        while self.tok.kind == "keyword" and self.tok.text in MODIFIERS:
            mods.append(self.mk_leaf(K.Modifier, self.advance()))
        return mods

    def class_decl(self) -> AstNode:
        start = self.tok.offset
        mods = self.modifiers()
        self.expect("class")
        name = self.mk_leaf(K.SimpleName, self.ident())
        parts = [*mods, name]
        if self.at("extends"):
            self.advance()
            parts.append(self.type_name())
        self.expect("{")
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated class body", {"}"})
            parts.append(self.member())
        self.expect("}")
        return self.mk(K.ClassDecl, start, *parts)

    def member(self) -> AstNode:
        start = self.tok.offset
        mods = self.modifiers()
        if self.tok.kind == "ident" and self.peek().text == "(":
            name = self.mk_leaf(K.SimpleName, self.advance())
            params = self.params()
            body = self.with_return_type(None, self.block)
            return self.mk(K.ConstructorDecl, start, *mods, name, *params, body)
        type_ = self.type_name(allow_void=True)
        name = self.mk_leaf(K.SimpleName, self.ident())
        if self.at("("):
            params = self.params()
            body = self.with_return_type(type_.token, self.block)
            return self.mk(K.MethodDecl, start, *mods, type_, name, *params, body)
        if type_.token == "void":
            raise self.error("fields cannot be void", {"("})
        frags = self.fragments(name)
        self.expect(";")
        return self.mk(K.FieldDecl, start, *mods, type_, *frags)

    def with_return_type(self, rt, fn):
        saved, self.return_type = self.return_type, rt
        try:
            return fn()
        finally:
            self.return_type = saved

    def method(self) -> AstNode:
        m = self.member()
        if m.kind not in (K.MethodDecl, K.ConstructorDecl):
            raise ParseError("expected a method declaration", 1, 1, frozenset({"("}))
        return m

    def params(self) -> list[AstNode]:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                start = self.tok.offset
                mods = []
                if self.at("final"):
                    mods.append(self.mk_leaf(K.Modifier, self.advance()))
                type_ = self.type_name()
                name = self.mk_leaf(K.SimpleName, self.ident())
                out.append(self.mk(K.Parameter, start, *mods, type_, name))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return out

    def type_text(self, allow_void: bool = False) -> str:
        t = self.tok
        if t.kind == "keyword" and (t.text in PRIMITIVES or (allow_void and t.text == "void")):
            base = self.advance().text
        elif t.kind == "ident":
            base = self.advance().text
            while self.at(".") and self.peek().kind == "ident":
                self.advance()
                base += "." + self.advance().text
            if self.at("<"):
                self.advance()
                args = [self.type_text()]
                while self.at(","):
                    self.advance()
                    args.append(self.type_text())
                self.expect(">")
                base += "<" + ", ".join(args) + ">"
        else:
            raise self.error("expected a type", {"<type>"})
        while self.at("[") and self.peek().text == "]":
            self.advance()
            self.advance()
            base += "[]"
        return base

    def type_name(self, allow_void: bool = False) -> AstNode:
        start = self.tok.offset
        text = self.type_text(allow_void)
        return AstNode(K.TypeName, (), text, (start, self.last_end))

    def fragments(self, first_name: AstNode) -> list[AstNode]:
        frags = [self.fragment(first_name)]
        while self.at(","):
            self.advance()
            frags.append(self.fragment(self.mk_leaf(K.SimpleName, self.ident())))
        return frags

    def fragment(self, name: AstNode) -> AstNode:
        start = name.span[0]
        if self.at("="):
            self.advance()
            init = self.expr()
            return self.mk(K.VarDeclFragment, start, name, init)
        return self.mk(K.VarDeclFragment, start, name)

    # -- statements ---------------------------------------------------------
    def block(self) -> AstNode:
        start = self.tok.offset
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated block", {"}"})
            stmts.append(self.statement())
        self.expect("}")
        return self.mk(K.Block, start, *stmts)

    def body(self) -> AstNode:
        """A compound statement body; a lone statement is wrapped in a block."""
        if self.at("{"):
            return self.block()
        s = self.statement()
        return AstNode(K.Block, (s,), None, s.span)

    def statement(self) -> AstNode:
        t = self.tok
        start = t.offset
        if t.kind == "op" and t.text == "{":
            return self.block()
        if t.kind == "keyword":
            kw = t.text
            if kw == "if":
                self.advance()
                cond = self.paren_expr()
                then = self.body()
                if self.at("else"):
                    self.advance()
                    other = self.body()
                    return self.mk(K.IfStatement, start, cond, then, other)
                return self.mk(K.IfStatement, start, cond, then)
            if kw == "while":
                self.advance()
                cond = self.paren_expr()
                return self.mk(K.WhileStatement, start, cond, self.body())
            if kw == "do":
                self.advance()
                b = self.body()
                self.expect("while")
                cond = self.paren_expr()
                self.expect(";")
                return self.mk(K.DoStatement, start, b, cond)
            if kw == "for":
                return self.for_statement()
            if kw == "return":
                self.advance()
                if self.at(";"):
                    if self.return_type not in (None, "void", "?"):
                        raise self.error("missing return value", {"<expression>"})
                    self.advance()
                    return self.mk(K.ReturnStatement, start)
                e = self.expr()
                self.expect(";")
                return self.mk(K.ReturnStatement, start, e)
            if kw == "throw":
                self.advance()
                e = self.expr()
                self.expect(";")
                return self.mk(K.ThrowStatement, start, e)
            if kw == "assert":
                self.advance()
                e = self.expr()
                self.expect(";")
                return self.mk(K.AssertStatement, start, e)
            if kw == "switch":
                return self.switch_statement()
            if kw in ("break", "continue"):
                self.advance()
                self.expect(";")
                kind = K.BreakStatement if kw == "break" else K.ContinueStatement
                return self.mk(kind, start)
            if kw == "this" and self.peek().text == "(":
                self.advance()
                args = self.arguments()
                self.expect(";")
                return self.mk(K.ConstructorInvocation, start, args)
        decl = self.try_local_decl()
        if decl is not None:
            self.expect(";")
            mods, type_, frags = decl
            return self.mk(K.VarDeclStatement, start, *mods, type_, *frags)
        e = self.expr()
        self.expect(";")
        return self.mk(K.ExpressionStatement, start, e)

    def try_local_decl(self):
        """Parse ``[final] Type name ...`` if present, else rewind and return None."""
        saved = (self.i, self.last_end)
        mods = []
        if self.at("final"):
            mods.append(self.mk_leaf(K.Modifier, self.advance()))
        t = self.tok
        if not (t.kind == "ident" or (t.kind == "keyword" and t.text in PRIMITIVES)):
            if mods:
                raise self.error("expected a type", {"<type>"})
            return None
        try:
            type_ = self.type_name()
            if self.tok.kind != "ident" or self.peek().text not in ("=", ";", ","):
                raise ParseError("not a declaration", 0, 0)
        except ParseError:
            if mods:
                raise
            self.i, self.last_end = saved
            return None
        name = self.mk_leaf(K.SimpleName, self.advance())
        return mods, type_, self.fragments(name)

    def for_statement(self) -> AstNode:
        start = self.tok.offset
        self.expect("for")
        self.expect("(")
        init_start = self.tok.offset
        inits = []
        if not self.at(";"):
            decl = self.try_local_decl()
            if decl is not None:
                mods, type_, frags = decl
                inits.append(self.mk(K.VarDeclExpression, init_start, *mods, type_, *frags))
            else:
                inits = self.expr_list()
        init = AstNode(K.ForInit, tuple(inits), None, (init_start, self.last_end if inits else init_start))
        self.expect(";")
        cond_start = self.tok.offset
        cond = [] if self.at(";") else [self.expr()]
        condition = AstNode(K.ForCondition, tuple(cond), None, (cond_start, self.last_end if cond else cond_start))
        self.expect(";")
        up_start = self.tok.offset
        ups = [] if self.at(")") else self.expr_list()
        update = AstNode(K.ForUpdate, tuple(ups), None, (up_start, self.last_end if ups else up_start))
        self.expect(")")
        b = self.body()
        return self.mk(K.ForStatement, start, init, condition, update, b)

    def switch_statement(self) -> AstNode:
        start = self.tok.offset
        self.expect("switch")
        sel = self.paren_expr()
        self.expect("{")
        groups = []
        while not self.at("}"):
            gstart = self.tok.offset
            if self.at("case"):
                self.advance()
                label = self.expr()
                self.expect(":")
                head, kind = [label], K.SwitchCase
            elif self.at("default"):
                self.advance()
                self.expect(":")
                head, kind = [], K.SwitchDefault
            else:
                raise self.error("expected switch label", {"case", "default", "}"})
            stmts = []
            while not self.at("case", "default", "}"):
                if self.tok.kind == "eof":
                    raise self.error("unterminated switch", {"}"})
                stmts.append(self.statement())
            groups.append(self.mk(kind, gstart, *head, *stmts))
        self.expect("}")
        return self.mk(K.SwitchStatement, start, sel, *groups)

    # -- expressions --------------------------------------------------------
    def paren_expr(self) -> AstNode:
        self.expect("(")
        e = self.expr()
        self.expect(")")
        return e

    def expr_list(self) -> list[AstNode]:
        out = [self.expr()]
        while self.at(","):
            self.advance()
            out.append(self.expr())
        return out

    def arguments(self) -> AstNode:
        start = self.tok.offset
        self.expect("(")
        args = [] if self.at(")") else self.expr_list()
        self.expect(")")
        return self.mk(K.ArgumentList, start, *args)

    def expr(self) -> AstNode:
        start = self.tok.offset
        lhs = self.conditional()
        if self.tok.kind == "op" and self.tok.text in ASSIGN_OPS:
            if lhs.kind not in (K.SimpleName, K.FieldAccess, K.ArrayAccess, K.SuperFieldAccess):
                raise self.error("invalid assignment target")
            op = self.mk_leaf(K.Operator, self.advance())
            rhs = self.expr()
            return self.mk(K.Assignment, start, lhs, op, rhs)
        return lhs

    def conditional(self) -> AstNode:
        start = self.tok.offset
        c = self.binary(0)
        if self.at("?"):
            self.advance()
            a = self.expr()
            self.expect(":")
            b = self.conditional()
            return self.mk(K.ConditionalExpression, start, c, a, b)
        return c

    def binary(self, level: int) -> AstNode:
        if level == len(BINARY_LEVELS):
            return self.unary()
        start = self.tok.offset
        lhs = self.binary(level + 1)
        ops = BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.mk_leaf(K.Operator, self.advance())
            rhs = self.binary(level + 1)
            lhs = self.mk(K.InfixExpression, start, lhs, op, rhs)
        return lhs

    def unary(self) -> AstNode:
        t = self.tok
        start = t.offset
        if t.kind == "op" and t.text in PREFIX_OPS:
            op = self.mk_leaf(K.Operator, self.advance())
            operand = self.unary()
            return self.mk(K.PrefixExpression, start, op, operand)
        if t.kind == "op" and t.text == "(":
            cast = self.try_cast()
            if cast is not None:
                return cast
        return self.postfix()

    def try_cast(self) -> Optional[AstNode]:
        saved = (self.i, self.last_end)
        start = self.tok.offset
        self.advance()
        try:
            type_ = self.type_name()
            self.expect(")")
        except ParseError:
            self.i, self.last_end = saved
            return None
        nxt = self.tok
        base = type_.token.rstrip("[]")
        if base in PRIMITIVES and not type_.token.endswith("]"):
            ok = True
        else:
            ok = (nxt.kind in ("ident", "int", "float", "char", "string")
                  or (nxt.kind == "op" and nxt.text in ("(", "!", "~"))
                  or (nxt.kind == "keyword" and nxt.text in _CAST_FOLLOW_KEYWORDS))
        if not ok:
            self.i, self.last_end = saved
            return None
        operand = self.unary()
        return self.mk(K.CastExpression, start, type_, operand)

    def postfix(self) -> AstNode:
        start = self.tok.offset
        e = self.primary()
        while True:
            if self.at("."):
                self.advance()
                name = self.mk_leaf(K.SimpleName, self.ident())
                if self.at("("):
                    args = self.arguments()
                    e = self.mk(K.MethodInvocation, start, e, name, args)
                else:
                    e = self.mk(K.FieldAccess, start, e, name)
            elif self.at("["):
                self.advance()
                idx = self.expr()
                self.expect("]")
                e = self.mk(K.ArrayAccess, start, e, idx)
            else:
                break
        while self.at("++", "--"):
            op = self.mk_leaf(K.Operator, self.advance())
            e = self.mk(K.PostfixExpression, start, e, op)
        return e

    def primary(self) -> AstNode:
        t = self.tok
        start = t.offset
        if t.kind in LITERAL_KINDS or (t.kind == "keyword" and t.text in LITERAL_KEYWORDS):
            return self.mk_leaf(K.Literal, self.advance())
        if t.kind == "keyword" and t.text == "this":
            return self.mk_leaf(K.ThisExpression, self.advance())
        if t.kind == "keyword" and t.text == "super":
            self.advance()
            self.expect(".")
            name = self.mk_leaf(K.SimpleName, self.ident())
            if self.at("("):
                return self.mk(K.SuperMethodInvocation, start, name, self.arguments())
            return self.mk(K.SuperFieldAccess, start, name)
        if t.kind == "keyword" and t.text == "new":
            self.advance()
            type_ = self.type_name()
            return self.mk(K.ClassInstanceCreation, start, type_, self.arguments())
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return self.mk(K.ParenthesizedExpression, start, e)
        if t.kind == "ident":
            name = self.mk_leaf(K.SimpleName, self.advance())
            if self.at("("):
                return self.mk(K.MethodInvocation, start, name, self.arguments())
            return name
        raise self.error("expected an expression", {"<expression>"})

    def finish(self, result):
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input", {"<end of input>"})
        return result


def parse_function(source_text: str) -> SourceUnit:
    """Parse a complete source file (one or more classes)."""
    return _Parser(source_text).unit()


parse_unit = parse_function


def parse_method(text: str) -> AstNode:
    """Parse a single method or constructor declaration (a patch file)."""
    p = _Parser(text)
    return renumber(p.finish(p.method()))


def parse_statement(text: str, return_type: Optional[str] = "?") -> AstNode:
    p = _Parser(text)
    p.return_type = return_type
    return renumber(p.finish(p.statement()))


def parse_expression(text: str) -> AstNode:
    p = _Parser(text)
    return renumber(p.finish(p.expr()))
