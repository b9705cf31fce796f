"""Canonical pretty printer.

Statements and expressions print on a single line with single-space token
separation; declarations print one statement per line. Braces are always
emitted.
"""

from __future__ import annotations

from typing import Callable, Optional

from .nodes import AstNode, NodeKind as K, is_statement

INDENT = "    "

# hook used by skeleton rendering to substitute hole leaves
LeafHook = Callable[[AstNode, tuple], Optional[str]]


class _Printer:
    def __init__(self, hook: Optional[LeafHook] = None):
        self.hook = hook

    def leaf_text(self, n: AstNode, path: tuple) -> str:
        if self.hook is not None:
            sub = self.hook(n, path)
            if sub is not None:
                return sub
        return n.token

    # -- expressions ----------------------------------------------------------
    def expr(self, n: AstNode, path: tuple) -> str:
        k, c = n.kind, n.children
        sub = lambda i: self.expr(c[i], path + (i,))  # noqa: E731
        if k in (K.SimpleName, K.Literal, K.ThisExpression, K.TypeName, K.Operator):
            return self.leaf_text(n, path)
        if k in (K.InfixExpression, K.Assignment):
            return f"{sub(0)} {sub(1)} {sub(2)}"
        if k is K.PrefixExpression:
            op, operand = sub(0), sub(1)
            if op[-1:] in "+-" and operand[:1] in "+-":
                return f"{op} {operand}"
            return op + operand
        if k is K.PostfixExpression:
            return sub(0) + sub(1)
        if k is K.MethodInvocation:
            if len(c) == 3:
                return f"{sub(0)}.{sub(1)}{sub(2)}"
            return sub(0) + sub(1)
        if k is K.ArgumentList:
            return "(" + ", ".join(sub(i) for i in range(len(c))) + ")"
        if k is K.FieldAccess:
            return f"{sub(0)}.{sub(1)}"
        if k is K.SuperFieldAccess:
            return f"super.{sub(0)}"
        if k is K.SuperMethodInvocation:
            return f"super.{sub(0)}{sub(1)}"
        if k is K.ClassInstanceCreation:
            return f"new {sub(0)}{sub(1)}"
        if k is K.CastExpression:
            return f"({sub(0)}) {sub(1)}"
        if k is K.ConditionalExpression:
            return f"{sub(0)} ? {sub(1)} : {sub(2)}"
        if k is K.ParenthesizedExpression:
            return f"({sub(0)})"
        if k is K.ArrayAccess:
            return f"{sub(0)}[{sub(1)}]"
        if k in (K.VarDeclExpression, K.VarDeclStatement, K.FieldDecl):
            head, frags = [], []
            for i, ch in enumerate(c):
                (frags if ch.kind is K.VarDeclFragment else head).append(sub(i))
            return " ".join(head) + " " + ", ".join(frags)
        if k is K.VarDeclFragment:
            return sub(0) if len(c) == 1 else f"{sub(0)} = {sub(1)}"
        if k is K.Modifier:
            return self.leaf_text(n, path)
        raise TypeError(f"not an expression: {k!r}")

    # -- statements -----------------------------------------------------------
    def block(self, n: AstNode, path: tuple, ind: Optional[str], start: int = 0) -> str:
        items = [(i, ch) for i, ch in enumerate(n.children) if i >= start]
        if ind is None:
            if not items:
                return "{ }"
            return "{ " + " ".join(self.stmt(ch, path + (i,), None) for i, ch in items) + " }"
        if not items:
            return "{\n" + ind + "}"
        inner = ind + INDENT
        lines = [inner + self.stmt(ch, path + (i,), inner) for i, ch in items]
        return "{\n" + "\n".join(lines) + "\n" + ind + "}"

    def stmt(self, n: AstNode, path: tuple, ind: Optional[str]) -> str:
        k, c = n.kind, n.children
        sub = lambda i: self.expr(c[i], path + (i,))  # noqa: E731
        blk = lambda i: self.block(c[i], path + (i,), ind)  # noqa: E731
        if k is K.Block:
            return self.block(n, path, ind)
        if k is K.ExpressionStatement:
            return sub(0) + ";"
        if k is K.VarDeclStatement:
            return self.expr(n, path) + ";"
        if k is K.ReturnStatement:
            return f"return {sub(0)};" if c else "return;"
        if k is K.ThrowStatement:
            return f"throw {sub(0)};"
        if k is K.AssertStatement:
            return f"assert {sub(0)};"
        if k is K.BreakStatement:
            return "break;"
        if k is K.ContinueStatement:
            return "continue;"
        if k is K.ConstructorInvocation:
            return f"this{sub(0)};"
        if k is K.IfStatement:
            out = f"if ({sub(0)}) {blk(1)}"
            if len(c) == 3:
                out += f" else {blk(2)}"
            return out
        if k is K.WhileStatement:
            return f"while ({sub(0)}) {blk(1)}"
        if k is K.DoStatement:
            return f"do {blk(0)} while ({sub(1)});"
        if k is K.ForStatement:
            init, cond, update = c[0], c[1], c[2]
            init_s = ", ".join(self.expr(x, path + (0, i)) for i, x in enumerate(init.children))
            cond_s = " " + self.expr(cond.children[0], path + (1, 0)) if cond.children else ""
            up_s = " " + ", ".join(self.expr(x, path + (2, i)) for i, x in enumerate(update.children)) if update.children else ""
            return f"for ({init_s};{cond_s};{up_s}) {blk(3)}"
        if k is K.SwitchStatement:
            return self.switch(n, path, ind)
        raise TypeError(f"not a statement: {k!r}")

    def switch(self, n: AstNode, path: tuple, ind: Optional[str]) -> str:
        head = f"switch ({self.expr(n.children[0], path + (0,))}) "
        groups = []
        for gi, g in enumerate(n.children[1:], start=1):
            gpath = path + (gi,)
            if g.kind is K.SwitchCase:
                label, off = f"case {self.expr(g.children[0], gpath + (0,))}:", 1
            else:
                label, off = "default:", 0
            groups.append((label, [(i, s) for i, s in enumerate(g.children) if i >= off], gpath))
        if ind is None:
            parts = []
            for label, stmts, gpath in groups:
                parts.append(" ".join([label] + [self.stmt(s, gpath + (i,), None) for i, s in stmts]))
            return head + "{ " + " ".join(parts) + (" }" if parts else "}")
        inner, body_ind = ind + INDENT, ind + INDENT * 2
        lines = []
        for label, stmts, gpath in groups:
            lines.append(inner + label)
            lines.extend(body_ind + self.stmt(s, gpath + (i,), body_ind) for i, s in stmts)
        if not lines:
            return head + "{\n" + ind + "}"
        return head + "{\n" + "\n".join(lines) + "\n" + ind + "}"

    # -- declarations -----------------------------------------------------------
    def decl(self, n: AstNode, path: tuple, ind: Optional[str]) -> str:
        k, c = n.kind, n.children
        if k is K.FieldDecl:
            return self.expr(n, path) + ";"
        if k is K.Parameter:
            return " ".join(self.expr(ch, path + (i,)) for i, ch in enumerate(c))
        if k in (K.MethodDecl, K.ConstructorDecl):
            head, params = [], []
            for i, ch in enumerate(c[:-1]):
                if ch.kind is K.Parameter:
                    params.append(self.decl(ch, path + (i,), ind))
                else:
                    head.append(self.expr(ch, path + (i,)))
            body = self.block(c[-1], path + (len(c) - 1,), ind)
            return " ".join(head) + "(" + ", ".join(params) + ") " + body
        if k is K.ClassDecl:
            head, members = [], []
            inner = None if ind is None else ind + INDENT
            for i, ch in enumerate(c):
                if ch.kind is K.Modifier:
                    head.append(ch.token)
                elif ch.kind is K.SimpleName:
                    head.extend(["class", ch.token])
                elif ch.kind is K.TypeName:
                    head.extend(["extends", ch.token])
                else:
                    members.append(self.decl(ch, path + (i,), inner))
            if ind is None:
                return " ".join(head) + " { " + " ".join(members) + (" }" if members else "}")
            if not members:
                return " ".join(head) + " {\n" + ind + "}"
            return " ".join(head) + " {\n" + "\n".join(inner + m for m in members) + "\n" + ind + "}"
        raise TypeError(f"not a declaration: {k!r}")

    def any(self, n: AstNode, multiline: bool) -> str:
        k = n.kind
        ind = "" if multiline else None
        if k in _DECL_KINDS:
            return self.decl(n, (), ind)
        if k in (K.SwitchCase, K.SwitchDefault):
            off = 1 if k is K.SwitchCase else 0
            label = f"case {self.expr(n.children[0], (0,))}:" if off else "default:"
            stmts = [self.stmt(s, (i,), None) for i, s in enumerate(n.children) if i >= off]
            return " ".join([label] + stmts)
        if k in (K.ForInit, K.ForCondition, K.ForUpdate):
            return ", ".join(self.expr(x, (i,)) for i, x in enumerate(n.children))
        if is_statement(k):
            return self.stmt(n, (), ind)
        return self.expr(n, ())


_DECL_KINDS = frozenset({K.MethodDecl, K.ConstructorDecl, K.ClassDecl, K.FieldDecl, K.Parameter})


def pretty_print(node: AstNode, multiline: Optional[bool] = None) -> str:
    """Canonical text of ``node``.

    Declarations default to the multi-line layout, everything else to the
    single-line form.
    """
    if multiline is None:
        multiline = node.kind in (K.MethodDecl, K.ConstructorDecl, K.ClassDecl)
    return _Printer().any(node, multiline)


def print_with(node: AstNode, hook: LeafHook) -> str:
    """Single-line print where ``hook`` may override the text of any leaf."""
    return _Printer(hook).any(node, False)


def print_unit(unit) -> str:
    parts = []
    if unit.package_name:
        parts.append(f"package {unit.package_name};\n")
    parts.extend(pretty_print(c) + "\n" for c in unit.classes)
    return "\n".join(parts)
