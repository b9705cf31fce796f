"""Tree types for the Java subset handled by skelfix."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, Optional


class NodeKind(enum.Enum):
    # statements
    AssertStatement = "AssertStatement"
    ConstructorInvocation = "ConstructorInvocation"
    DoStatement = "DoStatement"
    ForStatement = "ForStatement"
    IfStatement = "IfStatement"
    ReturnStatement = "ReturnStatement"
    SwitchStatement = "SwitchStatement"
    ThrowStatement = "ThrowStatement"
    VarDeclStatement = "VarDeclStatement"
    WhileStatement = "WhileStatement"
    ExpressionStatement = "ExpressionStatement"
    BreakStatement = "BreakStatement"
    ContinueStatement = "ContinueStatement"
    Block = "Block"
    # expressions
    Assignment = "Assignment"
    CastExpression = "CastExpression"
    ClassInstanceCreation = "ClassInstanceCreation"
    ConditionalExpression = "ConditionalExpression"
    FieldAccess = "FieldAccess"
    InfixExpression = "InfixExpression"
    PrefixExpression = "PrefixExpression"
    PostfixExpression = "PostfixExpression"
    MethodInvocation = "MethodInvocation"
    SimpleName = "SimpleName"
    SuperFieldAccess = "SuperFieldAccess"
    SuperMethodInvocation = "SuperMethodInvocation"
    VarDeclExpression = "VarDeclExpression"
    VarDeclFragment = "VarDeclFragment"
    Literal = "Literal"
    ArrayAccess = "ArrayAccess"
    ParenthesizedExpression = "ParenthesizedExpression"
    ThisExpression = "ThisExpression"
    # supporting
    TypeName = "TypeName"
    Modifier = "Modifier"
    Operator = "Operator"
    ArgumentList = "ArgumentList"
    ForInit = "ForInit"
    ForCondition = "ForCondition"
    ForUpdate = "ForUpdate"
    SwitchCase = "SwitchCase"
    SwitchDefault = "SwitchDefault"
    Parameter = "Parameter"
    FieldDecl = "FieldDecl"
    MethodDecl = "MethodDecl"
    ConstructorDecl = "ConstructorDecl"
    ClassDecl = "ClassDecl"

    def __repr__(self) -> str:
        return self.value


K = NodeKind

STATEMENT_KINDS = frozenset({
    K.AssertStatement, K.ConstructorInvocation, K.DoStatement, K.ForStatement,
    K.IfStatement, K.ReturnStatement, K.SwitchStatement, K.ThrowStatement,
    K.VarDeclStatement, K.WhileStatement, K.ExpressionStatement,
    K.BreakStatement, K.ContinueStatement, K.Block,
})

EXPRESSION_KINDS = frozenset({
    K.Assignment, K.CastExpression, K.ClassInstanceCreation,
    K.ConditionalExpression, K.FieldAccess, K.InfixExpression,
    K.PrefixExpression, K.PostfixExpression, K.MethodInvocation, K.SimpleName,
    K.SuperFieldAccess, K.SuperMethodInvocation, K.VarDeclExpression,
    K.Literal, K.ArrayAccess, K.ParenthesizedExpression, K.ThisExpression,
})

LEAF_KINDS = frozenset({
    K.SimpleName, K.Literal, K.ThisExpression, K.TypeName, K.Modifier, K.Operator,
})


def is_statement(kind: NodeKind) -> bool:
    return kind in STATEMENT_KINDS


def is_expression(kind: NodeKind) -> bool:
    return kind in EXPRESSION_KINDS


@dataclass(frozen=True)
class AstNode:
    """Immutable syntax tree node.

    Equality is structural: ``span`` and ``preorder_index`` are positional
    metadata and take no part in comparisons.
    """

    kind: NodeKind
    children: tuple[AstNode, ...] = ()
    token: Optional[str] = None
    span: tuple[int, int] = field(default=(0, 0), compare=False)
    preorder_index: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if self.kind in LEAF_KINDS:
            if not self.token or self.children:
                raise ValueError(f"leaf {self.kind!r} needs a token and no children")
        elif self.token is not None:
            raise ValueError(f"interior node {self.kind!r} cannot carry a token")

    def __repr__(self) -> str:
        if self.token is not None:
            return f"{self.kind.value}({self.token!r})"
        inner = ", ".join(repr(c) for c in self.children)
        return f"{self.kind.value}({inner})"

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    @cached_property
    def text(self) -> str:
        from .printer import pretty_print
        return pretty_print(self)

    @cached_property
    def tokens(self) -> tuple[str, ...]:
        from .lexer import lex_tokens
        return tuple(lex_tokens(self.text))

    def walk(self) -> Iterator[AstNode]:
        """Yield the subtree in preorder."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def at(self, path: tuple[int, ...]) -> AstNode:
        node = self
        for i in path:
            node = node.children[i]
        return node

    def with_children(self, children) -> AstNode:
        return replace(self, children=tuple(children))

    def with_token(self, token: str) -> AstNode:
        return replace(self, token=token)


def leaf(kind: NodeKind, token: str) -> AstNode:
    return AstNode(kind, (), token)


def node(kind: NodeKind, *children: AstNode) -> AstNode:
    return AstNode(kind, tuple(children))


def renumber(root: AstNode, start: int = 0) -> AstNode:
    """Return a copy of ``root`` whose preorder indices count from ``start``."""
    counter = start

    def go(n: AstNode) -> AstNode:
        nonlocal counter
        idx = counter
        counter += 1
        kids = tuple(go(c) for c in n.children)
        return AstNode(n.kind, kids, n.token, n.span, idx)

    return go(root)


def replace_at(root: AstNode, path: tuple[int, ...], new: AstNode) -> AstNode:
    if not path:
        return new
    head, rest = path[0], path[1:]
    kids = list(root.children)
    kids[head] = replace_at(kids[head], rest, new)
    return root.with_children(kids)


def paths(root: AstNode, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], AstNode]]:
    """Yield ``(path, node)`` for every node in preorder."""
    yield prefix, root
    for i, c in enumerate(root.children):
        yield from paths(c, prefix + (i,))


# --- statement structure -------------------------------------------------

def statement_slots(n: AstNode) -> list[tuple[tuple[int, ...], int]]:
    """Locate the statement lists owned by ``n``.

    Each entry is ``(path to container, offset)``: the container's children
    from ``offset`` onward are statements. The body blocks of compound
    statements and the case groups of a switch are containers, not
    statements of their own.
    """
    k = n.kind
    if k is K.Block:
        return [((), 0)]
    if k is K.IfStatement:
        return [((i,), 0) for i in range(1, len(n.children))]
    if k is K.WhileStatement:
        return [((1,), 0)]
    if k is K.DoStatement:
        return [((0,), 0)]
    if k is K.ForStatement:
        return [((3,), 0)]
    if k is K.SwitchStatement:
        return [((i,), 1 if c.kind is K.SwitchCase else 0)
                for i, c in enumerate(n.children) if i > 0]
    return []


def slot_statements(n: AstNode) -> list[list[AstNode]]:
    return [list(n.at(p).children[off:]) for p, off in statement_slots(n)]


def child_statements(n: AstNode) -> list[AstNode]:
    out: list[AstNode] = []
    for stmts in slot_statements(n):
        out.extend(stmts)
    return out


def with_slot_statements(n: AstNode, lists: list[list[AstNode]]) -> AstNode:
    """Rebuild ``n`` with each statement slot replaced by the given list."""
    slots = statement_slots(n)
    if len(slots) != len(lists):
        raise ValueError("slot count mismatch")
    out = n
    for (p, off), stmts in zip(slots, lists):
        container = out.at(p)
        container = container.with_children(list(container.children[:off]) + list(stmts))
        out = replace_at(out, p, container)
    return out


def strip_slots(n: AstNode) -> AstNode:
    """The statement's own header: ``n`` with every statement slot emptied."""
    slots = statement_slots(n)
    return with_slot_statements(n, [[] for _ in slots]) if slots else n


def slot_shape(n: AstNode) -> tuple:
    return tuple(n.at(p).kind for p, _ in statement_slots(n))
