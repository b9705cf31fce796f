"""Java-subset front end: tree types, parser, canonical printer."""

from .lexer import ParseError, lex_tokens, tokenize
from .nodes import (
    AstNode,
    NodeKind,
    child_statements,
    is_expression,
    is_statement,
    renumber,
    slot_statements,
    statement_slots,
)
from .parser import (
    SourceUnit,
    class_name,
    method_body,
    method_name,
    parse_expression,
    parse_function,
    parse_method,
    parse_statement,
    parse_unit,
)
from .printer import pretty_print, print_unit


def tokenize_node(node: AstNode) -> list[str]:
    """Token sequence of the node's canonical text."""
    return list(node.tokens)


__all__ = [
    "AstNode", "NodeKind", "ParseError", "SourceUnit", "child_statements",
    "class_name", "is_expression", "is_statement", "lex_tokens", "method_body",
    "method_name", "parse_expression", "parse_function", "parse_method",
    "parse_statement", "parse_unit", "pretty_print", "print_unit", "renumber",
    "slot_statements", "statement_slots", "tokenize", "tokenize_node",
]
