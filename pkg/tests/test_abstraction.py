from __future__ import annotations

import json

import pytest

from skelfix.abstraction import (
    HoleKind,
    NotAbstractable,
    abstract_modification,
    abstract_node,
    render_skeleton,
)
from skelfix.analysis.types import BOOLEAN, EXCEPTION
from skelfix.differencing import Delete, diff
from skelfix.syntax import NodeKind as K, parse_expression, parse_method, parse_statement
from rule_goldens import ROWS, abstract_in_context, labels


@pytest.mark.parametrize("kind, stmt, rendered, hole_labels", ROWS, ids=[r[0] for r in ROWS])
def test_rule_golden(kind, stmt, rendered, hole_labels):
    sk, errors = abstract_in_context(stmt)
    assert errors == []
    assert render_skeleton(sk) == rendered
    assert labels(sk) == hole_labels
    assert any(n.kind.value == kind for n in sk.root.walk())


@pytest.mark.parametrize("kind, stmt, rendered, hole_labels", ROWS, ids=[r[0] for r in ROWS])
def test_origin_tokens_restore_statement(kind, stmt, rendered, hole_labels):
    sk, _ = abstract_in_context(stmt)
    assert sk.fill(sk.identity()) == sk.root
    assert all(h.origin_token for h in sk.holes)
    assert [h.hole_id for h in sk.holes] == list(range(len(sk.holes)))


def test_untyped_rendering_numbers_unconstrained_vars():
    sk = abstract_node(parse_expression("type.equals(_baseType)"))
    assert render_skeleton(sk) == "⟨VAR:T1⟩ . ⟨FNAME:()->?⟩ ( ⟨VAR:T2⟩ )"


def test_literals_never_become_holes():
    sk = abstract_node(parse_statement("x = 1 + \"s\" + 'c' + 2.5 + null;"))
    literal_paths = {p for p, n in _paths(sk.root) if n.kind is K.Literal}
    assert not literal_paths & {h.path for h in sk.holes}


def test_condition_positions_are_boolean():
    for stmt in ("if (flag) { x = 1; }", "while (flag) { x = 1; }", "do { x = 1; } while (flag);",
                 "for (; flag; ) { x = 1; }", "assert flag;"):
        sk = abstract_node(parse_statement(stmt))
        assert sk.holes[0].constraint == BOOLEAN, stmt


def test_throw_positions_are_exception():
    sk = abstract_node(parse_statement("throw e;", "void"))
    assert sk.holes[0].constraint == EXCEPTION
    sk = abstract_node(parse_statement("throw new Oops(m);", "void"))
    assert sk.holes[0].hole_kind is HoleKind.CNAME
    assert sk.holes[0].constraint.returns == EXCEPTION


def test_keywords_and_declared_names_kept():
    sk = abstract_node(parse_statement("int total = a + b;"))
    assert render_skeleton(sk).startswith("int total = ")
    sk = abstract_node(parse_statement("for (int i = 0; i < n; i++) { s += i; }"))
    assert "i" not in {h.origin_token for h in sk.holes}


def test_delete_is_not_abstractable():
    a = parse_method("void f() { a(); b(); }").children[-1]
    with pytest.raises(NotAbstractable):
        abstract_modification(Delete(a.children[0], (0,)))


def test_shallow_update_abstracts_header_only():
    a = parse_method("void f() { if (x > 0) { y = 1; } }").children[-1]
    b = parse_method("void f() { if (x >= 0) { y = 1; } }").children[-1]
    (m,) = diff(a, b)
    sk = abstract_modification(m)
    assert [h.origin_token for h in sk.holes] == ["x", ">="]


def test_skeleton_json():
    sk, _ = abstract_in_context("assert a > 0;")
    data = json.loads(json.dumps(sk.to_json()))
    assert data["rendered"] == "assert ⟨VAR:num⟩ ⟨INFIX_OP⟩ 0 ;"
    assert [h["hole_kind"] for h in data["holes"]] == ["VAR", "INFIX_OP"]
    assert data["root"]["kind"] == "AssertStatement"


def _paths(root, prefix=()):
    yield prefix, root
    for i, c in enumerate(root.children):
        yield from _paths(c, prefix + (i,))
