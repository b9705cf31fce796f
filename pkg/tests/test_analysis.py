from __future__ import annotations

import json

import pytest

from skelfix.analysis import (
    BOOLEAN,
    EXCEPTION,
    NO_CONSTRAINT,
    RETURN_COMPATIBLE,
    CompatibleWith,
    Exact,
    SignatureFit,
    UnknownFunction,
    candidate_classes,
    candidate_methods,
    check_method,
    collect_scope,
    type_compatible,
    visible_variables,
)
from skelfix.syntax import parse_function, parse_method

SRC = """
class Shape {
    int base;
    private int secret;
    static int counter;
    int area() { return base; }
    static int twice(int v) { return v * 2; }
}
class Square extends Shape {
    String label;
    Square next;
    int side(int a, String s) {
        int x = a + 1;
        if (x > 0) {
            int inner = x;
            x = inner;
        }
        for (int i = 0; i < a; i++) {
            x += i;
        }
        return x;
    }
    static int helper(int q) {
        return q;
    }
    Square() {
        base = 1;
    }
}
"""


@pytest.fixture(scope="module")
def unit():
    return parse_function(SRC)


@pytest.fixture(scope="module")
def table(unit):
    return collect_scope(unit, "side")


def site_of(unit, text):
    return unit.raw_text.index(text)


def test_collects_locals_params_and_fields(table):
    kinds = {(v.name, v.kind) for v in table.variables}
    assert {("x", "local"), ("inner", "local"), ("i", "local"), ("a", "parameter"),
            ("s", "parameter"), ("label", "field"), ("base", "inherited_field"),
            ("counter", "inherited_field")} <= kinds
    # private fields of a superclass are not visible
    assert "secret" not in {v.name for v in table.variables}
    assert table.enclosing_return_type == "int"


def test_scope_respects_declaration_position(unit, table):
    before_x = site_of(unit, "int x = a + 1;")
    at_return = site_of(unit, "return x;")
    in_if = site_of(unit, "x = inner;")
    names = lambda site: [v.name for v in visible_variables(site, Exact("int"), table)]
    assert "x" not in names(before_x)
    assert "inner" in names(in_if)
    assert "inner" not in names(at_return)
    assert "i" not in names(at_return)
    assert names(at_return) == ["x", "a", "base", "counter"]


def test_locals_ordered_innermost_first(unit, table):
    in_if = site_of(unit, "x = inner;")
    assert [v.name for v in visible_variables(in_if, Exact("int"), table)][:2] == ["inner", "x"]


def test_static_context_hides_instance_fields(unit):
    t = collect_scope(unit, "helper")
    names = [v.name for v in visible_variables(site_of(unit, "return q;"), NO_CONSTRAINT, t)]
    assert names == ["q", "counter"]


def test_unknown_function(unit):
    with pytest.raises(UnknownFunction):
        collect_scope(unit, "missing")


def test_compatibility(table):
    assert type_compatible("int", CompatibleWith("double"), table)
    assert not type_compatible("double", CompatibleWith("int"), table)
    assert type_compatible("Square", CompatibleWith("Shape"), table)
    assert not type_compatible("Shape", CompatibleWith("Square"), table)
    assert type_compatible("null", CompatibleWith("String"), table)
    assert not type_compatible("null", CompatibleWith("int"), table)
    assert type_compatible("boolean", BOOLEAN, table)
    assert type_compatible("IllegalArgumentException", EXCEPTION, table)
    assert not type_compatible("String", EXCEPTION, table)
    assert type_compatible("int", RETURN_COMPATIBLE, table)
    assert not type_compatible("String", RETURN_COMPATIBLE, table)


def test_candidate_methods(table):
    sigs = candidate_methods("String", 0, SignatureFit((), BOOLEAN), table)
    assert [m.name for m in sigs] == ["isEmpty"]
    own = candidate_methods(None, 0, SignatureFit((), Exact("int")), table)
    assert [m.name for m in own] == ["area", "hashCode"]
    static = candidate_methods("class:Math", 2, SignatureFit(("int", "int"), CompatibleWith("int")),
                               table, arg_types=("int", "int"))
    assert [m.name for m in static] == ["max", "min"]
    assert candidate_methods("int", 0, NO_CONSTRAINT, table) == []


def test_candidate_classes(table):
    ex = candidate_classes(EXCEPTION, 1, table, ("String",))
    names = [c.name for c in ex]
    assert "IllegalArgumentException" in names and "String" not in names
    assert names == sorted(names)
    own = candidate_classes(CompatibleWith("Shape"), 0, table, ())
    assert [c.name for c in own][:2] == ["Shape", "Square"]


def test_symbol_table_json(table):
    data = json.loads(table.dumps())
    assert data["enclosing_class"] == "Square"
    assert any(v["name"] == "x" for v in data["variables"])


def test_check_method_accepts_well_typed(unit, table):
    _, m = unit.find_method("side")
    assert check_method(m, table).errors == []


@pytest.mark.parametrize("method, message", [
    ("int side(int a, String s) { return s; }", "incompatible"),
    ("int side(int a, String s) { return y; }", "cannot find symbol"),
    ("int side(int a, String s) { if (a) { return 1; } return 0; }", "boolean"),
    ("int side(int a, String s) { return 1; a++; }", "unreachable"),
    ("int side(int a, String s) { a++; }", "missing return"),
    ("int side(int a, String s) { a + 1; return a; }", "not a statement"),
    ("int side(int a, String s) { return s.size(); }", "cannot find symbol"),
    ("int side(int a, String s) { throw new Square(); }", "not throwable"),
    ("int side(int a, String s) { return Math.max(s, a); }", "cannot find symbol"),
    ("int side(int a, String s) { int a = 2; return a; }", "already defined"),
])
def test_check_method_rejects(table, method, message):
    errors = check_method(parse_method(method), table).errors
    assert errors, method
    assert any(message in e for e in errors), errors


def test_checker_records_types(table):
    m = parse_method("int side(int a, String s) { return s.length() + a; }")
    result = check_method(m, table)
    ret = m.children[-1].children[0].children[0]
    assert result.ok and result.type_of(ret) == "int"
