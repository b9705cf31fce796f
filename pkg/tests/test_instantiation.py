from __future__ import annotations

import pytest

from conftest import BUGS
from harness import run_bug, run_guides, synthetic_guides
from skelfix.abstraction import HoleKind, Typer, abstract_modification, abstract_node
from skelfix.analysis import check_method, collect_scope
from skelfix.differencing import diff
from skelfix.instantiation import (
    Caps,
    CandidateStream,
    generate_candidates,
    hole_candidates,
    instantiate_skeleton,
    rank_sum_order,
    select_modification_subsets,
)
from skelfix.syntax import parse_function, parse_method, parse_statement

SRC = """
class Calc {
    int limit;
    int scale;
    String label;
    int clamp(int value, int low) {
        int result = value * scale;
        return result;
    }
}
"""
GUIDE = """int clamp(int value, int low) {
    int result = value * scale;
    if (result > limit) { result = low; }
    return result;
}"""


@pytest.fixture(scope="module")
def ctx():
    unit = parse_function(SRC)
    _, method = unit.find_method("clamp")
    table = collect_scope(unit, "clamp")
    guide = parse_method(GUIDE)
    script = diff(method.children[-1], guide.children[-1])
    typer = Typer(check_method(guide, table), table)
    skeletons = {i: abstract_modification(m, typer) for i, m in enumerate(script) if m.op != "delete"}
    return unit, method, table, guide, script, skeletons


def test_hole_candidates_start_with_origin(ctx):
    unit, method, table, guide, script, skeletons = ctx
    sk = skeletons[0]
    site = unit.raw_text.index("return result;")
    for h in sk.holes:
        pool = hole_candidates(h, table, site)
        assert pool[0] == h.origin_token
        assert len(pool) == len(set(pool))
    var = next(h for h in sk.holes if h.hole_kind is HoleKind.VAR)
    assert "label" not in hole_candidates(var, table, site)


def test_operator_domain_filtered_by_operands(ctx):
    _, _, table, _, _, skeletons = ctx
    op = next(h for h in skeletons[0].holes if h.hole_kind is HoleKind.INFIX_OP)
    pool = hole_candidates(op, table, 0)
    assert set(pool) == {">", "<", "<=", ">=", "==", "!="}


def test_instantiations_identity_first_and_capped(ctx):
    unit, _, table, _, _, skeletons = ctx
    site = unit.raw_text.index("return result;")
    insts = instantiate_skeleton(skeletons[0], table, site, cap=40)
    assert len(insts) == 40
    assert insts[0].statement == skeletons[0].root
    assert insts[0].distance == 0
    keys = [(i.tier, i.distance) for i in insts]
    assert keys == sorted(keys)


def test_common_tier_orders_first(ctx):
    unit, _, table, _, _, skeletons = ctx
    site = unit.raw_text.index("return result;")
    insts = instantiate_skeleton(skeletons[0], table, site, cap=500, common=frozenset({"result", "limit"}))
    tiers = [i.tier for i in insts]
    assert tiers == sorted(tiers)
    first_tier1 = tiers.index(1) if 1 in tiers else len(tiers)
    for inst in insts[:first_tier1]:
        assert inst.filling.tokens[0] == "result" or inst.distance == 0


def test_hole_free_skeleton_replays(ctx):
    _, _, table, _, _, _ = ctx
    sk = abstract_node(parse_statement("return;", "void"))
    (inst,) = instantiate_skeleton(sk, table, 0)
    assert inst.statement == sk.root


def test_cap_must_be_positive(ctx):
    _, _, table, _, _, _ = ctx
    with pytest.raises(ValueError):
        instantiate_skeleton(abstract_node(parse_statement("x = 1;")), table, 0, cap=0)
    with pytest.raises(ValueError):
        Caps(max_mods_per_patch=0)


def test_subsets_bounded_and_ordered():
    class M:
        def __init__(self, c):
            self.complexity = c
    mods = [M(5), M(1), M(3), M(2)]
    subsets = select_modification_subsets(mods, max_mods=3)
    assert all(1 <= len(s) <= 3 for s in subsets)
    assert len(subsets) == len(set(subsets)) == 4 + 6 + 4
    weights = [sum(mods[i].complexity for i in s) for s in subsets]
    assert weights == sorted(weights, reverse=True)
    small = select_modification_subsets(mods[:2], max_mods=3)
    assert small[0] == (0, 1)


def test_rank_sum_order_enumerates_all():
    got = list(rank_sum_order([2, 3]))
    assert got == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (1, 2)]
    assert list(rank_sum_order([])) == []


def test_generated_candidates_are_unique_and_checked(ctx):
    _, method, table, guide, script, skeletons = ctx
    state = CandidateStream()
    cands = list(generate_candidates(script, skeletons, table, method, guide.children[-1],
                                     Caps(max_candidates_per_skeleton=50), "g", state))
    assert cands
    texts = [c.text for c in cands]
    assert len(texts) == len(set(texts))
    assert method.children[-1].text not in texts
    assert cands[0].text == guide.children[-1].text
    assert [c.candidate_id for c in cands] == list(range(len(cands)))
    for c in cands:
        assert check_method(c.patched_method, table).ok
        assert len(c.applied_modifications) <= 3


def test_caps_respected_on_corpus_bug():
    run = run_bug(BUGS / "wrap_null_guard", Caps(max_candidates_per_skeleton=20, max_mods_per_patch=1,
                                                 max_candidates_per_subset=15))
    for g in run.guides:
        assert all(len(c.subset) <= 1 for c in g.candidates)
        per_subset = {}
        for c in g.candidates:
            per_subset[c.subset] = per_subset.get(c.subset, 0) + 1
        assert all(v <= 15 for v in per_subset.values())


def test_synthetic_guides_yield_sound_candidates():
    d = BUGS / "wrong_variable"
    run = run_guides(d, synthetic_guides(d, 5))
    for c in run.candidates:
        assert check_method(parse_method(c.patched_method.text), run.table).ok
