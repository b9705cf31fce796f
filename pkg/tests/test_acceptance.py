"""Acceptance criteria 1-10, one test each; every test records a PASS/FAIL line."""

from __future__ import annotations

import json
import random
import shutil
import time
from contextlib import contextmanager

import jsonschema
import pytest

import skelfix.instantiation as inst_mod
from conftest import ACCEPTANCE, BUGS, bug_dirs
from harness import run_bug
from levenshtein_oracle import normalized_similarity
from mutation import corpus_bodies, mutate, statement_pool
from skelfix.analysis import check_method, collect_scope
from skelfix.config import Config
from skelfix.differencing import apply_edit_script, diff, similarity
from skelfix.instantiation import Caps
from skelfix.pipeline import EXIT_PLAUSIBLE, ingest_guiding_patches, run_repair
from skelfix.syntax import parse_function, parse_method, parse_statement, renumber
from skelfix.syntax.parser import method_name
from skelfix.validation import (
    Budget,
    Status,
    ValidationOutcome,
    repair_loop,
    splice_method,
)

PAIRS = BUGS.parent / "diff_pairs"
MUST_REPAIR = ("wrap_null_guard", "delete_wrap_loop", "method_name_hole")


@contextmanager
def criterion(n: int, title: str):
    detail: list[str] = []
    try:
        yield detail
    except BaseException:
        ACCEPTANCE[n] = f"FAIL  {n:2d}. {title}"
        print(ACCEPTANCE[n])
        raise
    line = f"PASS  {n:2d}. {title}" + (f" ({'; '.join(detail)})" if detail else "")
    ACCEPTANCE[n] = line
    print(line)


def body(text: str):
    return parse_method(text).children[-1]


@pytest.fixture(scope="module")
def corpus_runs():
    return [run_bug(d) for d in bug_dirs()]


def test_01_round_trip_differencing():
    with criterion(1, "round-trip differencing on 20 pairs + 200 mutations") as info:
        start = time.monotonic()
        pairs = sorted(PAIRS.iterdir())
        assert len(pairs) == 20
        cases = [(body((p / "before.src").read_text()), body((p / "after.src").read_text()))
                 for p in pairs]
        bodies = corpus_bodies()
        pool = statement_pool(bodies)
        rng = random.Random(2024)
        for _ in range(200):
            a = rng.choice(bodies)
            cases.append((a, renumber(mutate(a, pool, rng))))
        failures = [i for i, (a, b) in enumerate(cases) if apply_edit_script(a, diff(a, b)) != b]
        elapsed = time.monotonic() - start
        assert failures == []
        assert elapsed < 30
        info.append(f"{len(cases)} pairs, {elapsed:.1f}s")


def _random_statement(rng: random.Random) -> str:
    names = ["a", "b", "c", "x", "y"]
    ops = ["+", "-", "*", "/", "%"]
    parts = [rng.choice(names)]
    for _ in range(rng.randrange(0, 9)):
        parts += [rng.choice(ops), rng.choice(names + ["1", "2"])]
    return f"{rng.choice(names)} = {' '.join(parts)};"


def test_02_similarity_matches_oracle():
    with criterion(2, "atomic similarity equals the brute-force oracle on 1000 pairs") as info:
        rng = random.Random(7)
        worst = 0.0
        for _ in range(1000):
            a = parse_statement(_random_statement(rng))
            b = parse_statement(_random_statement(rng))
            got = similarity(a, b)
            want = normalized_similarity(a.tokens, b.tokens)
            worst = max(worst, abs(got - want))
        assert worst <= 1e-12
        info.append(f"max error {worst:g}")


def test_03_abstraction_goldens():
    from rule_goldens import ROWS, abstract_in_context, labels
    from skelfix.abstraction import render_skeleton

    with criterion(3, "abstraction goldens") as info:
        assert len(ROWS) == 25
        bad = []
        for kind, stmt, rendered, hole_labels in ROWS:
            sk, errors = abstract_in_context(stmt)
            if errors or render_skeleton(sk) != rendered or labels(sk) != hole_labels:
                bad.append(kind)
        assert bad == []
        info.append(f"{len(ROWS)} rows")


def test_04_instantiation_soundness(corpus_runs):
    with criterion(4, "every candidate re-parses and re-type-checks") as info:
        total = violations = 0
        for run in corpus_runs:
            meta = json.loads((BUGS / run.name / "bug.json").read_text())
            raw = (BUGS / run.name / meta["file"]).read_text()
            unit = parse_function(raw)
            span = unit.find_method(meta["function"])[1].span
            for cand in run.candidates:
                total += 1
                try:
                    fresh = parse_function(splice_method(raw, span, cand.patched_method))
                    _, method = fresh.find_method(meta["function"])
                    ok = check_method(method, collect_scope(fresh, meta["function"])).ok
                    ok = ok and method.children[-1] == cand.patched_body
                except Exception:
                    ok = False
                violations += not ok
        assert violations == 0
        assert total >= 5000
        info.append(f"{total} candidates, {violations} violations")


def test_05_caps_and_bounds(corpus_runs, monkeypatch):
    with criterion(5, "at most 500 instantiations per skeleton, 3 modifications per candidate") as info:
        sizes = []
        real = inst_mod.instantiate_skeleton

        def spy(*args, **kwargs):
            out = real(*args, **kwargs)
            sizes.append(len(out))
            return out

        monkeypatch.setattr(inst_mod, "instantiate_skeleton", spy)
        runs = [run_bug(d) for d in bug_dirs()]
        assert sizes and max(sizes) <= 500
        mods = [len(c.applied_modifications) for r in runs for c in r.candidates]
        assert max(mods) <= 3
        info.append(f"{len(sizes)} skeletons, max {max(sizes)} instantiations, max {max(mods)} mods")


def test_06_guide_inclusion(corpus_runs):
    with criterion(6, "each type-checking guide body appears among the candidates") as info:
        checked = 0
        over_cap = []
        for run in corpus_runs:
            buggy = run.method.children[-1].text
            texts = {c.text for c in run.candidates}
            for g in run.guides:
                if not g.type_checks or g.guide.body.text == buggy:
                    continue
                if len(g.guide.edit_script) > Caps().max_mods_per_patch:
                    over_cap.append(run.name)
                    continue
                assert g.guide.body.text in texts, (run.name, g.guide.patch_id)
                checked += 1
        # Guides with more modifications than the cap need a wider cap to be replayed whole.
        for name in sorted(set(over_cap)):
            run = run_bug(BUGS / name, Caps(max_mods_per_patch=5))
            texts = {c.text for c in run.candidates}
            for g in run.guides:
                if g.type_checks:
                    assert g.guide.body.text in texts, (name, g.guide.patch_id)
                    checked += 1
        info.append(f"{checked} guides, {len(over_cap)} replayed with max_mods_per_patch=5")


def _campaign(tmp_path, tag: str, workers: int) -> dict[str, tuple[int, dict]]:
    out = {}
    for d in bug_dirs():
        dst = tmp_path / tag / d.name
        shutil.copytree(d, dst, ignore=shutil.ignore_patterns("report.json"))
        code, report = run_repair(dst, Config(validation_workers=workers))
        out[d.name] = (code, report.to_json(timing=False))
    return out


@pytest.fixture(scope="module")
def campaign(tmp_path_factory):
    root = tmp_path_factory.mktemp("campaign")
    start = time.monotonic()
    results = _campaign(root, "first", 1)
    return root / "first", results, time.monotonic() - start


def test_07_repair_campaign(campaign, report_schema):
    with criterion(7, "repair campaign over the 12 corpus bugs") as info:
        root, results, elapsed = campaign
        repaired = sorted(n for n, (code, _) in results.items() if code == EXIT_PLAUSIBLE)
        for name in results:
            jsonschema.validate(json.loads((root / name / "report.json").read_text()),
                                report_schema)
        assert len(results) == 12
        assert len(repaired) >= 10
        assert set(MUST_REPAIR) <= set(repaired)
        assert elapsed < 300
        info.append(f"{len(repaired)}/12 repaired in {elapsed:.0f}s")


def test_08_ranking_order(monkeypatch):
    with criterion(8, "guide order and per-skeleton distance order") as info:
        lists = []
        real = inst_mod.instantiate_skeleton

        def spy(*args, **kwargs):
            out = real(*args, **kwargs)
            lists.append(out)
            return out

        monkeypatch.setattr(inst_mod, "instantiate_skeleton", spy)

        def never_plausible(cand, timeout):
            return ValidationOutcome(cand.candidate_id, Status.FAILING, 0.0, "")

        guides_seen = 0
        for d in bug_dirs():
            meta = json.loads((d / "bug.json").read_text())
            unit = parse_function((d / meta["file"]).read_text())
            fn = meta["function"]
            guides = [g for g in ingest_guiding_patches(d / "patches", Config(), unit)
                      if method_name(g.method) == fn]
            report = repair_loop(guides, unit.find_method(fn)[1], collect_scope(unit, fn), Budget(),
                                 Caps(), never_plausible, function=fn, keep_going=True)
            counts = [g.insert_update_count for g in report.guides]
            assert counts == sorted(counts, reverse=True), d.name
            assert all(g.validated == g.candidates for g in report.guides)
            guides_seen += len(counts)
        for insts in lists:
            keys = [(i.tier, i.distance) for i in insts]
            assert keys == sorted(keys)
            assert insts[0].distance == 0
        info.append(f"{guides_seen} guides, {len(lists)} skeletons")


def test_09_determinism(campaign, tmp_path):
    with criterion(9, "two full corpus runs give identical plausible[]") as info:
        _, first, _ = campaign
        second = _campaign(tmp_path, "second", 2)
        a = json.dumps({n: r["plausible"] for n, (_, r) in first.items()}, sort_keys=True)
        b = json.dumps({n: r["plausible"] for n, (_, r) in second.items()}, sort_keys=True)
        assert a == b
        info.append(f"{len(a)} bytes compared")


def test_10_budget_honor(bug_copy, report_schema):
    with criterion(10, "2 s wall-clock limit with a 1 s test command") as info:
        bug = bug_copy("delete_wrap_loop")
        cfg = Config(test_command="sleep 1; exit 1", budget=Budget(wall_clock_limit=2, per_test_timeout=3))
        start = time.monotonic()
        code, report = run_repair(bug, cfg)
        elapsed = time.monotonic() - start
        data = json.loads((bug / "report.json").read_text())
        jsonschema.validate(data, report_schema)
        assert elapsed <= 2 + cfg.budget.per_test_timeout
        assert data["status"] == "budget_exhausted"
        assert data["stats"]["candidates_validated"] >= 1
        info.append(f"stopped after {elapsed:.2f}s, {data['stats']['candidates_validated']} validations")
