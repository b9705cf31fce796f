from __future__ import annotations

import sys
import time

import pytest

from skelfix.analysis import collect_scope
from skelfix.differencing import diff
from skelfix.instantiation import Caps
from skelfix.syntax import parse_function, parse_method
from skelfix.validation import (
    Budget,
    GuidingPatch,
    RepairReport,
    Status,
    TestCommand,
    ValidationOutcome,
    Workspace,
    WorkspacePool,
    rank_guiding_patches,
    repair_loop,
    run_command,
    splice_method,
)

SRC = """class Calc {
    int limit;
    int scale;

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
WANT = "if (result >= limit)"

CHECK = """import sys
text = open(sys.argv[1]).read()
if "COMPILE" in text:
    sys.exit(2)
sys.exit(0 if {want!r} in text else 1)
"""


@pytest.fixture
def project(tmp_path):
    d = tmp_path / "proj"
    d.mkdir()
    (d / "Calc.src").write_text(SRC)
    (d / "check.py").write_text(CHECK.format(want=WANT))
    return d


@pytest.fixture
def setup():
    unit = parse_function(SRC)
    _, method = unit.find_method("clamp")
    table = collect_scope(unit, "clamp")
    guide = parse_method(GUIDE)
    g = GuidingPatch("g1", guide, GUIDE, diff(method.children[-1], guide.children[-1]))
    return unit, method, table, g


COMMAND = TestCommand("{python} check.py {patched_file}")


def test_budget_validation():
    with pytest.raises(ValueError):
        Budget(per_test_timeout=0)
    with pytest.raises(ValueError):
        Budget(wall_clock_limit=-1)
    assert Budget().wall_clock_limit == 18000


def test_guides_ranked_by_insert_update_count(setup):
    unit, method, _, g = setup
    body = method.children[-1]
    bigger = parse_method(GUIDE.replace("return result;", "result++;\n    return result;"))
    g2 = GuidingPatch("g0", bigger, "", diff(body, bigger.children[-1]))
    g3 = GuidingPatch("a", method, "", diff(body, body))
    assert [x.patch_id for x in rank_guiding_patches([g, g3, g2])] == ["g0", "g1", "a"]


def test_splice_keeps_surroundings(setup):
    unit, method, _, g = setup
    out = splice_method(SRC, method.span, g.method)
    assert out.startswith("class Calc {\n    int limit;")
    assert "    int clamp(int value, int low) {\n        int result" in out
    assert out.rstrip().endswith("}")
    assert parse_function(out).find_method("clamp")[1].children[-1] == g.body


def test_workspace_lifecycle(project):
    ws = Workspace.create(project, "Calc.src")
    try:
        assert ws.root != project
        ws.write("changed")
        assert (project / "Calc.src").read_text() == SRC
        ws.restore()
        assert ws.target.read_text() == SRC
    finally:
        ws.dispose()
    assert not ws.root.exists()


def test_command_rendering(project):
    ws = Workspace.create(project, "Calc.src")
    try:
        text = TestCommand("{python} t.py {patched_file} {workdir}").render(ws)
        assert text == f"{sys.executable} t.py {ws.target} {ws.root}"
    finally:
        ws.dispose()


def test_run_command_kills_process_group(tmp_path):
    marker = tmp_path / "late"
    script = f"(sleep 2; touch {marker}) & sleep 5"
    start = time.monotonic()
    code, _ = run_command(script, tmp_path, 0.5)
    assert code is None
    assert time.monotonic() - start < 2
    time.sleep(2)
    assert not marker.exists()


@pytest.mark.parametrize("template, status", [
    ("exit 0", Status.PLAUSIBLE),
    ("exit 1", Status.FAILING),
    ("exit 2", Status.COMPILE_ERROR),
    ("sleep 5", Status.TIMEOUT),
])
def test_validation_status_mapping(project, setup, template, status):
    unit, method, table, g = setup
    pool = WorkspacePool(project, "Calc.src", TestCommand(template), Budget(per_test_timeout=0.5),
                         method.span)
    try:
        cand = next(_stream(method, table, g))
        out = pool(cand, 0.5)
    finally:
        pool.close()
    assert isinstance(out, ValidationOutcome) and out.status is status


def _stream(method, table, g):
    from skelfix.abstraction import Typer, abstract_modification
    from skelfix.analysis import check_method
    from skelfix.instantiation import generate_candidates
    typer = Typer(check_method(g.method, table), table)
    sks = {i: abstract_modification(m, typer) for i, m in enumerate(g.edit_script) if m.op != "delete"}
    return generate_candidates(g.edit_script, sks, table, method, g.body, Caps(), g.patch_id)


def _loop(project, setup, **kw):
    unit, method, table, g = setup
    budget = kw.pop("budget", Budget(per_test_timeout=10))
    pool = WorkspacePool(project, "Calc.src", kw.pop("command", COMMAND), budget, method.span)
    try:
        return repair_loop([g], method, table, budget, Caps(), pool, bug_id="calc", function="clamp", **kw)
    finally:
        pool.close()


def test_repair_loop_finds_and_stops(project, setup):
    report = _loop(project, setup)
    assert len(report.plausible) == 1
    assert WANT in report.plausible[0].method_text
    assert report.candidates_validated == report.plausible[0].candidate_id + 1
    report.finalize()
    assert report.status == "plausible_found"
    data = report.to_json()
    assert data["stats"]["per_status"]["plausible"] == 1
    assert data["guides"][0]["patch_id"] == "g1"


def test_repair_loop_parallel_matches_serial(project, setup):
    serial = _loop(project, setup)
    parallel = _loop(project, setup, workers=4)
    assert [p.to_json(timing=False) for p in serial.plausible] == \
        [p.to_json(timing=False) for p in parallel.plausible]


def test_keep_going_validates_everything(project, setup):
    report = _loop(project, setup, keep_going=True, command=TestCommand("{python} check.py {patched_file}"))
    assert report.candidates_validated == report.candidates_generated
    assert len(report.plausible) >= 1


def test_deadline_already_passed(project, setup):
    report = _loop(project, setup, deadline=time.monotonic() - 1)
    assert report.candidates_validated == 0 and report.budget_exhausted
    report.finalize()
    assert report.status == "budget_exhausted"


def test_wall_clock_budget_stops_loop(project, setup):
    budget = Budget(wall_clock_limit=1.0, per_test_timeout=5)
    start = time.monotonic()
    report = _loop(project, setup, budget=budget, command=TestCommand("sleep 0.3; exit 1"))
    assert time.monotonic() - start < 1.0 + 5
    assert report.budget_exhausted
    assert 1 <= report.candidates_validated <= 5


def test_report_finalize_keeps_config_error():
    r = RepairReport("x", status="config_error")
    r.finalize()
    assert r.status == "config_error"
    r = RepairReport("x")
    r.finalize()
    assert r.status == "no_plausible"
