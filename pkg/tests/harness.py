"""Drive candidate generation over corpus bugs without running any test command."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from skelfix.abstraction import Typer, abstract_modification
from skelfix.analysis import check_method, collect_scope
from skelfix.analysis.symbols import SymbolTable
from skelfix.config import Config
from skelfix.instantiation import Caps, CandidatePatch, CandidateStream, generate_candidates
from skelfix.pipeline import ingest_guiding_patches
from skelfix.syntax import AstNode, parse_function
from skelfix.syntax.parser import method_name
from skelfix.validation import GuidingPatch, rank_guiding_patches


@dataclass
class GuideRun:
    guide: GuidingPatch
    type_checks: bool
    skeletons: dict
    candidates: list[CandidatePatch]


@dataclass
class BugRun:
    name: str
    table: SymbolTable
    method: AstNode
    guides: list[GuideRun]

    @property
    def candidates(self) -> list[CandidatePatch]:
        return [c for g in self.guides for c in g.candidates]


def run_bug(bug_dir: Path, caps: Caps = Caps()) -> BugRun:
    meta = json.loads((bug_dir / "bug.json").read_text())
    unit = parse_function((bug_dir / meta.get("file", "buggy.src")).read_text())
    target = meta["function"]
    table = collect_scope(unit, target)
    _, method = unit.find_method(target)
    guides = [g for g in ingest_guiding_patches(bug_dir / "patches", Config(), unit)
              if method_name(g.method) == target]
    state = CandidateStream()
    runs = []
    for g in rank_guiding_patches(guides):
        result = check_method(g.method, table)
        typer = Typer(result, table)
        skeletons = {i: abstract_modification(m, typer) for i, m in enumerate(g.edit_script)
                     if m.op != "delete"}
        cands = list(generate_candidates(g.edit_script, skeletons, table, method, g.body,
                                         caps, g.patch_id, state))
        runs.append(GuideRun(g, result.ok, skeletons, cands))
    return BugRun(bug_dir.name, table, method, runs)


def synthetic_guides(bug_dir: Path, count: int, seed: int = 0) -> list[GuidingPatch]:
    """Seeded mutants of the buggy function, used as extra guiding patches."""
    import random

    from mutation import mutate, statement_pool
    from skelfix.differencing import diff
    from skelfix.syntax import parse_method, pretty_print, renumber

    meta = json.loads((bug_dir / "bug.json").read_text())
    unit = parse_function((bug_dir / meta.get("file", "buggy.src")).read_text())
    _, method = unit.find_method(meta["function"])
    body = method.children[-1]
    pool = statement_pool([m.children[-1] for _, m in unit.methods()])
    rng = random.Random(f"{bug_dir.name}-{seed}")
    out = []
    for i in range(count):
        mutant = renumber(mutate(body, pool, rng))
        text = pretty_print(method.with_children(list(method.children[:-1]) + [mutant]), multiline=True)
        g = parse_method(text)
        script = diff(body, g.children[-1])
        if len(script):
            out.append(GuidingPatch(f"synthetic{i:03d}", g, text, script))
    return out


def run_guides(bug_dir: Path, guides: list[GuidingPatch], caps: Caps = Caps()) -> BugRun:
    meta = json.loads((bug_dir / "bug.json").read_text())
    unit = parse_function((bug_dir / meta.get("file", "buggy.src")).read_text())
    table = collect_scope(unit, meta["function"])
    _, method = unit.find_method(meta["function"])
    state = CandidateStream()
    runs = []
    for g in rank_guiding_patches(guides):
        result = check_method(g.method, table)
        typer = Typer(result, table)
        skeletons = {i: abstract_modification(m, typer) for i, m in enumerate(g.edit_script)
                     if m.op != "delete"}
        cands = list(generate_candidates(g.edit_script, skeletons, table, method, g.body,
                                         caps, g.patch_id, state))
        runs.append(GuideRun(g, result.ok, skeletons, cands))
    return BugRun(bug_dir.name, table, method, runs)
