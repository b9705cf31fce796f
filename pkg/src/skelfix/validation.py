"""Guide ranking, test-command validation and the repair loop."""

from __future__ import annotations

import enum
import hashlib
import logging
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .abstraction import Typer, abstract_modification, render_skeleton
from .analysis.checker import check_method
from .analysis.symbols import SymbolTable
from .differencing import EditScript
from .instantiation import CandidatePatch, CandidateStream, Caps, generate_candidates
from .syntax.nodes import AstNode
from .syntax.printer import pretty_print

log = logging.getLogger(__name__)


class WorkspaceError(OSError):
    pass


class Status(str, enum.Enum):
    PLAUSIBLE = "plausible"
    FAILING = "failing"
    COMPILE_ERROR = "compile_error"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class Budget:
    wall_clock_limit: float = 5 * 3600.0
    per_test_timeout: float = 300.0

    def __post_init__(self) -> None:
        if self.per_test_timeout <= 0:
            raise ValueError("per_test_timeout must be positive")
        if self.wall_clock_limit < 0:
            raise ValueError("wall_clock_limit must be non-negative")


@dataclass(frozen=True)
class GuidingPatch:
    patch_id: str
    method: AstNode
    raw_text: str
    edit_script: EditScript

    @property
    def body(self) -> AstNode:
        return self.method.children[-1]

    @property
    def insert_update_count(self) -> int:
        return self.edit_script.insert_update_count


@dataclass(frozen=True)
class ValidationOutcome:
    candidate_id: int
    status: Status
    elapsed: float
    test_output_digest: str


def rank_guiding_patches(patches: Iterable[GuidingPatch]) -> list[GuidingPatch]:
    """More inserted/updated statements first; ties by patch id."""
    return sorted(patches, key=lambda g: (-g.insert_update_count, g.patch_id))


# --- workspaces and the test command -------------------------------------------------

def splice_method(raw_text: str, span: tuple[int, int], method: AstNode) -> str:
    """Replace the source text of one method with the canonical text of another."""
    start, end = span
    line_start = raw_text.rfind("\n", 0, start) + 1
    indent = raw_text[line_start:start]
    if indent.strip():
        indent = ""
    lines = pretty_print(method, multiline=True).split("\n")
    text = lines[0] + "".join("\n" + indent + ln if ln else "\n" for ln in lines[1:])
    return raw_text[:start] + text + raw_text[end:]


@dataclass
class Workspace:
    """A private copy of the project with one file under repair."""

    root: Path
    target: Path
    pristine: str

    @classmethod
    def create(cls, project_dir: Path, target_rel: str, base_dir: Optional[Path] = None) -> "Workspace":
        try:
            root = Path(tempfile.mkdtemp(prefix="skelfix-ws-", dir=base_dir))
            shutil.copytree(project_dir, root, dirs_exist_ok=True,
                            ignore=shutil.ignore_patterns("report.json", "__pycache__"))
            target = root / target_rel
            pristine = target.read_text(encoding="utf-8")
        except OSError as exc:
            raise WorkspaceError(f"cannot prepare workspace: {exc}") from exc
        return cls(root, target, pristine)

    def write(self, text: str) -> None:
        try:
            self.target.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise WorkspaceError(f"cannot write {self.target}: {exc}") from exc

    def restore(self) -> None:
        self.write(self.pristine)

    def dispose(self) -> None:
        shutil.rmtree(self.root, ignore_errors=True)


@dataclass(frozen=True)
class TestCommand:
    __test__ = False  # not a pytest class

    template: str
    compile_error_code: int = 2

    def render(self, ws: Workspace) -> str:
        return (self.template.replace("{workdir}", str(ws.root))
                .replace("{patched_file}", str(ws.target))
                .replace("{python}", sys.executable))


def run_command(command: str, cwd: Path, timeout: float) -> tuple[Optional[int], bytes]:
    """Run ``command`` through the shell; ``(None, output)`` on timeout.

    The command gets its own process group so that everything it spawned is
    killed when the deadline passes.
    """
    proc = subprocess.Popen(command, shell=True, cwd=cwd, stdout=subprocess.PIPE,
                            stderr=subprocess.STDOUT, start_new_session=True)
    try:
        out, _ = proc.communicate(timeout=max(timeout, 0.001))
        return proc.returncode, out
    except subprocess.TimeoutExpired:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, _ = proc.communicate()
        return None, out


def validate(candidate: CandidatePatch, workspace: Workspace, budget: Budget,
             command: TestCommand, method_span: tuple[int, int],
             timeout: Optional[float] = None) -> ValidationOutcome:
    """Write the candidate into the workspace, run the tests, restore the file."""
    text = splice_method(workspace.pristine, method_span, candidate.patched_method)
    limit = budget.per_test_timeout if timeout is None else timeout
    start = time.monotonic()
    workspace.write(text)
    try:
        code, out = run_command(command.render(workspace), workspace.root, limit)
    except OSError as exc:
        raise WorkspaceError(f"cannot run test command: {exc}") from exc
    finally:
        workspace.restore()
    elapsed = time.monotonic() - start
    if code is None:
        status = Status.TIMEOUT
    elif code == 0:
        status = Status.PLAUSIBLE
    elif code == command.compile_error_code:
        status = Status.COMPILE_ERROR
    else:
        status = Status.FAILING
    digest = hashlib.sha256(out).hexdigest()[:16]
    return ValidationOutcome(candidate.candidate_id, status, elapsed, digest)


Validator = Callable[[CandidatePatch, float], ValidationOutcome]


class WorkspacePool:
    """One workspace per worker thread, created on first use."""

    def __init__(self, project_dir: Path, target_rel: str, command: TestCommand,
                 budget: Budget, method_span: tuple[int, int]):
        self.project_dir = project_dir
        self.target_rel = target_rel
        self.command = command
        self.budget = budget
        self.method_span = method_span
        self._free: list[Workspace] = []
        self._all: list[Workspace] = []
        self._lock = threading.Lock()

    def __call__(self, candidate: CandidatePatch, timeout: float) -> ValidationOutcome:
        with self._lock:
            ws = self._free.pop() if self._free else None
        if ws is None:
            ws = Workspace.create(self.project_dir, self.target_rel)
            with self._lock:
                self._all.append(ws)
        try:
            return validate(candidate, ws, self.budget, self.command, self.method_span, timeout)
        finally:
            with self._lock:
                self._free.append(ws)

    def close(self) -> None:
        for ws in self._all:
            ws.dispose()
        self._all.clear()
        self._free.clear()


# --- the loop -------------------------------------------------------------------------

@dataclass
class PlausiblePatch:
    candidate_id: int
    function: str
    text: str
    method_text: str
    provenance: dict
    elapsed: float

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "candidate_id": self.candidate_id,
            "function": self.function,
            "patch": self.method_text,
            "body": self.text,
            "provenance": self.provenance,
        }
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out


@dataclass
class GuideTrace:
    patch_id: str
    function: str
    insert_update_count: int
    modifications: int
    skeletons: list[str] = field(default_factory=list)
    candidates: int = 0
    validated: int = 0
    distances: list[int] = field(default_factory=list)


@dataclass
class RepairReport:
    bug_id: str
    status: str = "no_plausible"
    plausible: list[PlausiblePatch] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=lambda: {s.value: 0 for s in Status})
    candidates_generated: int = 0
    candidates_validated: int = 0
    candidates_rejected: int = 0
    wall_time: float = 0.0
    guides: list[GuideTrace] = field(default_factory=list)
    instantiation_sizes: list[int] = field(default_factory=list)
    functions: list[str] = field(default_factory=list)
    messages: list[str] = field(default_factory=list)
    budget_exhausted: bool = False

    def finalize(self) -> None:
        if self.status == "config_error":
            return
        if self.budget_exhausted:
            self.status = "budget_exhausted"
        elif self.plausible:
            self.status = "plausible_found"
        else:
            self.status = "no_plausible"

    def to_json(self, timing: bool = True) -> dict:
        stats = {
            "candidates_generated": self.candidates_generated,
            "candidates_validated": self.candidates_validated,
            "candidates_rejected": self.candidates_rejected,
            "per_status": dict(self.counts),
            "guides_processed": len(self.guides),
            "max_instantiations_per_skeleton": max(self.instantiation_sizes, default=0),
        }
        if timing:
            stats["wall_time"] = round(self.wall_time, 6)
        return {
            "bug_id": self.bug_id,
            "status": self.status,
            "functions": list(self.functions),
            "plausible": [p.to_json(timing) for p in self.plausible],
            "stats": stats,
            "guides": [
                {"patch_id": g.patch_id, "function": g.function,
                 "insert_update_count": g.insert_update_count, "modifications": g.modifications,
                 "skeletons": g.skeletons, "candidates": g.candidates, "validated": g.validated}
                for g in self.guides
            ],
            "messages": list(self.messages),
        }


def _candidate_stream(guides: Sequence[GuidingPatch], buggy_method: AstNode, table: SymbolTable,
                      caps: Caps, state: CandidateStream, report: RepairReport, function: str,
                      out_of_time: Callable[[], bool]):
    for guide in rank_guiding_patches(guides):
        if out_of_time():
            return
        script = guide.edit_script
        trace = GuideTrace(guide.patch_id, function, guide.insert_update_count, len(script))
        report.guides.append(trace)
        if not len(script):
            continue
        typer = Typer(check_method(guide.method, table), table)
        skeletons = {}
        for i, m in enumerate(script):
            if m.op != "delete":
                skeletons[i] = abstract_modification(m, typer)
        trace.skeletons = [render_skeleton(s) for _, s in sorted(skeletons.items())]
        for cand in generate_candidates(script, skeletons, table, buggy_method, guide.body,
                                        caps, guide.patch_id, state):
            trace.candidates += 1
            yield trace, cand
            if out_of_time():
                return


def repair_loop(guides: Sequence[GuidingPatch], buggy_method: AstNode, table: SymbolTable,
                budget: Budget, caps: Caps, validator: Validator, *, bug_id: str = "",
                function: str = "", keep_going: bool = False, workers: int = 1,
                report: Optional[RepairReport] = None, state: Optional[CandidateStream] = None,
                deadline: Optional[float] = None) -> RepairReport:
    """Validate the candidates of every guide, best-ranked guide first.

    Without ``keep_going`` the loop stops at the first plausible patch. The
    wall-clock deadline is checked before every validation; a run already in
    flight may use its own per-test timeout.
    """
    started = time.monotonic()
    if deadline is None:
        deadline = started + budget.wall_clock_limit
    report = report if report is not None else RepairReport(bug_id)
    state = state if state is not None else CandidateStream()
    if function and function not in report.functions:
        report.functions.append(function)

    def out_of_time() -> bool:
        return time.monotonic() >= deadline

    if out_of_time():
        report.budget_exhausted = True
        report.wall_time += time.monotonic() - started
        return report

    stream = _candidate_stream(guides, buggy_method, table, caps, state, report, function, out_of_time)
    pending: deque = deque()
    stop = False
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        def submit_next() -> bool:
            if out_of_time():
                return False
            try:
                trace, cand = next(stream)
            except StopIteration:
                return False
            pending.append((trace, cand, pool.submit(validator, cand, budget.per_test_timeout)))
            return True

        while not stop:
            while len(pending) < max(1, workers) and submit_next():
                pass
            if not pending:
                break
            trace, cand, fut = pending.popleft()
            outcome = fut.result()
            report.candidates_validated += 1
            report.counts[outcome.status.value] += 1
            trace.validated += 1
            trace.distances.append(cand.distance_to_guide)
            if outcome.status is Status.PLAUSIBLE:
                report.plausible.append(PlausiblePatch(
                    cand.candidate_id, function, cand.text,
                    pretty_print(cand.patched_method, multiline=True),
                    cand.provenance(), outcome.elapsed))
                if not keep_going:
                    stop = True
        for _, _, fut in pending:
            fut.cancel()
    if out_of_time() and not (report.plausible and not keep_going):
        report.budget_exhausted = True
    report.candidates_generated = state.generated
    report.candidates_rejected = state.rejected
    report.instantiation_sizes = list(state.instantiation_sizes)
    report.wall_time += time.monotonic() - started
    return report
