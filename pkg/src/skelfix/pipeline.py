"""End-to-end orchestration of one repair run over a bug directory.

A bug directory holds::

    bug.json        {"bug_id", "function", "file" (default buggy.src), "test_command"}
    buggy.src       the source file under repair
    patches/        guiding patches, one whole replacement function per *.patch.src
    fl.json         optional ranked list of suspicious functions
"""

from __future__ import annotations

import json
import logging
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .analysis.symbols import UnknownFunction, collect_scope
from .config import Config, ConfigError
from .differencing import diff
from .instantiation import CandidateStream
from .syntax.lexer import ParseError
from .syntax.parser import SourceUnit, method_name, parse_function, parse_method
from .syntax.printer import pretty_print
from .validation import (
    GuidingPatch,
    RepairReport,
    TestCommand,
    WorkspacePool,
    repair_loop,
)

log = logging.getLogger(__name__)

EXIT_PLAUSIBLE = 0
EXIT_NONE = 10
EXIT_CONFIG = 20


class EndpointError(RuntimeError):
    def __init__(self, message: str, status: Optional[int] = None):
        super().__init__(message)
        self.status = status


class EmptyBundle(ValueError):
    pass


@dataclass(frozen=True)
class FaultRanking:
    entries: tuple[tuple[str, str, float], ...]

    def __post_init__(self) -> None:
        scores = [e[2] for e in self.entries]
        if any(b > a for a, b in zip(scores, scores[1:])):
            raise ConfigError("fault localization scores must be non-increasing")

    @classmethod
    def load(cls, path: Path) -> "FaultRanking":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            if not isinstance(data, list):
                raise TypeError("expected a JSON list")
            entries = tuple((str(e.get("file", "")), str(e["function"]), float(e.get("score", 0.0)))
                            for e in data)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"cannot read fault localization file {path}: {exc}") from exc
        return cls(entries)

    def functions(self, file: Optional[str] = None) -> list[str]:
        out = []
        for f, fn, _ in self.entries:
            if file and f and Path(f).name != Path(file).name:
                continue
            if fn not in out:
                out.append(fn)
        return out


@dataclass(frozen=True)
class BugSpec:
    bug_id: str
    function: str
    file: str
    test_command: Optional[str]
    compile_error_code: Optional[int] = None

    @classmethod
    def load(cls, bug_dir: Path) -> "BugSpec":
        path = bug_dir / "bug.json"
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return cls(str(data.get("bug_id", bug_dir.name)), str(data["function"]),
                       str(data.get("file", "buggy.src")), data.get("test_command"),
                       data.get("compile_error_code"))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc


# --- guiding patches -----------------------------------------------------------------

def build_prompt(cfg: Config, unit: SourceUnit, function: str) -> str:
    _, m = unit.find_method(function)
    return cfg.prompt_template.replace("{function}", pretty_print(m, multiline=True)) \
        .replace("{function_name}", function)


def request_patches(cfg: Config, prompt: str, n: int) -> list[str]:
    """Ask the configured endpoint for ``n`` whole-function patches."""
    payload = json.dumps({"prompt": prompt, "n": n, "top_p": cfg.sampling.top_p,
                          "temperature": cfg.sampling.temperature}).encode("utf-8")
    req = urllib.request.Request(cfg.llm_endpoint, data=payload, method="POST",
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=cfg.endpoint_timeout) as resp:
            body = json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        raise EndpointError(f"endpoint returned HTTP {exc.code}", exc.code) from exc
    except (urllib.error.URLError, OSError) as exc:
        raise EndpointError(f"endpoint unreachable: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise EndpointError(f"endpoint returned invalid JSON: {exc}") from exc
    patches = body.get("patches") if isinstance(body, dict) else None
    if not isinstance(patches, list) or not all(isinstance(p, str) for p in patches):
        raise EndpointError("endpoint reply lacks a 'patches' list of strings")
    return patches


def ingest_guiding_patches(source: Union[Path, str, None], cfg: Config,
                           buggy_unit: Optional[SourceUnit] = None,
                           functions: Sequence[str] = ()) -> list[GuidingPatch]:
    """Parse guiding patches from a directory, or from the endpoint when ``source`` is None.

    Unparseable patches are logged and skipped; patches whose function does
    not exist in ``buggy_unit`` are skipped too. At most
    ``cfg.max_patches_per_bug`` patches are kept, in file-name order.
    """
    texts: list[tuple[str, str]] = []
    if source is None:
        if not cfg.llm_endpoint:
            raise ConfigError("no patch directory and no endpoint configured")
        if buggy_unit is None or not functions:
            raise ConfigError("endpoint mode needs the buggy unit and target function")
        for fn in functions:
            prompt = build_prompt(cfg, buggy_unit, fn)
            for i, text in enumerate(request_patches(cfg, prompt, cfg.max_patches_per_bug)):
                texts.append((f"{fn}-{i:04d}", text))
    else:
        for path in sorted(Path(source).glob("*.patch.src")):
            texts.append((path.name[: -len(".patch.src")], path.read_text(encoding="utf-8")))
    out: list[GuidingPatch] = []
    for pid, text in texts:
        if len(out) >= cfg.max_patches_per_bug:
            break
        try:
            method = parse_method(text)
        except ParseError as exc:
            log.warning("skipping unparseable patch %s: %s", pid, exc)
            continue
        script = None
        if buggy_unit is not None:
            try:
                _, buggy = buggy_unit.find_method(method_name(method))
            except KeyError:
                log.warning("skipping patch %s: no function %s in the buggy file", pid, method_name(method))
                continue
            script = diff(buggy.children[-1], method.children[-1])
        out.append(GuidingPatch(pid, method, text, script))
    if not out:
        raise EmptyBundle("no parseable guiding patch")
    return out


# --- the run --------------------------------------------------------------------------

def _load_extra_units(directory: Optional[str]) -> list[SourceUnit]:
    if not directory:
        return []
    units = []
    for path in sorted(Path(directory).glob("*.src")):
        try:
            units.append(parse_function(path.read_text(encoding="utf-8")))
        except (OSError, ParseError) as exc:
            raise ConfigError(f"cannot parse extra source {path}: {exc}") from exc
    return units


def write_report(report: RepairReport, path: Path) -> dict:
    data = report.to_json()
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return data


def run_repair(bug_dir: Union[Path, str], cfg: Config, fl_path: Optional[Path] = None,
               dump_symbols: bool = False, report_path: Optional[Path] = None
               ) -> tuple[int, RepairReport]:
    """Repair one bug directory; returns the exit status and the report.

    The report is also written to ``report.json`` in the bug directory (or
    ``report_path``).
    """
    started = time.monotonic()
    bug_dir = Path(bug_dir)
    out_path = report_path or bug_dir / "report.json"
    report = RepairReport(bug_dir.name)

    def fail(msg: str) -> tuple[int, RepairReport]:
        log.error("%s", msg)
        report.status = "config_error"
        report.messages.append(msg)
        report.wall_time = time.monotonic() - started
        try:
            write_report(report, out_path)
        except OSError:
            pass
        return EXIT_CONFIG, report

    try:
        bug = BugSpec.load(bug_dir)
        report.bug_id = bug.bug_id
        if bug.test_command and not cfg.test_command:
            cfg = cfg.merged({"test_command": bug.test_command})
        if bug.compile_error_code is not None:
            cfg = cfg.merged({"compile_error_code": bug.compile_error_code})
        if not cfg.test_command:
            raise ConfigError("no test command configured")
        source_path = bug_dir / bug.file
        try:
            unit = parse_function(source_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read {source_path}: {exc}") from exc
        except ParseError as exc:
            raise ConfigError(f"cannot parse {source_path}: {exc}") from exc
        extras = _load_extra_units(cfg.extra_sources)
        if fl_path is None and (bug_dir / "fl.json").exists():
            fl_path = bug_dir / "fl.json"
        functions = FaultRanking.load(fl_path).functions(bug.file) if fl_path else [bug.function]
        known = {method_name(m) for _, m in unit.methods()}
        functions = [f for f in functions if f in known]
        if not functions:
            raise ConfigError("none of the ranked functions exists in the buggy file")
        patch_dir = bug_dir / "patches"
        source = patch_dir if patch_dir.is_dir() or not cfg.llm_endpoint else None
        guides = ingest_guiding_patches(source, cfg, unit, functions)
    except (ConfigError, EmptyBundle, EndpointError) as exc:
        return fail(str(exc))

    by_function: dict[str, list[GuidingPatch]] = {}
    for g in guides:
        by_function.setdefault(method_name(g.method), []).append(g)

    deadline = started + cfg.budget.wall_clock_limit
    state = CandidateStream()
    command = TestCommand(cfg.test_command, cfg.compile_error_code)
    for idx, fn in enumerate(functions):
        now = time.monotonic()
        if now >= deadline:
            report.budget_exhausted = True
            break
        share = (deadline - now) / (len(functions) - idx)
        try:
            table = collect_scope(unit, fn, extras)
        except UnknownFunction as exc:
            report.messages.append(f"unknown function {exc}")
            continue
        if dump_symbols:
            print(table.dumps())
        fn_guides = by_function.get(fn, [])
        report.functions.append(fn)
        if not fn_guides:
            report.messages.append(f"no guiding patch for {fn}")
            continue
        _, method = unit.find_method(fn)
        pool = WorkspacePool(bug_dir, bug.file, command, cfg.budget, method.span)
        try:
            repair_loop(fn_guides, method, table, cfg.budget, cfg.caps, pool,
                        bug_id=bug.bug_id, function=fn, keep_going=cfg.keep_going,
                        workers=cfg.validation_workers, report=report, state=state,
                        deadline=now + share)
        finally:
            pool.close()
        if time.monotonic() < deadline:
            report.budget_exhausted = False
        if report.plausible and not cfg.keep_going:
            break
    report.wall_time = time.monotonic() - started
    report.finalize()
    write_report(report, out_path)
    return (EXIT_PLAUSIBLE if report.plausible else EXIT_NONE), report
