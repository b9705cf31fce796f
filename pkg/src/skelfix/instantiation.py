"""Filling skeleton holes and combining modifications into candidate patches."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .abstraction import HoleKind, Hole, Skeleton
from .analysis.checker import check_method, infix_result, prefix_result
from .analysis.symbols import (
    SymbolTable,
    candidate_classes,
    candidate_methods,
    type_compatible,
    visible_variables,
)
from .analysis.types import class_ref, is_numeric
from .differencing import EditScript, Modification, apply_edit_script, token_edit_distance
from .syntax.lexer import ParseError
from .syntax.nodes import AstNode, NodeKind as K
from .syntax.parser import parse_method
from .syntax.printer import pretty_print

log = logging.getLogger(__name__)

INFIX_OPS = ("+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "&&", "||", "&", "|", "^")
PREFIX_OPS = ("!", "-", "+", "~", "++", "--")
POSTFIX_OPS = ("++", "--")

_FAMILIES = (
    frozenset({"&&", "||"}),
    frozenset({"<", ">", "<=", ">="}),
    frozenset({"==", "!="}),
    frozenset({"+", "-", "*", "/", "%"}),
    frozenset({"&", "|", "^"}),
)


class NoFilling(LookupError):
    """Some hole of a skeleton has no admissible element."""


@dataclass(frozen=True)
class Caps:
    max_candidates_per_skeleton: int = 500
    max_mods_per_patch: int = 3
    max_candidates_per_subset: int = 500
    # fillings scored per skeleton before the best ``max_candidates_per_skeleton`` are kept
    enumeration_budget: int = 20000
    # combinations tried per subset, whether or not they survive the re-check
    attempts_per_subset: int = 5000

    def __post_init__(self) -> None:
        for name in ("max_candidates_per_skeleton", "max_mods_per_patch",
                     "max_candidates_per_subset", "enumeration_budget", "attempts_per_subset"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Filling:
    """hole_id -> chosen token."""

    tokens: tuple[str, ...]

    def to_json(self) -> dict[str, str]:
        return {str(i): t for i, t in enumerate(self.tokens)}


@dataclass(frozen=True)
class Instantiation:
    statement: AstNode
    filling: Filling
    tier: int
    distance: int


@dataclass(frozen=True)
class CandidatePatch:
    candidate_id: int
    guiding_patch_id: str
    applied_modifications: tuple[Modification, ...]
    subset: tuple[int, ...]
    fillings: tuple[Optional[Filling], ...]
    patched_body: AstNode
    patched_method: AstNode
    distance_to_guide: int
    ranks: tuple[int, ...] = ()

    @property
    def text(self) -> str:
        return self.patched_body.text

    def provenance(self) -> dict:
        return {
            "guide": self.guiding_patch_id,
            "subset": list(self.subset),
            "operations": [m.op for m in self.applied_modifications],
            "filling": [f.to_json() if f is not None else None for f in self.fillings],
            "distance": self.distance_to_guide,
        }


# --- per-hole candidate sets -----------------------------------------------------

def _op_family(op: str) -> frozenset[str]:
    for fam in _FAMILIES:
        if op in fam:
            return fam
    return frozenset({op})


def _infix_domain(h: Hole, table: SymbolTable) -> list[str]:
    ta, tb = (h.operand_types + (None, None))[:2]
    if ta is None or tb is None:
        return [o for o in INFIX_OPS if o in _op_family(h.origin_token)]
    out = []
    for o in INFIX_OPS:
        r, msg = infix_result(o, ta, tb, table)
        if msg is None and r is not None and type_compatible(r, h.constraint, table):
            out.append(o)
    return out


def _prefix_domain(h: Hole, table: SymbolTable) -> list[str]:
    t = h.operand_types[0] if h.operand_types else None
    out = []
    for o in PREFIX_OPS:
        if o in ("++", "--"):
            if not h.operand_is_variable or not is_numeric(t):
                continue
            r = t
        else:
            r, msg = prefix_result(o, t)
            if msg is not None or r is None:
                continue
        if type_compatible(r, h.constraint, table):
            out.append(o)
    return out


def hole_candidates(h: Hole, table: SymbolTable, site: int) -> list[str]:
    """Admissible tokens for one hole; the origin token is always first."""
    k = h.hole_kind
    names: list[str] = []
    if k is HoleKind.VAR and not h.member:
        names = [v.name for v in visible_variables(site, h.constraint, table)]
    elif k is HoleKind.VAR:
        if h.owner is not None:
            for f in table.fields_of(h.owner):
                if h.qualifier == "class" and not f.is_static:
                    continue
                if type_compatible(f.declared_type, h.constraint, table):
                    names.append(f.name)
    elif k is HoleKind.FNAME:
        if h.qualifier == "none":
            recv = None
        elif h.qualifier == "class":
            recv = class_ref(h.owner) if h.owner else None
        else:
            recv = h.owner
        if h.qualifier == "none" or recv is not None:
            arg_types = h.constraint.arg_types or None
            names = [m.name for m in candidate_methods(recv, h.arity, h.constraint, table, arg_types)]
    elif k is HoleKind.CNAME:
        arg_types = h.constraint.arg_types or None
        names = [c.name for c in candidate_classes(h.constraint, h.arity, table, arg_types)]
    elif k is HoleKind.INFIX_OP:
        names = _infix_domain(h, table)
    elif k is HoleKind.PREFIX_OP:
        names = _prefix_domain(h, table)
    elif k is HoleKind.POSTFIX_OP:
        names = list(POSTFIX_OPS)
    out = [h.origin_token]
    for n in names:
        if n not in out:
            out.append(n)
    return out


def _banded_distance(a: Sequence[str], b: Sequence[str], changed: int) -> int:
    """Levenshtein distance of equal-length sequences differing in ``changed`` places.

    The distance never exceeds the number of differing positions, so only
    the diagonal band of that width needs to be filled.
    """
    if changed <= 1:
        return changed
    n, band = len(a), changed
    inf = n + n + 1
    prev = {j: j for j in range(0, min(n, band) + 1)}
    for i in range(1, n + 1):
        cur = {}
        for j in range(max(0, i - band), min(n, i + band) + 1):
            if j == 0:
                cur[j] = i
                continue
            best = prev.get(j - 1, inf) + (a[i - 1] != b[j - 1])
            best = min(best, prev.get(j, inf) + 1, cur.get(j - 1, inf) + 1)
            cur[j] = best
        prev = cur
    return prev[n]


def instantiate_skeleton(s: Skeleton, table: SymbolTable, site: int, cap: int = 500,
                         common: frozenset[str] = frozenset(),
                         budget: int = 20000) -> list[Instantiation]:
    """Ordered instantiations of ``s``: common-element tier first, then by distance.

    Fillings are scored in order of how many holes they change, up to
    ``budget`` of them, and the best ``cap`` are returned. The identity
    filling (every hole keeps its origin token) is always first.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    if not s.holes:
        return [Instantiation(s.root, Filling(()), 0, 0)]
    pools = [hole_candidates(h, table, site) for h in s.holes]
    for h, pool in zip(s.holes, pools):
        if not pool:
            raise NoFilling(f"hole {h.hole_id} ({h.hole_kind.value}) has no candidates")
    pinned = [h.hole_kind in (HoleKind.VAR, HoleKind.FNAME, HoleKind.CNAME) and h.origin_token in common
              for h in s.holes]
    template, positions = s.token_template()
    scored: list[tuple[int, int, int, tuple[int, ...]]] = []
    seq = 0
    n = len(s.holes)
    done = False
    for k in range(0, n + 1):
        for which in itertools.combinations(range(n), k):
            alts = [range(1, len(pools[i])) for i in which]
            for picks in itertools.product(*alts):
                choice = [0] * n
                for i, p in zip(which, picks):
                    choice[i] = p
                tier = 1 if any(pinned[i] for i in which) else 0
                if k:
                    toks = list(template)
                    for i in which:
                        toks[positions[i]] = pools[i][choice[i]]
                    lo = min(positions[i] for i in which)
                    hi = max(positions[i] for i in which) + 1
                    dist = _banded_distance(template[lo:hi], toks[lo:hi], k)
                else:
                    dist = 0
                scored.append((tier, dist, seq, tuple(choice)))
                seq += 1
                if seq >= budget:
                    done = True
                    break
            if done:
                break
        if done:
            break
    scored.sort()
    out = []
    for tier, dist, _, choice in scored[:cap]:
        tokens = tuple(pools[i][c] for i, c in enumerate(choice))
        out.append(Instantiation(s.fill(tokens), Filling(tokens), tier, dist))
    return out


# --- subsets and combinations -------------------------------------------------------

def select_modification_subsets(script: EditScript | Sequence[Modification],
                                 max_mods: int = 3) -> list[tuple[int, ...]]:
    """Index subsets of ``script`` to try, most promising first.

    The whole script comes first when it is small enough; then every subset of
    at most ``max_mods`` modifications by descending total complexity, ties in
    document order.
    """
    mods = list(script)
    n = len(mods)
    if n == 0:
        return []
    out: list[tuple[int, ...]] = []
    full = tuple(range(n))
    if n <= max_mods:
        out.append(full)
    rest = []
    for size in range(1, min(max_mods, n) + 1):
        for combo in itertools.combinations(range(n), size):
            if combo != full:
                rest.append(combo)
    rest.sort(key=lambda c: (-sum(mods[i].complexity for i in c), c))
    out.extend(rest)
    return out


def rank_sum_order(lengths: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All rank tuples below ``lengths`` by ascending rank sum, then lexicographically."""
    if not lengths or any(n <= 0 for n in lengths):
        return

    def tuples_with_sum(i: int, remaining: int) -> Iterator[tuple[int, ...]]:
        if i == len(lengths) - 1:
            if remaining < lengths[i]:
                yield (remaining,)
            return
        for r in range(min(remaining, lengths[i] - 1) + 1):
            for tail in tuples_with_sum(i + 1, remaining - r):
                yield (r,) + tail

    for total in range(sum(n - 1 for n in lengths) + 1):
        yield from tuples_with_sum(0, total)


def modification_site(buggy_body: AstNode, m: Modification) -> int:
    """Source offset whose scope governs the names an introduced statement may use."""
    if m.op == "update":
        return buggy_body.at(m.path).span[0]
    container = buggy_body.at(m.container_path)
    off = 1 if container.kind is K.SwitchCase else 0
    stmts = container.children[off:]
    if m.index < len(stmts):
        return stmts[m.index].span[0]
    return max(container.span[1] - 1, container.span[0])


def replace_body(method: AstNode, body: AstNode) -> AstNode:
    return method.with_children(list(method.children[:-1]) + [body])


def recheck(method: AstNode, table: SymbolTable) -> Optional[AstNode]:
    """Reparse the printed method and type-check it; the reparsed tree or None."""
    try:
        reparsed = parse_method(pretty_print(method))
    except ParseError:
        return None
    return reparsed if check_method(reparsed, table).ok else None


@dataclass
class CandidateStream:
    """State shared across the streams of several guides (ids, dedup keys)."""

    next_id: int = 0
    seen: set[str] = field(default_factory=set)
    instantiation_sizes: list[int] = field(default_factory=list)
    generated: int = 0
    rejected: int = 0


def generate_candidates(script: EditScript, skeletons: dict[int, Skeleton], table: SymbolTable,
                        buggy_method: AstNode, guide_body: AstNode, caps: Caps = Caps(),
                        guide_id: str = "guide", state: Optional[CandidateStream] = None
                        ) -> Iterator[CandidatePatch]:
    """Lazily yield type-correct candidates for one guide.

    ``skeletons`` maps the index of every Update/Insert in ``script`` to its
    skeleton; modifications whose skeleton is missing are skipped.
    """
    state = state if state is not None else CandidateStream()
    buggy_body = buggy_method.children[-1]
    buggy_text = buggy_body.text
    state.seen.add(buggy_text)
    common = frozenset(buggy_body.tokens)
    guide_tokens = guide_body.tokens
    mods = list(script)
    cache: dict[int, Optional[list[Instantiation]]] = {}

    def options(i: int) -> Optional[list[Optional[Instantiation]]]:
        m = mods[i]
        if m.op == "delete":
            return [None]
        if i not in cache:
            sk = skeletons.get(i)
            if sk is None:
                cache[i] = None
            else:
                try:
                    insts = instantiate_skeleton(sk, table, modification_site(buggy_body, m),
                                                 caps.max_candidates_per_skeleton, common,
                                                 caps.enumeration_budget)
                except NoFilling as exc:
                    log.debug("no filling for modification %d: %s", i, exc)
                    insts = None
                cache[i] = insts
                if insts is not None:
                    state.instantiation_sizes.append(len(insts))
        return cache[i]

    for subset in select_modification_subsets(mods, caps.max_mods_per_patch):
        lists = [options(i) for i in subset]
        if any(lst is None for lst in lists):
            continue
        emitted = attempts = 0
        for ranks in rank_sum_order([len(lst) for lst in lists]):
            if emitted >= caps.max_candidates_per_subset or attempts >= caps.attempts_per_subset:
                break
            attempts += 1
            chosen = [lst[r] for lst, r in zip(lists, ranks)]
            applied = tuple(mods[i] if inst is None else mods[i].with_introduced(inst.statement)
                            for i, inst in zip(subset, chosen))
            body = apply_edit_script(buggy_body, applied)
            text = body.text
            if text in state.seen:
                continue
            state.seen.add(text)
            checked = recheck(replace_body(buggy_method, body), table)
            if checked is None:
                state.rejected += 1
                continue
            emitted += 1
            state.generated += 1
            cand = CandidatePatch(
                candidate_id=state.next_id,
                guiding_patch_id=guide_id,
                applied_modifications=applied,
                subset=subset,
                fillings=tuple(inst.filling if inst else None for inst in chosen),
                patched_body=checked.children[-1],
                patched_method=checked,
                distance_to_guide=token_edit_distance(checked.children[-1].tokens, guide_tokens),
                ranks=ranks,
            )
            state.next_id += 1
            yield cand
