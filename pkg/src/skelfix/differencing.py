"""Statement-level tree matching and edit-script extraction.

Two function bodies are matched top-down: any two statements of the same
kind whose parents were paired become candidate pairs, the candidates are
sorted by similarity, and a greedy sweep keeps each statement in at most one
pair. The retained pairs are then turned into Update/Insert/Delete
modifications whose application reproduces the patched body.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .syntax.nodes import (
    AstNode,
    NodeKind as K,
    child_statements,
    is_statement,
    renumber,
    slot_shape,
    slot_statements,
    statement_slots,
    strip_slots,
    with_slot_statements,
)


class InconsistentMatch(ValueError):
    pass


class AnchorNotFound(LookupError):
    pass


def token_edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Levenshtein distance over token sequences with unit costs."""
    # a shared prefix or suffix never changes the distance
    lo, hi_a, hi_b = 0, len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, 1):
        cur = [i]
        for j, tb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ta != tb)))
        prev = cur
    return prev[-1]


def atomic_similarity(ta: Sequence[str], tb: Sequence[str]) -> float:
    longest = max(len(ta), len(tb))
    if longest == 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - token_edit_distance(ta, tb) / longest))


def similarity(a: AstNode, b: AstNode, _memo: Optional[dict] = None) -> float:
    """Similarity in [0, 1] between two statements.

    Statements of different kinds score 0. A statement without child
    statements is compared by normalized token edit distance; otherwise each
    of its child statements is scored against its best counterpart among
    ``b``'s children and the scores are averaged.
    """
    if a.kind is not b.kind:
        return 0.0
    memo = {} if _memo is None else _memo
    key = (id(a), id(b))
    if key in memo:
        return memo[key]
    ca = child_statements(a)
    if not ca:
        value = atomic_similarity(a.tokens, b.tokens)
    else:
        cb = child_statements(b)
        if not cb:
            value = 0.0
        else:
            value = sum(max(similarity(x, y, memo) for y in cb) for x in ca) / len(ca)
    memo[key] = value
    return value


@dataclass(frozen=True)
class MatchPair:
    buggy_node: AstNode
    patched_node: AstNode
    similarity: float


def ensure_numbered(root: AstNode) -> AstNode:
    """Renumber ``root`` unless its preorder indices are already consecutive."""
    expected = root.preorder_index
    seen = set()
    for n in root.walk():
        if n.preorder_index != expected or id(n) in seen:
            return renumber(root)
        seen.add(id(n))
        expected += 1
    return root


def match_trees(buggy: AstNode, patched: AstNode) -> list[MatchPair]:
    """Pair statements of two bodies; each statement appears in at most one pair.

    Both trees must carry consecutive preorder indices (see
    ``ensure_numbered``). The result is sorted like the greedy sweep that
    produced it.
    """
    memo: dict = {}
    candidates: list[tuple[AstNode, AstNode]] = []

    def match_node(a: AstNode, b: AstNode) -> None:
        if a.kind is not b.kind:
            return
        candidates.append((a, b))
        kids_b = child_statements(b)
        for ca in child_statements(a):
            for cb in kids_b:
                match_node(ca, cb)

    match_node(buggy, patched)
    base_a, base_b = buggy.preorder_index, patched.preorder_index
    scored = []
    for a, b in candidates:
        ra, rb = a.preorder_index - base_a, b.preorder_index - base_b
        scored.append((-similarity(a, b, memo), abs(ra - rb), ra, rb, a, b))
    scored.sort(key=lambda t: t[:4])
    used_a: set[int] = set()
    used_b: set[int] = set()
    result = []
    for neg_sim, _, ra, rb, a, b in scored:
        if ra in used_a or rb in used_b:
            continue
        used_a.add(ra)
        used_b.add(rb)
        result.append(MatchPair(a, b, -neg_sim))
    return result


# --- modifications ----------------------------------------------------------

Path = tuple[int, ...]


@dataclass(frozen=True)
class Update:
    target: AstNode
    replacement: AstNode
    path: Path
    # shallow: only the statement header changes; the target's nested
    # statement lists are kept and edited by their own modifications
    shallow: bool = False

    op = "update"

    @property
    def introduced(self) -> AstNode:
        return self.replacement

    @property
    def complexity(self) -> int:
        return (strip_slots(self.replacement) if self.shallow else self.replacement).size

    def with_introduced(self, stmt: AstNode) -> Update:
        return Update(self.target, stmt, self.path, self.shallow)


@dataclass(frozen=True)
class Insert:
    new_statement: AstNode
    parent: AstNode
    container_path: Path
    index: int

    op = "insert"

    @property
    def introduced(self) -> AstNode:
        return self.new_statement

    @property
    def complexity(self) -> int:
        return self.new_statement.size

    @property
    def path(self) -> Path:
        return self.container_path

    def with_introduced(self, stmt: AstNode) -> Insert:
        return Insert(stmt, self.parent, self.container_path, self.index)


@dataclass(frozen=True)
class Delete:
    target: AstNode
    path: Path

    op = "delete"
    complexity = 1


Modification = Union[Update, Insert, Delete]


@dataclass(frozen=True)
class EditScript:
    modifications: tuple[Modification, ...] = ()

    def __len__(self) -> int:
        return len(self.modifications)

    def __iter__(self):
        return iter(self.modifications)

    def __getitem__(self, i):
        return self.modifications[i]

    @property
    def insert_update_count(self) -> int:
        return sum(1 for m in self.modifications if m.op != "delete")

    def to_json(self) -> list[dict]:
        return [modification_json(m) for m in self.modifications]

    def dumps(self) -> str:
        return json.dumps({"modifications": self.to_json()}, indent=2)


def modification_json(m: Modification) -> dict:
    if m.op == "insert":
        return {"op": "insert", "anchor_path": list(m.container_path),
                "code": m.new_statement.text, "index": m.index}
    if m.op == "update":
        return {"op": "update", "anchor_path": list(m.path), "code": m.replacement.text,
                "index": m.path[-1], "shallow": m.shallow}
    return {"op": "delete", "anchor_path": list(m.path), "code": m.target.text,
            "index": m.path[-1]}


def _lis_pairs(pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Longest chain of pairs increasing on both sides (input sorted by j)."""
    n = len(pairs)
    if n == 0:
        return []
    best = [1] * n
    prev = [-1] * n
    for x in range(n):
        for y in range(x):
            if pairs[y][0] < pairs[x][0] and best[y] + 1 > best[x]:
                best[x] = best[y] + 1
                prev[x] = y
    end = max(range(n), key=lambda x: (best[x], -x))
    chain = []
    while end != -1:
        chain.append(pairs[end])
        end = prev[end]
    return chain[::-1]


def _index_tree(root: AstNode) -> dict[int, AstNode]:
    return {n.preorder_index: n for n in root.walk()}


def extract_modifications(buggy: AstNode, patched: AstNode,
                          matches: Iterable[MatchPair]) -> EditScript:
    """Turn retained matches into a document-ordered edit script.

    A retained pair only counts when its parents form a counted pair, the two
    statements sit in corresponding statement lists, and keeping it does not
    reorder siblings; every other statement is inserted or deleted whole.
    """
    bidx, pidx = _index_tree(buggy), _index_tree(patched)
    to_patched: dict[int, AstNode] = {}
    to_buggy: dict[int, AstNode] = {}
    for mp in matches:
        a, b = mp.buggy_node, mp.patched_node
        if bidx.get(a.preorder_index) is not a and bidx.get(a.preorder_index) != a:
            raise InconsistentMatch(f"buggy node {a!r} is not in the buggy tree")
        if pidx.get(b.preorder_index) is not b and pidx.get(b.preorder_index) != b:
            raise InconsistentMatch(f"patched node {b!r} is not in the patched tree")
        to_patched[a.preorder_index] = b
        to_buggy[b.preorder_index] = a
    if to_patched.get(buggy.preorder_index) is None:
        to_patched[buggy.preorder_index] = patched
        to_buggy[patched.preorder_index] = buggy

    mods: list[Modification] = []

    def diff_slots(a: AstNode, b: AstNode, a_path: Path) -> None:
        for (pa, offa), (pb, offb) in zip(statement_slots(a), statement_slots(b)):
            stmts_a = a.at(pa).children[offa:]
            stmts_b = b.at(pb).children[offb:]
            pos_a = {s.preorder_index: i for i, s in enumerate(stmts_a)}
            pairs = []
            for j, y in enumerate(stmts_b):
                x = to_buggy.get(y.preorder_index)
                if x is not None and x.preorder_index in pos_a:
                    pairs.append((pos_a[x.preorder_index], j))
            kept = {j: i for i, j in _lis_pairs(pairs)}
            container = a_path + pa
            bi = 0
            for j, y in enumerate(stmts_b):
                if j in kept:
                    i = kept[j]
                    for t in range(bi, i):
                        mods.append(Delete(stmts_a[t], container + (offa + t,)))
                    diff_pair(stmts_a[i], y, container + (offa + i,))
                    bi = i + 1
                else:
                    mods.append(Insert(y, a, container, j))
            for t in range(bi, len(stmts_a)):
                mods.append(Delete(stmts_a[t], container + (offa + t,)))

    def diff_pair(x: AstNode, y: AstNode, path: Path) -> None:
        if x == y:
            return
        if not statement_slots(x):
            mods.append(Update(x, y, path))
        elif slot_shape(x) == slot_shape(y):
            if strip_slots(x) != strip_slots(y):
                mods.append(Update(x, y, path, shallow=True))
            diff_slots(x, y, path)
        else:
            mods.append(Update(x, y, path))

    diff_slots(buggy, patched, ())
    return EditScript(tuple(mods))


def diff(buggy: AstNode, patched: AstNode) -> EditScript:
    """Match and extract in one step, renumbering the inputs when needed."""
    buggy, patched = ensure_numbered(buggy), ensure_numbered(patched)
    return extract_modifications(buggy, patched, match_trees(buggy, patched))


def apply_edit_script(buggy: AstNode, script: Union[EditScript, Iterable[Modification]]) -> AstNode:
    """Apply ``script`` (or any subset of it) to ``buggy`` and return the new body.

    Inserts into one statement list are applied in ascending index order after
    deletions and updates; an index past the end appends.
    """
    deletes: set[Path] = set()
    updates: dict[Path, Update] = {}
    inserts: dict[Path, list[Insert]] = {}
    for m in script:
        if m.op == "insert":
            try:
                container = buggy.at(m.container_path)
            except IndexError:
                raise AnchorNotFound(f"no statement list at {m.container_path}") from None
            if container.kind not in (K.Block, K.SwitchCase, K.SwitchDefault):
                raise AnchorNotFound(f"{container.kind!r} at {m.container_path} holds no statements")
            inserts.setdefault(m.container_path, []).append(m)
            continue
        try:
            found = buggy.at(m.path) if m.path else None
        except IndexError:
            found = None
        if found is None or found != m.target:
            raise AnchorNotFound(f"{m.op} target not found at {m.path}: {m.target.text}")
        if m.op == "delete":
            deletes.add(m.path)
        else:
            updates[m.path] = m
    for lst in inserts.values():
        lst.sort(key=lambda ins: ins.index)

    def rebuild(n: AstNode, path: Path) -> AstNode:
        slots = statement_slots(n)
        if not slots:
            return n
        lists = []
        for p, off in slots:
            container = path + p
            out = []
            for i, s in enumerate(n.at(p).children[off:]):
                sp = container + (off + i,)
                if sp in deletes:
                    continue
                u = updates.get(sp)
                if u is None:
                    out.append(rebuild(s, sp))
                elif u.shallow and slot_shape(u.replacement) == slot_shape(s):
                    out.append(with_slot_statements(u.replacement, slot_statements(rebuild(s, sp))))
                else:
                    out.append(u.replacement)
            for ins in inserts.get(container, ()):
                out.insert(min(ins.index, len(out)), ins.new_statement)
            lists.append(out)
        return with_slot_statements(n, lists)

    return rebuild(buggy, ())


__all__ = [
    "AnchorNotFound", "Delete", "EditScript", "InconsistentMatch", "Insert",
    "MatchPair", "Modification", "Update", "apply_edit_script", "atomic_similarity",
    "diff", "ensure_numbered", "extract_modifications", "is_statement",
    "match_trees", "similarity", "token_edit_distance",
]
