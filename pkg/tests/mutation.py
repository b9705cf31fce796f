"""Seeded statement-level mutations used to build random differencing pairs."""

from __future__ import annotations

import random
from pathlib import Path

from skelfix.syntax import AstNode, NodeKind as K, parse_method, parse_unit
from skelfix.syntax.nodes import paths, replace_at, slot_statements, statement_slots, with_slot_statements

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

INFIX_FAMILIES = [
    ("+", "-", "*", "/", "%"),
    ("<", ">", "<=", ">=", "==", "!="),
    ("&&", "||"),
]


def corpus_bodies() -> list[AstNode]:
    """Method bodies of every corpus program (diff pairs and bug sources)."""
    out = []
    for d in sorted((CORPUS / "diff_pairs").iterdir()):
        for name in ("before.src", "after.src"):
            out.append(parse_method((d / name).read_text()).children[-1])
    for d in sorted((CORPUS / "bugs").iterdir()):
        unit = parse_unit((d / "buggy.src").read_text())
        out.extend(m.children[-1] for _, m in unit.methods())
    return out


def _containers(root: AstNode) -> list[tuple[int, ...]]:
    return [p for p, n in paths(root) if statement_slots(n)]


def _statements(root: AstNode) -> list[tuple[int, ...]]:
    out = []
    for p, n in paths(root):
        for (cp, off), _ in zip(statement_slots(n), slot_statements(n)):
            c = n.at(cp)
            out.extend(p + cp + (i,) for i in range(off, len(c.children)))
    return out


def _edit_slot(root: AstNode, rng: random.Random, fn) -> AstNode:
    p = rng.choice(_containers(root))
    n = root.at(p)
    lists = slot_statements(n)
    k = rng.randrange(len(lists))
    lists[k] = fn(lists[k])
    return replace_at(root, p, with_slot_statements(n, lists))


def _update(stmt: AstNode, rng: random.Random, names: list[str]) -> AstNode:
    leaves = [(p, n) for p, n in paths(stmt)
              if n.kind is K.SimpleName or (n.kind is K.Operator and any(n.token in f for f in INFIX_FAMILIES))]
    # keep nested statements as they are; only touch the header
    inner = {p for p, n in paths(stmt) if p and n.kind in (K.Block,)}
    leaves = [(p, n) for p, n in leaves if not any(p[: len(q)] == q for q in inner)]
    if not leaves:
        return stmt
    p, leaf = rng.choice(leaves)
    if leaf.kind is K.Operator:
        family = next(f for f in INFIX_FAMILIES if leaf.token in f)
        token = rng.choice([t for t in family if t != leaf.token])
    else:
        choices = [x for x in names if x != leaf.token] or [leaf.token + "2"]
        token = rng.choice(choices)
    return replace_at(stmt, p, leaf.with_token(token))


def mutate(body: AstNode, pool: list[AstNode], rng: random.Random, edits: int = 0) -> AstNode:
    """Apply 1-3 random statement inserts, updates, or deletes to ``body``."""
    names = sorted({n.token for n in body.walk() if n.kind is K.SimpleName})
    out = body
    for _ in range(edits or rng.randint(1, 3)):
        op = rng.choice(("insert", "update", "delete"))
        stmts = _statements(out)
        if op == "delete" and stmts:
            sp = rng.choice(stmts)
            parent = out.at(sp[:-1])
            out = replace_at(out, sp[:-1], parent.with_children(
                parent.children[: sp[-1]] + parent.children[sp[-1] + 1:]))
        elif op == "update" and stmts:
            sp = rng.choice(stmts)
            out = replace_at(out, sp, _update(out.at(sp), rng, names))
        else:
            new = rng.choice(pool)
            out = _edit_slot(out, rng, lambda xs: (lambda i: xs[:i] + [new] + xs[i:])(rng.randint(0, len(xs))))
    return out


def statement_pool(bodies: list[AstNode]) -> list[AstNode]:
    pool = []
    for b in bodies:
        pool.extend(s for _, n in paths(b) for s in sum(slot_statements(n), []))
    return pool
