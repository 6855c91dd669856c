"""Attachment preferences over alternative parse trees.

Each tree is read as a shift-reduce derivation: a shift per word and a
reduce per branching node, taking as many stack items as the node has
children.  Non-branching nodes are transparent.  Two derivations of the
same words are compared at the first move where they differ:

* shift against reduce: the shifting derivation wins (Right Association);
* reduce against reduce: the one reducing more items wins (Minimal
  Attachment).

Tree selection first keeps the trees using the fewest marked rules, then
runs a tournament with :func:`compare`, and breaks remaining ties by the
serialized tree.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .terms import format_lf

MAX_TREES = 2000


class Verdict(enum.Enum):
    PREFER1 = "prefer1"
    PREFER2 = "prefer2"
    TIE = "tie"


@dataclass(frozen=True)
class Tree:
    """A single derivation extracted from a packed chart."""

    rule: str
    cat: str
    start: int
    end: int
    children: tuple = ()
    word: str | None = None
    marked: bool = False
    lf: object = None

    @property
    def is_leaf(self) -> bool:
        return self.word is not None

    def leaves(self) -> list:
        if self.is_leaf:
            return [self.word]
        return [w for c in self.children for w in c.leaves()]

    def marked_count(self) -> int:
        return int(self.marked) + sum(c.marked_count() for c in self.children)

    def bracketing(self):
        """Nested tuples of words with non-branching nodes removed."""
        if self.is_leaf:
            return self.word
        if len(self.children) == 1:
            return self.children[0].bracketing()
        return tuple(c.bracketing() for c in self.children)

    def serialize(self) -> str:
        if self.is_leaf:
            return self.word
        inner = " ".join(c.serialize() for c in self.children)
        return f"({self.rule} {inner})"

    def sort_key(self) -> tuple:
        lf = "" if self.lf is None else format_lf(self.lf)
        return (self.serialize(), lf)

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        if self.is_leaf:
            return f"{pad}{self.cat} {self.word}"
        head = f"{pad}{self.cat} ({self.rule}{', marked' if self.marked else ''})"
        return "\n".join([head] + [c.pretty(indent + 1) for c in self.children])


def trees_of(edge, limit: int = MAX_TREES) -> list[Tree]:
    """All derivations of a chart edge, up to ``limit``.

    Backpointer cycles (possible after packing) are cut: an edge is never
    expanded inside its own derivation.
    """
    return list(itertools.islice(_trees(edge, frozenset()), limit))


def _trees(edge, path: frozenset) -> Iterator[Tree]:
    if id(edge) in path:
        return
    path = path | {id(edge)}
    for bp in edge.backpointers:
        if bp.word is not None:
            yield Tree(bp.rule, edge.cat, edge.start, edge.end, (), bp.word, bp.marked, edge.lf)
            continue
        # lazily expand each daughter; materialize per daughter for the product
        alts = [list(itertools.islice(_trees(d, path), MAX_TREES)) for d in bp.daughters]
        if any(not a for a in alts):
            continue
        for kids in itertools.product(*alts):
            yield Tree(bp.rule, edge.cat, edge.start, edge.end, tuple(kids), None,
                       bp.marked, edge.lf)


# -- derivations ------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """A shift (``arity == 0``) or a reduce of ``arity`` stack items."""

    arity: int = 0

    @property
    def is_shift(self) -> bool:
        return self.arity == 0

    def __str__(self) -> str:
        return "S" if self.arity == 0 else "R"

    def detail(self) -> str:
        return "shift" if self.arity == 0 else f"reduce/{self.arity}"


SHIFT = Move(0)


def derivation_of(tree: Tree) -> tuple:
    """Shift-reduce moves for ``tree`` (non-branching nodes dropped)."""
    out: list[Move] = []

    def walk(t: Tree):
        if t.is_leaf:
            out.append(SHIFT)
            return
        for c in t.children:
            walk(c)
        if len(t.children) > 1:
            out.append(Move(len(t.children)))

    walk(tree)
    return tuple(out)


def format_derivation(moves: Iterable[Move]) -> str:
    return " ".join(str(m) for m in moves)


@dataclass(frozen=True)
class Comparison:
    verdict: Verdict
    position: int | None = None     # index of the deciding move pair
    moves: tuple = ()               # (move1, move2) at that index
    principle: str | None = None    # 'right association' | 'minimal attachment'

    def describe(self) -> str:
        if self.verdict is Verdict.TIE:
            return "tie: the derivations never conflict"
        m1, m2 = self.moves
        who = "first" if self.verdict is Verdict.PREFER1 else "second"
        return (f"move {self.position + 1}: {m1.detail()} vs {m2.detail()}; "
                f"{self.principle} prefers the {who}")


def compare(d1, d2) -> Comparison:
    """Compare two derivations of the same words (``Tree`` or move tuple)."""
    if isinstance(d1, Tree):
        d1 = derivation_of(d1)
    if isinstance(d2, Tree):
        d2 = derivation_of(d2)
    s1 = sum(m.is_shift for m in d1)
    s2 = sum(m.is_shift for m in d2)
    if s1 != s2:
        raise ValueError(f"derivations cover different token counts ({s1} vs {s2})")
    for k, (a, b) in enumerate(zip(d1, d2)):
        if a == b:
            continue
        if a.is_shift != b.is_shift:
            v = Verdict.PREFER1 if a.is_shift else Verdict.PREFER2
            return Comparison(v, k, (a, b), "right association")
        v = Verdict.PREFER1 if a.arity > b.arity else Verdict.PREFER2
        return Comparison(v, k, (a, b), "minimal attachment")
    return Comparison(Verdict.TIE)


# -- selection --------------------------------------------------------------

@dataclass
class Selection:
    best: Tree
    candidates: int
    after_marked: int
    log: list = field(default_factory=list)

    def explain(self) -> str:
        lines = [f"{self.candidates} tree(s); {self.after_marked} with fewest marked rules",
                 f"chosen: {format_derivation(derivation_of(self.best))}",
                 f"        {self.best.serialize()}"]
        lines.extend(self.log)
        return "\n".join(lines)


def select_best(trees: Iterable[Tree], marked: Iterable[str] | None = None) -> Selection:
    """Pick the preferred tree.

    ``marked`` overrides the per-node marked flags with a set of rule names.
    The result does not depend on the input order.
    """
    trees = list(trees)
    if not trees:
        raise ValueError("no trees to choose from")
    if marked is not None:
        names = frozenset(marked)

        def count(t: Tree) -> int:
            return int(t.rule in names) + sum(count(c) for c in t.children)
    else:
        count = Tree.marked_count
    fewest = min(count(t) for t in trees)
    pool = sorted((t for t in trees if count(t) == fewest), key=Tree.sort_key)
    best, log = pool[0], []
    for t in pool[1:]:
        c = compare(best, t)
        d1, d2 = format_derivation(derivation_of(best)), format_derivation(derivation_of(t))
        if c.verdict is Verdict.TIE:
            log.append(f"{d1} ties {d2}; kept the earlier serialized tree")
            continue
        m1, m2 = c.moves
        if c.verdict is Verdict.PREFER2:
            best, d1, d2, m1, m2 = t, d2, d1, m2, m1
        log.append(f"{d1} beats {d2}: {c.principle} at move {c.position + 1} "
                   f"({m1.detail()} over {m2.detail()})")
    return Selection(best, len(trees), len(pool), log)
