"""All-paths bottom-up on-line chart parser.

Every edge is one *reading*: a span, a resolved category and (when
semantics is on) one well-sorted logical form.  Semantic rules run at
edge creation time and the sort checker gates admission, so an edge only
enters the chart if it has an acceptable interpretation.

Chart maintenance uses subsumption over the joint (category, LF) reading.
A candidate that is a variant of an existing edge is packed into it as an
extra derivation; one that is less general is skipped; one that is more
general replaces the edges it subsumes.  Derivations of skipped and
replaced edges are kept on the surviving edge so that all attachment
alternatives can still be extracted for preference ranking.

Edges are processed position by position (all edges ending at ``i`` before
any ending at ``i + 1``), last-in first-out within a position.  A new
edge is tried as the *last* daughter of every rule, with earlier daughters
looked up among edges already in the chart.

Gaps are constrained by prediction: when an edge matches a rule's gap
licensor daughter, the rule's gap pattern is predicted from the end of
that edge onward, and a candidate whose ``gapsin`` value is a category is
only built if a prediction covering its start unifies with it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from . import fs
from .fs import Category
from .sem import apply_sem_rules, sort_check


class UnknownWord(Exception):
    def __init__(self, token: str, position: int):
        super().__init__(f"unknown word {token!r} at position {position}")
        self.token = token
        self.position = position


class ChartOverflow(Exception):
    pass


@dataclass(frozen=True)
class ParseOptions:
    semantics: bool = True
    sorts: bool = True
    prediction: bool = True
    max_edges: int = 50000
    debug: bool = False  # validate every candidate category against the declarations
    gap_feature: str = "gapsin"

    def __post_init__(self):
        if self.sorts and not self.semantics:
            raise ValueError("sort checking requires semantics")


@dataclass
class ParseStats:
    edges: int = 0          # edges in the final chart
    admitted: int = 0       # edges ever admitted (including later replaced ones)
    predictions: int = 0
    packed: int = 0
    skipped: int = 0
    replaced: int = 0
    gap_blocked: int = 0
    sem_rejected: int = 0   # rule applications with no semantic analysis
    sort_rejected: int = 0  # readings dropped as ill-sorted
    elapsed: float = 0.0
    timings: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "edges", "admitted", "predictions", "packed", "skipped", "replaced",
            "gap_blocked", "sem_rejected", "sort_rejected", "elapsed")}


@dataclass(frozen=True)
class Backpointer:
    """One way of building an edge: a rule and its daughter edges, or a word."""

    rule: str
    daughters: tuple = ()
    word: str | None = None
    marked: bool = False


class Edge:
    __slots__ = ("id", "start", "end", "category", "lf", "backpointers", "_renamed")

    def __init__(self, start: int, end: int, category: Category, lf, backpointers):
        self.id = -1
        self.start = start
        self.end = end
        self.category = category
        self.lf = lf
        self.backpointers = list(backpointers)
        self._renamed: dict = {}

    @property
    def cat(self) -> str:
        return self.category.cat

    @property
    def key(self) -> tuple:
        return (self.start, self.end, self.category, self.lf)

    @property
    def reading(self) -> tuple:
        return (self.category, self.lf)

    @property
    def lfs(self) -> frozenset:
        return frozenset([self.lf])

    @property
    def rule(self) -> str:
        return self.backpointers[0].rule

    @property
    def daughters(self) -> tuple:
        return self.backpointers[0].daughters

    @property
    def is_lexical(self) -> bool:
        return self.backpointers[0].word is not None

    def renamed(self, slot: int) -> tuple:
        r = self._renamed.get(slot)
        if r is None:
            p = f"{slot}~"
            r = self._renamed[slot] = (fs.rename(self.category, p), fs.rename(self.lf, p))
        return r

    def __repr__(self):
        lf = "" if self.lf is None else f" {self.lf}"
        return f"<Edge {self.id} [{self.start},{self.end}) {self.category}{lf}>"


@dataclass(frozen=True)
class AddResult:
    kind: str  # 'added' | 'packed' | 'skipped' | 'replaced'
    edge: Edge
    replaced: tuple = ()

    @property
    def admitted(self) -> bool:
        return self.kind in ("added", "replaced")


@dataclass(frozen=True)
class Prediction:
    origin: int
    pattern: Category


class Chart:
    """A chart for one token sequence.  Feed tokens with :meth:`feed`."""

    def __init__(self, grammar, options: ParseOptions | None = None,
                 rules: Iterable | None = None, sem_rules=None):
        self.grammar = grammar
        self.options = options or ParseOptions()
        self.rules = tuple(grammar.rules if rules is None else rules)
        self.sem_rules = grammar.sem_rules if sem_rules is None else sem_rules
        self.tokens: list[str] = []
        self.stats = ParseStats()
        self.predictions: set[Prediction] = set()
        self._by_key: dict = {}
        self._by_span_cat: dict = {}
        self._by_lf: dict = {}
        self._by_end_cat: dict = {}
        self._by_end: dict = {}
        self._next_id = 0
        self._agenda: list[Edge] = []
        self._by_last: dict[str, list] = {}
        self._licensors: dict[str, list] = {}
        for r in self.rules:
            self._by_last.setdefault(r.daughters[-1].cat, []).append(r)
            if r.gap_licensor is not None:
                idx = r.gap_licensor[0]
                self._licensors.setdefault(r.daughters[idx].cat, []).append(r)

    # --- queries -------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def edges(self) -> list[Edge]:
        return sorted(self._by_key.values(), key=lambda e: e.id)

    def edges_at(self, start: int, end: int, cat: str | None = None) -> list[Edge]:
        out = [e for e in self._by_end.get(end, ()) if e.start == start]
        if cat is not None:
            out = [e for e in out if e.cat == cat]
        return sorted(out, key=lambda e: e.id)

    def spanning(self, cat: str | None = None) -> list[Edge]:
        return self.edges_at(0, self.n, cat)

    def snapshot(self, upto: int | None = None) -> frozenset:
        """Edge keys (span, category, LF) with end <= ``upto``."""
        return frozenset(e.key for e in self._by_key.values()
                         if upto is None or e.end <= upto)

    # --- driving -------------------------------------------------------------

    def feed(self, token: str) -> None:
        """Add the next token and complete every edge ending after it."""
        t0 = time.perf_counter()
        pos = len(self.tokens)
        entries = self.grammar.lexicon.get(token.lower(), ())
        if not entries:
            raise UnknownWord(token, pos)
        self.tokens.append(token)
        for e in reversed(entries):
            lf = e.lf if self.options.semantics else None
            if lf is not None and self.options.sorts and self.grammar.signatures:
                if not sort_check(lf, self.grammar.hierarchy, self.grammar.signatures):
                    self.stats.sort_rejected += 1
                    continue
            cat, lf = self._canon(e.category, lf)
            self._agenda.append(Edge(pos, pos + 1, cat, lf,
                                     [Backpointer("lex", (), token.lower())]))
        self._run()
        self.stats.elapsed += time.perf_counter() - t0
        self.stats.timings["constituent"] = self.stats.elapsed

    def seed(self, edges: Iterable[Edge], n: int, tokens=None) -> None:
        """Start from existing edges (for utterance-level passes).  Seeded
        edges are admitted as they are and act as daughters for this
        chart's rules."""
        self.tokens = list(tokens) if tokens is not None else [""] * n
        t0 = time.perf_counter()
        for end in range(1, n + 1):
            for e in sorted((e for e in edges if e.end == end), key=lambda e: e.id):
                self._index(e, keep_id=True)
                self._complete(e)
            self._run()
        self.stats.elapsed += time.perf_counter() - t0

    def _run(self):
        while self._agenda:
            cand = self._agenda.pop()
            res = self.add_edge(cand)
            if res.admitted:
                if self.options.prediction:
                    self.predict_gaps(res.edge)
                self._complete(res.edge)
        self.stats.edges = len(self._by_key)
        self.stats.predictions = len(self.predictions)

    # --- chart maintenance ---------------------------------------------------

    def _index(self, e: Edge, keep_id=False):
        if not keep_id or e.id < 0:
            e.id = self._next_id
        self._next_id = max(self._next_id, e.id) + 1
        self._by_key[e.key] = e
        self._by_span_cat.setdefault((e.start, e.end, e.cat), []).append(e)
        self._by_lf.setdefault((e.start, e.end, e.cat), {}).setdefault(_lf_key(e.lf), []).append(e)
        self._by_end_cat.setdefault((e.end, e.cat), []).append(e)
        self._by_end.setdefault(e.end, []).append(e)
        self.stats.admitted += 1
        if self.stats.admitted > self.options.max_edges:
            raise ChartOverflow(f"more than {self.options.max_edges} edges")

    def _unindex(self, e: Edge):
        del self._by_key[e.key]
        self._by_span_cat[(e.start, e.end, e.cat)].remove(e)
        self._by_lf[(e.start, e.end, e.cat)][_lf_key(e.lf)].remove(e)
        self._by_end_cat[(e.end, e.cat)].remove(e)
        self._by_end[e.end].remove(e)

    def add_edge(self, cand: Edge) -> AddResult:
        """Admit a candidate edge subject to packing and subsumption."""
        old = self._by_key.get(cand.key)
        if old is not None:
            _merge(old, cand.backpointers)
            self.stats.packed += 1
            return AddResult("packed", old)
        bucket = self._related(cand)
        for old in bucket:
            if fs.subsumes(old.reading, cand.reading):
                _merge(old, cand.backpointers)
                if fs.subsumes(cand.reading, old.reading):
                    self.stats.packed += 1
                    return AddResult("packed", old)
                self.stats.skipped += 1
                return AddResult("skipped", old)
        victims = [old for old in bucket if fs.subsumes(cand.reading, old.reading)]
        for v in victims:
            self._unindex(v)
            _merge(cand, v.backpointers)
        self._index(cand)
        if victims:
            self.stats.replaced += len(victims)
            return AddResult("replaced", cand, tuple(victims))
        return AddResult("added", cand)

    def _related(self, cand: Edge) -> list:
        """Edges that could subsume or be subsumed by ``cand``.  Distinct
        ground LFs never subsume each other, so only edges with the same
        ground LF or a non-ground one need checking."""
        span = (cand.start, cand.end, cand.cat)
        key = _lf_key(cand.lf)
        if key is _OPEN:
            return list(self._by_span_cat.get(span, ()))
        groups = self._by_lf.get(span, {})
        return sorted(groups.get(key, []) + groups.get(_OPEN, []), key=lambda e: e.id)

    def predict_gaps(self, edge: Edge) -> set:
        """Record gap predictions licensed by a newly admitted edge."""
        new = set()
        for rule in self._licensors.get(edge.cat, ()):
            r = rule.renamed
            idx, gap = r.gap_licensor
            s: dict = {}
            if not fs.unify_into(r.daughters[idx], edge.renamed(idx)[0], s):
                continue
            (pattern,) = fs.canonical(fs.resolve(gap, s))
            p = Prediction(edge.end, pattern)
            if p not in self.predictions:
                self.predictions.add(p)
                new.add(p)
        return new

    def gap_allowed(self, start: int, category: Category) -> bool:
        gap = category.get(self.options.gap_feature)
        if not isinstance(gap, Category):
            return True
        gap = fs.rename(gap, "g~")
        for p in self.predictions:
            if p.origin <= start and fs.unify(p.pattern, gap) is not None:
                return True
        return False

    # --- rule application ----------------------------------------------------

    def _complete(self, edge: Edge):
        for rule in self._by_last.get(edge.cat, ()):
            r = rule.renamed
            k = len(r.daughters) - 1
            s: dict = {}
            if fs.unify_into(r.daughters[k], edge.renamed(k)[0], s):
                self._extend(rule, k - 1, edge.start, [edge], s)

    def _extend(self, rule, idx: int, pos: int, chosen: list, s: dict):
        if idx < 0:
            self._build(rule, tuple(reversed(chosen)), s)
            return
        pat = rule.renamed.daughters[idx]
        for d in list(self._by_end_cat.get((pos, pat.cat), ())):
            s2 = dict(s)
            if fs.unify_into(pat, d.renamed(idx)[0], s2):
                chosen.append(d)
                self._extend(rule, idx - 1, d.start, chosen, s2)
                chosen.pop()

    def _build(self, rule, daughters: tuple, s: dict):
        r = rule.renamed
        opts = self.options
        start, end = daughters[0].start, daughters[-1].end
        readings = []
        if not opts.semantics:
            readings.append((fs.resolve(r.mother, s), None))
        else:
            sems = self.sem_rules.get(rule.name, ())
            dcats = [d.renamed(i)[0] for i, d in enumerate(daughters)]
            dlfs = [[d.renamed(i)[1]] for i, d in enumerate(daughters)]
            for _, mlf, _, mcat in apply_sem_rules(sems, r.mother, dcats, dlfs, s):
                readings.append((mcat, mlf))
            if not readings:
                self.stats.sem_rejected += 1
                return
        bp = Backpointer(rule.name, daughters, None, rule.marked)
        for cat, lf in readings:
            if lf is not None and opts.sorts and self.grammar.signatures:
                if not sort_check(lf, self.grammar.hierarchy, self.grammar.signatures):
                    self.stats.sort_rejected += 1
                    continue
            cat, lf = self._canon(cat, lf)
            if opts.debug:
                self.grammar.declarations.validate(cat, f"rule {rule.name}: ")
            if opts.prediction and not self.gap_allowed(start, cat):
                self.stats.gap_blocked += 1
                continue
            self._agenda.append(Edge(start, end, cat, lf, [bp]))

    @staticmethod
    def _canon(cat, lf):
        if lf is None:
            return fs.canonical(cat)[0], None
        return fs.canonical(cat, lf)


_OPEN = object()


def _lf_key(lf):
    return _OPEN if lf is not None and fs.term_vars(lf) else lf


def _merge(edge: Edge, bps: Iterable[Backpointer]):
    for bp in bps:
        if bp not in edge.backpointers:
            edge.backpointers.append(bp)


def parse(tokens: list[str], grammar, options: ParseOptions | None = None) -> Chart:
    """Parse a token list with the constituent grammar."""
    if not tokens:
        raise ValueError("cannot parse an empty token list")
    chart = Chart(grammar, options)
    for t in tokens:
        chart.feed(t)
    return chart


def subsumption_violations(chart: Chart) -> list[tuple]:
    """Pairs of chart edges with the same span and category symbol where
    one strictly subsumes the other (should always be empty)."""
    out = []
    for bucket in chart._by_span_cat.values():
        for a in bucket:
            for b in bucket:
                if a is not b and fs.subsumes(a.reading, b.reading) \
                        and not fs.subsumes(b.reading, a.reading):
                    out.append((a, b))
    return out
