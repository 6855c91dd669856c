"""End-to-end interpretation of utterances and corpus evaluation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .chart import ParseOptions, ParseStats, UnknownWord, parse
from .grammar.lexicon import lexical_base
from .prefer import Selection, select_best, trees_of
from .repair import NoRepairFound, RepairCandidate, correct
from .scope import ScopedLF, enumerate_scopings, rank_and_pick
from .terms import format_lf, lf_to_json
from .utterance import NoSpanningAnalysis, UtteranceResult, assemble

JSON_SCHEMA = 1


class NoInterpretation(Exception):
    def __init__(self, tokens, stats: ParseStats | None = None, repairs_tried: int = 0):
        super().__init__(f"no interpretation for: {' '.join(tokens)}")
        self.tokens = list(tokens)
        self.stats = stats
        self.repairs_tried = repairs_tried


@dataclass(frozen=True)
class PipelineConfig:
    repairs: bool = True
    semantics: bool = True
    sorts: bool = True
    prediction: bool = True
    max_edges: int = 50000
    max_repair_candidates: int = 32
    related_words: bool = False

    def __post_init__(self):
        if self.sorts and not self.semantics:
            raise ValueError("sort checking requires semantics")

    def parse_options(self) -> ParseOptions:
        return ParseOptions(semantics=self.semantics, sorts=self.sorts,
                            prediction=self.prediction, max_edges=self.max_edges)


@dataclass
class PipelineOutput:
    tokens: list
    utterance: UtteranceResult
    stats: ParseStats
    selection: Selection
    qlf: object = None
    scoped: ScopedLF | None = None
    scopings: int = 0
    repair: RepairCandidate | None = None
    timings: dict = field(default_factory=dict)

    @property
    def classification(self) -> str:
        return self.utterance.label

    @property
    def interpreted_tokens(self) -> list:
        return list(self.repair.corrected) if self.repair else list(self.tokens)

    def to_json(self, stats: bool = False, explain: bool = False) -> dict:
        d = {
            "schema": JSON_SCHEMA,
            "status": "ok",
            "tokens": self.tokens,
            "class": {"rank": self.utterance.rank, "label": self.utterance.label},
            "analyses": len(self.utterance.edges),
            "tree": self.selection.best.serialize(),
            "qlf": None if self.qlf is None else format_lf(self.qlf),
            "lf": None if self.scoped is None else format_lf(self.scoped.lf),
            "lf_json": None if self.scoped is None else lf_to_json(self.scoped.lf),
            "scopings": self.scopings,
            "repair": None if self.repair is None else self.repair.as_dict(self.tokens),
        }
        if stats:
            d["stats"] = self.stats.as_dict()
            d["timings"] = dict(self.timings)
        if explain:
            d["preference"] = self.selection.explain()
        return d


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def _analyse(tokens, grammar, opts: ParseOptions):
    chart = parse(tokens, grammar, opts)
    return chart, assemble(chart, grammar, opts)


def run_utterance(tokens, grammar, config: PipelineConfig | None = None) -> PipelineOutput:
    """Interpret one utterance.

    Raises :class:`UnknownWord` for words missing from the lexicon and
    :class:`NoInterpretation` when neither the utterance nor any repair of
    it has a spanning analysis.
    """
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    tokens = [t.lower() for t in tokens]
    if not tokens:
        raise NoInterpretation(tokens)
    config = config or PipelineConfig()
    opts = config.parse_options()
    timings: dict = {}
    t0 = time.perf_counter()
    chart = None
    repair = None
    try:
        chart, result = _analyse(tokens, grammar, opts)
    except NoSpanningAnalysis:
        if not config.repairs:
            raise NoInterpretation(tokens, chart_stats(tokens, grammar, opts)) from None

        def attempt(toks):
            try:
                return _analyse(toks, grammar, opts)
            except (NoSpanningAnalysis, UnknownWord):
                return None

        related = None
        if config.related_words:
            def related(a, b):
                return bool(lexical_base(a, grammar) & lexical_base(b, grammar))
        try:
            repair, (chart, result) = correct(tokens, grammar.cues, attempt,
                                              fillers=grammar.fillers, related=related,
                                              max_candidates=config.max_repair_candidates)
        except NoRepairFound as e:
            raise NoInterpretation(tokens, chart_stats(tokens, grammar, opts), e.tried) from None
    timings["analysis"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    trees = [t for e in result.edges for t in trees_of(e)]
    selection = select_best(trees, grammar.marked or None)
    timings["preference"] = time.perf_counter() - t1

    qlf = scoped = None
    n_scopings = 0
    if config.semantics:
        t2 = time.perf_counter()
        qlf = selection.best.lf
        scopings = enumerate_scopings(qlf)
        n_scopings = len(scopings)
        scoped = rank_and_pick(scopings)
        timings["scoping"] = time.perf_counter() - t2
    timings["total"] = time.perf_counter() - t0
    return PipelineOutput(tokens, result, chart.stats, selection, qlf, scoped,
                          n_scopings, repair, timings)


def chart_stats(tokens, grammar, opts) -> ParseStats | None:
    try:
        return parse(tokens, grammar, opts).stats
    except UnknownWord:
        return None


# -- corpus evaluation --------------------------------------------------------

@dataclass
class CorpusRow:
    name: str
    count: int
    total: int

    @property
    def percent(self) -> float:
        return 100.0 * self.count / self.total if self.total else 0.0


@dataclass
class CorpusReport:
    total: int
    rows: list
    repairs_applied: int
    repairs_unneeded: int
    mean_edges: dict          # configuration -> mean constituent edges
    mean_predictions: dict
    lf_checked: int = 0
    lf_matched: int = 0
    per_utterance: list = field(default_factory=list)

    def row(self, name: str) -> CorpusRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def read_corpus(path) -> list[tuple[str, str | None]]:
    """Lines of ``utterance`` or ``utterance<TAB>expected lf``; ``#`` comments."""
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            text, _, expected = line.partition("\t")
            out.append((text.strip(), expected.strip() or None))
    return out


CONFIGS = {
    "syntax": PipelineConfig(repairs=False, semantics=False, sorts=False),
    "semantics": PipelineConfig(repairs=False),
    "syntax-repair": PipelineConfig(repairs=True, semantics=False, sorts=False),
    "semantics-repair": PipelineConfig(repairs=True),
}

EDGE_CONFIGS = {
    "syntax only": ParseOptions(semantics=False, sorts=False),
    "+ semantics": ParseOptions(semantics=True, sorts=False),
    "+ sorts": ParseOptions(semantics=True, sorts=True),
}


def _try(tokens, grammar, config):
    try:
        return run_utterance(tokens, grammar, config)
    except (NoInterpretation, UnknownWord):
        return None


def run_corpus(lines, grammar, prediction: bool = True) -> CorpusReport:
    """Evaluate a corpus (list of ``(text, expected)`` or a path)."""
    if isinstance(lines, (str, bytes)) or hasattr(lines, "__fspath__"):
        lines = read_corpus(lines)
    counts = dict.fromkeys(["lexicon", *CONFIGS], 0)
    edges = {k: [] for k in EDGE_CONFIGS}
    preds = {k: [] for k in EDGE_CONFIGS}
    applied = unneeded = checked = matched = 0
    per = []
    for text, expected in lines:
        tokens = tokenize(text)
        rec = {"text": text}
        known = all(grammar.lexicon.get(t) for t in tokens)
        rec["lexicon"] = known
        if known:
            counts["lexicon"] += 1
            for k, opts in EDGE_CONFIGS.items():
                c = parse(tokens, grammar, replace(opts, prediction=prediction))
                edges[k].append(c.stats.edges)
                preds[k].append(c.stats.predictions)
        outs = {}
        for k, cfg in CONFIGS.items():
            out = _try(tokens, grammar, replace(cfg, prediction=prediction)) if known else None
            outs[k] = out
            rec[k] = out is not None
            if out is not None:
                counts[k] += 1
        full = outs["semantics-repair"]
        if full is not None and full.repair is not None:
            applied += 1
            if outs["semantics"] is not None:
                unneeded += 1
        rec["lf"] = (None if full is None or full.scoped is None
                     else format_lf(full.scoped.lf, pretty=True))
        if expected is not None:
            checked += 1
            if rec["lf"] == expected:
                matched += 1
        per.append(rec)
    total = len(per)
    names = [("lexicon", "Lexicon"), ("syntax", "Syntax"), ("semantics", "Semantics"),
             ("syntax-repair", "Syntax (repair correction)"),
             ("semantics-repair", "Semantics (repair correction)")]
    rows = [CorpusRow(label, counts[k], total) for k, label in names]

    def mean(xs):
        return sum(xs) / len(xs) if xs else 0.0

    return CorpusReport(total, rows, applied, unneeded,
                        {k: mean(v) for k, v in edges.items()},
                        {k: mean(v) for k, v in preds.items()},
                        checked, matched, per)


def format_report(r: CorpusReport) -> str:
    w = max(len(row.name) for row in r.rows)
    lines = [f"{'Utterances':<{w}}  {r.total:>5}"]
    for row in r.rows:
        lines.append(f"{row.name:<{w}}  {row.count:>5}  {row.percent:6.1f}%")
    lines.append("")
    lines.append(f"repairs applied: {r.repairs_applied}")
    lines.append(f"repairs applied where unneeded: {r.repairs_unneeded}")
    if r.lf_checked:
        lines.append(f"LF exact match: {r.lf_matched}/{r.lf_checked}")
    lines.append("")
    lines.append(f"{'configuration':<14}  {'edges':>8}  {'predictions':>11}")
    for k in EDGE_CONFIGS:
        lines.append(f"{k:<14}  {r.mean_edges[k]:8.1f}  {r.mean_predictions[k]:11.1f}")
    return "\n".join(lines) + "\n"
