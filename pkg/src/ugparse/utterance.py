"""Utterance-level assembly over a finished constituent chart.

The utterance grammar is split into ranked classes.  Each class is run as
a separate bottom-up pass whose daughters may be any constituent edge;
the first class that builds at least one edge of the start category over
the whole input wins, and every such edge it builds is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .chart import Chart, Edge, ParseOptions


class NoSpanningAnalysis(Exception):
    def __init__(self, n: int, tried: tuple = ()):
        super().__init__(f"no utterance class spans all {n} tokens")
        self.tried = tried


@dataclass
class UtteranceResult:
    rank: int
    label: str
    edges: tuple          # spanning start-category edges of the winning class
    chart: Chart | None   # the winning class's utterance chart
    tried: tuple = ()     # ranks consulted, in order

    @property
    def lfs(self) -> list:
        return [e.lf for e in self.edges]


def run_class(chart: Chart, cls, grammar=None, options: ParseOptions | None = None) -> Chart:
    """Run one utterance class over a constituent chart."""
    g = grammar or chart.grammar
    opts = replace(options or chart.options, prediction=False)
    uc = Chart(g, opts, rules=cls.rules, sem_rules=cls.sem_rules)
    uc.seed(chart.edges, chart.n, chart.tokens)
    return uc


def assemble(chart: Chart, grammar=None, options: ParseOptions | None = None) -> UtteranceResult:
    """Try utterance classes in rank order over ``chart``.

    A grammar without utterance classes accepts start-category edges of
    the constituent chart itself as rank 1.
    """
    g = grammar or chart.grammar
    n = chart.n
    if not g.classes:
        span = tuple(chart.spanning(g.start))
        if span:
            return UtteranceResult(1, "complete sentence", span, chart, (1,))
        raise NoSpanningAnalysis(n, (1,))
    tried = []
    for cls in sorted(g.classes, key=lambda c: c.rank):
        tried.append(cls.rank)
        uc = run_class(chart, cls, g, options)
        span = tuple(e for e in uc.spanning(g.start) if _built_here(e, cls))
        if span:
            return UtteranceResult(cls.rank, cls.label, span, uc, tuple(tried))
    raise NoSpanningAnalysis(n, tuple(tried))


def _built_here(edge: Edge, cls) -> bool:
    names = {r.name for r in cls.rules}
    return any(bp.rule in names for bp in edge.backpointers)
