"""Repair (self-correction) detection by matching-sequence deletion.

A candidate pairs two occurrences of the same word sequence, at ``i`` and
at a later ``j``.  Everything from the first occurrence up to the second
one is deleted, which removes the first copy together with any cue word
(``oh``, ``no``) standing just before the second copy.  Candidates are
ranked by fewest deleted words; among equals the match starting furthest
right comes first, then generation order.

Only used as a fallback when the unrepaired utterance has no
interpretation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

DEFAULT_CUES = frozenset({"oh", "no"})


class NoRepairFound(Exception):
    def __init__(self, tried: int):
        super().__init__(f"none of {tried} repair candidates could be interpreted")
        self.tried = tried


@dataclass(frozen=True)
class RepairCandidate:
    deleted_span: tuple    # half-open (start, end) token interval
    match_length: int      # length of the repeated sequence
    cue_used: str | None
    corrected: tuple
    deletions: int

    @property
    def retained_start(self) -> int:
        """Start of the copy that is kept."""
        return self.deleted_span[1]

    def deleted_tokens(self, tokens: Sequence[str]) -> list:
        i, j = self.deleted_span
        return list(tokens[i:j])

    def as_dict(self, tokens: Sequence[str] | None = None) -> dict:
        d = {"deleted_span": list(self.deleted_span), "deletions": self.deletions,
             "cue": self.cue_used, "corrected": " ".join(self.corrected)}
        if tokens is not None:
            d["deleted"] = self.deleted_tokens(tokens)
        return d


def find_candidates(tokens: Sequence[str], cues: Iterable[str] = DEFAULT_CUES,
                    fillers: Iterable[str] = (), related: Callable | None = None,
                    max_candidates: int = 32) -> list[RepairCandidate]:
    """Ranked repair hypotheses for a token list (empty if none).

    ``related(a, b)`` optionally widens matching beyond identical words.
    Sentence-initial filler words never take part in a match.
    """
    toks = [t.lower() for t in tokens]
    cues = frozenset(c.lower() for c in cues)
    fillers = frozenset(f.lower() for f in fillers)
    n = len(toks)
    first = 0
    while first < n and toks[first] in fillers:
        first += 1

    def same(a: str, b: str) -> bool:
        return a == b or (related is not None and related(a, b))

    found = []
    for i in range(first, n):
        for j in range(i + 1, n):
            if not same(toks[i], toks[j]):
                continue
            m = 1
            while i + m < j and j + m < n and same(toks[i + m], toks[j + m]):
                m += 1
            cue = toks[j - 1] if j - 1 >= i + m and toks[j - 1] in cues else None
            corrected = tuple(toks[:i] + toks[j:])
            found.append((j - i, -i, len(found),
                          RepairCandidate((i, j), m, cue, corrected, j - i)))
    found.sort(key=lambda x: x[:3])
    return [c for *_, c in found[:max_candidates]]


def correct(tokens: Sequence[str], cues: Iterable[str], interpret: Callable,
            **kwargs):
    """Return ``(candidate, interpretation)`` for the first candidate that
    ``interpret`` accepts (returns something other than ``None``)."""
    cands = find_candidates(tokens, cues, **kwargs)
    for c in cands:
        result = interpret(list(c.corrected))
        if result is not None:
            return c, result
    raise NoRepairFound(len(cands))
