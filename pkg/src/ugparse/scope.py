"""Quantifier scoping of quasi-logical forms.

Every ``qterm(Q, X, R)`` in a QLF is pulled out into a ``quant(Q, X, R,
Body)`` prefix and its occurrences are replaced by ``X``.  Each
permutation of the quantifiers gives one candidate, subject to the
free-variable constraint: a quantifier whose restriction mentions another
quantifier's variable must sit inside that quantifier.  Illocutionary
wrappers are scope islands; their bodies are scoped on their own.

Candidates are ranked by a list of rules, each scoring a scoping (lower is
better); the first scoping with the lowest score tuple is chosen.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .terms import Apply, QTerm, Quant, Var, Wrap, children

MAX_QUANTIFIERS = 7


class ScopeOverflow(Exception):
    def __init__(self, count: int, limit: int = MAX_QUANTIFIERS):
        super().__init__(f"{count} quantifiers in one scope domain exceeds the limit of {limit}"
                         f" ({math.factorial(count)} orderings)")
        self.count = count


class ScopingError(Exception):
    pass


@dataclass(frozen=True)
class QInfo:
    quant: object
    var: str
    position: int   # pre-order index of the first occurrence in the QLF

    @property
    def quant_name(self) -> str:
        return getattr(self.quant, "name", str(self.quant))


@dataclass(frozen=True)
class ScopedLF:
    lf: object
    domains: tuple = ()   # per scope domain, quantifiers outermost first

    @property
    def order(self) -> tuple:
        return tuple(q.var for d in self.domains for q in d)


@dataclass
class ScopingRules:
    """Default ranking: stronger quantifiers outside, then surface order."""

    strength: dict = field(default_factory=lambda: {"each": 1})

    def score(self, s: ScopedLF) -> tuple:
        return (self.strength_violations(s), self.surface_inversions(s))

    def strength_violations(self, s: ScopedLF) -> int:
        n = 0
        for d in s.domains:
            for a, b in itertools.combinations(d, 2):
                if self.strength.get(a.quant_name, 0) < self.strength.get(b.quant_name, 0):
                    n += 1
        return n

    @staticmethod
    def surface_inversions(s: ScopedLF) -> int:
        return sum(1 for d in s.domains for a, b in itertools.combinations(d, 2)
                   if a.position > b.position)


# -- collection -------------------------------------------------------------

def _positions(t) -> dict:
    """Pre-order index of the first occurrence of each qterm variable."""
    pos: dict = {}
    counter = itertools.count()

    def walk(x):
        i = next(counter)
        if isinstance(x, QTerm) and x.var.name not in pos:
            pos[x.var.name] = i
        for c in children(x):
            walk(c)

    walk(t)
    return pos


def _own_qterms(t) -> list[QTerm]:
    """QTerms of this scope domain (not inside wrappers), by first occurrence."""
    seen: dict = {}

    def walk(x):
        if isinstance(x, Wrap):
            return
        if isinstance(x, QTerm):
            seen.setdefault(x.var.name, x)
            walk(x.restriction)
            return
        for c in children(x):
            walk(c)

    walk(t)
    return list(seen.values())


def _strip(x, names: frozenset):
    """Replace qterms whose variable is in ``names`` by their variable."""
    if isinstance(x, QTerm) and x.var.name in names:
        return x.var
    if isinstance(x, Wrap):
        return x
    if isinstance(x, Apply):
        return Apply(x.op, tuple(_strip(a, names) for a in x.args))
    if isinstance(x, QTerm):
        return QTerm(x.quant, x.var, _strip(x.restriction, names))
    return x


def _var_names(x) -> set:
    if isinstance(x, Var):
        return {x.name}
    out = set()
    for c in children(x):
        out |= _var_names(c)
    return out


def _replace_wraps(x, choice: dict):
    if isinstance(x, Wrap):
        return choice[x]
    if isinstance(x, Apply):
        return Apply(x.op, tuple(_replace_wraps(a, choice) for a in x.args))
    if isinstance(x, QTerm):
        return QTerm(x.quant, x.var, _replace_wraps(x.restriction, choice))
    return x


def _top_wraps(x, out: list) -> list:
    if isinstance(x, Wrap):
        if x not in out:
            out.append(x)
        return out
    for c in children(x):
        _top_wraps(c, out)
    return out


def _domain(t, pos: dict) -> list[tuple]:
    """Scopings of one domain as ``(term, domains)`` pairs."""
    if isinstance(t, Wrap):
        return [(Wrap(t.marker, body), d) for body, d in _domain(t.body, pos)]
    wraps = _top_wraps(t, [])
    inner = [_domain(w, pos) for w in wraps]
    own = _own_qterms(t)
    if len(own) > MAX_QUANTIFIERS:
        raise ScopeOverflow(len(own))
    names = frozenset(q.var.name for q in own)
    restr = {q.var.name: _strip(q.restriction, names) for q in own}
    needs = {v: _var_names(r) & names - {v} for v, r in restr.items()}
    out = []
    for combo in itertools.product(*inner):
        body = _strip(_replace_wraps(t, {w: c[0] for w, c in zip(wraps, combo)}), names)
        sub = tuple(d for c in combo for d in c[1])
        for perm in itertools.permutations(own):
            bound: set = set()
            ok = True
            for q in perm:
                if not needs[q.var.name] <= bound:
                    ok = False
                    break
                bound.add(q.var.name)
            if not ok:
                continue
            lf = body
            for q in reversed(perm):
                lf = Quant(q.quant, q.var, restr[q.var.name], lf)
            info = tuple(QInfo(q.quant, q.var.name, pos[q.var.name]) for q in perm)
            out.append((lf, ((info,) if own else ()) + sub))
    return out


def enumerate_scopings(qlf) -> list[ScopedLF]:
    """All admissible scopings of ``qlf`` in a fixed order.

    A QLF without quantifier terms has exactly one scoping, itself.
    """
    res = [ScopedLF(lf, d) for lf, d in _domain(qlf, _positions(qlf))]
    if not res:
        raise ScopingError("no scoping satisfies the free-variable constraint")
    return res


def rank_and_pick(scopings: list[ScopedLF], rules: ScopingRules | None = None) -> ScopedLF:
    rules = rules or ScopingRules()
    if not scopings:
        raise ScopingError("nothing to rank")
    return min(scopings, key=rules.score)  # min keeps the first of equals


def scope(qlf, rules: ScopingRules | None = None) -> ScopedLF:
    return rank_and_pick(enumerate_scopings(qlf), rules)


def capture_errors(lf) -> list[str]:
    """Problems in a scoped form: leftover qterms, or quantified variables
    occurring outside their binder."""
    errs = []
    qvars = set()

    def collect(x):
        if isinstance(x, Quant):
            qvars.add(x.var.name)
        for c in children(x):
            collect(c)

    collect(lf)

    def walk(x, bound: frozenset):
        if isinstance(x, QTerm):
            errs.append(f"unscoped qterm for {x.var.name}")
        if isinstance(x, Var):
            if x.name in qvars and x.name not in bound:
                errs.append(f"variable {x.name} escapes its quantifier")
            return
        if isinstance(x, Quant):
            inner = bound | {x.var.name}
            walk(x.restriction, inner)
            walk(x.body, inner)
            return
        for c in children(x):
            walk(c, bound)

    walk(lf, frozenset())
    return errs
