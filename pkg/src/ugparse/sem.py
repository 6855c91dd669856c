"""Quasi-logical forms, sorts, and the semantic gate on edge creation.

Every predicate and constant in a logical form has a :class:`Signature`
giving the allowed sort (a union, written ``airport|city``) of each
argument and its result sort.  :func:`sort_check` walks an LF bottom-up:
constants and applications must produce a sort below what the enclosing
operator accepts, while variables and quantifier terms accumulate the
meet of every position they occur in.  A variable whose meet becomes
empty makes the form ill-sorted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import fs
from .terms import (Apply, Const, QTerm, Quant, Var, Wrap, format_lf, lf_to_json)

__all__ = [
    "Const", "Apply", "QTerm", "Wrap", "Quant", "Var", "format_lf", "lf_to_json",
    "SortHierarchy", "Signature", "WellSorted", "IllSorted", "sort_check",
    "apply_sem_rules", "semantic_gate", "TOP",
]

TOP = "top"


class SortHierarchy:
    """A forest of sorts under the implicit root ``top``."""

    def __init__(self, parents: Mapping[str, str | None] | None = None):
        self.parent: dict[str, str | None] = {}
        for child, par in (parents or {}).items():
            self.parent[child] = par if par != TOP else None
        for child in list(self.parent):
            seen = {child}
            p = self.parent[child]
            while p is not None:
                if p in seen:
                    raise ValueError(f"sort cycle through {p!r}")
                seen.add(p)
                if p not in self.parent:
                    raise ValueError(f"undeclared sort {p!r}")
                p = self.parent[p]
        self._anc: dict[str, frozenset] = {}

    @property
    def sorts(self) -> frozenset:
        return frozenset(self.parent) | {TOP}

    def __contains__(self, sort: str) -> bool:
        return sort == TOP or sort in self.parent

    def ancestors(self, sort: str) -> frozenset:
        """Reflexive-transitive ancestors, including ``top``."""
        a = self._anc.get(sort)
        if a is None:
            chain = [sort, TOP]
            p = self.parent.get(sort)
            while p is not None:
                chain.append(p)
                p = self.parent.get(p)
            a = self._anc[sort] = frozenset(chain)
        return a

    def sort_subsumes(self, general: str, specific: str) -> bool:
        return general in self.ancestors(specific)

    def set_subsumes(self, allowed: Iterable[str], sorts: Iterable[str]) -> bool:
        """Every member of ``sorts`` is below some member of ``allowed``."""
        allowed = tuple(allowed)
        return all(any(self.sort_subsumes(a, s) for a in allowed) for s in sorts)

    def meet(self, xs: Iterable[str], ys: Iterable[str]) -> frozenset:
        """Greatest lower bound of two sort unions (empty set = bottom)."""
        xs, ys = tuple(xs), tuple(ys)
        out = set()
        for x in xs:
            for y in ys:
                if self.sort_subsumes(x, y):
                    out.add(y)
                elif self.sort_subsumes(y, x):
                    out.add(x)
        # keep only maximal elements
        return frozenset(s for s in out
                         if not any(o != s and self.sort_subsumes(o, s) for o in out))

    def __eq__(self, other):
        return isinstance(other, SortHierarchy) and self.parent == other.parent

    def __repr__(self):
        return f"SortHierarchy({self.parent!r})"


@dataclass(frozen=True)
class Signature:
    args: tuple  # tuple of frozensets of sorts
    result: frozenset

    @classmethod
    def of(cls, args: Iterable[Iterable[str]] | None, result: Iterable[str]) -> "Signature":
        return cls(tuple(frozenset(a) for a in (args or ())), frozenset(result))

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class WellSorted:
    lf: object
    sort: frozenset
    var_sorts: Mapping = field(default_factory=dict, compare=False)

    def __bool__(self):
        return True


@dataclass(frozen=True)
class IllSorted:
    path: tuple
    expected: frozenset
    found: frozenset

    def __bool__(self):
        return False

    def __str__(self):
        return (f"ill-sorted at {list(self.path)}: expected {'|'.join(sorted(self.expected))}"
                f", found {'|'.join(sorted(self.found)) or 'nothing'}")


class _Ill(Exception):
    def __init__(self, path, expected, found):
        self.result = IllSorted(tuple(path), frozenset(expected), frozenset(found))


def sort_check(lf, hierarchy: SortHierarchy, signatures: Mapping[str, Signature]):
    """Return :class:`WellSorted` (with inferred variable sorts) or the first
    :class:`IllSorted` failure.  Paths are tuples of 0-based child indices.

    Operators without a signature are unconstrained (their arguments are
    still checked); the grammar compiler rejects such LFs when a grammar
    declares any signatures at all.
    """
    var_sorts: dict[str, frozenset] = {}
    top = frozenset([TOP])

    def constrain(v: Var, allowed, path):
        cur = var_sorts.get(v.name, top)
        new = hierarchy.meet(cur, allowed)
        if not new:
            raise _Ill(path, allowed, cur)
        var_sorts[v.name] = new

    def argument(t, allowed, path):
        if isinstance(t, Var):
            constrain(t, allowed, path)
            return
        if isinstance(t, QTerm):
            infer(t, path)
            constrain(t.var, allowed, path)
            return
        found = infer(t, path)
        if not hierarchy.set_subsumes(allowed, found):
            raise _Ill(path, allowed, found)

    def infer(t, path) -> frozenset:
        if t is None:
            return top
        if isinstance(t, Var):
            return var_sorts.get(t.name, top)
        if isinstance(t, Const):
            sig = signatures.get(t.name)
            return sig.result if sig is not None else top
        if isinstance(t, Apply):
            sig = signatures.get(t.op)
            if sig is None:
                for i, a in enumerate(t.args):
                    infer(a, path + (i,))
                return top
            if sig.arity != len(t.args):
                raise _Ill(path, sig.args, frozenset([f"arity {len(t.args)}"]))
            for i, (a, allowed) in enumerate(zip(t.args, sig.args)):
                argument(a, allowed, path + (i,))
            return sig.result
        if isinstance(t, QTerm):
            infer(t.restriction, path + (2,))
            return var_sorts.get(t.var.name, top)
        if isinstance(t, Quant):
            infer(t.restriction, path + (2,))
            infer(t.body, path + (3,))
            return top
        if isinstance(t, Wrap):
            infer(t.body, path + (1,))
            return top
        return top

    try:
        s = infer(lf, ())
    except _Ill as e:
        return e.result
    return WellSorted(lf, s, dict(var_sorts))


def semantic_gate(lfs: Iterable, hierarchy: SortHierarchy | None,
                  signatures: Mapping[str, Signature] | None) -> list:
    """Keep only well-sorted LFs.  An empty result rejects the edge."""
    if hierarchy is None or not signatures:
        return list(lfs)
    return [lf for lf in lfs if sort_check(lf, hierarchy, signatures)]


def apply_sem_rules(sem_rules, mother, daughters, daughter_lfs, env):
    """Apply every semantic rule keyed to a fired syntactic rule.

    ``mother`` and ``daughters`` are the (renamed) syntactic mother pattern
    and actual daughter categories, related through ``env``.
    ``daughter_lfs`` gives the candidate LFs per daughter, in the same
    variable naming as ``daughters``.  Yields ``(bindings, mother_lf,
    choice, mother_cat)`` for every rule and LF combination whose category
    and LF constraints unify; ``choice`` is the index tuple into
    ``daughter_lfs`` and ``mother_cat`` the resolved mother category.
    An empty iteration means no semantic analysis.
    """
    for n, rule in enumerate(sem_rules):
        r = rule.renamed(f"s{n}~")
        base = dict(env)
        mcat = fs.unify_value(r.mother_cat, mother, base)
        if mcat is None:
            continue
        ok = True
        for pat, cat in zip(r.daughter_cats, daughters):
            if not fs.unify_into(pat, cat, base):
                ok = False
                break
        if not ok:
            continue
        pools = [list(enumerate(lfs)) for lfs in daughter_lfs]
        for combo in itertools.product(*pools):
            s = dict(base)
            if all(fs.unify_into(pat, lf, s) for pat, (_, lf) in zip(r.daughter_lfs, combo)):
                yield (s, fs.resolve(r.mother_lf, s), tuple(i for i, _ in combo),
                       fs.resolve(mcat, s))
