"""Compiled, immutable grammar tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping

from .. import fs
from ..fs import Category, ValueSpace
from ..sem import Signature, SortHierarchy


@dataclass(frozen=True)
class FeatureType:
    kind: str  # 'space' | 'cat' | 'lf'
    space: ValueSpace | None = None
    cats: tuple = ()

    def __str__(self):
        if self.kind == "space":
            return self.space.name
        if self.kind == "cat":
            return f"cat({', '.join(self.cats)})"
        return "lf"


@dataclass(frozen=True)
class Declarations:
    spaces: Mapping[str, ValueSpace]
    categories: Mapping[str, Mapping[str, FeatureType]]

    def validate(self, t, where: str = "") -> None:
        """Raise ``TypeError`` if ``t`` uses an undeclared category, feature,
        or a value outside its feature's type.  Used by debug parses."""
        if isinstance(t, Category):
            decl = self.categories.get(t.cat)
            if decl is None:
                raise TypeError(f"{where}undeclared category {t.cat!r}")
            for name, v in t.features:
                ft = decl.get(name)
                if ft is None:
                    raise TypeError(f"{where}undeclared feature {name!r} on {t.cat}")
                self._check_value(v, ft, f"{where}{t.cat}.{name}: ")

    def _check_value(self, v, ft: FeatureType, where: str):
        if isinstance(v, fs.Var):
            if v.domain is not None and (ft.kind != "space" or v.domain.space != ft.space):
                raise TypeError(f"{where}variable domain outside {ft}")
            return
        if ft.kind == "space":
            if not isinstance(v, fs.Atomic) or v.space != ft.space:
                raise TypeError(f"{where}{v} is not in space {ft.space.name}")
        elif ft.kind == "cat":
            if v is fs.NULL:
                return
            if not isinstance(v, Category) or v.cat not in ft.cats:
                raise TypeError(f"{where}{v} is not one of {ft.cats}")
            self.validate(v, where)
        elif isinstance(v, (fs.Atomic, Category)) or v is fs.NULL:
            raise TypeError(f"{where}{v} is not a logical form")


@dataclass(frozen=True)
class SynRule:
    name: str
    mother: Category
    daughters: tuple
    gap_licensor: tuple | None = None  # (daughter index, gap Category pattern)
    marked: bool = False

    @cached_property
    def renamed(self) -> "SynRule":
        p = "r~"
        lic = None
        if self.gap_licensor is not None:
            lic = (self.gap_licensor[0], fs.rename(self.gap_licensor[1], p))
        return SynRule(self.name, fs.rename(self.mother, p),
                       tuple(fs.rename(d, p) for d in self.daughters), lic, self.marked)

    def __str__(self):
        return f"{self.mother} -> {' '.join(str(d) for d in self.daughters)}"


@dataclass(frozen=True)
class SemRule:
    name: str
    keyed_to: str
    mother_lf: Any
    mother_cat: Category
    daughter_lfs: tuple
    daughter_cats: tuple

    def renamed(self, prefix: str) -> "SemRule":
        cache = self.__dict__.setdefault("_renamed", {})
        r = cache.get(prefix)
        if r is None:
            r = cache[prefix] = SemRule(
                self.name, self.keyed_to, fs.rename(self.mother_lf, prefix),
                fs.rename(self.mother_cat, prefix),
                tuple(fs.rename(x, prefix) for x in self.daughter_lfs),
                tuple(fs.rename(x, prefix) for x in self.daughter_cats))
        return r


@dataclass(frozen=True)
class LexEntry:
    surface: str
    category: Category
    lf: Any
    paradigm: str | None = None
    base: str | None = None       # base surface form, for derived entries
    transform: str | None = None  # suffix edit that derived it


@dataclass(frozen=True)
class MorphTransform:
    suffix: str
    overrides: tuple  # raw (feature, value-node) pairs, typed per entry at expansion
    wrapper: Any      # LF with Var('Base') standing for the base LF


@dataclass(frozen=True)
class MorphRule:
    paradigm: str
    transforms: tuple


@dataclass(frozen=True)
class UtteranceClass:
    rank: int
    label: str
    rules: tuple
    sem_rules: Mapping[str, tuple]


@dataclass(frozen=True)
class CompiledGrammar:
    declarations: Declarations
    rules: tuple
    sem_rules: Mapping[str, tuple]
    classes: tuple
    base_lexicon: tuple
    morph: Mapping[str, MorphRule]
    lexicon: Mapping[str, tuple]
    hierarchy: SortHierarchy
    signatures: Mapping[str, Signature]
    cues: frozenset = frozenset()
    fillers: frozenset = frozenset()
    marked: frozenset = frozenset()
    start: str = "utt"
    sort_order: tuple = field(default=(), compare=False)

    @property
    def constituent_rule_count(self) -> int:
        return len(self.rules)

    @property
    def constituent_sem_count(self) -> int:
        return sum(len(v) for v in self.sem_rules.values())

    def rule(self, name: str) -> SynRule | None:
        for r in self.all_rules():
            if r.name == name:
                return r
        return None

    def all_rules(self):
        yield from self.rules
        for c in self.classes:
            yield from c.rules

    def summary(self) -> dict:
        return {
            "categories": len(self.declarations.categories),
            "spaces": len(self.declarations.spaces),
            "syntactic_rules": len(self.rules),
            "semantic_rules": self.constituent_sem_count,
            "utterance_classes": len(self.classes),
            "utterance_syntactic_rules": sum(len(c.rules) for c in self.classes),
            "utterance_semantic_rules": sum(len(v) for c in self.classes
                                            for v in c.sem_rules.values()),
            "base_entries": len(self.base_lexicon),
            "expanded_entries": sum(len(v) for v in self.lexicon.values()),
            "sorts": len(self.hierarchy.parent),
            "signatures": len(self.signatures),
        }
