"""Suffix-edit morphology, lexicon expansion and lookup."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .. import fs
from .model import LexEntry, MorphRule

_VOWELS = set("aeiou")


class SuffixError(ValueError):
    pass


def apply_suffix(base: str, suffix: str) -> str:
    """Apply a suffix edit to a base form.

    ``""`` is the identity.  ``"-x+y"`` strips a literal ``x`` (which the
    base must end with) and appends ``y``.  Plain suffixes follow the usual
    English spelling adjustments::

        >>> apply_suffix("flight", "s"), apply_suffix("city", "s")
        ('flights', 'cities')
        >>> apply_suffix("leave", "ing"), apply_suffix("arrive", "ed")
        ('leaving', 'arrived')
    """
    if suffix == "":
        return base
    if suffix.startswith("-"):
        strip, _, add = suffix[1:].partition("+")
        if not base.endswith(strip):
            raise SuffixError(f"{base!r} does not end with {strip!r}")
        return base[: len(base) - len(strip)] + add
    if suffix.startswith("+"):
        return base + suffix[1:]
    cons_y = len(base) > 1 and base.endswith("y") and base[-2] not in _VOWELS
    if suffix in ("s", "es"):
        if base.endswith(("s", "x", "z", "ch", "sh")):
            return base + "es"
        if cons_y:
            return base[:-1] + "ies"
        return base + "s"
    if suffix[0] == "e" and suffix in ("ed", "er", "est"):
        if base.endswith("e"):
            return base + suffix[1:]
        if cons_y:
            return base[:-1] + "i" + suffix
        return base + suffix
    if suffix == "ing":
        if base.endswith("e") and not base.endswith(("ee", "ye", "oe")) and len(base) > 2:
            return base[:-1] + "ing"
        if base.endswith("ie"):
            return base[:-2] + "ying"
        return base + "ing"
    return base + suffix


def expand_lexicon(entries: Iterable[LexEntry], morph: Mapping[str, MorphRule],
                   type_override: Callable | None = None,
                   report: Callable | None = None) -> list[LexEntry]:
    """Expand base entries through their paradigms.

    Base entries are kept; each transform of an entry's paradigm adds one
    derived entry recording its base and transform.  ``type_override(cat,
    feat_node)`` turns a raw override into ``(feature, value)``, raising
    ``ValueError`` when it does not fit the entry's category; ``report``
    receives ``(transform, message)`` for every rejected derivation.
    """
    out = []
    for e in entries:
        out.append(e)
        if e.paradigm is None:
            continue
        rule = morph.get(e.paradigm)
        if rule is None:
            if report:
                report(None, f"lexical entry {e.surface!r} uses unknown paradigm "
                             f"{e.paradigm!r}")
            continue
        for t in rule.transforms:
            try:
                surface = apply_suffix(e.surface, t.suffix)
                updates = {}
                for o in t.overrides:
                    if type_override is None:
                        raise ValueError("feature overrides need a type checker")
                    name, value = type_override(e.category.cat, o)
                    updates[name] = value
            except ValueError as exc:
                if report:
                    report(t, f"paradigm {e.paradigm} on {e.surface!r}: {exc}")
                continue
            cat = e.category.replace(**updates) if updates else e.category
            lf = e.lf
            if t.wrapper is not None:
                w = fs.rename(t.wrapper, "m~")
                lf = fs.resolve(w, {"m~Base": e.lf})
            out.append(LexEntry(surface, cat, lf, e.paradigm, e.surface, t.suffix))
    return out


def index_lexicon(entries: Iterable[LexEntry]) -> dict[str, tuple]:
    table: dict[str, list] = {}
    for e in entries:
        table.setdefault(e.surface.lower(), []).append(e)
    return {k: tuple(v) for k, v in table.items()}


def lookup(token: str, lexicon) -> list:
    """``(category, lf)`` pairs for a token; empty for unknown words.

    ``lexicon`` is a compiled grammar or its surface-indexed table.
    """
    table = getattr(lexicon, "lexicon", lexicon)
    return [(e.category, e.lf) for e in table.get(token.lower(), ())]


def lexical_base(token: str, lexicon) -> set:
    """Base forms a surface token may derive from (itself included)."""
    table = getattr(lexicon, "lexicon", lexicon)
    return {e.base or e.surface for e in table.get(token.lower(), ())} or {token.lower()}
