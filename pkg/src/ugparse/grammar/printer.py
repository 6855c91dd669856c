"""Pretty-print a compiled grammar back to ``.ugr`` source.

Recompiling the output yields an equal :class:`CompiledGrammar`.
"""

from __future__ import annotations

import re

from ..fs import NULL, Atomic, Category, Var, format_atomic
from ..terms import Apply, Const, QTerm, Quant, Wrap
from .dsl import node_text
from .model import CompiledGrammar, SynRule

_NAME_RE = re.compile(r"[a-z0-9][A-Za-z0-9_']*\Z")


def _word(w: str) -> str:
    if _NAME_RE.match(w):
        return w
    return '"' + w.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_lf_source(t) -> str:
    """LF text that the grammar parser reads back to the same term."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return _word(t.name)
    if isinstance(t, Apply):
        return f"{t.op}({', '.join(format_lf_source(a) for a in t.args)})"
    if isinstance(t, QTerm):
        return (f"qterm({format_lf_source(t.quant)}, {format_lf_source(t.var)}, "
                f"{format_lf_source(t.restriction)})")
    if isinstance(t, Wrap):
        return f"[{format_lf_source(t.marker)}, {format_lf_source(t.body)}]"
    if isinstance(t, Quant):
        raise ValueError("scoped forms do not occur in grammars")
    return str(t)


def format_value(v) -> str:
    if isinstance(v, Category):
        return format_category(v)
    if isinstance(v, Atomic):
        return format_atomic(v)
    if v is NULL:
        return "null"
    return format_lf_source(v)


def format_category(c: Category) -> str:
    inner = ", ".join(f"{n}={format_value(v)}" for n, v in c.features)
    return f"{c.cat}:[{inner}]"


def _space_factors(space) -> list:
    if not space.is_product:
        return [list(space.values)]
    parts = [v.split("&") for v in space.values]
    factors = [[] for _ in parts[0]]
    for p in parts:
        for i, comp in enumerate(p):
            if comp not in factors[i]:
                factors[i].append(comp)
    return factors


def _syn(r: SynRule, indent: str) -> str:
    cats = ",\n".join(f"{indent}    {format_category(c)}" for c in (r.mother,) + r.daughters)
    lic = ""
    if r.gap_licensor is not None:
        lic = f",\n{indent}  licenses({r.gap_licensor[0]}, {format_category(r.gap_licensor[1])})"
    return f"{indent}syn({r.name},\n{indent}  [\n{cats}]{lic}).\n"


def _sem(s, indent: str) -> str:
    pairs = [(s.mother_lf, s.mother_cat)] + list(zip(s.daughter_lfs, s.daughter_cats))
    body = ",\n".join(f"{indent}    ({format_lf_source(lf)}, {format_category(c)})"
                      for lf, c in pairs)
    return f"{indent}sem({s.keyed_to},\n{indent}  [\n{body}]).\n"


def _rules_block(rules, sem_rules, indent="") -> list:
    out = []
    for r in rules:
        out.append(_syn(r, indent))
        for s in sem_rules.get(r.name, ()):
            out.append(_sem(s, indent))
    return out


def format_grammar(g: CompiledGrammar) -> str:
    out = ["% value spaces\n"]
    for name, space in g.declarations.spaces.items():
        facs = " * ".join("{" + ", ".join(f) + "}" for f in _space_factors(space))
        out.append(f"space {name} {facs}.\n")
    out.append("\n% categories\n")
    for cat, feats in g.declarations.categories.items():
        inner = ", ".join(f"{n}: {ft}" for n, ft in feats.items())
        out.append(f"category {cat} {{{inner}}}.\n")
    if g.hierarchy.parent:
        out.append("\n% sorts\n")
        for s in g.sort_order or tuple(g.hierarchy.parent):
            p = g.hierarchy.parent[s]
            out.append(f"sort {s}.\n" if p is None else f"sort {s} < {p}.\n")
    if g.signatures:
        out.append("\n% signatures\n")
        for name, sig in g.signatures.items():
            args = ""
            if sig.args:
                args = "(" + ", ".join("|".join(sorted(a)) for a in sig.args) + ")"
            out.append(f"signature {name}{args} : {'|'.join(sorted(sig.result))}.\n")
    out.append("\n% constituent rules\n")
    out.extend(_rules_block(g.rules, g.sem_rules))
    for r in sorted(g.marked):
        out.append(f"marked({r}).\n")
    if g.classes or g.start != "utt":
        out.append(f"\nstart({g.start}).\n")
    for c in g.classes:
        label = c.label.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'\nclass {c.rank} "{label}" {{\n')
        out.extend(_rules_block(c.rules, c.sem_rules, "  "))
        out.append("}\n")
    if g.morph:
        out.append("\n% morphology\n")
        for m in g.morph.values():
            ts = ",\n".join(
                f'    rule({_word_str(t.suffix)}, [{", ".join(node_text(o) for o in t.overrides)}]'
                f", {format_lf_source(t.wrapper)})" for t in m.transforms)
            out.append(f"morph({m.paradigm}, [\n{ts}]).\n")
    out.append("\n% lexicon\n")
    for e in g.base_lexicon:
        par = f", {e.paradigm}" if e.paradigm else ""
        out.append(f"lex({_word(e.surface)}, {format_category(e.category)}, "
                   f"{format_lf_source(e.lf)}{par}).\n")
    for kind, words in (("cue", g.cues), ("filler", g.fillers)):
        for w in sorted(words):
            out.append(f"{kind}({_word(w)}).\n")
    return "".join(out)


def _word_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
