"""Static type checking: grammar AST to :class:`CompiledGrammar`.

All problems are collected as positioned diagnostics; compilation only
succeeds when there are none.  A compiled grammar needs no further type
checks at parse time.
"""

from __future__ import annotations

from pathlib import Path

from .. import fs
from ..fs import NULL, Atomic, Category, ValueSpace, Var
from ..sem import Signature, SortHierarchy, TOP
from ..terms import Apply, Const, QTerm, Wrap
from . import dsl
from .dsl import (CatNode, ClassDecl, CompoundNode, Diagnostic, FeatNode, ListNode,
                  NameNode, OpNode, StrNode, TupleNode, VarNode, node_text)
from .lexicon import expand_lexicon, index_lexicon
from .model import (CompiledGrammar, Declarations, FeatureType, LexEntry, MorphRule,
                    MorphTransform, SemRule, SynRule, UtteranceClass)


class GrammarError(Exception):
    """Raised when a grammar has diagnostics; carries all of them."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        head = "\n".join(str(d) for d in self.diagnostics[:20])
        more = len(self.diagnostics) - 20
        super().__init__(head + (f"\n... and {more} more" if more > 0 else ""))


_LF_KEY = ("lf",)


def _type_key(ft: FeatureType):
    if ft.kind == "space":
        return ("space", ft.space.name)
    if ft.kind == "cat":
        return ("cat",)
    return _LF_KEY


def _type_desc(key) -> str:
    if key[0] == "space":
        return f"space {key[1]}"
    return "a category" if key[0] == "cat" else "a logical form"


class _Scope:
    """Variable typing within one rule or lexical entry."""

    def __init__(self, checker: "_Checker", where: str):
        self.checker = checker
        self.where = where
        self.types: dict[str, tuple] = {}

    def use(self, node: VarNode, key, context: str) -> Var:
        prev = self.types.get(node.name)
        if prev is None:
            self.types[node.name] = (key, context)
        elif prev[0] != key:
            self.checker.error(
                node.pos,
                f"{self.where}: incompatible types for variable {node.name}: "
                f"{_type_desc(prev[0])} ({prev[1]}) and {_type_desc(key)} ({context})")
        return Var(node.name)


class _Checker:
    def __init__(self, file: str):
        self.file = file
        self.diags: list[Diagnostic] = []
        self.spaces: dict[str, ValueSpace] = {}
        self.categories: dict[str, dict[str, FeatureType]] = {}
        self.sort_parent: dict[str, str | None] = {}
        self.signatures: dict[str, Signature] = {}
        self.lf_names: list[tuple] = []  # (name, pos, arity) of LF operators used

    def error(self, pos, message: str):
        self.diags.append(Diagnostic(pos.line, pos.col, message, file=self.file))

    # --- declarations -----------------------------------------------------

    def declare_space(self, d: dsl.SpaceDecl):
        if d.name in self.spaces:
            self.error(d.pos, f"duplicate value space {d.name!r}")
            return
        seen = set()
        for factor in d.factors:
            if not factor:
                self.error(d.pos, f"value space {d.name!r} has an empty factor")
                return
            for v in factor:
                if v in seen:
                    self.error(d.pos, f"value {v!r} repeated in space {d.name!r}")
                    return
                seen.add(v)
        if len(d.factors) == 1:
            self.spaces[d.name] = ValueSpace(d.name, d.factors[0])
        else:
            self.spaces[d.name] = ValueSpace.product(d.name, *d.factors)

    def declare_category(self, d: dsl.CategoryDecl, all_cats: set):
        if d.name in self.categories:
            self.error(d.pos, f"duplicate category {d.name!r}")
            return
        feats: dict[str, FeatureType] = {}
        for f in d.features:
            if f.name in feats:
                self.error(f.pos, f"feature {f.name!r} declared twice for category {d.name}")
                continue
            if f.kind == "lf":
                feats[f.name] = FeatureType("lf")
            elif f.kind == "cat":
                bad = [c for c in f.arg if c not in all_cats]
                if bad:
                    self.error(f.pos, f"feature {f.name} of {d.name} refers to undeclared "
                                      f"category {bad[0]!r}")
                    continue
                feats[f.name] = FeatureType("cat", cats=tuple(f.arg))
            else:
                space = self.spaces.get(f.arg)
                if space is None:
                    self.error(f.pos, f"feature {f.name} of {d.name} uses undeclared value "
                                      f"space {f.arg!r}")
                    continue
                feats[f.name] = FeatureType("space", space=space)
        self.categories[d.name] = feats

    def declare_sorts(self, decls: list):
        for d in decls:
            if d.name == TOP or d.name in self.sort_parent:
                self.error(d.pos, f"duplicate sort {d.name!r}")
                continue
            self.sort_parent[d.name] = d.parent if d.parent != TOP else None
        for d in decls:
            if d.parent is not None and d.parent != TOP and d.parent not in self.sort_parent:
                self.error(d.pos, f"sort {d.name!r} has undeclared parent {d.parent!r}")
                self.sort_parent[d.name] = None
        for d in decls:
            seen = {d.name}
            p = self.sort_parent.get(d.name)
            while p is not None:
                if p in seen:
                    self.error(d.pos, f"sort hierarchy cycle through {d.name!r}")
                    self.sort_parent[d.name] = None
                    break
                seen.add(p)
                p = self.sort_parent.get(p)

    def declare_signature(self, d: dsl.SignatureDecl):
        if d.name in self.signatures:
            self.error(d.pos, f"duplicate signature for {d.name!r}")
            return
        known = set(self.sort_parent) | {TOP}
        for s in [x for a in (d.args or ()) for x in a] + list(d.result):
            if s not in known:
                self.error(d.pos, f"signature for {d.name} uses undeclared sort {s!r}")
                return
        self.signatures[d.name] = Signature.of(d.args, d.result)

    # --- values -----------------------------------------------------------

    def atomic(self, node, space: ValueSpace, where: str, feat: str, cat: str):
        if isinstance(node, NameNode):
            den = space.atoms.get(node.name)
            if den is None:
                self.error(node.pos, f"{where}: improper value {node.name!r} for feature "
                                     f"{feat} of {cat} (space {space.name})")
                return None
            return Atomic(space, den)
        if isinstance(node, OpNode):
            parts = [self.atomic(p, space, where, feat, cat) for p in node.parts]
            if any(p is None for p in parts):
                return None
            acc = parts[0]
            for p in parts[1:]:
                if node.op == "|":
                    acc = acc | p
                else:
                    acc = acc & p
                    if acc is None:
                        self.error(node.pos, f"{where}: empty denotation for "
                                             f"{node_text(node)} in feature {feat} of {cat}")
                        return None
            return acc
        self.error(dsl._pos(node), f"{where}: improper value {node_text(node)!r} for "
                                   f"feature {feat} of {cat} (space {space.name})")
        return None

    def value(self, node, ft: FeatureType, scope: _Scope, feat: str, cat: str):
        if isinstance(node, VarNode):
            return scope.use(node, _type_key(ft), f"{cat}.{feat}")
        if ft.kind == "space":
            return self.atomic(node, ft.space, scope.where, feat, cat)
        if ft.kind == "cat":
            if isinstance(node, NameNode) and node.name == "null":
                return NULL
            if isinstance(node, CatNode) and not node.schematic:
                if node.cat not in ft.cats:
                    self.error(node.pos, f"{scope.where}: improper value {node.cat!r} for "
                                         f"feature {feat} of {cat} (expected "
                                         f"{' or '.join(ft.cats)})")
                    return None
            elif not isinstance(node, CatNode):
                self.error(dsl._pos(node), f"{scope.where}: improper value "
                                           f"{node_text(node)!r} for feature {feat} of {cat} "
                                           f"(expected a category or null)")
                return None
            return self.category(node, scope)
        return self.lf(node, scope)

    def category(self, node: CatNode, scope: _Scope):
        if node.schematic:
            self.error(node.pos, f"{scope.where}: rules may not schematize over syntactic "
                                 f"categories (variable {node.cat})")
            return None
        decl = self.categories.get(node.cat)
        if decl is None:
            self.error(node.pos, f"{scope.where}: undeclared category {node.cat!r}")
            return None
        feats = {}
        for f in node.feats:
            ft = decl.get(f.name)
            if ft is None:
                self.error(f.pos, f"{scope.where}: undeclared feature {f.name!r} for "
                                  f"category {node.cat}")
                continue
            if f.name in feats:
                self.error(f.pos, f"{scope.where}: feature {f.name} given twice in {node.cat}")
                continue
            v = self.value(f.value, ft, scope, f.name, node.cat)
            if v is not None:
                feats[f.name] = v
        return Category.make(node.cat, feats)

    def lf(self, node, scope: _Scope, record: bool = True):
        if isinstance(node, VarNode):
            return scope.use(node, _LF_KEY, "logical form")
        if isinstance(node, NameNode):
            if record:
                self.lf_names.append((node.name, node.pos, None))
            return Const(node.name)
        if isinstance(node, StrNode):
            return Const(node.value)
        if isinstance(node, CompoundNode):
            if node.functor == "qterm" and len(node.args) == 3:
                q, v, r = node.args
                if not isinstance(v, VarNode):
                    self.error(dsl._pos(v), f"{scope.where}: quantifier term needs a variable, "
                                            f"found {node_text(v)!r}")
                    return None
                return QTerm(self.lf(q, scope, record=False), scope.use(v, _LF_KEY, "qterm"),
                             self.lf(r, scope))
            if record:
                self.lf_names.append((node.functor, node.pos, len(node.args)))
            return Apply(node.functor, tuple(self.lf(a, scope) for a in node.args))
        if isinstance(node, ListNode) and len(node.items) == 2:
            return Wrap(self.lf(node.items[0], scope, record=False),
                        self.lf(node.items[1], scope))
        self.error(dsl._pos(node), f"{scope.where}: {node_text(node)!r} is not a logical form")
        return None

    # --- rules --------------------------------------------------------------

    def syn_rule(self, d: dsl.SynDecl, marked: set):
        scope = _Scope(self, f"in rule {d.name}")
        cats = [self.category(c, scope) for c in d.cats]
        lic = None
        if d.licensor is not None:
            idx, pat = d.licensor
            if not 0 <= idx < len(d.cats) - 1:
                self.error(d.pos, f"in rule {d.name}: gap licensor index {idx} is not a "
                                  f"daughter position (0..{len(d.cats) - 2})")
            gap = self.category(pat, scope)
            lic = (idx, gap)
        if any(c is None for c in cats) or (lic is not None and lic[1] is None):
            return None
        return SynRule(d.name, cats[0], tuple(cats[1:]), lic, d.name in marked)

    def sem_rule(self, d: dsl.SemDecl, syn: dict):
        target = syn.get(d.name)
        if target is None:
            self.error(d.pos, f"semantic rule {d.name} is keyed to missing syntactic rule "
                              f"{d.name!r}")
            return None
        if len(d.pairs) != len(target.daughters) + 1:
            self.error(d.pos, f"semantic rule {d.name} has {len(d.pairs) - 1} daughters, "
                              f"syntactic rule has {len(target.daughters)}")
            return None
        scope = _Scope(self, f"in semantic rule {d.name}")
        lfs, cats = [], []
        syn_cats = (target.mother,) + target.daughters
        ok = True
        for i, (lf_node, cat_node) in enumerate(d.pairs):
            if not cat_node.schematic and cat_node.cat != syn_cats[i].cat:
                self.error(cat_node.pos, f"semantic rule {d.name}: element {i} is "
                                         f"{cat_node.cat!r} but the syntactic rule has "
                                         f"{syn_cats[i].cat!r}")
                ok = False
            lfs.append(self.lf(lf_node, scope))
            c = self.category(cat_node, scope)
            cats.append(c)
            ok = ok and c is not None
        if not ok:
            return None
        return SemRule(d.name, d.name, lfs[0], cats[0], tuple(lfs[1:]), tuple(cats[1:]))

    def lex_entry(self, d: dsl.LexDecl):
        scope = _Scope(self, f"in lexical entry {d.word!r}")
        cat = self.category(d.cat, scope)
        lf = self.lf(d.lf, scope)
        if cat is None or lf is None:
            return None
        return LexEntry(d.word.lower(), cat, lf, d.paradigm)

    def morph_rule(self, d: dsl.MorphDecl):
        out = []
        for t in d.transforms:
            scope = _Scope(self, f"in paradigm {d.paradigm}")
            wrapper = self.lf(t.wrapper, scope)
            if wrapper is None:
                continue
            out.append(MorphTransform(t.suffix, tuple(t.overrides), wrapper))
        return MorphRule(d.paradigm, tuple(out))

    def type_override(self, cat: str, node: FeatNode):
        """Type a morphological override for a category; raises ``ValueError``."""
        ft = self.categories.get(cat, {}).get(node.name)
        if ft is None:
            raise ValueError(f"undeclared feature {node.name!r} for category {cat}")
        if isinstance(node.value, VarNode):
            raise ValueError(f"override {node.name} must not be a variable")
        n_before = len(self.diags)
        v = self.value(node.value, ft, _Scope(self, "override"), node.name, cat)
        if len(self.diags) > n_before:
            msg = self.diags[n_before].message
            del self.diags[n_before:]
            raise ValueError(msg)
        return node.name, v


def check_types(ast: dsl.GrammarAST) -> CompiledGrammar:
    """Type-check a parsed grammar.  Raises :class:`GrammarError` with every
    diagnostic (syntax ones included) if anything is wrong."""
    ck = _Checker(ast.file)
    ck.diags.extend(ast.diagnostics)
    top = ast.statements
    kinds: dict[type, list] = {}
    for st in top:
        kinds.setdefault(type(st), []).append(st)
    simple: dict[str, list] = {}
    for st in kinds.get(dsl.SimpleDecl, []):
        simple.setdefault(st.kind, []).append(st)
    classes = sorted(kinds.get(ClassDecl, []), key=lambda c: c.rank)
    for c in classes:
        for st in c.body:
            if isinstance(st, dsl.SimpleDecl) and st.kind == "marked":
                simple.setdefault("marked", []).append(st)
            elif not isinstance(st, (dsl.SynDecl, dsl.SemDecl)):
                ck.error(st.pos, f"only syn, sem and marked statements may appear inside "
                                 f"class {c.rank}")

    for d in kinds.get(dsl.SpaceDecl, []):
        ck.declare_space(d)
    all_cats = {d.name for d in kinds.get(dsl.CategoryDecl, [])}
    for d in kinds.get(dsl.CategoryDecl, []):
        ck.declare_category(d, all_cats)
    ck.declare_sorts(kinds.get(dsl.SortDecl, []))
    for d in kinds.get(dsl.SignatureDecl, []):
        ck.declare_signature(d)

    marked = {d.name for d in simple.get("marked", [])}

    broken: set = set()

    def syn_block(decls, seen_names: set):
        rules, table = [], {}
        for d in decls:
            if not isinstance(d, dsl.SynDecl):
                continue
            if d.name in seen_names:
                ck.error(d.pos, f"duplicate syntactic rule {d.name!r}")
                continue
            seen_names.add(d.name)
            r = ck.syn_rule(d, marked)
            if r is None:
                broken.add(d.name)
            else:
                rules.append(r)
                table[d.name] = r
        return rules, table

    def sem_block(decls, table):
        out: dict[str, list] = {}
        for d in decls:
            if not isinstance(d, dsl.SemDecl):
                continue
            if d.name in broken:
                continue  # its syntactic rule had errors, already reported
            r = ck.sem_rule(d, table)
            if r is not None:
                out.setdefault(r.keyed_to, []).append(r)
        return {k: tuple(v) for k, v in out.items()}

    names: set = set()
    rules, table = syn_block(top, names)
    sem_rules = sem_block(top, table)
    utt = []
    for c in classes:
        crules, ctable = syn_block(c.body, names)
        utt.append(UtteranceClass(c.rank, c.label, tuple(crules),
                                  sem_block(c.body, ctable)))

    ranks = [c.rank for c in classes]
    if len(set(ranks)) != len(ranks):
        dup = next(r for r in ranks if ranks.count(r) > 1)
        ck.error(next(c.pos for c in classes if c.rank == dup),
                 f"utterance class rank {dup} used more than once")
    elif ranks and ranks != list(range(1, len(ranks) + 1)):
        ck.error(classes[0].pos, f"utterance class ranks must be 1..{len(ranks)}, got {ranks}")

    for d in simple.get("marked", []):
        if d.name not in names:
            ck.error(d.pos, f"marked rule {d.name!r} is not a syntactic rule")
    start = "utt"
    starts = simple.get("start", [])
    if starts:
        start = starts[-1].name
        if start not in ck.categories:
            ck.error(starts[-1].pos, f"start category {start!r} is not declared")

    base = []
    for d in kinds.get(dsl.LexDecl, []):
        e = ck.lex_entry(d)
        if e is not None:
            base.append((d, e))
    morph: dict[str, MorphRule] = {}
    for d in kinds.get(dsl.MorphDecl, []):
        if d.paradigm in morph:
            ck.error(d.pos, f"duplicate paradigm {d.paradigm!r}")
            continue
        morph[d.paradigm] = ck.morph_rule(d)
    for d, e in base:
        if e.paradigm is not None and e.paradigm not in morph:
            ck.error(d.pos, f"lexical entry {d.word!r} uses undeclared paradigm "
                            f"{e.paradigm!r}")

    expanded = []
    for d, e in base:
        def report(_t, msg, _d=d):
            ck.error(_d.pos, msg)
        expanded.extend(expand_lexicon([e], morph if e.paradigm in morph else {},
                                       ck.type_override, report if e.paradigm in morph
                                       else None))

    if ck.signatures:
        reported = set()
        for name, pos, arity in ck.lf_names:
            sig = ck.signatures.get(name)
            if sig is None:
                if name not in reported:
                    ck.error(pos, f"no sort signature for logical-form atom {name!r}")
                    reported.add(name)
            elif arity is not None and sig.arity != arity:
                ck.error(pos, f"{name} applied to {arity} arguments but its signature "
                              f"has {sig.arity}")

    if ck.diags:
        raise GrammarError(sorted(ck.diags, key=lambda d: (d.line, d.col)))

    decls = Declarations(dict(ck.spaces), {k: dict(v) for k, v in ck.categories.items()})
    return CompiledGrammar(
        declarations=decls,
        rules=tuple(rules),
        sem_rules=sem_rules,
        classes=tuple(utt),
        base_lexicon=tuple(e for _, e in base),
        morph=morph,
        lexicon=index_lexicon(expanded),
        hierarchy=SortHierarchy(ck.sort_parent),
        signatures=dict(ck.signatures),
        cues=frozenset(d.name.lower() for d in simple.get("cue", [])),
        fillers=frozenset(d.name.lower() for d in simple.get("filler", [])),
        marked=frozenset(marked),
        start=start,
        sort_order=tuple(ck.sort_parent),
    )


def diagnostics_for(text: str, file: str = "<grammar>") -> list[Diagnostic]:
    """All syntax and type diagnostics for a grammar source (empty if clean)."""
    try:
        compile_grammar(text, file)
    except GrammarError as exc:
        return exc.diagnostics
    return []


def compile_grammar(text: str, file: str = "<grammar>") -> CompiledGrammar:
    return check_types(dsl.parse_grammar(text, file))


def load_grammar(path) -> CompiledGrammar:
    p = Path(path)
    return compile_grammar(p.read_text(encoding="utf-8"), str(p))
