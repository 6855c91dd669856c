"""Tokenizer and parser for ``.ugr`` grammar files.

The concrete syntax follows the Prolog-flavoured rule notation::

    syn(whq_ynq_slash_np,
      [ s:[sentence_type=whq, form=tnsd, gapsin=G, gapsout=G],
        np:[wh=ynq, pers_num=N],
        s:[sentence_type=ynq, form=tnsd, gapsin=np:[pers_num=N], gapsout=null]],
      licenses(0, np:[pers_num=N])).

plus declaration statements (``space``, ``category``, ``sort``,
``signature``, ``class``) and the term statements ``sem``, ``lex``,
``morph``, ``marked``, ``cue``, ``filler`` and ``start``.  ``%`` starts a
line comment; statements end with an optional ``.``.

Parsing never raises: problems become :class:`Diagnostic` records and the
parser resynchronizes at the next statement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str
    severity: str = "error"
    file: str = "<grammar>"

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.severity}: {self.message}"


# --- generic terms ---------------------------------------------------------

@dataclass(frozen=True)
class Pos:
    line: int
    col: int


@dataclass(frozen=True)
class NameNode:
    name: str
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class VarNode:
    name: str
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class StrNode:
    value: str
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class CompoundNode:
    functor: str
    args: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class ListNode:
    items: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class TupleNode:
    items: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class FeatNode:
    name: str
    value: Any
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class CatNode:
    cat: str
    feats: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))
    schematic: bool = False


@dataclass(frozen=True)
class OpNode:
    """``a|b|c`` (op ``'|'``) or ``a&b`` (op ``'&'``) value expression."""

    op: str
    parts: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


# --- statements ------------------------------------------------------------

@dataclass(frozen=True)
class SpaceDecl:
    name: str
    factors: tuple  # tuple of tuples of value names
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class FeatureDecl:
    name: str
    kind: str  # 'space' | 'cat' | 'lf'
    arg: Any   # space name, tuple of cat names, or None
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class CategoryDecl:
    name: str
    features: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SortDecl:
    name: str
    parent: str | None
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SignatureDecl:
    name: str
    args: tuple | None  # tuple of tuples of sort names; None for a constant
    result: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SynDecl:
    name: str
    cats: tuple  # mother first
    licensor: tuple | None  # (index, CatNode)
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SemDecl:
    name: str
    pairs: tuple  # ((lf_node, CatNode), ...) mother first
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class LexDecl:
    word: str
    cat: Any
    lf: Any
    paradigm: str | None
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class MorphTransformDecl:
    suffix: str
    overrides: tuple  # FeatNodes
    wrapper: Any
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class MorphDecl:
    paradigm: str
    transforms: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SimpleDecl:
    """``marked(rule)``, ``cue(word)``, ``filler(word)``, ``start(cat)``."""

    kind: str
    name: str
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class ClassDecl:
    rank: int
    label: str
    body: tuple
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass
class GrammarAST:
    statements: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    file: str = "<grammar>"

    @property
    def ok(self) -> bool:
        return not self.diagnostics


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z0-9][A-Za-z0-9_']*)
  | (?P<punct>[()\[\]{},:=|&.<*])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: Pos


class GrammarSyntaxError(Exception):
    def __init__(self, message, pos):
        super().__init__(message)
        self.pos = pos


def tokenize(text: str, diagnostics: list, file: str) -> list[Token]:
    out = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            diagnostics.append(Diagnostic(line, i - line_start + 1,
                                          f"unexpected character {text[i]!r}", file=file))
            i += 1
            continue
        kind = m.lastgroup
        pos = Pos(line, i - line_start + 1)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tok = m.group()
            if kind == "str":
                tok = bytes(tok[1:-1], "utf-8").decode("unicode_escape")
            out.append(Token(kind, tok, pos))
        i = m.end()
    out.append(Token("eof", "", Pos(line, i - line_start + 1)))
    return out


# --- parser ------------------------------------------------------------------

_KEYWORDS = {"space", "category", "sort", "signature", "class"}
_TERM_STATEMENTS = {"syn", "sem", "lex", "morph", "marked", "cue", "filler", "start"}


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list, file: str):
        self.toks = tokens
        self.i = 0
        self.diags = diagnostics
        self.file = file

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text) -> bool:
        t = self.tok
        return t.kind == "punct" and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            raise GrammarSyntaxError(f"expected {text!r}, found {self._describe()}", self.tok.pos)
        return self.advance()

    def expect_name(self, what="name") -> Token:
        if self.tok.kind != "name":
            raise GrammarSyntaxError(f"expected {what}, found {self._describe()}", self.tok.pos)
        return self.advance()

    def _describe(self) -> str:
        t = self.tok
        return "end of file" if t.kind == "eof" else repr(t.text)

    def error(self, exc: GrammarSyntaxError):
        self.diags.append(Diagnostic(exc.pos.line, exc.pos.col, str(exc), file=self.file))

    def resync(self, start_index: int):
        # skip to just past the next top-level '.', or to a statement keyword
        depth = 0
        if self.i == start_index:
            self.advance()
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "punct":
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    depth = max(0, depth - 1)
                elif t.text == "." and depth == 0:
                    self.advance()
                    return
            elif (depth == 0 and t.kind == "name" and t.pos.col == 1
                  and (t.text in _KEYWORDS or t.text in _TERM_STATEMENTS)):
                return
            self.advance()

    # statements
    def statements(self, closing: str | None = None) -> list:
        out = []
        while True:
            if self.tok.kind == "eof":
                if closing:
                    self.error(GrammarSyntaxError(f"missing {closing!r}", self.tok.pos))
                return out
            if closing and self.at(closing):
                self.advance()
                return out
            if self.at("."):
                self.advance()
                continue
            start = self.i
            try:
                st = self.statement()
                if st is not None:
                    out.append(st)
                if self.at("."):
                    self.advance()
            except GrammarSyntaxError as exc:
                self.error(exc)
                self.resync(start)

    def statement(self):
        t = self.tok
        if t.kind != "name":
            raise GrammarSyntaxError(f"expected a statement, found {self._describe()}", t.pos)
        if t.text == "space" and self.peek().kind == "name":
            return self.space_decl()
        if t.text == "category" and self.peek().kind == "name":
            return self.category_decl()
        if t.text == "sort" and self.peek().kind == "name":
            return self.sort_decl()
        if t.text == "signature" and self.peek().kind == "name":
            return self.signature_decl()
        if t.text == "class" and self.peek().kind == "name":
            return self.class_decl()
        term = self.term()
        return self.interpret(term)

    def space_decl(self):
        pos = self.advance().pos
        name = self.expect_name("space name").text
        factors = [self.value_set()]
        while self.at("*"):
            self.advance()
            factors.append(self.value_set())
        return SpaceDecl(name, tuple(factors), pos)

    def value_set(self) -> tuple:
        self.expect("{")
        vals = []
        if not self.at("}"):
            vals.append(self.expect_name("value").text)
            while self.at(","):
                self.advance()
                vals.append(self.expect_name("value").text)
        self.expect("}")
        return tuple(vals)

    def category_decl(self):
        pos = self.advance().pos
        name = self.expect_name("category name").text
        self.expect("{")
        feats = []
        if not self.at("}"):
            feats.append(self.feature_decl())
            while self.at(","):
                self.advance()
                feats.append(self.feature_decl())
        self.expect("}")
        return CategoryDecl(name, tuple(feats), pos)

    def feature_decl(self):
        tok = self.expect_name("feature name")
        self.expect(":")
        ty = self.expect_name("feature type")
        if ty.text == "lf":
            return FeatureDecl(tok.text, "lf", None, tok.pos)
        if ty.text == "cat" and self.at("("):
            self.advance()
            cats = [self.expect_name("category name").text]
            while self.at(","):
                self.advance()
                cats.append(self.expect_name("category name").text)
            self.expect(")")
            return FeatureDecl(tok.text, "cat", tuple(cats), tok.pos)
        return FeatureDecl(tok.text, "space", ty.text, tok.pos)

    def sort_decl(self):
        pos = self.advance().pos
        name = self.expect_name("sort name").text
        parent = None
        if self.at("<"):
            self.advance()
            parent = self.expect_name("parent sort").text
        return SortDecl(name, parent, pos)

    def sort_set(self) -> tuple:
        names = [self.expect_name("sort").text]
        while self.at("|"):
            self.advance()
            names.append(self.expect_name("sort").text)
        return tuple(names)

    def signature_decl(self):
        pos = self.advance().pos
        name = self.expect_name("predicate name").text
        args = None
        if self.at("("):
            self.advance()
            args = []
            if not self.at(")"):
                args.append(self.sort_set())
                while self.at(","):
                    self.advance()
                    args.append(self.sort_set())
            self.expect(")")
            args = tuple(args)
        self.expect(":")
        return SignatureDecl(name, args, self.sort_set(), pos)

    def class_decl(self):
        pos = self.advance().pos
        rank_tok = self.expect_name("class rank")
        if not rank_tok.text.isdigit():
            raise GrammarSyntaxError(f"class rank must be an integer, got {rank_tok.text!r}",
                                     rank_tok.pos)
        if self.tok.kind != "str":
            raise GrammarSyntaxError("expected a quoted class label", self.tok.pos)
        label = self.advance().text
        self.expect("{")
        body = self.statements(closing="}")
        return ClassDecl(int(rank_tok.text), label, tuple(body), pos)

    # terms
    def term(self):
        first = self.primary()
        if self.at("|") or self.at("&"):
            op = self.tok.text
            parts = [first]
            while self.at("|") or self.at("&"):
                if self.tok.text != op:
                    raise GrammarSyntaxError(
                        "mixing '|' and '&' requires explicit parentheses", self.tok.pos)
                self.advance()
                parts.append(self.primary())
            return OpNode(op, tuple(parts), _pos(first))
        return first

    def primary(self):
        t = self.tok
        if t.kind == "var":
            self.advance()
            if self.at(":") and self.peek().kind == "punct" and self.peek().text == "[":
                self.advance()
                feats = self.feat_list()
                return CatNode(t.text, feats, t.pos, schematic=True)
            return VarNode(t.text, t.pos)
        if t.kind == "str":
            self.advance()
            return StrNode(t.text, t.pos)
        if t.kind == "name":
            self.advance()
            if self.at(":"):
                self.advance()
                return CatNode(t.text, self.feat_list(), t.pos)
            if self.at("="):
                self.advance()
                return FeatNode(t.text, self.term(), t.pos)
            if self.at("("):
                self.advance()
                args = self.term_seq(")")
                return CompoundNode(t.text, tuple(args), t.pos)
            return NameNode(t.text, t.pos)
        if self.at("["):
            self.advance()
            return ListNode(tuple(self.term_seq("]")), t.pos)
        if self.at("("):
            self.advance()
            items = self.term_seq(")")
            if not items:
                raise GrammarSyntaxError("empty parentheses", t.pos)
            if len(items) == 1:
                return items[0]
            return TupleNode(tuple(items), t.pos)
        raise GrammarSyntaxError(f"unexpected {self._describe()}", t.pos)

    def term_seq(self, closing: str) -> list:
        items = []
        if self.at(closing):
            self.advance()
            return items
        items.append(self.term())
        while self.at(","):
            self.advance()
            items.append(self.term())
        self.expect(closing)
        return items

    def feat_list(self) -> tuple:
        start = self.expect("[")
        feats = []
        if not self.at("]"):
            feats.append(self.feat())
            while self.at(","):
                self.advance()
                feats.append(self.feat())
        if not self.at("]"):
            raise GrammarSyntaxError(f"expected ',' or ']' in feature list, found "
                                     f"{self._describe()}", self.tok.pos)
        self.advance()
        del start
        return tuple(feats)

    def feat(self):
        t = self.expect_name("feature name")
        self.expect("=")
        return FeatNode(t.text, self.term(), t.pos)

    # term statements
    def interpret(self, term):
        if not isinstance(term, CompoundNode):
            raise GrammarSyntaxError("expected a statement such as syn(...) or lex(...)",
                                     _pos(term))
        f, args, pos = term.functor, term.args, term.pos
        if f == "syn":
            if len(args) not in (2, 3) or not isinstance(args[1], ListNode):
                raise GrammarSyntaxError("syn expects (name, [mother, daughter, ...]"
                                         "[, licenses(i, cat)])", pos)
            name = _name(args[0], "rule name")
            cats = args[1].items
            if len(cats) < 2:
                raise GrammarSyntaxError("syn rule needs a mother and at least one daughter",
                                         args[1].pos)
            for c in cats:
                if not isinstance(c, CatNode):
                    raise GrammarSyntaxError("syn rule elements must be categories", _pos(c))
            lic = None
            if len(args) == 3:
                a = args[2]
                if (not isinstance(a, CompoundNode) or a.functor != "licenses"
                        or len(a.args) != 2 or not isinstance(a.args[0], NameNode)
                        or not a.args[0].name.isdigit() or not isinstance(a.args[1], CatNode)):
                    raise GrammarSyntaxError("expected licenses(daughter_index, gap_category)",
                                             _pos(a))
                lic = (int(a.args[0].name), a.args[1])
            return SynDecl(name, tuple(cats), lic, pos)
        if f == "sem":
            if len(args) != 2 or not isinstance(args[1], ListNode):
                raise GrammarSyntaxError("sem expects (name, [(LF, cat), ...])", pos)
            name = _name(args[0], "rule name")
            pairs = []
            for item in args[1].items:
                if (not isinstance(item, TupleNode) or len(item.items) != 2
                        or not isinstance(item.items[1], CatNode)):
                    raise GrammarSyntaxError("sem rule elements must be (LF, category) pairs",
                                             _pos(item))
                pairs.append((item.items[0], item.items[1]))
            if len(pairs) < 2:
                raise GrammarSyntaxError("sem rule needs a mother and at least one daughter",
                                         args[1].pos)
            return SemDecl(name, tuple(pairs), pos)
        if f == "lex":
            if len(args) not in (3, 4):
                raise GrammarSyntaxError("lex expects (word, category, LF[, paradigm])", pos)
            word = _word(args[0])
            if not isinstance(args[1], CatNode):
                raise GrammarSyntaxError("lex entry category must be cat:[...]", _pos(args[1]))
            paradigm = _name(args[3], "paradigm name") if len(args) == 4 else None
            return LexDecl(word, args[1], args[2], paradigm, pos)
        if f == "morph":
            if len(args) != 2 or not isinstance(args[1], ListNode):
                raise GrammarSyntaxError("morph expects (paradigm, [rule(suffix, [f=v,...], LF), ...])",
                                         pos)
            transforms = []
            for r in args[1].items:
                if (not isinstance(r, CompoundNode) or r.functor != "rule" or len(r.args) != 3
                        or not isinstance(r.args[0], StrNode)
                        or not isinstance(r.args[1], ListNode)):
                    raise GrammarSyntaxError('expected rule("suffix", [feature=value, ...], LF)',
                                             _pos(r))
                for o in r.args[1].items:
                    if not isinstance(o, FeatNode):
                        raise GrammarSyntaxError("morph overrides must be feature=value",
                                                 _pos(o))
                transforms.append(MorphTransformDecl(r.args[0].value, r.args[1].items,
                                                     r.args[2], r.pos))
            return MorphDecl(_name(args[0], "paradigm name"), tuple(transforms), pos)
        if f in ("marked", "cue", "filler", "start"):
            if len(args) != 1:
                raise GrammarSyntaxError(f"{f} expects one argument", pos)
            val = _word(args[0]) if f in ("cue", "filler") else _name(args[0], "name")
            return SimpleDecl(f, val, pos)
        raise GrammarSyntaxError(f"unknown statement {f!r}", pos)


def _pos(node) -> Pos:
    return getattr(node, "pos", Pos(0, 0))


def _name(node, what: str) -> str:
    if not isinstance(node, NameNode):
        raise GrammarSyntaxError(f"expected {what}", _pos(node))
    return node.name


def _word(node) -> str:
    if isinstance(node, NameNode):
        return node.name
    if isinstance(node, StrNode):
        return node.value
    raise GrammarSyntaxError("expected a word", _pos(node))


def parse_grammar(text: str, file: str = "<grammar>") -> GrammarAST:
    """Parse grammar source into statements.  Never raises; check
    ``ast.diagnostics``."""
    diags: list = []
    toks = tokenize(text, diags, file)
    p = _Parser(toks, diags, file)
    stmts = p.statements()
    return GrammarAST(stmts, diags, file)


def node_text(node) -> str:
    """Source-like text of an AST node (for diagnostics and printing)."""
    if isinstance(node, NameNode):
        return node.name
    if isinstance(node, VarNode):
        return node.name
    if isinstance(node, StrNode):
        return '"' + node.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(node, CompoundNode):
        return f"{node.functor}({', '.join(node_text(a) for a in node.args)})"
    if isinstance(node, ListNode):
        return "[" + ", ".join(node_text(a) for a in node.items) + "]"
    if isinstance(node, TupleNode):
        return "(" + ", ".join(node_text(a) for a in node.items) + ")"
    if isinstance(node, FeatNode):
        return f"{node.name}={node_text(node.value)}"
    if isinstance(node, CatNode):
        return f"{node.cat}:[{', '.join(node_text(f) for f in node.feats)}]"
    if isinstance(node, OpNode):
        inner = node.op.join(node_text(p) for p in node.parts)
        return f"({inner})"
    return str(node)
