"""Term nodes shared by feature structures and logical forms.

Logical forms are plain trees built from :class:`Const`, :class:`Apply`,
:class:`QTerm` and :class:`Wrap`, with :class:`Var` leaves.  A fully
scoped form replaces embedded quantifier terms by nested :class:`Quant`
prefixes.  All nodes are immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator


@dataclass(frozen=True)
class Var:
    """A logic variable.

    ``domain`` is only set on resolved terms, for a variable that has been
    narrowed to a non-singleton atomic value but must keep its identity
    because it is shared between several positions.
    """

    name: str
    domain: Any = None

    def __str__(self) -> str:
        if self.domain is not None:
            return f"{self.name}{{{self.domain}}}"
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        return format_lf(self)


@dataclass(frozen=True)
class QTerm:
    """An unscoped quantifier term ``qterm(quant, var, restriction)``."""

    quant: Any
    var: Var
    restriction: Any

    def __str__(self) -> str:
        return format_lf(self)


@dataclass(frozen=True)
class Wrap:
    """Illocutionary wrapper ``[marker, body]``; also a scope island."""

    marker: Any
    body: Any

    def __str__(self) -> str:
        return format_lf(self)


@dataclass(frozen=True)
class Quant:
    """A scoped quantifier prefix ``quant(q, var, restriction, body)``."""

    quant: Any
    var: Var
    restriction: Any
    body: Any

    def __str__(self) -> str:
        return format_lf(self)


LF_TYPES = (Const, Apply, QTerm, Wrap, Quant)


def children(t) -> tuple:
    if isinstance(t, Apply):
        return t.args
    if isinstance(t, QTerm):
        return (t.quant, t.var, t.restriction)
    if isinstance(t, Wrap):
        return (t.marker, t.body)
    if isinstance(t, Quant):
        return (t.quant, t.var, t.restriction, t.body)
    return ()


def iter_vars(t) -> Iterator[Var]:
    """Yield variable occurrences of an LF term in pre-order."""
    if isinstance(t, Var):
        yield t
        return
    for c in children(t):
        yield from iter_vars(c)


def lf_size(t) -> int:
    return 1 + sum(lf_size(c) for c in children(t))


def _var_names(t, pretty: bool) -> dict[str, str]:
    if not pretty:
        return {}
    names: dict[str, str] = {}
    letters = "XYZWUV"
    for v in iter_vars(t):
        if v.name not in names:
            i = len(names)
            names[v.name] = letters[i % 6] + (str(i // 6) if i >= 6 else "")
    return names


def format_lf(t, pretty: bool = False) -> str:
    """Canonical parenthesized text for an LF term.

    With ``pretty=True`` variables are renamed X, Y, Z, ... in order of
    first occurrence.
    """
    names = _var_names(t, pretty)

    def fmt(x) -> str:
        if x is None:
            return "_"
        if isinstance(x, Var):
            return names.get(x.name, x.name)
        if isinstance(x, Const):
            return x.name
        if isinstance(x, Apply):
            if not x.args:
                return f"{x.op}()"
            return f"{x.op}({', '.join(fmt(a) for a in x.args)})"
        if isinstance(x, QTerm):
            return f"qterm({fmt(x.quant)}, {fmt(x.var)}, {fmt(x.restriction)})"
        if isinstance(x, Wrap):
            return f"[{fmt(x.marker)}, {fmt(x.body)}]"
        if isinstance(x, Quant):
            return (f"quant({fmt(x.quant)}, {fmt(x.var)}, "
                    f"{fmt(x.restriction)}, {fmt(x.body)})")
        return str(x)

    return fmt(t)


def lf_to_json(t, pretty: bool = False):
    """Structured JSON form of an LF term."""
    names = _var_names(t, pretty)

    def js(x):
        if x is None:
            return None
        if isinstance(x, Var):
            return {"var": names.get(x.name, x.name)}
        if isinstance(x, Const):
            return {"const": x.name}
        if isinstance(x, Apply):
            return {"op": x.op, "args": [js(a) for a in x.args]}
        if isinstance(x, QTerm):
            return {"qterm": js(x.quant), "var": js(x.var),
                    "restriction": js(x.restriction)}
        if isinstance(x, Wrap):
            return {"wrap": js(x.marker), "body": js(x.body)}
        if isinstance(x, Quant):
            return {"quant": js(x.quant), "var": js(x.var),
                    "restriction": js(x.restriction), "body": js(x.body)}
        raise TypeError(f"not an LF term: {x!r}")

    return js(t)
