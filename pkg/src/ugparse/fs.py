"""Typed feature structures: atomic value sets, categories, unification
and subsumption.

A :class:`Category` is a major category symbol plus a sorted tuple of
``(feature, value)`` pairs.  Values are :class:`Atomic` sets over a
declared :class:`ValueSpace`, nested categories, :data:`NULL`, logic
variables, or logical-form terms (for features such as ``gapsem`` that
carry semantics).  A feature missing from a category is unconstrained.

Bindings are plain dicts from variable *name* to term.  The public
:func:`unify` never mutates the dict it is given; :func:`unify_into` does
and is what the parser uses on its private scratch copies.

Atomic denotations are sets of ground values, so conjunction is
intersection and disjunction is union.  A variable that gets narrowed to
a non-singleton set keeps its identity on resolution as a
``Var(name, domain)`` so that sharing survives (``[f=X, g=X]`` unified
with ``[f=(p|q)]`` must not become two independent ``(p|q)`` values).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .terms import Apply, Const, QTerm, Quant, Var, Wrap

__all__ = [
    "ValueSpace", "Atomic", "Null", "NULL", "Category", "Var",
    "unify", "unify_into", "unify_value", "subsumes", "resolve", "canonical", "variant",
    "rename", "term_vars",
]


class ValueSpace:
    """A declared finite set of ground values, plus named atoms.

    ``atoms`` maps every name usable in the grammar to the subset of ground
    values it denotes.  For a product space such as
    ``{1st,2nd,3rd} * {sg,pl}`` the ground values are ``'3rd&sg'`` etc. and
    the component ``3rd`` denotes both ``3rd&sg`` and ``3rd&pl``.
    """

    __slots__ = ("name", "values", "atoms", "_hash")

    def __init__(self, name: str, values: Iterable[str],
                 atoms: Mapping[str, Iterable[str]] | None = None):
        self.name = name
        self.values = tuple(values)
        if not self.values:
            raise ValueError(f"value space {name!r} is empty")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"value space {name!r} has duplicate values")
        table = {v: frozenset([v]) for v in self.values}
        for k, den in (atoms or {}).items():
            table[k] = frozenset(den)
        self.atoms = table
        self._hash = hash((name, self.values))

    @classmethod
    def product(cls, name: str, *factors: Iterable[str]) -> "ValueSpace":
        factors = [tuple(f) for f in factors]
        grounds = ["&".join(p) for p in itertools.product(*factors)]
        atoms: dict[str, set[str]] = {}
        for combo, g in zip(itertools.product(*factors), grounds):
            for comp in combo:
                atoms.setdefault(comp, set()).add(g)
        return cls(name, grounds, atoms)

    @property
    def is_product(self) -> bool:
        return any("&" in v for v in self.values)

    def atom(self, name: str) -> "Atomic":
        return Atomic(self, self.atoms[name])

    def full(self) -> "Atomic":
        return Atomic(self, frozenset(self.values))

    def __eq__(self, other):
        return (isinstance(other, ValueSpace) and self.name == other.name
                and self.values == other.values)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ValueSpace({self.name!r}, {list(self.values)!r})"


@dataclass(frozen=True)
class Atomic:
    """A non-empty subset of a value space's ground values."""

    space: ValueSpace
    denotation: frozenset

    def __post_init__(self):
        if not self.denotation:
            raise ValueError(f"empty denotation in space {self.space.name}")
        extra = self.denotation - set(self.space.values)
        if extra:
            raise ValueError(f"{sorted(extra)} not in space {self.space.name}")

    @property
    def is_full(self) -> bool:
        return len(self.denotation) == len(self.space.values)

    @property
    def is_ground(self) -> bool:
        return len(self.denotation) == 1

    def __and__(self, other: "Atomic") -> "Atomic | None":
        if other.space != self.space:
            raise TypeError(f"space mismatch: {self.space.name} vs {other.space.name}")
        den = self.denotation & other.denotation
        return Atomic(self.space, den) if den else None

    def __or__(self, other: "Atomic") -> "Atomic":
        if other.space != self.space:
            raise TypeError(f"space mismatch: {self.space.name} vs {other.space.name}")
        return Atomic(self.space, self.denotation | other.denotation)

    def __str__(self) -> str:
        return format_atomic(self)


def format_atomic(a: Atomic) -> str:
    """Shortest grammar-syntax spelling of an atomic value."""
    for name, den in a.space.atoms.items():
        if den == a.denotation and "&" not in name:
            return name
    order = [v for v in a.space.values if v in a.denotation]
    parts = [f"({v})" if "&" in v else v for v in order]
    if len(parts) == 1:
        return parts[0]
    return "(" + "|".join(parts) + ")"


class Null:
    """The distinguished "no gap" value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NULL"

    def __str__(self):
        return "null"

    def __reduce__(self):
        return (Null, ())


NULL = Null()


@dataclass(frozen=True)
class Category:
    cat: str
    features: tuple = ()
    _fmap: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_fmap", dict(self.features))

    @classmethod
    def make(cls, cat: str, features: Mapping[str, Any] | None = None) -> "Category":
        return cls(cat, tuple(sorted((features or {}).items())))

    @property
    def fmap(self) -> dict:
        return self._fmap

    def get(self, name, default=None):
        return self._fmap.get(name, default)

    def replace(self, **updates) -> "Category":
        fm = dict(self._fmap)
        fm.update(updates)
        return Category.make(self.cat, fm)

    def __str__(self) -> str:
        return format_term(self)


_FAIL = object()


def _deref(t, s):
    """Follow bindings.  Returns ``(value, handle)`` where ``handle`` is the
    variable whose binding is an atomic value or a category (so it can be
    narrowed or extended)."""
    handle = None
    steps = 0
    while isinstance(t, Var):
        b = s.get(t.name)
        if b is not None:
            handle = t
            t = b
            steps += 1
            if steps > len(s) + 1:
                raise ValueError("binding cycle")
        elif t.domain is not None:
            return t.domain, t
        else:
            return t, None
    if not isinstance(t, (Atomic, Category)):
        handle = None
    return t, handle


def _occurs(name, t, s) -> bool:
    t, _ = _deref(t, s)
    if isinstance(t, Var):
        return t.name == name
    if isinstance(t, Category):
        return any(_occurs(name, v, s) for _, v in t.features)
    if isinstance(t, (Apply, QTerm, Wrap, Quant)):
        from .terms import children
        return any(_occurs(name, c, s) for c in children(t))
    if isinstance(t, tuple):
        return any(_occurs(name, c, s) for c in t)
    return False


def _u(x, y, s):
    x, hx = _deref(x, s)
    y, hy = _deref(y, s)
    if isinstance(x, Var):
        if isinstance(y, Var):
            if x.name != y.name:
                s[x.name] = y
            return y
        if hy is not None:
            s[x.name] = hy
            return hy
        if _occurs(x.name, y, s):
            return _FAIL
        s[x.name] = y
        return x
    if isinstance(y, Var):
        if hx is not None:
            s[y.name] = hx
            return hx
        if _occurs(y.name, x, s):
            return _FAIL
        s[y.name] = x
        return y
    if isinstance(x, Atomic):
        if not isinstance(y, Atomic):
            return _FAIL
        c = x & y
        if c is None:
            return _FAIL
        if hx is not None and hy is not None:
            if hx.name != hy.name:
                s[hx.name] = hy
            s[hy.name] = c
            return hy
        if hx is not None:
            s[hx.name] = c
            return hx
        if hy is not None:
            s[hy.name] = c
            return hy
        return c
    if x is NULL or y is NULL:
        return NULL if x is y else _FAIL
    if isinstance(x, Category):
        if not isinstance(y, Category) or x.cat != y.cat:
            return _FAIL
        xf, yf = x.fmap, y.fmap
        out = {}
        for name in xf.keys() | yf.keys():
            if name in xf and name in yf:
                r = _u(xf[name], yf[name], s)
                if r is _FAIL:
                    return _FAIL
                out[name] = r
            else:
                out[name] = xf[name] if name in xf else yf[name]
        merged = Category.make(x.cat, out)
        # categories are open: store the extension back through the bindings
        if hx is not None and hy is not None:
            if hx.name != hy.name:
                s[hx.name] = hy
            s[hy.name] = merged
            return hy
        if hx is not None or hy is not None:
            h = hx if hx is not None else hy
            s[h.name] = merged
            return h
        return merged
    if isinstance(x, Const):
        return x if x == y else _FAIL
    if isinstance(x, Apply):
        if not isinstance(y, Apply) or x.op != y.op or len(x.args) != len(y.args):
            return _FAIL
        args = []
        for a, b in zip(x.args, y.args):
            r = _u(a, b, s)
            if r is _FAIL:
                return _FAIL
            args.append(r)
        return Apply(x.op, tuple(args))
    if isinstance(x, (QTerm, Wrap, Quant, tuple)):
        if type(x) is not type(y):
            return _FAIL
        xs = x if isinstance(x, tuple) else _fields(x)
        ys = y if isinstance(y, tuple) else _fields(y)
        if len(xs) != len(ys):
            return _FAIL
        parts = []
        for a, b in zip(xs, ys):
            r = _u(a, b, s)
            if r is _FAIL:
                return _FAIL
            parts.append(r)
        return tuple(parts) if isinstance(x, tuple) else type(x)(*parts)
    return _FAIL


def _fields(t):
    if isinstance(t, QTerm):
        return (t.quant, t.var, t.restriction)
    if isinstance(t, Wrap):
        return (t.marker, t.body)
    return (t.quant, t.var, t.restriction, t.body)


def unify_into(a, b, s: dict) -> bool:
    """Unify two terms, extending ``s`` in place.  On failure ``s`` may be
    partially extended; callers pass a scratch copy."""
    return _u(a, b, s) is not _FAIL


def unify_value(a, b, s: dict):
    """Like :func:`unify_into` but returns the unified (unresolved) term,
    or ``None`` on failure."""
    r = _u(a, b, s)
    return None if r is _FAIL else r


def unify(a, b, env: Mapping | None = None):
    """Unify ``a`` and ``b`` under ``env``.

    Returns ``(result, bindings)`` with ``result`` fully resolved, or
    ``None`` when the two are incompatible.  ``env`` is left untouched.
    """
    s = dict(env or {})
    r = _u(a, b, s)
    if r is _FAIL:
        return None
    return resolve(r, s), s


def resolve(v, env: Mapping | None = None, _seen: frozenset = frozenset()):
    """Substitute bindings transitively.  Unbound variables are preserved;
    raises ``ValueError`` on a binding cycle."""
    s = env or {}
    t, h = _deref(v, s)
    if isinstance(t, Var):
        return t
    if isinstance(t, Atomic):
        if h is not None and not t.is_ground:
            return Var(h.name, None if t.is_full else t)
        return t
    if isinstance(v, Var):
        if v.name in _seen:
            raise ValueError(f"binding cycle through {v.name}")
        _seen = _seen | {v.name}
    if isinstance(t, Category):
        if not t.features:
            return t
        return Category(t.cat, tuple((n, resolve(x, s, _seen)) for n, x in t.features))
    if isinstance(t, Apply):
        return Apply(t.op, tuple(resolve(a, s, _seen) for a in t.args))
    if isinstance(t, (QTerm, Wrap, Quant)):
        return type(t)(*(resolve(a, s, _seen) for a in _fields(t)))
    if isinstance(t, tuple):
        return tuple(resolve(a, s, _seen) for a in t)
    return t


# --- subsumption -----------------------------------------------------------

class _Absent:
    """Stands for a feature missing on the specific side; never equal to
    anything else, since absent features vary independently."""


def _within(y, a: Atomic) -> bool:
    if isinstance(y, Atomic):
        return y.space == a.space and y.denotation <= a.denotation
    if isinstance(y, Var):
        if y.domain is not None:
            return y.domain.denotation <= a.denotation
        return a.is_full
    return False


def _determined(t) -> bool:
    if isinstance(t, Atomic):
        return t.is_ground
    if t is NULL or isinstance(t, Const):
        return True
    if isinstance(t, (Apply, QTerm, Wrap, Quant)):
        from .terms import children
        return all(isinstance(c, Var) or _determined(c) for c in children(t))
    return False


def _same(prev, y) -> bool:
    if isinstance(prev, _Absent):
        return False
    if isinstance(prev, Var) and isinstance(y, Var):
        return prev.name == y.name
    return prev == y and _determined(y)


def _unconstrained(x, m) -> bool:
    if isinstance(x, Var):
        if x.name in m:
            return False
        if x.domain is not None and not x.domain.is_full:
            return False
        m[x.name] = _Absent()
        return True
    return isinstance(x, Atomic) and x.is_full


def _match(x, y, m) -> bool:
    if isinstance(x, Var):
        if x.name in m:
            return _same(m[x.name], y)
        if x.domain is not None and not _within(y, x.domain):
            return False
        m[x.name] = y
        return True
    if isinstance(x, Atomic):
        return _within(y, x)
    if x is NULL:
        return y is NULL
    if isinstance(x, Category):
        if not isinstance(y, Category) or x.cat != y.cat:
            return False
        yf = y.fmap
        for name, xv in x.features:
            if name in yf:
                if not _match(xv, yf[name], m):
                    return False
            elif not _unconstrained(xv, m):
                return False
        return True
    if isinstance(x, Const):
        return x == y
    if isinstance(x, Apply):
        return (isinstance(y, Apply) and x.op == y.op and len(x.args) == len(y.args)
                and all(_match(a, b, m) for a, b in zip(x.args, y.args)))
    if isinstance(x, (QTerm, Wrap, Quant)):
        return (type(x) is type(y)
                and all(_match(a, b, m) for a, b in zip(_fields(x), _fields(y))))
    if isinstance(x, tuple):
        return (isinstance(y, tuple) and len(x) == len(y)
                and all(_match(a, b, m) for a, b in zip(x, y)))
    return x == y


def subsumes(a, b) -> bool:
    """True iff every ground instance of ``b`` is an instance of ``a``.

    Both arguments must be resolved.  Variables of ``b`` are treated as
    constants.  Works on categories, LF terms and tuples of those (a tuple
    is matched componentwise with one shared variable map).  A variable
    repeated in ``a`` only matches repeated positions of ``b`` that are
    provably equal, so the test is sound but may answer False for exotic
    cases such as a shared variable against two equal non-ground
    categories.
    """
    return _match(a, b, {})


# --- variable housekeeping -------------------------------------------------

def term_vars(t, out: list | None = None) -> list:
    """Variable occurrences in pre-order (categories in feature order)."""
    if out is None:
        out = []
    if isinstance(t, Var):
        out.append(t)
    elif isinstance(t, Category):
        for _, v in t.features:
            term_vars(v, out)
    elif isinstance(t, Apply):
        for a in t.args:
            term_vars(a, out)
    elif isinstance(t, (QTerm, Wrap, Quant)):
        for a in _fields(t):
            term_vars(a, out)
    elif isinstance(t, tuple):
        for a in t:
            term_vars(a, out)
    return out


def rename(t, prefix: str):
    """Prefix every variable name, to keep terms from different sources apart."""
    if isinstance(t, Var):
        return Var(prefix + t.name, t.domain)
    if isinstance(t, Category):
        if not t.features:
            return t
        return Category(t.cat, tuple((n, rename(v, prefix)) for n, v in t.features))
    if isinstance(t, Apply):
        return Apply(t.op, tuple(rename(a, prefix) for a in t.args)) if t.args else t
    if isinstance(t, (QTerm, Wrap, Quant)):
        return type(t)(*(rename(a, prefix) for a in _fields(t)))
    if isinstance(t, tuple):
        return tuple(rename(a, prefix) for a in t)
    return t


def canonical(*terms):
    """Jointly normalize resolved terms for storage and comparison.

    Variables are renamed ``_0, _1, ...`` in order of first occurrence
    across all the terms.  Inside categories, a variable that occurs
    exactly once overall is replaced by what it means on its own: the
    feature is dropped if the variable is unconstrained, or replaced by
    its atomic domain.  Full-space atomic values are dropped as well.
    Returns a tuple parallel to ``terms``.
    """
    counts: dict[str, int] = {}
    order: dict[str, str] = {}
    for t in terms:
        for v in term_vars(t):
            counts[v.name] = counts.get(v.name, 0) + 1
    for t in terms:
        for v in term_vars(t):
            if counts[v.name] > 1 and v.name not in order:
                order[v.name] = f"_{len(order)}"

    def lf_var(v: Var):
        # single-occurrence variables inside LFs still need a name
        if v.name not in order:
            order[v.name] = f"_{len(order)}"
        return Var(order[v.name], v.domain)

    def walk(t, in_cat: bool):
        if isinstance(t, Var):
            return lf_var(t)
        if isinstance(t, Category):
            feats = []
            for n, v in t.features:
                if isinstance(v, Var) and counts[v.name] == 1:
                    if v.domain is None or v.domain.is_full:
                        continue
                    feats.append((n, v.domain))
                    continue
                if isinstance(v, Atomic) and v.is_full:
                    continue
                feats.append((n, walk(v, True)))
            return Category(t.cat, tuple(feats))
        if isinstance(t, Apply):
            return Apply(t.op, tuple(walk(a, False) for a in t.args)) if t.args else t
        if isinstance(t, (QTerm, Wrap, Quant)):
            return type(t)(*(walk(a, False) for a in _fields(t)))
        if isinstance(t, tuple):
            return tuple(walk(a, in_cat) for a in t)
        return t

    return tuple(walk(t, False) for t in terms)


def variant(a, b) -> bool:
    """Equality up to consistent variable renaming."""
    return canonical(a) == canonical(b)


def format_term(t) -> str:
    """Grammar-syntax text for a category or feature value."""
    from .terms import format_lf
    if isinstance(t, Category):
        if not t.features:
            return f"{t.cat}:[]"
        inner = ", ".join(f"{n}={format_term(v)}" for n, v in t.features)
        return f"{t.cat}:[{inner}]"
    if isinstance(t, Atomic):
        return format_atomic(t)
    if isinstance(t, Var):
        return t.name
    if t is NULL:
        return "null"
    return format_lf(t)
