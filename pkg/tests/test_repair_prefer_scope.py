import math

import pytest
from hypothesis import given, settings, strategies as st

from ugparse.prefer import (SHIFT, Move, Tree, Verdict, compare, derivation_of, select_best)
from ugparse.repair import NoRepairFound, correct, find_candidates
from ugparse.scope import (MAX_QUANTIFIERS, ScopeOverflow, ScopingRules, capture_errors,
                           enumerate_scopings, scope)
from ugparse.terms import Apply, Const, QTerm, Quant, Var, Wrap, format_lf

# -- repair ---------------------------------------------------------------------


def test_repair_with_cue():
    toks = "show flights to oh to denver".split()
    best = find_candidates(toks)[0]
    assert best.deleted_span == (2, 4) and best.cue_used == "oh"
    assert " ".join(best.corrected) == "show flights to denver"


def test_repair_prefers_fewest_deletions_then_later_start():
    toks = "a b a b".split()
    spans = [c.deleted_span for c in find_candidates(toks)]
    assert spans == [(1, 3), (0, 2)]


def test_leading_fillers_are_skipped():
    assert find_candidates("okay okay flights".split(), fillers={"okay"}) == []
    assert find_candidates("okay okay flights".split())[0].deleted_span == (0, 1)


def test_related_words_widen_matching():
    toks = "show flights flight to boston".split()
    assert find_candidates(toks) == []
    related = lambda a, b: a.rstrip("s") == b.rstrip("s")
    assert find_candidates(toks, related=related)[0].deleted_span == (1, 2)


def test_candidate_cap():
    toks = ["w"] * 12
    assert len(find_candidates(toks, max_candidates=5)) == 5
    assert len(find_candidates(toks)) == 32


def test_correct_uses_first_accepted_candidate():
    toks = "a b a b".split()
    cand, res = correct(toks, (), lambda t: "ok" if t == ["a", "b"] else None)
    assert cand.deleted_span == (1, 3) and res == "ok"
    with pytest.raises(NoRepairFound) as e:
        correct(toks, (), lambda t: None)
    assert e.value.tried == 2


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from("abco"), max_size=9))
def test_candidate_invariants(toks):
    cands = find_candidates(toks, cues={"o"})
    keys = [(c.deletions, -c.deleted_span[0]) for c in cands]
    assert keys == sorted(keys)
    for c in cands:
        i, j = c.deleted_span
        assert 0 <= i < j < len(toks) and toks[i] == toks[j]
        assert list(c.corrected) == toks[:i] + toks[j:]
        assert c.deletions == j - i and i + c.match_length <= j
        if c.cue_used:
            assert toks[j - 1] == c.cue_used


# -- preference -----------------------------------------------------------------

def leaf(w, i):
    return Tree("lex", "x", i, i + 1, (), w)


def node(rule, *kids, marked=False):
    return Tree(rule, "x", kids[0].start, kids[-1].end, tuple(kids), None, marked)


A, B, C, D = (leaf(w, i) for i, w in enumerate("abcd"))


def test_derivation_drops_unary_nodes():
    t = node("u", node("b", A, B))
    assert derivation_of(t) == (SHIFT, SHIFT, Move(2))


def test_right_association():
    low = node("r", A, node("r", B, C))      # S S S R R
    high = node("r", node("r", A, B), C)     # S S R S R
    c = compare(low, high)
    assert c.verdict is Verdict.PREFER1 and c.principle == "right association"
    assert compare(high, low).verdict is Verdict.PREFER2


def test_minimal_attachment():
    flat = node("t", A, B, C)                # S S S R3
    nested = node("r", A, node("r", B, C))   # S S S R2 R2
    c = compare(flat, nested)
    assert c.verdict is Verdict.PREFER1 and c.principle == "minimal attachment"


def test_compare_rejects_different_lengths():
    with pytest.raises(ValueError):
        compare(node("r", A, B), node("t", A, B, C))


def test_marked_rules_filter_first():
    flat = node("t", A, B, C, marked=True)
    nested = node("r", A, node("r", B, C))
    sel = select_best([flat, nested])
    assert sel.best == nested and sel.after_marked == 1
    assert select_best([flat, nested], marked=()).best == flat


def all_trees(leaves):
    if len(leaves) == 1:
        yield leaves[0]
        return
    for k in range(1, len(leaves)):
        for l in all_trees(leaves[:k]):
            for r in all_trees(leaves[k:]):
                yield node("r", l, r)
    if len(leaves) == 3:
        yield node("t", *leaves)


TREES = list(all_trees([A, B, C, D]))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(TREES), st.sampled_from(TREES))
def test_compare_is_antisymmetric(t1, t2):
    v1, v2 = compare(t1, t2).verdict, compare(t2, t1).verdict
    flip = {Verdict.PREFER1: Verdict.PREFER2, Verdict.PREFER2: Verdict.PREFER1,
            Verdict.TIE: Verdict.TIE}
    assert v2 is flip[v1]
    assert (v1 is Verdict.TIE) == (derivation_of(t1) == derivation_of(t2))


@settings(max_examples=50, deadline=None)
@given(st.permutations(TREES))
def test_selection_is_order_independent(perm):
    assert select_best(perm).best == select_best(TREES).best


# -- scoping --------------------------------------------------------------------

def q(name, var, pred="p"):
    return QTerm(name, Var(var), Apply(pred, (Var(var),)))


def rel(*args):
    return Apply("r", tuple(args))


@pytest.mark.parametrize("n", range(4))
def test_independent_quantifiers_give_all_orders(n):
    qlf = rel(*[q("some", f"X{k}") for k in range(n)])
    res = enumerate_scopings(qlf)
    assert len(res) == math.factorial(n)
    assert len({r.order for r in res}) == len(res)
    assert all(capture_errors(r.lf) == [] for r in res)


def test_free_variable_constraint():
    inner = QTerm("some", Var("Y"), Apply("of", (Var("Y"), Var("X"))))
    qlf = rel(q("every", "X"), inner)
    orders = [r.order for r in enumerate_scopings(qlf)]
    assert orders == [("X", "Y")]


def test_default_ranking():
    qlf = rel(q("every", "X"), q("some", "Y"))
    assert scope(qlf).order == ("X", "Y")
    qlf = rel(q("some", "X"), q("each", "Y"))
    assert scope(qlf).order == ("Y", "X")
    assert scope(qlf, ScopingRules(strength={})).order == ("X", "Y")


def test_wrap_is_a_scope_island():
    qlf = Wrap("imp", rel(q("some", "X"), Wrap("ynq", rel(q("every", "Y")))))
    res = enumerate_scopings(qlf)
    assert len(res) == 1
    text = format_lf(res[0].lf)
    assert text.index("every") > text.index("ynq")


def test_shared_qterm_is_scoped_once():
    x = q("some", "X")
    res = enumerate_scopings(rel(x, x))
    assert len(res) == 1 and res[0].order == ("X",)
    assert isinstance(res[0].lf, Quant) and res[0].lf.body == rel(Var("X"), Var("X"))


def test_overflow():
    qlf = rel(*[q("some", f"X{k}") for k in range(MAX_QUANTIFIERS + 1)])
    with pytest.raises(ScopeOverflow):
        enumerate_scopings(qlf)


def test_capture_errors_flags_escapes():
    bad = Apply("and", (Quant("some", Var("X"), Apply("p", (Var("X"),)), Const("t")),
                        Apply("q", (Var("X"),))))
    assert capture_errors(bad) == ["variable X escapes its quantifier"]
