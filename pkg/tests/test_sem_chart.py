import random

import pytest
from hypothesis import given, settings, strategies as st

from oracle import brute_force, chart_analyses, random_grammar, random_sentence
from ugparse.chart import ChartOverflow, ParseOptions, UnknownWord, parse, subsumption_violations
from ugparse.grammar import compile_grammar
from ugparse.prefer import trees_of
from ugparse.sem import TOP, Signature, SortHierarchy, sort_check
from ugparse.terms import Apply, Const, QTerm, Var, format_lf
from ugparse.utterance import NoSpanningAnalysis, assemble

H = SortHierarchy({"entity": None, "location": "entity", "city": "location",
                   "airport": "location", "flight": "entity"})
SIGS = {
    "boston": Signature.of(None, {"city"}),
    "ua1": Signature.of(None, {"flight"}),
    "to_loc": Signature.of([{"flight"}, {"location"}], {"prop"}),
    "flight": Signature.of([{"flight"}], {"prop"}),
}


# -- sorts ----------------------------------------------------------------------

def test_hierarchy_ancestors_and_meet():
    assert H.ancestors("city") == {"city", "location", "entity", TOP}
    assert H.meet({"location"}, {"city", "flight"}) == {"city"}
    assert H.meet({"city"}, {"airport"}) == frozenset()
    assert H.meet({TOP}, {"city", "airport"}) == {"city", "airport"}


def test_hierarchy_rejects_cycles_and_unknown_parents():
    with pytest.raises(ValueError):
        SortHierarchy({"a": "b", "b": "a"})
    with pytest.raises(ValueError):
        SortHierarchy({"a": "nowhere"})


def test_sort_check_constants_and_variables():
    assert sort_check(Apply("to_loc", (Const("ua1"), Const("boston"))), H, SIGS)
    bad = sort_check(Apply("to_loc", (Const("boston"), Const("ua1"))), H, SIGS)
    assert not bad and bad.path == (0,)
    ok = sort_check(Apply("flight", (Var("X"),)), H, SIGS)
    assert ok.var_sorts["X"] == {"flight"}


def test_sort_check_variable_meet_can_fail():
    lf = Apply("and", (Apply("flight", (Var("X"),)), Apply("to_loc", (Var("Y"), Var("X")))))
    assert not sort_check(lf, H, SIGS)


def test_sort_check_qterm_restriction():
    q = QTerm("every", Var("X"), Apply("flight", (Var("X"),)))
    assert not sort_check(Apply("to_loc", (Const("ua1"), q)), H, SIGS)
    assert sort_check(Apply("to_loc", (q, Const("boston"))), H, SIGS)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(sorted(H.sorts)), st.sampled_from(sorted(H.sorts)))
def test_meet_is_commutative_and_below_both(a, b):
    m = H.meet({a}, {b})
    assert m == H.meet({b}, {a})
    assert all(H.sort_subsumes(a, s) and H.sort_subsumes(b, s) for s in m)


# -- chart ----------------------------------------------------------------------

def test_unknown_word(demo):
    with pytest.raises(UnknownWord) as e:
        parse("show zebras to boston".split(), demo)
    assert e.value.token == "zebras" and e.value.position == 1


def test_sorts_reject_ill_sorted_reading(demo):
    words = "flights leave tuesday".split()
    on = parse(words, demo, ParseOptions(sorts=True))
    off = parse(words, demo, ParseOptions(sorts=False))
    assert on.stats.sort_rejected > 0
    assert len(on.spanning("s")) < len(off.spanning("s")) or not on.spanning("s")


def test_chart_overflow(demo):
    with pytest.raises(ChartOverflow):
        parse("show me flights from denver to boston".split(), demo, ParseOptions(max_edges=10))


def test_options_validation():
    with pytest.raises(ValueError):
        ParseOptions(semantics=False, sorts=True)


def test_demo_chart_has_no_subsumption_violations(demo):
    chart = parse("show me the flights from denver to boston on monday".split(), demo)
    assert subsumption_violations(chart) == []
    assert chart.stats.edges == len(chart.edges)


def test_packing_merges_backpointers():
    g = compile_grammar("""
        category x {}.
        syn(pair, [x:[], x:[], x:[]]).
        sem(pair, [(p, x:[]), (A, x:[]), (B, x:[])]).
        lex(w, x:[], w).
    """)
    chart = parse(["w"] * 4, g)
    top = [e for e in chart.spanning("x")]
    assert len(top) == 1
    assert len(top[0].backpointers) == 3   # one per split point
    assert len(trees_of(top[0])) == 5      # Catalan(3) bracketings of four words
    assert chart.stats.packed > 0


@pytest.mark.parametrize("seed", range(8))
def test_random_grammar_matches_brute_force(seed):
    rng = random.Random(1000 + seed)
    toy = random_grammar(rng, max_rules=8)
    g = compile_grammar(toy.source())
    for _ in range(5):
        words = random_sentence(rng, toy, max_len=5)
        expected = brute_force(toy, words, semantics=True, limit=3000)
        if expected is None:
            continue
        try:
            chart = parse(words, g, ParseOptions(sorts=False, max_edges=3000))
        except ChartOverflow:
            continue
        assert chart_analyses(chart, toy.cats) == expected


# -- utterance classes ---------------------------------------------------------

def test_first_spanning_class_wins(demo):
    assert assemble(parse("show flights to boston".split(), demo)).rank == 1
    frag = assemble(parse("flights to boston".split(), demo))
    assert frag.rank == 2 and frag.tried == (1, 2)


def test_no_class_spans(demo):
    with pytest.raises(NoSpanningAnalysis) as e:
        assemble(parse("show to".split(), demo))
    assert e.value.tried == (1, 2, 3, 4)


def test_grammar_without_classes_uses_start_edges():
    g = compile_grammar("""
        category utt {}.
        category w {}.
        syn(u, [utt:[], w:[], w:[]]).
        sem(u, [(pair(A, B), utt:[]), (A, w:[]), (B, w:[])]).
        lex(a, w:[], a).
    """)
    res = assemble(parse(["a", "a"], g))
    assert res.rank == 1 and [format_lf(lf) for lf in res.lfs] == ["pair(a, a)"]
    with pytest.raises(NoSpanningAnalysis):
        assemble(parse(["a"], g))
