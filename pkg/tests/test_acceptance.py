"""Acceptance criteria, one test per criterion.

The run prints a PASS/FAIL line per criterion in the terminal summary.
"""

import random
import time

import pytest

from oracle import (SPACES, brute_force, chart_analyses, ground_instances, random_grammar,
                    random_sentence)
from ugparse import fs
from ugparse.chart import ChartOverflow, ParseOptions, parse, subsumption_violations
from ugparse.fs import Atomic, Category, ValueSpace, Var
from ugparse.grammar import GrammarError, compile_grammar
from ugparse.pipeline import PipelineConfig, format_report, read_corpus, run_corpus, run_utterance
from ugparse.prefer import Verdict, compare, derivation_of, format_derivation, select_best, trees_of
from ugparse.repair import find_candidates
from ugparse.scope import capture_errors, enumerate_scopings, rank_and_pick
from ugparse.terms import Apply, Const, QTerm, Wrap, format_lf
from ugparse.utterance import NoSpanningAnalysis, assemble

from conftest import DATA

# -- helpers -------------------------------------------------------------------

TOY_SPACES = {name: (ValueSpace.product(name, ("one", "two"), ("sg", "pl")) if name == "pn"
                     else ValueSpace(name, vals)) for name, (vals, _) in SPACES.items()}
FLAT = {"t": {"fa": "f", "fb": "f", "fg": "g", "fp": "pn"}}


def random_flat(rng, prefix):
    feats = {}
    for feat, space in FLAT["t"].items():
        r = rng.random()
        if r < 0.35:
            feats[feat] = Var(f"{prefix}{space}{rng.randrange(2)}")
        elif r < 0.8:
            vals = TOY_SPACES[space].values
            den = frozenset(rng.sample(vals, rng.randint(1, len(vals))))
            feats[feat] = Atomic(TOY_SPACES[space], den)
    return Category.make("t", feats)


def ground(t):
    return ground_instances(t, FLAT) if t is not None else set()


def unified(a, b):
    r = fs.unify(a, b)
    return None if r is None else r[0]


def sentence_pool(demo, rng, k):
    words = sorted(demo.lexicon)
    return [[rng.choice(words) for _ in range(rng.randint(2, 7))] for _ in range(k)]


def corpus_sentences(corpus_path):
    return [text.split() for text, _ in read_corpus(corpus_path)]


def known(demo, toks):
    return all(demo.lexicon.get(t) for t in toks)


# -- 1 -------------------------------------------------------------------------

def test_c01_unification_algebra():
    rng = random.Random(1)
    t0 = time.perf_counter()
    cases = 0
    while cases < 1000:
        a, b, c = (random_flat(rng, p) for p in "abc")
        ab, ba = unified(a, b), unified(b, a)
        # idempotence and commutativity
        assert ground(unified(a, a)) == ground(a)
        assert ground(ab) == ground(ba)
        # unification is the meet of the ground-instance sets
        assert ground(ab) == ground(a) & ground(b)
        # associativity up to renaming
        left = unified(ab, c) if ab is not None else None
        bc = unified(b, c)
        right = unified(a, bc) if bc is not None else None
        assert ground(left) == ground(right)
        if left is not None and right is not None:
            assert fs.variant(left, right) or ground(left) == ground(right)
        # subsumption monotonicity: a more specific input gives a more specific result
        if ab is not None:
            assert fs.subsumes(a, ab)
            ac, abc = unified(a, c), unified(ab, c)
            assert ground(abc) <= ground(ac)
            if ac is None:
                assert abc is None
        cases += 1
    assert time.perf_counter() - t0 < 10


# -- 2 -------------------------------------------------------------------------

def test_c02_oracle_equivalence():
    rng = random.Random(2)
    t0 = time.perf_counter()
    pairs = nonempty = 0
    while pairs < 110:
        toy = random_grammar(rng)
        g = compile_grammar(toy.source())
        assert len(g.rules) <= 15
        for _ in range(6):
            words = random_sentence(rng, toy, 7)
            semantics = pairs % 3 != 2
            expected = brute_force(toy, words, semantics, limit=4000)
            if expected is None:
                continue
            chart = parse(words, g, ParseOptions(semantics=semantics, sorts=False))
            assert chart_analyses(chart, toy.cats) == expected, (toy.source(), words)
            pairs += 1
            nonempty += bool(expected)
            if expected:
                break
    assert nonempty >= 50
    assert time.perf_counter() - t0 < 120


# -- 3 -------------------------------------------------------------------------

def test_c03_online_property(demo, corpus_path):
    rng = random.Random(3)
    t0 = time.perf_counter()
    real = [t for t in corpus_sentences(corpus_path) if known(demo, t)]
    for toks in sentence_pool(demo, rng, 50) + real:
        chart = parse(toks, demo)  # final chart
        inc = parse(toks[:1], demo)
        snaps = [inc.snapshot()]
        for t in toks[1:]:
            inc.feed(t)
            snaps.append(inc.snapshot())
        for i, snap in enumerate(snaps, start=1):
            assert snap == chart.snapshot(i)
    assert time.perf_counter() - t0 < 30


# -- 4 -------------------------------------------------------------------------

def test_c04_subsumption_invariant(demo, attachment, corpus_path):
    rng = random.Random(4)
    sents = corpus_sentences(corpus_path) + sentence_pool(demo, rng, 40)
    configs = [ParseOptions(), ParseOptions(sorts=False),
               ParseOptions(semantics=False, sorts=False), ParseOptions(prediction=False)]
    charts = 0
    for toks in sents:
        if not known(demo, toks):
            continue
        for opts in configs:
            chart = parse(toks, demo, opts)
            assert subsumption_violations(chart) == []
            try:
                res = assemble(chart, demo, opts)
                assert subsumption_violations(res.chart) == []
            except NoSpanningAnalysis:
                pass
            charts += 1
    for s in ("john sang a song for mary", "john canceled the room mary reserved yesterday"):
        assert subsumption_violations(parse(s.split(), attachment)) == []
    rng = random.Random(40)
    toys = 0
    while toys < 40:
        toy = random_grammar(rng)
        g = compile_grammar(toy.source())
        try:
            chart = parse(random_sentence(rng, toy, 6), g, ParseOptions(max_edges=3000))
        except ChartOverflow:
            continue  # derivation-tree LFs can grow exponentially; skip such samples
        assert subsumption_violations(chart) == []
        toys += 1
    assert charts > 100


# -- 5 -------------------------------------------------------------------------

WH_SENTENCES = [
    "which cities does united serve",
    "which flights does united serve",
    "which cities does american serve",
    "which airlines serve boston",
    "which flights leave boston on tuesday",
    "does united serve denver",
    "can you give me information on all the flights from pittsburgh to san francisco on monday",
    "show flights to boston",
]


def _gapped(e):
    return isinstance(e.category.get("gapsin"), Category)


def _analyses(toks, g, opts):
    try:
        res = assemble(parse(toks, g, opts), g, opts)
    except NoSpanningAnalysis:
        return None
    return res.rank, frozenset(e.reading for e in res.edges)


def test_c05_gap_prediction(demo, corpus_path):
    on, off = ParseOptions(), ParseOptions(prediction=False)
    sents = [s.split() for s in WH_SENTENCES] + [
        t for t in corpus_sentences(corpus_path) if known(demo, t)]
    gapped_on = gapped_off = 0
    for toks in sents:
        assert _analyses(toks, demo, on) == _analyses(toks, demo, off)
        c_on, c_off = parse(toks, demo, on), parse(toks, demo, off)
        n_on = sum(map(_gapped, c_on.edges))
        n_off = sum(map(_gapped, c_off.edges))
        assert n_on <= n_off
        gapped_on += n_on
        gapped_off += n_off
        # soundness: every gapped edge is licensed by a prediction at or before its start
        for e in c_on.edges:
            if _gapped(e):
                assert any(p.origin <= e.start and fs.unify(p.pattern, e.category.get("gapsin"))
                           for p in c_on.predictions), e
    assert gapped_on < gapped_off


# -- 6 -------------------------------------------------------------------------

def test_c06_interleaving_direction(demo, corpus_path):
    syn, sem = [], []
    for toks in corpus_sentences(corpus_path):
        if not known(demo, toks):
            continue
        syn.append(parse(toks, demo, ParseOptions(semantics=False, sorts=False)).stats.edges)
        sem.append(parse(toks, demo, ParseOptions(sorts=False)).stats.edges)
        with_sorts = parse(toks, demo, ParseOptions()).spanning()
        without = parse(toks, demo, ParseOptions(sorts=False)).spanning()
        for e in with_sorts:
            assert any(e.cat == o.cat and fs.subsumes(o.reading, e.reading) for o in without)
    assert sum(syn) / len(syn) <= sum(sem) / len(sem)


# -- 7 -------------------------------------------------------------------------

REPAIR_1A = "how many american airline flights leave denver on june june tenth"
REPAIR_1B = ("can you give me information on all the flights from san francisco no from "
             "pittsburgh to san francisco on monday")


def test_c07_repairs(demo, corpus_path):
    out = run_utterance(REPAIR_1A, demo)
    assert out.repair.deleted_tokens(out.tokens) == ["june"]
    assert " ".join(out.repair.corrected) == (
        "how many american airline flights leave denver on june tenth")
    out = run_utterance(REPAIR_1B, demo)
    assert out.repair.deleted_tokens(out.tokens) == ["from", "san", "francisco", "no"]
    assert out.repair.cue_used == "no"
    assert " ".join(out.repair.corrected) == (
        "can you give me information on all the flights from pittsburgh to san francisco "
        "on monday")
    # fewest deletions first: three candidates deleting 1, 2 and 3 words
    cands = find_candidates("a b b c d c x e f g e".split(), cues=())
    assert [c.deletions for c in cands] == [1, 2, 3]
    assert [c.deleted_span for c in cands] == [(1, 2), (3, 5), (7, 10)]
    cands = find_candidates("x e f g e c d c b b a".split(), cues=())
    assert [c.deleted_span for c in cands] == [(8, 9), (5, 7), (1, 4)]
    # fallback only: utterances that parse never get a repair
    for text, _ in read_corpus(corpus_path):
        try:
            plain = run_utterance(text, demo, PipelineConfig(repairs=False))
        except Exception:
            continue
        full = run_utterance(text, demo)
        assert full.repair is None
        assert format_lf(full.scoped.lf) == format_lf(plain.scoped.lf)


# -- 8 -------------------------------------------------------------------------

def _best(g, text):
    out = run_utterance(text, g)
    trees = [t for e in out.utterance.edges for t in trees_of(e)]
    return out, trees


def test_c08_preferences(demo, attachment):
    t0 = time.perf_counter()
    out, trees = _best(attachment, "john sang a song for mary")
    assert len(trees) == 2
    best = out.selection.best
    assert "vp_v_np_pp" in best.serialize()
    assert format_derivation(derivation_of(best)) == "S S S S R S S R R R"
    loser = next(t for t in trees if t is not best and t != best)
    c = compare(best, loser)
    assert c.verdict is Verdict.PREFER1
    assert c.principle == "minimal attachment"
    assert (c.moves[0].arity, c.moves[1].arity) == (3, 2)

    out, trees = _best(attachment, "john canceled the room mary reserved yesterday")
    best = out.selection.best
    assert "(vp_vp_adv (vp_v_gap reserved) yesterday)" in best.serialize()
    loser = next(t for t in trees if t != best)
    c = compare(best, loser)
    assert c.verdict is Verdict.PREFER1 and c.principle == "right association"
    assert c.moves[0].is_shift and not c.moves[1].is_shift

    out, trees = _best(demo, "book those three flights to boston")
    assert any("np_headless" in t.serialize() for t in trees)
    best = out.selection.best
    assert "np_headless" not in best.serialize()
    assert best.serialize().startswith("(utt_sentence (cs_imp (imperative")
    assert out.selection.after_marked < out.selection.candidates
    assert time.perf_counter() - t0 < 5


# -- 9 -------------------------------------------------------------------------

def _indep(n):
    qs = ["every", "a", "some"]
    body = Apply("rel", tuple(QTerm(Const(qs[i]), Var(f"X{i}"), Apply(f"p{i}", (Var(f"X{i}"),)))
                              for i in range(n)))
    return Wrap(Const("dcl"), body) if n % 2 else body


def test_c09_scoping():
    for n, expected in [(0, 1), (1, 1), (2, 2), (3, 6)]:
        qlf = _indep(n)
        scopings = enumerate_scopings(qlf)
        assert len(scopings) == expected
        assert len({format_lf(s.lf) for s in scopings}) == expected
        for s in scopings:
            assert capture_errors(s.lf) == []
        best = rank_and_pick(scopings)
        assert list(best.order) == [f"X{i}" for i in range(n)]


# -- 10 ------------------------------------------------------------------------

EXPECTED_DIAGNOSTICS = [
    (12, 25, "in rule bad_value: improper value 'past' for feature form of s (space vform)"),
    (13, 33, "in rule bad_value2: improper value 'gen' for feature case of np (space case)"),
    (14, 42, "in rule bad_var: incompatible types for variable N: "
             "space pn (np.pers_num) and space case (np.case)"),
    (15, 37, "in rule bad_var2: incompatible types for variable F: "
             "space vform (s.form) and space case (np.case)"),
    (16, 1, "semantic rule no_such_rule is keyed to missing syntactic rule 'no_such_rule'"),
    (17, 37, "in rule empty_and: empty denotation for (1st&2nd) in feature pers_num of np"),
    (18, 38, "in rule empty_and2: empty denotation for (sg&pl) in feature pers_num of np"),
    (19, 22, "in rule bad_feature: undeclared feature 'tense' for category s"),
    (20, 45, "in lexical entry 'runs': undeclared feature 'subcat' for category vp"),
    (21, 1, "semantic rule missing_too is keyed to missing syntactic rule 'missing_too'"),
]


def test_c10_grammar_type_checking():
    text = (DATA / "errors.ugr").read_text()
    with pytest.raises(GrammarError) as exc:
        compile_grammar(text, "errors.ugr")
    got = [(d.line, d.col, d.message) for d in exc.value.diagnostics]
    assert got == EXPECTED_DIAGNOSTICS


# -- 11 ------------------------------------------------------------------------

def test_c11_corpus_regression(demo, corpus_path):
    report = run_corpus(corpus_path, demo)
    assert format_report(report) == (DATA / "demo_report.txt").read_text()
    for plain, repaired in [("Syntax", "Syntax (repair correction)"),
                            ("Semantics", "Semantics (repair correction)")]:
        assert report.row(repaired).count >= report.row(plain).count
    assert report.repairs_unneeded == 0
