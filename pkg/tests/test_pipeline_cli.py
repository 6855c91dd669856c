import json

import pytest

from conftest import DATA
from ugparse import cli
from ugparse.chart import UnknownWord
from ugparse.pipeline import (JSON_SCHEMA, NoInterpretation, PipelineConfig, read_corpus,
                              run_utterance)
from ugparse.terms import format_lf


def lf_of(out):
    return format_lf(out.scoped.lf, pretty=True)


def test_clean_utterance(demo):
    out = run_utterance("show flights to boston", demo)
    assert out.repair is None and out.utterance.rank == 1
    assert out.scopings == 1
    assert lf_of(out) == "[imp, quant(some, X, and(flight(X), to_loc(X, boston)), show(hearer, X))]"


def test_repair_runs_only_when_nothing_spans(demo):
    out = run_utterance("show flights to oh to denver", demo)
    assert out.repair.deleted_span == (2, 4)
    assert out.interpreted_tokens == "show flights to denver".split()
    assert run_utterance("show the flights", demo).repair is None


def test_no_repairs_config(demo):
    with pytest.raises(NoInterpretation):
        run_utterance("show flights to oh to denver", demo, PipelineConfig(repairs=False))


def test_unknown_word_is_not_repaired(demo):
    with pytest.raises(UnknownWord):
        run_utterance("what flights leave boston", demo)


def test_syntax_only_has_no_lf(demo):
    out = run_utterance("show flights to boston", demo,
                        PipelineConfig(semantics=False, sorts=False))
    assert out.qlf is None and out.scoped is None
    assert out.to_json()["lf"] is None


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(semantics=False)


def test_quantifier_scoping(demo):
    out = run_utterance("every airline serves a city", demo)
    assert out.scopings == 2
    assert lf_of(out) == "[dcl, quant(every, X, carrier(X), quant(a, Y, city(Y), serve(X, Y)))]"
    out = run_utterance("an airline serves each city", demo)
    assert [[q.quant_name for q in d] for d in out.scoped.domains] == [["each", "a"]]


def test_json_round_trips(demo):
    d = run_utterance("show flights to boston", demo).to_json(stats=True, explain=True)
    d = json.loads(json.dumps(d))
    assert d["schema"] == JSON_SCHEMA and d["status"] == "ok"
    assert d["class"] == {"rank": 1, "label": "complete sentence"}
    assert {"stats", "timings", "preference", "lf_json"} <= d.keys()


def test_read_corpus(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# comment\n\nshow flights\tlf(x)\nflights to boston\n")
    assert read_corpus(p) == [("show flights", "lf(x)"), ("flights to boston", None)]


# -- command line ------------------------------------------------------------------

def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_parse_text(capsys):
    code, out, _ = run(capsys, "parse", "show", "flights", "to", "boston")
    assert code == 0
    assert "class: 1 (complete sentence)" in out and "lf: [imp" in out


def test_cli_parse_json_and_repair(capsys):
    code, out, _ = run(capsys, "parse", "--json", "show flights to oh to denver")
    d = json.loads(out)
    assert code == 0 and d["schema"] == 1
    assert d["repair"]["deleted"] == ["to", "oh"] and d["repair"]["cue"] == "oh"


def test_cli_exit_codes(capsys):
    assert run(capsys, "parse", "show", "to")[0] == cli.EXIT_NO_INTERPRETATION
    code, out, _ = run(capsys, "parse", "--json", "what flights")
    assert code == cli.EXIT_UNKNOWN_WORD
    assert json.loads(out) == {"schema": 1, "status": "unknown_word",
                               "tokens": ["what", "flights"], "word": "what", "position": 0}
    code, out, _ = run(capsys, "parse", "--json", "show", "to")
    assert json.loads(out)["status"] == "no_interpretation"


def test_cli_flags(capsys):
    code, out, _ = run(capsys, "parse", "--no-semantics", "--stats", "show flights")
    assert code == 0 and "lf:" not in out and "edges:" in out
    code, out, _ = run(capsys, "parse", "--explain-preference", "show flights to boston")
    assert "tree(s);" in out


def test_cli_compile(capsys, tmp_path):
    code, out, _ = run(capsys, "compile", str(DATA / "errors.ugr"))
    assert code == cli.EXIT_GRAMMAR and len(out.strip().splitlines()) == 10
    demo_path = tmp_path / "demo.ugr"
    demo_path.write_text(cli.demo_grammar_text())
    code, out, _ = run(capsys, "compile", str(demo_path))
    assert code == 0 and "syntactic_rules: 27" in out


def test_cli_bad_grammar_for_parse(capsys):
    code, _, err = run(capsys, "parse", "--grammar", str(DATA / "errors.ugr"), "x")
    assert code == cli.EXIT_GRAMMAR and "error" in err


def test_cli_corpus_matches_pinned_report(capsys, corpus_path):
    code, out, _ = run(capsys, "corpus", str(corpus_path))
    assert code == 0
    assert out == (DATA / "demo_report.txt").read_text()
