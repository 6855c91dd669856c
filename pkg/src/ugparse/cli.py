"""Command-line driver: ``ugparse compile | parse | corpus``."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .chart import UnknownWord
from .grammar import GrammarError, compile_grammar, diagnostics_for
from .pipeline import (JSON_SCHEMA, NoInterpretation, PipelineConfig, format_report,
                       run_corpus, run_utterance)
from .terms import format_lf

EXIT_OK = 0
EXIT_NO_INTERPRETATION = 2
EXIT_UNKNOWN_WORD = 3
EXIT_GRAMMAR = 4


def demo_grammar_text() -> str:
    return resources.files("ugparse").joinpath("data/demo.ugr").read_text(encoding="utf-8")


def demo_grammar():
    """The bundled demo grammar, compiled."""
    return compile_grammar(demo_grammar_text(), "demo.ugr")


def _load(path: str | None):
    if path is None:
        return demo_grammar()
    with open(path, encoding="utf-8") as f:
        return compile_grammar(f.read(), path)


def _report_diagnostics(err: GrammarError) -> None:
    for d in err.diagnostics:
        print(d, file=sys.stderr)


def cmd_compile(args) -> int:
    with open(args.grammar_file, encoding="utf-8") as f:
        text = f.read()
    diags = diagnostics_for(text, args.grammar_file)
    for d in diags:
        print(d)
    if diags:
        return EXIT_GRAMMAR
    for k, v in compile_grammar(text, args.grammar_file).summary().items():
        print(f"{k}: {v}")
    return EXIT_OK


def _failure_json(status: str, tokens, **extra) -> dict:
    return {"schema": JSON_SCHEMA, "status": status, "tokens": tokens, **extra}


def cmd_parse(args) -> int:
    try:
        grammar = _load(args.grammar)
    except GrammarError as e:
        _report_diagnostics(e)
        return EXIT_GRAMMAR
    semantics = not args.no_semantics
    try:
        config = PipelineConfig(repairs=not args.no_repairs, semantics=semantics,
                                sorts=semantics and not args.no_sorts,
                                prediction=not args.no_prediction)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    text = " ".join(args.utterance)
    tokens = text.lower().split()
    try:
        out = run_utterance(tokens, grammar, config)
    except UnknownWord as e:
        if args.json:
            print(json.dumps(_failure_json("unknown_word", tokens, word=e.token,
                                           position=e.position)))
        else:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_UNKNOWN_WORD
    except NoInterpretation as e:
        if args.json:
            extra = {"repairs_tried": e.repairs_tried}
            if args.stats and e.stats is not None:
                extra["stats"] = e.stats.as_dict()
            print(json.dumps(_failure_json("no_interpretation", tokens, **extra)))
        else:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_INTERPRETATION

    if args.json:
        print(json.dumps(out.to_json(stats=args.stats, explain=args.explain_preference),
                         indent=2))
        return EXIT_OK
    print(f"class: {out.utterance.rank} ({out.classification})")
    if out.repair is not None:
        r = out.repair
        cue = f", cue {r.cue_used!r}" if r.cue_used else ""
        print(f"repair: deleted {' '.join(r.deleted_tokens(tokens))!r} "
              f"at {r.deleted_span[0]}-{r.deleted_span[1]}{cue}")
        print(f"corrected: {' '.join(r.corrected)}")
    print(f"tree: {out.selection.best.serialize()}")
    if out.scoped is not None:
        print(f"qlf: {format_lf(out.qlf, pretty=True)}")
        print(f"lf: {format_lf(out.scoped.lf, pretty=True)}")
    if args.explain_preference:
        print(out.selection.explain())
    if args.stats:
        for k, v in out.stats.as_dict().items():
            print(f"{k}: {v}")
        for k, v in out.timings.items():
            print(f"time.{k}: {v:.4f}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    try:
        grammar = _load(args.grammar)
    except GrammarError as e:
        _report_diagnostics(e)
        return EXIT_GRAMMAR
    report = run_corpus(args.corpus_file, grammar, prediction=not args.no_prediction)
    sys.stdout.write(format_report(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ugparse",
                                description="Unification grammar parsing toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="type-check a grammar file")
    c.add_argument("grammar_file")
    c.set_defaults(func=cmd_compile)

    q = sub.add_parser("parse", help="interpret one utterance")
    q.add_argument("--grammar", help="grammar file (default: bundled demo grammar)")
    q.add_argument("--json", action="store_true")
    q.add_argument("--stats", action="store_true")
    q.add_argument("--no-repairs", action="store_true")
    q.add_argument("--no-sorts", action="store_true")
    q.add_argument("--no-semantics", action="store_true")
    q.add_argument("--no-prediction", action="store_true")
    q.add_argument("--explain-preference", action="store_true")
    q.add_argument("utterance", nargs="+")
    q.set_defaults(func=cmd_parse)

    k = sub.add_parser("corpus", help="coverage report for a corpus file")
    k.add_argument("--grammar", help="grammar file (default: bundled demo grammar)")
    k.add_argument("--no-prediction", action="store_true")
    k.add_argument("corpus_file")
    k.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
