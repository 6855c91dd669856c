"""Grammar front end: DSL parsing, static type checking, lexicon."""

from .check import (GrammarError, check_types, compile_grammar, diagnostics_for,
                    load_grammar)
from .dsl import Diagnostic, GrammarAST, parse_grammar
from .lexicon import apply_suffix, expand_lexicon, lookup
from .model import (CompiledGrammar, Declarations, FeatureType, LexEntry, MorphRule,
                    MorphTransform, SemRule, SynRule, UtteranceClass)
from .printer import format_grammar

__all__ = [
    "GrammarError", "check_types", "compile_grammar", "diagnostics_for", "load_grammar",
    "Diagnostic", "GrammarAST", "parse_grammar", "apply_suffix", "expand_lexicon",
    "lookup", "CompiledGrammar", "Declarations", "FeatureType", "LexEntry", "MorphRule",
    "MorphTransform", "SemRule", "SynRule", "UtteranceClass", "format_grammar",
]
