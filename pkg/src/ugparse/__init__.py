"""Unification-grammar parsing toolkit for spoken-language understanding."""

__version__ = "0.1.0"
