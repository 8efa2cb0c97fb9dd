"""Proof-checked category-theory syntax, term-complete extensions, the Friedman slash and the Freyd cover."""

__version__ = "0.1.0"
