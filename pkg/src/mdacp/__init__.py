"""Symbolic engine for meadow-enriched ACP with variable-binding operators."""

from .features import BASE, EPSILON, FULL, FeatureSet
from .meadow import RATIONAL, RationalMeadow, ZMod, parse_model
from .syntax import parse, print_term
from .terms import Sort, Term, tsize

__all__ = [
    "BASE", "EPSILON", "FULL", "FeatureSet", "RATIONAL", "RationalMeadow", "ZMod",
    "parse_model", "parse", "print_term", "Sort", "Term", "tsize",
]
