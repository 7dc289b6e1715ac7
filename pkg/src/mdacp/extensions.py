"""Gated operations for the empty process and for process sequences.

The normalizer already interprets ``eps``, ``term(.)`` and the sequence
operators; this module exposes them at the normal-form level with explicit
feature checks, plus the elimination entry point for ``conc`` binders.
"""

from __future__ import annotations

from typing import Sequence

from .eliminate import Strategy, eliminate_binary, eliminate_naive
from .features import BASE, EPSILON, FULL, ExtensionError, FeatureSet, require
from .semantics import EMPTY_GAMMA, CommTable, NormalForm, Normalizer
from .terms import Binder, Term

GEN_KINDS = {"alt": "genalt", "seq": "genseq", "par": "genpar"}


def termi_nf(nf: NormalForm, features: FeatureSet = EPSILON, normalizer: Normalizer | None = None) -> NormalForm:
    """``term(x)``: the empty process when ``x`` can terminate, deadlock otherwise."""
    require(features, "epsilon", "the termination operator")
    norm = normalizer or Normalizer(features=features)
    return norm.termi(nf)


def gen_compose(kind: str, items: Sequence[NormalForm], features: FeatureSet = FULL,
                gamma: CommTable = EMPTY_GAMMA, normalizer: Normalizer | None = None) -> NormalForm:
    """Right fold of ``+``, ``.`` or ``||`` over a sequence of normal forms.

    The empty sequence gives deadlock for ``alt`` and the empty process for ``seq`` and ``par``.
    """
    require(features, "sequences", "generalized composition")
    try:
        op = GEN_KINDS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown composition {kind!r}; choose alt, seq or par") from None
    norm = normalizer or Normalizer(gamma, features=features)
    return norm.gen(op, tuple(items))


def conc_eliminate(t: Term, strategy: Strategy = Strategy.BINARY_EPS, features: FeatureSet = FULL) -> Term:
    """Eliminate the ``conc`` binders of ``t`` (and, as a side effect, any others it contains)."""
    require(features, "sequences", "concatenation binders")
    if not isinstance(t, Binder) or t.kind != "conc":
        raise ValueError("conc_eliminate expects a conc binder")
    if strategy is Strategy.NAIVE:
        return eliminate_naive(t)
    if strategy in (Strategy.BINARY, Strategy.BINARY_EPS):
        return eliminate_binary(t, strategy, features)
    raise ValueError(f"no {strategy.value} elimination for conc binders")


__all__ = [
    "BASE", "EPSILON", "FULL", "ExtensionError", "FeatureSet", "GEN_KINDS",
    "conc_eliminate", "gen_compose", "termi_nf",
]
