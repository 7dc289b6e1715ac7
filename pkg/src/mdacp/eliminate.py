"""Elimination of variable-binding operators.

``eliminate_naive`` unfolds every binder completely with the comprehension
axioms, so indices end up as unary numerals. ``eliminate_binary`` only
removes non-binary binders: power-of-two ranges are split into nested range-2
binders (for sequential composition and concatenation the range-2 binder is
placed innermost so that the items keep their order), other ranges are padded up to a power of two with a conditional on
the neutral element, or, for sequential and parallel composition without the
empty process, split at the largest power of two below the range.
"""

from __future__ import annotations

import enum
from collections import Counter

from . import terms as T
from .features import FeatureSet, require
from .terms import Binder, Op, Term, Var


class Strategy(enum.Enum):
    NAIVE = "naive"
    BINARY = "binary"
    BINARY_EPS = "binary_eps"
    SEQUENCES = "sequences"


def cond_quant(p: Term, r: Term, q: Term) -> Term:
    """(1 - r/r) * p + (r/r) * q: p when r = 0, q otherwise (cancellation meadows)."""
    rr = T.div(r, r)
    return T.add(T.mul(T.sub(T.ONE, rr), p), T.mul(rr, q))


def cond_proc(x: Term, p: Term, y: Term) -> Term:
    """(p/p) :-> x + (1 - p/p) :-> y."""
    pp = T.div(p, p)
    return T.alt(T.guard(pp, x), T.guard(T.sub(T.ONE, pp), y))


def _fold(kind: str, left: Term, right: Term) -> Term:
    return Op(T.BINARY_FOLD[kind], (left, right))


def expand_binder_once(t: Term) -> Term:
    """One step of the comprehension axioms: the range-1 base case or the unfolding."""
    if not isinstance(t, Binder):
        raise T.TermError("expand_binder_once expects a binder term")
    u = t.var
    first = T.subst_quant(t.body, T.ZERO, u)
    if t.n == 1:
        return first
    rest = Binder(t.kind, t.n - 1, u, T.subst_quant(t.body, T.add(u, T.ONE), u))
    return _fold(t.kind, first, rest)


def _map_children(t: Term, f) -> Term:
    kids = T.children(t)
    if not kids:
        return t
    return T._rebuild(t, [f(c) for c in kids])


def eliminate_naive(t: Term) -> Term:
    """A binder-free term equal to ``t``; innermost binders first."""
    t = _map_children(t, eliminate_naive)
    if not isinstance(t, Binder):
        return t
    parts = []
    cur = t
    while True:
        step = expand_binder_once(cur)
        if cur.n == 1:
            parts.append(step)
            break
        parts.append(step.args[0])
        cur = step.args[1]
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = _fold(t.kind, part, out)
    return out


# binders over non-commutative operators: the order of the unfolded items matters
ORDERED = frozenset({"seqb", "conc"})


def _is_pow2(n: int) -> bool:
    return n & (n - 1) == 0


def _pad_guard(u: Var, last: int) -> Term:
    # 1 - s(u - last): 0 exactly when u > last
    return T.sub(T.ONE, T.sign(T.sub(u, T.compact_numeral(last))))


def _padded(kind: str, u: Var, n: int, body: Term) -> Term:
    r = _pad_guard(u, n - 1)
    if kind == "sum":
        return cond_quant(T.ZERO, r, body)
    if kind == "prod":
        return cond_quant(T.ONE, r, body)
    if kind == "chc":
        return cond_proc(T.DELTA, r, body)
    if kind in ("seqb", "parb"):
        return cond_proc(T.EPS, r, body)
    return T.seqcond(T.EMPTY, r, body)


def _binary(kind: str, n: int, u: Var, body: Term, eps: bool) -> Term:
    if n == 1:
        return T.subst_quant(body, T.ZERO, u)
    if n == 2:
        return Binder(kind, 2, u, body)
    if _is_pow2(n):
        v = T.fresh_var(T.all_vars(body) | {u})
        inner = T.subst_quant(body, T.add(T.mul(T.TWO, v), u), u)
        if kind in ORDERED:
            # the range-2 binder must enumerate the low bit, or the items come out permuted
            return _binary(kind, n // 2, v, Binder(kind, 2, u, inner), eps)
        return Binder(kind, 2, u, _binary(kind, n // 2, v, inner, eps))
    if kind in ("seqb", "parb") and not eps:
        low = 1 << (n.bit_length() - 1)
        left = _binary(kind, low, u, body, eps)
        shifted = T.subst_quant(body, T.add(T.compact_numeral(low), u), u)
        return _fold(kind, left, _binary(kind, n - low, u, shifted, eps))
    target = 1 << n.bit_length()
    return _binary(kind, target, u, _padded(kind, u, n, body), eps)


def eliminate_binary(t: Term, strategy: Strategy = Strategy.BINARY,
                     features: FeatureSet | None = None) -> Term:
    """A term equal to ``t`` in which every binder has range 2."""
    if strategy not in (Strategy.BINARY, Strategy.BINARY_EPS):
        raise ValueError(f"eliminate_binary does not implement {strategy}")
    eps = strategy is Strategy.BINARY_EPS
    if eps and features is not None:
        require(features, "epsilon", "binary elimination with epsilon padding")
    return _elim_binary(t, eps)


def _elim_binary(t: Term, eps: bool) -> Term:
    t = _map_children(t, lambda c: _elim_binary(c, eps))
    if not isinstance(t, Binder):
        return t
    return _binary(t.kind, t.n, t.var, t.body, eps)


_VIA_SEQUENCES = {"chc": "genalt", "seqb": "genseq", "parb": "genpar"}


def rewrite_via_sequences(t: Term, features: FeatureSet | None = None) -> Term:
    """Replace Chc/Seq/Par binders by generalized compositions over Conc binders."""
    if features is not None:
        require(features, "sequences", "rewriting via process sequences")
    t = _map_children(t, rewrite_via_sequences)
    if isinstance(t, Binder) and t.kind in _VIA_SEQUENCES:
        return Op(_VIA_SEQUENCES[t.kind], (Binder("conc", t.n, t.var, T.single(t.body)),))
    return t


def eliminate(t: Term, strategy: Strategy, features: FeatureSet | None = None) -> Term:
    if strategy is Strategy.NAIVE:
        return eliminate_naive(t)
    if strategy is Strategy.SEQUENCES:
        return eliminate_binary(rewrite_via_sequences(t, features), Strategy.BINARY_EPS, features)
    return eliminate_binary(t, strategy, features)


def binder_census(t: Term) -> Counter:
    """Count of binder nodes per (kind, range)."""
    return Counter((s.kind, s.n) for s in T.subterms(t) if isinstance(s, Binder))
