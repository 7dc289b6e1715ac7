"""Randomized soundness sweeps: every axiom instance must hold in the model.

Each axiom is instantiated ``trials`` times. Quantity variables take values
from the sample pool of the meadow model, process variables take normal
forms of generated closed processes, ``?a``-style variables take atomic or
data actions, and sequence variables take generated closed sequences. Axioms
that quantify over terms rather than values, such as the comprehension
axioms, are instantiated by generating the terms and building both sides.
Both sides are interpreted and compared exactly.

Every trial draws from its own generator seeded by
``(seed, group, axiom, trial)``, so results do not depend on execution order
or on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from . import generators as G
from . import terms as T
from .eliminate import ORDERED, cond_proc, cond_quant
from .features import BASE, EPSILON, FULL, FeatureSet
from .meadow import RATIONAL, MeadowModel, UnsignedModelError, ZMod, random_rational
from .semantics import (
    EMPTY_GAMMA,
    CommTable,
    NormalForm,
    Normalizer,
    SemanticsError,
    isact_check,
)
from .syntax import parse, print_term
from .terms import Binder, Sort, Term, Var

GROUPS = ("meadow", "signum", "acp", "acp-md", "compr", "derived", "epsilon", "sequences", "compr-ps")

CSV_HEADER = ("group", "axiom_id", "trials", "failures", "first_counterexample")


@dataclass(frozen=True)
class SweepLimits:
    """Sizes used when instantiating axioms; parallel binders get a tighter range."""

    depth: int = 4
    max_range: int = 8
    max_parallel_range: int = 4
    sequence_range: int = 16
    labels: tuple = ("a", "b", "c", "d")


@dataclass
class _Ctx:
    group: str
    model: MeadowModel
    gamma: CommTable
    features: FeatureSet
    limits: SweepLimits
    norm: Normalizer = field(init=False)

    def __post_init__(self):
        self.norm = Normalizer(self.gamma, self.model, FULL)

    @property
    def gen(self) -> G.GenConfig:
        return G.GenConfig(labels=self.limits.labels, depth=self.limits.depth,
                           features=self.features, signed=self.model.signed)

    @property
    def constants(self) -> list[str]:
        return sorted(set(self.limits.labels) | self.gamma.labels())

    def value(self, rng):
        if isinstance(self.model, ZMod):
            return rng.choice(self.model.elements())
        return random_rational(rng)

    def sample(self, var: Var, rng) -> tuple[object, str]:
        """A value for ``var`` plus a printable description of it."""
        if var.pool == "U":
            q = self.value(rng)
            return q, str(q)
        if var.pool == "X":
            t = G.closed_proc(rng, self.gen)
            return self.norm.proc(t, {}), print_term(t)
        if var.pool == "Xp":
            t = G.atomic(rng, self.gen)
            return self.norm.proc(t, {}), print_term(t)
        t = G.closed_seq(rng, self.gen)
        return self.norm.sequence(t, {}), print_term(t)


@dataclass
class Instance:
    lhs: Term | None = None
    rhs: Term | None = None
    env: dict = field(default_factory=dict)
    shown: dict = field(default_factory=dict)
    check: Callable | None = None  # predicate axioms: ctx -> bool
    label: str = ""

    def describe(self) -> str:
        parts = []
        if self.label:
            parts.append(self.label)
        if self.lhs is not None:
            parts.append(f"{print_term(self.lhs)} = {print_term(self.rhs)}")
        parts.extend(f"{v} := {s}" for v, s in sorted(self.shown.items(), key=lambda kv: kv[0]))
        return "; ".join(parts)


class Axiom:
    def __init__(self, axiom_id: str, make: Callable, exhaustive: bool = False):
        self.id = axiom_id
        self.make = make  # (rng, ctx) -> Instance | None ; None means "side condition unmet"
        self.exhaustive = exhaustive


@lru_cache(maxsize=4096)
def _schema(text: str) -> Term:
    return parse(text, schema=True, features=FULL)


def _bind_free(inst: Instance, rng, ctx: _Ctx, fixed: dict | None = None) -> Instance:
    fixed = fixed or {}
    vs = T.free_vars(inst.lhs) | T.free_vars(inst.rhs) if inst.lhs is not None else set()
    for v in sorted(vs):
        if v in inst.env:
            continue
        if v in fixed:
            inst.env[v], inst.shown[v] = fixed[v]
        else:
            inst.env[v], inst.shown[v] = ctx.sample(v, rng)
    return inst


def equation(axiom_id: str, lhs: str, rhs: str, where: Callable | None = None,
             encap_set: bool = False) -> Axiom:
    """An equation given as text; ``{H}`` is replaced by a random set of labels."""

    def make(rng, ctx):
        l, r = lhs, rhs
        label = ""
        if encap_set:
            H = ",".join(sorted(rng.sample(ctx.constants, rng.randint(1, 2))))
            l, r = l.replace("{H}", "{" + H + "}"), r.replace("{H}", "{" + H + "}")
        inst = _bind_free(Instance(_schema(l), _schema(r), label=label), rng, ctx)
        if where is not None and not where(inst.env):
            return None
        return inst

    quant_only = not encap_set and T.sort_of(_schema(lhs)) is Sort.QUANT
    return Axiom(axiom_id, make, exhaustive=quant_only)


u_, v_, w_ = T.U(0), T.U(1), T.U(2)
x_, y_, z_ = T.X(0), T.X(1), T.X(2)


def _fold(kind: str, a: Term, b: Term) -> Term:
    return T.Op(T.BINARY_FOLD[kind], (a, b))


def _range_cap(ctx: _Ctx, kind: str) -> int:
    return ctx.limits.max_parallel_range if kind == "parb" else ctx.limits.max_range


def _body(kind: str, rng, ctx: _Ctx, u: Var = u_) -> Term:
    """A random body for a binder of ``kind`` with ``u`` free, plus a free v and (for processes) x."""
    if kind in ("sum", "prod"):
        return G.quant_body(rng, u, 3, ctx.model.signed, extra=(v_,))
    if kind == "conc":
        return G.seq_body(rng, u, ctx.gen, 2, extra=(v_,))
    cfg = ctx.gen
    if kind == "parb":
        # keep parallel bodies free of merges so that normal forms stay small
        return G._pbody(rng, cfg, (u, v_), (x_,), 3, 0, G._Budget(0)) if rng.random() < 0.3 \
            else G.proc_body(rng, u, G.GenConfig(labels=cfg.labels, depth=cfg.depth, max_parallel=0,
                                               features=cfg.features, signed=cfg.signed), 3, (v_,), ())
    return G.proc_body(rng, u, cfg, 3, extra=(v_,), pvars=(x_,))


def _instance(lhs: Term, rhs: Term, rng, ctx: _Ctx, label: str) -> Instance:
    inst = Instance(lhs, rhs, label=label)
    return _bind_free(inst, rng, ctx)


# -- comprehension axioms -------------------------------------------------------------


def _alpha(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        n = rng.randint(1, _range_cap(ctx, kind))
        fv = T.free_vars(p)
        choices = [T.U(i) for i in range(5) if T.U(i) != u_ and T.U(i) not in fv]
        v = rng.choice(choices)
        return _instance(Binder(kind, n, u_, p), Binder(kind, n, v, T.subst_quant(p, v, u_)), rng, ctx,
                         f"n={n}")
    return make


def _base(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        return _instance(Binder(kind, 1, u_, p), T.subst_quant(p, T.ZERO, u_), rng, ctx, "n=1")
    return make


def _unfold(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        n = rng.randint(1, _range_cap(ctx, kind) - 1)
        lhs = Binder(kind, n + 1, u_, p)
        rhs = _fold(kind, T.subst_quant(p, T.ZERO, u_), Binder(kind, n, u_, T.subst_quant(p, T.add(u_, T.ONE), u_)))
        return _instance(lhs, rhs, rng, ctx, f"n={n}")
    return make


# -- derived equations ---------------------------------------------------------------------


def _two(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        rhs = _fold(kind, T.subst_quant(p, T.ZERO, u_), T.subst_quant(p, T.ONE, u_))
        return _instance(Binder(kind, 2, u_, p), rhs, rng, ctx, "n=2")
    return make


def split_rhs(kind: str, m: int, u: Var, p: Term) -> Term:
    """Right-hand side for range ``2**(m+1)``: nested range-2 and range-``2**m`` binders.

    For the ordered kinds the range-2 binder sits inside, so its variable is
    the low bit of the index; the other kinds use the outer placement.
    """
    v = T.fresh_var(T.all_vars(p) | {u})
    inner = T.subst_quant(p, T.add(T.mul(T.unary_numeral(2), v), u), u)
    if kind in ORDERED:
        return Binder(kind, 2 ** m, v, Binder(kind, 2, u, inner))
    return Binder(kind, 2, u, Binder(kind, 2 ** m, v, inner))


def split_rhs_as_stated(kind: str, m: int, u: Var, p: Term) -> Term:
    """The outer placement for every kind; unsound for sequential composition and concatenation."""
    v = T.fresh_var(T.all_vars(p) | {u})
    inner = T.subst_quant(p, T.add(T.mul(T.unary_numeral(2), v), u), u)
    return Binder(kind, 2, u, Binder(kind, 2 ** m, v, inner))


def _split(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        top = max(0, _range_cap(ctx, kind).bit_length() - 2)
        m = rng.randint(0, top)
        return _instance(Binder(kind, 2 ** (m + 1), u_, p), split_rhs(kind, m, u_, p), rng, ctx, f"m={m}")
    return make


NEUTRAL = {"sum": T.ZERO, "prod": T.ONE, "chc": T.DELTA, "seqb": T.EPS, "parb": T.EPS, "conc": T.EMPTY}


def padded_body(kind: str, n: int, u: Var, p: Term) -> Term:
    """The neutral element when ``u > n``, else ``p``, with the index written as a unary numeral."""
    r = T.sub(T.ONE, T.sign(T.sub(u, T.unary_numeral(n))))
    if kind in ("sum", "prod"):
        return cond_quant(NEUTRAL[kind], r, p)
    if kind == "conc":
        return T.seqcond(T.EMPTY, r, p)
    return cond_proc(NEUTRAL[kind], r, p)


def _pad(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        cap = _range_cap(ctx, kind)
        n = rng.randint(1, cap - 1)
        m = T.ceil_log2(n + 1) + rng.randint(0, 1)
        return _instance(Binder(kind, n + 1, u_, p), Binder(kind, 2 ** m, u_, padded_body(kind, n, u_, p)),
                         rng, ctx, f"n={n}, m={m}")
    return make


def _split_rest(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        # the parallel range stays at most one past the cap: six merged copies of a body blow up
        top = _range_cap(ctx, kind) + (1 if kind == "parb" else 2)
        while True:
            n1 = rng.randint(3, max(3, top))
            if n1 & (n1 - 1):
                break
        m = n1.bit_length() - 1
        shift = T.add(T.power(T.unary_numeral(2), m), u_)
        rhs = _fold(kind, Binder(kind, 2 ** m, u_, p), Binder(kind, n1 - 2 ** m, u_, T.subst_quant(p, shift, u_)))
        return _instance(Binder(kind, n1, u_, p), rhs, rng, ctx, f"n+1={n1}, m={m}")
    return make


# -- data-handling and constant schemas -----------------------------------------------------


def _data_comm_same(rng, ctx):
    e, e2 = rng.choice(ctx.constants), rng.choice(ctx.constants)
    n = rng.randint(0, 2)
    us = [T.U(i) for i in range(n)]
    vs = [T.U(n + i) for i in range(n)]
    fixed = {}
    for a, b in zip(us, vs):
        q = ctx.value(rng)
        fixed[a] = (q, str(q))
        q2 = q if rng.random() < 0.6 else ctx.value(rng)
        fixed[b] = (q2, str(q2))
    c = ctx.gamma(e, e2)
    body = T.act(c, *us) if c is not None else T.DELTA
    for a, b in reversed(list(zip(us, vs))):
        body = T.guard(T.sub(a, b), body)
    lhs = T.cmerge(T.act(e, *us), T.act(e2, *vs))
    return _bind_free(Instance(lhs, body, label=f"{e}|{e2} -> {c or 'undefined'}"), rng, ctx, fixed)


def _data_comm_diff(rng, ctx):
    e, e2 = rng.choice(ctx.constants), rng.choice(ctx.constants)
    n, m = rng.sample(range(0, 4), 2)
    lhs = T.cmerge(T.act(e, *[T.U(i) for i in range(n)]), T.act(e2, *[T.U(n + i) for i in range(m)]))
    return _instance(lhs, T.DELTA, rng, ctx, "")


def _encap_const(inside: bool, data: bool):
    def make(rng, ctx):
        cs = ctx.constants
        e = rng.choice(cs)
        others = [c for c in cs if c != e]
        H = set(rng.sample(others, rng.randint(0, min(2, len(others)))))
        if inside:
            H.add(e)
        if not H:
            H = {rng.choice(others)}
        n = rng.randint(1, 3) if data else 0
        a = T.act(e, *[T.U(i) for i in range(n)])
        return _instance(T.encap(H, a), T.DELTA if inside else a, rng, ctx, f"H={sorted(H)}")
    return make


def _isact_const(data: bool):
    def make(rng, ctx):
        e = rng.choice(ctx.constants)
        n = rng.randint(1, 3) if data else 0
        a = T.act(e, *[T.U(i) for i in range(n)])
        bound = _bind_free(Instance(a, a), rng, ctx)
        env = bound.env
        return Instance(env=env, shown=bound.shown, label=f"isact({print_term(a)})",
                        check=lambda c: isact_check(c.norm.proc(a, env)))
    return make


# -- sequences -----------------------------------------------------------------------


_VIA = {"chc": "genalt", "seqb": "genseq", "parb": "genpar"}


def _via_sequences(kind):
    def make(rng, ctx):
        p = _body(kind, rng, ctx)
        top = ctx.limits.max_parallel_range if kind == "parb" else ctx.limits.sequence_range
        n = rng.randint(1, top)
        rhs = T.Op(_VIA[kind], (Binder("conc", n, u_, T.single(p)),))
        return _instance(Binder(kind, n, u_, p), rhs, rng, ctx, f"n={n}")
    return make


def _non_terminating(var):
    return lambda env: not env[var].terminates


# -- groups ----------------------------------------------------------------------------------


def _meadow_group():
    return [
        equation("add-assoc", "(u + v) + w", "u + (v + w)"),
        equation("add-comm", "u + v", "v + u"),
        equation("add-zero", "u + 0", "u"),
        equation("add-neg", "u + -u", "0"),
        equation("mul-assoc", "(u * v) * w", "u * (v * w)"),
        equation("mul-comm", "u * v", "v * u"),
        equation("mul-one", "u * 1", "u"),
        equation("distrib", "u * (v + w)", "u * v + u * w"),
        equation("inv-inv", "inv(inv(u))", "u"),
        equation("restricted-inverse", "u * (u * inv(u))", "u"),
    ]


def _signum_group():
    return [
        equation("sign-unit", "sign(u / u)", "u / u"),
        equation("sign-co-unit", "sign(1 - u / u)", "1 - u / u"),
        equation("sign-minus-one", "sign(-1)", "-1"),
        equation("sign-inv", "sign(inv(u))", "sign(u)"),
        equation("sign-mul", "sign(u * v)", "sign(u) * sign(v)"),
        equation("sign-add", "(1 - (sign(u) - sign(v)) / (sign(u) - sign(v))) * (sign(u + v) - sign(u))", "0"),
    ]


def _acp_group():
    return [
        equation("alt-comm", "x + y", "y + x"),
        equation("alt-assoc", "(x + y) + z", "x + (y + z)"),
        equation("alt-idem", "x + x", "x"),
        equation("alt-seq-distrib", "(x + y) . z", "x . z + y . z"),
        equation("seq-assoc", "(x . y) . z", "x . (y . z)"),
        equation("alt-delta", "x + delta", "x"),
        equation("delta-seq", "delta . x", "delta"),
        Axiom("encap-const-out", _encap_const(False, False)),
        Axiom("encap-const-in", _encap_const(True, False)),
        equation("encap-alt", "encap{H}(x + y)", "encap{H}(x) + encap{H}(y)", encap_set=True),
        equation("encap-seq", "encap{H}(x . y)", "encap{H}(x) . encap{H}(y)", encap_set=True),
        equation("merge", "x || y", "(x |_ y + y |_ x) + x | y"),
        equation("lmerge-act", "?a |_ x", "?a . x"),
        equation("lmerge-act-seq", "?a . x |_ y", "?a . (x || y)"),
        equation("lmerge-alt", "(x + y) |_ z", "x |_ z + y |_ z"),
        equation("comm-act-seq", "?a | ?b . x", "(?a | ?b) . x"),
        equation("comm-seq-seq", "?a . x | ?b . y", "(?a | ?b) . (x || y)"),
        equation("comm-alt", "(x + y) | z", "x | z + y | z"),
        equation("comm-comm", "x | y", "y | x"),
        equation("comm-assoc", "(x | y) | z", "x | (y | z)"),
        equation("delta-comm", "delta | x", "delta"),
        Axiom("isact-const", _isact_const(False)),
    ]


def _acp_md_group():
    return [
        equation("guard-zero", "[0] -> x", "x"),
        equation("guard-one", "[1] -> x", "delta"),
        equation("guard-norm", "[u] -> x", "[u / u] -> x"),
        equation("guard-guard", "[u] -> ([v] -> x)", "[1 - (1 - u / u) * (1 - v / v)] -> x"),
        equation("guard-alt-same", "[u] -> x + [v] -> x", "[u / u * (v / v)] -> x"),
        equation("guard-delta", "[u] -> delta", "delta"),
        equation("guard-alt", "[u] -> (x + y)", "[u] -> x + [u] -> y"),
        equation("guard-seq", "[u] -> (x . y)", "([u] -> x) . y"),
        equation("guard-lmerge", "([u] -> x) |_ y", "[u] -> (x |_ y)"),
        equation("guard-comm", "([u] -> x) | y", "[u] -> (x | y)"),
        equation("guard-encap", "encap{H}([u] -> x)", "[u] -> encap{H}(x)", encap_set=True),
        Axiom("data-comm", _data_comm_same),
        Axiom("data-comm-arity", _data_comm_diff),
        Axiom("data-encap-out", _encap_const(False, True)),
        Axiom("data-encap-in", _encap_const(True, True)),
        Axiom("isact-data", _isact_const(True)),
    ]


_KINDS = ("sum", "prod", "chc", "seqb", "parb")


def _compr_group():
    out = []
    for k in _KINDS:
        out += [Axiom(f"{k}-alpha", _alpha(k)), Axiom(f"{k}-one", _base(k)), Axiom(f"{k}-unfold", _unfold(k))]
    return out


def _derived_group():
    out = []
    for k in _KINDS:
        out += [Axiom(f"{k}-one", _base(k)), Axiom(f"{k}-two", _two(k)), Axiom(f"{k}-split", _split(k))]
        out.append(Axiom(f"{k}-pad", _pad(k)) if k in ("sum", "prod", "chc") else Axiom(f"{k}-split-rest", _split_rest(k)))
    return out


def _epsilon_group():
    return [
        equation("seq-eps", "x . eps", "x"),
        equation("eps-seq", "eps . x", "x"),
        equation("merge-term", "x || y", "((x |_ y + y |_ x) + x | y) + term(x) . term(y)"),
        # restricted to processes that cannot terminate: at x = eps it clashes with eps-lmerge
        equation("lmerge-eps", "x |_ eps", "x", where=_non_terminating(x_)),
        equation("eps-lmerge", "eps |_ x", "delta"),
        equation("eps-comm", "eps | x", "delta"),
        equation("encap-eps", "encap{H}(eps)", "eps", encap_set=True),
        equation("term-eps", "term(eps)", "eps"),
        equation("term-act", "term(?a)", "delta"),
        equation("term-alt", "term(x + y)", "term(x) + term(y)"),
        equation("term-seq", "term(x . y)", "term(x) . term(y)"),
        equation("term-comm", "term(x) . term(y)", "term(y) . term(x)"),
        equation("alt-term", "x + term(x)", "x"),
        equation("par-eps", "x || eps", "x"),
        equation("par-assoc", "(x || y) || z", "x || (y || z)"),
        equation("lmerge-act", "?a |_ x", "?a . x"),
        equation("comm-act-seq", "?a | ?b . x", "(?a | ?b) . x"),
        Axiom("seqb-pad", _pad("seqb")),
        Axiom("parb-pad", _pad("parb")),
    ]


def _sequences_group():
    return [
        equation("concat-empty", "alpha ++ <>", "alpha"),
        equation("empty-concat", "<> ++ alpha", "alpha"),
        equation("concat-assoc", "(alpha ++ beta) ++ gamma", "alpha ++ (beta ++ gamma)"),
        equation("alt-empty", "Alt(<>)", "delta"),
        equation("alt-single", "Alt(<x>)", "x"),
        equation("alt-cons", "Alt(<x> ++ alpha)", "x + Alt(alpha)"),
        equation("seq-empty", "Seq(<>)", "eps"),
        equation("seq-single", "Seq(<x>)", "x"),
        equation("seq-cons", "Seq(<x> ++ alpha)", "x . Seq(alpha)"),
        equation("par-empty", "Par(<>)", "eps"),
        equation("par-single", "Par(<x>)", "x"),
        equation("par-cons", "Par(<x> ++ alpha)", "x || Par(alpha)"),
        Axiom("chc-via-conc", _via_sequences("chc")),
        Axiom("seqb-via-conc", _via_sequences("seqb")),
        Axiom("parb-via-conc", _via_sequences("parb")),
    ]


def _compr_ps_group():
    return [
        Axiom("conc-alpha", _alpha("conc")),
        Axiom("conc-one", _base("conc")),
        Axiom("conc-unfold", _unfold("conc")),
        Axiom("conc-two", _two("conc")),
        Axiom("conc-split", _split("conc")),
        Axiom("conc-pad", _pad("conc")),
    ]


_BUILDERS = {
    "meadow": (_meadow_group, BASE),
    "signum": (_signum_group, BASE),
    "acp": (_acp_group, BASE),
    "acp-md": (_acp_md_group, BASE),
    "compr": (_compr_group, BASE),
    "derived": (_derived_group, BASE),
    "epsilon": (_epsilon_group, EPSILON),
    "sequences": (_sequences_group, FULL),
    "compr-ps": (_compr_ps_group, FULL),
}


def axioms(group: str) -> list[Axiom]:
    if group not in _BUILDERS:
        raise ValueError(f"unknown axiom group {group!r}; choose from {', '.join(GROUPS)}")
    return _BUILDERS[group][0]()


# -- running ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomOutcome:
    group: str
    axiom_id: str
    trials: int
    failures: int
    first_counterexample: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class SweepReport:
    group: str
    model: str
    gamma: str
    seed: int
    outcomes: tuple
    probe: str = ""

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    @property
    def failures(self) -> int:
        return sum(o.failures for o in self.outcomes)


def _holds(inst: Instance, ctx: _Ctx) -> tuple[bool, str]:
    try:
        if inst.check is not None:
            return bool(inst.check(ctx)), ""
        a = ctx.norm.denote(inst.lhs, inst.env)
        b = ctx.norm.denote(inst.rhs, inst.env)
    except (SemanticsError, T.TermError) as exc:
        return False, f"error: {exc}"
    if a == b:
        return True, ""
    return False, f"{_show(a)} vs {_show(b)}"


def _show(value) -> str:
    if isinstance(value, tuple):
        return "<" + ", ".join(str(x) for x in value) + ">"
    return str(value)


def _exhaustive_instances(ax: Axiom, ctx: _Ctx):
    lhs_rhs = ax.make(random.Random(0), ctx)
    lhs, rhs = lhs_rhs.lhs, lhs_rhs.rhs
    vs = sorted(T.free_vars(lhs) | T.free_vars(rhs))
    for values in itertools.product(ctx.model.elements(), repeat=len(vs)):
        yield Instance(lhs, rhs, dict(zip(vs, values)), {v: str(q) for v, q in zip(vs, values)})


def run_axiom(group: str, axiom_id: str, trials: int, seed: int, gamma: CommTable = EMPTY_GAMMA,
              model: MeadowModel = RATIONAL, limits: SweepLimits = SweepLimits()) -> AxiomOutcome:
    ax = next((a for a in axioms(group) if a.id == axiom_id), None)
    if ax is None:
        raise ValueError(f"no axiom {axiom_id!r} in group {group!r}")
    return check_axiom(ax, group, trials, seed, gamma, model, limits)


def check_axiom(ax: Axiom, group: str, trials: int, seed: int, gamma: CommTable = EMPTY_GAMMA,
                model: MeadowModel = RATIONAL, limits: SweepLimits = SweepLimits()) -> AxiomOutcome:
    """Instantiate ``ax`` with the samplers of ``group`` and count the failing instances."""
    axiom_id = ax.id
    ctx = _Ctx(group, model, gamma, _BUILDERS[group][1], limits)
    done = failures = 0
    first = ""
    if ax.exhaustive and isinstance(model, ZMod):
        source = _exhaustive_instances(ax, ctx)
    else:
        source = _random_instances(ax, ctx, group, trials, seed)
    for inst in source:
        done += 1
        ok, why = _holds(inst, ctx)
        if not ok:
            failures += 1
            if not first:
                first = inst.describe() + (f" [{why}]" if why else "")
    return AxiomOutcome(group, axiom_id, done, failures, first)


def _random_instances(ax: Axiom, ctx: _Ctx, group: str, trials: int, seed: int):
    for trial in range(trials):
        rng = random.Random(f"{seed}:{group}:{ax.id}:{trial}")
        for _ in range(200):
            inst = ax.make(rng, ctx)
            if inst is not None:
                yield inst
                break
        else:
            raise RuntimeError(f"could not satisfy the side condition of {group}/{ax.id}")


def _run_job(args):
    return run_axiom(*args)


def cancellation_probe(model: MeadowModel, samples: int = 1000, seed: int = 1) -> str:
    """Empty if ``u * inv(u) = 1`` for every sampled nonzero u, else the witness."""
    if isinstance(model, ZMod):
        pool = model.elements()
    else:
        rng = random.Random(f"{seed}:probe")
        pool = [random_rational(rng) for _ in range(samples)]
    for q in pool:
        if q != model.zero and model.mul(q, model.minv(q)) != model.one:
            return f"u={q}: u*inv(u)={model.mul(q, model.minv(q))}"
    return ""


def soundness_sweep(group: str, trials: int = 1000, seed: int = 1, gamma: CommTable = EMPTY_GAMMA,
                    model: MeadowModel = RATIONAL, limits: SweepLimits = SweepLimits(),
                    jobs: int = 1) -> SweepReport:
    if group == "signum" and not model.signed:
        raise UnsignedModelError(f"the signum group needs a signed model, not {model.name}")
    ids = [a.id for a in axioms(group)]
    jobs_args = [(group, i, trials, seed, gamma, model, limits) for i in ids]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = tuple(pool.map(_run_job, jobs_args))
    else:
        outcomes = tuple(_run_job(a) for a in jobs_args)
    probe = cancellation_probe(model, seed=seed) if group == "meadow" else ""
    return SweepReport(group, model.name, _gamma_name(gamma), seed, outcomes, probe)


def _gamma_name(gamma: CommTable) -> str:
    return ",".join(f"{a}|{b}->{c}" for a, b, c in gamma.entries()) or "empty"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        for o in rep.outcomes:
            w.writerow((o.group, o.axiom_id, o.trials, o.failures, o.first_counterexample))
    return buf.getvalue()
