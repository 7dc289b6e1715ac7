"""Seeded random generators for terms, used by the soundness sweep and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import terms as T
from .features import FULL, FeatureSet
from .terms import Term, Var


@dataclass(frozen=True)
class GenConfig:
    """Shape limits for generated terms.

    ``max_parallel`` caps the number of merge operators in one generated
    process, which keeps normal forms small enough for large sweeps.
    """

    labels: tuple = ("a", "b", "c", "d")
    depth: int = 4
    max_arity: int = 2
    max_parallel: int = 2
    features: FeatureSet = FULL
    signed: bool = True


DEFAULT = GenConfig()


def small_numeral(rng: random.Random, top: int = 2) -> Term:
    return T.unary_numeral(rng.randint(0, top))


def closed_quant(rng: random.Random, depth: int = 2, signed: bool = True, qvars: tuple = ()) -> Term:
    """A quantity over 0, 1 and ``qvars``."""
    if depth <= 0 or rng.random() < 0.3:
        leaves = [T.ZERO, T.ONE, *qvars]
        return rng.choice(leaves)
    k = rng.randrange(6 if signed else 5)
    sub = lambda: closed_quant(rng, depth - 1, signed, qvars)  # noqa: E731
    if k == 0:
        return T.add(sub(), sub())
    if k == 1:
        return T.mul(sub(), sub())
    if k == 2:
        return T.neg(sub())
    if k == 3:
        return T.minv(sub())
    if k == 4:
        return T.sub(sub(), sub())
    return T.sign(sub())


def atomic(rng: random.Random, cfg: GenConfig = DEFAULT, qvars: tuple = ()) -> Term:
    """An atomic action or a data action with small numeral (or variable) arguments."""
    label = rng.choice(cfg.labels)
    arity = rng.choice([0, 0] + list(range(1, cfg.max_arity + 1)))
    pool = list(qvars)
    args = tuple(
        rng.choice(pool) if pool and rng.random() < 0.5 else small_numeral(rng, 1)
        for _ in range(arity)
    )
    return T.act(label, *args)


class _Budget:
    def __init__(self, parallel: int):
        self.parallel = parallel


def closed_proc(rng: random.Random, cfg: GenConfig = DEFAULT, depth: int | None = None,
                qvars: tuple = (), pvars: tuple = ()) -> Term:
    """A process term of nesting depth at most ``depth`` (closed unless variables are given)."""
    return _proc(rng, cfg, cfg.depth if depth is None else depth, qvars, pvars, _Budget(cfg.max_parallel))


def _proc(rng, cfg, depth, qvars, pvars, budget) -> Term:
    eps = cfg.features.epsilon
    if depth <= 1 or rng.random() < 0.2:
        leaf = rng.choices(["var", "delta", "eps", "act"], [2 if pvars else 0, 1, 1 if eps else 0, 6])[0]
        if leaf == "var":
            return rng.choice(pvars)
        if leaf == "delta":
            return T.DELTA
        if leaf == "eps":
            return T.EPS
        return atomic(rng, cfg, qvars)
    # deadlock-producing operators are kept rare so that most processes can do something
    kinds = ["alt", "alt", "alt", "seq", "seq", "seq", "guard", "encap"]
    if budget.parallel > 0:
        kinds += ["par", "lmerge", "cmerge"]
    if eps:
        kinds.append("termi")
    kind = rng.choice(kinds)
    sub = lambda: _proc(rng, cfg, depth - 1, qvars, pvars, budget)  # noqa: E731
    if kind in ("par", "lmerge", "cmerge"):
        budget.parallel -= 1
        out = T.Op(kind, (sub(), sub()))
        # without a matching table a communication merge is deadlock, so give it an alternative
        return T.alt(out, sub()) if kind == "cmerge" else out
    if kind == "alt":
        return T.alt(sub(), sub())
    if kind == "seq":
        return T.seqc(sub(), sub())
    if kind == "guard":
        q = closed_quant(rng, 1, cfg.signed, qvars)
        # a guard lets its process through only when the test is 0, so build zero tests often
        return T.guard(T.sub(q, q) if rng.random() < 0.8 else q, sub())
    if kind == "encap":
        return T.alt(T.encap(rng.sample(cfg.labels, 1), sub()), sub())
    # term(x) is only interesting when x may terminate
    return T.termi(T.alt(sub(), T.EPS) if rng.random() < 0.5 else sub())


def closed_seq(rng: random.Random, cfg: GenConfig = DEFAULT, length: int | None = None,
               depth: int = 2, qvars: tuple = ()) -> Term:
    """A sequence term made of singletons, empty sequences and concatenation."""
    n = rng.randint(0, 3) if length is None else length
    items = [T.single(closed_proc(rng, cfg, depth, qvars)) for _ in range(n)]
    if not items:
        return T.EMPTY
    out = items[0]
    for it in items[1:]:
        out = T.concat(out, it)
    if rng.random() < 0.2:
        out = T.concat(T.EMPTY, out) if rng.random() < 0.5 else T.concat(out, T.EMPTY)
    return out


# -- open bodies for binder schemas ----------------------------------------------------


def quant_body(rng: random.Random, u: Var, depth: int = 3, signed: bool = True,
               extra: tuple = (), nest: int = 1) -> Term:
    """A quantity in which ``u`` occurs free at least once."""
    for _ in range(20):
        t = _qbody(rng, (u, *extra), depth, signed, nest)
        if T.occurs_free(u, t):
            return t
    return T.add(u, T.ONE)


def _qbody(rng, qvars, depth, signed, nest) -> Term:
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice([*qvars, *qvars, T.ONE, T.ZERO])
    if nest > 0 and rng.random() < 0.1:
        v = T.fresh_var(set(qvars))
        kind = rng.choice(["sum", "prod"])
        return T.Binder(kind, rng.randint(1, 3), v, _qbody(rng, (*qvars, v), depth - 1, signed, nest - 1))
    k = rng.randrange(6 if signed else 5)
    sub = lambda: _qbody(rng, qvars, depth - 1, signed, nest)  # noqa: E731
    return [
        lambda: T.add(sub(), sub()),
        lambda: T.mul(sub(), sub()),
        lambda: T.neg(sub()),
        lambda: T.minv(sub()),
        lambda: T.sub(sub(), T.unary_numeral(rng.randint(0, 3))),
        lambda: T.sign(sub()),
    ][k]()


def proc_body(rng: random.Random, u: Var, cfg: GenConfig = DEFAULT, depth: int = 3,
              extra: tuple = (), pvars: tuple = (), nest: int = 1) -> Term:
    """A process in which ``u`` occurs free, e.g. through data-action arguments or guards."""
    for _ in range(20):
        t = _pbody(rng, cfg, (u, *extra), pvars, depth, nest, _Budget(1))
        if T.occurs_free(u, t):
            return t
    return T.act(cfg.labels[0], u)


def _pbody(rng, cfg, qvars, pvars, depth, nest, budget) -> Term:
    u = qvars[0]
    if depth <= 1 or rng.random() < 0.25:
        leaf = rng.choices(["var", "delta", "eps", "bare", "data"],
                           [2 if pvars else 0, 1, 1 if cfg.features.epsilon else 0, 2, 4])[0]
        if leaf == "var":
            return rng.choice(pvars)
        if leaf == "delta":
            return T.DELTA
        if leaf == "eps":
            return T.EPS
        label = rng.choice(cfg.labels)
        if leaf == "bare":
            return T.act(label)
        return T.act(label, rng.choice([u, *qvars, T.add(u, T.ONE)]))
    if nest > 0 and rng.random() < 0.1:
        v = T.fresh_var(set(qvars))
        kind = rng.choice(["chc", "seqb", "parb"] if budget.parallel > 0 else ["chc", "seqb"])
        if kind == "parb":
            budget.parallel -= 1
        inner = _pbody(rng, cfg, (*qvars, v), pvars, depth - 1, nest - 1, budget)
        return T.Binder(kind, rng.randint(1, 3), v, inner)
    kinds = ["alt", "seq", "guard", "guard", "encap"]
    if budget.parallel > 0:
        kinds += ["par", "lmerge", "cmerge"]
    if cfg.features.epsilon:
        kinds.append("termi")
    kind = rng.choice(kinds)
    sub = lambda: _pbody(rng, cfg, qvars, pvars, depth - 1, nest, budget)  # noqa: E731
    if kind in ("par", "lmerge", "cmerge"):
        budget.parallel -= 1
        out = T.Op(kind, (sub(), sub()))
        # without a matching table a communication merge is deadlock, so give it an alternative
        return T.alt(out, sub()) if kind == "cmerge" else out
    if kind == "alt":
        return T.alt(sub(), sub())
    if kind == "seq":
        return T.seqc(sub(), sub())
    if kind == "guard":
        q = rng.choice(qvars)
        test = T.sub(q, T.unary_numeral(rng.randint(0, 3))) if rng.random() < 0.7 else _qbody(rng, qvars, 1, cfg.signed, 0)
        return T.guard(test, sub())
    if kind == "encap":
        return T.alt(T.encap(rng.sample(cfg.labels, 1), sub()), sub())
    # term(x) is only interesting when x may terminate
    return T.termi(T.alt(sub(), T.EPS) if rng.random() < 0.5 else sub())


def seq_body(rng: random.Random, u: Var, cfg: GenConfig = DEFAULT, depth: int = 2,
             extra: tuple = (), nest: int = 1) -> Term:
    """A sequence term in which ``u`` occurs free."""
    for _ in range(20):
        t = _sbody(rng, cfg, (u, *extra), depth, nest)
        if T.occurs_free(u, t):
            return t
    return T.single(T.act(cfg.labels[0], u))


def _sbody(rng, cfg, qvars, depth, nest) -> Term:
    r = rng.random()
    if depth <= 0 or r < 0.4:
        if r < 0.08:
            return T.EMPTY
        return T.single(proc_body(rng, qvars[0], cfg, 2, qvars[1:], nest=0))
    if nest > 0 and r < 0.5:
        v = T.fresh_var(set(qvars))
        return T.Binder("conc", rng.randint(1, 3), v, _sbody(rng, cfg, (*qvars, v), depth - 1, nest - 1))
    return T.concat(_sbody(rng, cfg, qvars, depth - 1, nest), _sbody(rng, cfg, qvars, depth - 1, nest))


# -- closed comprehended terms --------------------------------------------------------


@dataclass(frozen=True)
class ComprConfig:
    """Limits for closed comprehended terms.

    ``max_range`` bounds each binder; ``range_product`` bounds the product of
    ranges along any chain of nested binders; parallel binders get their own
    smaller range bound because their normal forms grow exponentially.
    """

    max_range: int = 16
    max_nesting: int = 3
    range_product: int = 64
    max_parallel_range: int = 8
    labels: tuple = ("a", "b", "c", "d")
    features: FeatureSet = FULL


def comprehended(rng: random.Random, cfg: ComprConfig = ComprConfig(), sort: T.Sort | None = None) -> Term:
    """A closed term of the given (or a random) sort headed by a binder."""
    if sort is None:
        sorts = [T.Sort.QUANT, T.Sort.PROC]
        if cfg.features.sequences:
            sorts.append(T.Sort.SEQ)
        sort = rng.choice(sorts)
    return _compr(rng, cfg, sort, (), cfg.max_nesting, cfg.range_product, True)


def _range(rng, top):
    # favour small ranges but reach the maximum regularly
    return min(top, rng.choice([1, 2, 3, 4, 5, 7, 8, 9, 12, 15, 16, rng.randint(1, 16)]))


def _compr(rng, cfg, sort, qvars, nesting, budget, head) -> Term:
    gcfg = GenConfig(labels=cfg.labels, features=cfg.features)
    v = T.fresh_var(set(qvars))
    scope = (v, *qvars)
    if sort is T.Sort.QUANT:
        kind = rng.choice(["sum", "prod"])
    elif sort is T.Sort.PROC:
        kind = rng.choice(["chc", "seqb", "parb"])
    else:
        kind = "conc"
    top = min(cfg.max_range, budget)
    if kind == "parb":
        top = min(top, cfg.max_parallel_range)
    n = _range(rng, max(1, top))
    inner_budget = max(1, budget // n)
    # a parallel binder over a nested binder multiplies state spaces, so it only takes leaves
    nest_inner = kind != "parb" and nesting > 1 and inner_budget > 1 and rng.random() < 0.6

    if sort is T.Sort.QUANT:
        leaf = _qbody(rng, scope, 2, True, 0)
        if nest_inner:
            inner = _compr(rng, cfg, T.Sort.QUANT, scope, nesting - 1, inner_budget, False)
            body = rng.choice([T.add, T.mul, T.sub])(leaf, inner)
        else:
            body = leaf if T.occurs_free(v, leaf) else T.add(leaf, v)
    elif sort is T.Sort.PROC:
        leaf = _pbody(rng, gcfg, scope, (), 2, 0, _Budget(0 if kind == "parb" else 1))
        if nest_inner:
            inner_sort = rng.choice([T.Sort.PROC, T.Sort.QUANT])
            inner = _compr(rng, cfg, inner_sort, scope, nesting - 1, inner_budget, False)
            if inner_sort is T.Sort.QUANT:
                body = T.alt(T.act(rng.choice(cfg.labels), inner), leaf)
            else:
                body = rng.choice([T.alt, T.seqc])(leaf, inner)
        else:
            body = leaf
    else:
        leaf = T.single(_pbody(rng, gcfg, scope, (), 2, 0, _Budget(0)))
        if nest_inner:
            inner = _compr(rng, cfg, T.Sort.SEQ, scope, nesting - 1, inner_budget, False)
            body = T.concat(leaf, inner)
        else:
            body = leaf
    return T.Binder(kind, n, v, body)


def alpha_variant(t: Term, offset: int = 64) -> Term:
    """Rename every bound variable of ``t`` to a fresh one (index ``offset`` and up)."""
    counter = [offset]

    def go(s: Term) -> Term:
        if isinstance(s, T.Binder):
            fresh = T.U(counter[0])
            counter[0] += 1
            body = go(T.subst_quant(s.body, fresh, s.var))
            return T.Binder(s.kind, s.n, fresh, body)
        kids = T.children(s)
        if not kids:
            return s
        return T._rebuild(s, [go(c) for c in kids])

    if any(v.pool == "U" and v.index >= offset for v in T.all_vars(t)):
        raise ValueError(f"offset {offset} collides with variables of the term")
    return go(t)
