"""Interpretation of binding terms.

Quantities evaluate to meadow values. Closed processes are interpreted in
the initial model as normal forms: a finite set of ``(head, tail)`` summands
plus a flag for immediate successful termination, where a tail is again a
normal form and the plain successfully terminated tail is the normal form of
``eps``. Two closed process terms are equal exactly when their normal forms
coincide. Variable-binding operators are interpreted by their recursive
semantic functions, independently of the syntactic elimination strategies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from . import terms as T
from .features import FULL, ExtensionError, FeatureSet
from .meadow import RATIONAL, MeadowModel, MeadowValue, Residue, ZMod
from .terms import Act, Binder, Encap, Op, Sort, Term, Var


class SemanticsError(Exception):
    pass


class OpenTermError(SemanticsError):
    """A variable has no value in the assignment."""


class GuardResidueError(SemanticsError):
    """A guard evaluated to p/p outside {0, 1}; only cancellation meadows collapse guards."""


class CommTableError(SemanticsError):
    pass


# -- communication function ---------------------------------------------------


class ActionHead(NamedTuple):
    label: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.label
        return f"{self.label}({', '.join(str(a) for a in self.args)})"


class CommTable:
    """Partial commutative communication function on action labels; undefined means deadlock."""

    def __init__(self, pairs: Mapping[tuple[str, str], str] | Iterable[tuple[str, str, str]] = ()):
        if isinstance(pairs, Mapping):
            pairs = [(a, b, c) for (a, b), c in pairs.items()]
        self._map: dict[frozenset, str] = {}
        for a, b, c in pairs:
            key = frozenset((a, b))
            if self._map.get(key, c) != c:
                raise CommTableError(f"conflicting definitions for {a} | {b}")
            self._map[key] = c
        self._key = frozenset((k, v) for k, v in self._map.items())

    def __call__(self, a: str, b: str) -> str | None:
        return self._map.get(frozenset((a, b)))

    def __eq__(self, other):
        return isinstance(other, CommTable) and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __bool__(self):
        return bool(self._map)

    def __repr__(self):
        return f"CommTable({self.entries()})"

    def entries(self) -> list[tuple[str, str, str]]:
        out = []
        for key, c in self._map.items():
            a, b = sorted(key) if len(key) == 2 else (next(iter(key)),) * 2
            out.append((a, b, c))
        return sorted(out)

    def labels(self) -> set[str]:
        out = set()
        for a, b, c in self.entries():
            out |= {a, b, c}
        return out

    def comm(self, h1: ActionHead, h2: ActionHead) -> ActionHead | None:
        if len(h1.args) != len(h2.args) or h1.args != h2.args:
            return None
        c = self(h1.label, h2.label)
        return None if c is None else ActionHead(c, h1.args)

    def associativity_violations(self, labels: Iterable[str] = ()) -> list[tuple[str, str, str]]:
        dom = sorted(self.labels() | set(labels))
        bad = []
        for a in dom:
            for b in dom:
                for c in dom:
                    ab, bc = self(a, b), self(b, c)
                    left = None if ab is None else self(ab, c)
                    right = None if bc is None else self(a, bc)
                    if left != right:
                        bad.append((a, b, c))
        return bad

    @classmethod
    def parse(cls, text: str, origin: str = "<gamma>") -> "CommTable":
        """Lines ``a | b -> c``; ``#`` starts a comment. Checked for associativity."""
        triples = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                lhs, c = (s.strip() for s in line.split("->"))
                a, b = (s.strip() for s in lhs.split("|"))
            except ValueError:
                raise CommTableError(f"{origin}:{lineno}: expected 'a | b -> c', got {raw.strip()!r}") from None
            if not (a.isidentifier() and b.isidentifier() and c.isidentifier()):
                raise CommTableError(f"{origin}:{lineno}: action labels must be identifiers")
            triples.append((a, b, c))
        table = cls(triples)
        bad = table.associativity_violations()
        if bad:
            a, b, c = bad[0]
            raise CommTableError(f"{origin}: communication is not associative on ({a}, {b}, {c})")
        return table

    @classmethod
    def load(cls, path) -> "CommTable":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), origin=str(path))


EMPTY_GAMMA = CommTable()


# -- normal forms ---------------------------------------------------------------


class NormalForm:
    """Canonical closed process: summands ``(ActionHead, NormalForm)`` plus a termination flag."""

    __slots__ = ("summands", "terminates", "_hash")

    def __init__(self, summands: frozenset = frozenset(), terminates: bool = False):
        self.summands = summands
        self.terminates = terminates
        self._hash = hash((summands, terminates))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NormalForm) or self._hash != other._hash:
            return False
        return _nf_eq(self, other, {})

    @property
    def is_delta(self) -> bool:
        return not self.summands and not self.terminates

    @property
    def is_eps(self) -> bool:
        return not self.summands and self.terminates

    def __str__(self) -> str:
        return _nf_str(self, {})

    def __repr__(self) -> str:
        return f"NF[{self}]"


def _nf_eq(a: NormalForm, b: NormalForm, memo: dict) -> bool:
    # normal forms built by different normalizers share no nodes; comparing the
    # summand sets directly would unfold the DAG into a tree
    if a is b:
        return True
    if a._hash != b._hash or a.terminates != b.terminates or len(a.summands) != len(b.summands):
        return False
    key = (id(a), id(b))
    if key in memo:
        return memo[key]
    buckets: dict = {}
    for h, t in b.summands:
        buckets.setdefault((h, t._hash), []).append(t)
    ok = all(
        any(_nf_eq(t, c, memo) for c in buckets.get((h, t._hash), ()))
        for h, t in a.summands
    )
    memo[key] = ok
    return ok


def _nf_str(nf: NormalForm, cache: dict) -> str:
    key = id(nf)
    if key in cache:
        return cache[key]
    parts = []
    for head, tail in nf.summands:
        if tail.is_eps:
            parts.append(str(head))
        else:
            inner = _nf_str(tail, cache)
            if len(tail.summands) + tail.terminates > 1:
                inner = f"({inner})"
            parts.append(f"{head} . {inner}")
    parts.sort()
    if nf.terminates:
        parts.append("eps")
    s = " + ".join(parts) if parts else "delta"
    cache[key] = s
    return s


def nf_size(nf: NormalForm) -> int:
    """Number of distinct normal-form nodes reachable from ``nf``."""
    seen, stack = {id(nf)}, [nf]
    while stack:
        for _, tail in stack.pop().summands:
            if id(tail) not in seen:
                seen.add(id(tail))
                stack.append(tail)
    return len(seen)


def isact_check(nf: NormalForm) -> bool:
    """True iff ``nf`` is a single action followed by successful termination."""
    if nf.terminates or len(nf.summands) != 1:
        return False
    (_, tail), = nf.summands
    return tail.is_eps


# -- quantities -----------------------------------------------------------------


def coerce_value(model: MeadowModel, value) -> MeadowValue:
    """Bring an int, Fraction, string or Residue into ``model``."""
    if isinstance(model, ZMod):
        if isinstance(value, Residue):
            return model._own(value)
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                return model.div(model.from_int(value.numerator), model.from_int(value.denominator))
            value = value.numerator
        return model.from_int(int(value))
    if isinstance(value, Residue):
        raise SemanticsError(f"{value!r} is not a rational")
    return Fraction(value)


def eval_quant(t: Term, rho: Mapping | None = None, model: MeadowModel = RATIONAL) -> MeadowValue:
    """Value of a quantity term; ``rho`` maps quantity variables to values."""
    env = {}
    for k, v in (rho or {}).items():
        env[k] = coerce_value(model, v) if isinstance(k, Var) and k.pool == "U" else v
    return _eval_q(t, env, model)


def _eval_q(t: Term, env: Mapping, m: MeadowModel) -> MeadowValue:
    # explicit stack: unary numerals nest deeper than the interpreter's recursion limit
    stack: list = [(t, False)]
    vals: list = []
    while stack:
        node, ready = stack.pop()
        if isinstance(node, Var):
            try:
                vals.append(env[node])
            except KeyError:
                raise OpenTermError(f"no value for variable {node}") from None
        elif isinstance(node, Binder):
            vals.append(_eval_q_binder(node, env, m))
        elif isinstance(node, Op):
            if not node.args:
                if node.op == "zero":
                    vals.append(m.zero)
                elif node.op == "one":
                    vals.append(m.one)
                else:
                    raise T.SortError(f"{node.op} is not a quantity", node)
            elif not ready:
                stack.append((node, True))
                stack.extend((a, False) for a in reversed(node.args))
            else:
                op = node.op
                if op == "add" or op == "mul":
                    b, a = vals.pop(), vals.pop()
                    vals.append(m.add(a, b) if op == "add" else m.mul(a, b))
                elif op == "neg":
                    vals.append(m.neg(vals.pop()))
                elif op == "minv":
                    vals.append(m.minv(vals.pop()))
                elif op == "sign":
                    vals.append(m.sign(vals.pop()))
                else:
                    raise T.SortError(f"{op} is not a quantity operator", node)
        else:
            raise T.SortError(f"not a quantity term: {node!r}", node)
    return vals[0]


def _indices(m: MeadowModel, n: int) -> list:
    # 0, 0 + 1, (0 + 1) + 1, ... as the binder semantics prescribes
    out, q = [], m.zero
    for _ in range(n):
        out.append(q)
        q = m.add(q, m.one)
    return out


def _eval_q_binder(t: Binder, env: Mapping, m: MeadowModel) -> MeadowValue:
    if t.kind not in ("sum", "prod"):
        raise T.SortError(f"{t.kind} binder is not a quantity", t)
    combine = m.add if t.kind == "sum" else m.mul
    local = dict(env)
    acc = None
    for q in reversed(_indices(m, t.n)):
        local[t.var] = q
        v = _eval_q(t.body, local, m)
        acc = v if acc is None else combine(v, acc)
    return acc


# -- processes ------------------------------------------------------------------


class Normalizer:
    """Computes normal forms of closed process and sequence terms.

    Normal forms are interned and the composition operators memoized, so one
    instance should be reused for many related terms.
    """

    def __init__(self, gamma: CommTable = EMPTY_GAMMA, model: MeadowModel = RATIONAL,
                 features: FeatureSet = FULL):
        self.gamma = gamma
        self.model = model
        self.features = features
        self._intern: dict = {}
        self._seq: dict = {}
        self._par: dict = {}
        self._enc: dict = {}
        self.delta = self.mk(frozenset(), False)
        self.eps = self.mk(frozenset(), True)

    def mk(self, summands: frozenset, terminates: bool) -> NormalForm:
        key = (summands, terminates)
        nf = self._intern.get(key)
        if nf is None:
            nf = NormalForm(summands, terminates)
            self._intern[key] = nf
        return nf

    def clear(self):
        self._seq.clear()
        self._par.clear()
        self._enc.clear()

    # operators on normal forms
    def action(self, head: ActionHead) -> NormalForm:
        return self.mk(frozenset(((head, self.eps),)), False)

    def alt(self, x: NormalForm, y: NormalForm) -> NormalForm:
        if x is self.delta:
            return y
        if y is self.delta:
            return x
        return self.mk(x.summands | y.summands, x.terminates or y.terminates)

    def seq(self, x: NormalForm, y: NormalForm) -> NormalForm:
        if x is self.eps:
            return y
        key = (x, y)
        hit = self._seq.get(key)
        if hit is not None:
            return hit
        summands = {(h, self.seq(t, y)) for h, t in x.summands}
        if x.terminates:
            summands |= y.summands
        out = self.mk(frozenset(summands), x.terminates and y.terminates)
        self._seq[key] = out
        return out

    def lmerge(self, x: NormalForm, y: NormalForm) -> NormalForm:
        return self.mk(frozenset((h, self.par(t, y)) for h, t in x.summands), False)

    def cmerge(self, x: NormalForm, y: NormalForm) -> NormalForm:
        out = set()
        comm = self.gamma.comm
        for h1, t1 in x.summands:
            for h2, t2 in y.summands:
                h = comm(h1, h2)
                if h is not None:
                    out.add((h, self.par(t1, t2)))
        return self.mk(frozenset(out), False)

    def par(self, x: NormalForm, y: NormalForm) -> NormalForm:
        if x is self.eps:
            return y
        if y is self.eps:
            return x
        key = (x, y)
        hit = self._par.get(key)
        if hit is not None:
            return hit
        summands = set((h, self.par(t, y)) for h, t in x.summands)
        summands.update((h, self.par(x, t)) for h, t in y.summands)
        summands |= self.cmerge(x, y).summands
        out = self.mk(frozenset(summands), x.terminates and y.terminates)
        self._par[key] = out
        self._par[(y, x)] = out
        return out

    def encap(self, H: frozenset, x: NormalForm) -> NormalForm:
        key = (H, x)
        hit = self._enc.get(key)
        if hit is not None:
            return hit
        out = self.mk(frozenset((h, self.encap(H, t)) for h, t in x.summands if h.label not in H),
                      x.terminates)
        self._enc[key] = out
        return out

    def termi(self, x: NormalForm) -> NormalForm:
        return self.eps if x.terminates else self.delta

    def guarded(self, value: MeadowValue, x: NormalForm) -> NormalForm:
        m = self.model
        test = m.div(value, value)
        if test == m.zero:
            return x
        if test == m.one:
            return self.delta
        raise GuardResidueError(
            f"guard value {value} gives {value}/{value} = {test} in {m.name}; "
            "process interpretation needs a cancellation meadow"
        )

    def gen(self, kind: str, items: tuple) -> NormalForm:
        base = {"genalt": self.delta, "genseq": self.eps, "genpar": self.eps}[kind]
        if not items:
            return base
        op = {"genalt": self.alt, "genseq": self.seq, "genpar": self.par}[kind]
        acc = items[-1]
        for x in reversed(items[:-1]):
            acc = op(x, acc)
        return acc

    def seqcond(self, value: MeadowValue, zero_branch, other_branch):
        m = self.model
        test = m.div(value, value)
        if test == m.zero:
            return zero_branch
        if test == m.one:
            return other_branch
        raise GuardResidueError(f"sequence condition {value} gives {test} in {m.name}")

    # interpretation of terms
    def denote(self, t: Term, env: Mapping | None = None):
        env = env or {}
        s = t.sort
        if s is Sort.QUANT:
            return _eval_q(t, env, self.model)
        if s is Sort.PROC:
            return self.proc(t, env)
        return self.sequence(t, env)

    def _gate(self, flag: str, what: str):
        if not getattr(self.features, flag):
            raise ExtensionError(f"{what} requires the {flag} extension")

    def proc(self, t: Term, env: Mapping) -> NormalForm:
        if isinstance(t, Var):
            try:
                return env[t]
            except KeyError:
                raise OpenTermError(f"no value for process variable {t}") from None
        if isinstance(t, Act):
            args = tuple(_eval_q(a, env, self.model) for a in t.args)
            return self.action(ActionHead(t.label, args))
        if isinstance(t, Encap):
            return self.encap(t.H, self.proc(t.body, env))
        if isinstance(t, Binder):
            if t.kind not in ("chc", "seqb", "parb"):
                raise T.SortError(f"{t.kind} binder is not a process", t)
            op = {"chc": self.alt, "seqb": self.seq, "parb": self.par}[t.kind]
            local = dict(env)
            acc = None
            for q in reversed(_indices(self.model, t.n)):
                local[t.var] = q
                x = self.proc(t.body, local)
                acc = x if acc is None else op(x, acc)
            return acc
        op = t.op
        a = t.args
        if op == "alt":
            return self.alt(self.proc(a[0], env), self.proc(a[1], env))
        if op == "seq":
            return self.seq(self.proc(a[0], env), self.proc(a[1], env))
        if op == "par":
            return self.par(self.proc(a[0], env), self.proc(a[1], env))
        if op == "lmerge":
            return self.lmerge(self.proc(a[0], env), self.proc(a[1], env))
        if op == "cmerge":
            return self.cmerge(self.proc(a[0], env), self.proc(a[1], env))
        if op == "guard":
            return self.guarded(_eval_q(a[0], env, self.model), self.proc(a[1], env))
        if op == "delta":
            return self.delta
        if op == "eps":
            self._gate("epsilon", "eps")
            return self.eps
        if op == "termi":
            self._gate("epsilon", "the termination operator")
            return self.termi(self.proc(a[0], env))
        if op in ("genalt", "genseq", "genpar"):
            self._gate("sequences", op)
            return self.gen(op, self.sequence(a[0], env))
        raise T.SortError(f"{op} is not a process operator", t)

    def sequence(self, t: Term, env: Mapping) -> tuple:
        self._gate("sequences", "process sequences")
        if isinstance(t, Var):
            try:
                return env[t]
            except KeyError:
                raise OpenTermError(f"no value for sequence variable {t}") from None
        if isinstance(t, Binder):
            if t.kind != "conc":
                raise T.SortError(f"{t.kind} binder is not a sequence", t)
            local = dict(env)
            out: tuple = ()
            for q in _indices(self.model, t.n):
                local[t.var] = q
                out += self.sequence(t.body, local)
            return out
        op = t.op
        if op == "empty":
            return ()
        if op == "single":
            return (self.proc(t.args[0], env),)
        if op == "concat":
            return self.sequence(t.args[0], env) + self.sequence(t.args[1], env)
        if op == "seqcond":
            value = _eval_q(t.args[1], env, self.model)
            chosen = self.seqcond(value, t.args[0], t.args[2])
            return self.sequence(chosen, env)
        raise T.SortError(f"{op} is not a sequence operator", t)


# -- public operations ------------------------------------------------------------


@dataclass
class Assignment:
    """Values for the free variables of a term.

    Quantity variables map to meadow values; process and sequence variables
    map to closed terms of their sort.
    """

    quant: dict = field(default_factory=dict)
    proc: dict = field(default_factory=dict)
    seq: dict = field(default_factory=dict)

    @classmethod
    def of(cls, mapping: Mapping[Var, object]) -> "Assignment":
        a = cls()
        for var, value in mapping.items():
            {"U": a.quant, "X": a.proc, "Xp": a.proc, "V": a.seq}[var.pool][var] = value
        return a

    def environment(self, normalizer: Normalizer) -> dict:
        env: dict = {v: coerce_value(normalizer.model, q) for v, q in self.quant.items()}
        for v, term in self.proc.items():
            env[v] = term if isinstance(term, NormalForm) else normalizer.proc(_closed(term, v), {})
        for v, term in self.seq.items():
            env[v] = term if isinstance(term, tuple) else normalizer.sequence(_closed(term, v), {})
        return env


def _closed(term: Term, var: Var) -> Term:
    if not T.is_closed(term):
        raise OpenTermError(f"value assigned to {var} must be a closed term")
    return term


def interpret(t: Term, rho: Assignment | Mapping | None = None, gamma: CommTable = EMPTY_GAMMA,
              model: MeadowModel = RATIONAL, features: FeatureSet = FULL,
              normalizer: Normalizer | None = None):
    """Meadow value, normal form, or tuple of normal forms, according to the sort of ``t``."""
    norm = normalizer or Normalizer(gamma, model, features)
    if rho is None:
        rho = Assignment()
    elif not isinstance(rho, Assignment):
        rho = Assignment.of(rho)
    return norm.denote(t, rho.environment(norm))


def normalize_proc(t: Term, gamma: CommTable = EMPTY_GAMMA, model: MeadowModel = RATIONAL,
                   features: FeatureSet = FULL) -> NormalForm:
    if t.sort is not Sort.PROC:
        raise T.SortError("normalize_proc expects a process term", t)
    if not T.is_closed(t):
        raise OpenTermError(f"term has free variables: {sorted(map(str, T.free_vars(t)))}")
    return Normalizer(gamma, model, features).proc(t, {})


def proc_equal(t1: Term, t2: Term, gamma: CommTable = EMPTY_GAMMA, model: MeadowModel = RATIONAL,
               features: FeatureSet = FULL) -> bool:
    norm = Normalizer(gamma, model, features)
    for t in (t1, t2):
        if not T.is_closed(t):
            raise OpenTermError("proc_equal compares closed terms")
    return norm.proc(t1, {}) == norm.proc(t2, {})
