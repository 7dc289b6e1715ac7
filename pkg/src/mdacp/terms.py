"""Binding terms over the sorts Quant, Proc and ProcSeq.

Every operator of the signature is an :class:`Op` carrying its name and a
tuple of arguments; atomic and data-handling actions, encapsulation and the
variable-binding operators get their own node classes because they carry
extra parameters. All nodes are immutable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator


class Sort(enum.Enum):
    QUANT = "Quant"
    PROC = "Proc"
    SEQ = "ProcSeq"

    def __str__(self) -> str:
        return self.value


Q, P, S = Sort.QUANT, Sort.PROC, Sort.SEQ


class TermError(Exception):
    pass


class SortError(TermError):
    def __init__(self, message: str, node: "Term | None" = None):
        super().__init__(message)
        self.node = node


class CaptureError(TermError):
    """A process substitution would capture a quantity variable."""


# pool -> sort; Xp is the a, b, c convention used only in axiom schemas
POOLS = {"U": Q, "X": P, "Xp": P, "V": S}
_VAR_ALIASES = {"U": ("u", "v", "w"), "X": ("x", "y", "z"), "V": ("alpha", "beta", "gamma")}
_VAR_PREFIX = {"U": "u", "X": "x", "V": "alpha", "Xp": "?a"}


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from .syntax import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True, order=True)
class Var(Term):
    pool: str
    index: int

    @property
    def sort(self) -> Sort:
        return POOLS[self.pool]

    @property
    def name(self) -> str:
        if self.pool == "Xp":
            return "?" + "abc"[self.index] if self.index < 3 else f"?a{self.index}"
        aliases = _VAR_ALIASES[self.pool]
        if self.index < len(aliases):
            return aliases[self.index]
        return f"{_VAR_PREFIX[self.pool]}{self.index}"

    __str__ = lambda self: self.name  # noqa: E731


def U(i: int) -> Var:
    return Var("U", i)


def X(i: int) -> Var:
    return Var("X", i)


def XP(i: int) -> Var:
    return Var("Xp", i)


def SV(i: int) -> Var:
    return Var("V", i)


# operator name -> (argument sorts, result sort)
SIGNATURE: dict[str, tuple[tuple[Sort, ...], Sort]] = {
    "zero": ((), Q),
    "one": ((), Q),
    "add": ((Q, Q), Q),
    "mul": ((Q, Q), Q),
    "neg": ((Q,), Q),
    "minv": ((Q,), Q),
    "sign": ((Q,), Q),
    "delta": ((), P),
    "eps": ((), P),
    "alt": ((P, P), P),
    "seq": ((P, P), P),
    "par": ((P, P), P),
    "lmerge": ((P, P), P),
    "cmerge": ((P, P), P),
    "guard": ((Q, P), P),
    "termi": ((P,), P),
    "empty": ((), S),
    "single": ((P,), S),
    "concat": ((S, S), S),
    "genalt": ((S,), P),
    "genseq": ((S,), P),
    "genpar": ((S,), P),
    # S <| r |> S' : the first branch when r = 0, the second otherwise
    "seqcond": ((S, Q, S), S),
}

EPSILON_OPS = frozenset({"eps", "termi"})
SEQUENCE_OPS = frozenset({"empty", "single", "concat", "genalt", "genseq", "genpar", "seqcond"})

BINDER_SORT = {"sum": Q, "prod": Q, "chc": P, "seqb": P, "parb": P, "conc": S}


@dataclass(frozen=True, slots=True)
class Op(Term):
    op: str
    args: tuple = ()

    @property
    def sort(self) -> Sort:
        return SIGNATURE[self.op][1]


@dataclass(frozen=True, slots=True)
class Act(Term):
    """Atomic action ``label`` (no args) or data-handling action ``label(args)``."""

    label: str
    args: tuple = ()

    sort = P


@dataclass(frozen=True, slots=True)
class Encap(Term):
    H: frozenset
    body: Term

    sort = P


@dataclass(frozen=True, slots=True)
class Binder(Term):
    kind: str
    n: int
    var: Var
    body: Term

    def __post_init__(self):
        if self.kind not in BINDER_SORT:
            raise TermError(f"unknown binder kind {self.kind!r}")
        if self.n < 1:
            raise TermError(f"binder range must be positive, got {self.n}")
        if self.var.pool != "U":
            raise TermError("binders bind quantity variables only")

    @property
    def sort(self) -> Sort:
        return BINDER_SORT[self.kind]


# -- constructors -------------------------------------------------------------

ZERO = Op("zero")
ONE = Op("one")
DELTA = Op("delta")
EPS = Op("eps")
EMPTY = Op("empty")


def add(p: Term, q: Term) -> Op:
    return Op("add", (p, q))


def mul(p: Term, q: Term) -> Op:
    return Op("mul", (p, q))


def neg(p: Term) -> Op:
    return Op("neg", (p,))


def minv(p: Term) -> Op:
    return Op("minv", (p,))


def sign(p: Term) -> Op:
    return Op("sign", (p,))


def sub(p: Term, q: Term) -> Op:
    return add(p, neg(q))


def div(p: Term, q: Term) -> Op:
    return mul(p, minv(q))


def power(p: Term, k: int) -> Term:
    """p^k with p^0 = 1 and p^(k+1) = p^k * p."""
    t: Term = ONE
    for _ in range(k):
        t = mul(t, p)
    return t


def alt(x: Term, y: Term) -> Op:
    return Op("alt", (x, y))


def seqc(x: Term, y: Term) -> Op:
    return Op("seq", (x, y))


def par(x: Term, y: Term) -> Op:
    return Op("par", (x, y))


def lmerge(x: Term, y: Term) -> Op:
    return Op("lmerge", (x, y))


def cmerge(x: Term, y: Term) -> Op:
    return Op("cmerge", (x, y))


def guard(p: Term, x: Term) -> Op:
    return Op("guard", (p, x))


def termi(x: Term) -> Op:
    return Op("termi", (x,))


def single(x: Term) -> Op:
    return Op("single", (x,))


def concat(s1: Term, s2: Term) -> Op:
    return Op("concat", (s1, s2))


def genalt(s: Term) -> Op:
    return Op("genalt", (s,))


def genseq(s: Term) -> Op:
    return Op("genseq", (s,))


def genpar(s: Term) -> Op:
    return Op("genpar", (s,))


def seqcond(s1: Term, r: Term, s2: Term) -> Op:
    return Op("seqcond", (s1, r, s2))


def act(label: str, *args: Term) -> Act:
    return Act(label, tuple(args))


def encap(H: Iterable[str], x: Term) -> Encap:
    return Encap(frozenset(H), x)


def binder(kind: str, n: int, var: Var, body: Term) -> Binder:
    return Binder(kind, n, var, body)


BINARY_FOLD = {"sum": "add", "prod": "mul", "chc": "alt", "seqb": "seq", "parb": "par", "conc": "concat"}


# -- traversal ----------------------------------------------------------------


def children(t: Term) -> tuple:
    if isinstance(t, Op) or isinstance(t, Act):
        return t.args
    if isinstance(t, (Encap, Binder)):
        return (t.body,)
    return ()


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(reversed(children(s)))


def sort_of(t: Term) -> Sort:
    """Sort of the head symbol (no validation of the subterms)."""
    return t.sort


def sort_check(t: Term) -> Sort:
    """Validate sort-correctness of every node and return the sort of ``t``."""
    if isinstance(t, Var):
        if t.pool not in POOLS:
            raise SortError(f"unknown variable pool {t.pool!r}", t)
        return t.sort
    if isinstance(t, Op):
        if t.op not in SIGNATURE:
            raise SortError(f"unknown operator {t.op!r}", t)
        arg_sorts, result = SIGNATURE[t.op]
        if len(t.args) != len(arg_sorts):
            raise SortError(f"{t.op} expects {len(arg_sorts)} arguments, got {len(t.args)}", t)
        for i, (a, want) in enumerate(zip(t.args, arg_sorts)):
            got = sort_check(a)
            if got is not want:
                raise SortError(f"argument {i + 1} of {t.op} has sort {got}, expected {want}", t)
        return result
    if isinstance(t, Act):
        for a in t.args:
            if sort_check(a) is not Q:
                raise SortError(f"arguments of action {t.label} must be quantities", t)
        return P
    if isinstance(t, Encap):
        if sort_check(t.body) is not P:
            raise SortError("encapsulation applies to processes", t)
        return P
    if isinstance(t, Binder):
        want = BINDER_SORT[t.kind]
        got = sort_check(t.body)
        if got is not want:
            raise SortError(f"body of {t.kind} binder has sort {got}, expected {want}", t)
        return want
    raise SortError(f"not a term: {t!r}")


def free_vars(t: Term) -> frozenset:
    out: set = set()
    _free(t, frozenset(), out)
    return frozenset(out)


def _free(t, bound, out):
    if isinstance(t, Var):
        if t not in bound:
            out.add(t)
    elif isinstance(t, Binder):
        _free(t.body, bound | {t.var}, out)
    else:
        for c in children(t):
            _free(c, bound, out)


def occurs_free(v: Var, t: Term) -> bool:
    return v in free_vars(t)


def all_vars(t: Term) -> set:
    """Every variable occurring in ``t``, free or bound (binder positions included)."""
    out = set()
    for s in subterms(t):
        if isinstance(s, Var):
            out.add(s)
        elif isinstance(s, Binder):
            out.add(s.var)
    return out


def free_occurrences(v: Var, t: Term) -> int:
    if isinstance(t, Var):
        return int(t == v)
    if isinstance(t, Binder) and t.var == v:
        return 0
    return sum(free_occurrences(v, c) for c in children(t))


def fresh_var(avoid: Iterable[Var], pool: str = "U") -> Var:
    """Lowest-index variable of ``pool`` not in ``avoid``."""
    used = {v.index for v in avoid if v.pool == pool}
    i = 0
    while i in used:
        i += 1
    return Var(pool, i)


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def has_binders(t: Term) -> bool:
    return any(isinstance(s, Binder) for s in subterms(t))


def _rebuild(t: Term, new_children: list) -> Term:
    if all(a is b for a, b in zip(new_children, children(t))):
        return t
    if isinstance(t, Op):
        return Op(t.op, tuple(new_children))
    if isinstance(t, Act):
        return Act(t.label, tuple(new_children))
    if isinstance(t, Encap):
        return Encap(t.H, new_children[0])
    if isinstance(t, Binder):
        return Binder(t.kind, t.n, t.var, new_children[0])
    raise TermError(f"cannot rebuild {t!r}")


# -- substitution -------------------------------------------------------------


def subst_quant(t: Term, replacement: Term, u: Var) -> Term:
    """``t[replacement/u]`` with renaming of binders that would capture.

    A binder ``Bnd v`` whose variable occurs free in the replacement is renamed
    to the lowest-index quantity variable occurring neither in the replacement,
    nor in its body, nor equal to ``u``.
    """
    if u.pool != "U":
        raise SortError(f"{u} is not a quantity variable", u)
    if sort_check(replacement) is not Q:
        raise SortError("replacement for a quantity variable must have sort Quant", replacement)
    return _subst_q(t, replacement, u, free_vars(replacement))


def _subst_q(t, r, u, fv_r):
    if isinstance(t, Var):
        return r if t == u else t
    if isinstance(t, Binder):
        v = t.var
        if v == u:
            return t
        if v in fv_r:
            w = fresh_var(all_vars(r) | all_vars(t.body) | {u})
            body = _subst_q(_subst_q(t.body, w, v, {w}), r, u, fv_r)
            return Binder(t.kind, t.n, w, body)
        body = _subst_q(t.body, r, u, fv_r)
        return t if body is t.body else Binder(t.kind, t.n, v, body)
    kids = children(t)
    if not kids:
        return t
    return _rebuild(t, [_subst_q(c, r, u, fv_r) for c in kids])


def subst_proc(t: Term, replacement: Term, x: Var, guarded: bool = False) -> Term:
    """``t[replacement/x]`` for a process variable, pushed under binders as is.

    With ``guarded=True`` an instantiation that would capture a quantity
    variable free in the replacement raises :class:`CaptureError` instead.
    """
    if x.pool not in ("X", "Xp"):
        raise SortError(f"{x} is not a process variable", x)
    if sort_check(replacement) is not P:
        raise SortError("replacement for a process variable must have sort Proc", replacement)
    return _subst_plain(t, replacement, x, free_vars(replacement) if guarded else None)


def subst_seq(t: Term, replacement: Term, alpha: Var, guarded: bool = False) -> Term:
    if alpha.pool != "V":
        raise SortError(f"{alpha} is not a sequence variable", alpha)
    if sort_check(replacement) is not S:
        raise SortError("replacement for a sequence variable must have sort ProcSeq", replacement)
    return _subst_plain(t, replacement, alpha, free_vars(replacement) if guarded else None)


def _subst_plain(t, r, x, fv_guard):
    if isinstance(t, Var):
        return r if t == x else t
    if isinstance(t, Binder) and fv_guard is not None and t.var in fv_guard and occurs_free(x, t.body):
        raise CaptureError(f"substituting for {x} under binder of {t.var} captures {t.var}")
    kids = children(t)
    if not kids:
        return t
    return _rebuild(t, [_subst_plain(c, r, x, fv_guard) for c in kids])


def subst(t: Term, replacement: Term, var: Var) -> Term:
    if var.pool == "U":
        return subst_quant(t, replacement, var)
    if var.pool == "V":
        return subst_seq(t, replacement, var)
    return subst_proc(t, replacement, var)


def subst_many(t: Term, mapping: dict) -> Term:
    """Apply several substitutions in sequence (order of ``mapping``)."""
    for var, repl in mapping.items():
        t = subst(t, repl, var)
    return t


# -- alpha-equivalence --------------------------------------------------------


def alpha_key(t: Term, env: dict | None = None) -> tuple:
    """A key that is equal for two terms exactly when they are alpha-equivalent."""
    return _akey(t, env or {}, 0)


def _akey(t, env, depth):
    if isinstance(t, Var):
        lvl = env.get(t)
        return ("b", lvl) if lvl is not None else ("f", t.pool, t.index)
    if isinstance(t, Binder):
        inner = dict(env)
        inner[t.var] = depth
        return ("B", t.kind, t.n, _akey(t.body, inner, depth + 1))
    if isinstance(t, Op):
        return (t.op,) + tuple(_akey(a, env, depth) for a in t.args)
    if isinstance(t, Act):
        return ("act", t.label) + tuple(_akey(a, env, depth) for a in t.args)
    if isinstance(t, Encap):
        return ("encap", tuple(sorted(t.H)), _akey(t.body, env, depth))
    raise TermError(f"not a term: {t!r}")


def alpha_eq(t1: Term, t2: Term) -> bool:
    return alpha_key(t1) == alpha_key(t2)


# -- size and numerals --------------------------------------------------------


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def tsize(t: Term) -> int:
    """1 per variable/constant, 1 per operator node, ceil(log2 n) + 1 per binder."""
    total = 0
    for s in subterms(t):
        total += ceil_log2(s.n) + 1 if isinstance(s, Binder) else 1
    return total


def unary_numeral(k: int) -> Term:
    """0, 0 + 1, (0 + 1) + 1, ..."""
    if k < 0:
        raise ValueError("numerals are for natural numbers")
    t: Term = ZERO
    for _ in range(k):
        t = add(t, ONE)
    return t


TWO = add(ONE, ONE)


def compact_numeral(k: int) -> Term:
    """A term equal to k of size O(log k), by Horner expansion over the bits of k."""
    if k < 0:
        raise ValueError("numerals are for natural numbers")
    if k == 0:
        return ZERO
    t: Term = ONE
    for bit in bin(k)[3:]:
        t = TWO if t == ONE else mul(TWO, t)
        if bit == "1":
            t = add(t, ONE)
    return t
