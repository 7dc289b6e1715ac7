"""Concrete syntax for binding terms.

Grammar summary, loosest binding first::

    binders      sum[n] u . p   prod[n] u . p   chc[n] u . P   seqc[n] u . P
                 parc[n] u . P  conc[n] u . S        (body extends to the right)
    + -          addition / alternative composition, subtraction (left assoc)
    ++           sequence concatenation
    [p] -> P     guarded command (prefix)
    || |_ |      merge, left merge, communication merge (left assoc)
    . * /        sequential composition, multiplication, division (left assoc)
    -p           additive inverse

Primaries: ``0 1 u v w u<i> x y z x<i> alpha beta gamma alpha<i> delta eps
inv(p) sign(p) num(k) cnum(k) term(P) encap{a,b}(P) a a(p,...) <> <P>
Alt(S) Seq(S) Par(S) cond(X, p, Y)``. ``num``/``cnum`` expand to unary and
compact numerals; ``cond`` expands to the quantity or process conditional and
denotes the guarded sequence choice on sort ProcSeq.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from . import terms as T
from .eliminate import cond_proc, cond_quant
from .features import FULL, FeatureSet
from .terms import Act, Binder, Encap, Op, Sort, Term, Var


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0, origin: str = "<input>"):
        super().__init__(f"{origin}:{line}:{col}: {message}")
        self.line, self.col, self.origin = line, col, origin


BINDER_KEYWORDS = {"sum": "sum", "prod": "prod", "chc": "chc", "seqc": "seqb", "parc": "parb", "conc": "conc"}
BINDER_NAMES = {v: k for k, v in BINDER_KEYWORDS.items()}
GEN_OPS = {"Alt": "genalt", "Seq": "genseq", "Par": "genpar"}
KEYWORDS = frozenset(
    {"delta", "eps", "inv", "sign", "num", "cnum", "term", "encap", "cond"}
    | set(BINDER_KEYWORDS) | set(GEN_OPS)
)

_VAR_RE = re.compile(r"^(?:(u|v|w|x|y|z|alpha|beta|gamma)|(u|x|alpha)(\d+))$")
_ALIAS = {"u": ("U", 0), "v": ("U", 1), "w": ("U", 2), "x": ("X", 0), "y": ("X", 1),
          "z": ("X", 2), "alpha": ("V", 0), "beta": ("V", 1), "gamma": ("V", 2)}
_PREFIX_POOL = {"u": "U", "x": "X", "alpha": "V"}

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<comment>\#[^\n]*)|(?P<int>\d+)|(?P<schema>\?[A-Za-z]\w*)"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<sym>\|\||\|_|->|\+\+|<>|[|+\-*/.()\[\]{},<>])"
)


def variable_for(name: str) -> Var | None:
    m = _VAR_RE.match(name)
    if not m:
        return None
    if m.group(1):
        return Var(*_ALIAS[m.group(1)])
    return Var(_PREFIX_POOL[m.group(2)], int(m.group(3)))


def is_reserved(name: str) -> bool:
    return name in KEYWORDS or variable_for(name) is not None


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, origin: str = "<input>") -> list[Token]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, origin)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text, alphabet, features, schema, origin):
        self.toks = tokenize(text, origin)
        self.i = 0
        self.alphabet = None if alphabet is None else frozenset(alphabet)
        self.features = features
        self.schema = schema
        self.origin = origin

    # -- helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col, self.origin)

    def at(self, text) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def take(self, text=None, kind=None) -> Token:
        tok = self.tok
        if text is not None and not self.at(text):
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        if kind is not None and tok.kind != kind:
            raise self.error(f"expected {kind}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def need(self, flag: str, what: str, tok: Token):
        if not getattr(self.features, flag):
            raise self.error(f"{what} requires the {flag} feature", tok)

    def sort_of(self, t: Term, tok: Token) -> Sort:
        try:
            return T.sort_check(t)
        except T.SortError as e:
            raise self.error(str(e), tok) from None

    def expect_sort(self, t: Term, want: Sort, tok: Token, what: str) -> Term:
        got = self.sort_of(t, tok)
        if got is not want:
            raise self.error(f"{what} must have sort {want}, found {got}", tok)
        return t

    # -- grammar
    def parse(self) -> Term:
        t = self.expr()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return t

    def expr(self) -> Term:
        if self.tok.kind == "ident" and self.tok.text in BINDER_KEYWORDS and self.toks[self.i + 1].text == "[":
            return self.binder()
        return self.plus()

    def binder(self) -> Term:
        kw = self.take()
        kind = BINDER_KEYWORDS[kw.text]
        if kind == "conc":
            self.need("sequences", "conc", kw)
        self.take("[")
        n_tok = self.take(kind="int")
        n = int(n_tok.text)
        if n < 1:
            raise self.error("binder range must be positive", n_tok)
        self.take("]")
        v_tok = self.take(kind="ident")
        var = variable_for(v_tok.text)
        if var is None or var.pool != "U":
            raise self.error(f"binders bind quantity variables, not {v_tok.text!r}", v_tok)
        self.take(".")
        body = self.expr()
        self.expect_sort(body, T.BINDER_SORT[kind], kw, f"body of {kw.text}")
        return Binder(kind, n, var, body)

    def plus(self) -> Term:
        left = self.concat()
        while self.at("+") or self.at("-"):
            op = self.take()
            right = self.concat()
            ls, rs = self.sort_of(left, op), self.sort_of(right, op)
            if ls is not rs:
                raise self.error(f"operands of {op.text!r} have sorts {ls} and {rs}", op)
            if op.text == "-":
                if ls is not Sort.QUANT:
                    raise self.error("subtraction applies to quantities", op)
                left = T.sub(left, right)
            elif ls is Sort.QUANT:
                left = T.add(left, right)
            elif ls is Sort.PROC:
                left = T.alt(left, right)
            else:
                raise self.error("'+' is not defined on process sequences (use '++')", op)
        return left

    def concat(self) -> Term:
        left = self.guard()
        while self.at("++"):
            op = self.take()
            self.need("sequences", "'++'", op)
            right = self.guard()
            self.expect_sort(left, Sort.SEQ, op, "left operand of '++'")
            self.expect_sort(right, Sort.SEQ, op, "right operand of '++'")
            left = T.concat(left, right)
        return left

    def guard(self) -> Term:
        if self.at("["):
            tok = self.take("[")
            cond = self.expr()
            self.take("]")
            self.take("->")
            body = self.guard()
            self.expect_sort(cond, Sort.QUANT, tok, "guard")
            self.expect_sort(body, Sort.PROC, tok, "guarded process")
            return T.guard(cond, body)
        return self.merge()

    _MERGES = {"||": "par", "|_": "lmerge", "|": "cmerge"}

    def merge(self) -> Term:
        left = self.dot()
        while self.tok.kind == "sym" and self.tok.text in self._MERGES:
            op = self.take()
            right = self.dot()
            self.expect_sort(left, Sort.PROC, op, f"left operand of {op.text!r}")
            self.expect_sort(right, Sort.PROC, op, f"right operand of {op.text!r}")
            left = Op(self._MERGES[op.text], (left, right))
        return left

    def dot(self) -> Term:
        left = self.unary()
        while self.at(".") or self.at("*") or self.at("/"):
            op = self.take()
            right = self.unary()
            want = Sort.PROC if op.text == "." else Sort.QUANT
            self.expect_sort(left, want, op, f"left operand of {op.text!r}")
            self.expect_sort(right, want, op, f"right operand of {op.text!r}")
            if op.text == ".":
                left = T.seqc(left, right)
            elif op.text == "*":
                left = T.mul(left, right)
            else:
                left = T.div(left, right)
        return left

    def unary(self) -> Term:
        if self.at("-"):
            op = self.take()
            arg = self.unary()
            return T.neg(self.expect_sort(arg, Sort.QUANT, op, "operand of unary '-'"))
        return self.primary()

    def args(self) -> list[Term]:
        self.take("(")
        out = []
        if not self.at(")"):
            out.append(self.expr())
            while self.at(","):
                self.take(",")
                out.append(self.expr())
        self.take(")")
        return out

    def one_arg(self, tok, want, what) -> Term:
        args = self.args()
        if len(args) != 1:
            raise self.error(f"{what} takes one argument", tok)
        return self.expect_sort(args[0], want, tok, f"argument of {what}")

    def natural_arg(self) -> int:
        self.take("(")
        k = int(self.take(kind="int").text)
        self.take(")")
        return k

    def primary(self) -> Term:
        tok = self.tok
        if tok.kind == "eof":
            raise self.error("unexpected end of input")
        if tok.kind == "int":
            self.take()
            if tok.text == "0":
                return T.ZERO
            if tok.text == "1":
                return T.ONE
            raise self.error(f"numeral {tok.text} must be written num({tok.text}) or cnum({tok.text})", tok)
        if tok.kind == "schema":
            if not self.schema:
                raise self.error("schema variables are not allowed in terms", tok)
            self.take()
            name = tok.text[1:]
            idx = "abc".find(name) if len(name) == 1 else -1
            if idx < 0:
                m = re.fullmatch(r"a(\d+)", name)
                if not m:
                    raise self.error(f"bad schema variable {tok.text!r}", tok)
                idx = int(m.group(1))
            return Var("Xp", idx)
        if tok.kind == "sym":
            if tok.text == "(":
                self.take()
                t = self.expr()
                self.take(")")
                return t
            if tok.text == "<>":
                self.take()
                self.need("sequences", "'<>'", tok)
                return T.EMPTY
            if tok.text == "<":
                self.take()
                self.need("sequences", "'<P>'", tok)
                body = self.expr()
                self.take(">")
                return T.single(self.expect_sort(body, Sort.PROC, tok, "element of a sequence"))
            raise self.error(f"unexpected {tok.text!r}", tok)
        # identifiers
        name = tok.text
        if name in BINDER_KEYWORDS and self.toks[self.i + 1].text == "[":
            return self.binder()
        var = variable_for(name)
        if var is not None:
            self.take()
            if var.pool == "V":
                self.need("sequences", "sequence variables", tok)
            return var
        self.take()
        if name == "delta":
            return T.DELTA
        if name == "eps":
            self.need("epsilon", "eps", tok)
            return T.EPS
        if name == "inv":
            return T.minv(self.one_arg(tok, Sort.QUANT, "inv"))
        if name == "sign":
            return T.sign(self.one_arg(tok, Sort.QUANT, "sign"))
        if name == "num":
            return T.unary_numeral(self.natural_arg())
        if name == "cnum":
            return T.compact_numeral(self.natural_arg())
        if name == "term":
            self.need("epsilon", "term", tok)
            return T.termi(self.one_arg(tok, Sort.PROC, "term"))
        if name in GEN_OPS:
            self.need("sequences", name, tok)
            return Op(GEN_OPS[name], (self.one_arg(tok, Sort.SEQ, name),))
        if name == "encap":
            self.take("{")
            labels = []
            if not self.at("}"):
                labels.append(self.label(self.take(kind="ident")))
                while self.at(","):
                    self.take(",")
                    labels.append(self.label(self.take(kind="ident")))
            self.take("}")
            return T.encap(labels, self.one_arg(tok, Sort.PROC, "encap"))
        if name == "cond":
            args = self.args()
            if len(args) != 3:
                raise self.error("cond takes three arguments", tok)
            then, r, other = args
            self.expect_sort(r, Sort.QUANT, tok, "condition of cond")
            s = self.sort_of(then, tok)
            self.expect_sort(other, s, tok, "third argument of cond")
            if s is Sort.QUANT:
                return cond_quant(then, r, other)
            if s is Sort.PROC:
                return cond_proc(then, r, other)
            self.need("sequences", "cond on sequences", tok)
            return T.seqcond(then, r, other)
        if name in KEYWORDS:
            raise self.error(f"misplaced keyword {name!r}", tok)
        label = self.label(tok)
        if self.at("("):
            args = self.args()
            for a in args:
                self.expect_sort(a, Sort.QUANT, tok, f"argument of {label}")
            return Act(label, tuple(args))
        return Act(label)

    def label(self, tok: Token) -> str:
        if is_reserved(tok.text):
            raise self.error(f"{tok.text!r} is reserved and cannot name an action", tok)
        if self.alphabet is not None and tok.text not in self.alphabet:
            raise self.error(f"unknown action label {tok.text!r}", tok)
        return tok.text


def parse(text: str, alphabet: Iterable[str] | None = None, features: FeatureSet = FULL,
          schema: bool = False, origin: str = "<input>") -> Term:
    """Parse and sort-check a term.

    ``alphabet=None`` accepts any non-reserved action label. ``schema=True``
    admits the ``?a ?b ?c`` variables used in axiom schemas.
    """
    return _Parser(text, alphabet, features, schema, origin).parse()


def parse_file(path, alphabet=None, features: FeatureSet = FULL) -> Term:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), alphabet, features, origin=str(path))


# -- printing -----------------------------------------------------------------

_BIN = {
    "add": ("+", 1), "alt": ("+", 1), "concat": ("++", 2),
    "par": ("||", 4), "lmerge": ("|_", 4), "cmerge": ("|", 4),
    "seq": (".", 5), "mul": ("*", 5),
}
_CALL = {"minv": "inv", "sign": "sign", "termi": "term", "genalt": "Alt", "genseq": "Seq", "genpar": "Par"}
_CONST = {"zero": "0", "one": "1", "delta": "delta", "eps": "eps", "empty": "<>"}


def _prec(t: Term) -> int:
    if isinstance(t, Binder):
        return 0
    if isinstance(t, Op):
        if t.op in _BIN:
            return _BIN[t.op][1]
        if t.op == "guard":
            return 3
        if t.op == "neg":
            return 6
    return 7


def print_term(t: Term) -> str:
    """Canonical text; ``parse(print_term(t))`` is alpha-equal to ``t``."""
    return _show(t, 0)


def _show(t: Term, minp: int) -> str:
    s = _render(t)
    return f"({s})" if _prec(t) < minp else s


def _render(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Binder):
        return f"{BINDER_NAMES[t.kind]}[{t.n}] {t.var.name} . {_show(t.body, 0)}"
    if isinstance(t, Act):
        if not t.args:
            return t.label
        return f"{t.label}({', '.join(_show(a, 0) for a in t.args)})"
    if isinstance(t, Encap):
        return f"encap{{{','.join(sorted(t.H))}}}({_show(t.body, 0)})"
    op = t.op
    if op in _CONST:
        return _CONST[op]
    if op in _BIN:
        sym, p = _BIN[op]
        return f"{_show(t.args[0], p)} {sym} {_show(t.args[1], p + 1)}"
    if op == "neg":
        return "-" + _show(t.args[0], 6)
    if op == "guard":
        return f"[{_show(t.args[0], 0)}] -> {_show(t.args[1], 3)}"
    if op in _CALL:
        return f"{_CALL[op]}({_show(t.args[0], 0)})"
    if op == "single":
        return f"<{_show(t.args[0], 0)}>"
    if op == "seqcond":
        return "cond(" + ", ".join(_show(a, 0) for a in t.args) + ")"
    raise ValueError(f"cannot print {t!r}")
