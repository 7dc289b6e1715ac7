import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdacp import generators as G
from mdacp import terms as T
from mdacp.features import BASE, EPSILON
from mdacp.syntax import ParseError, parse, parse_file, print_term
from mdacp.terms import Binder, Sort

CORPUS = sorted((Path(__file__).parent / "corpus").glob("*.term"))
u = T.U(0)


def test_spec_parse_examples():
    assert parse("sum[7] u . u*u") == Binder("sum", 7, u, T.mul(u, u))
    assert parse("[u] -> a(u) + delta") == T.alt(T.guard(u, T.act("a", u)), T.DELTA)
    assert parse("Seq(<a> ++ <b>)") == T.genseq(T.concat(T.single(T.act("a")), T.single(T.act("b"))))


def test_precedence():
    a, b, c = T.act("a"), T.act("b"), T.act("c")
    assert parse("a + b . c") == T.alt(a, T.seqc(b, c))
    assert print_term(T.alt(T.seqc(a, b), c)) == "a . b + c"
    assert print_term(T.seqc(a, T.alt(b, c))) == "a . (b + c)"
    assert print_term(T.guard(T.ONE, T.DELTA)) == "[1] -> delta"
    assert parse("a || b . c") == T.par(a, T.seqc(b, c))
    assert parse("u + v * w") == T.add(u, T.mul(T.U(1), T.U(2)))


def test_binder_body_extends_right():
    assert parse("chc[2] u . a(u) + b") == Binder("chc", 2, u, T.alt(T.act("a", u), T.act("b")))
    assert parse("(chc[2] u . a(u)) + b") == T.alt(Binder("chc", 2, u, T.act("a", u)), T.act("b"))


def test_numeral_sugar():
    assert parse("num(3)") == T.unary_numeral(3)
    assert parse("cnum(6)") == T.compact_numeral(6)
    with pytest.raises(ParseError):
        parse("a(3)")


def test_cond_sugar():
    from mdacp.eliminate import cond_proc, cond_quant

    assert parse("cond(1, u, 0)") == cond_quant(T.ONE, u, T.ZERO)
    assert parse("cond(a, u, b)") == cond_proc(T.act("a"), u, T.act("b"))
    assert parse("cond(<a>, u, <>)") == T.seqcond(T.single(T.act("a")), u, T.EMPTY)


@pytest.mark.parametrize("text,fragment", [
    ("a +", "end of input"),
    ("a + + b", "1:5"),
    ("sum[0] u . u", "range"),
    ("sum[2] x . a", "quantity variable"),
    ("delta + 1", "sort"),
    ("[a] -> b", "sort"),
    ("e + a", "unknown action label"),
    ("?a + b", "schema"),
    ("u )", "1:3"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse(text, alphabet={"a", "b", "c", "d"})
    assert fragment in str(err.value)


def test_feature_gating():
    with pytest.raises(ParseError):
        parse("a . eps", features=BASE)
    with pytest.raises(ParseError):
        parse("term(a)", features=BASE)
    with pytest.raises(ParseError):
        parse("Alt(<a>)", features=EPSILON)
    assert parse("a . eps", features=EPSILON) == T.seqc(T.act("a"), T.EPS)


def test_schema_variables():
    t = parse("?a | ?b", schema=True)
    assert t == T.cmerge(T.XP(0), T.XP(1))
    assert print_term(t) == "?a | ?b"


def test_comments_and_whitespace():
    assert parse("# header\n a   .\n b # trailing\n") == T.seqc(T.act("a"), T.act("b"))


def test_corpus_size():
    assert len(CORPUS) == 50


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_print_parse_identity(path):
    text = [ln for ln in path.read_text(encoding="utf-8").splitlines() if not ln.startswith("#")][0]
    assert print_term(parse_file(path)) == text


def _random_term(seed):
    rng = random.Random(seed)
    depth = rng.randint(1, 8)
    cfg = G.GenConfig(depth=depth)
    pick = rng.randrange(4)
    if pick == 0:
        return G.closed_quant(rng, min(depth, 5))
    if pick == 1:
        return G.closed_proc(rng, cfg)
    if pick == 2:
        return G.closed_seq(rng, G.GenConfig(depth=min(depth, 4)))
    return G.comprehended(rng, G.ComprConfig(max_range=8))


qvars = st.sampled_from([T.U(0), T.U(1), T.U(2), T.U(7)])
quants = st.recursive(
    st.one_of(qvars, st.just(T.ZERO), st.just(T.ONE)),
    lambda q: st.one_of(
        st.builds(T.add, q, q), st.builds(T.mul, q, q), st.builds(T.neg, q),
        st.builds(T.minv, q), st.builds(T.sign, q),
        st.builds(lambda n, b: Binder("sum", n, T.U(0), b), st.integers(1, 9), q),
        st.builds(lambda n, b: Binder("prod", n, T.U(1), b), st.integers(1, 9), q),
    ),
    max_leaves=12,
)
labels = st.sampled_from("abcd")
atoms = st.one_of(
    st.just(T.DELTA), st.just(T.EPS), st.sampled_from([T.X(0), T.X(1)]), st.builds(T.act, labels),
    st.builds(lambda a, args: T.act(a, *args), labels, st.lists(quants, min_size=1, max_size=2)),
)


procs = st.deferred(lambda: st.one_of(
    atoms, atoms, atoms,
    *(st.builds(f, procs, procs) for f in (T.alt, T.seqc, T.par, T.lmerge, T.cmerge)),
    st.builds(T.guard, quants, procs), st.builds(T.termi, procs),
    st.builds(T.encap, st.sets(labels, min_size=1), procs),
    st.builds(T.genalt, seqs), st.builds(T.genseq, seqs), st.builds(T.genpar, seqs),
    *(st.builds(lambda n, b, k=k: Binder(k, n, T.U(0), b), st.integers(1, 9), procs)
      for k in ("chc", "seqb", "parb")),
))
seqs = st.deferred(lambda: st.one_of(
    st.just(T.EMPTY), st.just(T.SV(0)), st.builds(T.single, procs), st.builds(T.single, procs),
    st.builds(T.concat, seqs, seqs),
    st.builds(lambda n, b: Binder("conc", n, T.U(2), b), st.integers(1, 9), seqs),
))


@settings(max_examples=300, deadline=None)
@given(st.one_of(quants, procs, seqs))
def test_round_trip_structured(t):
    text = print_term(t)
    back = parse(text)
    assert back == t
    assert print_term(back) == text


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_round_trip(seed):
    t = _random_term(seed)
    text = print_term(t)
    back = parse(text)
    assert T.alpha_eq(back, t)
    assert print_term(back) == text


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_round_trip_of_alpha_variants(seed):
    t = G.alpha_variant(_random_term(seed), offset=10)
    assert T.alpha_eq(parse(print_term(t)), t)


def test_variable_names():
    assert print_term(T.add(T.U(3), T.U(12))) == "u3 + u12"
    assert parse("u3 + alpha4 ++ <>".replace("u3 + ", "")) == T.concat(T.SV(4), T.EMPTY)
    assert T.sort_check(parse("x || y")) is Sort.PROC
