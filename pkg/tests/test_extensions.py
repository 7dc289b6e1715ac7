import random

import pytest

from mdacp import generators as G
from mdacp import terms as T
from mdacp.eliminate import Strategy, binder_census, cond_proc, eliminate_naive
from mdacp.extensions import BASE, EPSILON, FULL, ExtensionError, FeatureSet, conc_eliminate, gen_compose, termi_nf
from mdacp.semantics import CommTable, Normalizer
from mdacp.syntax import parse
from mdacp.terms import Binder

u = T.U(0)


@pytest.fixture
def norm():
    return Normalizer(features=FULL)


def d(norm, text):
    return norm.denote(parse(text))


def test_feature_set_invariant():
    with pytest.raises(ValueError):
        FeatureSet(epsilon=False, sequences=True)
    assert FeatureSet.parse("epsilon,sequences") == FULL
    assert FeatureSet.parse("none") == BASE
    assert str(EPSILON) == "epsilon"
    with pytest.raises(ValueError):
        FeatureSet.parse("quantity-sequences")


def test_termi_nf(norm):
    assert termi_nf(d(norm, "eps"), normalizer=norm).is_eps
    assert termi_nf(d(norm, "a"), normalizer=norm).is_delta
    assert termi_nf(d(norm, "a + eps"), normalizer=norm).is_eps
    with pytest.raises(ExtensionError):
        termi_nf(d(norm, "a"), BASE)


def test_gen_compose(norm):
    assert gen_compose("alt", [], normalizer=norm).is_delta
    assert gen_compose("seq", [], normalizer=norm).is_eps
    assert gen_compose("par", [], normalizer=norm).is_eps
    assert gen_compose("seq", [d(norm, "a"), d(norm, "b")], normalizer=norm) == d(norm, "a . b")
    assert gen_compose("par", [d(norm, "a")], normalizer=norm) == d(norm, "a")
    with pytest.raises(ExtensionError):
        gen_compose("alt", [], EPSILON)
    with pytest.raises(ValueError):
        gen_compose("merge", [], normalizer=norm)


def test_conc_eliminate():
    t = Binder("conc", 2, u, T.single(T.act("a", u)))
    assert conc_eliminate(t, Strategy.NAIVE) == T.concat(T.single(T.act("a", T.ZERO)), T.single(T.act("a", T.unary_numeral(1))))
    s = T.single(T.act("a", u))
    assert conc_eliminate(Binder("conc", 1, u, s), Strategy.NAIVE) == T.single(T.act("a", T.ZERO))
    out = conc_eliminate(Binder("conc", 5, u, s))
    assert set(binder_census(out)) == {("conc", 2)}
    norm = Normalizer()
    assert norm.denote(out) == norm.denote(eliminate_naive(Binder("conc", 5, u, s)))
    with pytest.raises(ExtensionError):
        conc_eliminate(t, features=EPSILON)
    with pytest.raises(ValueError):
        conc_eliminate(T.single(T.act("a")))


def _procs(seed, n, depth=4):
    rng = random.Random(seed)
    return [G.closed_proc(rng, G.GenConfig(depth=depth, max_parallel=1)) for _ in range(n)]


def test_epsilon_laws(norm):
    for p in _procs(21, 100):
        x = norm.denote(p)
        assert norm.seq(x, norm.eps) == x == norm.seq(norm.eps, x)
        assert norm.par(x, norm.eps) == x
        assert norm.alt(x, norm.termi(x)) == x


def test_termination_commutes(norm):
    ps = [norm.denote(p) for p in _procs(22, 40)]
    for x, y in zip(ps, ps[1:]):
        tx, ty = norm.termi(x), norm.termi(y)
        assert norm.seq(tx, ty) == norm.seq(ty, tx)


def test_prefix_laws_survive_with_epsilon():
    g = CommTable({("a", "b"): "c"})
    norm = Normalizer(g, features=EPSILON)
    for p in _procs(23, 40, depth=3):
        x = norm.denote(p)
        for head in ("a", "b"):
            act = norm.denote(T.act(head))
            assert norm.lmerge(act, x) == norm.seq(act, x)
        assert norm.cmerge(norm.denote(T.act("a")), norm.seq(norm.denote(T.act("b")), x)) == \
            norm.seq(norm.denote(T.act("c")), x)


def test_sequence_monoid(norm):
    rng = random.Random(24)
    for _ in range(50):
        s1, s2, s3 = (G.closed_seq(rng, G.GenConfig(depth=2)) for _ in range(3))
        left = norm.denote(T.concat(T.concat(s1, s2), s3))
        assert left == norm.denote(T.concat(s1, T.concat(s2, s3)))
        assert norm.denote(T.concat(s1, T.EMPTY)) == norm.denote(s1) == norm.denote(T.concat(T.EMPTY, s1))


@pytest.mark.parametrize("n", range(1, 17))
def test_epsilon_padding_equivalence(norm, n):
    rng = random.Random(n)
    body = G.proc_body(rng, u, G.GenConfig(depth=3, max_parallel=0), 3)
    m = T.ceil_log2(n)
    guard = T.sub(T.ONE, T.sign(T.sub(u, T.unary_numeral(n - 1))))
    padded = Binder("seqb", 2 ** m, u, cond_proc(T.EPS, guard, body))
    assert norm.denote(Binder("seqb", n, u, body)) == norm.denote(padded)
