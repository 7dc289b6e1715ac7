import io

import pytest

from mdacp.cli import build_config, build_parser, load_config, main
from mdacp.syntax import parse, parse_file


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    def make(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return make


def test_eliminate_then_eval(files, tmp_path):
    src = files("sum7.term", "# worked example\nsum[7] u . u * u\n")
    dst = str(tmp_path / "out.term")
    assert run("eliminate", "--strategy", "naive", src, "-o", dst) == (0, "")
    assert "sum" not in open(dst).read()
    assert run("eval", dst) == (0, "91\n")


@pytest.mark.parametrize("strategy", ["naive", "binary", "binary_eps", "sequences"])
def test_eliminate_output_reparses(files, strategy):
    src = files("t.term", "chc[5] u . seqc[3] v . a(u, v) + b")
    code, text = run("eliminate", "--strategy", strategy, src)
    assert code == 0
    out = files("o.term", text)
    assert parse_file(out)
    assert run("equal", src, out)[0] == 0


def test_equal_exit_codes(files):
    one, two = files("a1.term", "(a . b) . c"), files("a2.term", "a . (b . c)")
    assert run("equal", one, two) == (0, "equal\n")
    assert run("equal", one, files("b.term", "a . b"))[0] == 1
    assert run("equal", one, files("q.term", "1"))[0] == 2


def test_parse_report(files):
    code, text = run("parse", files("t.term", "sum[3] u . u * v"))
    assert code == 0
    assert text.splitlines()[:4] == ["sort: quant", "tsize: 6", "free: v", "binders: sum[3] x1"]
    assert run("check", files("t2.term", "a +"))[0] == 2


def test_normalize(files):
    assert run("normalize", files("p.term", "a || b"), "--gamma", files("g", "a | b -> c")) == \
        (0, "a . b + b . a + c\n")
    assert run("normalize", files("s.term", "conc[2] u . <a(u)>")) == (0, "<a(0), a(1)>\n")
    assert run("normalize", files("o.term", "a(u)"))[0] == 2


def test_eval_assignments(files):
    q = files("q.term", "u * v + w")
    assert run("eval", q, "--assign", "u=3/2,v=2", "--assign", "w=-1") == (0, "2\n")
    assert run("eval", q, "--assign", "u=1")[0] == 2
    assert run("eval", q, "--assign", "x=1,u=1,v=1,w=1")[0] == 2
    assert run("eval", files("z.term", "inv(1 + 1)"), "--meadow", "zmod:5") == (0, "3\n")


def test_soundness_csv(files):
    code, text = run("soundness", "--group", "meadow,signum", "--trials", "30")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "group,axiom_id,trials,failures,first_counterexample"
    assert len(lines) == 17 and all(ln.endswith(",30,0,") for ln in lines[1:])
    assert run("soundness", "--group", "meadow,signum", "--trials", "30")[1] == text
    assert run("soundness", "--group", "nope")[0] == 2


def test_soundness_compr_thousand_trials():
    code, text = run("soundness", "--group", "compr", "--trials", "1000")
    assert code == 0
    assert all(ln.split(",")[3] == "0" for ln in text.splitlines()[1:])


def test_soundness_skips_signum_on_finite_models():
    code, text = run("soundness", "--group", "signum", "--meadow", "zmod:6")
    assert code == 0 and text.splitlines() == ["group,axiom_id,trials,failures,first_counterexample"]


def test_sizes(files):
    code, text = run("sizes", "--family", "sum,seq", "--n-list", "2,5")
    assert code == 0
    assert text.splitlines()[0] == "family,kind,n,k,size_naive,size_binary,size_binary_eps,size_sequences"
    assert len(text.splitlines()) == 5
    assert run("sizes", "--family", "loop")[0] == 2
    assert run("sizes", "--n-list", "0")[0] == 2


def test_config_file_and_overrides(files):
    cfg = files("mdacp.conf", "# settings\nalphabet = a, b\nmeadow = zmod:5\nseed = 9\nfeatures = epsilon\n")
    assert load_config(cfg)["alphabet"] == "a, b"
    args = build_parser().parse_args(["parse", "x.term", "--config", cfg, "--seed", "4"])
    c = build_config(args)
    assert c.alphabet == ("a", "b") and c.meadow == "zmod:5" and c.seed == 4
    assert not c.features.sequences
    assert run("parse", files("t.term", "c"), "--config", cfg)[0] == 2
    assert run("parse", files("t.term", "a"), "--config", files("bad.conf", "colour = red"))[0] == 2


def test_gamma_labels_must_be_declared(files):
    g = files("g", "a | e -> c\n")
    assert run("normalize", files("p.term", "a"), "--gamma", g)[0] == 2
    assert run("normalize", files("p.term", "a"), "--gamma", g, "--alphabet", "a,e")[0] == 0
    assert run("normalize", files("p.term", "a"), "--gamma", files("bad", "a | a -> b\na | b -> a"))[0] == 2


def test_feature_flags(files):
    t = files("e.term", "a . eps")
    assert run("parse", t, "--features", "none")[0] == 2
    assert run("parse", t, "--features", "epsilon")[0] == 0
    assert run("parse", t, "--features", "sequences")[0] == 2
    assert run("eliminate", "--strategy", "binary_eps", files("s.term", "seqc[3] u . a(u)"), "--features", "none")[0] == 2


def test_usage_errors():
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("parse", "/nonexistent/file.term")[0] == 2
    assert run("--help")[0] == 0
