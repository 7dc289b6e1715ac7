"""Command-line interface: ``mdacp <command> [options]``.

Exit codes: 0 for success (or equal terms), 1 for unequal terms or a sweep
that found failures, 2 for usage, parse, sort or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from . import terms as T
from .eliminate import Strategy, binder_census, eliminate
from .experiments import FAMILIES, OracleFailure, rows_to_csv, run_growth
from .features import ExtensionError, FeatureSet
from .meadow import SAMPLE_POOL, MeadowError, MeadowModel, parse_model
from .semantics import EMPTY_GAMMA, CommTable, CommTableError, Normalizer, SemanticsError, coerce_value
from .soundness import GROUPS, SweepLimits, reports_to_csv, soundness_sweep
from .syntax import ParseError, parse, parse_file, print_term

log = logging.getLogger("mdacp")

DEFAULT_ALPHABET = ("a", "b", "c", "d")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    alphabet: tuple = DEFAULT_ALPHABET
    gamma_file: str | None = None
    meadow: str = "rational"
    features: FeatureSet = field(default_factory=lambda: FeatureSet.parse("epsilon,sequences"))
    seed: int = 1
    sample_pool: tuple = SAMPLE_POOL

    def model(self) -> MeadowModel:
        return parse_model(self.meadow)

    def gamma(self) -> CommTable:
        if not self.gamma_file:
            return EMPTY_GAMMA
        table = CommTable.load(self.gamma_file)
        # results of communication may be fresh labels; the operands must be declared
        stray = {a for a, b, _ in table.entries()} | {b for _, b, _ in table.entries()}
        stray -= set(self.alphabet)
        if stray:
            raise UsageError(f"communication table uses labels outside the alphabet: {', '.join(sorted(stray))}")
        return table

    def labels(self) -> set:
        return set(self.alphabet) | self.gamma().labels()


def _split_list(text: str) -> tuple:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def load_config(path: str | None) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    if not path:
        return {}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in ("alphabet", "gamma_file", "gamma", "meadow", "features", "seed", "sample_pool"):
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out["gamma_file" if key == "gamma" else key] = value
    return out


def build_config(args) -> Config:
    raw = load_config(args.config)
    for key, attr in (("alphabet", "alphabet"), ("gamma_file", "gamma"), ("meadow", "meadow"),
                      ("features", "features"), ("seed", "seed")):
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    cfg = Config()
    try:
        if "alphabet" in raw:
            cfg = replace(cfg, alphabet=_split_list(str(raw["alphabet"])))
        if "gamma_file" in raw:
            cfg = replace(cfg, gamma_file=str(raw["gamma_file"]))
        if "meadow" in raw:
            cfg = replace(cfg, meadow=str(raw["meadow"]))
        if "features" in raw:
            cfg = replace(cfg, features=FeatureSet.parse(str(raw["features"])))
        if "seed" in raw:
            cfg = replace(cfg, seed=int(raw["seed"]))
        if "sample_pool" in raw:
            cfg = replace(cfg, sample_pool=tuple(Fraction(s) for s in _split_list(str(raw["sample_pool"]))))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg.model()
    return cfg


def _read_term(path: str, cfg: Config):
    return parse_file(path, alphabet=cfg.labels(), features=cfg.features)


def _normalizer(cfg: Config) -> Normalizer:
    return Normalizer(cfg.gamma(), cfg.model(), cfg.features)


def _strategy(name: str) -> Strategy:
    return Strategy(name)


# -- commands ------------------------------------------------------------------------


def cmd_parse(args, cfg: Config, out) -> int:
    t = _read_term(args.file, cfg)
    print(f"sort: {T.sort_check(t).name.lower()}", file=out)
    print(f"tsize: {T.tsize(t)}", file=out)
    fv = sorted(T.free_vars(t))
    print(f"free: {', '.join(str(v) for v in fv) if fv else '-'}", file=out)
    census = binder_census(t)
    print("binders: " + (", ".join(f"{k}[{n}] x{c}" for (k, n), c in sorted(census.items())) or "-"), file=out)
    print(print_term(t), file=out)
    return 0


def cmd_eliminate(args, cfg: Config, out) -> int:
    t = _read_term(args.file, cfg)
    result = eliminate(t, _strategy(args.strategy), cfg.features)
    text = print_term(result) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


def cmd_normalize(args, cfg: Config, out) -> int:
    t = _read_term(args.file, cfg)
    if not T.is_closed(t):
        raise UsageError("normalize needs a closed term")
    value = _normalizer(cfg).denote(t, {})
    if isinstance(value, tuple):
        print("<" + ", ".join(str(x) for x in value) + ">", file=out)
    else:
        print(value, file=out)
    return 0


def cmd_equal(args, cfg: Config, out) -> int:
    t1, t2 = _read_term(args.file1, cfg), _read_term(args.file2, cfg)
    s1, s2 = T.sort_check(t1), T.sort_check(t2)
    if s1 is not s2:
        raise UsageError(f"terms have different sorts: {s1.name.lower()} and {s2.name.lower()}")
    if not (T.is_closed(t1) and T.is_closed(t2)):
        raise UsageError("equal compares closed terms")
    norm = _normalizer(cfg)
    same = norm.denote(t1, {}) == norm.denote(t2, {})
    print("equal" if same else "different", file=out)
    return 0 if same else 1


def _assignments(items, cfg: Config) -> dict:
    from .syntax import variable_for

    env = {}
    model = cfg.model()
    for item in items or ():
        for part in _split_list(item):
            if "=" not in part:
                raise UsageError(f"bad assignment {part!r}; expected name=value")
            name, value = (s.strip() for s in part.split("=", 1))
            var = variable_for(name)
            if var is None or var.pool != "U":
                raise UsageError(f"{name!r} is not a quantity variable")
            try:
                env[var] = coerce_value(model, Fraction(value))
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"bad value {value!r} for {name}") from None
    return env


def cmd_eval(args, cfg: Config, out) -> int:
    t = _read_term(args.file, cfg)
    env = _assignments(args.assign, cfg)
    missing = sorted(v for v in T.free_vars(t) if v not in env)
    if missing:
        raise UsageError(f"no value for {', '.join(str(v) for v in missing)}")
    value = _normalizer(cfg).denote(t, env)
    if isinstance(value, tuple):
        print("<" + ", ".join(str(x) for x in value) + ">", file=out)
    else:
        print(value, file=out)
    return 0


def cmd_soundness(args, cfg: Config, out) -> int:
    groups = GROUPS if args.group == "all" else _split_list(args.group)
    unknown = [g for g in groups if g not in GROUPS]
    if unknown:
        raise UsageError(f"unknown group(s): {', '.join(unknown)}")
    model = cfg.model()
    limits = SweepLimits(depth=args.depth, labels=tuple(cfg.alphabet))
    reports = []
    for g in groups:
        if g == "signum" and not model.signed:
            log.warning("skipping the signum group: %s has no signum", model.name)
            continue
        rep = soundness_sweep(g, args.trials, cfg.seed, cfg.gamma(), model, limits, jobs=args.jobs)
        if rep.probe:
            print(f"# cancellation probe in {model.name}: {rep.probe}", file=sys.stderr)
        reports.append(rep)
    text = reports_to_csv(reports)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0 if all(r.ok for r in reports) else 1


def cmd_sizes(args, cfg: Config, out) -> int:
    families = list(FAMILIES) if args.family == "all" else list(_split_list(args.family))
    for f in families:
        if f not in FAMILIES:
            raise UsageError(f"unknown family {f!r}")
    try:
        n_values = [int(s) for s in _split_list(args.n_list)]
    except ValueError:
        raise UsageError(f"bad --n-list {args.n_list!r}") from None
    if not n_values or min(n_values) < 1:
        raise UsageError("--n-list needs positive ranges")
    rows = run_growth(families, n_values, oracle_max_n=args.oracle_max_n)
    out.write(rows_to_csv(rows))
    return 0


# -- wiring ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file (flags override it)")
    common.add_argument("--features", help="comma list: epsilon, sequences, or none (default: both)")
    common.add_argument("--meadow", help="rational or zmod:<n> (default: rational)")
    common.add_argument("--gamma", help="communication table file with lines 'a | b -> c'")
    common.add_argument("--alphabet", help="comma list of action labels (default: a,b,c,d)")
    common.add_argument("--seed", type=int, help="random seed (default: 1)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="mdacp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("parse", "check"):
        s = sub.add_parser(name, parents=[common], help="parse and sort-check a term file")
        s.add_argument("file")
        s.set_defaults(func=cmd_parse)

    s = sub.add_parser("eliminate", parents=[common], help="eliminate binders")
    s.add_argument("file")
    s.add_argument("--strategy", choices=[s.value for s in Strategy], default="naive")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_eliminate)

    s = sub.add_parser("normalize", parents=[common], help="print the normal form of a closed term")
    s.add_argument("file")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("equal", parents=[common], help="exit 0 if two closed terms are equal, 1 if not")
    s.add_argument("file1")
    s.add_argument("file2")
    s.set_defaults(func=cmd_equal)

    s = sub.add_parser("eval", parents=[common], help="evaluate a term under an assignment")
    s.add_argument("file")
    s.add_argument("--assign", action="append", help="u=3/2,v=-1 (repeatable)")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("soundness", parents=[common], help="randomized axiom sweep, CSV output")
    s.add_argument("--group", default="all", help=f"comma list from {', '.join(GROUPS)}, or all")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--depth", type=int, default=4, help="depth of generated processes")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_soundness)

    s = sub.add_parser("sizes", parents=[common], help="term sizes per elimination strategy, CSV output")
    s.add_argument("--family", default="all", help=f"comma list from {', '.join(FAMILIES)}, or all")
    s.add_argument("--n-list", default="2,4,8,16,32,64")
    s.add_argument("--oracle-max-n", type=int, default=16, help="check meaning preservation up to this range")
    s.set_defaults(func=cmd_sizes)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        cfg = build_config(args)
        return args.func(args, cfg, out)
    except (UsageError, ParseError, T.TermError, MeadowError, CommTableError, ExtensionError,
            SemanticsError, OracleFailure, OSError) as exc:
        print(f"mdacp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
