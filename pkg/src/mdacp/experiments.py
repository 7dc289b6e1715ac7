"""Term-size growth under the elimination strategies.

Each family is a single comprehended term ``Bnd^n_u body`` with ``u`` free in
the body. For every range ``n`` the runner eliminates the binder with each
strategy and records the tsize of the input and of every output.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import terms as T
from .eliminate import Strategy, binder_census, eliminate
from .features import FULL
from .semantics import Normalizer
from .terms import Binder, Term

CSV_HEADER = ("family", "kind", "n", "k", "size_naive", "size_binary", "size_binary_eps", "size_sequences")

_U = T.U(0)

FAMILIES = {
    "sum": ("sum", lambda: T.add(_U, _U)),
    "prod": ("prod", lambda: T.add(_U, _U)),
    "chc": ("chc", lambda: T.act("a", _U)),
    "seq": ("seqb", lambda: T.act("a", _U)),
    "par": ("parb", lambda: T.act("a", _U)),
    "conc": ("conc", lambda: T.single(T.act("a", _U))),
}

ALL_STRATEGIES = (Strategy.NAIVE, Strategy.BINARY, Strategy.BINARY_EPS, Strategy.SEQUENCES)

_COLUMN = {
    Strategy.NAIVE: "size_naive",
    Strategy.BINARY: "size_binary",
    Strategy.BINARY_EPS: "size_binary_eps",
    Strategy.SEQUENCES: "size_sequences",
}


@dataclass(frozen=True)
class GrowthRow:
    family: str
    kind: str
    n: int
    k: int
    size_naive: int | None = None
    size_binary: int | None = None
    size_binary_eps: int | None = None
    size_sequences: int | None = None

    def as_tuple(self) -> tuple:
        return (self.family, self.kind, self.n, self.k, self.size_naive, self.size_binary,
                self.size_binary_eps, self.size_sequences)


class OracleFailure(AssertionError):
    pass


def family_term(family: str, n: int) -> Term:
    try:
        kind, body = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    return Binder(kind, n, _U, body())


def _applies(strategy: Strategy, kind: str) -> bool:
    # the sequence rewriting only concerns process binders and concatenation
    return strategy is not Strategy.SEQUENCES or kind not in ("sum", "prod")


def _check_postcondition(strategy: Strategy, out: Term, where: str):
    census = binder_census(out)
    if strategy is Strategy.NAIVE:
        ok = not census
    else:
        ok = all(n == 2 for (_, n) in census)
        if strategy is Strategy.SEQUENCES:
            ok = ok and not any(k in ("chc", "seqb", "parb") for (k, _) in census)
    if not ok:
        raise OracleFailure(f"{where}: binder census {dict(census)} violates the {strategy.value} postcondition")


def run_growth(families: Iterable[str], n_values: Sequence[int],
               strategies: Sequence[Strategy] = ALL_STRATEGIES, oracle_max_n: int = 16) -> list[GrowthRow]:
    """Rows ordered by (family, n). Outputs for ranges up to ``oracle_max_n`` are checked against the input."""
    rows = []
    for fam in families:
        for n in sorted(set(n_values)):
            t = family_term(fam, n)
            sizes = {}
            check = n <= oracle_max_n
            norm = Normalizer(features=FULL) if check else None
            want = norm.denote(t) if check else None
            for s in strategies:
                if not _applies(s, t.kind):
                    continue
                out = eliminate(t, s, FULL)
                _check_postcondition(s, out, f"{fam}[{n}]")
                if check and norm.denote(out) != want:
                    raise OracleFailure(f"{fam}[{n}]: {s.value} elimination changed the meaning")
                sizes[_COLUMN[s]] = T.tsize(out)
            rows.append(GrowthRow(fam, t.kind, n, T.tsize(t), **sizes))
    return rows


def rows_to_csv(rows: Iterable[GrowthRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(["" if v is None else v for v in r.as_tuple()])
    return buf.getvalue()


def fit_slope(rows: Sequence[GrowthRow], column: str) -> float:
    """Least-squares slope of log2(size) against log2(k) over the larger half of the grid (by k).

    Sizes are exact; the slope itself is an analysis figure in ordinary floating point.
    """
    pts = sorted((r.k, getattr(r, column)) for r in rows if getattr(r, column) is not None)
    if len(pts) < 2:
        raise ValueError("need at least two rows to fit a slope")
    pts = pts[len(pts) // 2:] if len(pts) >= 4 else pts
    xs = [math.log2(k) for k, _ in pts]
    ys = [math.log2(s) for _, s in pts]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("all rows have the same k")
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx


# -- full elimination size accounting ------------------------------------------------------


def unary_sizes(n: int) -> list[int]:
    """Sizes of the unary numerals for 0 .. n-1."""
    return [T.tsize(T.unary_numeral(i)) for i in range(n)]


def stated_naive_size(n: int, k1: int, k2: int, numeral_sizes: Sequence[int]) -> int:
    """``n*k' + sum_i k''*l_i + n - 1``, the size claimed for full elimination."""
    return n * k1 + sum(k2 * li for li in numeral_sizes) + n - 1


def exact_naive_size(n: int, k1: int, k2: int, numeral_sizes: Sequence[int]) -> int:
    """Size of the instantiated copies: each of the ``k''`` replaced leaves gives way to a numeral."""
    return n * (k1 - k2) + sum(k2 * li for li in numeral_sizes) + n - 1


def body_measures(t: Binder) -> tuple[int, int]:
    """``(k', k'')``: tsize of the body and the number of free occurrences of the bound variable."""
    return T.tsize(t.body), T.free_occurrences(t.var, t.body)


@dataclass(frozen=True)
class EnvelopeCheck:
    n: int
    k: int
    size: int
    lower: int
    upper_unit: int  # k^2 * 2^k

    @property
    def within_lower(self) -> bool:
        return self.size >= self.lower


def envelope(rows: Iterable[GrowthRow]) -> tuple[list[EnvelopeCheck], float]:
    """Lower bound ``k*2^(k-2)`` per row and the constant C fitted to ``size <= C*k^2*2^k``."""
    checks = [
        EnvelopeCheck(r.n, r.k, r.size_naive, r.k * 2 ** (r.k - 2), r.k ** 2 * 2 ** r.k)
        for r in rows if r.size_naive is not None
    ]
    c = max(ch.size / ch.upper_unit for ch in checks)
    return checks, c


__all__ = [
    "ALL_STRATEGIES", "CSV_HEADER", "FAMILIES", "GrowthRow", "OracleFailure", "body_measures",
    "envelope", "exact_naive_size", "family_term", "fit_slope", "rows_to_csv", "run_growth",
    "stated_naive_size", "unary_sizes",
]
