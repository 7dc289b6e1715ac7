"""Concrete meadow models.

Two carriers are provided: the signed cancellation meadow of rationals
(exact :class:`fractions.Fraction` arithmetic, ``0⁻¹ = 0``) and the finite
meadows Z/n for squarefree n, whose zero-totalized inverse is computed
componentwise over the prime factors.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, Union


class MeadowError(Exception):
    """Base class for meadow model errors."""


class ModelMismatch(MeadowError):
    """Operands belong to different meadow models."""


class UnsignedModelError(MeadowError):
    """The signum operation was requested on a model without one."""


@dataclass(frozen=True, slots=True)
class Residue:
    """An element of Z/modulus."""

    modulus: int
    residue: int

    def __post_init__(self):
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def __str__(self) -> str:
        return str(self.residue)


MeadowValue = Union[Fraction, Residue]


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class MeadowModel:
    """Common interface for the concrete models."""

    signed: bool = False
    name: str = ""

    def from_int(self, k: int) -> MeadowValue:
        raise NotImplementedError

    @property
    def zero(self) -> MeadowValue:
        return self.from_int(0)

    @property
    def one(self) -> MeadowValue:
        return self.from_int(1)

    def contains(self, a) -> bool:
        raise NotImplementedError

    def add(self, a, b):
        return add(self._own(a), self._own(b))

    def mul(self, a, b):
        return mul(self._own(a), self._own(b))

    def neg(self, a):
        return neg(self._own(a))

    def minv(self, a):
        return minv(self._own(a))

    def sign(self, a):
        if not self.signed:
            raise UnsignedModelError(f"model {self.name} has no signum operation")
        return sign(self._own(a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.minv(b))

    def _own(self, a):
        if not self.contains(a):
            raise ModelMismatch(f"{a!r} is not an element of {self.name}")
        return a

    def __repr__(self) -> str:
        return f"<meadow {self.name}>"


class RationalMeadow(MeadowModel):
    signed = True
    name = "rational"

    def from_int(self, k: int) -> Fraction:
        return Fraction(k)

    def contains(self, a) -> bool:
        return isinstance(a, Fraction)

    def __eq__(self, other):
        return isinstance(other, RationalMeadow)

    def __hash__(self):
        return hash("rational")


class ZMod(MeadowModel):
    """The finite meadow Z/n; n must be squarefree."""

    signed = False

    def __init__(self, modulus: int):
        if modulus < 1:
            raise MeadowError(f"modulus must be positive, got {modulus}")
        factors = _prime_factors(modulus)
        if len(set(factors)) != len(factors):
            raise MeadowError(f"Z/{modulus} is not a meadow: modulus is not squarefree")
        self.modulus = modulus
        self.primes = tuple(factors)
        self.name = f"zmod:{modulus}"

    def from_int(self, k: int) -> Residue:
        return Residue(self.modulus, k % self.modulus)

    def contains(self, a) -> bool:
        return isinstance(a, Residue) and a.modulus == self.modulus

    def elements(self) -> list[Residue]:
        return [Residue(self.modulus, r) for r in range(self.modulus)]

    def __eq__(self, other):
        return isinstance(other, ZMod) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("zmod", self.modulus))


RATIONAL = RationalMeadow()


def parse_model(text: str) -> MeadowModel:
    """Parse a model selector: ``rational`` or ``zmod:<n>``."""
    text = text.strip()
    if text == "rational":
        return RATIONAL
    if text.startswith("zmod:"):
        try:
            n = int(text[5:])
        except ValueError:
            raise MeadowError(f"bad modulus in {text!r}") from None
        return ZMod(n)
    raise MeadowError(f"unknown meadow model {text!r} (expected 'rational' or 'zmod:<n>')")


def _same_modulus(a: Residue, b) -> int:
    if not isinstance(b, Residue) or b.modulus != a.modulus:
        raise ModelMismatch(f"cannot combine {a!r} with {b!r}")
    return a.modulus


def _check_pair(a, b):
    if isinstance(a, Fraction):
        if not isinstance(b, Fraction):
            raise ModelMismatch(f"cannot combine {a!r} with {b!r}")
        return None
    if isinstance(a, Residue):
        return _same_modulus(a, b)
    raise ModelMismatch(f"{a!r} is not a meadow value")


def add(a: MeadowValue, b: MeadowValue) -> MeadowValue:
    m = _check_pair(a, b)
    if m is None:
        return a + b
    return Residue(m, (a.residue + b.residue) % m)


def mul(a: MeadowValue, b: MeadowValue) -> MeadowValue:
    m = _check_pair(a, b)
    if m is None:
        return a * b
    return Residue(m, (a.residue * b.residue) % m)


def neg(a: MeadowValue) -> MeadowValue:
    if isinstance(a, Fraction):
        return -a
    if isinstance(a, Residue):
        return Residue(a.modulus, (-a.residue) % a.modulus)
    raise ModelMismatch(f"{a!r} is not a meadow value")


def minv(a: MeadowValue) -> MeadowValue:
    """Zero-totalized multiplicative inverse."""
    if isinstance(a, Fraction):
        return Fraction(0) if a == 0 else 1 / a
    if isinstance(a, Residue):
        return Residue(a.modulus, _zmod_minv(a.modulus, a.residue))
    raise ModelMismatch(f"{a!r} is not a meadow value")


def _zmod_minv(n: int, r: int) -> int:
    # invert each prime component (0 stays 0), then recombine by CRT
    result = 0
    for p in _prime_factors(n):
        rp = r % p
        inv_p = pow(rp, -1, p) if rp else 0
        rest = n // p
        result += inv_p * rest * pow(rest, -1, p)
    return result % n


def sign(a: MeadowValue) -> MeadowValue:
    if isinstance(a, Fraction):
        return Fraction((a > 0) - (a < 0))
    if isinstance(a, Residue):
        raise UnsignedModelError(f"Z/{a.modulus} has no signum operation")
    raise ModelMismatch(f"{a!r} is not a meadow value")


def less_than(a: Fraction, b: Fraction) -> bool:
    """The ordering definable in a signed meadow: a < b iff s(a - b) = -1."""
    return sign(add(a, neg(b))) == -1


# rational sample pool used by the randomized checkers and sweeps
SAMPLE_POOL: tuple[Fraction, ...] = tuple(
    Fraction(x) for x in ("-2", "-1", "-1/2", "0", "1/2", "1", "2", "3")
)


def random_rational(rng: random.Random, pool: Sequence[Fraction] = SAMPLE_POOL) -> Fraction:
    """Draw from the pool most of the time, otherwise a random small fraction."""
    if rng.random() < 0.6:
        return rng.choice(pool)
    num = rng.randint(-50, 50)
    den = rng.randint(1, 20)
    return Fraction(num, den)


# -- axiom checking ---------------------------------------------------------


@dataclass(frozen=True)
class QuantAxiom:
    name: str
    arity: int
    holds: Callable[..., bool]


def _meadow_axioms(m: MeadowModel) -> list[QuantAxiom]:
    a, ml, ng, inv = m.add, m.mul, m.neg, m.minv
    z, o = m.zero, m.one
    return [
        QuantAxiom("(u + v) + w = u + (v + w)", 3, lambda u, v, w: a(a(u, v), w) == a(u, a(v, w))),
        QuantAxiom("u + v = v + u", 2, lambda u, v: a(u, v) == a(v, u)),
        QuantAxiom("u + 0 = u", 1, lambda u: a(u, z) == u),
        QuantAxiom("u + (-u) = 0", 1, lambda u: a(u, ng(u)) == z),
        QuantAxiom("(u * v) * w = u * (v * w)", 3, lambda u, v, w: ml(ml(u, v), w) == ml(u, ml(v, w))),
        QuantAxiom("u * v = v * u", 2, lambda u, v: ml(u, v) == ml(v, u)),
        QuantAxiom("u * 1 = u", 1, lambda u: ml(u, o) == u),
        QuantAxiom("u * (v + w) = u * v + u * w", 3,
                   lambda u, v, w: ml(u, a(v, w)) == a(ml(u, v), ml(u, w))),
        QuantAxiom("inv(inv(u)) = u", 1, lambda u: inv(inv(u)) == u),
        QuantAxiom("u * (u * inv(u)) = u", 1, lambda u: ml(u, ml(u, inv(u))) == u),
    ]


def _signum_axioms(m: MeadowModel) -> list[QuantAxiom]:
    a, ml, ng, inv, s = m.add, m.mul, m.neg, m.minv, m.sign
    o, z = m.one, m.zero

    def div(p, q):
        return ml(p, inv(q))

    def sub(p, q):
        return a(p, ng(q))

    def last(u, v):
        d = sub(s(u), s(v))
        return ml(sub(o, div(d, d)), sub(s(a(u, v)), s(u))) == z

    return [
        QuantAxiom("sign(u / u) = u / u", 1, lambda u: s(div(u, u)) == div(u, u)),
        QuantAxiom("sign(1 - u / u) = 1 - u / u", 1, lambda u: s(sub(o, div(u, u))) == sub(o, div(u, u))),
        QuantAxiom("sign(-1) = -1", 0, lambda: s(ng(o)) == ng(o)),
        QuantAxiom("sign(inv(u)) = sign(u)", 1, lambda u: s(inv(u)) == s(u)),
        QuantAxiom("sign(u * v) = sign(u) * sign(v)", 2, lambda u, v: s(ml(u, v)) == ml(s(u), s(v))),
        QuantAxiom("(1 - (s(u) - s(v)) / (s(u) - s(v))) * (s(u + v) - s(u)) = 0", 2, last),
    ]


@dataclass
class AxiomResult:
    axiom: str
    checked: int
    passed: bool
    counterexample: tuple | None = None


@dataclass
class AxiomReport:
    model: str
    results: list[AxiomResult] = field(default_factory=list)
    cancellation: AxiomResult | None = None

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __iter__(self) -> Iterator[AxiomResult]:
        return iter(self.results)


def _check(ax: QuantAxiom, tuples: Iterable[tuple]) -> AxiomResult:
    n = 0
    for args in tuples:
        n += 1
        if not ax.holds(*args):
            return AxiomResult(ax.name, n, False, args)
    return AxiomResult(ax.name, n, True)


def check_meadow_axioms(model: MeadowModel, samples: int = 1000, seed: int = 1) -> AxiomReport:
    """Check the meadow axioms (and signum axioms on signed models).

    Finite models are checked exhaustively over all tuples; the rational
    model over ``samples`` random tuples drawn around :data:`SAMPLE_POOL`.
    The report also carries a probe of the general inverse law
    ``u != 0 => u * inv(u) = 1``, which holds exactly in cancellation meadows.
    """
    axioms = _meadow_axioms(model)
    if model.signed:
        axioms += _signum_axioms(model)
    report = AxiomReport(model.name)
    if isinstance(model, ZMod):
        if model.modulus > 12:
            raise MeadowError("exhaustive checking is limited to moduli <= 12")
        elems = model.elements()
        for ax in axioms:
            report.results.append(_check(ax, itertools.product(elems, repeat=ax.arity)))
        probe = (e for e in elems if e.residue != 0)
    else:
        rng = random.Random(seed)
        for ax in axioms:
            report.results.append(
                _check(ax, (tuple(random_rational(rng) for _ in range(ax.arity))
                            for _ in range(samples if ax.arity else 1)))
            )
        probe = (q for q in (random_rational(rng) for _ in range(samples)) if q != 0)
    inverse_law = QuantAxiom("u != 0 => u * inv(u) = 1", 1,
                             lambda u: model.mul(u, model.minv(u)) == model.one)
    report.cancellation = _check(inverse_law, ((u,) for u in probe))
    return report
