from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FeatureSet:
    """Which extensions of the base calculus are switched on.

    ``epsilon`` adds the empty process and the termination operator;
    ``sequences`` adds the sort of process sequences and requires ``epsilon``.
    """

    epsilon: bool = False
    sequences: bool = False

    def __post_init__(self):
        if self.sequences and not self.epsilon:
            raise ValueError("process sequences require the epsilon extension")

    @classmethod
    def parse(cls, text: str) -> "FeatureSet":
        names = {s.strip() for s in text.split(",") if s.strip()}
        unknown = names - {"epsilon", "sequences", "none"}
        if unknown:
            raise ValueError(f"unknown feature(s): {', '.join(sorted(unknown))}")
        return cls(epsilon="epsilon" in names, sequences="sequences" in names)

    def __str__(self) -> str:
        names = [n for n, on in (("epsilon", self.epsilon), ("sequences", self.sequences)) if on]
        return ",".join(names) or "none"


BASE = FeatureSet()
EPSILON = FeatureSet(epsilon=True)
FULL = FeatureSet(epsilon=True, sequences=True)


class ExtensionError(Exception):
    """An operation needs an extension that is switched off."""


def require(features: FeatureSet, flag: str, what: str) -> None:
    if not getattr(features, flag):
        raise ExtensionError(f"{what} requires the {flag} extension")
