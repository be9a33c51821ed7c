"""Domain models shared across the toolkit."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np


class CharacterKind(str, enum.Enum):
    """The three quadratic character families built on the Legendre symbol mod p."""

    CHI_P = "p"
    CHI_3P = "3p"
    CHI_4P = "4p"


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


class SelectorKind(str, enum.Enum):
    MULTIPLES = "multiples"
    ODDS = "odds"
    S2_MINUS_S4 = "s2_minus_s4"


@dataclass(frozen=True, slots=True)
class ClassifiedPrime:
    """An odd prime together with its residue classes mod 4, 8 and 12."""

    p: int
    r4: int
    r8: int
    r12: int

    def class_key(self, modulus: int) -> str:
        """Label such as ``r8=3`` used to group results by residue class."""

        return f"r{modulus}={self.p % modulus}"


@dataclass(frozen=True, slots=True)
class QuadCharacter:
    """A real character of modulus p, 3p or 4p.

    ``discriminant`` is the signed modulus: negative exactly when the character
    is odd, which is when it belongs to an imaginary quadratic field.
    """

    kind: CharacterKind
    p: int
    modulus: int
    discriminant: int
    parity: Parity

    @property
    def is_odd(self) -> bool:
        return self.parity is Parity.ODD


@dataclass(slots=True)
class PartialSumProfile:
    """Prefix sums of the Legendre symbol over [0, p-1] and their extremes.

    ``prefix`` is only populated when the profile was materialised; streaming
    computations keep the extremes alone.
    """

    p: int
    max_prefix: int
    min_prefix: int
    prefix: Optional[np.ndarray] = None

    @property
    def max_interval(self) -> int:
        return self.max_prefix - self.min_prefix


@dataclass(frozen=True, slots=True)
class VanishingOutcome:
    """Result of one vanishing-sum check (B1, B2 or B3)."""

    case: str
    passed: bool
    witness: int


@dataclass(frozen=True, slots=True)
class ClassNumberRecord:
    d: int
    h: int
    w: int
    method: str


@dataclass(slots=True)
class LValueRecord:
    """L(1, chi) from the class number formula and from a truncated series."""

    chi: QuadCharacter
    exact_value: float
    series_value: Optional[float] = None
    series_terms: Optional[int] = None
    tail_bound: Optional[float] = None

    def within_tail_bound(self) -> bool:
        if self.series_value is None or self.tail_bound is None:
            return False
        return abs(self.exact_value - self.series_value) <= self.tail_bound


@dataclass(frozen=True, slots=True)
class SubsetSelector:
    """Which subset of [1, p-1] to count in."""

    kind: SelectorKind
    k: Optional[int] = None

    @classmethod
    def multiples(cls, k: int) -> "SubsetSelector":
        return cls(SelectorKind.MULTIPLES, k)

    @classmethod
    def odds(cls) -> "SubsetSelector":
        return cls(SelectorKind.ODDS)

    @classmethod
    def s2_minus_s4(cls) -> "SubsetSelector":
        return cls(SelectorKind.S2_MINUS_S4)

    @property
    def label(self) -> str:
        if self.kind is SelectorKind.MULTIPLES:
            return f"S_{self.k}"
        if self.kind is SelectorKind.ODDS:
            return "ODDS"
        return "S2_MINUS_S4"

    @property
    def progression(self) -> tuple[int, int]:
        """(start, step) of the arithmetic progression the subset is made of."""

        if self.kind is SelectorKind.MULTIPLES:
            return self.k, self.k
        if self.kind is SelectorKind.ODDS:
            return 1, 2
        return 2, 4

    def sort_key(self) -> tuple[int, int]:
        order = {SelectorKind.MULTIPLES: 0, SelectorKind.ODDS: 1, SelectorKind.S2_MINUS_S4: 2}
        return order[self.kind], self.k or 0

    @classmethod
    def parse(cls, label: str) -> "SubsetSelector":
        """Inverse of :attr:`label`."""

        text = label.strip().upper()
        if text == "ODDS":
            return cls.odds()
        if text == "S2_MINUS_S4":
            return cls.s2_minus_s4()
        if text.startswith("S_") and text[2:].isdigit():
            return cls.multiples(int(text[2:]))
        raise ValueError(f"Unknown subset selector {label!r}")


GAP_SELECTORS: List[SubsetSelector] = [
    SubsetSelector.multiples(2),
    SubsetSelector.multiples(3),
    SubsetSelector.multiples(4),
    SubsetSelector.odds(),
    SubsetSelector.s2_minus_s4(),
]


@dataclass(slots=True)
class CountRecord:
    """Residue and non-residue counts of one prime inside one subset."""

    p: int
    selector: SubsetSelector
    Q: int
    N: int
    size: int
    main_term: Fraction
    eps: float
    normalized_gap: float = field(default=0.0)

    @property
    def gap(self) -> Fraction:
        return self.Q - self.main_term


@dataclass(frozen=True, slots=True)
class IdentityCheck:
    """Both sides of an exact (in)equality together with its verdict."""

    identity: str
    passed: bool
    lhs: Fraction
    rhs: Fraction
