"""L(1, chi) for the odd family characters and the integer identities W1-W4."""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from residue_subsets.arith.characters import (
    STREAM_CHUNK,
    TABLE_MODE_LIMIT,
    character_table,
    legendre,
    make_character,
)
from residue_subsets.arith.primes import require_above_three
from residue_subsets.charsum.sums import partial_sum
from residue_subsets.classnum.forms import class_number_forms, unit_count
from residue_subsets.domain.models import (
    CharacterKind,
    ClassifiedPrime,
    IdentityCheck,
    LValueRecord,
    QuadCharacter,
)
from residue_subsets.errors import DomainError, UsageError

LOGGER = logging.getLogger(__name__)

ClassNumberFn = Callable[[int], int]

WRIGHT_IDENTITIES = ("W1", "W2", "W3", "W4")


def l_value_exact(
    chi: QuadCharacter, *, class_number: ClassNumberFn = class_number_forms
) -> LValueRecord:
    """L(1, chi) = 2 pi h(d) / (w sqrt|d|) for an odd character of discriminant d."""

    if not chi.is_odd:
        raise DomainError(
            f"L(1, chi) of the even character {chi.kind.value} mod {chi.modulus}"
            " is not given by the imaginary class number formula"
        )
    d = chi.discriminant
    h = class_number(d)
    exact = 2 * math.pi * h / (unit_count(d) * math.sqrt(-d))
    return LValueRecord(chi=chi, exact_value=exact)


def series_tail_bound(modulus: int, terms: int) -> float:
    """Partial-summation bound 2 sqrt(q) log q / terms on the series tail."""

    return 2 * math.sqrt(modulus) * math.log(modulus) / terms


def l_value_series(
    chi: QuadCharacter, terms: int, *, limit: int = TABLE_MODE_LIMIT
) -> tuple[float, float]:
    """Truncated sum of chi(n)/n for n <= terms, with its tail bound."""

    if terms < chi.modulus:
        raise UsageError(f"Need at least {chi.modulus} terms, got {terms}")
    table = character_table(chi, limit=limit)
    n = np.arange(1, terms + 1, dtype=np.int64)
    value = float(np.sum(table[n % chi.modulus] / n))
    return value, series_tail_bound(chi.modulus, terms)


def l_value_record(
    chi: QuadCharacter,
    terms: int,
    *,
    class_number: ClassNumberFn = class_number_forms,
    limit: int = TABLE_MODE_LIMIT,
) -> LValueRecord:
    """Exact and series values of L(1, chi) in one record."""

    record = l_value_exact(chi, class_number=class_number)
    record.series_value, record.tail_bound = l_value_series(chi, terms, limit=limit)
    record.series_terms = terms
    if not record.within_tail_bound():
        LOGGER.warning(
            "Series for %s mod %d misses the exact value by more than %.3g",
            chi.kind.value,
            chi.modulus,
            record.tail_bound,
        )
    return record


def wright_identity(
    cp: ClassifiedPrime,
    which: str,
    *,
    class_number: ClassNumberFn = class_number_forms,
    limit: int = TABLE_MODE_LIMIT,
    chunk: int = STREAM_CHUNK,
) -> IdentityCheck:
    """Integer form of the L-value expressions for S(1, p/2), S(1, p/3), S(1, p/4).

    W1: S(1,p/2) = (2 - (2/p)) h(-p)          p = 3 mod 4
    W2: 2 S(1,p/3) = (3 - (3/p)) h(-p)        p = 3 mod 4
    W3: 2 S(1,p/3) = h(-3p)                   p = 1 mod 4
    W4: 2 S(1,p/4) = h(-4p)                   p = 1 mod 4
    """

    if which not in WRIGHT_IDENTITIES:
        raise UsageError(f"Unknown identity {which!r}")
    require_above_three(cp, which)
    p = cp.p
    needs_r4 = 3 if which in ("W1", "W2") else 1
    if cp.r4 != needs_r4:
        raise UsageError(f"{which} applies to p = {needs_r4} mod 4, got p={p}")

    if which == "W1":
        lhs = partial_sum(p, 1, 2, limit=limit, chunk=chunk)
        rhs = (2 - legendre(2, p)) * class_number(-p)
    elif which == "W2":
        lhs = 2 * partial_sum(p, 1, 3, limit=limit, chunk=chunk)
        rhs = (3 - legendre(3, p)) * class_number(-p)
    elif which == "W3":
        lhs = 2 * partial_sum(p, 1, 3, limit=limit, chunk=chunk)
        rhs = class_number(-3 * p)
    else:
        lhs = 2 * partial_sum(p, 1, 4, limit=limit, chunk=chunk)
        rhs = class_number(-4 * p)
    return IdentityCheck(which, lhs == rhs, Fraction(lhs), Fraction(rhs))


def family_l_value(
    cp: ClassifiedPrime,
    kind: CharacterKind,
    terms: Optional[int] = None,
    *,
    class_number: ClassNumberFn = class_number_forms,
) -> LValueRecord:
    """L(1, chi) for the family character of the given kind; adds the series when terms is set."""

    chi = make_character(kind, cp)
    if terms is None:
        return l_value_exact(chi, class_number=class_number)
    return l_value_record(chi, terms, class_number=class_number)
