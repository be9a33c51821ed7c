"""Class numbers of imaginary quadratic fields by two independent oracles.

``class_number_forms`` counts reduced primitive binary quadratic forms;
``class_number_weighted`` evaluates the finite class number formula
h = -(w / 2|d|) * sum_{a < |d|} a chi(a). The harness trusts a value only when
both agree wherever both are available.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from residue_subsets.arith.characters import character_table, make_character
from residue_subsets.arith.primes import is_prime
from residue_subsets.domain.models import (
    CharacterKind,
    ClassifiedPrime,
    ClassNumberRecord,
    QuadCharacter,
)
from residue_subsets.errors import ConsistencyError, DomainError

LOGGER = logging.getLogger(__name__)

FORMS = "FORMS"
WEIGHTED_SUM = "WEIGHTED_SUM"


def _squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    q = 3
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 2
    return True


def is_fundamental_discriminant(d: int) -> bool:
    """d = 1 mod 4 squarefree, or d = 4m with m = 2, 3 mod 4 squarefree."""

    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(abs(d))
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def unit_count(d: int) -> int:
    """Number of roots of unity w in the imaginary quadratic field of discriminant d."""

    if d == -3:
        return 6
    if d == -4:
        return 4
    return 2


def _require_negative_fundamental(d: int) -> None:
    if d >= 0 or not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a negative fundamental discriminant")


def class_number_forms(d: int) -> int:
    """Count reduced primitive forms (a, b, c) with b^2 - 4ac = d.

    Reduced means |b| <= a <= c with b >= 0 whenever |b| = a or a = c. The outer
    loop runs over a <= sqrt(|d|/3) and each row of b values is vectorised.
    """

    _require_negative_fundamental(d)
    total = 0
    for a in range(1, math.isqrt(-d // 3) + 1):
        b = np.arange(-a + 1, a + 1, dtype=np.int64)
        b = b[(b - d) % 2 == 0]
        numer = b * b - d
        divisible = numer % (4 * a) == 0
        b, c = b[divisible], numer[divisible] // (4 * a)
        keep = (c >= a) & ~((b < 0) & (c == a))
        b, c = b[keep], c[keep]
        primitive = np.gcd(np.gcd(b, a), c) == 1
        total += int(primitive.sum())
    return total


def weighted_class_number(d: int, values: np.ndarray) -> int:
    """Finite class number formula for chi given by ``values`` (chi(n), n = 0 .. |d|-1)."""

    q = -d
    w = unit_count(d)
    weighted = int(np.dot(np.arange(q, dtype=np.int64), values[:q]))
    numer = -w * weighted
    if numer % (2 * q):
        raise ConsistencyError(
            f"Weighted character sum {weighted} for d={d} is not divisible by 2|d|/w;"
            " the character values are wrong"
        )
    return numer // (2 * q)


def class_number_weighted(chi: QuadCharacter) -> int:
    """Class number of the field attached to an odd character, via the weighted sum."""

    if not chi.is_odd:
        raise DomainError(f"Character {chi.kind.value} mod {chi.modulus} is even")
    return weighted_class_number(chi.discriminant, character_table(chi))


def family_character(d: int) -> Optional[QuadCharacter]:
    """The odd family character of discriminant d (-p, -3p or -4p), if there is one."""

    q = -d
    candidates = ((CharacterKind.CHI_P, 1), (CharacterKind.CHI_3P, 3), (CharacterKind.CHI_4P, 4))
    for kind, factor in candidates:
        if q % factor or q // factor < 3:
            continue
        p = q // factor
        if p % 2 == 0 or not is_prime(p):
            continue
        if kind is CharacterKind.CHI_3P and p == 3:
            continue
        cp = ClassifiedPrime(p=p, r4=p % 4, r8=p % 8, r12=p % 12)
        chi = make_character(kind, cp)
        if chi.discriminant == d:
            return chi
    return None


def class_number_record(d: int) -> ClassNumberRecord:
    """Forms-oracle class number, cross-checked by the weighted oracle when possible."""

    h = class_number_forms(d)
    method = FORMS
    chi = family_character(d)
    if chi is not None:
        weighted = class_number_weighted(chi)
        if weighted != h:
            raise ConsistencyError(f"Class number oracles disagree for d={d}: {h} != {weighted}")
        method = f"{FORMS}+{WEIGHTED_SUM}"
    LOGGER.debug("h(%d) = %d via %s", d, h, method)
    return ClassNumberRecord(d=d, h=h, w=unit_count(d), method=method)
