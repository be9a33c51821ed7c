"""Quadratic residue counts inside S_k, the odd numbers and S_2 minus S_4."""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import cache
from typing import Callable, Tuple

import numpy as np

from residue_subsets.arith.characters import (
    STREAM_CHUNK,
    TABLE_MODE_LIMIT,
    legendre,
    legendre_chunks,
    legendre_sum,
    residue_marks,
)
from residue_subsets.arith.primes import require_above_three
from residue_subsets.classnum.forms import class_number_forms
from residue_subsets.domain.models import (
    ClassifiedPrime,
    CountRecord,
    SelectorKind,
    SubsetSelector,
)
from residue_subsets.errors import ConsistencyError, DomainError, UsageError

LOGGER = logging.getLogger(__name__)

ClassNumberFn = Callable[[int], int]

DEFAULT_EPS = 0.25
CLOSED_FORM_SELECTORS = (
    SubsetSelector.multiples(2),
    SubsetSelector.multiples(3),
    SubsetSelector.multiples(4),
    SubsetSelector.odds(),
    SubsetSelector.s2_minus_s4(),
)


def residue_indicator(x: int, p: int) -> Fraction:
    """1/2 (1 + (x/p)): one on residues, zero on non-residues."""

    return Fraction(1 + legendre(x, p), 2)


def nonresidue_indicator(x: int, p: int) -> Fraction:
    """1/2 (1 - (x/p)): one on non-residues, zero on residues."""

    return Fraction(1 - legendre(x, p), 2)


def qr_table(p: int, *, limit: int = TABLE_MODE_LIMIT) -> np.ndarray:
    """Membership table over [0, p-1] built by marking x^2 mod p for x <= (p-1)/2."""

    marks = residue_marks(p, limit=limit)
    if int(marks.sum()) != (p - 1) // 2:
        raise ConsistencyError(f"Expected {(p - 1) // 2} residues mod {p}, marked {marks.sum()}")
    return marks


def _validate_selector(p: int, sel: SubsetSelector) -> None:
    if sel.kind is SelectorKind.MULTIPLES and not 1 <= (sel.k or 0) < p:
        raise UsageError(f"S_k needs 1 <= k <= p-1, got k={sel.k} for p={p}")


def subset_size(p: int, sel: SubsetSelector) -> int:
    start, step = sel.progression
    return len(range(start, p, step))


def main_term(p: int, sel: SubsetSelector) -> Fraction:
    """Expected residue count: half of [(p-1)/k] for S_k, (p-1)/4 or [(p-1)/4]/2 otherwise."""

    if sel.kind is SelectorKind.MULTIPLES:
        return Fraction((p - 1) // sel.k, 2)
    if sel.kind is SelectorKind.ODDS:
        return Fraction(p - 1, 4)
    return Fraction((p - 1) // 4, 2)


def normalized_gap(record: CountRecord, eps: float) -> float:
    """gap / p^(1/2 - eps), sign preserved."""

    if not 0.0 < eps < 0.5:
        raise UsageError(f"eps must lie strictly between 0 and 1/2, got {eps}")
    return float(record.gap) / record.p ** (0.5 - eps)


def count_brute(
    p: int,
    sel: SubsetSelector,
    *,
    eps: float = DEFAULT_EPS,
    limit: int = TABLE_MODE_LIMIT,
    chunk: int = STREAM_CHUNK,
) -> CountRecord:
    """Count residues and non-residues of the subset by evaluating every element."""

    _validate_selector(p, sel)
    start, step = sel.progression
    residues = nonresidues = 0
    for block in legendre_chunks(p, start, p, step=step, limit=limit, chunk=chunk):
        residues += int(np.count_nonzero(block == 1))
        nonresidues += int(np.count_nonzero(block == -1))
    record = CountRecord(
        p=p,
        selector=sel,
        Q=residues,
        N=nonresidues,
        size=subset_size(p, sel),
        main_term=main_term(p, sel),
        eps=eps,
    )
    record.normalized_gap = normalized_gap(record, eps)
    return record


def _formula_terms(p: int, k: int, **sum_options: int) -> Tuple[int, int, int]:
    if k % p == 0:
        raise DomainError(f"k={k} is a multiple of p={p}")
    if not 1 <= k <= p - 1:
        raise UsageError(f"Need 1 <= k <= p-1, got k={k} for p={p}")
    top = (p - 1) // k
    return top, legendre(k, p), legendre_sum(p, 1, top + 1, **sum_options)


def _halve(value: int, what: str) -> int:
    if value % 2:
        raise ConsistencyError(f"{what} is not an integer: {value}/2")
    return value // 2


def count_formula(
    p: int, k: int, *, limit: int = TABLE_MODE_LIMIT, chunk: int = STREAM_CHUNK
) -> int:
    """Q(p, S_k) = 1/2 [(p-1)/k] + 1/2 (k/p) sum_{m <= [(p-1)/k]} (m/p)."""

    top, chi_k, total = _formula_terms(p, k, limit=limit, chunk=chunk)
    return _halve(top + chi_k * total, f"Q({p}, S_{k})")


def count_formula_nonresidues(
    p: int, k: int, *, limit: int = TABLE_MODE_LIMIT, chunk: int = STREAM_CHUNK
) -> int:
    """N(p, S_k) = 1/2 [(p-1)/k] - 1/2 (k/p) sum_{m <= [(p-1)/k]} (m/p)."""

    top, chi_k, total = _formula_terms(p, k, limit=limit, chunk=chunk)
    return _halve(top - chi_k * total, f"N({p}, S_{k})")


@cache
def _note_s3_coefficient() -> None:
    LOGGER.warning(
        "S_3 closed form carries the factor 1/2 on the character sum, as the general"
        " counting formula does"
    )


def _cutoff_sum(
    cp: ClassifiedPrime, k: int, class_number: ClassNumberFn
) -> Tuple[Fraction, str]:
    """S(1, p/k) rewritten through class numbers, with the identity that justifies it."""

    p = cp.p
    if k == 2:
        if cp.r4 == 1:
            return Fraction(0), "B1"
        return Fraction((2 - legendre(2, p)) * class_number(-p)), "W1"
    if k == 3:
        if cp.r4 == 3:
            return Fraction((3 - legendre(3, p)) * class_number(-p), 2), "W2"
        return Fraction(class_number(-3 * p), 2), "W3"
    if cp.r4 == 1:
        return Fraction(class_number(-4 * p), 2), "W4"
    if cp.r8 == 3:
        return Fraction(0), "B2"
    # p = 7 mod 8: the sum over [p/4, p/2] vanishes, so S(1, p/4) = S(1, p/2) = h(-p).
    return Fraction(class_number(-p)), "B3"


def _closed_multiples(
    cp: ClassifiedPrime, k: int, class_number: ClassNumberFn
) -> Tuple[Fraction, str]:
    if k == 3:
        _note_s3_coefficient()
    cut, derivation = _cutoff_sum(cp, k, class_number)
    value = Fraction((cp.p - 1) // k, 2) + Fraction(legendre(k, cp.p), 2) * cut
    return value, derivation


def closed_form(
    cp: ClassifiedPrime,
    sel: SubsetSelector,
    *,
    class_number: ClassNumberFn = class_number_forms,
) -> Tuple[int, str]:
    """Q(p, sel) from class numbers alone, with the identity id behind the derivation."""

    if sel not in CLOSED_FORM_SELECTORS:
        raise UsageError(f"No closed form for {sel.label}")
    require_above_three(cp, "closed_form")

    if sel.kind is SelectorKind.MULTIPLES:
        value, derivation = _closed_multiples(cp, sel.k, class_number)
    elif sel.kind is SelectorKind.ODDS:
        s2, _ = _closed_multiples(cp, 2, class_number)
        value, derivation = Fraction(cp.p - 1, 2) - s2, "C2"
    else:
        s2, _ = _closed_multiples(cp, 2, class_number)
        s4, _ = _closed_multiples(cp, 4, class_number)
        value, derivation = s2 - s4, "C4"

    if value.denominator != 1:
        raise ConsistencyError(f"Closed form for {sel.label} at p={cp.p} is {value}")
    return int(value), derivation


def envelope(p: int) -> float:
    """Half of sqrt(p) log p: the allowed distance of Q and N from their main term."""

    return 0.5 * math.sqrt(p) * math.log(p)
