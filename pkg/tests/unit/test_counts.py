from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np
import pytest

from residue_subsets.arith.primes import classify, primes_in_range
from residue_subsets.counts import subsets
from residue_subsets.counts.subsets import (
    closed_form,
    count_brute,
    count_formula,
    count_formula_nonresidues,
    envelope,
    main_term,
    nonresidue_indicator,
    normalized_gap,
    qr_table,
    residue_indicator,
    subset_size,
)
from residue_subsets.domain.models import GAP_SELECTORS, SubsetSelector
from residue_subsets.errors import DomainError, MemoryGuardError, UsageError

S2 = SubsetSelector.multiples(2)
S3 = SubsetSelector.multiples(3)
S4 = SubsetSelector.multiples(4)
ODDS = SubsetSelector.odds()
S2_MINUS_S4 = SubsetSelector.s2_minus_s4()


def test_qr_table_examples() -> None:
    assert np.flatnonzero(qr_table(7)).tolist() == [1, 2, 4]
    assert np.flatnonzero(qr_table(13)).tolist() == [1, 3, 4, 9, 10, 12]


def test_qr_table_memory_guard() -> None:
    with pytest.raises(MemoryGuardError):
        qr_table(1009, limit=1000)


def test_indicators_split_every_unit() -> None:
    for x in range(1, 13):
        assert residue_indicator(x, 13) + nonresidue_indicator(x, 13) == 1
    assert residue_indicator(4, 13) == 1
    assert nonresidue_indicator(2, 13) == 1
    assert residue_indicator(13, 13) == Fraction(1, 2)


@pytest.mark.parametrize(
    ("p", "sel", "Q", "N"),
    [
        (7, S2, 2, 1),
        (13, S2, 3, 3),
        (11, S4, 1, 1),
        (13, S3, 3, 1),
        (5, S3, 0, 1),
        (7, ODDS, 1, 2),
        (19, S2_MINUS_S4, 1, 4),
    ],
)
def test_count_brute_examples(p: int, sel: SubsetSelector, Q: int, N: int) -> None:
    record = count_brute(p, sel)
    assert (record.Q, record.N) == (Q, N)
    assert record.Q + record.N == record.size == subset_size(p, sel)


def test_count_brute_rejects_k_at_least_p() -> None:
    with pytest.raises(UsageError):
        count_brute(7, SubsetSelector.multiples(7))
    with pytest.raises(UsageError):
        count_brute(7, SubsetSelector.multiples(0))


def test_count_brute_streaming_matches_table() -> None:
    p = 20011
    for sel in GAP_SELECTORS:
        streamed = count_brute(p, sel, limit=0, chunk=333)
        tabled = count_brute(p, sel)
        assert (streamed.Q, streamed.N) == (tabled.Q, tabled.N)


def test_main_terms() -> None:
    assert main_term(13, S2) == 3
    assert main_term(11, S4) == Fraction(1)
    assert main_term(11, S2) == Fraction(5, 2)
    assert main_term(19, ODDS) == Fraction(9, 2)
    assert main_term(19, S2_MINUS_S4) == Fraction(2)


@pytest.mark.parametrize(
    ("p", "k", "expected"),
    [(7, 2, 2), (11, 2, 1), (7, 1, 3), (101, 1, 50)],
)
def test_count_formula_examples(p: int, k: int, expected: int) -> None:
    assert count_formula(p, k) == expected


def test_count_formula_errors() -> None:
    with pytest.raises(DomainError):
        count_formula(7, 7)
    with pytest.raises(UsageError):
        count_formula(7, 9)


def test_count_formula_matches_brute_force() -> None:
    for p in primes_in_range(3, 400):
        for k in range(1, min(p - 1, 50) + 1):
            record = count_brute(p, SubsetSelector.multiples(k))
            assert count_formula(p, k) == record.Q, (p, k)
            assert count_formula_nonresidues(p, k) == record.N, (p, k)


def test_counts_stay_inside_envelope() -> None:
    for p in primes_in_range(3, 1500):
        limit = envelope(p)
        for k in range(1, min(p - 1, 20) + 1):
            record = count_brute(p, SubsetSelector.multiples(k))
            assert abs(record.Q - record.main_term) <= limit
            assert abs(record.N - record.main_term) <= limit


@pytest.mark.parametrize(
    ("p", "sel", "expected", "derivation"),
    [
        (13, S4, 2, "W4"),
        (23, S4, 4, "B3"),
        (11, S4, 1, "B2"),
        (19, S2, 3, "W1"),
        (13, S2, 3, "B1"),
        (11, S3, 2, "W2"),
        (13, S3, 3, "W3"),
        (19, ODDS, 6, "C2"),
        (19, S2_MINUS_S4, 1, "C4"),
    ],
)
def test_closed_form_examples(
    p: int, sel: SubsetSelector, expected: int, derivation: str
) -> None:
    assert closed_form(classify(p), sel) == (expected, derivation)


def test_closed_form_errors() -> None:
    with pytest.raises(UsageError):
        closed_form(classify(13), SubsetSelector.multiples(5))
    with pytest.raises(DomainError):
        closed_form(classify(3), S2)


def test_closed_forms_match_brute_force() -> None:
    for p in primes_in_range(5, 3000):
        cp = classify(p)
        for sel in GAP_SELECTORS:
            value, _ = closed_form(cp, sel)
            assert value == count_brute(p, sel).Q, (p, sel.label)


def test_closed_form_uses_injected_class_number() -> None:
    seen: list[int] = []

    def recording(d: int) -> int:
        seen.append(d)
        return {-23: 3}[d]

    assert closed_form(classify(23), S2, class_number=recording) == (7, "W1")
    assert seen == [-23]


def test_s3_coefficient_note_logged_once(caplog: pytest.LogCaptureFixture) -> None:
    subsets._note_s3_coefficient.cache_clear()
    with caplog.at_level(logging.WARNING, logger="residue_subsets.counts.subsets"):
        closed_form(classify(13), S3)
        closed_form(classify(17), S3)
    notes = [r for r in caplog.records if "S_3 closed form" in r.getMessage()]
    assert len(notes) == 1


def test_nonresidues_in_evens_equal_residues_in_odds(classified_primes) -> None:
    for cp in classified_primes:
        assert count_brute(cp.p, S2).N == count_brute(cp.p, ODDS).Q, cp.p


@pytest.mark.parametrize(
    ("p", "expected"),
    [(13, 0.0), (23, 1.5 / 23**0.25), (11, -1.5 / 11**0.25)],
)
def test_normalized_gap_examples(p: int, expected: float) -> None:
    record = count_brute(p, S2, eps=0.25)
    assert record.normalized_gap == pytest.approx(expected)
    assert normalized_gap(record, 0.25) == pytest.approx(expected)


def test_normalized_gap_rounded_values() -> None:
    assert count_brute(23, S2).normalized_gap == pytest.approx(0.685, abs=1e-3)
    assert count_brute(11, S2).normalized_gap == pytest.approx(-0.824, abs=1e-3)


@pytest.mark.parametrize("eps", [0.0, 0.5, -0.1, 0.75])
def test_normalized_gap_rejects_eps(eps: float) -> None:
    record = count_brute(13, S2)
    with pytest.raises(UsageError):
        normalized_gap(record, eps)


def test_exact_cases_have_zero_gap(classified_primes) -> None:
    for cp in classified_primes:
        if cp.r4 == 1:
            assert count_brute(cp.p, S2).gap == 0
        if cp.r8 == 3:
            assert count_brute(cp.p, S4).gap == 0


def test_indicator_sum_equals_table_count() -> None:
    for p in (13, 43, 101):
        for sel in GAP_SELECTORS:
            start, step = sel.progression
            total = sum(residue_indicator(x, p) for x in range(start, p, step))
            assert total == count_brute(p, sel).Q, (p, sel.label)


def test_odds_and_evens_split_the_residues(classified_primes) -> None:
    for cp in classified_primes:
        half = (cp.p - 1) // 2
        assert count_brute(cp.p, ODDS).Q + count_brute(cp.p, S2).Q == half


@pytest.mark.slow
def test_exact_counts_below_hundred_thousand() -> None:
    for p in primes_in_range(5, 10**5):
        if p % 4 == 1:
            assert count_brute(p, S2).Q == (p - 1) // 4, p
        if p % 8 == 3:
            assert count_brute(p, S4).Q == Fraction((p - 1) // 4, 2), p
