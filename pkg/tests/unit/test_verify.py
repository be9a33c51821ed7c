from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from residue_subsets.arith import characters
from residue_subsets.arith.primes import classify, primes_in_range
from residue_subsets.domain.reports import VerificationReport
from residue_subsets.errors import DomainError, UsageError, VerificationError
from residue_subsets.services.exports import compare_expectations, save_expectations
from residue_subsets.workflows import verify as verify_module
from residue_subsets.workflows.registry import (
    CLAIMS,
    IDENTITIES,
    CheckStatus,
    ClaimId,
    IdentityId,
    IdentitySpec,
    parse_claim_ids,
    parse_identity_ids,
)
from residue_subsets.workflows.verify import (
    PRIMES_PER_TASK,
    RunConfig,
    check_claims,
    gap_statistics,
    prime_batches,
    run_range,
    verify_prime,
)

ALWAYS_PASSING = {
    ClaimId.T1_1_EXACT,
    ClaimId.C1_2_EXACT,
    ClaimId.T1_3_POS,
    ClaimId.C1_4_POS,
    ClaimId.T1_5_EXACT,
    ClaimId.T1_5_POS_1MOD4,
    ClaimId.T1_5_POS_7MOD8,
    ClaimId.C1_6,
    ClaimId.C1_6_POS_1MOD4,
    ClaimId.C1_6_POS_7MOD8,
}


def statuses(outcomes) -> dict[str, CheckStatus]:
    return {outcome.check_id: outcome.status for outcome in outcomes}


def make_config(**overrides) -> RunConfig:
    values = {"identities": [], "claims": list(CLAIMS), "eps_grid": [0.25]}
    values.update(overrides)
    return RunConfig(**values)


def test_parse_ids() -> None:
    assert parse_identity_ids("all") == list(IDENTITIES)
    assert parse_identity_ids("w1, b2") == [IdentityId.B2, IdentityId.W1]
    assert parse_claim_ids("C1.7-pos,T1.1-pos") == [ClaimId.T1_1_POS, ClaimId.C1_7_POS]
    with pytest.raises(ValueError):
        parse_identity_ids("W7")


def test_verify_prime_examples() -> None:
    ids = [IdentityId.B1, IdentityId.W3, IdentityId.W4, IdentityId.C4]
    assert set(statuses(verify_prime(classify(13), ids)).values()) == {CheckStatus.PASS}
    ids = [IdentityId.B2, IdentityId.W1, IdentityId.W2, IdentityId.C2, IdentityId.C3]
    assert set(statuses(verify_prime(classify(11), ids)).values()) == {CheckStatus.PASS}


def test_verify_prime_reports_not_applicable_distinctly() -> None:
    outcomes = verify_prime(classify(3), [IdentityId.W1, IdentityId.QN])
    assert statuses(outcomes) == {"W1": CheckStatus.NOT_APPLICABLE, "QN": CheckStatus.PASS}
    assert statuses(verify_prime(classify(5), [IdentityId.W3])) == {"W3": CheckStatus.PASS}
    assert statuses(verify_prime(classify(7), [IdentityId.B1])) == {
        "B1": CheckStatus.NOT_APPLICABLE
    }


def test_verify_prime_witness_carries_both_sides() -> None:
    (outcome,) = verify_prime(classify(13), [IdentityId.W3])
    assert (outcome.lhs, outcome.rhs) == (Fraction(4), Fraction(4))


def test_verify_prime_wraps_delegate_errors(monkeypatch: pytest.MonkeyPatch) -> None:
    def broken(ctx):
        raise DomainError("delegate refused")

    monkeypatch.setitem(
        IDENTITIES,
        IdentityId.QN,
        IdentitySpec(IdentityId.QN, "broken", lambda cp: True, broken),
    )
    with pytest.raises(VerificationError) as info:
        verify_prime(classify(17), [IdentityId.QN])
    assert info.value.p == 17
    assert info.value.check_id == "QN"
    assert "delegate refused" in str(info.value)


def test_check_claims_examples() -> None:
    (exact,) = check_claims(classify(13), [ClaimId.T1_1_EXACT])
    assert exact.status is CheckStatus.PASS
    assert exact.gap == 0

    (positive,) = check_claims(classify(23), [ClaimId.T1_1_POS])
    assert positive.status is CheckStatus.PASS
    assert positive.gap == Fraction(3, 2)

    (failing,) = check_claims(classify(11), [ClaimId.T1_1_POS])
    assert failing.status is CheckStatus.FAIL
    assert (failing.lhs, failing.rhs, failing.gap) == (1, Fraction(5, 2), Fraction(-3, 2))


def test_check_claims_requires_p_above_three() -> None:
    with pytest.raises(DomainError):
        check_claims(classify(3))


def test_claim_sign_pattern_by_residue_class(classified_primes) -> None:
    for cp in classified_primes:
        for outcome in check_claims(cp):
            if outcome.status is CheckStatus.NOT_APPLICABLE:
                continue
            claim = ClaimId(outcome.check_id)
            if claim in ALWAYS_PASSING:
                expected = CheckStatus.PASS
            elif claim is ClaimId.C1_7_POS:
                expected = CheckStatus.FAIL
            else:
                expected = CheckStatus.FAIL if cp.r8 == 3 else CheckStatus.PASS
            assert outcome.status is expected, (cp.p, claim.value, outcome)


def test_small_range_has_no_identity_failures() -> None:
    report = run_range(5, 100, RunConfig(claims=[]))
    assert report.primes_evaluated == 23
    assert report.identity_failures() == 0
    for summary in report.identities:
        assert summary.passed + summary.failed == summary.applicable
    qn = next(summary for summary in report.identities if summary.id == "QN")
    assert qn.applicable == 23


def test_range_starting_at_three() -> None:
    report = run_range(1, 50, RunConfig(claims=list(CLAIMS)))
    assert report.primes_evaluated == 14
    assert report.identity_failures() == 0
    w1 = next(summary for summary in report.identities if summary.id == "W1")
    assert w1.applicable == len([p for p in primes_in_range(5, 50) if p % 4 == 3])


def test_empty_range_gives_empty_report() -> None:
    report = run_range(100, 100, make_config())
    assert report.primes_evaluated == 0
    assert report.gap_stats == []
    assert all(summary.applicable == 0 for summary in report.claims)
    assert report.summary_text() == "No primes in [100, 100)."


def test_run_range_rejects_bad_config() -> None:
    with pytest.raises(UsageError):
        run_range(5, 100, make_config(eps_grid=[0.5]))
    with pytest.raises(UsageError):
        run_range(5, 100, make_config(jobs=0))
    with pytest.raises(UsageError):
        run_range(100, 5, make_config())


def test_t11_pos_fails_exactly_on_three_mod_eight() -> None:
    report = run_range(5, 1000, make_config(witness_cap=3))
    t11 = next(summary for summary in report.claims if summary.id == "T1.1-pos")
    three_mod_eight = [p for p in primes_in_range(5, 1000) if p % 8 == 3]
    assert t11.failed == len(three_mod_eight)
    assert len(t11.witnesses) == 3
    assert [w.p for w in t11.witnesses] == three_mod_eight[:3]
    assert t11.witnesses[0].lhs == "1"
    assert t11.witnesses[0].rhs == "5/2"
    assert t11.by_class["r8"]["3"].failed == len(three_mod_eight)
    assert t11.by_class["r8"]["3"].passed == 0
    assert t11.by_class["r8"]["7"].failed == 0
    assert list(t11.by_class) == ["r4", "r8", "r12"]


@pytest.mark.slow
def test_claims_suite_below_ten_thousand() -> None:
    report = run_range(5, 10**4, make_config(identities=list(IDENTITIES)))
    assert report.identity_failures() == 0
    by_id = {summary.id: summary for summary in report.claims}
    three_mod_eight = sum(1 for p in primes_in_range(5, 10**4) if p % 8 == 3)
    assert by_id["T1.1-pos"].failed == three_mod_eight
    assert by_id["C1.2-pos"].failed == three_mod_eight
    assert by_id["C1.7-pos"].failed == three_mod_eight
    for claim in ALWAYS_PASSING:
        assert by_id[claim.value].failed == 0


def test_report_is_independent_of_job_count() -> None:
    config = make_config(identities=list(IDENTITIES), eps_grid=[0.1, 0.25, 0.4])
    serial = run_range(5, 600, config)
    config_parallel = make_config(
        identities=list(IDENTITIES), eps_grid=[0.1, 0.25, 0.4], jobs=3
    )
    parallel = run_range(5, 600, config_parallel)
    assert serial.to_json() == parallel.to_json()
    assert serial.timing is None


def test_timing_is_opt_in() -> None:
    report = run_range(5, 30, make_config(include_timing=True, jobs=2))
    assert report.timing is not None
    assert report.timing.jobs == 2


def test_report_json_round_trip() -> None:
    report = run_range(5, 200, make_config())
    text = report.to_json()
    payload = json.loads(text)
    assert payload["range"] == [5, 200]
    assert {"pass", "fail"} <= set(payload["claims"][0])
    assert "class" in payload["gap_stats"][0]
    assert "jobs" not in payload["config"]
    assert VerificationReport.from_json(text) == report


def test_gap_statistics_for_seven() -> None:
    report = run_range(7, 8, make_config())
    rows = {(row.selector, row.residue_class): row for row in gap_statistics(report, 0.25)}
    row = rows[("S_2", "r8=7")]
    assert row.min_abs == pytest.approx(0.5 / 7**0.25)
    assert row.argmin_p == 7
    assert ("S_3", "r12=7") in rows


def test_gap_statistics_exact_classes_are_zero() -> None:
    report = run_range(5, 500, make_config(eps_grid=[0.1, 0.4]))
    rows = gap_statistics(report, 0.1)
    for row in rows:
        if row.selector == "S_2" and row.residue_class in ("r8=1", "r8=5"):
            assert row.min_abs == 0
        if row.selector == "S_4" and row.residue_class == "r8=3":
            assert row.min_abs == 0
        modulus, residue = row.residue_class[1:].split("=")
        assert row.argmin_p % int(modulus) == int(residue)


def test_gap_statistics_requires_grid_eps() -> None:
    report = run_range(5, 50, make_config())
    with pytest.raises(UsageError):
        gap_statistics(report, 0.3)


def test_run_range_fills_cache_file(tmp_path: Path) -> None:
    cache_path = tmp_path / "h.csv"
    config = make_config(identities=[IdentityId.W1], claims=[], cache_path=cache_path)
    run_range(5, 60, config)
    lines = cache_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "d,h"
    assert "-7,1" in lines
    assert "-59,3" in lines


def test_expectation_snapshot(tmp_path: Path) -> None:
    path = tmp_path / "expect.json"
    report = run_range(5, 300, make_config())
    save_expectations(report, path)
    assert compare_expectations(report, path) == []

    payload = json.loads(path.read_text(encoding="utf-8"))
    payload["T1.1-pos"]["fail"] += 1
    path.write_text(json.dumps(payload), encoding="utf-8")
    mismatches = compare_expectations(report, path)
    assert len(mismatches) == 1
    assert mismatches[0].startswith("T1.1-pos")


def test_prime_batches_are_ordered_and_bounded() -> None:
    batches = list(prime_batches(1, 1000, 50))
    assert all(0 < len(batch) <= 50 for batch in batches)
    assert [p for batch in batches for p in batch] == list(primes_in_range(3, 1000))
    assert list(prime_batches(100, 100)) == []


def test_run_range_draws_primes_on_demand(monkeypatch: pytest.MonkeyPatch) -> None:
    drawn: list[int] = []
    seen_at_first_evaluation: list[int] = []

    def counting_primes(lo: int, hi: int):
        for p in primes_in_range(lo, hi):
            drawn.append(p)
            yield p

    original = verify_module.evaluate_prime

    def recording_evaluate(p, config, class_number):
        if not seen_at_first_evaluation:
            seen_at_first_evaluation.append(len(drawn))
        return original(p, config, class_number)

    monkeypatch.setattr(verify_module, "primes_in_range", counting_primes)
    monkeypatch.setattr(verify_module, "evaluate_prime", recording_evaluate)
    report = run_range(5, 3000, RunConfig(identities=[IdentityId.QN]))
    assert report.primes_evaluated == len(drawn) == 428
    assert seen_at_first_evaluation[0] <= PRIMES_PER_TASK


def test_table_limit_reaches_every_sum(monkeypatch: pytest.MonkeyPatch) -> None:
    tabled = run_range(5, 300, make_config(identities=list(IDENTITIES)))

    def no_tables(p, *, limit=0):
        raise AssertionError(f"table built for p={p}")

    monkeypatch.setattr(characters, "legendre_table", no_tables)
    config = make_config(identities=list(IDENTITIES), table_mode_limit=3, stream_chunk=17)
    streamed = run_range(5, 300, config)
    assert streamed.to_json() == tabled.to_json()


@pytest.mark.slow
def test_report_is_identical_with_eight_jobs() -> None:
    def config(jobs: int) -> RunConfig:
        return make_config(identities=list(IDENTITIES), eps_grid=[0.1, 0.25, 0.4], jobs=jobs)

    serial = run_range(5, 10**4, config(1))
    parallel = run_range(5, 10**4, config(8))
    assert serial.to_json() == parallel.to_json()
