"""CSV and JSON writers for count records, prefix profiles and claim expectations."""
from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, TextIO

import numpy as np
import pandas as pd

from residue_subsets.arith.characters import legendre_table
from residue_subsets.domain.models import CountRecord, PartialSumProfile
from residue_subsets.domain.reports import VerificationReport
from residue_subsets.errors import UsageError

LOGGER = logging.getLogger(__name__)

COUNT_COLUMNS = [
    "p",
    "class4",
    "class8",
    "class12",
    "selector",
    "Q",
    "N",
    "size",
    "main_term",
    "gap",
    "normalized_gap",
]
PROFILE_COLUMNS = ["m", "chi", "prefix"]


def format_rational(value: Fraction, *, with_decimal: bool = False) -> str:
    """``5/2`` or, for people, ``5/2 (2.5)``; integers print without a denominator."""

    text = str(Fraction(value))
    if with_decimal and Fraction(value).denominator != 1:
        text += f" ({float(value):g})"
    return text


def count_records_frame(
    records: Iterable[CountRecord], *, with_decimal: bool = False
) -> pd.DataFrame:
    """One row per record, ascending p then selector."""

    ordered = sorted(records, key=lambda record: (record.p, record.selector.sort_key()))
    rows: List[Dict[str, Any]] = []
    for record in ordered:
        rows.append(
            {
                "p": record.p,
                "class4": record.p % 4,
                "class8": record.p % 8,
                "class12": record.p % 12,
                "selector": record.selector.label,
                "Q": record.Q,
                "N": record.N,
                "size": record.size,
                "main_term": format_rational(record.main_term, with_decimal=with_decimal),
                "gap": format_rational(record.gap, with_decimal=with_decimal),
                "normalized_gap": round(record.normalized_gap, 6),
            }
        )
    return pd.DataFrame(rows, columns=COUNT_COLUMNS)


def write_count_records(records: Iterable[CountRecord], stream: TextIO) -> None:
    count_records_frame(records).to_csv(stream, index=False, lineterminator="\n")


def profile_frame(profile: PartialSumProfile) -> pd.DataFrame:
    """``m,chi,prefix`` for m = 0 .. p-1."""

    if profile.prefix is None:
        raise UsageError("Profile was computed in streaming mode; nothing to dump")
    m = np.arange(profile.p, dtype=np.int64)
    return pd.DataFrame(
        {"m": m, "chi": legendre_table(profile.p), "prefix": profile.prefix},
        columns=PROFILE_COLUMNS,
    )


def write_profile(profile: PartialSumProfile, path: Path) -> None:
    profile_frame(profile).to_csv(path, index=False, lineterminator="\n")
    LOGGER.info("Wrote prefix profile of p=%d to %s", profile.p, path)


def claim_expectations(report: VerificationReport) -> Dict[str, Any]:
    """Per-claim totals and per-class tallies: the part of a report a snapshot pins down."""

    return {
        summary.id: {
            "pass": summary.passed,
            "fail": summary.failed,
            "by_class": {
                key: {
                    residue: tally.model_dump(by_alias=True)
                    for residue, tally in classes.items()
                }
                for key, classes in summary.by_class.items()
            },
        }
        for summary in report.claims
    }


def save_expectations(report: VerificationReport, path: Path) -> None:
    payload = json.dumps(claim_expectations(report), indent=2, sort_keys=True)
    path.write_text(payload + "\n", encoding="utf-8")
    LOGGER.info("Saved claim expectations to %s", path)


def compare_expectations(report: VerificationReport, path: Path) -> List[str]:
    """Differences between the report's claim outcomes and a saved snapshot."""

    expected = json.loads(path.read_text(encoding="utf-8"))
    actual = claim_expectations(report)
    mismatches: List[str] = []
    for claim_id in sorted(set(expected) | set(actual)):
        if claim_id not in actual:
            mismatches.append(f"{claim_id}: expected in snapshot but not evaluated")
        elif claim_id not in expected:
            mismatches.append(f"{claim_id}: evaluated but missing from snapshot")
        elif expected[claim_id] != actual[claim_id]:
            want, got = expected[claim_id], actual[claim_id]
            mismatches.append(
                f"{claim_id}: expected {want['pass']} pass/{want['fail']} fail,"
                f" got {got['pass']} pass/{got['fail']} fail"
            )
    for line in mismatches:
        LOGGER.warning("Expectation mismatch: %s", line)
    return mismatches
