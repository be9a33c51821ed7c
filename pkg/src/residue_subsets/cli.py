"""Command-line front end: counts, sums, class numbers, L-values and verification.

Exit codes: 0 success, 1 a verified failure was found, 2 usage or domain error.
Primes are capped below 2**32.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

import pandas as pd
from pydantic import ValidationError

from residue_subsets.arith.characters import make_character
from residue_subsets.arith.primes import classify, primes_in_range
from residue_subsets.charsum.sums import partial_sum, prefix_profile
from residue_subsets.classnum.forms import class_number_record
from residue_subsets.classnum.lvalues import l_value_record
from residue_subsets.config.settings import AppSettings, get_settings
from residue_subsets.counts.subsets import count_brute
from residue_subsets.domain.models import CharacterKind, SubsetSelector
from residue_subsets.domain.reports import VerificationReport
from residue_subsets.errors import (
    ConsistencyError,
    DomainError,
    UsageError,
    VerificationError,
)
from residue_subsets.services.exports import (
    compare_expectations,
    count_records_frame,
    save_expectations,
    write_profile,
)
from residue_subsets.workflows.registry import parse_claim_ids, parse_identity_ids
from residue_subsets.workflows.verify import RunConfig, gap_statistics, run_range

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

FORMATS = ("csv", "json", "table")
FAMILIES = {kind.value: kind for kind in CharacterKind}
SUMMARY_COLUMNS = ["kind", "id", "applicable", "pass", "fail"]


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns the exit code."""

    def error(self, message: str) -> None:  # noqa: D401
        raise UsageError(message)


def _default_format(stream: TextIO) -> str:
    return "table" if stream.isatty() else "csv"


def _emit(frame: pd.DataFrame, fmt: str, stream: TextIO) -> None:
    if fmt == "csv":
        frame.to_csv(stream, index=False, lineterminator="\n")
    elif fmt == "json":
        stream.write(frame.to_json(orient="records", indent=2) + "\n")
    else:
        stream.write(frame.to_string(index=False) + "\n")


def _selectors(args: argparse.Namespace) -> List[SubsetSelector]:
    selectors: List[SubsetSelector] = []
    if args.all_selectors:
        return [
            SubsetSelector.multiples(2),
            SubsetSelector.multiples(3),
            SubsetSelector.multiples(4),
            SubsetSelector.odds(),
            SubsetSelector.s2_minus_s4(),
        ]
    selectors.extend(SubsetSelector.multiples(k) for k in args.k or [])
    if args.odds:
        selectors.append(SubsetSelector.odds())
    if args.s2_minus_s4:
        selectors.append(SubsetSelector.s2_minus_s4())
    if not selectors:
        raise UsageError(
            "Choose a subset: --k K, --odds, --s2-minus-s4 or --all-selectors"
        )
    return selectors


def cmd_count(args: argparse.Namespace, out: TextIO, settings: AppSettings) -> int:
    selectors = _selectors(args)
    if args.p is not None:
        primes = [classify(args.p).p]
    elif args.min is not None and args.max is not None:
        if args.min >= args.max:
            raise UsageError(f"--min {args.min} must be below --max {args.max}")
        primes = [p for p in primes_in_range(args.min, args.max) if p > 2]
    else:
        raise UsageError("Give --p, or --min and --max")

    records = []
    for p in primes:
        for sel in selectors:
            if sel.k is not None and sel.k >= p:
                if args.p is not None:
                    raise UsageError(f"k={sel.k} must be below p={p}")
                continue
            records.append(
                count_brute(
                    p,
                    sel,
                    eps=args.eps,
                    limit=settings.table_mode_limit,
                    chunk=settings.stream_chunk,
                )
            )
    fmt = args.format or _default_format(out)
    _emit(count_records_frame(records, with_decimal=fmt == "table"), fmt, out)
    return EXIT_OK


def cmd_sum(args: argparse.Namespace, out: TextIO, settings: AppSettings) -> int:
    cp = classify(args.p)
    value = partial_sum(
        cp.p, 1, args.den, limit=settings.table_mode_limit, chunk=settings.stream_chunk
    )
    if args.dump:
        profile = prefix_profile(cp.p, limit=settings.table_mode_limit)
        write_profile(profile, Path(args.dump))
    out.write(f"{value}\n")
    return EXIT_OK


def cmd_classnum(args: argparse.Namespace, out: TextIO, settings: AppSettings) -> int:
    if args.d is not None:
        d = args.d
    elif args.p is not None:
        chi = make_character(FAMILIES[args.family], classify(args.p))
        if not chi.is_odd:
            raise DomainError(
                f"The {args.family} character for p={args.p} is even;"
                " no imaginary quadratic field"
            )
        d = chi.discriminant
    else:
        raise UsageError("Give --d, or --p with --family")
    record = class_number_record(d)
    frame = pd.DataFrame(
        [{"d": record.d, "h": record.h, "w": record.w, "method": record.method}]
    )
    _emit(frame, args.format or _default_format(out), out)
    return EXIT_OK


def cmd_lvalue(args: argparse.Namespace, out: TextIO, settings: AppSettings) -> int:
    chi = make_character(FAMILIES[args.family], classify(args.p))
    record = l_value_record(chi, args.terms, limit=settings.table_mode_limit)
    frame = pd.DataFrame(
        [
            {
                "p": chi.p,
                "family": chi.kind.value,
                "d": chi.discriminant,
                "exact": round(record.exact_value, 10),
                "series": round(record.series_value, 10),
                "terms": record.series_terms,
                "tail_bound": round(record.tail_bound, 10),
                "within_bound": record.within_tail_bound(),
            }
        ]
    )
    _emit(frame, args.format or _default_format(out), out)
    return EXIT_OK if record.within_tail_bound() else EXIT_FAILURE


def _summary_frame(report: VerificationReport) -> pd.DataFrame:
    rows = [
        {
            "kind": kind,
            "id": summary.id,
            "applicable": summary.applicable,
            "pass": summary.passed,
            "fail": summary.failed,
        }
        for kind, summaries in (("identity", report.identities), ("claim", report.claims))
        for summary in summaries
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def cmd_verify(args: argparse.Namespace, out: TextIO, settings: AppSettings) -> int:
    if args.min >= args.max:
        raise UsageError(f"--min {args.min} must be below --max {args.max}")
    if args.max > settings.range_cap:
        raise UsageError(
            f"--max {args.max} exceeds the range cap {settings.range_cap}"
        )
    identities = parse_identity_ids(args.identities) if args.identities else []
    claims = parse_claim_ids(args.claims) if args.claims else []
    if not identities and not claims:
        identities = parse_identity_ids("all")
    config = RunConfig(
        identities=identities,
        claims=claims,
        eps_grid=sorted(set(args.eps or settings.eps_grid)),
        jobs=settings.jobs if args.jobs is None else args.jobs,
        cache_path=Path(args.cache) if args.cache else settings.cache_path,
        witness_cap=(
            settings.witness_cap if args.witness_cap is None else args.witness_cap
        ),
        max_k=settings.max_k,
        table_mode_limit=settings.table_mode_limit,
        stream_chunk=settings.stream_chunk,
        include_timing=args.timing,
    )
    report = run_range(args.min, args.max, config)

    fmt = args.format or _default_format(out)
    if fmt == "json":
        text = report.to_json() + "\n"
    elif fmt == "csv":
        text = _summary_frame(report).to_csv(index=False, lineterminator="\n")
    else:
        text = report.summary_text() + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)

    if args.save_expect:
        save_expectations(report, Path(args.save_expect))
    if report.identity_failures():
        return EXIT_FAILURE
    if args.expect and compare_expectations(report, Path(args.expect)):
        return EXIT_FAILURE
    return EXIT_OK


def cmd_gaps(args: argparse.Namespace, out: TextIO, settings: AppSettings) -> int:
    text = Path(args.report).read_text(encoding="utf-8")
    report = VerificationReport.from_json(text)
    rows = gap_statistics(report, args.eps)
    frame = pd.DataFrame(
        [
            {
                "class": row.residue_class,
                "selector": row.selector,
                "min_abs": row.min_abs,
                "argmin_p": row.argmin_p,
            }
            for row in rows
        ],
        columns=["class", "selector", "min_abs", "argmin_p"],
    )
    _emit(frame, args.format or _default_format(out), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="residue-subsets", description=__doc__)
    parser.add_argument("--log-level", help="logging level (default from settings)")
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=_Parser
    )

    count = commands.add_parser("count", help="residue counts inside a subset")
    count.add_argument("--p", type=int)
    count.add_argument("--min", type=int)
    count.add_argument("--max", type=int)
    count.add_argument("--k", type=int, action="append", help="S_k; may repeat")
    count.add_argument("--odds", action="store_true")
    count.add_argument("--s2-minus-s4", action="store_true")
    count.add_argument("--all-selectors", action="store_true")
    count.add_argument("--eps", type=float, default=0.25)
    count.add_argument("--format", choices=FORMATS)

    summ = commands.add_parser("sum", help="S(1, p/den)")
    summ.add_argument("--p", type=int, required=True)
    summ.add_argument("--den", type=int, default=2)
    summ.add_argument("--dump", help="write the m,chi,prefix profile CSV here")

    classnum = commands.add_parser("classnum", help="class number h(d)")
    classnum.add_argument("--d", type=int)
    classnum.add_argument("--p", type=int)
    classnum.add_argument("--family", choices=sorted(FAMILIES), default="p")
    classnum.add_argument("--format", choices=FORMATS)

    lvalue = commands.add_parser("lvalue", help="L(1, chi) exactly and by series")
    lvalue.add_argument("--p", type=int, required=True)
    lvalue.add_argument("--family", choices=sorted(FAMILIES), default="p")
    lvalue.add_argument("--terms", type=int, default=10**5)
    lvalue.add_argument("--format", choices=FORMATS)

    verify = commands.add_parser(
        "verify", help="identities and claims over a prime range"
    )
    verify.add_argument("--min", type=int, required=True)
    verify.add_argument("--max", type=int, required=True)
    verify.add_argument("--identities", help="comma-separated ids or 'all'")
    verify.add_argument("--claims", help="comma-separated ids or 'all'")
    verify.add_argument("--eps", type=float, action="append", help="may repeat")
    verify.add_argument("--jobs", type=int)
    verify.add_argument("--cache", help="class-number cache CSV")
    verify.add_argument("--witness-cap", type=int)
    verify.add_argument("--format", choices=FORMATS)
    verify.add_argument("--output")
    verify.add_argument("--expect", help="claim snapshot to compare against")
    verify.add_argument("--save-expect", help="write a claim snapshot here")
    verify.add_argument("--timing", action="store_true")

    gaps = commands.add_parser("gaps", help="minimum normalized gaps from a saved report")
    gaps.add_argument("--report", required=True)
    gaps.add_argument("--eps", type=float, required=True)
    gaps.add_argument("--format", choices=FORMATS)
    return parser


def main(
    argv: Optional[Sequence[str]] = None, *, out: Optional[TextIO] = None
) -> int:
    """Entry point; returns the process exit code."""

    out = out or sys.stdout
    try:
        settings = get_settings()
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=(args.log_level or settings.log_level).upper(),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        handler = {
            "count": cmd_count,
            "verify": cmd_verify,
            "sum": cmd_sum,
            "classnum": cmd_classnum,
            "lvalue": cmd_lvalue,
            "gaps": cmd_gaps,
        }[args.command]
        return handler(args, out, settings)
    except (UsageError, DomainError, ValidationError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ConsistencyError, VerificationError) as exc:
        sys.stderr.write(f"failure: {exc}\n")
        return EXIT_FAILURE
