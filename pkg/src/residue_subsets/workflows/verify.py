"""Entry points for verifying identities and claims over ranges of primes."""
from __future__ import annotations

import logging
import time
from collections import defaultdict, deque
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from pathlib import Path
from typing import (
    Callable,
    Deque,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

from residue_subsets.arith.characters import STREAM_CHUNK, TABLE_MODE_LIMIT
from residue_subsets.arith.primes import classify, primes_in_range, require_above_three
from residue_subsets.classnum.forms import class_number_forms
from residue_subsets.config.settings import DEFAULT_EPS_GRID
from residue_subsets.domain.models import GAP_SELECTORS, ClassifiedPrime, SubsetSelector
from residue_subsets.domain.reports import (
    CheckSummary,
    ClaimSummary,
    GapStat,
    ReportConfig,
    Tally,
    Timing,
    VerificationReport,
    Witness,
)
from residue_subsets.errors import ResidueSubsetsError, UsageError, VerificationError
from residue_subsets.services.cache import ClassNumberCache
from residue_subsets.workflows.registry import (
    CLAIMS,
    IDENTITIES,
    CheckOutcome,
    CheckStatus,
    ClaimId,
    IdentityId,
    PrimeContext,
)

LOGGER = logging.getLogger(__name__)

CLASS_KEYS = (4, 8, 12)
PRIMES_PER_TASK = 64
TASKS_PER_WORKER = 2


def format_number(value) -> str:
    """Exact text for integers and fractions, fixed six decimals for reals."""

    if isinstance(value, float):
        return f"{value:.6f}"
    return str(Fraction(value))


def verify_prime(
    cp: ClassifiedPrime,
    ids: Iterable[IdentityId],
    *,
    class_number: Callable[[int], int] = class_number_forms,
    max_k: int = 50,
    context: Optional[PrimeContext] = None,
) -> List[CheckOutcome]:
    """Evaluate each requested identity at p; inapplicable ones are reported as such."""

    ctx = context or PrimeContext(cp=cp, class_number=class_number, max_k=max_k)
    outcomes: List[CheckOutcome] = []
    for identity in ids:
        spec = IDENTITIES[IdentityId(identity)]
        if not spec.applies(cp):
            outcomes.append(CheckOutcome(spec.id.value, CheckStatus.NOT_APPLICABLE))
            continue
        try:
            passed, lhs, rhs, detail = spec.evaluate(ctx)
        except ResidueSubsetsError as exc:
            LOGGER.exception("Identity %s failed to evaluate at p=%d", spec.id.value, cp.p)
            raise VerificationError(str(exc), p=cp.p, check_id=spec.id.value) from exc
        status = CheckStatus.PASS if passed else CheckStatus.FAIL
        if not passed:
            LOGGER.warning("Identity %s fails at p=%d: %s vs %s", spec.id.value, cp.p, lhs, rhs)
        outcomes.append(CheckOutcome(spec.id.value, status, lhs, rhs, detail=detail))
    return outcomes


def check_claims(
    cp: ClassifiedPrime,
    claims: Optional[Iterable[ClaimId]] = None,
    *,
    context: Optional[PrimeContext] = None,
) -> List[CheckOutcome]:
    """Evaluate each claim literally against brute-force counts; nothing is assumed true."""

    require_above_three(cp, "check_claims")
    ctx = context or PrimeContext(cp=cp)
    outcomes: List[CheckOutcome] = []
    for claim in claims if claims is not None else CLAIMS:
        spec = CLAIMS[ClaimId(claim)]
        if not spec.applies(cp):
            outcomes.append(CheckOutcome(spec.id.value, CheckStatus.NOT_APPLICABLE))
            continue
        try:
            readings = spec.deviations(ctx)
        except ResidueSubsetsError as exc:
            raise VerificationError(str(exc), p=cp.p, check_id=spec.id.value) from exc
        if spec.relation == "=":
            passed = all(gap == 0 for _, _, gap in readings)
            lhs, rhs, gap = max(readings, key=lambda item: abs(item[2]))
        else:
            passed = all(gap > 0 for _, _, gap in readings)
            lhs, rhs, gap = min(readings, key=lambda item: item[2])
        status = CheckStatus.PASS if passed else CheckStatus.FAIL
        outcomes.append(CheckOutcome(spec.id.value, status, lhs, rhs, gap=Fraction(gap)))
    return outcomes


@dataclass(slots=True)
class RunConfig:
    """What a range run evaluates and how."""

    identities: List[IdentityId] = field(default_factory=lambda: list(IDENTITIES))
    claims: List[ClaimId] = field(default_factory=list)
    eps_grid: List[float] = field(default_factory=lambda: list(DEFAULT_EPS_GRID))
    jobs: int = 1
    cache_path: Optional[Path] = None
    witness_cap: int = 10
    max_k: int = 50
    table_mode_limit: int = TABLE_MODE_LIMIT
    stream_chunk: int = STREAM_CHUNK
    include_timing: bool = False

    def validate(self) -> None:
        for eps in self.eps_grid:
            if not 0.0 < eps < 0.5:
                raise UsageError(f"eps {eps} must lie strictly between 0 and 1/2")
        if self.jobs < 1:
            raise UsageError("jobs must be a positive integer")
        if self.stream_chunk < 1:
            raise UsageError("stream_chunk must be a positive integer")

    def report_config(self) -> ReportConfig:
        return ReportConfig(
            identities=[identity.value for identity in self.identities],
            claims=[claim.value for claim in self.claims],
            eps_grid=sorted(self.eps_grid),
            witness_cap=self.witness_cap,
            max_k=self.max_k,
        )


@dataclass(slots=True)
class PrimeResult:
    """Everything evaluated at one prime; plain data so it crosses process boundaries."""

    cp: ClassifiedPrime
    identities: List[CheckOutcome]
    claims: List[CheckOutcome]
    gaps: List[Tuple[str, str, Fraction]]


def _gap_class(cp: ClassifiedPrime, sel: SubsetSelector) -> str:
    return cp.class_key(12) if sel.k == 3 else cp.class_key(8)


def evaluate_prime(
    p: int, config: RunConfig, class_number: Callable[[int], int]
) -> PrimeResult:
    cp = classify(p)
    ctx = PrimeContext(
        cp=cp,
        class_number=class_number,
        max_k=config.max_k,
        table_limit=config.table_mode_limit,
        chunk=config.stream_chunk,
    )
    identities = verify_prime(cp, config.identities, context=ctx)
    claims: List[CheckOutcome] = []
    gaps: List[Tuple[str, str, Fraction]] = []
    if p > 3:
        claims = check_claims(cp, config.claims, context=ctx)
        for sel in GAP_SELECTORS:
            gaps.append((sel.label, _gap_class(cp, sel), ctx.count(sel).gap))
    return PrimeResult(cp=cp, identities=identities, claims=claims, gaps=gaps)


def _evaluate_chunk(
    primes: Sequence[int], config: RunConfig, known: Dict[int, int]
) -> Tuple[List[PrimeResult], Dict[int, int]]:
    cache = ClassNumberCache(known)
    results = [evaluate_prime(p, config, cache) for p in primes]
    LOGGER.debug("Evaluated %d primes up to %d", len(results), primes[-1])
    return results, cache.fresh_entries()


@dataclass(slots=True)
class _GapAccumulator:
    count: int = 0
    total: float = 0.0
    low: float = float("inf")
    high: float = float("-inf")
    min_abs: float = float("inf")
    argmin_abs_p: int = 0

    def add(self, p: int, value: float) -> None:
        self.count += 1
        self.total += value
        self.low = min(self.low, value)
        self.high = max(self.high, value)
        if abs(value) < self.min_abs:
            self.min_abs = abs(value)
            self.argmin_abs_p = p


class _ReportBuilder:
    """Single-threaded merge of per-prime results, in ascending p."""

    def __init__(self, lo: int, hi: int, config: RunConfig) -> None:
        self._config = config
        self._lo, self._hi = lo, hi
        self._primes = 0
        self._identities = {
            identity.value: CheckSummary(
                id=identity.value, description=IDENTITIES[identity].description
            )
            for identity in config.identities
        }
        self._claims = {
            claim.value: ClaimSummary(
                id=claim.value,
                description=CLAIMS[claim].statement,
                relation=CLAIMS[claim].relation,
            )
            for claim in config.claims
        }
        self._gaps: Dict[Tuple[float, str, str], _GapAccumulator] = defaultdict(_GapAccumulator)

    def _record(self, summary: CheckSummary, outcome: CheckOutcome, p: int) -> bool:
        if outcome.status is CheckStatus.NOT_APPLICABLE:
            return False
        summary.applicable += 1
        if outcome.status is CheckStatus.PASS:
            summary.passed += 1
            return True
        summary.failed += 1
        if len(summary.witnesses) < self._config.witness_cap:
            summary.witnesses.append(
                Witness(
                    p=p,
                    id=outcome.check_id,
                    lhs=format_number(outcome.lhs),
                    rhs=format_number(outcome.rhs),
                    gap=None if outcome.gap is None else format_number(outcome.gap),
                    detail=outcome.detail,
                )
            )
        return True

    def add(self, result: PrimeResult) -> None:
        cp = result.cp
        self._primes += 1
        for outcome in result.identities:
            self._record(self._identities[outcome.check_id], outcome, cp.p)
        for outcome in result.claims:
            summary = self._claims[outcome.check_id]
            if not self._record(summary, outcome, cp.p):
                continue
            for modulus in CLASS_KEYS:
                classes = summary.by_class.setdefault(f"r{modulus}", {})
                tally = classes.setdefault(str(cp.p % modulus), Tally())
                if outcome.status is CheckStatus.PASS:
                    tally.passed += 1
                else:
                    tally.failed += 1
        for selector, class_key, gap in result.gaps:
            for eps in self._config.eps_grid:
                value = float(gap) / cp.p ** (0.5 - eps)
                self._gaps[(eps, selector, class_key)].add(cp.p, value)

    def build(self, timing: Optional[Timing]) -> VerificationReport:
        for summary in self._claims.values():
            summary.by_class = {
                key: dict(sorted(classes.items(), key=lambda item: int(item[0])))
                for key, classes in sorted(
                    summary.by_class.items(), key=lambda item: int(item[0][1:])
                )
            }
        selector_order = {sel.label: index for index, sel in enumerate(GAP_SELECTORS)}
        ordered = sorted(
            self._gaps.items(),
            key=lambda item: (
                item[0][0],
                selector_order[item[0][1]],
                int(item[0][2].split("=")[1]),
            ),
        )
        gap_stats = [
            GapStat(
                eps=eps,
                selector=selector,
                residue_class=class_key,
                count=acc.count,
                min=acc.low,
                max=acc.high,
                mean=acc.total / acc.count,
                min_abs=acc.min_abs,
                argmin_abs_p=acc.argmin_abs_p,
            )
            for (eps, selector, class_key), acc in ordered
        ]
        return VerificationReport(
            bounds=[self._lo, self._hi],
            config=self._config.report_config(),
            primes_evaluated=self._primes,
            identities=list(self._identities.values()),
            claims=list(self._claims.values()),
            gap_stats=gap_stats,
            timing=timing,
        )


def prime_batches(lo: int, hi: int, size: int = PRIMES_PER_TASK) -> Iterator[List[int]]:
    """Odd primes of [lo, hi) in ascending batches of at most ``size``, sieved on demand."""

    primes = (p for p in primes_in_range(lo, hi) if p > 2)
    while batch := list(islice(primes, size)):
        yield batch


def _pooled_results(
    pool: ProcessPoolExecutor,
    batches: Iterator[List[int]],
    config: RunConfig,
    known: Dict[int, int],
) -> Iterator[Tuple[List[PrimeResult], Dict[int, int]]]:
    # bounded window of in-flight batches, drained in submission order
    pending: Deque[Future] = deque()
    for batch in batches:
        pending.append(pool.submit(_evaluate_chunk, batch, config, known))
        if len(pending) >= TASKS_PER_WORKER * config.jobs:
            yield pending.popleft().result()
    while pending:
        yield pending.popleft().result()


def run_range(lo: int, hi: int, config: Optional[RunConfig] = None) -> VerificationReport:
    """Verify every odd prime in [lo, hi); the report does not depend on ``jobs``."""

    config = config or RunConfig()
    config.validate()
    if lo > hi:
        raise UsageError(f"Inverted range [{lo}, {hi})")
    started = time.perf_counter()
    cache = ClassNumberCache.from_path(config.cache_path)
    batches = prime_batches(lo, hi)
    LOGGER.info("Verifying primes in [%d, %d) with %d job(s)", lo, hi, config.jobs)

    builder = _ReportBuilder(lo, hi, config)
    if config.jobs == 1:
        for batch in batches:
            for p in batch:
                builder.add(evaluate_prime(p, config, cache))
    else:
        known = cache.snapshot()
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for results, fresh in _pooled_results(pool, batches, config, known):
                for result in results:
                    builder.add(result)
                cache.merge(fresh.items())

    if config.cache_path is not None:
        cache.save(config.cache_path)
    timing = None
    if config.include_timing:
        timing = Timing(elapsed_seconds=round(time.perf_counter() - started, 3), jobs=config.jobs)
    report = builder.build(timing)
    LOGGER.info(
        "Finished [%d, %d): %d identity failure(s), %d claim failure(s)",
        lo,
        hi,
        report.identity_failures(),
        report.claim_failures(),
    )
    return report


@dataclass(frozen=True, slots=True)
class GapRow:
    selector: str
    residue_class: str
    min_abs: float
    argmin_p: int


def gap_statistics(report: VerificationReport, eps: float) -> List[GapRow]:
    """Smallest |gap| / p^(1/2 - eps) per selector and residue class, and where it occurs.

    Evidence about the lower envelope only; no constant is certified.
    """

    if eps not in report.config.eps_grid:
        raise UsageError(f"eps {eps} is not in the report grid {report.config.eps_grid}")
    return [
        GapRow(stat.selector, stat.residue_class, stat.min_abs, stat.argmin_abs_p)
        for stat in report.gap_stats
        if stat.eps == eps
    ]
