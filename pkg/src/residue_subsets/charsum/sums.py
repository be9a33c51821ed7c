"""Partial sums of the Legendre symbol, vanishing sums and the Polya-Vinogradov statistic."""
from __future__ import annotations

import logging
import math
from typing import List, Tuple

import numpy as np

from residue_subsets.arith.characters import (
    STREAM_CHUNK,
    TABLE_MODE_LIMIT,
    legendre_chunks,
    legendre_sum,
    legendre_table,
)
from residue_subsets.domain.models import ClassifiedPrime, PartialSumProfile, VanishingOutcome
from residue_subsets.errors import ConsistencyError, UsageError

LOGGER = logging.getLogger(__name__)

SUPPORTED_DENOMINATORS = (2, 3, 4)


def cutoff(p: int, den: int) -> int:
    """Largest m with m < p/den; equals floor(p/den) because p/den is never integral."""

    return p // den


def partial_sum(
    p: int, num: int, den: int, *, limit: int = TABLE_MODE_LIMIT, chunk: int = STREAM_CHUNK
) -> int:
    """S(1, p/den): the sum of (m/p) over 1 <= m < p/den."""

    if num != 1 or den not in SUPPORTED_DENOMINATORS:
        raise UsageError(f"Only cutoffs p/2, p/3, p/4 are supported, got {num}p/{den}")
    if p <= den:
        raise UsageError(f"Cutoff p/{den} needs p > {den}, got p={p}")
    return legendre_sum(p, 1, cutoff(p, den) + 1, limit=limit, chunk=chunk)


def interval_sum(
    p: int, M: int, N: int, *, limit: int = TABLE_MODE_LIMIT, chunk: int = STREAM_CHUNK
) -> int:
    """Sum of (m/p) for M <= m <= N, both ends included."""

    if not 0 <= M <= N <= p - 1:
        raise UsageError(f"Need 0 <= M <= N <= p-1, got M={M}, N={N}, p={p}")
    return legendre_sum(p, M, N + 1, limit=limit, chunk=chunk)


def prefix_profile(p: int, *, limit: int = TABLE_MODE_LIMIT) -> PartialSumProfile:
    """Materialised prefix sums prefix[j] = sum_{m<=j} (m/p) for j = 0 .. p-1."""

    prefix = np.cumsum(legendre_table(p, limit=limit), dtype=np.int64)
    if prefix[-1] != 0:
        raise ConsistencyError(f"Full-period sum of (m/{p}) is {prefix[-1]}, expected 0")
    return PartialSumProfile(
        p=p,
        max_prefix=int(prefix.max()),
        min_prefix=int(prefix.min()),
        prefix=prefix,
    )


def _streamed_extremes(p: int, *, limit: int, chunk: int) -> Tuple[int, int, int]:
    carry = 0
    high = low = 0
    for block in legendre_chunks(p, 1, p, limit=limit, chunk=chunk):
        running = np.cumsum(block, dtype=np.int64) + carry
        high = max(high, int(running.max()))
        low = min(low, int(running.min()))
        carry = int(running[-1])
    return high, low, carry


def pv_extremum(
    p: int, *, limit: int = TABLE_MODE_LIMIT, chunk: int = STREAM_CHUNK
) -> Tuple[int, float]:
    """Largest |interval sum| of (m/p) in one pass, with the bound sqrt(p) log p.

    Every interval sum is a difference of two prefixes, so the maximum is the
    spread between the highest and lowest prefix.
    """

    if p < 3:
        raise UsageError(f"pv_extremum needs p >= 3, got {p}")
    high, low, total = _streamed_extremes(p, limit=limit, chunk=chunk)
    if total != 0:
        raise ConsistencyError(f"Full-period sum of (m/{p}) is {total}, expected 0")
    bound = math.sqrt(p) * math.log(p)
    max_interval = high - low
    LOGGER.debug("p=%d: max interval %d, bound %.3f", p, max_interval, bound)
    if max_interval > bound:
        raise ConsistencyError(
            f"Polya-Vinogradov bound exceeded at p={p}: {max_interval} > {bound:.3f}"
        )
    return max_interval, bound


def vanishing_check(
    cp: ClassifiedPrime, *, limit: int = TABLE_MODE_LIMIT, chunk: int = STREAM_CHUNK
) -> List[VanishingOutcome]:
    """Evaluate whichever of the vanishing sums B1, B2, B3 applies to p."""

    p = cp.p
    outcomes: List[VanishingOutcome] = []
    if cp.r4 == 1:
        value = partial_sum(p, 1, 2, limit=limit, chunk=chunk)
        outcomes.append(VanishingOutcome("B1", value == 0, value))
    if cp.r8 == 3:
        # p = 3 gives the empty sum
        value = legendre_sum(p, 1, cutoff(p, 4) + 1, limit=limit, chunk=chunk)
        outcomes.append(VanishingOutcome("B2", value == 0, value))
    if cp.r8 == 7:
        value = interval_sum(p, -(-p // 4), p // 2, limit=limit, chunk=chunk)
        outcomes.append(VanishingOutcome("B3", value == 0, value))
    return outcomes
