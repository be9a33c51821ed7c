"""Primality, segmented prime enumeration and residue-class classification."""
from __future__ import annotations

import logging
import math
from typing import Iterator

import numpy as np

from residue_subsets.domain.models import ClassifiedPrime
from residue_subsets.errors import DomainError, UsageError

LOGGER = logging.getLogger(__name__)

PRIME_RANGE_CAP = 2**32
PRIMALITY_CAP = 2**64
DEFAULT_SEGMENT = 1 << 18

# Strong-probable-prime bases that are deterministic for every n < 3.3 * 10**24.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 0 <= n < 2**64."""

    if n < 0 or n >= PRIMALITY_CAP:
        raise DomainError(f"is_prime expects 0 <= n < 2**64, got {n}")
    if n < 2:
        return False
    for q in _WITNESSES:
        if n % q == 0:
            return n == q

    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for a in _WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _base_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain sieve of Eratosthenes."""

    if limit < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def prime_segments(
    lo: int, hi: int, *, segment_size: int = DEFAULT_SEGMENT
) -> Iterator[np.ndarray]:
    """Yield ascending int64 arrays of the primes in [lo, hi), one per segment.

    Memory stays O(segment_size + sqrt(hi)).
    """

    if lo > hi:
        raise UsageError(f"Inverted range [{lo}, {hi})")
    if hi > PRIME_RANGE_CAP:
        raise UsageError(f"Upper bound {hi} exceeds the range cap 2**32")
    lo = max(lo, 2)
    if lo >= hi:
        return

    base = _base_primes(math.isqrt(hi - 1))
    for start in range(lo, hi, segment_size):
        stop = min(start + segment_size, hi)
        mask = np.ones(stop - start, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= stop:
                break
            first = max(q * q, -(-start // q) * q)
            mask[first - start :: q] = False
        if start < 2:
            mask[: 2 - start] = False
        segment = np.flatnonzero(mask).astype(np.int64) + start
        LOGGER.debug("Sieved [%d, %d): %d primes", start, stop, segment.size)
        yield segment


def primes_in_range(lo: int, hi: int) -> Iterator[int]:
    """Strictly increasing primes in the half-open interval [lo, hi)."""

    for segment in prime_segments(lo, hi):
        for value in segment.tolist():
            yield value


def classify(p: int) -> ClassifiedPrime:
    """Check that p is an odd prime below 2**32 and record its residue classes."""

    if p < 3 or p % 2 == 0:
        raise DomainError(f"{p} is not an odd prime")
    if p >= PRIME_RANGE_CAP:
        raise DomainError(f"{p} exceeds the range cap 2**32")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return ClassifiedPrime(p=p, r4=p % 4, r8=p % 8, r12=p % 12)


def require_above_three(cp: ClassifiedPrime, what: str) -> None:
    """Reject p = 3 for operations that are only stated for p > 3."""

    if cp.p <= 3:
        raise DomainError(f"{what} requires p > 3, got p={cp.p}")
