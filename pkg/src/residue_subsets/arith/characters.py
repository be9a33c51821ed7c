"""Legendre symbols and the three quadratic character families chi_p, chi_3p, chi_4p."""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Iterator

import numpy as np

from residue_subsets.domain.models import CharacterKind, ClassifiedPrime, Parity, QuadCharacter
from residue_subsets.errors import DomainError, MemoryGuardError

LOGGER = logging.getLogger(__name__)

TABLE_MODE_LIMIT = 2**26
STREAM_CHUNK = 2**20

_CHI3 = np.array([0, 1, -1], dtype=np.int64)
_CHI4 = np.array([0, 1, 0, -1], dtype=np.int64)


def _check_modulus(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise DomainError(f"Legendre symbol needs an odd prime modulus, got {p}")


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1 by binary reciprocity."""

    a %= n
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p); agrees with Euler's criterion but never exponentiates."""

    _check_modulus(p)
    return jacobi(a, p)


def legendre_array(values: np.ndarray, p: int) -> np.ndarray:
    """Vectorised binary reciprocity: (v/p) for every v in ``values``."""

    _check_modulus(p)
    a = np.asarray(values, dtype=np.int64) % p
    n = np.full_like(a, p)
    sign = np.ones_like(a)
    active = a != 0
    while active.any():
        while True:
            even = active & (a % 2 == 0)
            if not even.any():
                break
            a[even] //= 2
            r = n[even] % 8
            flip = (r == 3) | (r == 5)
            sign[even] = np.where(flip, -sign[even], sign[even])
        a_act, n_act = n[active], a[active]
        flip = (a_act % 4 == 3) & (n_act % 4 == 3)
        sign[active] = np.where(flip, -sign[active], sign[active])
        a[active] = a_act % n_act
        n[active] = n_act
        active = a != 0
    return np.where(n == 1, sign, 0)


def residue_marks(p: int, *, limit: int = TABLE_MODE_LIMIT) -> np.ndarray:
    """Boolean table over [0, p-1]: entry a is True iff a is a nonzero square mod p."""

    _check_modulus(p)
    if p >= limit:
        raise MemoryGuardError(
            f"Table mode is limited to p < {limit}; use streaming mode for p={p}"
        )
    marks = np.zeros(p, dtype=bool)
    x = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    marks[(x * x) % p] = True
    return marks


@lru_cache(maxsize=2)
def legendre_table(p: int, *, limit: int = TABLE_MODE_LIMIT) -> np.ndarray:
    """Read-only int8 table t with t[a] = (a/p) for a in [0, p-1].

    One byte per entry; callers widen when they accumulate.
    """

    marks = residue_marks(p, limit=limit)
    table = np.where(marks, 1, -1).astype(np.int8)
    table[0] = 0
    table.setflags(write=False)
    return table


def legendre_chunks(
    p: int,
    start: int,
    stop: int,
    *,
    step: int = 1,
    limit: int = TABLE_MODE_LIMIT,
    chunk: int = STREAM_CHUNK,
) -> Iterator[np.ndarray]:
    """Yield (a/p) for a = start, start+step, ... < stop in bounded chunks.

    Uses the cached table below ``limit`` and the vectorised reciprocity kernel
    above it.
    """

    _check_modulus(p)
    table = legendre_table(p, limit=limit) if p < limit else None
    span = chunk * step
    for lo in range(start, stop, span):
        values = np.arange(lo, min(lo + span, stop), step, dtype=np.int64)
        if table is not None:
            yield table[values % p]
        else:
            yield legendre_array(values, p)


def legendre_sum(p: int, start: int, stop: int, **kwargs) -> int:
    """Sum of (m/p) for m in [start, stop)."""

    blocks = legendre_chunks(p, start, stop, **kwargs)
    return int(sum(int(block.sum(dtype=np.int64)) for block in blocks))


def chi4(n: int) -> int:
    """The non-principal character mod 4."""

    if n % 2 == 0:
        return 0
    return 1 if n % 4 == 1 else -1


def make_character(kind: CharacterKind, cp: ClassifiedPrime) -> QuadCharacter:
    """Build chi_p, chi_3 chi_p or chi_4 chi_p for the classified prime."""

    p = cp.p
    if kind is CharacterKind.CHI_P:
        modulus = p
        odd = cp.r4 == 3
    elif kind is CharacterKind.CHI_3P:
        if p <= 3:
            raise DomainError("chi_3 chi_p requires p > 3")
        modulus = 3 * p
        odd = cp.r4 == 1
    else:
        modulus = 4 * p
        odd = cp.r4 == 1
    return QuadCharacter(
        kind=kind,
        p=p,
        modulus=modulus,
        discriminant=-modulus if odd else modulus,
        parity=Parity.ODD if odd else Parity.EVEN,
    )


def char_eval(chi: QuadCharacter, n: int) -> int:
    """chi(n) as a product of the Legendre symbol and chi_3 or chi_4."""

    value = jacobi(n, chi.p)
    if chi.kind is CharacterKind.CHI_3P:
        value *= jacobi(n, 3)
    elif chi.kind is CharacterKind.CHI_4P:
        value *= chi4(n)
    return value


def character_table(chi: QuadCharacter, *, limit: int = TABLE_MODE_LIMIT) -> np.ndarray:
    """chi(n) for n = 0 .. modulus-1 as an int64 array."""

    n = np.arange(chi.modulus, dtype=np.int64)
    if chi.p < limit:
        values = legendre_table(chi.p, limit=limit)[n % chi.p].astype(np.int64)
    else:
        values = legendre_array(n, chi.p)
    if chi.kind is CharacterKind.CHI_3P:
        values = values * _CHI3[n % 3]
    elif chi.kind is CharacterKind.CHI_4P:
        values = values * _CHI4[n % 4]
    return values
