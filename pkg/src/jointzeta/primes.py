"""Prime tables from a segmented sieve of Eratosthenes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTableError, OutOfRangeError

SEGMENT = 1 << 20


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_in_range(lo: int, hi: int, segment: int = SEGMENT) -> np.ndarray:
    """All primes p with lo <= p <= hi, sieved segment by segment."""
    lo = max(int(lo), 2)
    hi = int(hi)
    if hi < lo:
        return np.array([], dtype=np.int64)
    base = _small_sieve(math.isqrt(hi))
    chunks = []
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)  # exclusive
        mask = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            if first < stop:
                mask[first - start::p] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + start)
        start = stop
    return np.concatenate(chunks)


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``. Immutable; safe to share between workers."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    def __contains__(self, p):
        i = np.searchsorted(self.primes, p)
        return bool(i < len(self.primes) and self.primes[i] == p)

    def upto(self, x: float) -> np.ndarray:
        """Primes p <= x (x may be real)."""
        return self.primes[: np.searchsorted(self.primes, math.floor(x), side="right")]

    def pi(self, x: float) -> int:
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))


def sieve_up_to(limit: int) -> PrimeTable:
    limit = int(limit)
    if limit < 2:
        raise EmptyTableError(f"no primes below {limit}")
    return PrimeTable(limit, primes_in_range(2, limit))


def nth_prime(table: PrimeTable, m: int) -> int:
    """p_m, 1-indexed: nth_prime(t, 1) == 2."""
    if m < 1 or m > len(table):
        raise OutOfRangeError(f"table holds {len(table)} primes, asked for #{m}")
    return int(table.primes[m - 1])


_CACHE: dict[int, PrimeTable] = {}


def table_for(x: float) -> PrimeTable:
    """Cached table covering at least x, grown in powers of two."""
    need = max(int(x), 2)
    for lim, tab in _CACHE.items():
        if lim >= need:
            return tab
    lim = 1 << max(10, need.bit_length())
    tab = sieve_up_to(lim)
    _CACHE.clear()
    _CACHE[lim] = tab
    return tab
