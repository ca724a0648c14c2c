"""Prime generation and indexing.

A segmented sieve of Eratosthenes over odd numbers builds a :class:`PrimeTable`
holding a packed odd-number bitmap plus the materialized prime list, which
answers ``p_n`` and ``pi(x)`` queries. :func:`iter_prime_segments` streams the
same sieve without keeping anything, for limits too large to tabulate.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import rigor
from .errors import ResourceError

DEFAULT_SEGMENT_SIZE = 256 * 1024
MIN_SEGMENT_SIZE = 4 * 1024
MAX_SEGMENT_SIZE = 64 * 1024 * 1024
DEFAULT_MEMORY_BUDGET = 4 * 1024**3

CACHE_MAGIC = b"THBD"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")

_SMALL_PRIMES = (2, 3, 5, 7, 11)


@dataclass(frozen=True)
class SieveConfig:
    """What to sieve: either up to the ``target_index``-th prime or up to a value.

    ``segment_size`` is the number of bytes (one per odd candidate) sieved at a
    time; it must be a power of two.
    """

    target_index: int | None = None
    target_value: int | None = None
    segment_size: int = DEFAULT_SEGMENT_SIZE

    def __post_init__(self):
        if (self.target_index is None) == (self.target_value is None):
            raise ValueError("set exactly one of target_index / target_value")
        if self.target_index is not None and self.target_index < 1:
            raise ValueError("target_index must be >= 1")
        if self.target_value is not None and self.target_value < 0:
            raise ValueError("target_value must be >= 0")
        size = self.segment_size
        if size & (size - 1) or not MIN_SEGMENT_SIZE <= size <= MAX_SEGMENT_SIZE:
            raise ValueError(
                f"segment_size must be a power of two in [{MIN_SEGMENT_SIZE}, {MAX_SEGMENT_SIZE}]"
            )

    @property
    def limit(self) -> int:
        if self.target_value is not None:
            return self.target_value
        return limit_for_index(self.target_index)


def limit_for_index(n: int) -> int:
    """A proven upper bound for ``p_n``.

    Uses ``p_n <= n (log n + log log n)`` for ``n >= 6`` evaluated with
    enclosures, and the literal first primes below that.
    """
    if n < 1:
        raise ValueError("prime index must be >= 1")
    if n < 6:
        return _SMALL_PRIMES[n - 1]
    big = rigor.from_integer(n)
    log_n = rigor.ln(big)
    bound = big * (log_n + rigor.ln(log_n))
    return int(math.floor(bound.to_floats()[1]))


def estimate_memory(limit: int) -> int:
    """Bytes a :class:`PrimeTable` up to ``limit`` will need (bitmap + primes)."""
    bitmap = (limit + 1) // 16 + 1
    if limit < 17:
        count = 7
    else:
        count = int(1.26 * limit / math.log(limit)) + 1
    return bitmap + 8 * count


def _base_primes(limit: int) -> np.ndarray:
    """Odd primes up to ``limit`` by a plain sieve."""
    if limit < 3:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if mask[p]:
            mask[p * p :: 2 * p] = False
    return np.flatnonzero(mask)[1:].astype(np.int64)


def _sieve_segment(start: int, stop: int, base: np.ndarray) -> np.ndarray:
    """Primality of the odd numbers ``2i + 1`` for ``start <= i < stop``."""
    seg = np.ones(stop - start, dtype=bool)
    low = 2 * start + 1
    high = 2 * (stop - 1) + 1
    for p in base.tolist():
        sq = p * p
        if sq > high:
            break
        first = max(sq, -(-low // p) * p)
        if not first & 1:
            first += p
        seg[(first - 1) // 2 - start :: p] = False
    if start == 0:
        seg[0] = False
    return seg


def _segments(limit: int, segment_size: int) -> list[tuple[int, int]]:
    n_odd = (limit + 1) // 2
    return [(s, min(s + segment_size, n_odd)) for s in range(0, n_odd, segment_size)]


_WORKER_BASE: np.ndarray | None = None


def _init_worker(base: np.ndarray) -> None:
    global _WORKER_BASE
    _WORKER_BASE = base


def _worker_segment(bounds: tuple[int, int]) -> np.ndarray:
    return _sieve_segment(bounds[0], bounds[1], _WORKER_BASE)


def _odd_mask(limit: int, segment_size: int, jobs: int) -> np.ndarray:
    base = _base_primes(math.isqrt(limit))
    spans = _segments(limit, segment_size)
    if jobs > 1 and len(spans) > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(base,)) as pool:
            parts = list(pool.map(_worker_segment, spans, chunksize=max(1, len(spans) // (4 * jobs))))
    else:
        parts = [_sieve_segment(a, b, base) for a, b in spans]
    if not parts:
        return np.zeros(0, dtype=bool)
    return np.concatenate(parts)


class PrimeTable:
    """Primes up to ``limit``: packed odd bitmap plus the indexed prime list.

    Bit ``i`` of the bitmap (little-endian bit order) says whether ``2i + 1``
    is prime. Instances are immutable after construction and safe to share.
    """

    def __init__(self, limit: int, bitmap: np.ndarray, primes: np.ndarray | None = None):
        self.limit = int(limit)
        self.bitmap = np.asarray(bitmap, dtype=np.uint8)
        self.bitmap.flags.writeable = False
        if primes is None:
            n_odd = (self.limit + 1) // 2
            odd = np.unpackbits(self.bitmap, count=n_odd, bitorder="little").astype(bool)
            primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
            if self.limit >= 2:
                primes = np.concatenate(([2], primes))
        self.primes = np.asarray(primes, dtype=np.int64)
        self.primes.flags.writeable = False

    @property
    def count(self) -> int:
        """pi(limit)."""
        return int(self.primes.size)

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, count={self.count})"

    def is_prime(self, x: int) -> bool:
        if x < 0 or x > self.limit:
            raise ValueError(f"{x} is outside the sieved range [0, {self.limit}]")
        if x == 2:
            return True
        if x < 2 or not x & 1:
            return False
        i = (x - 1) // 2
        return bool((self.bitmap[i >> 3] >> (i & 7)) & 1)

    def nth_prime(self, n):
        """The ``n``-th prime (``p_1 = 2``); accepts an integer array too."""
        if isinstance(n, np.ndarray):
            if n.size and (n.min() < 1 or n.max() > self.count):
                raise IndexError(f"prime index outside [1, {self.count}]")
            return self.primes[n - 1]
        if not 1 <= n <= self.count:
            raise IndexError(f"prime index {n} outside [1, {self.count}]")
        return int(self.primes[n - 1])

    def prime_count(self, x):
        """pi(x), the number of primes <= x; accepts an integer array too."""
        if isinstance(x, np.ndarray):
            if x.size and (x.min() < 0 or x.max() > self.limit):
                raise ValueError(f"argument outside the sieved range [0, {self.limit}]")
            return np.searchsorted(self.primes, x, side="right").astype(np.int64)
        if not 0 <= x <= self.limit:
            raise ValueError(f"{x} is outside the sieved range [0, {self.limit}]")
        return int(np.searchsorted(self.primes, x, side="right"))

    def iterate_primes(self, from_index: int = 1) -> Iterator[tuple[int, int]]:
        """Yield ``(n, p_n)`` for ``n >= from_index`` until the table runs out."""
        if from_index < 1:
            raise ValueError("from_index must be >= 1")
        for offset, p in enumerate(self.primes[from_index - 1 :].tolist()):
            yield from_index + offset, p

    # -- binary cache ----------------------------------------------------------

    def save(self, path: str | os.PathLike) -> None:
        """Write the bitmap cache file (little-endian header then bitmap)."""
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, self.limit, self.count))
            fh.write(self.bitmap.tobytes())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PrimeTable":
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) != _HEADER.size:
                raise ValueError(f"{path}: truncated header")
            magic, version, limit, count = _HEADER.unpack(head)
            if magic != CACHE_MAGIC:
                raise ValueError(f"{path}: bad magic {magic!r}")
            if version != CACHE_VERSION:
                raise ValueError(f"{path}: unsupported cache version {version}")
            n_bytes = ((limit + 1) // 2 + 7) // 8
            data = np.frombuffer(fh.read(), dtype=np.uint8)
        if data.size != n_bytes:
            raise ValueError(f"{path}: expected {n_bytes} bitmap bytes, found {data.size}")
        table = cls(limit, data.copy())
        if table.count != count:
            raise ValueError(f"{path}: header count {count} does not match bitmap ({table.count})")
        return table


def sieve_build(
    config: SieveConfig,
    *,
    jobs: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> PrimeTable:
    """Sieve according to ``config``.

    With ``target_index`` the limit is a proven upper bound for that prime, so
    it is always present in the table.
    """
    limit = config.limit
    need = estimate_memory(limit)
    if need > memory_budget:
        raise ResourceError(
            f"sieving to {limit} needs about {need} bytes, budget is {memory_budget}", required=need
        )
    odd = _odd_mask(limit, config.segment_size, jobs)
    bitmap = np.packbits(odd, bitorder="little")
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    if limit >= 2:
        primes = np.concatenate((np.array([2], dtype=np.int64), primes))
    return PrimeTable(limit, bitmap, primes)


def load_or_build(config: SieveConfig, cache_path: str | os.PathLike | None, *, jobs: int = 1) -> PrimeTable:
    """Reuse a cache file when it covers ``config``; otherwise sieve and write it."""
    if cache_path:
        try:
            table = PrimeTable.load(cache_path)
        except (OSError, ValueError):
            table = None
        if table is not None and table.limit >= config.limit:
            return table
    table = sieve_build(config, jobs=jobs)
    if cache_path:
        table.save(cache_path)
    return table


def iter_prime_segments(
    limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE
) -> Iterator[np.ndarray]:
    """Stream the primes up to ``limit`` one segment at a time (ascending)."""
    if limit >= 2:
        yield np.array([2], dtype=np.int64)
    base = _base_primes(math.isqrt(limit))
    for start, stop in _segments(limit, segment_size):
        seg = _sieve_segment(start, stop, base)
        yield 2 * (np.flatnonzero(seg).astype(np.int64) + start) + 1
