"""Certified values of the Chebyshev function theta(p_n) = sum_{k<=n} log p_k.

Each term ``log p_k`` is enclosed by outward-widened floats. Because every
term endpoint is at least ``log 2 > 1/2``, it is an exact multiple of
``2**-53``, so the running sums of lower and upper endpoints are accumulated
*exactly* as scaled integers and only the final conversion back to float is
rounded (outward). The width of ``theta(p_n)`` is therefore the sum of the term
widths plus a couple of ulps, instead of growing with one rounding per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from mpmath.libmp import libmpf, libmpi

from . import rigor
from .errors import DomainError, ResourceError
from .primes import DEFAULT_SEGMENT_SIZE, PrimeTable, iter_prime_segments, limit_for_index
from .rigor import NATIVE, Enclosure

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover
    _mpz = int

CHECKPOINT_STRIDE = 1 << 16
FULL_SERIES_CAP = 2_000_000

_FRAC_BITS = 53
_SPLIT = 28
_MASK = (1 << _SPLIT) - 1
_CHUNK = 1 << 20


# -- exact accumulation ------------------------------------------------------


def _log_terms(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals = np.fromiter(map(math.log, primes.tolist()), dtype=np.float64, count=primes.size)
    return np.nextafter(vals, -np.inf), np.nextafter(vals, np.inf)


def _scaled(terms: np.ndarray, bits: int = _FRAC_BITS) -> np.ndarray:
    return np.ldexp(terms, bits).astype(np.int64)


def _exact_prefix(m: np.ndarray, carry: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Prefix sums of ``carry + m[0] + ... + m[i]`` split as ``Q * 2**28 + R``."""
    q = (m >> _SPLIT).cumsum() + (carry >> _SPLIT)
    r = (m & _MASK).cumsum() + (carry & _MASK)
    if m.size:
        carry = (int(q[-1]) << _SPLIT) + int(r[-1])
    return q, r, carry


def _to_float(q: np.ndarray, r: np.ndarray, down: bool) -> np.ndarray:
    # float(q) rounds once, the addition rounds once: two ulps outward covers both.
    val = np.ldexp(q.astype(np.float64), _SPLIT - _FRAC_BITS) + np.ldexp(r.astype(np.float64), -_FRAC_BITS)
    direction = -np.inf if down else np.inf
    return np.nextafter(np.nextafter(val, direction), direction)


def _accumulate(primes: np.ndarray, carry_lo: int, carry_hi: int):
    """Certified prefix sums of ``log p`` over ``primes``, continuing from exact carries."""
    out_lo = np.empty(primes.size, dtype=np.float64)
    out_hi = np.empty(primes.size, dtype=np.float64)
    for start in range(0, primes.size, _CHUNK):
        chunk = primes[start : start + _CHUNK]
        t_lo, t_hi = _log_terms(chunk)
        q, r, carry_lo = _exact_prefix(_scaled(t_lo), carry_lo)
        out_lo[start : start + chunk.size] = _to_float(q, r, down=True)
        q, r, carry_hi = _exact_prefix(_scaled(t_hi), carry_hi)
        out_hi[start : start + chunk.size] = _to_float(q, r, down=False)
    return out_lo, out_hi, carry_lo, carry_hi


def _accumulate_long(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Same as :func:`_accumulate` on long double terms (64-bit mantissa)."""
    vals = np.log(primes.astype(np.longdouble))
    ends = []
    for direction in (-np.inf, np.inf):
        t = vals
        for _ in range(2):
            t = np.nextafter(t, np.longdouble(direction))
        # t = t1 + t2 with t1 a float64 (multiple of 2**-53) and t2 a multiple of 2**-64.
        t1 = t.astype(np.float64)
        t2 = t - t1.astype(np.longdouble)
        m2 = np.ldexp(t2, 64).astype(np.int64)
        q, r, _ = _exact_prefix(_scaled(t1), 0)
        s2 = m2.cumsum()
        val = np.ldexp(q.astype(np.longdouble), _SPLIT - _FRAC_BITS) + np.ldexp(
            r.astype(np.longdouble), -_FRAC_BITS
        )
        val = val + np.ldexp(s2.astype(np.longdouble), -64)
        for _ in range(3):
            val = np.nextafter(val, np.longdouble(direction))
        ends.append(val)
    return ends[0], ends[1]


# -- series ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThetaSeries:
    """Enclosures of ``theta(p_1) .. theta(p_N)``; entry ``n - 1`` is index ``n``.

    ``checkpoints`` maps an index to the exact scaled sums ``(lo, hi)`` (units
    of ``2**-53``) at that index, every ``checkpoint_stride`` indices plus the
    last one, so the series can be extended or streamed from there.
    """

    lo: np.ndarray
    hi: np.ndarray
    checkpoint_stride: int = CHECKPOINT_STRIDE
    checkpoints: dict = field(default_factory=dict)
    prec: int = NATIVE
    primes: np.ndarray | None = field(default=None, repr=False)

    @property
    def upto_index(self) -> int:
        return int(self.lo.size)

    def __len__(self) -> int:
        return self.upto_index

    def _check(self, n) -> None:
        lo, hi = (np.min(n), np.max(n)) if isinstance(n, np.ndarray) else (n, n)
        if np.size(n) and (lo < 1 or hi > self.upto_index):
            raise IndexError(f"theta index outside [1, {self.upto_index}]")

    def theta_at(self, n) -> Enclosure:
        """Enclosure of ``theta(p_n)``; ``n`` may be an integer array.

        Scalar results can be passed to :func:`rigor.refine` when the series
        kept its primes.
        """
        self._check(n)
        source = None
        if self.primes is not None and not isinstance(n, np.ndarray):
            source = lambda p, head=self.primes[: int(n)]: theta_of_primes(head, p)  # noqa: E731
        return Enclosure._make(self.lo[np.asarray(n) - 1], self.hi[np.asarray(n) - 1], self.prec, source)

    def ratio_over_n(self, n) -> Enclosure:
        return self.theta_at(n) / rigor.from_integer(n, self.prec)

    def checkpoint(self, n: int) -> tuple[int, int]:
        return self.checkpoints[n]


def theta_series(
    table: PrimeTable,
    up_to_index: int,
    *,
    checkpoint_stride: int = CHECKPOINT_STRIDE,
    cap: int = FULL_SERIES_CAP,
) -> ThetaSeries:
    """Build the full native-precision series, summing in ascending index order."""
    if up_to_index < 0:
        raise ValueError("up_to_index must be >= 0")
    if up_to_index > table.count:
        raise ResourceError(
            f"theta series to index {up_to_index} needs p_{up_to_index}; table holds {table.count} primes",
            required=up_to_index,
        )
    if up_to_index > cap:
        raise ResourceError(
            f"series of {up_to_index} entries exceeds the cap {cap}; use stream_theta", required=up_to_index
        )
    return _build(table.primes[:up_to_index], 0, 0, 0, checkpoint_stride, np.empty(0), np.empty(0), {},
                  table.primes[:up_to_index])


def _build(primes, offset, carry_lo, carry_hi, stride, prev_lo, prev_hi, checkpoints, all_primes) -> ThetaSeries:
    lo, hi = np.empty(0), np.empty(0)
    pieces_lo, pieces_hi = [prev_lo], [prev_hi]
    checkpoints = dict(checkpoints)
    pos = 0
    while pos < primes.size:
        # Stop each piece on a stride boundary so the exact carry there is known.
        next_mark = (offset + pos) // stride * stride + stride
        end = min(primes.size, next_mark - offset)
        lo, hi, carry_lo, carry_hi = _accumulate(primes[pos:end], carry_lo, carry_hi)
        pieces_lo.append(lo)
        pieces_hi.append(hi)
        pos = end
        idx = offset + pos
        if idx % stride == 0 or pos == primes.size:
            checkpoints[idx] = (carry_lo, carry_hi)
    return ThetaSeries(
        np.concatenate(pieces_lo).astype(np.float64),
        np.concatenate(pieces_hi).astype(np.float64),
        stride,
        checkpoints,
        primes=all_primes,
    )


def extend_series(series: ThetaSeries, table: PrimeTable, up_to_index: int) -> ThetaSeries:
    """Continue ``series`` to ``up_to_index`` from its last exact checkpoint."""
    n0 = series.upto_index
    if up_to_index <= n0:
        return series
    if up_to_index > table.count:
        raise ResourceError(f"table holds {table.count} primes, need {up_to_index}", required=up_to_index)
    carry_lo, carry_hi = series.checkpoints.get(n0, (0, 0))
    return _build(
        table.primes[n0:up_to_index],
        n0,
        carry_lo,
        carry_hi,
        series.checkpoint_stride,
        series.lo,
        series.hi,
        series.checkpoints,
        table.primes[:up_to_index],
    )


def long_series(table: PrimeTable, up_to_index: int) -> ThetaSeries:
    """The series at long-double precision (64-bit mantissa), no checkpoints."""
    if not rigor.HAS_LONG:
        raise DomainError("this platform has no wider long double")
    if up_to_index > table.count:
        raise ResourceError(f"table holds {table.count} primes, need {up_to_index}", required=up_to_index)
    lo, hi = _accumulate_long(table.primes[:up_to_index])
    return ThetaSeries(lo, hi, CHECKPOINT_STRIDE, {}, rigor.LONG, table.primes[:up_to_index])


def theta_at(series: ThetaSeries, n) -> Enclosure:
    return series.theta_at(n)


def ratio_theta_over_n(series: ThetaSeries, n) -> Enclosure:
    """Enclosure of ``theta(p_n) / n``."""
    return series.ratio_over_n(n)


def theta_of_value(table: PrimeTable, x: int, series: ThetaSeries | None = None) -> Enclosure:
    """Enclosure of ``theta(x)``, the log-sum over primes not exceeding ``x``."""
    k = table.prime_count(x)
    if k == 0:
        return rigor.from_integer(0)
    if series is not None and k <= series.upto_index:
        return series.theta_at(k)
    return theta_of_primes(table.primes[:k], NATIVE)


# -- extended precision ------------------------------------------------------


def _product(values: list) -> int:
    vals = [_mpz(v) for v in values]
    while len(vals) > 1:
        nxt = [vals[i] * vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) & 1:
            nxt.append(vals[-1])
        vals = nxt
    return int(vals[0]) if vals else 1


def theta_of_primes(primes: np.ndarray, prec: int) -> Enclosure:
    """``sum(log p)`` over ``primes`` at any precision tier."""
    prec = rigor.resolve_precision(prec)
    if not primes.size:
        return rigor.from_integer(0, prec)
    if prec == NATIVE:
        lo, hi, _, _ = _accumulate(primes, 0, 0)
        return Enclosure._make(np.asarray(lo[-1]), np.asarray(hi[-1]), NATIVE)
    if not rigor._is_mp(prec):
        lo, hi = _accumulate_long(primes)
        return Enclosure._make(np.asarray(lo[-1]), np.asarray(hi[-1]), prec)
    prod = _product(primes.tolist())
    wp = prec + 20
    lo = libmpf.from_int(prod, wp, libmpf.round_floor)
    hi = libmpf.from_int(prod, wp, libmpf.round_ceiling)
    a, b = libmpi.mpi_log((lo, hi), prec)
    return Enclosure._make(a, b, prec)


def theta_exact(table: PrimeTable, n: int, prec: int) -> Enclosure:
    """``theta(p_n)`` at ``prec`` bits as the log of the exact primorial."""
    prec = rigor.resolve_precision(prec)
    if not 1 <= n <= table.count:
        raise IndexError(f"theta index {n} outside [1, {table.count}]")
    if not rigor._is_mp(prec):
        raise rigor.PrecisionError("theta_exact serves precisions above the long double tier")
    return theta_of_primes(table.primes[:n], prec)


# -- streaming ---------------------------------------------------------------


def stream_theta(
    limit: int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(n, p_n, theta_lo, theta_hi)`` arrays segment by segment up to ``limit``.

    Only the exact running sums are kept between segments, so memory stays
    flat however far the stream runs.
    """
    carry_lo = carry_hi = 0
    count = 0
    for primes in iter_prime_segments(limit, segment_size):
        if not primes.size:
            continue
        lo, hi, carry_lo, carry_hi = _accumulate(primes, carry_lo, carry_hi)
        idx = np.arange(count + 1, count + 1 + primes.size, dtype=np.int64)
        count += primes.size
        yield idx, primes, lo, hi


def theta_window(first: int, last: int, *, segment_size: int = DEFAULT_SEGMENT_SIZE):
    """Streamed ``(n, p_n, theta_lo, theta_hi)`` for ``first <= n <= last`` (plus ``p_{last+1}``).

    Returns the window arrays and the prime following the window.
    """
    if not 1 <= first <= last:
        raise ValueError("need 1 <= first <= last")
    limit = limit_for_index(last + 1)
    keep = []
    next_prime = None
    for idx, p, lo, hi in stream_theta(limit, segment_size=segment_size):
        if idx[-1] < first:
            continue
        sel = (idx >= first) & (idx <= last)
        keep.append((idx[sel], p[sel], lo[sel], hi[sel]))
        after = idx > last
        if after.any():
            next_prime = int(p[after][0])
            break
    n, p, lo, hi = (np.concatenate(parts) for parts in zip(*keep))
    if next_prime is None:
        raise ResourceError(f"sieve to {limit} did not reach p_{last + 1}", required=last + 1)
    return n, p, lo, hi, next_prime
