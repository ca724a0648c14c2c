"""Certified enclosure arithmetic.

An :class:`Enclosure` is a closed interval ``[lo, hi]`` guaranteed to contain
an exact real number (or, for array enclosures, one exact number per entry).
The substrate depends on the working precision:

``NATIVE`` (53 bits)
    float64 endpoints, scalar or numpy array. Arithmetic runs in
    round-to-nearest and each result endpoint is moved outward by one ulp.
    ``ln`` and ``exp`` use the platform libm (documented < 1 ulp) and are
    widened the same way.
``LONG`` (64 bits, x86 long double)
    Same scheme on ``np.longdouble``; ``logl``/``expl`` are widened by two ulps.
anything higher
    mpmath's interval kernels with the precision passed explicitly on every
    call. Scalars only.

The FPU rounding mode is never touched, so no state leaks between threads or
processes.
"""

from __future__ import annotations

import decimal
import enum
import math
from fractions import Fraction
from typing import Callable, Union

import mpmath
import numpy as np
from mpmath.libmp import libmpf, libmpi

from .errors import DomainError, PrecisionError

NATIVE = 53
LONG = int(np.finfo(np.longdouble).nmant) + 1
HAS_LONG = LONG > NATIVE
EXTENDED = 128
MAX_PRECISION = 4096

_LONG_LIBM_ULPS = 2

Number = Union[int, float, str, Fraction, decimal.Decimal]


class Verdict(enum.IntEnum):
    """Three-valued comparison outcome.

    ``HOLDS`` means every pair of members satisfies the relation, ``FAILS``
    means none does, ``UNKNOWN`` means the enclosures are too wide to tell.
    The integer codes are what vectorized comparisons return as ``int8``.
    """

    UNKNOWN = 0
    HOLDS = 1
    FAILS = 2

    def __str__(self) -> str:
        return self.name.capitalize()


# -- precision tiers ---------------------------------------------------------


def resolve_precision(prec: int) -> int:
    """Map a requested precision in bits to the tier that will serve it."""
    if isinstance(prec, bool) or not isinstance(prec, (int, np.integer)):
        raise PrecisionError(f"precision must be an integer number of bits, got {prec!r}")
    prec = int(prec)
    if prec < NATIVE:
        raise PrecisionError(f"precision {prec} is below the native {NATIVE} bits")
    if prec > MAX_PRECISION:
        raise PrecisionError(f"precision {prec} exceeds the supported maximum {MAX_PRECISION}")
    if prec == NATIVE:
        return NATIVE
    if HAS_LONG and prec <= LONG:
        return LONG
    return prec


def _is_mp(prec: int) -> bool:
    return prec != NATIVE and not (HAS_LONG and prec == LONG)


def _dtype(prec: int):
    return np.float64 if prec == NATIVE else np.longdouble


def _down(x, steps: int = 1):
    neg = x.dtype.type(-np.inf)
    for _ in range(steps):
        x = np.nextafter(x, neg)
    return x


def _up(x, steps: int = 1):
    pos = x.dtype.type(np.inf)
    for _ in range(steps):
        x = np.nextafter(x, pos)
    return x


def _raw(v):
    """Exact mpmath raw tuple of a float64 / long double / mpf endpoint."""
    if isinstance(v, mpmath.mpf):
        return v._mpf_
    if isinstance(v, np.ndarray):
        if v.ndim:
            raise PrecisionError("extended precision works on scalar enclosures only")
        v = v[()]
    if isinstance(v, np.longdouble) and np.longdouble is not np.float64:
        num, den = v.as_integer_ratio()
        return libmpf.from_man_exp(num, -(den.bit_length() - 1))
    return libmpf.from_float(float(v))


def _mpf(raw) -> mpmath.mpf:
    return mpmath.mp.make_mpf(raw)


def _fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, mpmath.mpf):
        sign, man, exp, _ = v._mpf_
        if not man and exp:
            raise DomainError("non-finite value")
        val = Fraction(int(man)) * (Fraction(2) ** exp)
        return -val if sign else val
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, decimal.Decimal):
        return Fraction(v)
    if isinstance(v, np.ndarray):
        v = v[()]
    return Fraction(*v.as_integer_ratio())


# -- the enclosure type ------------------------------------------------------


class Enclosure:
    """Certified interval ``[lo, hi]``.

    Build one with :func:`from_integer`, :func:`from_decimal` or
    :func:`point`; ``Enclosure(lo, hi)`` takes binary floating-point endpoints
    at face value. Enclosures are immutable. Results built from
    integer/decimal leaves remember how they were computed so :func:`refine`
    can redo them at higher precision.
    """

    __slots__ = ("lo", "hi", "prec", "_source")
    __array_ufunc__ = None

    def __init__(self, lo, hi=None, *, prec: int = NATIVE, source=None):
        if hi is None:
            hi = lo
        prec = resolve_precision(prec)
        if _is_mp(prec):
            lo_raw, hi_raw = _raw_scalar(lo), _raw_scalar(hi)
            if lo_raw in (libmpf.fnan, libmpf.finf, libmpf.fninf) or hi_raw in (
                libmpf.fnan,
                libmpf.finf,
                libmpf.fninf,
            ):
                raise DomainError("enclosure endpoints must be finite")
            if libmpf.mpf_gt(lo_raw, hi_raw):
                raise ValueError("enclosure needs lo <= hi")
            lo, hi = _mpf(lo_raw), _mpf(hi_raw)
        else:
            dt = _dtype(prec)
            lo = np.asarray(lo, dtype=dt)
            hi = np.asarray(hi, dtype=dt)
            if lo.shape != hi.shape:
                lo, hi = np.broadcast_arrays(lo, hi)
                lo, hi = lo.copy(), hi.copy()
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise DomainError("enclosure endpoints must be finite")
            if np.any(lo > hi):
                raise ValueError("enclosure needs lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "_source", source)

    @classmethod
    def _make(cls, lo, hi, prec, source=None) -> "Enclosure":
        # Internal fast path; overflow to inf is the only thing left to catch.
        if not _is_mp(prec):
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise DomainError("result overflows the floating-point range")
        else:
            if lo in (libmpf.finf, libmpf.fninf, libmpf.fnan) or hi in (
                libmpf.finf,
                libmpf.fninf,
                libmpf.fnan,
            ):
                raise DomainError("result is not finite")
            lo, hi = _mpf(lo), _mpf(hi)
        obj = object.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        object.__setattr__(obj, "prec", prec)
        object.__setattr__(obj, "_source", source)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Enclosure is immutable")

    def __reduce__(self):
        return (_rebuild, (self.lo, self.hi, self.prec))

    # -- shape ---------------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return () if _is_mp(self.prec) else self.lo.shape

    @property
    def is_scalar(self) -> bool:
        return self.shape == ()

    def __len__(self) -> int:
        if self.is_scalar:
            raise TypeError("scalar enclosure has no length")
        return self.shape[0]

    def __getitem__(self, idx) -> "Enclosure":
        if self.is_scalar:
            raise TypeError("scalar enclosure is not indexable")
        src = None
        if self._source is not None:
            parent = self

            def src(p):
                return parent._recompute(p)[idx]

        return Enclosure._make(self.lo[idx], self.hi[idx], self.prec, src)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    # -- inspection ----------------------------------------------------------

    def width(self):
        """Upper bound on ``hi - lo`` (float or float array)."""
        if _is_mp(self.prec):
            w = libmpf.mpf_sub(self.hi._mpf_, self.lo._mpf_, 53, libmpf.round_ceiling)
            return libmpf.to_float(w, rnd=libmpf.round_ceiling)
        lo, hi = self.to_floats()
        diff = np.asarray(hi) - np.asarray(lo)
        w = np.where(diff == 0, diff, np.nextafter(diff, np.inf))
        return float(w) if self.is_scalar else w

    def contains(self, value) -> bool:
        """Exact membership test for a scalar enclosure.

        ``value`` may be an int, float, Fraction, decimal string or mpf; the
        comparison is done in exact rational arithmetic.
        """
        if not self.is_scalar:
            raise TypeError("contains() needs a scalar enclosure")
        v = _fraction(value)
        return _fraction(self.lo) <= v <= _fraction(self.hi)

    def to_floats(self) -> tuple:
        """Endpoints rounded outward to float64 (for reporting)."""
        if _is_mp(self.prec):
            return (
                libmpf.to_float(self.lo._mpf_, rnd=libmpf.round_floor),
                libmpf.to_float(self.hi._mpf_, rnd=libmpf.round_ceiling),
            )
        if self.prec == NATIVE:
            lo, hi = self.lo, self.hi
        else:
            lo = self.lo.astype(np.float64)
            lo = np.where(lo.astype(np.longdouble) > self.lo, np.nextafter(lo, -np.inf), lo)
            hi = self.hi.astype(np.float64)
            hi = np.where(hi.astype(np.longdouble) < self.hi, np.nextafter(hi, np.inf), hi)
        if self.is_scalar:
            return float(lo), float(hi)
        return lo, hi

    def __repr__(self) -> str:
        if self.is_scalar:
            lo, hi = self.to_floats()
            return f"Enclosure([{lo!r}, {hi!r}], prec={self.prec})"
        return f"Enclosure(shape={self.shape}, prec={self.prec})"

    # -- provenance ----------------------------------------------------------

    def _recompute(self, prec: int) -> "Enclosure":
        if self._source is not None:
            return self._source(prec)
        return promote(self, prec)

    # -- operators -----------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DomainError("only positive integer powers are supported")
        if k == 0:
            raise DomainError("zeroth power is not supported")
        if k == 2:
            return sqr(self)
        out = self
        for _ in range(k - 1):
            out = mul(out, self)
        return out


def _rebuild(lo, hi, prec):
    return Enclosure(lo, hi, prec=prec)


def _raw_scalar(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return libmpf.from_int(int(v))
    return _raw(v)


# -- constructors ------------------------------------------------------------


def point(x, prec: int = NATIVE) -> Enclosure:
    """Degenerate enclosure of a binary floating-point value (taken exactly)."""
    prec = resolve_precision(prec)
    if isinstance(x, np.longdouble) and np.longdouble is not np.float64 and HAS_LONG:
        base = Enclosure(x, x, prec=LONG)
    else:
        base = Enclosure(float(x), float(x))
    if prec < base.prec:
        raise PrecisionError("a long double point needs at least LONG precision")
    out = promote(base, prec)
    return Enclosure._make(
        out.lo._mpf_ if _is_mp(prec) else out.lo,
        out.hi._mpf_ if _is_mp(prec) else out.hi,
        prec,
        lambda p: promote(base, p),
    )


def from_integer(k, prec: int = NATIVE) -> Enclosure:
    """Enclosure of an integer (or integer array); exact whenever representable."""
    prec = resolve_precision(prec)
    src = lambda p, k=k: from_integer(k, p)  # noqa: E731
    if _is_mp(prec):
        if isinstance(k, np.ndarray) and k.ndim:
            raise PrecisionError("extended precision works on scalar enclosures only")
        r = libmpf.from_int(int(k))
        return Enclosure._make(r, r, prec, src)
    dt = _dtype(prec)
    if isinstance(k, (int, np.integer)) and not isinstance(k, bool):
        k = int(k)
        if prec == NATIVE:
            f = float(k)
            lo = f if int(f) <= k else math.nextafter(f, -math.inf)
            hi = f if int(f) >= k else math.nextafter(f, math.inf)
            return Enclosure._make(np.asarray(lo), np.asarray(hi), prec, src)
        if abs(k) < 2**63:
            v = np.asarray(np.int64(k)).astype(dt)
            return Enclosure._make(v, v.copy(), prec, src)
        f = np.asarray(np.longdouble(float(k)))
        lo = f if _fraction(f) <= k else _down(f)
        hi = f if _fraction(f) >= k else _up(f)
        return Enclosure._make(lo, hi, prec, src)
    arr = np.asarray(k)
    if arr.dtype.kind not in "iu":
        raise TypeError(f"from_integer expects integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    f = arr.astype(dt)
    if prec == NATIVE and np.any(np.abs(arr) > 2**53):
        back = f.astype(np.int64)
        lo = np.where(back > arr, _down(f), f)
        hi = np.where(back < arr, _up(f), f)
        return Enclosure._make(lo, hi, prec, src)
    return Enclosure._make(f, f.copy(), prec, src)


def from_decimal(value, prec: int = NATIVE) -> Enclosure:
    """Outward-rounded enclosure of a decimal or rational constant.

    Accepts a decimal string, ``Fraction``, ``Decimal``, int, or float; a float
    is read through its shortest ``repr``, i.e. as the literal that was typed.
    """
    prec = resolve_precision(prec)
    if isinstance(value, float):
        value = repr(value)
    fr = Fraction(value)
    src = lambda p, fr=fr: from_decimal(fr, p)  # noqa: E731
    if _is_mp(prec):
        lo = libmpf.from_rational(fr.numerator, fr.denominator, prec, libmpf.round_floor)
        hi = libmpf.from_rational(fr.numerator, fr.denominator, prec, libmpf.round_ceiling)
        return Enclosure._make(lo, hi, prec, src)
    if prec == NATIVE:
        c = np.asarray(float(fr))
    else:
        c = np.asarray(np.longdouble(fr.numerator) / np.longdouble(fr.denominator))
    lo, hi = c, c.copy()
    while _fraction(lo) > fr:
        lo = _down(lo)
    while _fraction(hi) < fr:
        hi = _up(hi)
    return Enclosure._make(lo, hi, prec, src)


def _coerce(x, prec: int) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return from_integer(x, prec)
    if isinstance(x, np.ndarray) and x.dtype.kind in "iu":
        return from_integer(x, prec)
    if isinstance(x, (float, np.floating)):
        return point(x, prec)
    if isinstance(x, (str, Fraction, decimal.Decimal)):
        return from_decimal(x, prec)
    raise TypeError(f"cannot build an enclosure from {type(x).__name__}")


def promote(x: Enclosure, prec: int) -> Enclosure:
    """Re-express ``x`` in a tier of at least ``prec`` bits (exact, no rounding)."""
    prec = resolve_precision(prec)
    if prec <= x.prec:
        return x
    if _is_mp(prec):
        return Enclosure._make(_raw(x.lo), _raw(x.hi), prec, x._source)
    lo = x.lo.astype(np.longdouble)
    hi = x.hi.astype(np.longdouble)
    return Enclosure._make(lo, hi, prec, x._source)


def _pair(a, b) -> tuple[Enclosure, Enclosure, int]:
    if isinstance(a, Enclosure):
        b = _coerce(b, a.prec)
    else:
        b = _coerce(b, NATIVE) if not isinstance(b, Enclosure) else b
        a = _coerce(a, b.prec)
    prec = max(a.prec, b.prec)
    return promote(a, prec), promote(b, prec), prec


def _binary_source(op, a: Enclosure, b: Enclosure):
    if a._source is None or b._source is None:
        return None
    return lambda p: op(a._recompute(p), b._recompute(p))


def _unary_source(op, a: Enclosure):
    if a._source is None:
        return None
    return lambda p: op(a._recompute(p))


# -- arithmetic --------------------------------------------------------------


def add(a, b) -> Enclosure:
    a, b, prec = _pair(a, b)
    src = _binary_source(add, a, b)
    if _is_mp(prec):
        lo, hi = libmpi.mpi_add((a.lo._mpf_, a.hi._mpf_), (b.lo._mpf_, b.hi._mpf_), prec)
        return Enclosure._make(lo, hi, prec, src)
    return Enclosure._make(_down(a.lo + b.lo), _up(a.hi + b.hi), prec, src)


def sub(a, b) -> Enclosure:
    a, b, prec = _pair(a, b)
    src = _binary_source(sub, a, b)
    if _is_mp(prec):
        lo, hi = libmpi.mpi_sub((a.lo._mpf_, a.hi._mpf_), (b.lo._mpf_, b.hi._mpf_), prec)
        return Enclosure._make(lo, hi, prec, src)
    return Enclosure._make(_down(a.lo - b.hi), _up(a.hi - b.lo), prec, src)


def mul(a, b) -> Enclosure:
    a, b, prec = _pair(a, b)
    src = _binary_source(mul, a, b)
    if _is_mp(prec):
        lo, hi = libmpi.mpi_mul((a.lo._mpf_, a.hi._mpf_), (b.lo._mpf_, b.hi._mpf_), prec)
        return Enclosure._make(lo, hi, prec, src)
    if np.all(a.lo >= 0) and np.all(b.lo >= 0):
        with np.errstate(over="ignore"):  # overflow is reported by _make
            return Enclosure._make(_down(a.lo * b.lo), _up(a.hi * b.hi), prec, src)
    with np.errstate(over="ignore"):
        p1, p2, p3, p4 = a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    return Enclosure._make(_down(lo), _up(hi), prec, src)


def div(a, b) -> Enclosure:
    a, b, prec = _pair(a, b)
    if _is_mp(prec):
        if libmpf.mpf_le(b.lo._mpf_, libmpf.fzero) and libmpf.mpf_ge(b.hi._mpf_, libmpf.fzero):
            raise DomainError("division by an enclosure containing 0")
        src = _binary_source(div, a, b)
        lo, hi = libmpi.mpi_div((a.lo._mpf_, a.hi._mpf_), (b.lo._mpf_, b.hi._mpf_), prec)
        return Enclosure._make(lo, hi, prec, src)
    if not np.all((b.lo > 0) | (b.hi < 0)):
        raise DomainError("division by an enclosure containing 0")
    src = _binary_source(div, a, b)
    with np.errstate(over="ignore"):
        q1, q2, q3, q4 = a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi
    lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
    hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
    return Enclosure._make(_down(lo), _up(hi), prec, src)


def neg(a: Enclosure) -> Enclosure:
    src = _unary_source(neg, a)
    if _is_mp(a.prec):
        return Enclosure._make(libmpf.mpf_neg(a.hi._mpf_), libmpf.mpf_neg(a.lo._mpf_), a.prec, src)
    return Enclosure._make(-a.hi, -a.lo, a.prec, src)


def sqr(a: Enclosure) -> Enclosure:
    """Square without the dependency blow-up of ``a * a``."""
    a = _coerce(a, NATIVE)
    src = _unary_source(sqr, a)
    if _is_mp(a.prec):
        lo, hi = libmpi.mpi_square((a.lo._mpf_, a.hi._mpf_), a.prec)
        return Enclosure._make(lo, hi, a.prec, src)
    lo2, hi2 = a.lo * a.lo, a.hi * a.hi
    lo = np.where(a.lo >= 0, lo2, np.where(a.hi <= 0, hi2, 0))
    hi = np.where(a.lo >= 0, hi2, np.where(a.hi <= 0, lo2, np.maximum(lo2, hi2)))
    lo = np.where(lo > 0, _down(lo), lo)
    return Enclosure._make(lo.astype(a.lo.dtype), _up(hi), a.prec, src)


def _libm(fn: Callable[[float], float], x: np.ndarray) -> np.ndarray:
    flat = x.ravel().tolist()
    try:
        out = np.fromiter(map(fn, flat), dtype=np.float64, count=len(flat))
    except OverflowError as exc:
        raise DomainError("result overflows the floating-point range") from exc
    return out.reshape(x.shape)


def ln(a) -> Enclosure:
    """Natural logarithm; needs ``a.lo > 0``."""
    a = _coerce(a, NATIVE)
    src = _unary_source(ln, a)
    if _is_mp(a.prec):
        if libmpf.mpf_le(a.lo._mpf_, libmpf.fzero):
            raise DomainError("logarithm of an enclosure reaching 0 or below")
        lo, hi = libmpi.mpi_log((a.lo._mpf_, a.hi._mpf_), a.prec)
        return Enclosure._make(lo, hi, a.prec, src)
    if not np.all(a.lo > 0):
        raise DomainError("logarithm of an enclosure reaching 0 or below")
    if a.prec == NATIVE:
        return Enclosure._make(_down(_libm(math.log, a.lo)), _up(_libm(math.log, a.hi)), a.prec, src)
    return Enclosure._make(
        _down(np.log(a.lo), _LONG_LIBM_ULPS), _up(np.log(a.hi), _LONG_LIBM_ULPS), a.prec, src
    )


def exp(a) -> Enclosure:
    """Exponential; results beyond the float range raise :class:`DomainError`."""
    a = _coerce(a, NATIVE)
    src = _unary_source(exp, a)
    if _is_mp(a.prec):
        lo, hi = libmpi.mpi_exp((a.lo._mpf_, a.hi._mpf_), a.prec)
        return Enclosure._make(lo, hi, a.prec, src)
    if a.prec == NATIVE:
        lo, hi = _down(_libm(math.exp, a.lo)), _up(_libm(math.exp, a.hi))
    else:
        with np.errstate(over="ignore"):
            lo = _down(np.exp(a.lo), _LONG_LIBM_ULPS)
            hi = _up(np.exp(a.hi), _LONG_LIBM_ULPS)
    lo = np.maximum(lo, 0).astype(lo.dtype)
    return Enclosure._make(lo, hi, a.prec, src)


# -- set operations ----------------------------------------------------------


def intersect(a: Enclosure, b: Enclosure) -> Enclosure:
    """Intersection of two enclosures of the same quantity."""
    a, b, prec = _pair(a, b)
    src = b._source or a._source
    if _is_mp(prec):
        lo = a.lo if a.lo >= b.lo else b.lo
        hi = a.hi if a.hi <= b.hi else b.hi
        if lo > hi:
            raise ValueError("enclosures of the same quantity are disjoint")
        return Enclosure._make(lo._mpf_, hi._mpf_, prec, src)
    lo, hi = np.maximum(a.lo, b.lo), np.minimum(a.hi, b.hi)
    if np.any(lo > hi):
        raise ValueError("enclosures of the same quantity are disjoint")
    return Enclosure._make(lo, hi, prec, src)


def hull(a: Enclosure, b: Enclosure) -> Enclosure:
    a, b, prec = _pair(a, b)
    if _is_mp(prec):
        lo = a.lo if a.lo <= b.lo else b.lo
        hi = a.hi if a.hi >= b.hi else b.hi
        return Enclosure._make(lo._mpf_, hi._mpf_, prec)
    return Enclosure._make(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi), prec)


def midpoint(a: Enclosure) -> Enclosure:
    """A degenerate enclosure at a representable point inside scalar ``a``."""
    if _is_mp(a.prec):
        m = libmpf.mpf_shift(libmpf.mpf_add(a.lo._mpf_, a.hi._mpf_, a.prec, libmpf.round_floor), -1)
        if libmpf.mpf_lt(m, a.lo._mpf_):
            m = a.lo._mpf_
        return Enclosure._make(m, m, a.prec)
    m = a.lo / 2 + a.hi / 2
    m = np.minimum(np.maximum(m, a.lo), a.hi)
    return Enclosure._make(m, m.copy(), a.prec)


def bisect(a: Enclosure) -> tuple[Enclosure, Enclosure]:
    m = midpoint(a)
    if _is_mp(a.prec):
        return (Enclosure._make(a.lo._mpf_, m.lo._mpf_, a.prec),
                Enclosure._make(m.lo._mpf_, a.hi._mpf_, a.prec))
    return Enclosure._make(a.lo, m.lo, a.prec), Enclosure._make(m.lo, a.hi, a.prec)


def refine(a: Enclosure, precision: int) -> Enclosure:
    """Recompute ``a`` at ``precision`` bits and intersect with the original.

    The result is always nested inside ``a``. Enclosures without provenance
    (built directly from endpoints) come back unchanged.
    """
    precision = resolve_precision(precision)
    if a._source is None:
        return a
    return intersect(a, a._source(precision))


# -- comparisons -------------------------------------------------------------


def _verdict(holds, fails):
    if isinstance(holds, np.ndarray) and holds.ndim:
        return np.where(holds, np.int8(Verdict.HOLDS), np.where(fails, np.int8(Verdict.FAILS), np.int8(0))).astype(np.int8)
    if bool(holds):
        return Verdict.HOLDS
    if bool(fails):
        return Verdict.FAILS
    return Verdict.UNKNOWN


def compare_lt(a, b):
    """Certified verdict for ``a < b`` (``Verdict`` or an ``int8`` code array)."""
    a, b, _ = _pair(a, b)
    return _verdict(a.hi < b.lo, a.lo >= b.hi)


def compare_le(a, b):
    """Certified verdict for ``a <= b``."""
    a, b, _ = _pair(a, b)
    return _verdict(a.hi <= b.lo, a.lo > b.hi)


def compare_gt(a, b):
    return compare_lt(b, a)


def compare_ge(a, b):
    return compare_le(b, a)


def combine(*verdicts):
    """Conjunction of verdicts: any Fails wins, then any Unknown."""
    arrays = [np.asarray(v, dtype=np.int8) for v in verdicts]
    if all(arr.ndim == 0 for arr in arrays):
        codes = [int(v) for v in arrays]
        if any(c == Verdict.FAILS for c in codes):
            return Verdict.FAILS
        if all(c == Verdict.HOLDS for c in codes):
            return Verdict.HOLDS
        return Verdict.UNKNOWN
    stacked = np.stack(np.broadcast_arrays(*arrays))
    any_fail = np.any(stacked == Verdict.FAILS, axis=0)
    all_hold = np.all(stacked == Verdict.HOLDS, axis=0)
    return np.where(any_fail, np.int8(Verdict.FAILS), np.where(all_hold, np.int8(Verdict.HOLDS), np.int8(0))).astype(np.int8)
