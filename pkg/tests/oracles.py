"""Independent reference computations used to freeze and cross-check values.

Nothing here relies on the package's arithmetic for reference values: primes come from trial
division or a plain boolean sieve, reals from mpmath at high precision.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath
import numpy as np

from thetabound import rigor
from thetabound.errors import DomainError

ORACLE_DPS = 90  # ~300 bits


def is_prime_td(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    d = 3
    while d * d <= k:
        if k % d == 0:
            return False
        d += 2
    return True


def primes_td(limit: int) -> list[int]:
    return [k for k in range(2, limit + 1) if is_prime_td(k)]


def primes_plain_sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def mp_theta(primes: list[int], n: int) -> mpmath.mpf:
    with mpmath.workdps(ORACLE_DPS):
        return mpmath.fsum(mpmath.log(p) for p in primes[:n])


def mp_logs(n):
    L = mpmath.log(n)
    return L, mpmath.log(L)


def mp_G(n, a):
    with mpmath.workdps(ORACLE_DPS):
        L, LL = mp_logs(n)
        return L + LL - 1 + (LL - mpmath.mpf(a)) / L


def mp_F(n, lam):
    with mpmath.workdps(ORACLE_DPS):
        L, LL = mp_logs(n)
        return 1 - 1 / L + mpmath.mpf(lam) * LL / L**2


def mp_U(n):
    with mpmath.workdps(ORACLE_DPS):
        L, LL = mp_logs(n)
        return L + LL + (LL - mpmath.mpf("0.8") + mpmath.mpf("0.018")) / L


def mp_V(n):
    with mpmath.workdps(ORACLE_DPS):
        L, LL = mp_logs(n)
        return L + LL + (LL - 1) / (L + (LL - 1) / 2)


def mp_g(x):
    with mpmath.workdps(ORACLE_DPS):
        L = mpmath.log(x)
        return (L + 1 + 1 / L) / (x + mpmath.mpf("0.4"))


def to_fraction(x) -> Fraction:
    if isinstance(x, mpmath.mpf):
        sign, man, exp, _ = x._mpf_
        if not man and exp:
            raise ValueError(f"non-finite oracle value {x}")
        return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)
    if hasattr(x, "as_integer_ratio"):
        return Fraction(*x.as_integer_ratio())
    return Fraction(x)


def inside(value, enc) -> bool:
    """Exact containment of an mpmath value in a scalar Enclosure.

    Endpoints are converted to mpf exactly and compared as mpf, which stays
    cheap even for values with enormous exponents.
    """
    if not isinstance(value, mpmath.mpf):
        with mpmath.workdps(ORACLE_DPS):
            value = mpmath.mpf(value)
    return _exact(enc.lo) <= value <= _exact(enc.hi)


def _exact(x) -> mpmath.mpf:
    if isinstance(x, mpmath.mpf):
        return x
    num, den = np.asarray(x)[()].as_integer_ratio()
    # den is a power of two; ldexp on an integer mantissa is exact
    return mpmath.ldexp(mpmath.mpf(num) if num.bit_length() <= 53 else _big(num), -(den.bit_length() - 1))


def _big(num: int) -> mpmath.mpf:
    with mpmath.workprec(num.bit_length() + 1):
        return mpmath.mpf(num)


# -- random expressions: the package and mpmath evaluate the same tree --------

OPS = ("add", "sub", "mul", "div", "ln", "exp")


def random_expression(rng: random.Random, depth: int = 3):
    """A random expression as (Enclosure builder, mpmath oracle) evaluated together."""
    if depth == 0 or rng.random() < 0.25:
        text = f"{rng.uniform(-20, 20):.{rng.randint(0, 12)}f}"
        if rng.random() < 0.3:
            text = str(rng.randint(-1000, 1000))
        return text, lambda prec, t=text: rigor.from_decimal(t, prec), lambda t=text: mpmath.mpf(t)
    op = rng.choice(OPS)
    if op in ("ln", "exp"):
        text, enc, ora = random_expression(rng, depth - 1)
        fn = getattr(rigor, op)
        mfn = mpmath.log if op == "ln" else mpmath.exp
        return f"{op}({text})", lambda prec: fn(enc(prec)), lambda: mfn(ora())
    lt, le, lo = random_expression(rng, depth - 1)
    rt, re_, ro = random_expression(rng, depth - 1)
    fn = getattr(rigor, op)
    mfn = {"add": lambda a, b: a + b, "sub": lambda a, b: a - b, "mul": lambda a, b: a * b, "div": lambda a, b: a / b}[op]
    return f"{op}({lt}, {rt})", lambda prec: fn(le(prec), re_(prec)), lambda: mfn(lo(), ro())


def check_expression(rng, prec: int = 53):
    """``(contained, text)`` for one random expression; None if it leaves the domain."""
    text, enc, ora = random_expression(rng)
    try:
        value = enc(prec)
    except DomainError:
        return None
    with mpmath.workdps(80):
        ref = ora()
    return inside(ref, value), text
