"""Derived per-index quantities: approximation error and the implied lambda."""

from __future__ import annotations

from .. import bounds, rigor
from ..errors import DomainError
from ..rigor import NATIVE, Enclosure

LAMBDA_MIN_INDEX = 16


def relative_error(n, ctx, prec: int = NATIVE) -> Enclosure:
    """``(theta(p_n)/n - F(n, 1/4) log p_{n+1}) / (theta(p_n)/n)``.

    The approximant is ``F(n, 1/4)`` times ``log p_{n+1}``, so the value is
    ``1 - F(n, 1/4) log p_{n+1} n / theta(p_n)``.
    """
    ratio = ctx.ratio(n, prec)
    approx = bounds.F(n, "0.25", prec) * ctx.log_prime(n + 1, prec)
    return 1 - approx / ratio


def lambda_effective(n, ctx, prec: int = NATIVE) -> Enclosure:
    """The ``lam`` with ``F(n, lam) log p_{n+1} = theta(p_n)/n`` exactly."""
    bad = (n < LAMBDA_MIN_INDEX).any() if hasattr(n, "any") else n < LAMBDA_MIN_INDEX
    if bad:
        raise DomainError(f"lambda_effective needs n >= {LAMBDA_MIN_INDEX}")
    L, LL = bounds.logs(n, prec)
    q = ctx.ratio(n, prec) / ctx.log_prime(n + 1, prec)
    return (q - 1 + 1 / L) * rigor.sqr(L) / LL
