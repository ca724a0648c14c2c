"""Certified sign checks for real-variable expressions over finite windows.

An expression is a function of a scalar :class:`Enclosure` ``x``. When a
derivative is registered, each box is also bounded by the centered form
``f(m) + f'(X)(X - m)`` and the two bounds are intersected; boxes that stay
ambiguous are retried at extended precision and then bisected.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

from .. import bounds, rigor
from ..errors import DomainError, RegistryError
from ..rigor import EXTENDED, NATIVE, Enclosure, Verdict

DEFAULT_MAX_DEPTH = 40
DEFAULT_WINDOW_END = 1_000_000


@dataclass(frozen=True)
class Expression:
    id: str
    description: str
    func: Callable[[Enclosure], Enclosure]
    derivative: Callable[[Enclosure], Enclosure] | None = None
    domain_lo: float = 0.0
    open_at_lo: bool = True


def _c(value: str, x: Enclosure) -> Enclosure:
    return rigor.from_decimal(value, x.prec)


def _ineq_left(x):
    return 1 / (x + _c("0.4", x)) - rigor.ln(1 + 1 / x)


def _ineq_left_d(x):
    return (_c("0.16", x) - _c("0.2", x) * x) / (x * (x + 1) * rigor.sqr(x + _c("0.4", x)))


def _ineq_right(x):
    return rigor.ln(1 + 1 / x) - 1 / (x + _c("0.5", x))


def _ineq_right_d(x):
    return -_c("0.25", x) / (x * (x + 1) * rigor.sqr(x + _c("0.5", x)))


def _g_gap(x):
    return bounds.g(x) - _c("0.018", x)


def _g_gap_d(x):
    return bounds.g_prime_numerator(x) / rigor.sqr(x + _c("0.4", x))


# Lower-bound inequality in the variable x = log n, moved to one side and
# split into three pieces that are each increasing for x >= 5.7.
_B = "0.782"


def _lhs_terms(x):
    L = rigor.ln(x)
    t1 = _c("0.75", x) * L + L / x
    t2 = -_c("2.1454", x) - rigor.sqr(L) / (4 * x) - rigor.sqr(L) / (4 * rigor.sqr(x))
    t3 = _c(_B, x) * (1 - 1 / x + L / (4 * rigor.sqr(x)))
    return t1, t2, t3


def _lhs(x):
    t1, t2, t3 = _lhs_terms(x)
    return t1 + t2 + t3


def _slope1(x):
    # x^2 * d/dx t1
    return _c("0.75", x) * x + 1 - rigor.ln(x)


def _slope2(x):
    # 4 x^3 * d/dx t2
    L = rigor.ln(x)
    return x * L * (L - 2) + 2 * L * (L - 1)


def _slope3(x):
    # 4 x^3 / 0.782 * d/dx t3
    return 4 * x + 1 - 2 * rigor.ln(x)


def _lhs_d(x):
    x2 = rigor.sqr(x)
    x3 = x2 * x
    return _slope1(x) / x2 + _slope2(x) / (4 * x3) + _c(_B, x) * _slope3(x) / (4 * x3)


def _upper_reduced(x):
    L = rigor.ln(x)
    x2 = rigor.sqr(x)
    lm1 = L - 1
    return rigor.sqr(L) / x2 + (1 - 1 / x + L / x2) * lm1 / (x + lm1 / 2) - (L - 2) / x


EXPRESSIONS: dict[str, Expression] = {
    e.id: e
    for e in (
        Expression("log-sandwich-upper", "1/(x+0.4) - log(1+1/x)", _ineq_left, _ineq_left_d),
        Expression("log-sandwich-lower", "log(1+1/x) - 1/(x+0.5)", _ineq_right, _ineq_right_d),
        Expression("f-prime-0.4", "a^2 x + 2a - 1 at a = 0.4", lambda x: bounds.f_a_prime_numerator(x, "0.4")),
        Expression("f-prime-0.5", "a^2 x + 2a - 1 at a = 0.5", lambda x: bounds.f_a_prime_numerator(x, "0.5")),
        Expression("g-prime", "(x + 0.4) g'(x)", bounds.g_prime_numerator, domain_lo=1.0),
        Expression("g-minus-0.018", "g(x) - 0.018", _g_gap, _g_gap_d, domain_lo=1.0),
        Expression("lower-gap", "lower-bound gap in x = log n", _lhs, _lhs_d),
        Expression("lower-gap-slope1", "x^2 times the slope of the first piece", _slope1),
        Expression("lower-gap-slope2", "4x^3 times the slope of the second piece", _slope2),
        Expression("lower-gap-slope3", "4x^3/0.782 times the slope of the third piece", _slope3),
        Expression(
            "upper-reduced",
            "upper-bound reduction in x = log n",
            _upper_reduced,
            domain_lo=1.0,
            open_at_lo=False,
        ),
    )
}


def get_expression(expr_id: str) -> Expression:
    try:
        return EXPRESSIONS[expr_id]
    except KeyError:
        raise RegistryError(f"unknown expression id {expr_id!r}") from None


@dataclass
class SignReport:
    expr_id: str
    window: tuple[float, float]
    expected_sign: int
    verdict: Verdict
    leaves: int = 0
    evaluations: int = 0
    extended_evaluations: int = 0
    unresolved: list[tuple[float, float]] = field(default_factory=list)
    counterexample: float | None = None


def _box(lo: float, hi: float, prec: int) -> Enclosure:
    return rigor.promote(Enclosure(lo, hi), prec)


def _bound(expr: Expression, lo: float, hi: float, prec: int) -> Enclosure:
    x = _box(lo, hi, prec)
    val = expr.func(x)
    if expr.derivative is not None and lo < hi:
        m = rigor.midpoint(x)
        val = rigor.intersect(val, expr.func(m) + expr.derivative(x) * (x - m))
    return val


def _classify(val: Enclosure, sign: int) -> Verdict:
    lo, hi = val.to_floats()
    if sign > 0:
        return Verdict.HOLDS if lo > 0 else Verdict.FAILS if hi <= 0 else Verdict.UNKNOWN
    return Verdict.HOLDS if hi < 0 else Verdict.FAILS if lo >= 0 else Verdict.UNKNOWN


def _split(lo: float, hi: float) -> float:
    # Geometric split on wide positive boxes so leaves are scale-relative.
    if lo > 0 and hi > 4 * lo:
        mid = math.sqrt(lo) * math.sqrt(hi)
    else:
        mid = lo / 2 + hi / 2
    return min(max(mid, math.nextafter(lo, math.inf)), math.nextafter(hi, -math.inf))


def sign_report(
    expr_id: str,
    x_lo,
    x_hi,
    expected_sign: int,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> SignReport:
    """Certify that the expression has ``expected_sign`` (+1 or -1) on ``[x_lo, x_hi]``."""
    expr = get_expression(expr_id)
    if expected_sign not in (1, -1):
        raise ValueError("expected_sign must be +1 or -1")
    lo = float(rigor.from_decimal(x_lo).lo)
    hi = float(rigor.from_decimal(x_hi).hi)
    if not lo < hi:
        raise ValueError("need x_lo < x_hi")
    if lo < expr.domain_lo or (expr.open_at_lo and lo == expr.domain_lo):
        raise DomainError(f"{expr_id} is defined for x > {expr.domain_lo}")
    report = SignReport(expr_id, (float(x_lo), float(x_hi)), expected_sign, Verdict.UNKNOWN)

    def evaluate(a, b):
        report.evaluations += 1
        val = _bound(expr, a, b, NATIVE)
        v = _classify(val, expected_sign)
        if v is Verdict.UNKNOWN:
            report.extended_evaluations += 1
            val = _bound(expr, a, b, EXTENDED)
            v = _classify(val, expected_sign)
        return v, float(val.width())

    heap: list = []

    def push(a, b, depth):
        v, width = evaluate(a, b)
        if v is Verdict.HOLDS:
            report.leaves += 1
            return True
        if v is Verdict.FAILS:
            report.counterexample = a
            return False
        # A box that fails at its left end is a counterexample outright.
        if evaluate(a, a)[0] is Verdict.FAILS:
            report.counterexample = a
            return False
        heapq.heappush(heap, (-width, a, b, depth))
        return True

    if not push(lo, hi, 0):
        report.verdict = Verdict.FAILS
        return report
    while heap:
        _, a, b, depth = heapq.heappop(heap)
        if depth >= max_depth or not a < _split(a, b) < b:
            report.unresolved.append((a, b))
            continue
        m = _split(a, b)
        if not (push(a, m, depth + 1) and push(m, b, depth + 1)):
            report.verdict = Verdict.FAILS
            return report
    report.verdict = Verdict.UNKNOWN if report.unresolved else Verdict.HOLDS
    return report


def check_sign_on_interval(
    expr_id: str,
    x_lo,
    x_hi,
    expected_sign: int,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Verdict:
    """Holds if every leaf of an adaptive bisection certifies the sign."""
    return sign_report(expr_id, x_lo, x_hi, expected_sign, max_depth).verdict
