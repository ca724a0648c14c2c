"""Named bound formulas for theta(p_n), p_n and pi(n), evaluated on enclosures.

Every function takes an integer ``n`` (or an integer numpy array, vectorized)
and builds ``log n`` itself, so all logarithms are certified in one place.
Numeric constants are kept as decimal strings and outward-rounded on use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rigor
from .errors import DomainError
from .rigor import NATIVE, Enclosure, Verdict


@dataclass(frozen=True)
class BoundConstants:
    a_robin: str = "2.1454"
    a_mr: str = "2"
    c_mr_strong: str = "0.9385"
    c_mr_weak: str = "0.8"
    u_corr: str = "0.018"
    axler_lo: str = "2.7"
    axler_hi: str = "3.84"
    axler_lower_from: int = 218
    axler_upper_from: int = 74004585


CONSTANTS = BoundConstants()


@dataclass(frozen=True)
class EpsilonQuery:
    """A request to locate the threshold for one ``0 < epsilon < 1``."""

    epsilon: float
    search_horizon: int

    def __post_init__(self):
        if not 0 < float(self.epsilon) < 1:
            raise ValueError("epsilon must lie strictly between 0 and 1")
        if self.search_horizon < 2:
            raise ValueError("search_horizon must be >= 2")

    @property
    def lam(self) -> Enclosure:
        """``1 - epsilon`` as an enclosure."""
        return 1 - rigor.from_decimal(self.epsilon)

    @staticmethod
    def n_epsilon(m_epsilon: int) -> int:
        """Threshold for the two-sided statement given the G-versus-F U threshold."""
        return max(m_epsilon, 140)


def _const(value, prec: int) -> Enclosure:
    if isinstance(value, Enclosure):
        return rigor.promote(value, prec)
    return rigor.from_decimal(value, prec)


def _index(n, minimum: int = 2):
    if isinstance(n, np.ndarray):
        if n.dtype.kind not in "iu":
            raise TypeError("n must be an integer array")
        if n.size and n.min() < minimum:
            raise DomainError(f"n must be >= {minimum}")
        return n.astype(np.int64)
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError("n must be an integer")
    if n < minimum:
        raise DomainError(f"n must be >= {minimum}, got {n}")
    return int(n)


def logs(n, prec: int = NATIVE) -> tuple[Enclosure, Enclosure]:
    """``(log n, log log n)`` for ``n >= 2``."""
    n = _index(n)
    log_n = rigor.ln(rigor.from_integer(n, prec))
    return log_n, rigor.ln(log_n)


def G(n, a, prec: int = NATIVE) -> Enclosure:
    """``log n + log log n - 1 + (log log n - a) / log n``."""
    L, LL = logs(n, prec)
    return L + LL - 1 + (LL - _const(a, L.prec)) / L


def F(n, lam, prec: int = NATIVE) -> Enclosure:
    """``1 - 1/log n + lam * log log n / log^2 n``."""
    L, LL = logs(n, prec)
    return 1 - 1 / L + _const(lam, L.prec) * LL / rigor.sqr(L)


def U(n, prec: int = NATIVE) -> Enclosure:
    """Upper bound for ``log p_{n+1}``: ``log n + log log n + (log log n - 0.8 + 0.018) / log n``."""
    L, LL = logs(n, prec)
    shift = _const(CONSTANTS.c_mr_weak, L.prec) - _const(CONSTANTS.u_corr, L.prec)
    return L + LL + (LL - shift) / L


def V(n, prec: int = NATIVE) -> Enclosure:
    """Lower bound for ``log p_{n+1}``: ``log n + log log n + (LL - 1) / (L + (LL - 1)/2)``."""
    L, LL = logs(n, prec)
    return L + LL + (LL - 1) / (L + (LL - 1) / 2)


# -- the auxiliary real-variable functions -----------------------------------


def _real(x, prec: int = NATIVE) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return rigor.from_decimal(x, prec) if not isinstance(x, (int, np.integer)) else rigor.from_integer(x, prec)


def f_a(x, a) -> Enclosure:
    """``log(1 + x) - x / (1 + a x)`` for ``x >= 0``."""
    x = _real(x)
    if np.any(np.asarray(x.lo) < 0):
        raise DomainError("f_a is used on x >= 0 only")
    a = _const(a, x.prec)
    return rigor.ln(1 + x) - x / (1 + a * x)


def f_a_prime_numerator(x, a) -> Enclosure:
    """The sign-deciding factor ``a^2 x + 2a - 1`` of ``f_a'``.

    ``f_a'(x) = x (a^2 x + 2a - 1) / ((1 + x)(1 + a x)^2)`` and the other
    factors are positive for ``x > 0``.
    """
    x = _real(x)
    if np.any(np.asarray(x.lo) <= 0):
        raise DomainError("the factorization is used for x > 0")
    a = _const(a, x.prec)
    return rigor.sqr(a) * x + 2 * a - 1


def f_a_prime(x, a) -> Enclosure:
    """``f_a'(x)`` in full, for cross-checking the factorization."""
    x = _real(x)
    a = _const(a, x.prec)
    return x * (rigor.sqr(a) * x + 2 * a - 1) / ((1 + x) * rigor.sqr(1 + a * x))


def g(x) -> Enclosure:
    """``(log x + 1 + 1/log x) / (x + 0.4)`` for ``x > 1``."""
    x = _real(x)
    if np.any(np.asarray(x.lo) <= 1):
        raise DomainError("g needs x > 1")
    L = rigor.ln(x)
    return (L + 1 + 1 / L) / (x + _const("0.4", x.prec))


def g_prime_numerator(x) -> Enclosure:
    """``(x + 0.4) g'(x)``, which has the sign of ``g'``.

    ``g' = [(1 - 1/log^2 x)(x + 0.4)/x - (log x + 1 + 1/log x)] / (x + 0.4)^2``.
    """
    x = _real(x)
    if np.any(np.asarray(x.lo) <= 1):
        raise DomainError("g needs x > 1")
    L = rigor.ln(x)
    return (1 - 1 / rigor.sqr(L)) * (x + _const("0.4", x.prec)) / x - (L + 1 + 1 / L)


# -- prime bounds --------------------------------------------------------------


def pn_lower_dusart(n, prec: int = NATIVE) -> Enclosure:
    """``n (log n + log log n - 1)``, a lower bound for ``p_n``."""
    L, LL = logs(n, prec)
    return rigor.from_integer(_index(n), L.prec) * (L + LL - 1)


def pn_upper_mr(n, c, prec: int = NATIVE) -> Enclosure:
    """``n (log n + log log n - c)`` with ``c`` one of 0.8 / 0.9385."""
    L, LL = logs(n, prec)
    return rigor.from_integer(_index(n), L.prec) * (L + LL - _const(c, L.prec))


def panaitopol_rhs(n, pi_n, prec: int = NATIVE) -> Enclosure:
    """``n - pi(n)``."""
    n = _index(n)
    return rigor.from_integer(n, prec) - rigor.from_integer(pi_n, prec)


def hassani_rhs(n, pi_n, prec: int = NATIVE) -> Enclosure:
    """``n - pi(n) (1 - 1/log n)``."""
    L, _ = logs(n, prec)
    return rigor.from_integer(_index(n), L.prec) - rigor.from_integer(pi_n, L.prec) * (1 - 1 / L)


def axler_gap_bounds(n, p_n, prec: int = NATIVE) -> tuple[Enclosure, Enclosure]:
    """Lower/upper bounds for ``log p_n - theta(p_n)/n``.

    ``1 + 1/log p_n + c / log^2 p_n`` with ``c = 2.7`` and ``c = 3.84``.
    """
    _index(n)
    lp = rigor.ln(rigor.from_integer(p_n, prec))
    base = 1 + 1 / lp
    inv2 = 1 / rigor.sqr(lp)
    return (
        base + _const(CONSTANTS.axler_lo, lp.prec) * inv2,
        base + _const(CONSTANTS.axler_hi, lp.prec) * inv2,
    )


def dusart_pi_rhs(n, prec: int = NATIVE) -> Enclosure:
    """``1/log n + 1/log^2 n``."""
    L, _ = logs(n, prec)
    return 1 / L + 1 / rigor.sqr(L)


def derived_pi_rhs(n, prec: int = NATIVE) -> Enclosure:
    """``(1 / (log n - 1)) (1 - log log n / (4 log n))``."""
    L, LL = logs(n, prec)
    return (1 - LL / (4 * L)) / (L - 1)


def pi_ratio_verdicts(n, pi_n, prec: int = NATIVE) -> tuple:
    """Verdicts of the two lower bounds for ``pi(n)/n`` at ``n``."""
    ratio = rigor.from_integer(pi_n, prec) / rigor.from_integer(_index(n), prec)
    return rigor.compare_ge(ratio, dusart_pi_rhs(n, prec)), rigor.compare_ge(ratio, derived_pi_rhs(n, prec))


__all__ = [
    "BoundConstants",
    "CONSTANTS",
    "EpsilonQuery",
    "F",
    "G",
    "U",
    "V",
    "Verdict",
    "axler_gap_bounds",
    "derived_pi_rhs",
    "dusart_pi_rhs",
    "f_a",
    "f_a_prime",
    "f_a_prime_numerator",
    "g",
    "g_prime_numerator",
    "hassani_rhs",
    "logs",
    "panaitopol_rhs",
    "pn_lower_dusart",
    "pn_upper_mr",
    "pi_ratio_verdicts",
]
