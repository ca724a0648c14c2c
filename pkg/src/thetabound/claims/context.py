"""Shared data for claim predicates: the prime table and theta enclosures."""

from __future__ import annotations

import os

from .. import rigor
from ..chebyshev import FULL_SERIES_CAP, ThetaSeries, long_series, theta_exact, theta_series
from ..errors import ResourceError
from ..primes import PrimeTable, SieveConfig, load_or_build
from ..rigor import NATIVE, Enclosure


class Context:
    """Prime table plus theta series, with lazily built higher tiers.

    Predicates ask for ``theta(n, prec)`` and ``log_prime(i, prec)``; the
    context serves them from the native series, the long-double series or
    exact primorials depending on ``prec``.
    """

    def __init__(self, table: PrimeTable, series: ThetaSeries | None = None):
        self.table = table
        if series is None:
            series = theta_series(table, min(table.count, FULL_SERIES_CAP))
        self.series = series
        self._long: ThetaSeries | None = None
        self._exact: dict[tuple[int, int], Enclosure] = {}

    @classmethod
    def build(cls, max_n: int, *, cache_path: str | os.PathLike | None = None, jobs: int = 1) -> "Context":
        """Sieve far enough to evaluate every registered predicate for ``n <= max_n``."""
        if max_n < 2:
            raise ValueError("max_n must be >= 2")
        table = load_or_build(SieveConfig(target_index=max_n + 1), cache_path, jobs=jobs)
        return cls(table, theta_series(table, max_n + 1))

    @property
    def max_index(self) -> int:
        """Largest ``n`` with both ``theta(p_n)`` and ``p_{n+1}`` available."""
        return min(self.series.upto_index, self.table.count - 1)

    def require(self, n_max: int) -> None:
        if n_max > self.max_index:
            raise ResourceError(
                f"context covers n <= {self.max_index}; index {n_max + 1} is needed", required=n_max + 1
            )

    def prime(self, n):
        return self.table.nth_prime(n)

    def pi(self, x):
        return self.table.prime_count(x)

    def log_prime(self, index, prec: int = NATIVE) -> Enclosure:
        return rigor.ln(rigor.from_integer(self.prime(index), prec))

    def theta(self, n, prec: int = NATIVE) -> Enclosure:
        prec = rigor.resolve_precision(prec)
        if prec == NATIVE:
            return self.series.theta_at(n)
        if prec == rigor.LONG and rigor.HAS_LONG:
            if self._long is None or self._long.upto_index < self.series.upto_index:
                self._long = long_series(self.table, self.series.upto_index)
            return self._long.theta_at(n)
        key = (int(n), prec)
        if key not in self._exact:
            self._exact[key] = theta_exact(self.table, int(n), prec)
        return self._exact[key]

    def ratio(self, n, prec: int = NATIVE) -> Enclosure:
        """``theta(p_n) / n``."""
        return self.theta(n, prec) / rigor.from_integer(n, prec)
