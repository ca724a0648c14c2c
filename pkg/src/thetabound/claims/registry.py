"""The built-in claim registry.

Indexed predicates have the signature ``predicate(n, ctx, prec, **params)``
and return a :class:`Verdict` for an integer ``n`` or an ``int8`` code array
for an integer array (native and long-double tiers only).
"""

from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .. import bounds, rigor
from ..bounds import CONSTANTS
from ..errors import RegistryError
from ..rigor import Verdict
from .continuous import DEFAULT_WINDOW_END
from .quantities import LAMBDA_MIN_INDEX, lambda_effective, relative_error

INDEXED = "indexed-inequality"
CONTINUOUS = "continuous-sign"
FAMILY = "crossover-family"

DEFAULT_EPSILON = 0.5


@dataclass(frozen=True)
class Claim:
    id: str
    description: str
    predicate: Callable | None
    claimed_min_n: int | None
    kind: str
    reference: str
    domain_min: int = 2
    needs_context: bool = True
    extended: bool = False
    # continuous claims
    expression: str | None = None
    expected_sign: int = 0
    window: tuple | None = None
    # crossover families
    parameter: str | None = None
    params: tuple = ()

    def __post_init__(self):
        if self.claimed_min_n is not None and self.claimed_min_n < 2:
            raise ValueError(f"{self.id}: claimed_min_n must be >= 2")
        if self.kind not in (INDEXED, CONTINUOUS, FAMILY):
            raise ValueError(f"{self.id}: unknown kind {self.kind!r}")

    @property
    def bound(self) -> bool:
        """False for a family whose parameter has not been fixed yet."""
        return self.parameter is None or bool(self.params)

    def bind(self, **params) -> "Claim":
        """Fix the family parameter, e.g. ``claim.bind(epsilon=0.5)``."""
        if self.parameter is None:
            raise ValueError(f"{self.id} takes no parameter")
        if set(params) != {self.parameter}:
            raise ValueError(f"{self.id} takes exactly the parameter {self.parameter!r}")
        value = params[self.parameter]
        if self.parameter == "epsilon" and not 0 < float(value) < 1:
            raise ValueError("epsilon must lie strictly between 0 and 1")
        return dataclasses.replace(
            self,
            predicate=functools.partial(self.predicate, **params),
            params=tuple(sorted(params.items())),
        )

    def evaluate(self, n, ctx, prec: int = rigor.NATIVE):
        if not self.bound:
            raise ValueError(f"{self.id} needs {self.parameter} bound first")
        return self.predicate(n, ctx, prec)

    @property
    def domain(self) -> dict:
        if self.kind == CONTINUOUS:
            return {"variable": "x", "min": self.window[0], "max": self.window[1]}
        return {"variable": "n", "min": self.claimed_min_n, "evaluable_from": self.domain_min}

    def describe(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "reference": self.reference,
            "domain": self.domain,
            "kind": self.kind,
        }


# -- predicates ----------------------------------------------------------------


def _n(n, prec):
    return rigor.from_integer(n, prec)


def _bonse(n, ctx, prec, k):
    return rigor.compare_gt(ctx.theta(n, prec), k * ctx.log_prime(n + 1, prec))


def _panaitopol(n, ctx, prec):
    lhs = ctx.theta(n, prec) / ctx.log_prime(n + 1, prec)
    return rigor.compare_gt(lhs, bounds.panaitopol_rhs(n, ctx.pi(n), prec))


def _hassani(n, ctx, prec):
    lhs = ctx.theta(n, prec) / ctx.log_prime(n + 1, prec)
    return rigor.compare_gt(lhs, bounds.hassani_rhs(n, ctx.pi(n), prec))


def _robin_lower(n, ctx, prec):
    return rigor.compare_ge(ctx.ratio(n, prec), bounds.G(n, CONSTANTS.a_robin, prec))


def _mr_ratio(n, ctx, prec):
    return rigor.compare_le(ctx.ratio(n, prec), bounds.G(n, CONSTANTS.a_mr, prec))


def _pn_upper(n, ctx, prec, c):
    return rigor.compare_le(_n(ctx.prime(n), prec), bounds.pn_upper_mr(n, c, prec))


def _pn_lower(n, ctx, prec):
    return rigor.compare_ge(_n(ctx.prime(n), prec), bounds.pn_lower_dusart(n, prec))


def _u_bound(n, ctx, prec):
    return rigor.compare_lt(ctx.log_prime(n + 1, prec), bounds.U(n, prec))


def _v_bound(n, ctx, prec):
    return rigor.compare_gt(ctx.log_prime(n + 1, prec), bounds.V(n, prec))


def _lower_reduction(n, ctx, prec, lam="0.25"):
    return rigor.compare_ge(bounds.G(n, CONSTANTS.a_robin, prec), bounds.F(n, lam, prec) * bounds.U(n, prec))


def _upper_reduction(n, ctx, prec):
    return rigor.compare_le(bounds.G(n, CONSTANTS.a_mr, prec), bounds.F(n, 1, prec) * bounds.V(n, prec))


def _theta_lower(n, ctx, prec, lam="0.25"):
    return rigor.compare_ge(ctx.ratio(n, prec), bounds.F(n, lam, prec) * ctx.log_prime(n + 1, prec))


def _theta_upper(n, ctx, prec):
    return rigor.compare_le(ctx.ratio(n, prec), bounds.F(n, 1, prec) * ctx.log_prime(n + 1, prec))


def _one_minus(epsilon) -> Fraction:
    return 1 - Fraction(repr(epsilon) if isinstance(epsilon, float) else epsilon)


def _g_dominates_fu(n, ctx, prec, epsilon):
    return _lower_reduction(n, ctx, prec, _one_minus(epsilon))


def _t2_left(n, ctx, prec, epsilon):
    return _theta_lower(n, ctx, prec, _one_minus(epsilon))


def _axler_gap(n, ctx, prec):
    return ctx.log_prime(n, prec) - ctx.ratio(n, prec)


def _axler_lower(n, ctx, prec):
    lower, _ = bounds.axler_gap_bounds(n, ctx.prime(n), prec)
    return rigor.compare_gt(_axler_gap(n, ctx, prec), lower)


def _axler_upper(n, ctx, prec):
    _, upper = bounds.axler_gap_bounds(n, ctx.prime(n), prec)
    return rigor.compare_lt(_axler_gap(n, ctx, prec), upper)


def _pi_ratio(n, ctx, prec):
    return _n(ctx.pi(n), prec) / _n(n, prec)


def _dusart_pi(n, ctx, prec):
    return rigor.compare_ge(_pi_ratio(n, ctx, prec), bounds.dusart_pi_rhs(n, prec))


def _derived_pi(n, ctx, prec):
    return rigor.compare_ge(_pi_ratio(n, ctx, prec), bounds.derived_pi_rhs(n, prec))


def _improvement(n, ctx, prec):
    lhs = _n(n, prec) * bounds.F(n, "0.25", prec)
    return rigor.compare_ge(lhs, bounds.hassani_rhs(n, ctx.pi(n), prec))


def _relerr_below(n, ctx, prec, level):
    return rigor.compare_lt(relative_error(n, ctx, prec), rigor.from_decimal(level, prec))


def _lambda_bracket(n, ctx, prec):
    lam = lambda_effective(n, ctx, prec)
    return rigor.combine(
        rigor.compare_ge(lam, rigor.from_decimal("0.25", prec)),
        rigor.compare_le(lam, rigor.from_integer(1, prec)),
    )


# -- registry -----------------------------------------------------------------


def _builtin() -> list[Claim]:
    P = functools.partial
    return [
        Claim("BONSE-2", "theta(p_n) > 2 log p_{n+1}", P(_bonse, k=2), 4, INDEXED, "Bonse"),
        Claim("BONSE-3", "theta(p_n) > 3 log p_{n+1}", P(_bonse, k=3), 5, INDEXED, "Bonse"),
        Claim("PANAITOPOL", "theta(p_n) / log p_{n+1} > n - pi(n)", _panaitopol, 2, INDEXED, "Panaitopol"),
        Claim(
            "HASSANI",
            "theta(p_n) / log p_{n+1} > n - pi(n) (1 - 1/log n)",
            _hassani,
            101,
            INDEXED,
            "Hassani",
        ),
        Claim("ROBIN-LOWER", "theta(p_n)/n >= G(n, 2.1454)", _robin_lower, 3, INDEXED, "Robin"),
        Claim("MR-UPPER-RATIO", "theta(p_n)/n <= G(n, 2)", _mr_ratio, 198, INDEXED, "Massias and Robin"),
        Claim(
            "MR-UPPER-08",
            "p_n <= n (log n + log log n - 0.8)",
            P(_pn_upper, c=CONSTANTS.c_mr_weak),
            227,
            INDEXED,
            "Massias and Robin; direct computation below 8602",
        ),
        Claim("DUSART-LOWER-PN", "p_n >= n (log n + log log n - 1)", _pn_lower, 2, INDEXED, "Dusart"),
        Claim(
            "MR-UPPER-09385",
            "p_n <= n (log n + log log n - 0.9385)",
            P(_pn_upper, c=CONSTANTS.c_mr_strong),
            8602,
            INDEXED,
            "Massias and Robin",
        ),
        Claim("U-BOUND", "log p_{n+1} < U(n)", _u_bound, 140, INDEXED, "upper bound for log p_{n+1}"),
        Claim("V-BOUND", "log p_{n+1} > V(n)", _v_bound, 2, INDEXED, "lower bound for log p_{n+1}"),
        Claim(
            "INEQ-3.3-LEFT",
            "1/(x + 0.4) > log(1 + 1/x)",
            None,
            None,
            CONTINUOUS,
            "logarithm sandwich, upper side",
            needs_context=False,
            expression="log-sandwich-upper",
            expected_sign=1,
            window=(1, DEFAULT_WINDOW_END),
        ),
        Claim(
            "INEQ-3.3-RIGHT",
            "log(1 + 1/x) > 1/(x + 0.5)",
            None,
            None,
            CONTINUOUS,
            "logarithm sandwich, lower side",
            needs_context=False,
            expression="log-sandwich-lower",
            expected_sign=1,
            window=(1, DEFAULT_WINDOW_END),
        ),
        Claim(
            "LEMMA4-1",
            "G(n, 2.1454) >= F(n, 0.25) U(n)",
            _lower_reduction,
            396,
            INDEXED,
            "formula reduction for the lower bound",
            needs_context=False,
        ),
        Claim(
            "LEMMA4-2",
            "G(n, 2) <= F(n, 1) V(n)",
            _upper_reduction,
            2,
            INDEXED,
            "formula reduction for the upper bound",
            needs_context=False,
        ),
        Claim("T1-LEFT", "theta(p_n)/n >= F(n, 0.25) log p_{n+1}", _theta_lower, 2, INDEXED, "main lower bound"),
        Claim("T1-RIGHT", "theta(p_n)/n <= F(n, 1) log p_{n+1}", _theta_upper, 6, INDEXED, "main upper bound"),
        Claim(
            "LEMMA5",
            "G(n, 2.1454) >= F(n, 1 - epsilon) U(n)",
            _g_dominates_fu,
            None,
            FAMILY,
            "formula reduction for the epsilon lower bound",
            needs_context=False,
            parameter="epsilon",
        ),
        Claim(
            "T2-LEFT",
            "theta(p_n)/n >= F(n, 1 - epsilon) log p_{n+1}",
            _t2_left,
            None,
            FAMILY,
            "epsilon lower bound",
            parameter="epsilon",
        ),
        Claim(
            "AXLER-LOWER",
            "log p_n - theta(p_n)/n > 1 + 1/log p_n + 2.7/log^2 p_n",
            _axler_lower,
            CONSTANTS.axler_lower_from,
            INDEXED,
            "Axler",
        ),
        Claim(
            "AXLER-UPPER",
            "log p_n - theta(p_n)/n < 1 + 1/log p_n + 3.84/log^2 p_n",
            _axler_upper,
            CONSTANTS.axler_upper_from,
            INDEXED,
            "Axler",
            extended=True,
        ),
        Claim("DUSART-PI", "pi(n)/n >= 1/log n + 1/log^2 n", _dusart_pi, 599, INDEXED, "Dusart"),
        Claim(
            "REMARK1-DERIVED",
            "pi(n)/n >= (1 - log log n / (4 log n)) / (log n - 1)",
            _derived_pi,
            83,
            INDEXED,
            "consequence of Dusart's pi(n) bound",
        ),
        Claim(
            "IMPROVEMENT",
            "n F(n, 0.25) >= n - pi(n) (1 - 1/log n)",
            _improvement,
            101,
            INDEXED,
            "main lower bound against Hassani's bound",
        ),
        Claim(
            "RELERR-5PCT",
            "relative error of F(n, 0.25) log p_{n+1} is below 5%",
            P(_relerr_below, level="0.05"),
            23,
            INDEXED,
            "numerical relative-error threshold",
        ),
        Claim(
            "RELERR-2PCT",
            "relative error of F(n, 0.25) log p_{n+1} is below 2%",
            P(_relerr_below, level="0.02"),
            114,
            INDEXED,
            "numerical relative-error threshold",
        ),
        Claim(
            "G-SIGN-599",
            "g(x) <= 0.018 for x >= 400",
            None,
            None,
            CONTINUOUS,
            "bound on g past exp(5.99)",
            needs_context=False,
            expression="g-minus-0.018",
            expected_sign=-1,
            window=(400, DEFAULT_WINDOW_END),
        ),
        Claim(
            "LAMBDA-BRACKET",
            "0.25 <= lambda_effective(n) <= 1",
            _lambda_bracket,
            LAMBDA_MIN_INDEX,
            INDEXED,
            "implied lambda bracket",
            domain_min=LAMBDA_MIN_INDEX,
        ),
    ]


class Registry:
    """An ordered, id-unique collection of claims."""

    def __init__(self, claims=()):
        self._claims: dict[str, Claim] = {}
        for claim in claims:
            self.add(claim)

    def add(self, claim: Claim) -> None:
        if claim.id in self._claims:
            raise ValueError(f"duplicate claim id {claim.id!r}")
        self._claims[claim.id] = claim

    def get(self, claim_id: str) -> Claim:
        try:
            return self._claims[claim_id]
        except KeyError:
            raise RegistryError(f"unknown claim id {claim_id!r}") from None

    __getitem__ = get

    def __contains__(self, claim_id) -> bool:
        return claim_id in self._claims

    def __iter__(self) -> Iterator[Claim]:
        return iter(self._claims.values())

    def __len__(self) -> int:
        return len(self._claims)

    def ids(self) -> list[str]:
        return list(self._claims)

    def export(self) -> list[dict]:
        """Structured description of every claim, in registry order."""
        return [c.describe() for c in self]


REGISTRY = Registry(_builtin())


def get_claim(claim_id: str, registry: Registry | None = None) -> Claim:
    return (registry or REGISTRY).get(claim_id)


__all__ = [
    "CONTINUOUS",
    "Claim",
    "DEFAULT_EPSILON",
    "FAMILY",
    "INDEXED",
    "REGISTRY",
    "Registry",
    "Verdict",
    "get_claim",
]
