"""Checking claims over index ranges and locating crossover indices."""

from __future__ import annotations

import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import bounds, rigor
from ..chebyshev import theta_window
from ..errors import DomainError, ResourceError
from ..rigor import EXTENDED, MAX_PRECISION, NATIVE, Enclosure, Verdict
from .continuous import sign_report
from .registry import CONTINUOUS, DEFAULT_EPSILON, FAMILY, REGISTRY, Claim, Registry

LIST_CAP = 100
CHUNK = 1 << 17
N_EPSILON_FLOOR = 140
INTERPRETATION = "relative error = (theta(p_n)/n - F(n,0.25) log p_{n+1}) / (theta(p_n)/n)"


@dataclass
class VerificationReport:
    claim_id: str
    range_checked: tuple | None
    holds: int
    fails: list = field(default_factory=list)
    unknowns: list = field(default_factory=list)
    fail_count: int = 0
    unknown_count: int = 0
    first_violation: int | float | None = None
    wall_time: float = 0.0
    precision_used: int = NATIVE
    retried: int = 0
    kind: str = "indexed-inequality"
    epsilon: float | None = None

    @property
    def verdict(self) -> Verdict:
        if self.fail_count:
            return Verdict.FAILS
        if self.unknown_count:
            return Verdict.UNKNOWN
        return Verdict.HOLDS

    @property
    def skipped(self) -> bool:
        return self.range_checked is None

    def to_dict(self, include_time: bool = False) -> dict:
        out = asdict(self)
        out["verdict"] = "SKIPPED" if self.skipped else self.verdict.name
        if out["range_checked"] is not None:
            out["range_checked"] = list(out["range_checked"])
        if not include_time:
            del out["wall_time"]
        return out


@dataclass
class CrossoverResult:
    claim_id: str
    horizon: int
    n0: int | None
    exhaustive: bool
    epsilon: float | None = None
    n_epsilon: int | None = None
    unknowns_below: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _resolve(claim_or_id, registry: Registry | None, epsilon) -> Claim:
    claim = claim_or_id if isinstance(claim_or_id, Claim) else (registry or REGISTRY).get(claim_or_id)
    if claim.kind == FAMILY and not claim.bound:
        claim = claim.bind(epsilon=DEFAULT_EPSILON if epsilon is None else epsilon)
    elif epsilon is not None and claim.kind != FAMILY:
        raise ValueError(f"{claim.id} takes no epsilon")
    return claim


def _retry_precision(prec: int) -> int:
    return min(MAX_PRECISION, max(EXTENDED, 2 * prec))


def _codes(claim: Claim, lo: int, hi: int, ctx, prec: int) -> np.ndarray:
    if rigor._is_mp(rigor.resolve_precision(prec)):
        return np.array([int(claim.evaluate(n, ctx, prec)) for n in range(lo, hi + 1)], dtype=np.int8)
    out = claim.evaluate(np.arange(lo, hi + 1, dtype=np.int64), ctx, prec)
    return np.asarray(out, dtype=np.int8).reshape(-1)


def evaluate_range(claim: Claim, n_min: int, n_max: int, ctx, prec: int = NATIVE, retry: bool = True):
    """Verdict codes for ``n_min..n_max`` with Unknowns retried once at higher precision.

    Returns ``(codes, retried, precision_used)``.
    """
    parts = []
    retried = 0
    used = rigor.resolve_precision(prec)
    for lo in range(n_min, n_max + 1, CHUNK):
        hi = min(n_max, lo + CHUNK - 1)
        codes = _codes(claim, lo, hi, ctx, prec)
        unknown = np.flatnonzero(codes == Verdict.UNKNOWN)
        if retry and unknown.size:
            rp = _retry_precision(used)
            for i in unknown.tolist():
                codes[i] = int(claim.evaluate(lo + i, ctx, rp))
            retried += unknown.size
            used = max(used, rp)
        parts.append(codes)
    codes = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int8)
    return codes, retried, used


def _report(claim: Claim, n_min: int, codes: np.ndarray, retried: int, used: int, started: float) -> VerificationReport:
    fails = np.flatnonzero(codes == Verdict.FAILS) + n_min
    unknowns = np.flatnonzero(codes == Verdict.UNKNOWN) + n_min
    return VerificationReport(
        claim_id=claim.id,
        range_checked=(n_min, n_min + codes.size - 1),
        holds=int(np.count_nonzero(codes == Verdict.HOLDS)),
        fails=fails[:LIST_CAP].tolist(),
        unknowns=unknowns[:LIST_CAP].tolist(),
        fail_count=int(fails.size),
        unknown_count=int(unknowns.size),
        first_violation=int(fails[0]) if fails.size else None,
        wall_time=time.perf_counter() - started,
        precision_used=used,
        retried=retried,
        kind=claim.kind,
        epsilon=dict(claim.params).get("epsilon"),
    )


def _continuous_report(claim: Claim, started: float) -> VerificationReport:
    sr = sign_report(claim.expression, claim.window[0], claim.window[1], claim.expected_sign)
    fails = [sr.counterexample] if sr.counterexample is not None else []
    unknowns = [a for a, _ in sr.unresolved]
    return VerificationReport(
        claim_id=claim.id,
        range_checked=tuple(claim.window),
        holds=sr.leaves,
        fails=fails,
        unknowns=unknowns[:LIST_CAP],
        fail_count=len(fails),
        unknown_count=len(unknowns),
        first_violation=fails[0] if fails else None,
        wall_time=time.perf_counter() - started,
        precision_used=EXTENDED if sr.extended_evaluations else NATIVE,
        retried=sr.extended_evaluations,
        kind=claim.kind,
    )


def _check_span(claim: Claim, n_min: int, n_max: int, ctx) -> None:
    if n_min < claim.domain_min:
        raise DomainError(f"{claim.id} is evaluable for n >= {claim.domain_min}")
    if n_max < n_min:
        raise ValueError("need n_min <= n_max")
    if claim.needs_context:
        if ctx is None:
            raise ResourceError(f"{claim.id} needs a prime context up to {n_max + 1}", required=n_max + 1)
        ctx.require(n_max)


def check_claim(
    claim_id,
    n_min: int,
    n_max: int,
    ctx=None,
    *,
    prec: int = NATIVE,
    epsilon=None,
    registry: Registry | None = None,
    retry: bool = True,
) -> VerificationReport:
    """Per-index verdicts of one claim over ``[n_min, n_max]``.

    Continuous claims ignore the index range and certify their own window;
    their counts refer to bisection leaves.
    """
    started = time.perf_counter()
    claim = _resolve(claim_id, registry, epsilon)
    if claim.kind == CONTINUOUS:
        return _continuous_report(claim, started)
    _check_span(claim, n_min, n_max, ctx)
    codes, retried, used = evaluate_range(claim, n_min, n_max, ctx, prec, retry)
    return _report(claim, n_min, codes, retried, used, started)


def find_crossover(
    claim_id,
    horizon: int,
    ctx=None,
    epsilon=None,
    *,
    prec: int = NATIVE,
    registry: Registry | None = None,
) -> CrossoverResult:
    """Smallest ``n0`` such that the claim Holds for every ``n`` in ``[n0, horizon]``."""
    claim = _resolve(claim_id, registry, epsilon)
    if claim.kind == CONTINUOUS:
        raise ValueError(f"{claim.id} is not indexed")
    start = claim.domain_min
    _check_span(claim, start, horizon, ctx)
    codes, _, _ = evaluate_range(claim, start, horizon, ctx, prec)
    bad = np.flatnonzero(codes != Verdict.HOLDS)
    if not bad.size:
        n0 = start
    elif bad[-1] == codes.size - 1:
        n0 = None
    else:
        n0 = int(bad[-1]) + 1 + start
    below = codes if n0 is None else codes[: n0 - start]
    unknowns_below = int(np.count_nonzero(below == Verdict.UNKNOWN))
    eps = dict(claim.params).get("epsilon")
    return CrossoverResult(
        claim_id=claim.id,
        horizon=horizon,
        n0=n0,
        exhaustive=unknowns_below == 0,
        epsilon=eps,
        n_epsilon=max(n0, N_EPSILON_FLOOR) if (eps is not None and n0 is not None) else None,
        unknowns_below=unknowns_below,
    )


# -- suite -----------------------------------------------------------------------

_WORKER: dict = {}


def _work(task):
    claim_id, lo, hi, prec, epsilon = task
    claim = _resolve(claim_id, _WORKER["registry"], epsilon)
    return evaluate_range(claim, lo, hi, _WORKER["ctx"], prec)


def _plan(claim: Claim, max_n: int) -> tuple[int, int] | None:
    lo = max(claim.claimed_min_n or claim.domain_min, claim.domain_min)
    return (lo, max_n) if lo <= max_n else None


def run_suite(
    claim_ids,
    max_n: int,
    ctx=None,
    *,
    prec: int = NATIVE,
    jobs: int = 1,
    epsilon=None,
    registry: Registry | None = None,
    extended: bool = False,
) -> list:
    """Check every selected claim on its claimed domain capped at ``max_n``.

    Families are reported as crossovers with horizon ``max_n``. Extended claims
    run only with ``extended=True``, on a streamed window past their threshold.
    Results come back in selection order whatever ``jobs`` is.
    """
    registry = registry or REGISTRY
    if claim_ids in (None, "all"):
        claims = list(registry)
    else:
        claims = [registry.get(c) for c in claim_ids]
    if any(c.needs_context and c.kind != CONTINUOUS and not c.extended for c in claims) and ctx is None:
        raise ResourceError("a prime context is required", required=max_n + 1)
    results: list = [None] * len(claims)
    tasks = []
    for i, claim in enumerate(claims):
        if claim.kind == CONTINUOUS:
            results[i] = check_claim(claim, 0, 0, registry=registry)
        elif claim.kind == FAMILY:
            results[i] = find_crossover(claim, max_n, ctx, epsilon if epsilon is not None else DEFAULT_EPSILON,
                                        prec=prec)
        elif claim.extended:
            results[i] = extended_check(claim) if extended else _skipped(claim, prec)
        else:
            span = _plan(claim, max_n)
            if span is None:
                results[i] = _skipped(claim, prec)
                continue
            for lo in range(span[0], span[1] + 1, CHUNK):
                tasks.append((i, claim.id, lo, min(span[1], lo + CHUNK - 1)))
    started = time.perf_counter()
    if jobs > 1 and len(tasks) > 1:
        _WORKER.update(ctx=ctx, registry=registry)
        try:
            mp_ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(jobs, mp_context=mp_ctx) as pool:
                outs = list(pool.map(_work, [(cid, lo, hi, prec, None) for _, cid, lo, hi in tasks]))
        finally:
            _WORKER.clear()
    else:
        outs = [evaluate_range(claims[i], lo, hi, ctx, prec) for i, _, lo, hi in tasks]
    merged: dict[int, list] = {}
    for (i, _, lo, _), out in zip(tasks, outs):
        merged.setdefault(i, []).append((lo, out))
    for i, pieces in merged.items():
        pieces.sort(key=lambda item: item[0])
        codes = np.concatenate([p[1][0] for p in pieces])
        retried = sum(p[1][1] for p in pieces)
        used = max(p[1][2] for p in pieces)
        results[i] = _report(claims[i], pieces[0][0], codes, retried, used, started)
    return results


def _skipped(claim: Claim, prec: int) -> VerificationReport:
    return VerificationReport(claim.id, None, 0, precision_used=rigor.resolve_precision(prec), kind=claim.kind)


# -- extended run -----------------------------------------------------------------

EXTENDED_WINDOW = 1 << 14


def extended_check(claim: Claim, first: int | None = None, count: int = EXTENDED_WINDOW) -> VerificationReport:
    """Streamed check of a large-index claim on ``[first, first + count)``.

    Only the Axler gap claims are supported; ``first`` defaults to the
    claimed threshold.
    """
    started = time.perf_counter()
    first = first or claim.claimed_min_n
    last = first + count - 1
    n, p, lo, hi, _ = theta_window(first, last)
    theta = Enclosure._make(lo, hi, NATIVE)
    gap = rigor.ln(rigor.from_integer(p)) - theta / rigor.from_integer(n)
    lower, upper = bounds.axler_gap_bounds(n, p)
    if claim.id == "AXLER-UPPER":
        codes = rigor.compare_lt(gap, upper)
    elif claim.id == "AXLER-LOWER":
        codes = rigor.compare_gt(gap, lower)
    else:
        raise ValueError(f"no streamed check for {claim.id}")
    return _report(claim, first, np.asarray(codes, dtype=np.int8), 0, NATIVE, started)
