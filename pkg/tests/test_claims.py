import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetabound import rigor
from thetabound.claims import (
    EXPRESSIONS,
    REGISTRY,
    Claim,
    Context,
    Registry,
    check_claim,
    check_sign_on_interval,
    extended_check,
    find_crossover,
    get_claim,
    lambda_effective,
    relative_error,
    run_suite,
    sign_report,
)
from thetabound.claims.registry import FAMILY, INDEXED
from thetabound.errors import DomainError, RegistryError, ResourceError
from thetabound.primes import SieveConfig, sieve_build
from thetabound.rigor import EXTENDED, LONG, Verdict

EXPECTED_IDS = [
    "BONSE-2", "BONSE-3", "PANAITOPOL", "HASSANI", "ROBIN-LOWER", "MR-UPPER-RATIO",
    "MR-UPPER-08", "DUSART-LOWER-PN", "MR-UPPER-09385", "U-BOUND", "V-BOUND",
    "INEQ-3.3-LEFT", "INEQ-3.3-RIGHT", "LEMMA4-1", "LEMMA4-2", "T1-LEFT", "T1-RIGHT",
    "LEMMA5", "T2-LEFT", "AXLER-LOWER", "AXLER-UPPER", "DUSART-PI", "REMARK1-DERIVED",
    "IMPROVEMENT", "RELERR-5PCT", "RELERR-2PCT", "G-SIGN-599", "LAMBDA-BRACKET",
]


# -- synthetic claims --------------------------------------------------------------


def _fails_on_multiples(n, ctx, prec, every=1000):
    n = np.asarray(n)
    codes = np.where(n % every == 0, Verdict.FAILS, Verdict.HOLDS).astype(np.int8)
    return codes if codes.ndim else Verdict(int(codes))


def _never_decides(n, ctx, prec):
    if isinstance(n, np.ndarray):
        return np.zeros(n.shape, dtype=np.int8)
    return Verdict.UNKNOWN


def _tail_holds(n, ctx, prec, epsilon):
    # holds from 50 on, plus a lone early island at 10
    n = np.asarray(n)
    codes = np.where((n >= 50) | (n == 10), Verdict.HOLDS, Verdict.FAILS).astype(np.int8)
    return codes if codes.ndim else Verdict(int(codes))


def synthetic_registry():
    reg = Registry(list(REGISTRY))
    reg.add(Claim("SYN-FAIL", "fails at multiples of 1000", _fails_on_multiples, 2, INDEXED, "synthetic",
                  needs_context=False))
    reg.add(Claim("SYN-UNKNOWN", "never certifiable", _never_decides, 2, INDEXED, "synthetic", needs_context=False))
    reg.add(Claim("SYN-FAMILY", "holds on a tail", _tail_holds, None, FAMILY, "synthetic",
                  needs_context=False, parameter="epsilon"))
    return reg


# -- registry ---------------------------------------------------------------------------


def test_registry_is_complete():
    assert sorted(REGISTRY.ids()) == sorted(EXPECTED_IDS)
    assert len(REGISTRY) == 28


def test_export_is_json_and_describes_each_claim():
    rows = json.loads(json.dumps(REGISTRY.export()))
    assert [r["id"] for r in rows] == REGISTRY.ids()
    for row in rows:
        assert set(row) == {"id", "description", "reference", "domain", "kind"}
        assert row["reference"]


def test_unknown_id():
    with pytest.raises(RegistryError):
        get_claim("NOPE")
    with pytest.raises(RegistryError):
        check_claim("NOPE", 2, 10)
    assert "T1-LEFT" in REGISTRY and "NOPE" not in REGISTRY


def test_duplicate_and_invalid_claims():
    reg = Registry()
    claim = Claim("X", "x", _fails_on_multiples, 2, INDEXED, "r")
    reg.add(claim)
    with pytest.raises(ValueError):
        reg.add(claim)
    with pytest.raises(ValueError):
        Claim("Y", "y", None, 2, "weird", "r")


def test_family_binding():
    fam = get_claim("LEMMA5")
    assert not fam.bound
    with pytest.raises(ValueError):
        fam.evaluate(10, None)
    with pytest.raises(ValueError):
        fam.bind(epsilon=1.5)
    with pytest.raises(ValueError):
        get_claim("T1-LEFT").bind(epsilon=0.5)
    assert fam.bind(epsilon=0.5).bound


# -- indexed checks -----------------------------------------------------------------


@pytest.mark.parametrize(
    "claim_id, lo, hi",
    [
        ("T1-LEFT", 2, 395),
        ("T1-RIGHT", 6, 197),
        ("HASSANI", 101, 10_000),
        ("BONSE-2", 4, 10_000),
        ("BONSE-3", 5, 10_000),
        ("MR-UPPER-09385", 8602, 100_000),
        ("MR-UPPER-08", 227, 100_000),
        ("LEMMA4-1", 396, 399),
        ("LEMMA4-2", 2, 2),
        ("DUSART-PI", 599, 100_000),
    ],
)
def test_examples_hold(ctx, claim_id, lo, hi):
    report = check_claim(claim_id, lo, hi, ctx)
    assert report.verdict is Verdict.HOLDS
    assert report.holds == hi - lo + 1
    assert report.fail_count == report.unknown_count == 0
    assert report.range_checked == (lo, hi)


def test_small_index_observations(ctx):
    # recorded, not asserted as intent: the upper side below 6
    report = check_claim("T1-RIGHT", 2, 5, ctx)
    assert report.fail_count + report.holds + report.unknown_count == 4
    assert report.fails == [2, 3, 4, 5]


def test_pi_derived_bound_observed_failures(ctx):
    report = check_claim("REMARK1-DERIVED", 83, 100_000, ctx)
    assert report.fails == [88, 93, 94, 95, 96, 98, 99, 100, 126, 148]
    assert report.first_violation == 88


def test_improvement_observed_failures(ctx):
    report = check_claim("IMPROVEMENT", 101, 100_000, ctx)
    assert report.fails == [126, 148]


def test_synthetic_failures_are_reported():
    reg = synthetic_registry()
    report = check_claim("SYN-FAIL", 2, 5500, registry=reg)
    assert report.fails == [1000, 2000, 3000, 4000, 5000]
    assert report.first_violation == 1000
    assert report.verdict is Verdict.FAILS


def test_fail_list_is_capped():
    reg = synthetic_registry()
    report = check_claim("SYN-FAIL", 2, 200_000, registry=reg)
    assert report.fail_count == 200
    assert len(report.fails) == 100


def test_unknowns_survive_retry():
    reg = synthetic_registry()
    report = check_claim("SYN-UNKNOWN", 2, 20, registry=reg)
    assert report.verdict is Verdict.UNKNOWN
    assert report.unknown_count == 19 and report.retried == 19
    assert report.precision_used >= EXTENDED


def test_retry_can_be_disabled():
    reg = synthetic_registry()
    report = check_claim("SYN-UNKNOWN", 2, 20, registry=reg, retry=False)
    assert report.retried == 0


def test_precision_tiers_agree(ctx):
    for claim_id, lo, hi in (("T1-LEFT", 2, 2000), ("ROBIN-LOWER", 3, 2000), ("V-BOUND", 2, 2000)):
        native = check_claim(claim_id, lo, hi, ctx)
        wide = check_claim(claim_id, lo, hi, ctx, prec=LONG)
        assert native.fails == wide.fails
        assert native.verdict == wide.verdict


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["T1-LEFT", "HASSANI", "U-BOUND", "REMARK1-DERIVED", "PANAITOPOL", "AXLER-LOWER"]),
       st.integers(220, 100_000))
def test_verdict_refinement_is_monotone(ctx, claim_id, n):
    claim = get_claim(claim_id)
    low = claim.evaluate(n, ctx)
    high = claim.evaluate(n, ctx, EXTENDED)
    if low is not Verdict.UNKNOWN:
        assert high is low


def test_resource_error_names_required_index(ctx):
    with pytest.raises(ResourceError) as info:
        check_claim("T1-LEFT", 2, ctx.max_index + 1, ctx)
    assert info.value.required == ctx.max_index + 2
    with pytest.raises(ResourceError):
        check_claim("T1-LEFT", 2, 10)


def test_range_validation(ctx):
    with pytest.raises(ValueError):
        check_claim("T1-LEFT", 10, 5, ctx)
    with pytest.raises(DomainError):
        check_claim("T1-LEFT", 1, 5, ctx)


# -- crossover ------------------------------------------------------------------------


def test_crossover_is_minimal(ctx):
    res = find_crossover("T2-LEFT", 100_000, ctx, 0.5)
    n0 = res.n0
    assert n0 is not None and n0 > 2
    assert check_claim("T2-LEFT", n0, 100_000, ctx, epsilon=0.5).verdict is Verdict.HOLDS
    assert check_claim("T2-LEFT", n0 - 1, n0 - 1, ctx, epsilon=0.5).verdict is not Verdict.HOLDS


def test_crossover_ignores_early_islands():
    reg = synthetic_registry()
    res = find_crossover("SYN-FAMILY", 1000, None, 0.5, registry=reg)
    assert res.n0 == 50


def test_crossover_indexed_claim(ctx):
    assert find_crossover("T1-LEFT", 1000, ctx).n0 == 2


@pytest.mark.parametrize("eps, expected", [(0.9, 59), (0.75, 396)])
def test_family_crossovers(eps, expected):
    res = find_crossover("LEMMA5", 10**5, None, eps)
    assert res.n0 == expected
    assert res.n_epsilon == max(expected, 140)


def test_family_none_within_horizon():
    res = find_crossover("LEMMA5", 10**5, None, 0.5)
    assert res.n0 is None and res.n_epsilon is None


def test_relative_error_crossovers(ctx):
    assert find_crossover("RELERR-5PCT", 100_000, ctx).n0 == 14
    assert find_crossover("RELERR-2PCT", 100_000, ctx).n0 == 30


def test_relative_error_values(ctx):
    for n in (23, 114):
        assert relative_error(n, ctx, 53).hi < {23: 0.05, 114: 0.02}[n]
    r = relative_error(np.arange(2, 6), ctx, 53)
    assert np.all(r.lo[1:] > 0.25)


# -- lambda -----------------------------------------------------------------------------


def test_lambda_bracket(ctx):
    lam = lambda_effective(np.arange(16, 100_001), ctx, 53)
    assert float(np.min(lam.lo)) >= 0.25
    assert float(np.max(lam.hi)) <= 1
    with pytest.raises(DomainError):
        lambda_effective(15, ctx, 53)


# -- continuous -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "expr_id, lo, hi, sign",
    [
        ("log-sandwich-upper", 1, 10**6, 1),
        ("log-sandwich-lower", 1, 10**6, 1),
        ("f-prime-0.4", "0.001", "1.249", -1),
        ("f-prime-0.4", "1.251", 10**6, 1),
        ("f-prime-0.5", "0.001", 100, 1),
        ("f-prime-0.5", "1e-9", 10**6, 1),
        ("g-prime", 2, 10**6, -1),
        ("g-minus-0.018", 400, 10**6, -1),
        ("lower-gap", "5.99", 10**6, 1),
        ("lower-gap-slope1", "5.99", 10**6, 1),
        ("upper-reduced", 1, 10**6, 1),
    ],
)
def test_sign_windows(expr_id, lo, hi, sign):
    assert check_sign_on_interval(expr_id, lo, hi, sign) is Verdict.HOLDS


def test_counterexample_detected():
    # g(x) exceeds 0.018 just below exp(5.99)
    rep = sign_report("g-minus-0.018", 300, 399, -1)
    assert rep.verdict is Verdict.FAILS
    assert 300 <= rep.counterexample <= 399


def test_root_at_endpoint_is_unknown():
    # a^2 x + 2a - 1 vanishes at x = 1.25 when a = 0.4
    rep = sign_report("f-prime-0.4", 1, "1.25", -1, max_depth=8)
    assert rep.verdict is Verdict.UNKNOWN
    assert rep.unresolved


def test_lower_gap_negative_just_below_window():
    assert sign_report("lower-gap", 5, "5.5", 1).verdict is Verdict.FAILS


def test_sign_checker_arguments():
    with pytest.raises(RegistryError):
        check_sign_on_interval("nope", 1, 2, 1)
    with pytest.raises(ValueError):
        check_sign_on_interval("g-prime", 3, 2, -1)
    with pytest.raises(ValueError):
        check_sign_on_interval("g-prime", 2, 3, 0)
    assert set(EXPRESSIONS) >= {"g-prime", "lower-gap"}


def test_continuous_claims_through_engine():
    for claim_id in ("INEQ-3.3-LEFT", "INEQ-3.3-RIGHT", "G-SIGN-599"):
        assert check_claim(claim_id, 0, 0).verdict is Verdict.HOLDS


# -- suite ------------------------------------------------------------------------------


def test_suite_jobs_are_deterministic(ctx):
    ids = ["T1-LEFT", "HASSANI", "REMARK1-DERIVED", "V-BOUND"]
    one = [r.to_dict() for r in run_suite(ids, 100_000, ctx, jobs=1)]
    four = [r.to_dict() for r in run_suite(ids, 100_000, ctx, jobs=4)]
    assert one == four


def test_suite_skips_extended_by_default(ctx):
    (report,) = run_suite(["AXLER-UPPER"], 100_000, ctx)
    assert report.skipped
    assert report.to_dict()["verdict"] == "SKIPPED"


def test_suite_reports_families_as_crossovers(ctx):
    (res,) = run_suite(["T2-LEFT"], 100_000, ctx)
    assert res.n0 == 97568 and res.epsilon == 0.5


def test_small_context_is_enough_for_small_suite():
    small = Context(sieve_build(SieveConfig(target_index=1001)))
    reports = run_suite(["T1-LEFT", "LEMMA4-2"], 1000, small)
    assert all(r.verdict is Verdict.HOLDS for r in reports)


@pytest.mark.extended
def test_extended_window_holds():
    rep = extended_check(get_claim("AXLER-UPPER"), count=256)
    assert rep.verdict is Verdict.HOLDS
