"""Claim registry, range checker, crossover finder and sign checker."""

from .context import Context
from .continuous import EXPRESSIONS, SignReport, check_sign_on_interval, sign_report
from .engine import (
    CrossoverResult,
    VerificationReport,
    check_claim,
    evaluate_range,
    extended_check,
    find_crossover,
    run_suite,
)
from .quantities import lambda_effective, relative_error
from .registry import REGISTRY, Claim, Registry, get_claim

__all__ = [
    "Claim",
    "Context",
    "CrossoverResult",
    "EXPRESSIONS",
    "REGISTRY",
    "Registry",
    "SignReport",
    "VerificationReport",
    "check_claim",
    "check_sign_on_interval",
    "evaluate_range",
    "extended_check",
    "find_crossover",
    "get_claim",
    "lambda_effective",
    "relative_error",
    "run_suite",
    "sign_report",
]
