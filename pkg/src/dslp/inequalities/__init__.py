"""Numerical verification of the interlacing and comparison statements."""

from .core import DEFAULT_TOL, Const, Segment, TheoremReport, Violation, evaluate_chain, ladder
from .registry import (
    REGISTRY,
    THEOREM_IDS,
    InstanceSpec,
    chain_comparisons,
    check_theorem,
    get_theorem,
    plan_for,
)
from .sampling import generate_instance
from .suite import run_suite, suite_passed, trial_seed

__all__ = [
    "DEFAULT_TOL",
    "Const",
    "Segment",
    "TheoremReport",
    "Violation",
    "evaluate_chain",
    "ladder",
    "REGISTRY",
    "THEOREM_IDS",
    "InstanceSpec",
    "chain_comparisons",
    "check_theorem",
    "get_theorem",
    "plan_for",
    "generate_instance",
    "run_suite",
    "suite_passed",
    "trial_seed",
]
