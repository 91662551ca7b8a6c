"""Randomised verification of the registered statements."""

import time

import numpy as np

from ..errors import DSLPError
from .core import DEFAULT_TOL
from .registry import THEOREM_IDS, check_theorem
from .sampling import generate_instance


def trial_seed(seed, trial):
    """Seed of one trial, derived from the suite seed and the trial index."""
    return int(np.random.SeedSequence([int(seed), int(trial)]).generate_state(1)[0])


def run_suite(ids=None, trials=500, seed=0, tol=DEFAULT_TOL, size=None, keep_failures=5):
    """Check every id in ``ids`` on ``trials`` random instances.

    Returns a dict keyed by id holding the numbers of trials, passes and
    hypothesis misses, the number of instances with tight strict links, the
    cases exercised, elapsed time and up to ``keep_failures`` failure reports.
    """
    ids = list(THEOREM_IDS if ids is None else ids)
    summary = {}
    for tid in ids:
        start = time.perf_counter()
        row = {"trials": 0, "passed": 0, "failed": 0, "skipped": 0, "tight": 0,
               "comparisons": 0, "cases": {}, "failures": []}
        for t in range(trials):
            s = trial_seed(seed, t)
            row["trials"] += 1
            try:
                spec = generate_instance(tid, s, size)
            except RuntimeError:
                row["skipped"] += 1
                continue
            try:
                report = check_theorem(tid, spec, tol)
            except DSLPError as exc:
                row["failed"] += 1
                if len(row["failures"]) < keep_failures:
                    row["failures"].append({"instance": spec.to_dict(), "error": repr(exc)})
                continue
            if not report.hypotheses_met:
                row["skipped"] += 1
                continue
            row["cases"][report.case] = row["cases"].get(report.case, 0) + 1
            row["comparisons"] += report.comparisons
            row["tight"] += bool(report.strictness_flags)
            if report.passed:
                row["passed"] += 1
            else:
                row["failed"] += 1
                if len(row["failures"]) < keep_failures:
                    row["failures"].append({"instance": spec.to_dict(),
                                            "report": report.to_dict()})
        row["seconds"] = round(time.perf_counter() - start, 3)
        summary[tid] = row
    return summary


def suite_passed(summary):
    return all(row["failed"] == 0 and row["skipped"] == 0 for row in summary.values())
