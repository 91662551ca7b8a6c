import math
import re

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dslp.errors import SpecShapeMismatch, UnknownTheorem
from dslp.inequalities import (
    THEOREM_IDS,
    Const,
    InstanceSpec,
    Segment,
    check_theorem,
    evaluate_chain,
    generate_instance,
    get_theorem,
    plan_for,
    run_suite,
    suite_passed,
)
from dslp.inequalities.core import TIGHT_FACTOR
from dslp.problem import Equation, xi

I2 = ((1.0, 0.0), (0.0, 1.0))
H2 = Equation.harmonic(2)
EIGEN_LABEL = re.compile(r"lambda_(\d+)\((.*)\)$")


def test_registry_covers_every_statement():
    assert len(THEOREM_IDS) == 40
    for prefix in ["T3.1", "C3.1", "T3.2", "T3.3", "T3.4", "T3.5", "T3.6", "T3.7", "C3.2",
                   "C3.3", "T3.8", "T3.9", "T3.10", "T3.11", "T3.12", "T4.1", "C4.1", "L4.2"]:
        assert any(t.startswith(prefix) for t in THEOREM_IDS), prefix


def test_unknown_id_and_bad_shape():
    with pytest.raises(UnknownTheorem):
        get_theorem("T9.9")
    with pytest.raises(SpecShapeMismatch):
        check_theorem("T3.8i", InstanceSpec("T3.8i", H2, {"gamma": 0.5}))
    with pytest.raises(SpecShapeMismatch):
        check_theorem("T3.8i", InstanceSpec("T3.8i", H2, {"gamma": 0.5, "K": I2, "x": 1}))
    with pytest.raises(SpecShapeMismatch):
        check_theorem("T4.1i", InstanceSpec("T4.1i", H2, {"bc": None}))


def test_even_triple_fixture_is_strict():
    spec = InstanceSpec("T3.8iii", H2, {"gamma": math.pi / 2, "K": I2})
    report = check_theorem("T3.8iii", spec)
    assert report.hypotheses_met and report.passed
    assert report.strictness_flags == []
    assert [round(v, 12) for _, v in report.chain] == pytest.approx(
        [0.0, 2 - math.sqrt(2), 2.0, 2.0, 2.0, 2 + math.sqrt(2), 4.0])
    assert len(report.chain) == 4 * H2.N - 1


def test_example_family_loop():
    spec = InstanceSpec("T3.2i", H2, {"a12": [-1.0, 0.0, 2.0, 3.0], "b21": 0.0, "z": -1.0})
    report = check_theorem("T3.2i", spec)
    assert report.hypotheses_met, report.reason
    assert report.passed, report.violations
    assert report.problems["S1"]["eigenvalues"] == pytest.approx([0.0, 2.0])


def test_alpha_ladder_rejects_alpha_beyond_xi():
    x = xi(H2)
    spec = InstanceSpec("T3.1i", H2, {"alpha": [0.1, x + 0.1, x + 0.2, x + 0.3], "beta0": 1.0})
    report = check_theorem("T3.1i", spec)
    assert not report.hypotheses_met and report.chain == [] and not report.passed
    assert plan_for("T3.1i", spec) is None


def test_tight_strict_link_is_flagged_not_failed():
    seg = Segment().add(("a", 0)).add(("b", 0), "<").add(("c", 0), "<=")
    values = {"a": [1.0], "b": [1.0 + 1e-12], "c": [1.0 - 2e-8]}
    report = evaluate_chain([seg], values, {"a": "A", "b": "B", "c": "C"}, tol=1e-8)
    assert report.strictness_flags == [0]
    assert len(report.violations) == 1 and report.violations[0].position == 1
    assert TIGHT_FACTOR == 10


def test_constant_links_and_group_comparisons():
    seg = Segment().add([("v", 0), ("v", 1)]).add(Const(0.0, "0"), "<")
    report = evaluate_chain([seg], {"v": [-0.5, -0.25]}, {"v": "V"})
    assert report.passed and report.comparisons == 2
    assert report.chain[-1] == ("0", 0.0)


@pytest.mark.parametrize("tid", THEOREM_IDS)
def test_generated_instance_is_deterministic_and_valid(tid):
    a = generate_instance(tid, 7)
    b = generate_instance(tid, 7)
    assert a.to_dict() == b.to_dict()
    assert plan_for(tid, a) is not None


CLAIM_STYLE = {"C3.3", "T4.1i", "T4.1ii", "T4.1iii", "C4.1i", "C4.1ii"}


@pytest.mark.parametrize("tid", THEOREM_IDS)
def test_chain_is_complete_and_consistent(tid):
    for seed in range(3):
        report = check_theorem(tid, generate_instance(tid, seed))
        assert report.passed, (seed, report.violations)
        problems = {p["label"]: p for p in report.problems.values()}
        names = set()
        for name, value in report.chain:
            m = EIGEN_LABEL.match(name)
            if m is None:
                continue
            names.add(name)
            j, label = int(m.group(1)), m.group(2)
            if label in problems:
                assert problems[label]["eigenvalues"][j] == value
        for label, p in problems.items():
            assert p["count"] == p["claimed_count"]
            if tid not in CLAIM_STYLE:
                assert {f"lambda_{j}({label})" for j in range(p["count"])} <= names


@pytest.mark.parametrize("N", [3, 6, 9])
@pytest.mark.parametrize("variant, length", [("i", 0), ("ii", 0), ("iii", -1)])
def test_triple_chain_lengths(N, variant, length):
    tid = f"T3.8{variant}"
    spec = generate_instance(tid, 0, size=N)
    assert spec.eq.N == N
    assert len(check_theorem(tid, spec).chain) == 4 * N + length


@given(st.integers(0, 10_000), st.sampled_from(["T3.6i", "T3.7ii", "T3.12i", "T3.9"]))
def test_random_instances_pass(seed, tid):
    report = check_theorem(tid, generate_instance(tid, seed))
    assert report.hypotheses_met and report.passed


@given(st.integers(0, 10_000))
def test_separated_ladder_property(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 9))
    eq = Equation(N, tuple(rng.uniform(0.3, 2.0, N + 1)), tuple(rng.uniform(-1, 1, N)),
                  tuple(rng.uniform(0.3, 2.0, N)))
    x = xi(eq)
    alpha = sorted(rng.uniform(0.0, x - 1e-3, 2)) + sorted(rng.uniform(x, math.pi - 1e-3, 2))
    spec = InstanceSpec("T3.1i", eq, {"alpha": alpha, "beta0": float(rng.uniform(0.1, 3.0))})
    report = check_theorem("T3.1i", spec)
    assert report.passed, report.violations


def test_simple_spectra_claims():
    report = check_theorem("C3.3", generate_instance("C3.3", 3))
    assert report.passed and report.comparisons > 0


def test_small_suite_run():
    summary = run_suite(ids=["T3.1i", "T3.6i", "T4.1i", "L4.2"], trials=5, seed=11)
    assert suite_passed(summary)
    for row in summary.values():
        assert row["trials"] == 5 and row["passed"] == 5
