import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dslp.errors import NonRealRootsDetected
from dslp.polynomial import (
    RealPolynomial,
    affine_combine,
    evaluate,
    isolate_real_roots,
    sturm_count,
)


def from_roots(roots, lead=1.0):
    c = np.array([lead])
    for r in roots:
        c = np.convolve(c, [1.0, -r])
    return RealPolynomial(c[::-1])


def test_trailing_coefficients_are_trimmed():
    p = RealPolynomial([1.0, 2.0, 1e-20])
    assert p.degree == 1
    assert RealPolynomial([]).degree == -1
    assert RealPolynomial([1.0, 0.0], zero_tol=0).degree == 0


def test_evaluate_scalar_and_array():
    p = RealPolynomial([1.0, -3.0, 1.0])
    assert evaluate(p, 2.0) == -1.0
    np.testing.assert_allclose(evaluate(p, np.array([0.0, 1.0])), [1.0, -1.0])


def test_affine_combine_recurrence_step():
    # (2 - lam) * (1 - lam) - 1 = lam^2 - 3 lam + 1
    p = RealPolynomial([2.0, -1.0])
    q = RealPolynomial([1.0, -1.0])
    r = affine_combine(1.0, RealPolynomial([2.0, -3.0, 1.0]), -1.0, RealPolynomial([1.0]))
    np.testing.assert_allclose(r.coeffs, [1.0, -3.0, 1.0])
    s = affine_combine(2.0, q, 0.0, q, shift_times_lambda=1.0)
    np.testing.assert_allclose(s.coeffs, np.convolve(p.coeffs, q.coeffs))


def test_exact_cancellation_drops_degree():
    p = RealPolynomial([1.0, 1.0, 3.0])
    r = affine_combine(1.0, p, -1.0, RealPolynomial([0.0, 0.0, 3.0]))
    assert r.degree == 1


def test_simple_roots_recovered():
    rs = isolate_real_roots(from_roots([-2.0, 0.5, 3.0]))
    np.testing.assert_allclose(rs.values, [-2.0, 0.5, 3.0], atol=1e-12)
    assert rs.multiplicities == [1, 1, 1]


def test_double_root_reported_with_multiplicity_two():
    rs = isolate_real_roots(from_roots([2.0, 2.0, -1.0]))
    assert rs.multiplicities == [1, 2]
    np.testing.assert_allclose(rs.values, [-1.0, 2.0], atol=1e-7)
    assert rs.expanded()[1] == rs.expanded()[2]


def test_root_at_zero_with_multiplicity():
    rs = isolate_real_roots(RealPolynomial([0.0, 0.0, -1.0]))
    assert rs.roots == ((0.0, 2),)


def test_complex_pair_is_detected():
    with pytest.raises(NonRealRootsDetected):
        isolate_real_roots(RealPolynomial([1.0, 0.0, 1.0]))


def test_tight_cluster_of_simple_roots_is_not_overcounted():
    # four simple roots within half a unit, which once produced spurious triples
    c = [-1967.500123482989, -10450.746892553536, -11977.873277321347, 20234.48430198577,
         49234.65379977147, 18224.327486798615, -24001.502661875427, -21447.629319805168,
         -2397.2727248560727, 3549.3404657232595, 1720.598036342933, 313.1840979245284,
         20.93662828591965]
    rs = isolate_real_roots(RealPolynomial(c))
    assert rs.total_multiplicity == 12
    expected = np.sort(np.roots(c[::-1]).real)
    np.testing.assert_allclose(rs.expanded(), expected, atol=1e-8)


def test_sturm_count_half_open():
    p = from_roots([-1.0, 1.0, 2.0])
    assert sturm_count(p, -5.0, 5.0) == 3
    assert sturm_count(p, -1.0, 1.0) == 1
    assert sturm_count(p, 1.5, 1.9) == 0


@given(st.lists(st.floats(-20, 20), min_size=1, max_size=9, unique=True),
       st.floats(0.1, 10.0))
def test_distinct_roots_property(roots, lead):
    roots = sorted(roots)
    if len(roots) > 1 and min(np.diff(roots)) < 1e-2:
        return
    rs = isolate_real_roots(from_roots(roots, lead))
    assert rs.total_multiplicity == len(roots)
    scale = max(1.0, max(abs(r) for r in roots))
    np.testing.assert_allclose(rs.expanded(), roots, atol=1e-7 * scale)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_monic_quadratic_roots(a, b):
    if abs(a - b) < 1e-3:
        return
    rs = isolate_real_roots(from_roots([a, b]))
    np.testing.assert_allclose(rs.expanded(), sorted([a, b]), atol=1e-9)
    assert math.isclose(sum(rs.expanded()), a + b, abs_tol=1e-9)


def test_roots_spanning_many_decades():
    # One root near 1e5 next to three of order one: the balanced Sturm chain
    # loses the small roots, the companion fallback recovers all four.
    roots = [0.675, 2.209, 3.544, 1.0e5]
    p = RealPolynomial(np.polynomial.polynomial.polyfromroots(roots))
    found = isolate_real_roots(p)
    assert found.total_multiplicity == 4
    assert np.allclose(found.expanded(), roots, rtol=1e-9)
