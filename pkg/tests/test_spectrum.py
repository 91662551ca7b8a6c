import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dslp.errors import IllConditionedSpectrum
from dslp.inequalities.sampling import coupling, random_equation
from dslp.polynomial import isolate_real_roots
from dslp.problem import CoupledBC, Equation, SeparatedBC, eigenvalue_count
from dslp.spectrum import (
    certify_roots,
    characteristic_polynomial,
    fundamental_solutions,
    gamma_coefficients,
    leading_terms,
    oracle_dirichlet,
    oracle_pencil_scan,
    solve_spectrum,
)

I2 = ((1.0, 0.0), (0.0, 1.0))
DIRICHLET = SeparatedBC(0.0, math.pi)
H2 = Equation.harmonic(2)


@pytest.mark.parametrize(
    "bc, expected",
    [
        (CoupledBC(0.0, I2), [0.0, 4.0]),
        (CoupledBC(math.pi, I2), [2.0, 2.0]),
        (CoupledBC(math.pi / 2, I2), [2 - math.sqrt(2), 2 + math.sqrt(2)]),
        (SeparatedBC(0.0, math.pi), [2.0]),
    ],
)
def test_harmonic_ladder(bc, expected):
    np.testing.assert_allclose(solve_spectrum(H2, bc).values(), expected, atol=1e-10)


def test_periodic_gamma_polynomial():
    g = characteristic_polynomial(H2, CoupledBC(0.0, I2))
    np.testing.assert_allclose(g.coeffs, [0.0, 4.0, -1.0], atol=1e-14)


def test_first_fundamental_solution_hand_expansion():
    # f = 1, q = 0, w = 1: phi_2 = 1 - lam and phi_3 = (2 - lam)(1 - lam) - 1
    quad = fundamental_solutions(H2)
    np.testing.assert_allclose(quad.phiN.coeffs, [1.0, -1.0])
    np.testing.assert_allclose(quad.fDphiN.coeffs, [0.0, -2.0, 1.0])


def test_leading_terms_match_closed_forms(rng):
    for _ in range(20):
        eq = random_equation(rng, int(rng.integers(2, 10)))
        quad = fundamental_solutions(eq)
        for poly, lead in zip(quad.as_tuple(), leading_terms(eq)):
            assert poly.leading == pytest.approx(lead, rel=1e-9)


def test_dirichlet_matches_tridiagonal_oracle(rng):
    for _ in range(20):
        eq = random_equation(rng, int(rng.integers(2, 16)))
        got = solve_spectrum(eq, SeparatedBC(0.0, math.pi)).values()
        np.testing.assert_allclose(got, oracle_dirichlet(eq), atol=1e-8)


def test_pencil_scan_agrees_on_random_coupled(rng):
    for _ in range(10):
        eq = random_equation(rng, int(rng.integers(2, 8)))
        bc = CoupledBC(float(rng.uniform(-3, 3)), tuple(map(tuple, coupling(rng, eq.f[0]))))
        np.testing.assert_allclose(solve_spectrum(eq, bc).values(),
                                   oracle_pencil_scan(eq, bc), atol=1e-8)


def test_multiplicities_are_one_or_two(rng):
    for _ in range(30):
        eq = random_equation(rng, int(rng.integers(2, 10)))
        spec = solve_spectrum(eq, CoupledBC(0.0, I2))
        assert set(spec.eigenvalues.multiplicities) <= {1, 2}
        assert spec.eigenvalues.total_multiplicity == spec.k


@pytest.mark.parametrize("N", [25, 50])
def test_large_dirichlet_uses_pointwise_rescue(N):
    eq = Equation.harmonic(N)
    with pytest.raises(IllConditionedSpectrum):
        certify_roots(eq, gamma_coefficients(DIRICHLET),
                      isolate_real_roots(characteristic_polynomial(eq, DIRICHLET)))
    values = solve_spectrum(eq, DIRICHLET).values()
    np.testing.assert_allclose(values, oracle_dirichlet(eq), atol=1e-12)


def test_pointwise_rescue_pairs_double_roots():
    eq = Equation.harmonic(40)
    spec = solve_spectrum(eq, CoupledBC(0.0, I2))
    expected = sorted(2 - 2 * math.cos(2 * math.pi * j / 40) for j in range(40))
    np.testing.assert_allclose(spec.values(), expected, atol=1e-7)
    assert spec.eigenvalues.multiplicities.count(2) == 19


@given(st.integers(0, 10_000), st.floats(0.05, 3.1))
def test_conjugate_gamma_gives_same_spectrum(seed, gamma):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, int(rng.integers(2, 9)))
    K = tuple(map(tuple, coupling(rng, eq.f[0])))
    a = solve_spectrum(eq, CoupledBC(gamma, K)).values()
    b = solve_spectrum(eq, CoupledBC(-gamma, K)).values()
    np.testing.assert_allclose(a, b, atol=1e-10)


@given(st.integers(0, 10_000))
def test_degree_equals_count(seed):
    rng = np.random.default_rng(seed)
    eq = random_equation(rng, int(rng.integers(2, 12)))
    bc = SeparatedBC(float(rng.uniform(0, math.pi)), float(rng.uniform(0.05, math.pi)))
    r, k = eigenvalue_count(eq, bc)
    assert characteristic_polynomial(eq, bc).degree == k == eq.N - 2 + r
