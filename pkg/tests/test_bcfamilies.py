import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dslp.bcfamilies import (
    companion_raw,
    derived_separated_bcs,
    limit_bc,
    loop_in_chart,
    make_coupled,
    make_separated,
    modified_couplings,
    natural_loops,
    same_class,
    wrap_angle,
)
from dslp.errors import NotUnimodular, RangeError
from dslp.inequalities.sampling import coupling, random_equation
from dslp.problem import (
    ChartCoords,
    CoupledBC,
    Equation,
    SeparatedBC,
    bc_distance,
    eigenvalue_count,
)
from dslp.spectrum import characteristic_polynomial, eigenvalues, solve_spectrum

I2 = ((1.0, 0.0), (0.0, 1.0))


def test_make_separated_dirichlet_and_neumann():
    assert make_separated(0.0, math.pi) == SeparatedBC(0.0, math.pi)
    A, B = make_separated(math.pi / 2, math.pi / 2).representative()
    assert np.allclose(np.hstack([A, B]), [[0, -1, 0, 0], [0, 0, 0, -1]])


@pytest.mark.parametrize("alpha, beta", [(math.pi, 1.0), (-0.1, 1.0), (0.5, 0.0), (0.5, 3.2)])
def test_make_separated_range(alpha, beta):
    with pytest.raises(RangeError):
        make_separated(alpha, beta)


def test_make_coupled_examples():
    assert make_coupled(0.0, np.eye(2)) == CoupledBC(0.0, I2)
    with pytest.raises(NotUnimodular):
        make_coupled(0.0, [[1, 2], [0, 0.5]])
    with pytest.raises(RangeError):
        make_coupled(-math.pi, np.eye(2))


def test_gamma_pi_matches_minus_K(rng):
    eq = random_equation(rng, 5)
    K = np.array(coupling(rng, eq.f[0]))
    a = characteristic_polynomial(eq, make_coupled(math.pi, K)).coeffs
    b = characteristic_polynomial(eq, make_coupled(0.0, -K)).coeffs
    # Gamma is defined up to a nonzero factor; here the factor is -1.
    assert np.allclose(a, -b, atol=1e-10)
    assert np.allclose(list(eigenvalues(eq, make_coupled(math.pi, K))),
                       list(eigenvalues(eq, make_coupled(0.0, -K))), atol=1e-9)


def test_wrap_angle():
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.25) == 0.25


def test_example_loop_limit():
    coords = ChartCoords("O14", 3.0, 0.0, -1.0)
    s_loop, t_loop = natural_loops(coords)
    assert (s_loop.sweep, s_loop.label) == ("s", "S1")
    assert same_class(s_loop.limit_bc, SeparatedBC(math.pi / 2, math.pi / 2))
    assert (t_loop.sweep, t_loop.label) == ("t", "S2")
    assert list(eigenvalues(Equation.harmonic(2), s_loop.limit_bc)) == pytest.approx([0.0, 2.0])


def test_periodic_loops():
    loops = [lp for lp in natural_loops(CoupledBC(0.0, I2)) if lp.chart == "O14"]
    assert len(loops) == 2
    assert same_class(loops[0].limit_bc, SeparatedBC(math.pi / 2, math.pi / 2))
    assert same_class(loops[1].limit_bc, SeparatedBC(0.0, math.pi))
    assert loops[0].base.x == pytest.approx(0.0) and loops[0].base.y == pytest.approx(0.0)
    assert complex(loops[0].base.z) == pytest.approx(-1.0)


def test_loop_with_zero_z():
    coords = ChartCoords("O23", 0.4, -0.7, 0.0)
    for loop in natural_loops(coords):
        assert loop.fixed_coords["z"] == 0
        assert isinstance(loop.at(1.5), SeparatedBC)


def test_at_compact_endpoints_are_limits():
    loop = loop_in_chart(ChartCoords("O14", 0.3, 0.2, 0.5 + 0.5j), "O14", "t")
    assert loop.at_compact(math.pi / 2) == loop.limit_bc
    assert loop.at_compact(-math.pi / 2) == loop.limit_bc
    assert same_class(loop.at_compact(0.0), loop.coords_at(0.0).canonical())


@pytest.mark.parametrize("chart", ["O13", "O14", "O23", "O24"])
@pytest.mark.parametrize("sweep", ["s", "t"])
def test_loop_approaches_limit_spectrum(chart, sweep):
    eq = Equation.harmonic(4)
    loop = loop_in_chart(ChartCoords(chart, 0.3, -0.4, 0.6 - 0.2j), chart, sweep)
    assert isinstance(loop.limit_bc, SeparatedBC)
    target = list(eigenvalues(eq, loop.limit_bc))
    for far in (1e6, -1e6):
        near = list(eigenvalues(eq, loop.at(far)))
        # Exactly one eigenvalue escapes to infinity when the count drops.
        common = near[: len(target)] if near[-1] > 1e3 else near
        if near[0] < -1e3:
            common = near[1:]
        assert len(common) == len(target)
        assert np.allclose(common, target, atol=1e-3)


def test_companions_of_identity():
    T, U, S, V = derived_separated_bcs(np.eye(2))
    assert same_class(S, SeparatedBC(0.0, math.pi))
    assert same_class(T, SeparatedBC(math.pi / 2, math.pi / 2))
    assert same_class(S, derived_separated_bcs(-np.eye(2))[2])


@given(st.integers(0, 10_000))
def test_companions_match_raw_rows(seed):
    rng = np.random.default_rng(seed)
    K = coupling(rng, 1.0)
    for bc, which in zip(derived_separated_bcs(K), "TUSV"):
        assert isinstance(bc, SeparatedBC)
        assert same_class(bc, companion_raw(K, which))


def test_modified_coupling_examples():
    K_hat, K_tilde = modified_couplings(np.eye(2), 1.0)
    assert np.allclose(K_hat, [[1, 1], [0, 1]]) and K_tilde is None
    K = np.array([[1.0, 1.0], [0.0, 1.0]])
    K_hat, K_tilde = modified_couplings(K, 1.0)
    assert np.allclose(K_hat, K) and np.allclose(K_tilde, K)
    K_hat, _ = modified_couplings([[2, 1], [1, 1]], 1.0)
    assert np.allclose(K_hat, [[2, 2], [1, 1.5]])
    assert np.linalg.det(K_hat) == pytest.approx(1.0)


@given(st.integers(0, 10_000), st.sampled_from(["generic", "k11_0", "k12_0", "c0"]))
def test_modified_couplings_drop_the_count(seed, kind):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 8))
    eq = random_equation(rng, N)
    f0 = eq.f[0]
    K = coupling(rng, f0, kind)
    gamma = float(rng.uniform(-math.pi, math.pi))
    for M in modified_couplings(K, f0):
        if M is None:
            continue
        assert abs(np.linalg.det(M) - 1.0) <= 1e-10
        assert abs(M[0, 0] - f0 * M[0, 1]) <= 1e-10 * max(1.0, abs(M[0, 0]))
        assert eigenvalue_count(eq, make_coupled(gamma, M))[1] == N - 1


def test_same_class_and_distance():
    a = SeparatedBC(0.3, 2.0)
    assert same_class(a, a)
    assert not same_class(a, SeparatedBC(0.3, 2.1))
    assert bc_distance(a, a) == 0.0
    assert solve_spectrum(Equation.harmonic(3), a).k == 3
