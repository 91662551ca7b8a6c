import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dslp.errors import (
    LengthMismatch,
    NonPositiveWeight,
    NotSelfAdjoint,
    NTooSmall,
    UnclassifiableBC,
    ZeroCoefficient,
)
from dslp.problem import (
    ChartCoords,
    CoupledBC,
    Equation,
    RawBC,
    SeparatedBC,
    bc_distance,
    chart_coordinates,
    check_self_adjoint,
    classify_bc,
    eigenvalue_count,
    validate_equation,
    xi,
)


def harmonic(N):
    return Equation.harmonic(N)


def test_validate_accepts_example_equation():
    eq = validate_equation({"N": 2, "f": [1, 1, 1], "q": [0, 0], "w": [1, 1]})
    assert eq == harmonic(2)


@pytest.mark.parametrize(
    "data, error, field",
    [
        ({"N": 2, "f": [1, 0, 1], "q": [0, 0], "w": [1, 1]}, ZeroCoefficient, "f[1]"),
        ({"N": 2, "f": [1, 1, 1], "q": [0, 0], "w": [1, -1]}, NonPositiveWeight, "w[1]"),
        ({"N": 2, "f": [1, 1], "q": [0, 0], "w": [1, 1]}, LengthMismatch, "f"),
        ({"N": 1, "f": [1, 1], "q": [0], "w": [1]}, NTooSmall, "N"),
    ],
)
def test_validation_names_the_field(data, error, field):
    with pytest.raises(error) as info:
        validate_equation(data)
    assert info.value.field == field


def test_xi_depends_on_sign_of_f0():
    assert xi(harmonic(2)) == pytest.approx(3 * math.pi / 4)
    eq = Equation(2, (-1.0, 1.0, 1.0), (0.0, 0.0), (1.0, 1.0))
    assert xi(eq) == pytest.approx(math.pi / 4)


def test_example_raw_condition_classifies_to_coupled():
    for s in (-1.0, 0.0, 2.5):
        raw = RawBC(np.array([[1, s], [0, -1]]), np.array([[-1, 0], [0, 1]]))
        bc = classify_bc(raw)
        assert isinstance(bc, CoupledBC)
        assert bc.gamma == 0.0
        np.testing.assert_allclose(bc.Kmat, [[1, s], [0, 1]], atol=1e-14)


def test_separated_rows_classify_to_angles():
    raw = RawBC.from_rows([[1, 0, 0, 0], [0, 0, 0, 1]])
    bc = classify_bc(raw)
    assert bc == SeparatedBC(0.0, math.pi / 2) or bc_distance(bc, SeparatedBC(0.0, math.pi / 2)) < 1e-12


def test_non_self_adjoint_rejected():
    with pytest.raises(NotSelfAdjoint):
        check_self_adjoint(np.array([[1, 0], [0, 0]], dtype=complex),
                           np.array([[1, 0], [0, 0]], dtype=complex))
    with pytest.raises((NotSelfAdjoint, UnclassifiableBC)):
        classify_bc(RawBC(np.eye(2), 2 * np.eye(2)))


@pytest.mark.parametrize(
    "bc, expected",
    [
        (SeparatedBC(0.0, math.pi / 2), 2),
        (SeparatedBC(0.0, math.pi), 1),
        (SeparatedBC(3 * math.pi / 4, math.pi), 0),
        (CoupledBC(0.0, ((1.0, 0.0), (0.0, 1.0))), 2),
        (CoupledBC(0.0, ((1.0, 1.0), (0.0, 1.0))), 1),
    ],
)
def test_rank_on_harmonic(bc, expected):
    r, k = eigenvalue_count(harmonic(3), bc)
    assert r == expected
    assert k == 3 - 2 + expected


def test_example_family_count_at_s_equal_one():
    raw = RawBC(np.array([[1, 1.0], [0, -1]]), np.array([[-1, 0], [0, 1]]))
    assert eigenvalue_count(harmonic(2), classify_bc(raw)) == (1, 1)


def test_chart_round_trip():
    pt = ChartCoords("O14", 0.3, -1.2, 0.4 - 0.7j)
    back = chart_coordinates(pt.canonical(), "O14")[0]
    assert back.x == pytest.approx(0.3)
    assert back.y == pytest.approx(-1.2)
    assert back.z == pytest.approx(0.4 - 0.7j)


def _random_invertible(draw_vals):
    a, b, c, d, e, f, g, h = draw_vals
    T = np.array([[a + 1j * e, b + 1j * f], [c + 1j * g, d + 1j * h]])
    return T


@given(st.lists(st.floats(-2, 2), min_size=8, max_size=8),
       st.floats(0.0, 3.1), st.floats(0.05, math.pi))
def test_separated_class_invariant_under_row_operations(vals, alpha, beta):
    T = _random_invertible(vals)
    if abs(np.linalg.det(T)) < 0.1:
        return
    bc = SeparatedBC(alpha, beta)
    raw = RawBC(*bc.representative()).transformed(T)
    assert bc_distance(classify_bc(raw), bc) < 1e-8


@given(st.lists(st.floats(-2, 2), min_size=8, max_size=8),
       st.floats(-3.1, 3.1), st.floats(-2, 2), st.floats(0.3, 2))
def test_coupled_class_invariant_under_row_operations(vals, gamma, k12, k11):
    T = _random_invertible(vals)
    if abs(np.linalg.det(T)) < 0.1:
        return
    K = ((k11, k12), (0.5, (1.0 + 0.5 * k12) / k11))
    bc = CoupledBC(gamma, K)
    raw = RawBC(*bc.representative()).transformed(T)
    assert bc_distance(classify_bc(raw), classify_bc(bc)) < 1e-7
