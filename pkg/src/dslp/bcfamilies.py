"""Constructors for derived boundary-condition families: canonical forms,
natural loops through the coordinate charts and their limit conditions, the
separated companions of a coupled condition, and the modified couplings."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotUnimodular, RangeError
from .problem import (
    ChartCoords,
    CoupledBC,
    RawBC,
    SeparatedBC,
    bc_distance,
    chart_coordinates,
    classify_bc,
    separated_from_rows,
)

UNIMODULAR_TOL = 1e-10


def make_separated(alpha, beta):
    """Separated condition with alpha in [0, pi) and beta in (0, pi]."""
    alpha, beta = float(alpha), float(beta)
    if not 0.0 <= alpha < math.pi:
        raise RangeError(f"alpha = {alpha} is outside [0, pi)", field="alpha")
    if not 0.0 < beta <= math.pi:
        raise RangeError(f"beta = {beta} is outside (0, pi]", field="beta")
    return SeparatedBC(alpha, beta)


def _as_K(K):
    K = np.array(K, dtype=float)
    if K.shape != (2, 2) or not np.all(np.isfinite(K)):
        raise NotUnimodular("K must be a finite real 2x2 matrix", field="K")
    det = K[0, 0] * K[1, 1] - K[0, 1] * K[1, 0]
    if abs(det - 1.0) > UNIMODULAR_TOL:
        raise NotUnimodular(f"det K = {det} differs from 1", field="K")
    return K


def _K_tuple(K):
    return tuple(tuple(float(v) for v in row) for row in K)


def make_coupled(gamma, K):
    """Coupled condition [e^{i gamma} K | -I] with gamma in (-pi, pi]."""
    gamma = float(gamma)
    if not -math.pi < gamma <= math.pi:
        raise RangeError(f"gamma = {gamma} is outside (-pi, pi]", field="gamma")
    return CoupledBC(gamma, _K_tuple(_as_K(K)))


def wrap_angle(gamma):
    """Map any real angle into (-pi, pi]."""
    g = math.remainder(float(gamma), 2.0 * math.pi)
    return math.pi if g == -math.pi else g


# ---------------------------------------------------------------------------
# Natural loops

#: Chart -> ((s coordinate, s-loop limit label), (t coordinate, t-loop limit label))
_LOOPS = {
    "O14": (("a12", "S1"), ("b21", "S2")),
    "O24": (("a11", "S3"), ("b21", "S4")),
    "O23": (("a11", "S5"), ("b22", "S6")),
    "O13": (("a12", "S7"), ("b22", "S8")),
}


def limit_bc(label, coords):
    """The separated limit condition reached by a loop, from the fixed
    coordinates of the chart point ``coords``."""
    c = {coords.names[0]: coords.x, coords.names[1]: coords.y}
    rows = {
        "S1": ([0, 1], [c.get("b21"), 1]),
        "S2": ([1, c.get("a12")], [1, 0]),
        "S3": ([1, 0], [c.get("b21"), 1]),
        "S4": ([c.get("a11"), -1], [1, 0]),
        "S5": ([1, 0], [-1, c.get("b22")]),
        "S6": ([c.get("a11"), -1], [0, 1]),
        "S7": ([0, 1], [-1, c.get("b22")]),
        "S8": ([1, c.get("a12")], [0, 1]),
    }[label]
    return separated_from_rows(rows[0], rows[1])


@dataclass(frozen=True)
class NaturalLoop:
    """A one-parameter family inside a chart closing through a limit condition.

    ``varying`` names the swept real coordinate; the other real coordinate
    and ``z`` stay as in ``base``.
    """

    chart: str
    varying: str
    label: str
    base: ChartCoords
    limit_bc: SeparatedBC

    @property
    def fixed_coords(self):
        other = [n for n in self.base.names if n != self.varying][0]
        value = self.base.x if other == self.base.names[0] else self.base.y
        return {other: value, "z": self.base.z}

    @property
    def sweep(self):
        return "s" if self.varying == _LOOPS[self.chart][0][0] else "t"

    def coords_at(self, value):
        return self.base.with_coords(**{self.varying: float(value)})

    def at(self, value):
        """Canonical condition at the finite coordinate value ``value``."""
        return self.coords_at(value).canonical()

    def at_compact(self, u):
        """Condition at the compactified parameter u in [-pi/2, pi/2], where
        the coordinate is tan(u) and the endpoints give the limit condition."""
        if abs(abs(u) - 0.5 * math.pi) <= 1e-15:
            return self.limit_bc
        return self.at(math.tan(u))


def natural_loops(bc):
    """Both loops in every chart containing ``bc`` (or in the chart of the
    given :class:`ChartCoords`)."""
    if isinstance(bc, ChartCoords):
        charts = [bc]
    else:
        charts = chart_coordinates(bc)
    loops = []
    for coords in charts:
        for varying, label in _LOOPS[coords.chart]:
            loops.append(
                NaturalLoop(coords.chart, varying, label, coords, limit_bc(label, coords))
            )
    return loops


def loop_in_chart(bc, chart, sweep):
    """The loop of ``bc`` in ``chart`` sweeping ``"s"`` or ``"t"``."""
    coords = bc if isinstance(bc, ChartCoords) else chart_coordinates(bc, chart)[0]
    varying, label = _LOOPS[coords.chart][0 if sweep == "s" else 1]
    return NaturalLoop(coords.chart, varying, label, coords, limit_bc(label, coords))


# ---------------------------------------------------------------------------
# Companions of a coupled condition


def derived_separated_bcs(K):
    """The separated companions (T_K, U_K, S_K, V_K) of a unimodular K."""
    K = _as_K(K)
    (k11, k12), (k21, k22) = K
    assert not (k11 == 0.0 and k12 == 0.0), "det K = 1 forbids a zero first row"
    T = separated_from_rows([0.0, 1.0], [-k21, k11])
    U = separated_from_rows([k11, k12], [1.0, 0.0])
    S = separated_from_rows([1.0, 0.0], [-k22, k12])
    V = separated_from_rows([k21, k22], [0.0, 1.0])
    return T, U, S, V


def companion_raw(K, which):
    """Raw 2x4 representative of one companion, exactly as defined."""
    (k11, k12), (k21, k22) = np.array(K, dtype=float)
    rows = {
        "T": [[0, 1, 0, 0], [0, 0, -k21, k11]],
        "U": [[k11, k12, 0, 0], [0, 0, 1, 0]],
        "S": [[1, 0, 0, 0], [0, 0, -k22, k12]],
        "V": [[k21, k22, 0, 0], [0, 0, 0, 1]],
    }[which]
    return RawBC.from_rows(rows)


def modified_couplings(K, f0):
    """(K_hat, K_tilde) for ``f0``; each is ``None`` when undefined."""
    K = _as_K(K)
    (k11, k12), (k21, k22) = K
    f0 = float(f0)
    K_hat = K_tilde = None
    if k11 != 0.0:
        K_hat = np.array([[k11, k11 / f0], [k21, (f0 + k11 * k21) / (k11 * f0)]])
    if k12 != 0.0:
        K_tilde = np.array([[f0 * k12, k12], [(f0 * k12 * k22 - 1.0) / k12, k22]])
    return K_hat, K_tilde


def coupled_in_O14(gamma, K):
    """Chart O14 coordinates of [e^{i gamma} K | -I] when k11 != 0."""
    (k11, k12), (k21, _) = np.array(K, dtype=float)
    z = -complex(math.cos(gamma), math.sin(gamma)) / k11
    return ChartCoords("O14", k12 / k11, -k21 / k11, z)


def same_class(a, b, tol=1e-8):
    """True when two boundary conditions are equivalent up to ``tol``."""
    return bc_distance(classify_bc(a), classify_bc(b)) <= tol
