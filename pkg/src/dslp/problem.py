"""Problem data: difference equations, boundary conditions and their
canonical forms, coordinate charts, and the eigenvalue-count formula.

The equation is

    f_n y_{n+1} = (f_{n-1} + f_n + q_n - lam w_n) y_n - f_{n-1} y_{n-1},
    n = 1..N,

and a boundary condition is a pair of 2x2 matrices (A, B) acting on
(y_0, f_0 dy_0) and (y_N, f_N dy_N) through A u_0 + B u_N = 0.
"""

import math
from dataclasses import dataclass
from numbers import Integral, Real

import numpy as np

from .errors import (
    ChartMembershipFailed,
    LengthMismatch,
    NonPositiveWeight,
    NotSelfAdjoint,
    NTooSmall,
    UnclassifiableBC,
    ValidationError,
    ZeroCoefficient,
)

#: Relative tolerance for rank decisions on boundary-condition matrices.
RANK_TOL = 1e-9

#: Angles closer than this to 0, pi/2 or pi are snapped onto them.
_SNAP = 1e-13

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


# ---------------------------------------------------------------------------
# Equations


@dataclass(frozen=True)
class Equation:
    """The coefficients (f, q, w) of the difference equation.

    ``f`` holds f_0..f_N, ``q`` holds q_1..q_N and ``w`` holds w_1..w_N.
    Instances are hashable so spectra can be cached per equation.
    """

    N: int
    f: tuple
    q: tuple
    w: tuple

    @classmethod
    def harmonic(cls, N):
        """f = 1, q = 0, w = 1: the second-difference operator."""
        return cls(N, (1.0,) * (N + 1), (0.0,) * N, (1.0,) * N)

    def replace(self, **changes):
        data = {"N": self.N, "f": self.f, "q": self.q, "w": self.w}
        data.update(changes)
        return validate_equation(data)

    def to_dict(self):
        return {"N": self.N, "f": list(self.f), "q": list(self.q), "w": list(self.w)}


def _real_sequence(values, name):
    try:
        seq = [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a sequence of real numbers", field=name) from exc
    for i, v in enumerate(seq):
        if not math.isfinite(v):
            raise ValidationError(f"{name}[{i}] = {v} is not finite", field=f"{name}[{i}]")
    return tuple(seq)


def validate_equation(candidate):
    """Return a validated :class:`Equation` built from ``candidate``.

    ``candidate`` may be an :class:`Equation`, a mapping with keys
    ``N, f, q, w`` (``N`` may be omitted and is then inferred from ``q``), or
    any object with those attributes.
    """
    if isinstance(candidate, dict):
        get = candidate.get
    else:
        def get(key, default=None):
            return getattr(candidate, key, default)

    f = get("f")
    q = get("q")
    w = get("w")
    for name, val in (("f", f), ("q", q), ("w", w)):
        if val is None:
            raise LengthMismatch(f"missing coefficient sequence {name}", field=name)
    f = _real_sequence(f, "f")
    q = _real_sequence(q, "q")
    w = _real_sequence(w, "w")
    N = get("N")
    if N is None:
        N = len(q)
    if isinstance(N, bool) or not isinstance(N, Integral):
        if isinstance(N, Real) and float(N).is_integer():
            N = int(N)
        else:
            raise ValidationError(f"N must be an integer, got {N!r}", field="N")
    N = int(N)
    if N < 2:
        raise NTooSmall(f"N must be at least 2, got {N}", field="N")
    if len(f) != N + 1:
        raise LengthMismatch(f"f must have N+1 = {N + 1} entries, got {len(f)}", field="f")
    if len(q) != N:
        raise LengthMismatch(f"q must have N = {N} entries, got {len(q)}", field="q")
    if len(w) != N:
        raise LengthMismatch(f"w must have N = {N} entries, got {len(w)}", field="w")
    for i, v in enumerate(f):
        if v == 0.0:
            raise ZeroCoefficient(f"f[{i}] must be nonzero", field=f"f[{i}]")
    for i, v in enumerate(w):
        if not v > 0.0:
            raise NonPositiveWeight(f"w[{i}] = {v} must be positive", field=f"w[{i}]")
    return Equation(N, f, q, w)


def xi(eq):
    """The critical angle in (0, pi) at which the separated count drops."""
    f0 = eq.f[0]
    t = math.atan(-1.0 / f0)
    return t + math.pi if f0 > 0 else t


# ---------------------------------------------------------------------------
# Boundary conditions


def _snap_angle(theta):
    for ref in (0.0, 0.5 * math.pi, math.pi, -0.5 * math.pi, -math.pi):
        if abs(theta - ref) <= _SNAP:
            return ref
    return theta


def cos_sin(theta):
    """cos and sin with exact values at multiples of pi/2."""
    theta = _snap_angle(theta)
    exact = {
        0.0: (1.0, 0.0),
        0.5 * math.pi: (0.0, 1.0),
        math.pi: (-1.0, 0.0),
        -0.5 * math.pi: (0.0, -1.0),
        -math.pi: (-1.0, 0.0),
    }
    if theta in exact:
        return exact[theta]
    return math.cos(theta), math.sin(theta)


def _as_matrix(m, name):
    a = np.array(m, dtype=complex)
    if a.shape != (2, 2):
        raise ValidationError(f"{name} must be a 2x2 matrix", field=name)
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries", field=name)
    return a


@dataclass(frozen=True, eq=False)
class RawBC:
    """A boundary condition given by an arbitrary representative (A, B)."""

    A: np.ndarray
    B: np.ndarray

    def __init__(self, A, B):
        object.__setattr__(self, "A", _as_matrix(A, "A"))
        object.__setattr__(self, "B", _as_matrix(B, "B"))

    @classmethod
    def from_rows(cls, rows):
        """Build from a 2x4 array [A | B]."""
        m = np.array(rows, dtype=complex)
        return cls(m[:, :2], m[:, 2:])

    def representative(self):
        return self.A, self.B

    def matrix(self):
        return np.hstack([self.A, self.B])

    def transformed(self, T):
        """The equivalent representative (T A, T B)."""
        T = np.asarray(T, dtype=complex)
        return RawBC(T @ self.A, T @ self.B)


@dataclass(frozen=True)
class SeparatedBC:
    """cos(alpha) y_0 - sin(alpha) f_0 dy_0 = 0, cos(beta) y_N - sin(beta) f_N dy_N = 0."""

    alpha: float
    beta: float

    kind = "separated"

    def representative(self):
        ca, sa = cos_sin(self.alpha)
        cb, sb = cos_sin(self.beta)
        A = np.array([[ca, -sa], [0.0, 0.0]], dtype=complex)
        B = np.array([[0.0, 0.0], [cb, -sb]], dtype=complex)
        return A, B

    def matrix(self):
        return np.hstack(self.representative())

    def to_dict(self):
        return {"type": "separated", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class CoupledBC:
    """[e^{i gamma} K | -I] with K real and det K = 1.  ``K`` is a tuple of rows."""

    gamma: float
    K: tuple

    kind = "coupled"

    @property
    def Kmat(self):
        return np.array(self.K, dtype=float)

    def representative(self):
        c, s = cos_sin(self.gamma)
        A = complex(c, s) * self.Kmat.astype(complex)
        B = -np.eye(2, dtype=complex)
        return A, B

    def matrix(self):
        return np.hstack(self.representative())

    def to_dict(self):
        return {"type": "coupled", "gamma": self.gamma, "K": [list(r) for r in self.K]}


CANONICAL_TYPES = (SeparatedBC, CoupledBC)


def representative(bc):
    """A representative matrix pair (A, B) for any boundary condition."""
    return bc.representative()


def _scale(A, B):
    return max(float(np.max(np.abs(A))), float(np.max(np.abs(B))))


def check_self_adjoint(A, B, tol=RANK_TOL):
    """Raise :class:`NotSelfAdjoint` unless rank(A, B) = 2 and A J A* = B J B*."""
    s = _scale(A, B)
    if s == 0.0:
        raise NotSelfAdjoint("boundary condition matrix is zero", field="bc")
    sv = np.linalg.svd(np.hstack([A, B]), compute_uv=False)
    if sv[1] <= tol * sv[0]:
        raise NotSelfAdjoint("rank(A, B) is less than 2", field="bc")
    lhs = A @ _J @ A.conj().T
    rhs = B @ _J @ B.conj().T
    if np.max(np.abs(lhs - rhs)) > tol * s * s:
        raise NotSelfAdjoint("A J A* differs from B J B*", field="bc")


def _rank(M, ref):
    sv = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(sv > RANK_TOL * ref))


def orthonormal_representative(A, B):
    """An equivalent representative whose 2x4 matrix has orthonormal rows.

    Rank decisions made on it are independent of how the caller scaled or
    mixed the rows of (A, B).
    """
    M = np.hstack([A, B])
    _, sv, vh = np.linalg.svd(M)
    if sv[1] <= RANK_TOL * sv[0]:
        raise NotSelfAdjoint("rank(A, B) is less than 2", field="bc")
    return vh[:2, :2], vh[:2, 2:]


def _real_direction(v, tol):
    """Rotate the complex vector ``v`` by the phase of its largest entry and
    return its real part; raise if the rotated vector is not real."""
    k = int(np.argmax(np.abs(v)))
    r = v * np.exp(-1j * np.angle(v[k]))
    if np.max(np.abs(r.imag)) > tol * np.max(np.abs(r)):
        raise UnclassifiableBC("boundary row is not real up to a phase", field="bc")
    return r.real


def separated_from_rows(row_a, row_b):
    """Canonical angles of the rows (x, y) ~ (cos a, -sin a) and
    (u, v) ~ (cos b, -sin b)."""
    x, y = float(row_a[0]), float(row_a[1])
    u, v = float(row_b[0]), float(row_b[1])
    alpha = _snap_angle(math.atan2(-y, x) % math.pi)
    if alpha >= math.pi:
        alpha = 0.0
    beta = _snap_angle(math.atan2(-v, u) % math.pi)
    if beta == 0.0 or beta >= math.pi:
        beta = math.pi
    return SeparatedBC(alpha, beta)


def _normalise_coupled(gamma, K):
    if gamma > 0.5 * math.pi + _SNAP:
        gamma -= math.pi
        K = -K
    elif gamma <= -0.5 * math.pi + _SNAP:
        gamma += math.pi
        K = -K
    gamma = _snap_angle(gamma)
    if gamma == -0.5 * math.pi:
        gamma, K = 0.5 * math.pi, -K
    kmax = float(np.max(np.abs(K)))
    K = np.where(np.abs(K) <= 1e-14 * kmax, 0.0, K) + 0.0
    return CoupledBC(float(gamma), tuple(tuple(float(v) for v in row) for row in K))


def classify_bc(raw):
    """Canonical form of a self-adjoint boundary condition.

    Canonical boundary conditions are returned unchanged.  Coupled results are
    normalised so that gamma lies in (-pi/2, pi/2]; the pair (gamma, K) and
    (gamma + pi, -K) describe the same condition, and this choice makes the
    canonical form unique.
    """
    if isinstance(raw, CANONICAL_TYPES):
        return raw
    A, B = raw.representative()
    check_self_adjoint(A, B)
    An, Bn = orthonormal_representative(A, B)
    ra, rb = _rank(An, 1.0), _rank(Bn, 1.0)
    # the family is decided on the orthonormal representative; parameters are
    # extracted from the caller's matrices, which keeps exact entries exact
    s = _scale(A, B)
    if _rank(A, s) != ra or _rank(B, s) != rb:
        A, B = An, Bn
    if ra == 1 and rb == 1:
        # left null vectors isolate the row acting on one endpoint only
        ua = np.linalg.svd(A)[0][:, 1].conj()
        ub = np.linalg.svd(B)[0][:, 1].conj()
        row_a = _real_direction(ub @ A, 1e-8)
        row_b = _real_direction(ua @ B, 1e-8)
        return separated_from_rows(row_a, row_b)
    if ra == 2 and rb == 2:
        C = -np.linalg.solve(B, A)
        k = np.unravel_index(int(np.argmax(np.abs(C))), C.shape)
        gamma = float(np.angle(C[k]))
        K = C * np.exp(-1j * gamma)
        if np.max(np.abs(K.imag)) > 1e-8 * np.max(np.abs(K)):
            raise UnclassifiableBC("coupling matrix is not real up to a phase", field="bc")
        K = K.real
        if abs(np.linalg.det(K) - 1.0) > 1e-8 * max(1.0, float(np.max(np.abs(K))) ** 2):
            raise UnclassifiableBC("coupling matrix does not have determinant one", field="bc")
        return _normalise_coupled(gamma, K)
    raise UnclassifiableBC(
        f"rank(A) = {ra}, rank(B) = {rb}: neither separated nor coupled", field="bc"
    )


def bc_distance(a, b):
    """Distance between two boundary conditions as equivalence classes.

    Returns ``inf`` when the two conditions belong to different families.
    """
    a, b = classify_bc(a), classify_bc(b)
    if isinstance(a, SeparatedBC) and isinstance(b, SeparatedBC):
        def ang(x, y):
            d = abs(x - y) % math.pi
            return min(d, math.pi - d)

        return max(ang(a.alpha, b.alpha), ang(a.beta, b.beta))
    if isinstance(a, CoupledBC) and isinstance(b, CoupledBC):
        ca = a.representative()[0]
        cb = b.representative()[0]
        return float(np.max(np.abs(ca - cb)))
    return math.inf


# ---------------------------------------------------------------------------
# Eigenvalue count


def count_matrix(eq, bc, A=None, B=None):
    """The 2x2 matrix whose rank r fixes the count N - 2 + r."""
    if A is None:
        A, B = bc.representative()
    f0 = eq.f[0]
    return np.array(
        [[-A[0, 0] + f0 * A[0, 1], B[0, 1]], [-A[1, 0] + f0 * A[1, 1], B[1, 1]]],
        dtype=complex,
    )


def eigenvalue_count(eq, bc):
    """Return (r, k) with k = N - 2 + r the number of eigenvalues."""
    A, B = orthonormal_representative(*bc.representative())
    r = _rank(count_matrix(eq, bc, A, B), max(1.0, abs(eq.f[0])))
    return r, eq.N - 2 + r


# ---------------------------------------------------------------------------
# Coordinate charts

#: Chart name -> (pinned column pair, target 2x2 block, coordinate names).
CHARTS = {
    "O13": ((0, 2), np.array([[1, 0], [0, -1]], dtype=complex), ("a12", "b22")),
    "O14": ((0, 3), np.array([[1, 0], [0, 1]], dtype=complex), ("a12", "b21")),
    "O23": ((1, 2), np.array([[-1, 0], [0, -1]], dtype=complex), ("a11", "b22")),
    "O24": ((1, 3), np.array([[-1, 0], [0, 1]], dtype=complex), ("a11", "b21")),
}


@dataclass(frozen=True)
class ChartCoords:
    """Coordinates (x, y, z) of a boundary condition in one of four charts.

    ``x`` and ``y`` are the chart's two real coordinates in the order given by
    ``CHARTS[chart][2]``; ``z`` is the complex coordinate.
    """

    chart: str
    x: float
    y: float
    z: complex

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ChartMembershipFailed(f"unknown chart {self.chart!r}", field="chart")

    @property
    def names(self):
        return CHARTS[self.chart][2]

    def matrix(self):
        x, y, z = self.x, self.y, complex(self.z)
        zb = z.conjugate()
        if self.chart == "O13":
            rows = [[1, x, 0, zb], [0, z, -1, y]]
        elif self.chart == "O14":
            rows = [[1, x, zb, 0], [0, z, y, 1]]
        elif self.chart == "O23":
            rows = [[x, -1, 0, zb], [z, 0, -1, y]]
        else:
            rows = [[x, -1, zb, 0], [z, 0, y, 1]]
        return np.array(rows, dtype=complex)

    def raw(self):
        return RawBC.from_rows(self.matrix())

    def canonical(self):
        return classify_bc(self.raw())

    def with_coords(self, **values):
        x = values.get(self.names[0], self.x)
        y = values.get(self.names[1], self.y)
        return ChartCoords(self.chart, float(x), float(y), complex(values.get("z", self.z)))


def chart_coordinates(bc, chart=None, tol=1e-9):
    """Coordinates of ``bc`` in every chart that contains it.

    With ``chart`` given, return that chart's coordinates or raise
    :class:`ChartMembershipFailed`.
    """
    M = np.hstack(bc.representative())
    s = float(np.max(np.abs(M)))
    names = [chart] if chart is not None else list(CHARTS)
    out = []
    for name in names:
        if name not in CHARTS:
            raise ChartMembershipFailed(f"unknown chart {name!r}", field="chart")
        cols, target, _ = CHARTS[name]
        P = M[:, list(cols)]
        if abs(np.linalg.det(P)) <= tol * s * s:
            continue
        Mn = target @ np.linalg.solve(P, M)
        if name == "O13":
            x, y, z = Mn[0, 1], Mn[1, 3], Mn[1, 1]
            zbar = Mn[0, 3]
        elif name == "O14":
            x, y, z = Mn[0, 1], Mn[1, 2], Mn[1, 1]
            zbar = Mn[0, 2]
        elif name == "O23":
            x, y, z = Mn[0, 0], Mn[1, 3], Mn[1, 0]
            zbar = Mn[0, 3]
        else:
            x, y, z = Mn[0, 0], Mn[1, 2], Mn[1, 0]
            zbar = Mn[0, 2]
        scale = max(1.0, float(np.max(np.abs(Mn))))
        if (
            abs(x.imag) > 1e-8 * scale
            or abs(y.imag) > 1e-8 * scale
            or abs(zbar - np.conj(z)) > 1e-8 * scale
        ):
            continue
        out.append(ChartCoords(name, float(x.real), float(y.real), complex(z)))
    if chart is not None and not out:
        raise ChartMembershipFailed(f"boundary condition is not in chart {chart}", field="chart")
    if not out:
        raise ChartMembershipFailed("boundary condition lies in no chart", field="chart")
    return out
