"""Registry of interlacing statements and the checker that evaluates them.

Each entry turns an :class:`InstanceSpec` into a :class:`Plan`: the problems
whose spectra are compared, the eigenvalue count claimed for each, and the
comparison chain.  :func:`check_theorem` solves the problems, verifies the
claimed counts, then evaluates the chain.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..bcfamilies import limit_bc, modified_couplings
from ..errors import DSLPError, SpecShapeMismatch, UnknownTheorem
from ..problem import (
    ChartCoords,
    CoupledBC,
    Equation,
    RawBC,
    SeparatedBC,
    classify_bc,
    eigenvalue_count,
    xi,
)
from ..spectrum import solve_spectrum
from .core import DEFAULT_TOL, Const, Segment, TheoremReport, Violation, evaluate_chain, ladder

#: Relative tolerance for the equalities that select a case (alpha = xi,
#: a12 = 1/f0, k11 - f0 k12 = 0 and so on).  Samplers construct these
#: equalities exactly, so the tolerance only absorbs rounding.
EQ_TOL = 1e-12


# ---------------------------------------------------------------------------
# Data types


@dataclass
class InstanceSpec:
    """One instance of a statement: the equation(s) and the parameters."""

    id: str
    eq: Equation
    params: dict
    eq2: Optional[Equation] = None
    seed: Optional[int] = None
    size: Optional[int] = None

    def to_dict(self):
        return {
            "id": self.id,
            "seed": self.seed,
            "size": self.size,
            "eq": self.eq.to_dict(),
            "eq2": None if self.eq2 is None else self.eq2.to_dict(),
            "params": {k: _jsonable(v) for k, v in self.params.items()},
        }


def _jsonable(v):
    if isinstance(v, (SeparatedBC, CoupledBC)):
        return v.to_dict()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class Problem:
    label: str
    eq: Equation
    bc: object
    count: int
    which: int = 1


@dataclass
class Plan:
    problems: dict
    segments: list
    case: str = ""
    claims: Optional[Callable] = None


class _HypothesisFailed(Exception):
    pass


@dataclass(frozen=True)
class Theorem:
    id: str
    params: tuple
    build: Callable
    needs_eq2: bool = False
    summary: str = ""


# ---------------------------------------------------------------------------
# Small helpers


def _require(cond, reason):
    if not cond:
        raise _HypothesisFailed(reason)


def _same(a, b):
    return abs(a - b) <= EQ_TOL * max(1.0, abs(a), abs(b))


def _is_zero(a, scale=1.0):
    return abs(a) <= EQ_TOL * max(1.0, scale)


def _floats(values, n, name):
    try:
        vals = tuple(float(v) for v in values)
    except TypeError as exc:
        raise SpecShapeMismatch(f"{name} must be a sequence of {n} numbers") from exc
    if len(vals) != n:
        raise SpecShapeMismatch(f"{name} must hold {n} values, got {len(vals)}")
    return vals


def _scalar(v, name):
    if isinstance(v, (list, tuple, np.ndarray)):
        raise SpecShapeMismatch(f"{name} must be a single number")
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise SpecShapeMismatch(f"{name} must be a number") from exc


def _complex(v, name):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(v)
    except (TypeError, ValueError) as exc:
        raise SpecShapeMismatch(f"{name} must be a complex number") from exc


def _K(v):
    try:
        K = np.array(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecShapeMismatch("K must be a real 2x2 matrix") from exc
    if K.shape != (2, 2):
        raise SpecShapeMismatch("K must be a real 2x2 matrix")
    return K


def _increasing(vals):
    return all(a < b for a, b in zip(vals, vals[1:]))


def _sep_count(eq, alpha, beta):
    """Count of the separated problem: one less for alpha = xi, one less for beta = pi."""
    return eq.N - int(_same(alpha, xi(eq))) - int(_same(beta, math.pi))


def _K_tuple(K):
    return tuple(tuple(float(x) for x in row) for row in K)


def _coupled(gamma, K):
    return CoupledBC(float(gamma), _K_tuple(K))


def _separated_rows(row_a, row_b):
    return RawBC.from_rows([[row_a[0], row_a[1], 0, 0], [0, 0, row_b[0], row_b[1]]])


def _prod_inv_f_positive(eq):
    return np.prod(np.sign(eq.f[: eq.N])) > 0


# ---------------------------------------------------------------------------
# Chain shapes shared by several statements


def _pattern(keys, rel="<="):
    """Period emitting ``(key, n)`` for each key with one relation throughout."""
    return lambda n: [((k, n), rel) for k in keys]


def _chain(keys, stop, rel="<="):
    return ladder(_pattern(keys, rel), stop)


def _pair(a, b, rel="<="):
    return Segment().add((a[0], a[1])).add((b[0], b[1]), rel)


def _triple(n, K="K", E="E", mK="mK"):
    """lambda_n(K) < lambda_n(E) < lambda_n(-K) for even n, reversed ends for odd n."""
    lo, hi = (K, mK) if n % 2 == 0 else (mK, K)
    return [((lo, n), "<"), ((E, n), "<"), ((hi, n), "<=")]


def _triple_chain(N, sep, before, full):
    """Interlacing of the coupled triple with a separated companion ``sep``.

    ``before``: the companion's n-th eigenvalue precedes the n-th triple,
    otherwise it follows.  ``full``: the companion has N eigenvalues, else
    N - 1 and the chain ends at the last triple.
    """
    last_hi = "mK" if (N - 1) % 2 == 0 else "K"
    if before:
        def period(n):
            return [((sep, n), "<=")] + _triple(n)

        return ladder(period, (last_hi, N - 1))

    def period(n):
        return _triple(n) + [((sep, n), "<=")]

    return ladder(period, (sep, N - 1) if full else (last_hi, N - 1))


# ---------------------------------------------------------------------------
# Separated conditions: angle sweeps and Dirichlet-at-an-endpoint chains


def _t31_alpha(spec, beta_is_pi):
    eq, p = spec.eq, spec.params
    N, x = eq.N, xi(eq)
    a1, a2, a3, a4 = _floats(p["alpha"], 4, "alpha")
    beta0 = _scalar(p["beta0"], "beta0")
    _require(0.0 <= a1 < a2 < x and (a3 >= x or _same(a3, x)) and a3 < a4 < math.pi,
             "need 0 <= alpha1 < alpha2 < xi <= alpha3 < alpha4 < pi")
    _require(not _same(a2, x), "alpha2 must be strictly below xi")
    if beta_is_pi:
        _require(_same(beta0, math.pi), "beta0 must equal pi")
        beta0 = math.pi
    else:
        _require(0.0 < beta0 < math.pi and not _same(beta0, math.pi), "beta0 must lie in (0, pi)")
    if _same(a3, x):
        a3 = x
    probs = {
        f"a{i}": Problem(f"alpha{i},beta0", eq, SeparatedBC(a, beta0), _sep_count(eq, a, beta0))
        for i, a in enumerate((a1, a2, a3, a4), start=1)
    }
    top = N - 2 if beta_is_pi else N - 1
    segs = [_chain(["a2", "a1", "a4", "a3"], ("a4", top), rel="<")]
    if a3 != x:
        segs.append(_pair(("a4", top), ("a3", top), "<"))
    return Plan(probs, segs, case="alpha3 = xi" if a3 == x else "alpha3 > xi")


def _t31_beta(spec, alpha_is_xi):
    eq, p = spec.eq, spec.params
    N, x = eq.N, xi(eq)
    alpha0 = _scalar(p["alpha0"], "alpha0")
    b1, b2 = _floats(p["beta"], 2, "beta")
    _require(0.0 <= alpha0 < math.pi, "alpha0 must lie in [0, pi)")
    if alpha_is_xi:
        _require(_same(alpha0, x), "alpha0 must equal xi")
        alpha0 = x
    else:
        _require(not _same(alpha0, x), "alpha0 must differ from xi")
    _require(0.0 < b1 < b2 and (b2 <= math.pi or _same(b2, math.pi)), "need 0 < beta1 < beta2 <= pi")
    b2_pi = _same(b2, math.pi)
    if b2_pi:
        b2 = math.pi
    probs = {
        "b1": Problem("alpha0,beta1", eq, SeparatedBC(alpha0, b1), _sep_count(eq, alpha0, b1)),
        "b2": Problem("alpha0,beta2", eq, SeparatedBC(alpha0, b2), _sep_count(eq, alpha0, b2)),
    }
    top = N - 2 if alpha_is_xi else N - 1
    segs = [_chain(["b1", "b2"], ("b1", top), rel="<")]
    if not b2_pi:
        segs.append(_pair(("b1", top), ("b2", top), "<"))
    return Plan(probs, segs, case="beta2 = pi" if b2_pi else "beta2 < pi")


def _c31(variant):
    def build(spec):
        eq, p = spec.eq, spec.params
        N, x = eq.N, xi(eq)
        a0 = _scalar(p["alpha0"], "alpha0")
        b0 = _scalar(p["beta0"], "beta0")
        below = 0.0 < a0 < x and not _same(a0, x)
        above = x < a0 < math.pi and not _same(a0, x)
        at_xi = _same(a0, x)
        b_open = 0.0 < b0 < math.pi and not _same(b0, math.pi)
        b_pi = _same(b0, math.pi)
        cond = {
            "i": below and b_open,
            "ii": above and b_open,
            "iii": at_xi and b_open,
            "iv": below and b_pi,
            "v": above and b_pi,
            "vi": at_xi and b_pi,
            "vii": a0 == 0.0 and b_open,
        }[variant]
        _require(cond, f"parameters outside the region of case ({variant})")
        if at_xi:
            a0 = x
        if b_pi:
            b0 = math.pi
        probs = {"E": Problem("alpha0,beta0", eq, SeparatedBC(a0, b0), _sep_count(eq, a0, b0))}
        if variant != "vii":
            probs["A"] = Problem("0,beta0", eq, SeparatedBC(0.0, b0), _sep_count(eq, 0.0, b0))
        if variant in ("i", "ii", "iii", "vii"):
            probs["B"] = Problem("alpha0,pi", eq, SeparatedBC(a0, math.pi), _sep_count(eq, a0, math.pi))

        if variant == "i":
            seg = ladder(lambda n: [(("E", n), "<"), ((("A", n), ("B", n)), "<")], ("E", N - 1))
            seg.add(("A", N - 1), "<")
        elif variant in ("ii", "iii"):
            def period(n):
                return [(("E", n), "<"), ((("A", n + 1), ("B", n)), "<")]

            seg = Segment().add(("A", 0))
            stop = ("E", N - 1) if variant == "ii" else ("E", N - 2)
            rest = ladder(period, stop)
            for g, r in zip(rest.groups, ["<"] + rest.rels):
                seg.add(g, r)
            if variant == "iii":
                seg.add(("A", N - 1), "<")
        elif variant == "iv":
            seg = _chain(["E", "A"], ("A", N - 2), rel="<")
        elif variant == "v":
            seg = _chain(["A", "E"], ("E", N - 2), rel="<")
        elif variant == "vi":
            seg = _chain(["A", "E"], ("A", N - 2), rel="<")
        else:
            seg = _chain(["E", "B"], ("E", N - 1), rel="<")
        return Plan(probs, [seg], case=variant)

    return build


# ---------------------------------------------------------------------------
# Natural loops in the four charts


def _point(chart, x, y, z):
    return ChartCoords(chart, float(x), float(y), complex(z))


def _threshold_sweep(N, limit, below_strict):
    """Chain for four swept values straddling a threshold plus the limit."""
    segs = [_chain(["p3", "p4", limit, "p1", "p2"], ("p1", N - 1))]
    if below_strict:
        segs.append(_pair(("p1", N - 1), ("p2", N - 1)))
    return segs


def _plain_sweep(N, limit):
    """Chain for two swept values and a limit with one eigenvalue fewer."""
    return [_chain(["p1", "p2", limit], ("p2", N - 1))]


def _loop_o14_o24(spec, chart, variant):
    """Loops of the charts O14 (a12, threshold 1/f0) and O24 (a11, threshold -f0)."""
    eq, p = spec.eq, spec.params
    N, f0 = eq.N, eq.f[0]
    s_name, thr = ("a12", 1.0 / f0) if chart == "O14" else ("a11", -f0)
    s_lim, t_lim = ("S1", "S2") if chart == "O14" else ("S3", "S4")
    z = _complex(p["z"], "z")
    if variant == "i":
        vals = _floats(p[s_name], 4, s_name)
        t = _scalar(p["b21"], "b21")
        v1, v2, v3, v4 = vals
        _require(v1 < v2 and (v2 < thr or _same(v2, thr)) and thr < v3 < v4 and not _same(v3, thr),
                 f"need {s_name}1 < {s_name}2 <= {thr:.6g} < {s_name}3 < {s_name}4")
        at = _same(v2, thr)
        if at:
            v2 = thr
        probs = {}
        for i, v in enumerate((v1, v2, v3, v4), start=1):
            pt = _point(chart, v, t, z)
            probs[f"p{i}"] = Problem(f"{s_name}({i})", eq, pt.raw(), N - int(v == thr))
        probs[s_lim] = Problem(s_lim, eq, limit_bc(s_lim, _point(chart, v1, t, z)), N)
        return Plan(probs, _threshold_sweep(N, s_lim, not at),
                    case=f"{s_name}(2) at threshold" if at else f"{s_name}(2) below threshold")
    s = _scalar(p[s_name], s_name)
    t1, t2 = _floats(p["b21"], 2, "b21")
    _require(t1 < t2, "need b21(1) < b21(2)")
    at = _same(s, thr)
    if at:
        s = thr
    probs = {}
    for i, t in enumerate((t1, t2), start=1):
        probs[f"r{i}"] = Problem(f"b21({i})", eq, _point(chart, s, t, z).raw(), N - int(at))
    probs[t_lim] = Problem(t_lim, eq, limit_bc(t_lim, _point(chart, s, t1, z)), N - 1 - int(at))
    segs = [_chain(["r1", "r2", t_lim], ("r2", N - 2))]
    if not at:
        tail = Segment().add(("r2", N - 2)).add((t_lim, N - 2), "<=")
        tail.add(("r1", N - 1), "<=").add(("r2", N - 1), "<=")
        segs.append(tail)
    return Plan(probs, segs, case=f"{s_name} at threshold" if at else f"{s_name} off threshold")


def _loop_o23_o13(spec, chart, variant):
    """Loops of the charts O23 (a11, b22) and O13 (a12, b22) with z != 0."""
    eq, p = spec.eq, spec.params
    N, f0 = eq.N, eq.f[0]
    z = _complex(p["z"], "z")
    _require(abs(z) > 0.0, "z must be nonzero")
    z2 = abs(z) ** 2
    if chart == "O23":
        s_name, s_lim, t_lim = "a11", "S5", "S6"

        def shifted(s):
            return s + f0

        def s_threshold(t):
            return z2 / t - f0
    else:
        s_name, s_lim, t_lim = "a12", "S7", "S8"

        def shifted(s):
            return s - 1.0 / f0

        def s_threshold(t):
            return z2 / t + 1.0 / f0

    def count(s, t):
        return N - int(_same(t * shifted(s), z2))

    if variant in ("i", "ii"):
        t = _scalar(p["b22"], "b22")
        n_vals = 2 if variant == "i" else 4
        vals = _floats(p[s_name], n_vals, s_name)
        if variant == "i":
            _require(t == 0.0, "b22 must be zero")
            _require(_increasing(vals), f"need {s_name}(1) < {s_name}(2)")
            probs = {f"p{i}": Problem(f"{s_name}({i})", eq, _point(chart, v, t, z).raw(), count(v, t))
                     for i, v in enumerate(vals, start=1)}
            probs[s_lim] = Problem(s_lim, eq, limit_bc(s_lim, _point(chart, vals[0], t, z)), N - 1)
            return Plan(probs, _plain_sweep(N, s_lim), case="b22 = 0")
        _require(t != 0.0, "b22 must be nonzero")
        thr = s_threshold(t)
        v1, v2, v3, v4 = vals
        _require(v1 < v2 and (v2 < thr or _same(v2, thr)) and thr < v3 < v4 and not _same(v3, thr),
                 f"need {s_name}(1) < {s_name}(2) <= threshold < {s_name}(3) < {s_name}(4)")
        at = _same(v2, thr)
        probs = {f"p{i}": Problem(f"{s_name}({i})", eq, _point(chart, v, t, z).raw(), count(v, t))
                 for i, v in enumerate(vals, start=1)}
        probs[s_lim] = Problem(s_lim, eq, limit_bc(s_lim, _point(chart, v1, t, z)), N)
        return Plan(probs, _threshold_sweep(N, s_lim, not at),
                    case="b22 != 0, " + ("at threshold" if at else "below threshold"))

    s = _scalar(p[s_name], s_name)
    n_vals = 2 if variant == "iii" else 4
    vals = _floats(p["b22"], n_vals, "b22")
    if variant == "iii":
        _require(_is_zero(shifted(s), abs(s)), "the shifted swept coordinate must vanish")
        _require(_increasing(vals), "need b22(1) < b22(2)")
        probs = {f"p{i}": Problem(f"b22({i})", eq, _point(chart, s, v, z).raw(), N)
                 for i, v in enumerate(vals, start=1)}
        probs[t_lim] = Problem(t_lim, eq, limit_bc(t_lim, _point(chart, s, vals[0], z)), N - 1)
        return Plan(probs, _plain_sweep(N, t_lim), case="shift = 0")
    sh = shifted(s)
    _require(not _is_zero(sh, abs(s)), "the shifted swept coordinate must be nonzero")
    thr = z2 / sh
    v1, v2, v3, v4 = vals
    _require(v1 < v2 and (v2 < thr or _same(v2, thr)) and thr < v3 < v4 and not _same(v3, thr),
             "need b22(1) < b22(2) <= threshold < b22(3) < b22(4)")
    at = _same(v2, thr)
    probs = {f"p{i}": Problem(f"b22({i})", eq, _point(chart, s, v, z).raw(), count(s, v))
             for i, v in enumerate(vals, start=1)}
    probs[t_lim] = Problem(t_lim, eq, limit_bc(t_lim, _point(chart, s, v1, z)), N)
    return Plan(probs, _threshold_sweep(N, t_lim, not at),
                case="shift != 0, " + ("at threshold" if at else "below threshold"))


def _with_variant(builder, chart, allowed):
    def build(spec):
        variant = spec.params.get("variant")
        if variant not in allowed:
            raise SpecShapeMismatch(f"variant must be one of {allowed}, got {variant!r}")
        return builder(spec, chart, variant)

    return build


# ---------------------------------------------------------------------------
# Coupled conditions against separated companions


def _coupled_data(spec, need_gamma=True):
    eq, p = spec.eq, spec.params
    K = _K(p["K"])
    _require(abs(np.linalg.det(K) - 1.0) <= 1e-10 * max(1.0, float(np.max(np.abs(K)))) ** 2,
             "det K must equal 1")
    gamma = _scalar(p["gamma"], "gamma") if need_gamma else 0.0
    _require(-math.pi < gamma <= math.pi, "gamma must lie in (-pi, pi]")
    return eq, K, gamma


def _c(K, f0):
    """k11 - f0 k12, snapped to zero when it vanishes up to rounding."""
    v = K[0, 0] - f0 * K[0, 1]
    return 0.0 if _is_zero(v, abs(K[0, 0]) + abs(f0 * K[0, 1])) else v


def _d(K, f0):
    """f0 k22 - k21, snapped to zero when it vanishes up to rounding."""
    v = f0 * K[1, 1] - K[1, 0]
    return 0.0 if _is_zero(v, abs(f0 * K[1, 1]) + abs(K[1, 0])) else v


def _companions(eq, K):
    """Separated companions with the counts claimed for them."""
    (k11, k12), (k21, k22) = K
    N, f0 = eq.N, eq.f[0]
    c, d = _c(K, f0), _d(K, f0)
    return {
        "T": Problem("T_K", eq, _separated_rows([0, 1], [-k21, k11]), N - int(k11 == 0.0)),
        "U": Problem("U_K", eq, _separated_rows([k11, k12], [1, 0]), N - 1 - int(c == 0.0)),
        "S": Problem("S_K", eq, _separated_rows([1, 0], [-k22, k12]), N - int(k12 == 0.0)),
        "V": Problem("V_K", eq, _separated_rows([k21, k22], [0, 1]), N - int(d == 0.0)),
    }


def _coupled_problem(eq, gamma, K, label="e^{i gamma}K"):
    return Problem(label, eq, _coupled(gamma, K), eq.N - int(_c(K, eq.f[0]) == 0.0))


def _t36(part):
    def build(spec):
        eq, K, gamma = _coupled_data(spec)
        N, f0 = eq.N, eq.f[0]
        k11 = K[0, 0]
        c = _c(K, f0)
        comp = _companions(eq, K)
        probs = {"E": _coupled_problem(eq, gamma, K)}
        if part == "i":
            probs["T"] = comp["T"]
            if k11 == 0.0:
                seg, case = _chain(["E", "T"], ("E", N - 1)), "k11 = 0"
            elif c == 0.0:
                seg, case = _chain(["T", "E"], ("T", N - 1)), "k11 - f0 k12 = 0"
            elif c * k11 * f0 > 0:
                seg, case = _chain(["T", "E"], ("E", N - 1)), "(k11 - f0 k12) k11 f0 > 0"
            else:
                seg, case = _chain(["E", "T"], ("T", N - 1)), "(k11 - f0 k12) k11 f0 < 0"
        else:
            probs["U"] = comp["U"]
            if c != 0.0:
                seg, case = _chain(["E", "U"], ("E", N - 1)), "k11 - f0 k12 != 0"
            else:
                seg, case = _chain(["E", "U"], ("E", N - 2)), "k11 - f0 k12 = 0"
        return Plan(probs, [seg], case=case)

    return build


def _t37(part):
    def build(spec):
        eq, K, gamma = _coupled_data(spec)
        N, f0 = eq.N, eq.f[0]
        k12 = K[0, 1]
        c, d = _c(K, f0), _d(K, f0)
        comp = _companions(eq, K)
        probs = {"E": _coupled_problem(eq, gamma, K)}
        if part == "i":
            probs["S"] = comp["S"]
            if k12 == 0.0:
                seg, case = _chain(["E", "S"], ("E", N - 1)), "k12 = 0"
            elif c == 0.0:
                seg, case = _chain(["S", "E"], ("S", N - 1)), "k11 - f0 k12 = 0"
            elif c * k12 > 0:
                seg, case = _chain(["S", "E"], ("E", N - 1)), "(k11 - f0 k12) k12 > 0"
            else:
                seg, case = _chain(["E", "S"], ("S", N - 1)), "(k11 - f0 k12) k12 < 0"
        else:
            probs["V"] = comp["V"]
            if d == 0.0:
                seg, case = _chain(["E", "V"], ("E", N - 1)), "f0 k22 - k21 = 0"
            elif c == 0.0:
                seg, case = _chain(["V", "E"], ("V", N - 1)), "k11 - f0 k12 = 0"
            elif c * d > 0:
                seg, case = _chain(["V", "E"], ("E", N - 1)), "(k11 - f0 k12)(f0 k22 - k21) > 0"
            else:
                seg, case = _chain(["E", "V"], ("V", N - 1)), "(k11 - f0 k12)(f0 k22 - k21) < 0"
        return Plan(probs, [seg], case=case)

    return build


def _c32(spec):
    eq, K, gamma = _coupled_data(spec)
    N = eq.N
    _require(_c(K, eq.f[0]) == 0.0, "k11 - f0 k12 must vanish")
    probs = {"E": _coupled_problem(eq, gamma, K)}
    probs.update(_companions(eq, K))

    def period(n):
        group = [("S", n), ("T", n), ("V", n)]
        if n >= 1:
            group.append(("U", n - 1))
        return [(tuple(group), "<="), (("E", n), "<=")]

    seg = ladder(period, ("E", N - 2))
    seg.add((("S", N - 1), ("T", N - 1), ("V", N - 1)), "<=")
    return Plan(probs, [seg], case="k11 - f0 k12 = 0")


# ---------------------------------------------------------------------------
# The coupled triple K, e^{i gamma} K, -K


def _triple_problems(eq, gamma, P, flipped):
    """Problems for the role matrix P (which is -K when ``flipped``)."""
    names = ("-K", "K") if flipped else ("K", "-K")
    N = eq.N
    return {
        "K": Problem(names[0], eq, _coupled(0.0, P), N),
        "E": Problem(f"e^{{i gamma}}{names[0]}", eq, _coupled(gamma, P), N),
        "mK": Problem(names[1], eq, _coupled(0.0, -P), N),
    }


def _triple_common(spec):
    eq, K, gamma = _coupled_data(spec)
    _require(_prod_inv_f_positive(eq), "the product of 1/f_0..1/f_{N-1} must be positive")
    _require(gamma != 0.0 and abs(gamma) < math.pi, "gamma must lie in (-pi, 0) or (0, pi)")
    c = _c(K, eq.f[0])
    _require(c != 0.0, "k11 - f0 k12 must be nonzero")
    return eq, K, gamma, c


def _t38_case(P, f0):
    """Which of the three sign cases the role matrix P satisfies, if any."""
    c = _c(P, f0)
    if c > 0 and P[0, 1] > 0:
        return "i"
    if c > 0 and P[0, 1] < 0:
        return "ii"
    if P[0, 0] > 0 and P[0, 1] == 0.0:
        return "iii"
    return None


def _t38(variant):
    def build(spec):
        eq, K, gamma, _ = _triple_common(spec)
        N, f0 = eq.N, eq.f[0]
        if variant == "iv":
            _require(_t38_case(K, f0) is None, "K already satisfies one of the direct cases")
            P, case = -K, _t38_case(-K, f0)
            _require(case is not None, "-K satisfies none of the sign cases")
        else:
            P, case = K, variant
            _require(_t38_case(K, f0) == variant, f"K does not satisfy the sign case ({variant})")
        probs = _triple_problems(eq, gamma, P, flipped=variant == "iv")
        probs["S"] = _companions(eq, P)["S"]
        seg = _triple_chain(N, "S", before=case == "i", full=case != "iii")
        return Plan(probs, [seg], case=f"case ({case})" + (" for -K" if variant == "iv" else ""))

    return build


def _role(K, c):
    return (K, False) if c > 0 else (-K, True)


def _t39(spec):
    eq, K, gamma, c = _triple_common(spec)
    P, flipped = _role(K, c)
    probs = _triple_problems(eq, gamma, P, flipped)
    probs["U"] = _companions(eq, P)["U"]
    seg = _triple_chain(eq.N, "U", before=False, full=False)
    return Plan(probs, [seg], case="(ii): -K" if flipped else "(i)")


def _t310(spec):
    eq, K, gamma, c = _triple_common(spec)
    f0 = eq.f[0]
    P, flipped = _role(K, c)
    probs = _triple_problems(eq, gamma, P, flipped)
    probs["T"] = _companions(eq, P)["T"]
    if P[0, 0] == 0.0:
        _require(f0 * P[0, 1] < 0, "f0 k12 must be negative when k11 = 0")
        seg, case = _triple_chain(eq.N, "T", before=False, full=False), "k11 = 0"
    elif f0 * P[0, 0] > 0:
        seg, case = _triple_chain(eq.N, "T", before=True, full=True), "f0 k11 > 0"
    else:
        seg, case = _triple_chain(eq.N, "T", before=False, full=True), "f0 k11 < 0"
    return Plan(probs, [seg], case=case + (" for -K" if flipped else ""))


def _t311(spec):
    eq, K, gamma, c = _triple_common(spec)
    f0 = eq.f[0]
    P, flipped = _role(K, c)
    probs = _triple_problems(eq, gamma, P, flipped)
    probs["V"] = _companions(eq, P)["V"]
    d = _d(P, f0)
    if d == 0.0:
        seg, case = _triple_chain(eq.N, "V", before=False, full=False), "f0 k22 - k21 = 0"
    elif d > 0:
        seg, case = _triple_chain(eq.N, "V", before=True, full=True), "f0 k22 - k21 > 0"
    else:
        seg, case = _triple_chain(eq.N, "V", before=False, full=True), "f0 k22 - k21 < 0"
    return Plan(probs, [seg], case=case + (" for -K" if flipped else ""))


def _c33(spec):
    eq, K, _ = _coupled_data(spec, need_gamma=False)
    N = eq.N
    _require(_prod_inv_f_positive(eq), "the product of 1/f_0..1/f_{N-1} must be positive")
    c = _c(K, eq.f[0])
    _require(c != 0.0, "k11 - f0 k12 must be nonzero")
    P, flipped = _role(K, c)
    names = ("-K", "K") if flipped else ("K", "-K")
    probs = {
        "K": Problem(names[0], eq, _coupled(0.0, P), N),
        "mK": Problem(names[1], eq, _coupled(0.0, -P), N),
    }

    def claims(values, spectra, tol, report):
        def simple(key, j, position):
            vals = values[key]
            mult = sum(1 for v in vals if abs(v - vals[j]) <= 1e-9 * max(1.0, abs(vals[j])))
            label = f"lambda_{j}({probs[key].label}) simple"
            report.chain.append((label, float(vals[j])))
            if mult != 1:
                report.violations.append(Violation(position, float(mult), 1.0, 1.0 - mult, label))

        claimed = [("K", 0)]
        for j in range(1, N - 1, 2):
            if values["K"][j + 1] - values["K"][j] > tol:
                claimed += [("K", j), ("K", j + 1)]
        for j in range(0, N - 1, 2):
            if values["mK"][j + 1] - values["mK"][j] > tol:
                claimed += [("mK", j), ("mK", j + 1)]
        claimed.append(("mK", N - 1) if N % 2 else ("K", N - 1))
        for pos, (key, j) in enumerate(claimed):
            simple(key, j, pos)
        report.comparisons += len(claimed)

    return Plan(probs, [], case="(ii): -K" if flipped else "(i)", claims=claims)


# ---------------------------------------------------------------------------
# Modified couplings


def _t312(part):
    def build(spec):
        eq, K, gamma = _coupled_data(spec)
        N, f0 = eq.N, eq.f[0]
        _require(_c(K, f0) != 0.0, "k11 - f0 k12 must be nonzero")
        K_hat, K_tilde = modified_couplings(K, f0)
        if part == "i":
            _require(K[0, 0] != 0.0, "k11 must be nonzero")
            M, label = K_hat, "e^{i gamma}K_hat"
        else:
            _require(K[0, 1] != 0.0, "k12 must be nonzero")
            M, label = K_tilde, "e^{i gamma}K_tilde"
        probs = {
            "E": Problem("e^{i gamma}K", eq, _coupled(gamma, K), N),
            "M": Problem(label, eq, _coupled(gamma, M), N - 1),
        }
        return Plan(probs, [_chain(["E", "M"], ("E", N - 1))])

    return build


# ---------------------------------------------------------------------------
# Different equations with one boundary condition


def _mu(bc):
    A, B = bc.representative()
    mu1 = A[0, 0] * B[1, 1] - A[1, 0] * B[0, 1]
    mu2 = A[1, 1] * B[0, 1] - A[0, 1] * B[1, 1]
    scale = float(np.max(np.abs(np.hstack([A, B])))) ** 2
    mu1 = 0.0 if abs(mu1) <= EQ_TOL * scale else mu1
    mu2 = 0.0 if abs(mu2) <= EQ_TOL * scale else mu2
    return mu1, mu2


def _ordered_coefficients(eq1, eq2):
    _require(eq1.N == eq2.N, "the two equations must have the same N")
    N = eq1.N
    _require(all(eq1.f[j] <= eq2.f[j] for j in range(N)), "need f1_j <= f2_j for j < N")
    _require(all(a <= b for a, b in zip(eq1.q, eq2.q)), "need q1 <= q2")


def _weight_claims(pairs):
    """Claims lambda_n(1) <= lambda_n(2) selected by sign and weight order.

    ``pairs`` lists (key1, key2, n_max).  The claim at index n applies when
    lambda_n(1) > 0 and w1 >= w2, or when lambda_n(1) <= 0 and w1 <= w2.
    """

    def claims(values, spectra, tol, report, eqs):
        eq1, eq2 = eqs
        w_ge = all(a >= b for a, b in zip(eq1.w, eq2.w))
        w_le = all(a <= b for a, b in zip(eq1.w, eq2.w))
        segs = []
        for k1, k2, top in pairs:
            for n in range(top + 1):
                v = values[k1][n]
                if (v > tol and w_ge) or (v <= tol and w_le):
                    segs.append(_pair((k1, n), (k2, n)))
        return segs

    return claims


def _t41(variant):
    def build(spec):
        eq1, eq2 = spec.eq, spec.eq2
        _require(eq2 is not None, "a second equation is required")
        _ordered_coefficients(eq1, eq2)
        bc = spec.params["bc"]
        if not isinstance(bc, (SeparatedBC, CoupledBC, RawBC)):
            raise SpecShapeMismatch("bc must be a boundary condition")
        bc = classify_bc(bc)
        N = eq1.N
        f01, f02 = eq1.f[0], eq2.f[0]
        mu1, mu2 = _mu(bc)
        cond = None
        if mu1 != 0 and mu2 != 0:
            eta = (-mu2 / mu1).real
            inv = 1.0 / eta
            if f02 < inv and not _same(f02, inv) or f01 > inv and not _same(f01, inv):
                cond = 1
            elif _same(f01, inv) and _same(f02, inv):
                cond = 3
        elif (mu1 == 0) != (mu2 == 0):
            cond = 2
        else:
            # mu1 = mu2 = 0: the condition is S_{alpha, pi}
            _require(isinstance(bc, SeparatedBC), "mu1 = mu2 = 0 needs a separated condition")
            ca, sa = math.cos(bc.alpha), math.sin(bc.alpha)
            if bc.alpha == 0.5 * math.pi:
                cond = 6
            elif bc.alpha == 0.0:
                cond = 7
            else:
                crit = -ca / sa  # -a11 for A1, equal to 1/a12 for A2
                if f02 < crit and not _same(f02, crit) or f01 > crit and not _same(f01, crit):
                    cond = 4
                elif _same(f01, crit) and _same(f02, crit):
                    cond = 8
        allowed = {"i": (1, 2), "ii": (3, 4, 5, 6, 7), "iii": (8, 9)}[variant]
        _require(cond in allowed, f"none of the conditions {allowed} holds")
        count = {"i": N, "ii": N - 1, "iii": N - 2}[variant]
        probs = {
            "P1": Problem("eq1", eq1, bc, count, which=1),
            "P2": Problem("eq2", eq2, bc, count, which=2),
        }
        claims = _weight_claims([("P1", "P2", count - 1)])
        return Plan(probs, [], case=f"condition ({cond})",
                    claims=lambda v, s, t, r: claims(v, s, t, r, (eq1, eq2)))

    return build


def _c41(variant):
    def build(spec):
        eq1, eq2 = spec.eq, spec.eq2
        _require(eq2 is not None, "a second equation is required")
        _ordered_coefficients(eq1, eq2)
        p = spec.params
        a1, a2 = _floats(p["a12"], 2, "a12")
        b1, b2 = _floats(p["b21"], 2, "b21")
        z = _complex(p["z"], "z")
        _require(a1 <= a2 and b1 <= b2, "need a12(1) <= a12(2) and b21(1) <= b21(2)")
        N = eq1.N
        f01, f02 = eq1.f[0], eq2.f[0]
        if variant == "i":
            if a1 != 0.0:
                ok = f02 * a1 > 0 and (a2 < 1.0 / f02 and not _same(a2, 1.0 / f02)
                                       or f01 > 1.0 / a1 and not _same(f01, 1.0 / a1))
                case = "condition (1)"
            else:
                ok = (a2 < 1.0 / f02 and not _same(a2, 1.0 / f02)) or 1.0 / f02 < 0
                case = "condition (2)" + (", a12(2) below 1/f0(2)" if a2 < 1.0 / f02 else ", 1/f0(2) < 0")
            _require(ok, "neither condition (1) nor condition (2) holds")
            count = N
        else:
            ok = _same(a1, a2) and _same(a1, 1.0 / f01) and _same(a2, 1.0 / f02)
            _require(ok, "need a12(1) = a12(2) = 1/f0(1) = 1/f0(2)")
            count, case = N - 1, "a12 = 1/f0"
        probs = {
            "P1": Problem("eq1,A(1)", eq1, _point("O14", a1, b1, z).raw(), count, which=1),
            "P2": Problem("eq2,A(2)", eq2, _point("O14", a2, b2, z).raw(), count, which=2),
        }
        claims = _weight_claims([("P1", "P2", count - 1)])
        return Plan(probs, [], case=case, claims=lambda v, s, t, r: claims(v, s, t, r, (eq1, eq2)))

    return build


def _l42(spec):
    eq, p = spec.eq, spec.params
    bc = p["bc"]
    if not isinstance(bc, (SeparatedBC, CoupledBC, RawBC)):
        raise SpecShapeMismatch("bc must be a boundary condition")
    weights = p["weights"]
    if not isinstance(weights, (list, tuple)) or len(weights) < 2:
        raise SpecShapeMismatch("weights must list at least two weight vectors")
    eqs = []
    for i, w in enumerate(weights):
        w = _floats(w, eq.N, f"weights[{i}]")
        _require(all(v > 0 for v in w), "weights must be positive")
        eqs.append(eq.replace(w=w))
    _, k = eigenvalue_count(eq, classify_bc(bc))
    probs = {f"W{i}": Problem(f"w({i})", e, bc, k) for i, e in enumerate(eqs)}

    def claims(values, spectra, tol, report):
        segs = []
        keys = list(probs)
        zero = Const(0.0, "0")
        for j in range(k):
            col = [values[key][j] for key in keys]
            if max(col) > tol:
                seg = Segment().add(zero)
                seg.groups.append(tuple((key, j) for key in keys))
                seg.rels.append("<=")
                segs.append(seg)
            if min(col) < -tol:
                seg = Segment().add(tuple((key, j) for key in keys))
                seg.add(zero, "<=")
                segs.append(seg)
        return segs

    return Plan(probs, [], case=f"{len(eqs)} weights", claims=claims)


# ---------------------------------------------------------------------------
# The registry


def _entries():
    E = []

    def add(tid, params, build, summary="", needs_eq2=False):
        E.append(Theorem(tid, tuple(params), build, needs_eq2, summary))

    add("T3.1i", ("alpha", "beta0"), lambda s: _t31_alpha(s, False),
        "alpha sweep at beta0 in (0, pi)")
    add("T3.1ii", ("alpha", "beta0"), lambda s: _t31_alpha(s, True), "alpha sweep at beta0 = pi")
    add("T3.1iii", ("alpha0", "beta"), lambda s: _t31_beta(s, False), "beta sweep at alpha0 != xi")
    add("T3.1iv", ("alpha0", "beta"), lambda s: _t31_beta(s, True), "beta sweep at alpha0 = xi")
    for v in ("i", "ii", "iii", "iv", "v", "vi", "vii"):
        add(f"C3.1.{v}", ("alpha0", "beta0"), _c31(v), "Dirichlet at an endpoint")
    add("T3.2i", ("a12", "b21", "z"), lambda s: _loop_o14_o24(s, "O14", "i"), "O14 a12 loop")
    add("T3.2ii", ("a12", "b21", "z"), lambda s: _loop_o14_o24(s, "O14", "ii"), "O14 b21 loop")
    add("T3.3", ("variant", "a11", "b21", "z"), _with_variant(_loop_o14_o24, "O24", ("i", "ii")),
        "O24 loops")
    for v in ("i", "ii", "iii", "iv"):
        add(f"T3.4{v}", ("a11", "b22", "z"), lambda s, v=v: _loop_o23_o13(s, "O23", v),
            "O23 loops")
    add("T3.5", ("variant", "a12", "b22", "z"),
        _with_variant(_loop_o23_o13, "O13", ("i", "ii", "iii", "iv")), "O13 loops")
    add("T3.6i", ("gamma", "K"), _t36("i"), "coupled against T_K")
    add("T3.6ii", ("gamma", "K"), _t36("ii"), "coupled against U_K")
    add("T3.7i", ("gamma", "K"), _t37("i"), "coupled against S_K")
    add("T3.7ii", ("gamma", "K"), _t37("ii"), "coupled against V_K")
    add("C3.2", ("gamma", "K"), _c32, "all companions when k11 = f0 k12")
    add("C3.3", ("K",), _c33, "simple eigenvalues of K and -K")
    for v in ("i", "ii", "iii", "iv"):
        add(f"T3.8{v}", ("gamma", "K"), _t38(v), "triple against S_K")
    add("T3.9", ("gamma", "K"), _t39, "triple against U_K")
    add("T3.10", ("gamma", "K"), _t310, "triple against T_K")
    add("T3.11", ("gamma", "K"), _t311, "triple against V_K")
    add("T3.12i", ("gamma", "K"), _t312("i"), "K against K_hat")
    add("T3.12ii", ("gamma", "K"), _t312("ii"), "K against K_tilde")
    for v in ("i", "ii", "iii"):
        add(f"T4.1{v}", ("bc",), _t41(v), needs_eq2=True, summary="two equations, one condition")
    add("C4.1i", ("a12", "b21", "z"), _c41("i"), needs_eq2=True, summary="two equations in O14")
    add("C4.1ii", ("a12", "b21", "z"), _c41("ii"), needs_eq2=True, summary="two equations in O14")
    add("L4.2", ("bc", "weights"), _l42, "sign persistence over weights")
    return {t.id: t for t in E}


REGISTRY = _entries()
THEOREM_IDS = tuple(REGISTRY)


def get_theorem(theorem_id):
    try:
        return REGISTRY[theorem_id]
    except KeyError:
        raise UnknownTheorem(f"unknown theorem id {theorem_id!r}") from None


def _check_shape(theorem, spec):
    missing = [k for k in theorem.params if k not in spec.params]
    if missing:
        raise SpecShapeMismatch(f"{theorem.id} needs parameters {missing}")
    extra = [k for k in spec.params if k not in theorem.params]
    if extra:
        raise SpecShapeMismatch(f"{theorem.id} does not take parameters {extra}")
    if theorem.needs_eq2 and spec.eq2 is None:
        raise SpecShapeMismatch(f"{theorem.id} needs a second equation")


def plan_for(theorem_id, spec):
    """The problems and chain a check would evaluate, or ``None`` if the
    hypotheses fail."""
    theorem = get_theorem(theorem_id)
    _check_shape(theorem, spec)
    try:
        return theorem.build(spec)
    except _HypothesisFailed:
        return None


def check_theorem(theorem_id, spec, tol=DEFAULT_TOL):
    """Check one statement on one instance and return a :class:`TheoremReport`."""
    theorem = get_theorem(theorem_id)
    _check_shape(theorem, spec)
    report = TheoremReport(theorem_id, False)
    try:
        plan = theorem.build(spec)
    except _HypothesisFailed as exc:
        report.reason = str(exc)
        return report
    report.hypotheses_met = True
    report.case = plan.case

    values, spectra, labels = {}, {}, {}
    for key, prob in plan.problems.items():
        labels[key] = prob.label
        entry = {"label": prob.label, "equation": prob.which, "claimed_count": prob.count}
        try:
            canon = classify_bc(prob.bc)
            entry["bc"] = canon.to_dict()
            spec_ = solve_spectrum(prob.eq, canon)
        except DSLPError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            report.problems[key] = entry
            report.violations.append(Violation(None, math.nan, math.nan, math.nan,
                                               f"{prob.label}: {type(exc).__name__}: {exc}"))
            continue
        entry["count"] = spec_.k
        entry["eigenvalues"] = [float(v) for v in spec_.values()]
        report.problems[key] = entry
        spectra[key] = spec_
        values[key] = spec_.values()
        if spec_.k != prob.count:
            report.violations.append(Violation(
                None, float(spec_.k), float(prob.count), float(prob.count - spec_.k),
                f"count of {prob.label} is {spec_.k}, claimed {prob.count}"))
    if report.violations:
        return report

    segments = list(plan.segments)
    if plan.claims is not None:
        extra = plan.claims(values, spectra, tol, report)
        if extra:
            segments.extend(extra)
    evaluate_chain(segments, values, labels, tol, report)
    return report


def chain_comparisons(theorem_id, spec):
    """Number of pairwise comparisons in the displayed chain of ``spec``."""
    plan = plan_for(theorem_id, spec)
    if plan is None:
        return 0
    return sum(seg.comparisons() for seg in plan.segments)
