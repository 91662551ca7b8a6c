"""Random instances satisfying the hypotheses of each registered statement.

Coefficients are drawn as f_j = +/- U[0.3, 3], q_j = U[-2, 2] and
w_j = U[0.3, 3].  Boundary cases named by a statement (alpha = xi, a value
at a threshold, k11 - f0 k12 = 0, ...) are constructed exactly and drawn with
a fixed probability so that every case of every statement is exercised.
"""

import math
import zlib

import numpy as np

from ..problem import CoupledBC, Equation, SeparatedBC, xi
from .registry import InstanceSpec, _mu, get_theorem, plan_for

#: Minimum distance kept from excluded values and between swept values.
GAP = 0.05

#: Probability of constructing an equality case when a statement allows one.
P_EDGE = 0.25

MAX_ATTEMPTS = 500


def instance_rng(theorem_id, seed, size):
    """Generator determined by the id, the seed and the size."""
    return np.random.default_rng([zlib.crc32(theorem_id.encode()), int(seed), int(size or 0)])


# ---------------------------------------------------------------------------
# Building blocks


def random_equation(rng, N, positive_product=False):
    f = rng.uniform(0.3, 3.0, N + 1) * rng.choice([-1.0, 1.0], N + 1)
    if positive_product and np.prod(np.sign(f[:N])) < 0:
        i = rng.integers(N)
        f[i] = -f[i]
    q = rng.uniform(-2.0, 2.0, N)
    w = rng.uniform(0.3, 3.0, N)
    return Equation(N, tuple(float(v) for v in f), tuple(float(v) for v in q),
                    tuple(float(v) for v in w))


def _spaced(rng, lo, hi, k, gap=GAP):
    """``k`` sorted values in [lo, hi] with consecutive gaps at least ``gap``."""
    span = hi - lo - (k - 1) * gap
    if span <= 0:
        return None
    base = np.sort(rng.uniform(lo, lo + span, k))
    return [float(b + i * gap) for i, b in enumerate(base)]


def _edge(rng, p=P_EDGE):
    return rng.random() < p


def _nonzero(rng, lo=0.2, hi=2.5):
    return float(rng.uniform(lo, hi) * rng.choice([-1.0, 1.0]))


def _z(rng, allow_zero):
    if allow_zero and _edge(rng, 0.1):
        return 0j
    while True:
        z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if abs(z) > 0.1:
            return z


def _gamma(rng, exclude_real=False):
    if exclude_real:
        g = rng.uniform(GAP, math.pi - GAP)
        return float(g if rng.random() < 0.5 else -g)
    return float(rng.uniform(-math.pi, math.pi))


def _complete_sl2(k11, k12, rng):
    """A real K with first row (k11, k12) and det K = 1."""
    if abs(k11) >= abs(k12):
        k21 = float(rng.uniform(-2.5, 2.5))
        k22 = (1.0 + k12 * k21) / k11
    else:
        k22 = float(rng.uniform(-2.5, 2.5))
        k21 = (k11 * k22 - 1.0) / k12
    return [[float(k11), float(k12)], [float(k21), float(k22)]]


def coupling(rng, f0, kind="generic"):
    """A unimodular K of the requested kind.

    Kinds: ``generic`` (k11 - f0 k12 != 0), ``c0`` (k11 = f0 k12),
    ``k11_0``, ``k12_0`` and ``d0`` (f0 k22 = k21).
    """
    if kind == "c0":
        k12 = _nonzero(rng)
        return _complete_sl2(f0 * k12, k12, rng)
    if kind == "k11_0":
        k12 = _nonzero(rng)
        return [[0.0, k12], [-1.0 / k12, float(rng.uniform(-2.5, 2.5))]]
    if kind == "k12_0":
        k11 = _nonzero(rng)
        return [[k11, 0.0], [float(rng.uniform(-2.5, 2.5)), 1.0 / k11]]
    while True:
        k11, k12 = float(rng.uniform(-2.5, 2.5)), float(rng.uniform(-2.5, 2.5))
        c = k11 - f0 * k12
        if abs(c) > 0.2 and max(abs(k11), abs(k12)) > 0.2:
            break
    if kind == "d0":
        k22 = 1.0 / c
        return [[k11, k12], [f0 * k22, k22]]
    return _complete_sl2(k11, k12, rng)


def _signed_coupling(rng, f0, c_sign, k12_sign):
    """K with sign(k11 - f0 k12) = c_sign and sign(k12) = k12_sign (0 means k12 = 0)."""
    if k12_sign == 0:
        k11 = c_sign * float(rng.uniform(0.2, 2.5))
        return [[k11, 0.0], [float(rng.uniform(-2.5, 2.5)), 1.0 / k11]]
    k12 = k12_sign * float(rng.uniform(0.2, 2.5))
    k11 = f0 * k12 + c_sign * float(rng.uniform(0.2, 2.5))
    return _complete_sl2(k11, k12, rng)


def random_bc(rng, eq):
    if rng.random() < 0.5:
        alpha = 0.0 if _edge(rng, 0.1) else float(rng.uniform(0.0, math.pi))
        beta = math.pi if _edge(rng, 0.1) else float(rng.uniform(GAP, math.pi))
        return SeparatedBC(alpha, beta)
    return CoupledBC(_gamma(rng), tuple(tuple(r) for r in coupling(rng, eq.f[0])))


# ---------------------------------------------------------------------------
# Per-statement parameter draws


def _t31_alpha(rng, eq, beta_pi):
    x = xi(eq)
    if x < 2 * GAP or x > math.pi - 3 * GAP:
        return None
    if _edge(rng, 0.2):
        a1 = 0.0
        a2 = float(rng.uniform(GAP, x - GAP))
    else:
        pair = _spaced(rng, 0.0, x - GAP, 2)
        if pair is None:
            return None
        a1, a2 = pair
    if _edge(rng):
        a3 = x
        a4 = float(rng.uniform(x + GAP, math.pi - GAP))
    else:
        a3, a4 = _spaced(rng, x + GAP, math.pi - GAP, 2)
    beta0 = math.pi if beta_pi else float(rng.uniform(GAP, math.pi - GAP))
    return {"alpha": [a1, a2, a3, a4], "beta0": beta0}


def _t31_beta(rng, eq, at_xi):
    x = xi(eq)
    if at_xi:
        alpha0 = x
    elif _edge(rng, 0.2):
        alpha0 = 0.0
    else:
        alpha0 = float(rng.uniform(0.0, math.pi))
        if abs(alpha0 - x) < GAP:
            return None
    b1, b2 = _spaced(rng, GAP, math.pi, 2)
    if _edge(rng):
        b2 = math.pi
    return {"alpha0": alpha0, "beta": [b1, b2]}


def _c31(rng, eq, variant):
    x = xi(eq)
    if variant in ("i", "iv"):
        lo, hi = GAP, x - GAP
    elif variant in ("ii", "v"):
        lo, hi = x + GAP, math.pi - GAP
    else:
        lo = hi = None
    if lo is not None and hi <= lo:
        return None
    alpha0 = {None: x}.get(lo, None) if lo is None else float(rng.uniform(lo, hi))
    if variant == "vii":
        alpha0 = 0.0
    beta0 = math.pi if variant in ("iv", "v", "vi") else float(rng.uniform(GAP, math.pi - GAP))
    return {"alpha0": alpha0, "beta0": beta0}


def _straddle(rng, thr, allow_at=True):
    """v1 < v2 <= thr < v3 < v4, with v2 = thr in a fraction of draws."""
    lo = _spaced(rng, thr - 3.0, thr - GAP, 2)
    hi = _spaced(rng, thr + GAP, thr + 3.0, 2)
    if allow_at and _edge(rng):
        lo[1] = thr
    return lo + hi


def _o14_o24(rng, eq, chart, variant):
    f0 = eq.f[0]
    s_name, thr = ("a12", 1.0 / f0) if chart == "O14" else ("a11", -f0)
    z = _z(rng, allow_zero=True)
    if variant == "i":
        return {s_name: _straddle(rng, thr), "b21": float(rng.uniform(-2.5, 2.5)), "z": z}
    s = thr if _edge(rng) else float(rng.uniform(-2.5, 2.5))
    return {s_name: s, "b21": _spaced(rng, -2.5, 2.5, 2), "z": z}


def _o23_o13(rng, eq, chart, variant):
    f0 = eq.f[0]
    z = _z(rng, allow_zero=False)
    z2 = abs(z) ** 2
    if chart == "O23":
        s_name, shift0 = "a11", -f0
    else:
        s_name, shift0 = "a12", 1.0 / f0
    if variant == "i":
        return {s_name: _spaced(rng, -2.5, 2.5, 2), "b22": 0.0, "z": z}
    if variant == "ii":
        t = _nonzero(rng)
        return {s_name: _straddle(rng, z2 / t + shift0), "b22": t, "z": z}
    if variant == "iii":
        return {s_name: shift0, "b22": _spaced(rng, -2.5, 2.5, 2), "z": z}
    sh = _nonzero(rng)
    return {s_name: shift0 + sh, "b22": _straddle(rng, z2 / sh), "z": z}


def _t41_pair(rng, N, variant):
    """Two ordered equations and a condition meeting one case of the
    comparison statement for different equations."""
    eq1 = random_equation(rng, N)
    f1 = np.array(eq1.f)
    f2 = f1 + rng.uniform(0.0, 0.5, N + 1) * np.abs(f1)
    q1 = np.array(eq1.q)
    q2 = q1 + rng.uniform(0.0, 1.0, N)
    w1 = np.array(eq1.w)
    order = rng.integers(3)
    if order == 0:
        w2 = w1 * rng.uniform(0.5, 1.0, N)
    elif order == 1:
        w2 = w1 * rng.uniform(1.0, 2.0, N)
    else:
        w2 = rng.uniform(0.3, 3.0, N)

    if variant == "i":
        if _edge(rng, 0.4):
            pick = rng.integers(4)
            if pick == 0:
                bc = SeparatedBC(0.0, float(rng.uniform(GAP, math.pi - GAP)))
            elif pick == 1:
                bc = SeparatedBC(0.5 * math.pi, float(rng.uniform(GAP, math.pi - GAP)))
            else:
                kind = "k11_0" if pick == 2 else "k12_0"
                bc = CoupledBC(_gamma(rng), tuple(tuple(r) for r in coupling(rng, f1[0], kind)))
        elif rng.random() < 0.5:
            bc = SeparatedBC(float(rng.uniform(GAP, math.pi - GAP)),
                             float(rng.uniform(GAP, math.pi - GAP)))
        else:
            bc = CoupledBC(_gamma(rng), tuple(tuple(r) for r in coupling(rng, f1[0])))
    elif variant == "ii":
        pick = rng.integers(4)
        if pick == 0:
            bc = SeparatedBC(float(rng.uniform(GAP, math.pi - GAP)),
                             float(rng.uniform(GAP, math.pi - GAP)))
            mu1, mu2 = _mu(bc)
            f1[0] = f2[0] = (-mu1 / mu2).real
        elif pick == 1:
            bc = SeparatedBC(float(rng.uniform(GAP, math.pi - GAP)), math.pi)
        elif pick == 2:
            bc = SeparatedBC(0.5 * math.pi, math.pi)
        else:
            bc = SeparatedBC(0.0, math.pi)
    else:
        alpha = float(rng.uniform(GAP, math.pi - GAP))
        if abs(alpha - 0.5 * math.pi) < GAP:
            return None
        bc = SeparatedBC(alpha, math.pi)
        f1[0] = f2[0] = -math.cos(alpha) / math.sin(alpha)
    if f1[0] == 0.0:
        return None
    eq1 = Equation(N, tuple(map(float, f1)), tuple(map(float, q1)), tuple(map(float, w1)))
    eq2 = Equation(N, tuple(map(float, f2)), tuple(map(float, q2)), tuple(map(float, w2)))
    return eq1, eq2, {"bc": bc}


def _c41_pair(rng, N, variant):
    eq1, eq2, _ = _t41_pair(rng, N, "i")
    z = _z(rng, allow_zero=True)
    b = _spaced(rng, -2.5, 2.5, 2)
    if variant == "ii":
        f1, f2 = list(eq1.f), list(eq2.f)
        f2[0] = f1[0]
        eq2 = Equation(N, tuple(f2), eq2.q, eq2.w)
        a = [1.0 / f1[0]] * 2
    elif _edge(rng):
        a = [0.0, float(rng.uniform(0.0, 2.5))]
    else:
        a = sorted(float(v) for v in rng.uniform(-2.5, 2.5, 2))
    return eq1, eq2, {"a12": a, "b21": b, "z": z}


def _coupled_params(rng, eq, kinds, exclude_real=False):
    kind = kinds[rng.integers(len(kinds))] if _edge(rng, 0.5) else "generic"
    return {"gamma": _gamma(rng, exclude_real), "K": coupling(rng, eq.f[0], kind)}


def _draw(theorem_id, rng, N):
    """One candidate (eq, eq2, params); ``None`` asks for another draw."""
    triple = theorem_id.startswith(("T3.8", "T3.9", "T3.10", "T3.11", "C3.3"))
    eq = random_equation(rng, N, positive_product=triple)
    f0 = eq.f[0]
    tid = theorem_id
    if tid in ("T3.1i", "T3.1ii"):
        return eq, None, _t31_alpha(rng, eq, tid == "T3.1ii")
    if tid in ("T3.1iii", "T3.1iv"):
        return eq, None, _t31_beta(rng, eq, tid == "T3.1iv")
    if tid.startswith("C3.1."):
        return eq, None, _c31(rng, eq, tid.split(".")[-1])
    if tid in ("T3.2i", "T3.2ii"):
        return eq, None, _o14_o24(rng, eq, "O14", tid[4:])
    if tid == "T3.3":
        v = ("i", "ii")[rng.integers(2)]
        return eq, None, {"variant": v, **_o14_o24(rng, eq, "O24", v)}
    if tid.startswith("T3.4"):
        return eq, None, _o23_o13(rng, eq, "O23", tid[4:])
    if tid == "T3.5":
        v = ("i", "ii", "iii", "iv")[rng.integers(4)]
        return eq, None, {"variant": v, **_o23_o13(rng, eq, "O13", v)}
    if tid == "T3.6i":
        return eq, None, _coupled_params(rng, eq, ["k11_0", "c0"])
    if tid == "T3.6ii":
        return eq, None, _coupled_params(rng, eq, ["c0"])
    if tid == "T3.7i":
        return eq, None, _coupled_params(rng, eq, ["k12_0", "c0"])
    if tid == "T3.7ii":
        return eq, None, _coupled_params(rng, eq, ["d0", "c0"])
    if tid == "C3.2":
        return eq, None, {"gamma": _gamma(rng), "K": coupling(rng, f0, "c0")}
    if tid == "C3.3":
        return eq, None, {"K": coupling(rng, f0)}
    if tid.startswith("T3.8"):
        v = tid[4:]
        signs = {"i": (1, 1), "ii": (1, -1), "iii": (1, 0)}
        c_sign, k12_sign = signs[v] if v != "iv" else list(signs.values())[rng.integers(3)]
        K = _signed_coupling(rng, f0, c_sign, k12_sign)
        if v == "iv":
            K = [[-x for x in row] for row in K]
        return eq, None, {"gamma": _gamma(rng, exclude_real=True), "K": K}
    if tid == "T3.9":
        return eq, None, _coupled_params(rng, eq, ["k11_0", "k12_0"], exclude_real=True)
    if tid == "T3.10":
        return eq, None, _coupled_params(rng, eq, ["k11_0"], exclude_real=True)
    if tid == "T3.11":
        return eq, None, _coupled_params(rng, eq, ["d0"], exclude_real=True)
    if tid == "T3.12i":
        return eq, None, _coupled_params(rng, eq, ["k12_0"])
    if tid == "T3.12ii":
        return eq, None, _coupled_params(rng, eq, ["k11_0"])
    if tid.startswith("T4.1"):
        out = _t41_pair(rng, N, tid[4:])
        return (None, None, None) if out is None else out
    if tid.startswith("C4.1"):
        return _c41_pair(rng, N, tid[4:])
    if tid == "L4.2":
        weights = [[float(v) for v in rng.uniform(0.3, 3.0, N)] for _ in range(20)]
        return eq, None, {"bc": random_bc(rng, eq), "weights": weights}
    raise AssertionError(f"no sampler for {theorem_id}")


def generate_instance(theorem_id, seed, size=None):
    """A random :class:`InstanceSpec` meeting the hypotheses of ``theorem_id``.

    The instance is a deterministic function of (id, seed, size).  With
    ``size=None`` the size N is drawn from 2..12.
    """
    get_theorem(theorem_id)
    rng = instance_rng(theorem_id, seed, size)
    N = int(size) if size is not None else int(rng.integers(2, 13))
    for _ in range(MAX_ATTEMPTS):
        eq, eq2, params = _draw(theorem_id, rng, N)
        if params is None:
            continue
        spec = InstanceSpec(theorem_id, eq, params, eq2=eq2, seed=seed, size=N)
        if plan_for(theorem_id, spec) is not None:
            return spec
    raise RuntimeError(f"no instance of {theorem_id} found for N = {N}, seed = {seed}")
