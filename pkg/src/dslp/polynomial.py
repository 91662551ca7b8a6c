"""Dense real polynomials and guaranteed real-root isolation via Sturm chains.

Coefficients are stored lowest degree first: ``coeffs[i]`` multiplies
``lam**i``.  The zero polynomial has an empty coefficient array and degree -1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSturmChain, NonRealRootsDetected

_EPS = float(np.finfo(float).eps)

#: Default relative threshold used when trimming trailing coefficients.
DEFAULT_ZERO_TOL = 1e-12

#: Default relative clustering tolerance for roots.
DEFAULT_CLUSTER_TOL = 1e-9

# A remainder in the Sturm chain whose coefficients all fall below this
# multiple of the division's working scale is treated as identically zero.
_CHAIN_ZERO = 1e-10

# A critical point x of p counts as a double root when |p(x)| is below this
# multiple of sum |c_i| |x|^i (a coalesced pair perturbed off the real axis).
_NEAR_DOUBLE = 1e-8

# Relative imaginary part up to which a companion-matrix eigenvalue is
# still read as real (a double root splits by about sqrt(eps)).
_COMPANION_IMAG = 1e-6

# Derivative test used to promote a multiplicity by two.
_DERIV_ZERO = 1e-6

# Irrational offset for subdivision points, so grid points do not land on
# the small integers that eigenvalues of model problems like to sit on.
_SPLIT = (np.arange(1, 8) + 0.3819660112501051 * 0.137) / 8.0


class RealPolynomial:
    """Immutable dense polynomial with real coefficients.

    Trailing coefficients whose magnitude does not exceed
    ``zero_tol * max|c|`` are trimmed on construction.  ``zero_tol=0``
    trims exact zeros only, which is what internal constructions use when the
    degree is known structurally.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=(), zero_tol=DEFAULT_ZERO_TOL):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size and not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        if c.size:
            thr = zero_tol * float(np.max(np.abs(c))) if zero_tol else 0.0
            keep = np.nonzero(np.abs(c) > thr)[0]
            c = c[: keep[-1] + 1] if keep.size else c[:0]
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        return self._c.size - 1

    @property
    def leading(self):
        return float(self._c[-1]) if self._c.size else 0.0

    def is_zero(self):
        return self._c.size == 0

    def derivative(self):
        if self._c.size <= 1:
            return RealPolynomial(())
        return RealPolynomial(self._c[1:] * np.arange(1, self._c.size), zero_tol=0)

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, RealPolynomial):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"RealPolynomial({self._c.tolist()!r})"


@dataclass(frozen=True)
class RootSet:
    """Sorted distinct real roots with their multiplicities."""

    roots: tuple = ()

    @property
    def values(self):
        return [v for v, _ in self.roots]

    @property
    def multiplicities(self):
        return [m for _, m in self.roots]

    @property
    def total_multiplicity(self):
        return sum(m for _, m in self.roots)

    def expanded(self):
        """Roots repeated according to multiplicity, ascending."""
        out = []
        for v, m in self.roots:
            out.extend([v] * m)
        return out

    def __len__(self):
        return len(self.roots)


def evaluate(p, x):
    """Horner evaluation of ``p`` at a scalar or array ``x``."""
    c = p.coeffs if isinstance(p, RealPolynomial) else np.asarray(p, dtype=float)
    if isinstance(x, np.ndarray):
        acc = np.zeros_like(x, dtype=float)
        for a in c[::-1]:
            acc = acc * x + a
        return acc
    acc = 0.0
    for a in c[::-1]:
        acc = acc * x + float(a)
    return acc


def affine_combine(a, p, b, q, shift_times_lambda=None):
    """Return ``(a - d*lam)*p + b*q`` where ``d = shift_times_lambda`` (default 0).

    Trailing coefficients that cancel down to rounding noise are removed, so
    exact algebraic cancellation produces an exact degree drop.
    """
    pc, qc = p.coeffs, q.coeffs
    d = 0.0 if shift_times_lambda is None else float(shift_times_lambda)
    n = max(pc.size + (1 if d != 0.0 and pc.size else 0), qc.size)
    res = np.zeros(n)
    mag = np.zeros(n)
    res[: pc.size] += a * pc
    mag[: pc.size] += abs(a * pc)
    res[: qc.size] += b * qc
    mag[: qc.size] += abs(b * qc)
    if d != 0.0 and pc.size:
        res[1 : pc.size + 1] -= d * pc
        mag[1 : pc.size + 1] += abs(d * pc)
    last = n
    while last > 0 and abs(res[last - 1]) <= 16 * _EPS * mag[last - 1]:
        last -= 1
    return RealPolynomial(res[:last], zero_tol=0)


# ---------------------------------------------------------------------------
# Sturm chain machinery.  All of it works on the scaled variable mu = lam/rho
# with coefficients normalised to unit max-norm.


class _ChainInconsistent(Exception):
    pass


def _trim_rel(c, thr):
    k = len(c)
    while k > 0 and abs(c[k - 1]) <= thr:
        k -= 1
    return c[:k]


def _sturm_chain(c):
    """Sturm chain of the polynomial with lowest-first coefficients ``c``.

    Each member is normalised to unit max-norm.  The chain stops when a
    remainder vanishes to working precision; the last member is then an
    approximate greatest common divisor, which leaves distinct-root counts
    intact.
    """
    n = len(c) - 1
    p0 = [float(v) for v in c]
    p1 = [i * p0[i] for i in range(1, n + 1)]
    chain = [p0]
    s = max(abs(v) for v in p1)
    chain.append([v / s for v in p1])
    while len(chain[-1]) > 1:
        u = list(chain[-2])
        v = chain[-1]
        dv = len(v) - 1
        lv = v[-1]
        qmax = 0.0
        for k in range(len(u) - dv - 1, -1, -1):
            t = u[k + dv] / lv
            qmax = max(qmax, abs(t))
            for j in range(dv + 1):
                u[k + j] -= t * v[j]
        rem = u[:dv]
        scale = max(abs(x) for x in chain[-2]) + qmax * max(abs(x) for x in v)
        rem = _trim_rel(rem, _CHAIN_ZERO * scale)
        if not rem:
            break
        m = max(abs(x) for x in rem)
        chain.append([-x / m for x in rem])
    return chain


class _Chain:
    """Sturm chain packed as a matrix for vectorised evaluation."""

    def __init__(self, c):
        members = _sturm_chain(c)
        d = len(members[0])
        mat = np.zeros((len(members), d))
        for i, m in enumerate(members):
            mat[i, : len(m)] = m
        self.mat = mat
        self.deg = d - 1

    def variations(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.zeros((self.mat.shape[0],) + x.shape)
        shape = (self.mat.shape[0],) + (1,) * x.ndim
        for i in range(self.deg, -1, -1):
            vals = vals * x + self.mat[:, i].reshape(shape)
        if not np.all(np.isfinite(vals)):
            raise _ChainInconsistent("non-finite chain value")
        s = np.sign(vals)
        # forward-fill zeros with the previous nonzero sign so they never
        # contribute a variation
        for i in range(1, s.shape[0]):
            s[i] = np.where(s[i] == 0, s[i - 1], s[i])
        changes = (s[1:] * s[:-1]) < 0
        return changes.sum(axis=0)


def _horner2(c, x):
    """Value and first derivative of the polynomial ``c`` at array ``x``."""
    v = np.zeros_like(x)
    dv = np.zeros_like(x)
    for a in c[::-1]:
        dv = dv * x + v
        v = v * x + a
    return v, dv


def _scale_of(c, x):
    """sum |c_i| |x|^i, the natural rounding scale of a Horner evaluation."""
    return evaluate(np.abs(c), np.abs(x))


def _newton_bisect(c, lo, hi):
    """Vectorised safeguarded Newton for simple sign-changing brackets."""
    lo = lo.copy()
    hi = hi.copy()
    flo = np.sign(evaluate(c, lo))
    x = 0.5 * (lo + hi)
    done = np.zeros(x.shape, dtype=bool)
    prev = np.full(x.shape, np.inf)
    for _ in range(200):
        v, dv = _horner2(c, x)
        s = np.sign(v)
        done |= s == 0
        same = s == flo
        lo = np.where(same & ~done, x, lo)
        hi = np.where(~same & ~done, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - v / dv
        floor = 4 * _EPS * np.maximum(np.abs(x), 1e-6)
        done |= np.abs(xn - x) <= floor
        mid = 0.5 * (lo + hi)
        ok = np.isfinite(xn) & (xn > lo) & (xn < hi) & (np.abs(xn - x) < 0.5 * (hi - lo))
        xn = np.where(ok, xn, mid)
        step = np.abs(xn - x)
        # stop at resolution, or once Newton steps stop shrinking at noise level
        stalled = ok & (step >= 0.5 * prev) & (step <= 1e-9 * np.maximum(np.abs(x), 1e-6))
        done |= (hi - lo <= floor) | (step <= floor) | stalled
        prev = np.where(ok, step, np.inf)
        x = np.where(done, x, xn)
        if done.all():
            break
    return x


def _polish_critical(c, lo, hi):
    """Locate a root of p' inside [lo, hi] (scalar), used for even roots."""
    dc = c[1:] * np.arange(1, len(c))
    a, b = np.array([lo]), np.array([hi])
    if evaluate(dc, a)[0] * evaluate(dc, b)[0] < 0:
        return float(_newton_bisect(dc, a, b)[0])
    xs = np.linspace(lo, hi, 65)
    return float(xs[np.argmin(np.abs(evaluate(c, xs)))])


def _multiplicity(c, x, base):
    """Promote a parity-based multiplicity ``base`` by twos while the next two
    derivatives also vanish at ``x`` to working precision."""
    n = len(c) - 1
    m = base
    derivs = [np.asarray(c, dtype=float)]
    for _ in range(n):
        d = derivs[-1]
        derivs.append(d[1:] * np.arange(1, len(d)))

    def vanishes(k):
        d = derivs[k]
        if len(d) == 0:
            return False
        return abs(evaluate(d, x)) <= _DERIV_ZERO * max(_scale_of(d, x), 1e-300)

    while m + 2 <= n and vanishes(m) and vanishes(m + 1):
        m += 2
    return m


def _real_roots_scaled(ct, cluster_tol_mu, allow_deficit):
    """Roots of the balanced polynomial ``ct`` (lowest first, degree >= 1).

    Returns a list of (mu, multiplicity).  ``cluster_tol_mu(x)`` is the
    absolute clustering width at location ``x``.
    """
    n = len(ct) - 1
    chain = _Chain(ct)
    bound = 1.0 + float(np.max(np.abs(ct[:n]))) / abs(ct[n])
    v_lo, v_hi = chain.variations(np.array([-bound, bound]))
    total = int(v_lo - v_hi)
    if total < 0 or total > n:
        raise _ChainInconsistent("total count out of range")

    isolated, clusters = [], []
    pending = [(-bound, bound, total)] if total else []
    while pending:
        lo = np.array([iv[0] for iv in pending])
        hi = np.array([iv[1] for iv in pending])
        cnt = np.array([iv[2] for iv in pending])
        if all(k == 1 for k in cnt):
            isolated.extend(pending)
            break
        pts = lo[:, None] + (hi - lo)[:, None] * _SPLIT[None, :]
        grid = np.concatenate([lo[:, None], pts, hi[:, None]], axis=1)
        var = chain.variations(grid)
        sub = var[:, :-1] - var[:, 1:]
        if np.any(sub < 0) or np.any(sub.sum(axis=1) != cnt):
            raise _ChainInconsistent("subinterval counts do not add up")
        nxt = []
        for i in range(len(pending)):
            if cnt[i] == 1:
                isolated.append(pending[i])
                continue
            for j in range(8):
                k = int(sub[i, j])
                if k == 0:
                    continue
                a, b = float(grid[i, j]), float(grid[i, j + 1])
                if k == 1:
                    isolated.append((a, b, 1))
                elif b - a <= cluster_tol_mu(max(abs(a), abs(b))):
                    clusters.append((a, b, k))
                else:
                    nxt.append((a, b, k))
        pending = nxt

    found = []
    if isolated:
        lo = np.array([iv[0] for iv in isolated])
        hi = np.array([iv[1] for iv in isolated])
        plo = np.sign(evaluate(ct, lo))
        phi = np.sign(evaluate(ct, hi))
        odd = plo * phi < 0
        if odd.any():
            xs = _newton_bisect(ct, lo[odd], hi[odd])
            for x in xs:
                found.append((float(x), _multiplicity(ct, float(x), 1)))
        for a, b in zip(lo[~odd], hi[~odd]):
            found.append(_even_root(ct, chain, float(a), float(b)))
        if sum(m for _, m in found) + sum(k for _, _, k in clusters) > n:
            found = _limit_promotions(ct, found, n - sum(k for _, _, k in clusters))
    for a, b, k in clusters:
        x = 0.5 * (a + b)
        odd = evaluate(ct, a) * evaluate(ct, b) < 0
        m = k + (1 if (k % 2 == 1) != odd else 0)
        found.append((x, m))
    found.sort()
    merged = []
    for x, m in found:
        if merged and abs(x - merged[-1][0]) <= cluster_tol_mu(abs(x)):
            px, pm = merged[-1]
            merged[-1] = ((px * pm + x * m) / (pm + m), pm + m)
        else:
            merged.append((x, m))

    mult = sum(m for _, m in merged)
    if mult < n and not allow_deficit:
        merged = _add_near_doubles(ct, merged, cluster_tol_mu)
        mult = sum(m for _, m in merged)
    if mult > n:
        raise _ChainInconsistent("more roots than the degree")
    if mult < n and not allow_deficit:
        raise NonRealRootsDetected(
            f"found real roots of total multiplicity {mult} for degree {n}"
        )
    return merged


def _limit_promotions(ct, found, budget):
    """Undo multiplicity promotions that would exceed the degree.

    Each root falls back to its parity multiplicity (1 or 2); promotions are
    then re-applied, strongest derivative evidence first, while they fit in
    ``budget``.
    """
    base = [(x, 2 - m % 2) for x, m in found]
    extra = sorted(
        ((abs(evaluate(ct[1:] * np.arange(1, len(ct)), x)) / max(_scale_of(ct, x), 1e-300), i)
         for i, (x, m) in enumerate(found) if m > 2 - m % 2),
    )
    room = budget - sum(m for _, m in base)
    out = list(base)
    for _, i in extra:
        gain = found[i][1] - base[i][1]
        if gain <= room:
            out[i] = found[i]
            room -= gain
    return out


def _even_root(ct, chain, a, b):
    """Refine an isolating interval whose end signs agree (even multiplicity)."""
    target = 1e-6 * max(1.0, abs(a), abs(b))
    for _ in range(80):
        if b - a <= target:
            break
        m = 0.5 * (a + b) + (b - a) * 1e-3 * 0.6180339887
        va, vm, vb = chain.variations(np.array([a, m, b]))
        if va - vm >= 1:
            b = m
        elif vm - vb >= 1:
            a = m
        else:
            raise _ChainInconsistent("lost root during Sturm bisection")
    x = _polish_critical(ct, a, b)
    return (x, _multiplicity(ct, x, 2))


def _add_near_doubles(ct, roots, cluster_tol_mu):
    """Recover double roots that rounding pushed off the real axis."""
    dc = ct[1:] * np.arange(1, len(ct))
    dc = dc / np.max(np.abs(dc))
    if len(dc) < 2:
        return roots
    crit = _real_roots_scaled(dc, cluster_tol_mu, allow_deficit=True)
    out = list(roots)
    need = len(ct) - 1 - sum(m for _, m in roots)
    for x, _ in crit:
        if need < 2:
            break
        if any(abs(x - r) <= max(cluster_tol_mu(abs(x)), 1e-7 * max(1.0, abs(x))) for r, _ in out):
            continue
        if abs(evaluate(ct, x)) <= _NEAR_DOUBLE * _scale_of(ct, x):
            out.append((x, 2))
            need -= 2
    out.sort()
    return out


def root_scale(c):
    """Power of two close to the Fujiwara bound on the root moduli."""
    c = np.asarray(c, dtype=float)
    n = len(c) - 1
    lead = abs(c[n])
    best = 0.0
    for k in range(1, n + 1):
        a = abs(c[n - k])
        if a:
            best = max(best, (a / lead) ** (1.0 / k))
    if best == 0.0:
        return 1.0
    return 2.0 ** round(math.log2(2.0 * best))


def isolate_real_roots(p, cluster_tol=DEFAULT_CLUSTER_TOL):
    """Isolate and refine every real root of ``p``.

    Roots closer than ``cluster_tol * max(1, |root|)`` are merged.  Raises
    :class:`NonRealRootsDetected` when the real roots found fall short of the
    degree, and :class:`DegenerateSturmChain` when the chain stays
    inconsistent after one perturbed retry.
    """
    if not isinstance(p, RealPolynomial):
        p = RealPolynomial(p)
    c = np.array(p.coeffs, dtype=float)
    if c.size <= 1:
        return RootSet(())
    zeros = 0
    while c[zeros] == 0.0:
        zeros += 1
    c = c[zeros:]
    found = []
    if c.size > 1:
        found = _roots_with_retry(c, cluster_tol)
    if zeros:
        hit = [i for i, (x, _) in enumerate(found) if abs(x) <= cluster_tol]
        if hit:
            i = hit[0]
            found[i] = (0.0, found[i][1] + zeros)
        else:
            found.append((0.0, zeros))
        found.sort()
    return RootSet(tuple((float(x), int(m)) for x, m in found))


def _roots_with_retry(c, cluster_tol):
    rho = root_scale(c)
    powers = rho ** np.arange(c.size)
    ct = c * powers
    ct = ct / np.max(np.abs(ct))

    def tol_mu(x):
        return cluster_tol * max(1.0, abs(x) * rho) / rho

    try:
        roots = _real_roots_scaled(ct, tol_mu, allow_deficit=False)
    except NonRealRootsDetected:
        fallback = _companion_roots(c)
        if fallback is None:
            raise
        return fallback
    except _ChainInconsistent:
        rng = np.random.default_rng(12345)
        bumped = ct * (1.0 + 1e-13 * rng.standard_normal(ct.size))
        try:
            roots = _real_roots_scaled(bumped, tol_mu, allow_deficit=False)
        except _ChainInconsistent as exc:
            raise DegenerateSturmChain(str(exc)) from exc
    return [(x * rho, m) for x, m in roots]


def _companion_roots(c):
    """Real roots from the eigenvalues of the companion matrix.

    Used when the balanced Sturm chain comes up short, which happens when
    root moduli span so many decades that the small roots drown in the
    scaled coefficients.  Returns ``None`` unless every eigenvalue is real
    up to rounding; conjugate pairs that are nearly real are read as double
    roots.  Simple roots are polished by Newton steps on ``c`` itself.
    """
    z = np.roots(np.asarray(c, dtype=float)[::-1])
    width = _COMPANION_IMAG * np.maximum(1.0, np.abs(z))
    if np.any(np.abs(z.imag) > width):
        return None
    pairs = z[z.imag > 0].real
    simple = np.sort(z[z.imag == 0].real)
    out = []
    for x in simple:
        for _ in range(8):
            v, dv = _horner2(c, np.array([x]))
            if dv[0] == 0.0:
                break
            step = v[0] / dv[0]
            if not math.isfinite(step) or abs(step) > 1e-6 * max(1.0, abs(x)):
                break
            x -= step
            if abs(step) <= 4 * _EPS * max(1.0, abs(x)):
                break
        out.append((float(x), 1))
    out.extend((float(x), 2) for x in pairs)
    out.sort()
    return out


def sturm_count(p, a, b):
    """Number of distinct real roots of ``p`` in the half-open interval (a, b]."""
    if not isinstance(p, RealPolynomial):
        p = RealPolynomial(p)
    if p.degree <= 0:
        return 0
    chain = _Chain(np.asarray(p.coeffs, dtype=float))
    va, vb = chain.variations(np.array([float(a), float(b)]))
    return int(va - vb)
