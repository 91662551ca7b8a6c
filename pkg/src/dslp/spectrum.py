"""Fundamental solutions, the characteristic polynomial, eigenvalue solving
and two verification oracles that never expand polynomial coefficients."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BracketTooSmall,
    DegenerateSturmChain,
    DegreeMismatch,
    IllConditionedSpectrum,
    NonRealRootsDetected,
)
from .polynomial import (
    RealPolynomial,
    RootSet,
    affine_combine,
    isolate_real_roots,
    root_scale,
)
from .problem import (
    CoupledBC,
    RawBC,
    SeparatedBC,
    classify_bc,
    cos_sin,
    eigenvalue_count,
)

#: Trailing coefficients of the characteristic polynomial whose magnitude is
#: below this multiple of their rounding scale are treated as exact zeros.
DEGREE_TOL = 1e-9


@dataclass(frozen=True)
class FundamentalQuadruple:
    """phi_N, psi_N, f_N dphi_N and f_N dpsi_N as polynomials in lambda."""

    phiN: RealPolynomial
    psiN: RealPolynomial
    fDphiN: RealPolynomial
    fDpsiN: RealPolynomial

    def as_tuple(self):
        return (self.phiN, self.psiN, self.fDphiN, self.fDpsiN)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, the rank r, the count k and Gamma."""

    eigenvalues: RootSet
    r: int
    k: int
    gamma_poly: RealPolynomial
    bc: object = None

    def values(self):
        """Eigenvalues lambda_0 <= ... <= lambda_{k-1}, repeated by multiplicity."""
        return self.eigenvalues.expanded()

    def __len__(self):
        return self.k


def _one():
    return RealPolynomial([1.0], zero_tol=0)


@lru_cache(maxsize=4096)
def fundamental_solutions(eq):
    """Propagate phi and psi through the recurrence in polynomial arithmetic."""
    f, q, w = eq.f, eq.q, eq.w
    zero = RealPolynomial((), zero_tol=0)
    phi_prev, phi = _one(), _one()
    psi_prev, psi = zero, RealPolynomial([1.0 / f[0]], zero_tol=0)
    for n in range(1, eq.N + 1):
        a = (f[n - 1] + f[n] + q[n - 1]) / f[n]
        b = -f[n - 1] / f[n]
        d = w[n - 1] / f[n]
        if n == eq.N:
            phiN, psiN = phi, psi
        phi_prev, phi = phi, affine_combine(a, phi, b, phi_prev, shift_times_lambda=d)
        psi_prev, psi = psi, affine_combine(a, psi, b, psi_prev, shift_times_lambda=d)
    fN = f[eq.N]
    return FundamentalQuadruple(
        phiN,
        psiN,
        affine_combine(fN, phi, -fN, phiN),
        affine_combine(fN, psi, -fN, psiN),
    )


def leading_terms(eq):
    """Closed forms of the leading coefficients of the fundamental quadruple."""
    N = eq.N
    P = 1.0
    for i in range(1, N):
        P *= eq.w[i - 1] / eq.f[i]
    s = (-1.0) ** (N - 1)
    wN = eq.w[N - 1]
    f0 = eq.f[0]
    return (s * P, s * P / f0, -s * wN * P, -s * wN * P / f0)


def gamma_coefficients(bc):
    """(constant, c11, c12, c21, c22) of Gamma = const + c11 phi + c12 psi +
    c21 f dphi + c22 f dpsi for a canonical boundary condition."""
    if isinstance(bc, SeparatedBC):
        ca, sa = cos_sin(bc.alpha)
        cb, sb = cos_sin(bc.beta)
        return 0.0, sa * cb, ca * cb, -sa * sb, -ca * sb
    if isinstance(bc, CoupledBC):
        (k11, k12), (k21, k22) = bc.K
        c, _ = cos_sin(bc.gamma)
        return 2.0 * c, -k22, k21, k12, -k11
    raise TypeError(f"not a canonical boundary condition: {bc!r}")


def raw_gamma_coefficients(raw):
    """Complex coefficients of Gamma for an arbitrary representative (A, B)."""
    A, B = raw.representative()
    a11, a12, a21, a22 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    b11, b12, b21, b22 = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    const = (a11 * a22 - a12 * a21) + (b11 * b22 - b12 * b21)
    return (
        const,
        a22 * b11 - a12 * b21,
        a11 * b21 - a21 * b11,
        a22 * b12 - a12 * b22,
        a11 * b22 - a21 * b12,
    )


def _combine(coeffs, quad, tol):
    polys = quad.as_tuple()
    width = max(p.coeffs.size for p in polys)
    mat = np.zeros((4, width))
    for i, p in enumerate(polys):
        mat[i, : p.coeffs.size] = p.coeffs
    c = np.array(coeffs[1:], dtype=float)
    out = c @ mat
    scale = np.abs(c) @ np.abs(mat)
    out[0] += coeffs[0]
    scale[0] += abs(coeffs[0])
    last = width
    while last > 0 and abs(out[last - 1]) <= tol * scale[last - 1]:
        last -= 1
    return RealPolynomial(out[:last], zero_tol=0)


def characteristic_polynomial(eq, bc, degree_tol=DEGREE_TOL):
    """The polynomial Gamma whose zeros are the eigenvalues.

    Canonical conditions use the closed real coefficients.  A
    :class:`RawBC` uses the general determinant formula; its coefficients are
    rotated by the phase of the largest one, which makes them real for any
    self-adjoint representative.  Coefficients that are already real are
    left untouched, so a real representative reproduces the determinant
    formula exactly.
    """
    quad = fundamental_solutions(eq)
    if isinstance(bc, RawBC):
        cc = np.array(raw_gamma_coefficients(bc), dtype=complex)
        if np.max(np.abs(cc.imag)) > 1e-14 * np.max(np.abs(cc)):
            k = int(np.argmax(np.abs(cc)))
            cc = cc * np.exp(-1j * np.angle(cc[k]))
        if np.max(np.abs(cc.imag)) > 1e-8 * np.max(np.abs(cc)):
            raise ValueError("representative gives a non-real characteristic polynomial")
        coeffs = tuple(float(v) for v in cc.real)
    else:
        coeffs = gamma_coefficients(bc)
    return _combine(coeffs, quad, degree_tol)


@lru_cache(maxsize=65536)
def _solve_cached(eq, bc):
    r, k = eigenvalue_count(eq, bc)
    gamma = characteristic_polynomial(eq, bc)
    if gamma.degree != k:
        raise DegreeMismatch(
            f"characteristic polynomial has degree {gamma.degree}, count formula gives {k}"
        )
    coeffs = gamma_coefficients(bc)
    try:
        roots = certify_roots(eq, coeffs, isolate_real_roots(gamma))
    except (IllConditionedSpectrum, NonRealRootsDetected, DegenerateSturmChain):
        roots = certify_roots(eq, coeffs, pointwise_roots(eq, coeffs, gamma))
    return Spectrum(roots, r, k, gamma, bc)


#: Newton polishing must settle to this relative step size.
POLISH_TOL = 1e-9

#: A double root must satisfy |Gamma| <= this multiple of the rounding scale.
DOUBLE_RESIDUAL = 1e-6


def certify_roots(eq, coeffs, roots):
    """Polish the roots of the expanded Gamma against the recurrence.

    The expanded coefficients lose accuracy as N grows, while evaluating the
    recurrence at a point stays accurate.  Simple roots are refined by Newton
    steps on the pointwise Gamma and must stay closer to their starting value
    than to any neighbour; double roots must have a small pointwise residual.
    Raises :class:`IllConditionedSpectrum` when either test fails.
    """
    if not roots.roots:
        return roots
    xs = np.array(roots.values, dtype=float)
    ms = list(roots.multiplicities)
    simple = np.array([m == 1 for m in ms])
    gaps = np.diff(xs)
    reach = np.full(xs.size, np.inf)
    if xs.size > 1:
        reach[:-1] = np.minimum(reach[:-1], 0.5 * gaps)
        reach[1:] = np.minimum(reach[1:], 0.5 * gaps)
    out = xs.copy()
    if simple.any():
        x = xs[simple]
        done = np.zeros(x.shape, dtype=bool)
        for _ in range(30):
            g, _, dg = _pointwise(eq, coeffs, x, with_derivative=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(g == 0, 0.0, g / dg)
            if not np.all(np.isfinite(step)):
                raise IllConditionedSpectrum("zero derivative at a simple root")
            x = np.where(done, x, x - step)
            done |= np.abs(step) <= POLISH_TOL * np.maximum(1.0, np.abs(x))
            if done.all():
                break
        if not done.all():
            raise IllConditionedSpectrum("Newton polishing on the recurrence did not settle")
        moved = np.abs(x - xs[simple])
        if np.any(moved >= reach[simple]):
            raise IllConditionedSpectrum(
                f"a root moved by {float(np.max(moved)):.3g} when checked against the recurrence"
            )
        out[simple] = x
    if (~simple).any():
        g, scale = _pointwise(eq, coeffs, xs[~simple])
        if np.any(np.abs(g) > DOUBLE_RESIDUAL * np.maximum(scale, 1e-300)):
            raise IllConditionedSpectrum("a multiple root fails the pointwise residual test")
    return RootSet(tuple((float(v), int(m)) for v, m in zip(out, ms)))


#: Aberth iteration stops once every correction is below this relative size.
ABERTH_TOL = 1e-14

#: Iteration cap for the Aberth rescue.
ABERTH_ITERS = 500

#: Relative width used to read Aberth approximants as real and to pair them
#: into double roots (a double root is only resolved to about sqrt(eps)).
ABERTH_MERGE = 1e-6


def pointwise_roots(eq, coeffs, gamma):
    """All roots of Gamma by Aberth-Ehrlich iteration on the recurrence.

    Used when the expanded coefficients are too inaccurate for the Sturm
    route.  Only values and derivatives of Gamma at complex points are
    needed, and those come from the recurrence, which stays accurate for
    large N.  The starting circle is taken from a companion-matrix estimate.
    Raises :class:`IllConditionedSpectrum` when the iteration does not settle
    on real roots of multiplicity at most two.
    """
    k = gamma.degree
    if k <= 0:
        return RootSet(())
    guess = np.roots(np.asarray(gamma.coeffs, dtype=float)[::-1])
    centre = float(np.mean(guess.real))
    radius = 1.0 + 1.5 * float(np.max(np.abs(guess - centre)))
    z = centre + radius * np.exp(1j * (2.0 * np.pi * np.arange(k) / k + 0.4))
    for _ in range(ABERTH_ITERS):
        g, _, dg = _pointwise(eq, coeffs, z, with_derivative=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = g / dg
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(g == 0, 0.0, step)
        if not np.all(np.isfinite(step)):
            raise IllConditionedSpectrum("Aberth iteration broke down")
        z = z - step
        if np.all(np.abs(step) <= ABERTH_TOL * np.maximum(1.0, np.abs(z))):
            break
    width = ABERTH_MERGE * np.maximum(1.0, np.abs(z))
    if np.any(np.abs(z.imag) > width):
        raise IllConditionedSpectrum("Aberth iteration left a root off the real axis")
    order = np.argsort(z.real)
    xs, ws = z.real[order], width[order]
    found, i = [], 0
    while i < xs.size:
        j = i + 1
        while j < xs.size and xs[j] - xs[j - 1] <= ws[j]:
            j += 1
        if j - i > 2:
            raise IllConditionedSpectrum("Aberth iteration found a root of multiplicity above two")
        found.append((float(np.mean(xs[i:j])), j - i))
        i = j
    return RootSet(tuple(found))


def solve_spectrum(eq, bc):
    """All eigenvalues of the problem (eq, bc) with multiplicities."""
    return _solve_cached(eq, classify_bc(bc))


def eigenvalues(eq, bc):
    """Eigenvalues lambda_0 <= ... <= lambda_{k-1}, repeated by multiplicity."""
    return solve_spectrum(eq, bc).values()


# ---------------------------------------------------------------------------
# Oracle 1: Dirichlet problem as a symmetric tridiagonal pencil


def _dirichlet_pencil(eq):
    N = eq.N
    f, q, w = eq.f, eq.q, eq.w
    diag = np.array([f[n - 1] + f[n] + q[n - 1] for n in range(1, N)])
    off = np.array([-f[n] for n in range(1, N - 1)])
    mass = np.array(w[: N - 1])
    return diag, off, mass


def _negative_pivots(diag, off, mass, x):
    """Number of eigenvalues of the pencil (T, W) below each entry of ``x``.

    Counts negative pivots of the LDL^T factorisation of T - x W.
    """
    tiny = np.finfo(float).tiny ** 0.5
    d = diag[0] - x * mass[0]
    count = (d < 0).astype(int)
    for i in range(1, diag.size):
        d = np.where(d == 0, tiny, d)
        d = diag[i] - x * mass[i] - off[i - 1] ** 2 / d
        count += d < 0
    return count


def oracle_dirichlet(eq):
    """Dirichlet eigenvalues by Sturm-count bisection on the tridiagonal pencil."""
    diag, off, mass = _dirichlet_pencil(eq)
    m = diag.size
    sw = np.sqrt(mass)
    radius = np.zeros(m)
    if m > 1:
        scaled = np.abs(off) / (sw[:-1] * sw[1:])
        radius[:-1] += scaled
        radius[1:] += scaled
    centre = diag / mass
    lo = float(np.min(centre - radius)) - 1.0
    hi = float(np.max(centre + radius)) + 1.0
    lo_k = np.full(m, lo)
    hi_k = np.full(m, hi)
    idx = np.arange(m)
    for _ in range(200):
        mid = 0.5 * (lo_k + hi_k)
        below = _negative_pivots(diag, off, mass, mid)
        # eigenvalue idx lies below mid iff more than idx eigenvalues are below
        left = below > idx
        hi_k = np.where(left, mid, hi_k)
        lo_k = np.where(left, lo_k, mid)
        if np.all(hi_k - lo_k <= 2 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
            break
    return sorted(float(v) for v in 0.5 * (lo_k + hi_k))


# ---------------------------------------------------------------------------
# Oracle 2: pointwise evaluation of Gamma on a refining grid


def _pointwise(eq, coeffs, lam, with_derivative=False):
    """Gamma(lam) and a rounding scale (and optionally Gamma'(lam)) from the
    recurrence run numerically at each sample."""
    f, q, w = eq.f, eq.q, eq.w
    lam = np.asarray(lam)
    lam = lam.astype(complex if np.iscomplexobj(lam) else float)
    one = np.ones_like(lam)
    zero = np.zeros_like(lam)
    phi_prev, phi = one, one.copy()
    psi_prev, psi = zero, one / f[0]
    dphi_prev, dphi, dpsi_prev, dpsi = zero, zero, zero, zero
    for n in range(1, eq.N + 1):
        a = (f[n - 1] + f[n] + q[n - 1] - lam * w[n - 1]) / f[n]
        b = -f[n - 1] / f[n]
        if n == eq.N:
            phiN, psiN, dphiN, dpsiN = phi, psi, dphi, dpsi
        if with_derivative:
            dphi_prev, dphi = dphi, a * dphi + b * dphi_prev - (w[n - 1] / f[n]) * phi
            dpsi_prev, dpsi = dpsi, a * dpsi + b * dpsi_prev - (w[n - 1] / f[n]) * psi
        phi_prev, phi = phi, a * phi + b * phi_prev
        psi_prev, psi = psi, a * psi + b * psi_prev
    fN = f[eq.N]
    vals = (phiN, psiN, fN * (phi - phiN), fN * (psi - psiN))
    const, c = coeffs[0], coeffs[1:]
    g = const + sum(ci * v for ci, v in zip(c, vals))
    scale = abs(const) + sum(abs(ci) * np.abs(v) for ci, v in zip(c, vals))
    if not with_derivative:
        return g, scale
    dvals = (dphiN, dpsiN, fN * (dphi - dphiN), fN * (dpsi - dpsiN))
    dg = sum(ci * v for ci, v in zip(c, dvals))
    return g, scale, dg


def _bisect_sign(func, lo, hi, iters=200):
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    flo = np.sign(func(lo))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = np.sign(func(mid))
        same = fm == flo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        if np.all(hi - lo <= 2 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


def _golden_min(func, a, b, iters=80):
    g = 0.5 * (math.sqrt(5.0) - 1.0)
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = func(d)
    return 0.5 * (a + b)


def default_bracket(eq, bc):
    """Symmetric bracket from the Gamma root bound, inflated by a factor two."""
    gamma = characteristic_polynomial(eq, classify_bc(bc))
    if gamma.degree <= 0:
        return (-1.0, 1.0)
    c = np.asarray(gamma.coeffs)
    bound = 2.0 * root_scale(c)
    return (-bound, bound)


def oracle_pencil_scan(eq, bc, bracket=None, double_tol=1e-8):
    """Eigenvalues from sign changes of pointwise Gamma values on a grid.

    Grid minima of |Gamma| without a sign change whose value is below
    ``double_tol`` times the local scale are reported as double roots.
    Returns the eigenvalues sorted and repeated by multiplicity.
    """
    bc = classify_bc(bc)
    coeffs = gamma_coefficients(bc)
    _, k = eigenvalue_count(eq, bc)
    if bracket is None:
        bracket = default_bracket(eq, bc)
    lo, hi = float(bracket[0]), float(bracket[1])

    def g(x):
        return _pointwise(eq, coeffs, x)[0]

    def dg(x):
        return _pointwise(eq, coeffs, x, with_derivative=True)[2]

    found = []
    m = 2048
    while m <= 2 ** 19:
        xs = np.linspace(lo, hi, m + 1)
        vals, _ = _pointwise(eq, coeffs, xs)
        roots = []
        exact = np.nonzero(vals == 0)[0]
        s = np.sign(vals)
        change = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if change.size:
            roots.extend((float(x), 1) for x in _bisect_sign(g, xs[change], xs[change + 1]))
        for i in exact:
            left = s[i - 1] if i > 0 else 0.0
            right = s[i + 1] if i < m else 0.0
            roots.append((float(xs[i]), 2 if left * right > 0 else 1))
        av = np.abs(vals)
        interior = np.arange(1, m)
        minima = interior[
            (vals[interior] != 0)
            & (av[interior] <= av[interior - 1])
            & (av[interior] <= av[interior + 1])
            & (s[interior - 1] == s[interior])
            & (s[interior + 1] == s[interior])
        ]
        for i in minima:
            a, b = xs[i - 1], xs[i + 1]
            fine = np.linspace(a, b, 65)
            fv = g(fine)
            fs = np.sign(fv)
            ch = np.nonzero(fs[:-1] * fs[1:] < 0)[0]
            if ch.size:
                roots.extend((float(x), 1) for x in _bisect_sign(g, fine[ch], fine[ch + 1]))
                continue
            x = _golden_min(lambda t: abs(float(g(np.array([t]))[0])), a, b)
            val, scale = _pointwise(eq, coeffs, np.array([x]))
            if abs(val[0]) > double_tol * max(scale[0], 1e-300):
                continue
            da, db = dg(np.array([a]))[0], dg(np.array([b]))[0]
            if da * db < 0:
                x = float(_bisect_sign(dg, [a], [b])[0])
            roots.append((x, 2))
        roots.sort()
        total = sum(mu for _, mu in roots)
        found = roots
        if total == k:
            break
        m *= 2
    total = sum(mu for _, mu in found)
    if total != k:
        raise BracketTooSmall(f"scan found {total} eigenvalues, expected {k}")
    out = []
    for x, mu in found:
        out.extend([x] * mu)
    return sorted(out)
