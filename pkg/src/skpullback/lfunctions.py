"""Motivic L-series: Euler factors, Dirichlet coefficients and completed values.

Completed values use the smoothed approximate functional equation

    Lambda(s) = sum_n a(n) F(n; s) + eps * sum_n a(n) F(n; w - s),
    F(n; s)   = (1 / 2 pi i) int_(c) Q^((s+z)/2) gamma(s+z) n^(-s-z) dz / z,

with gamma(s) = prod_j Gamma_C(s + mu_j).  The contour integral is a
trapezoid sum on the vertical line Re z = c; with z = c + i y the nodes are
shared by every n, so each F(n; s) is a polynomial in exp(-i h log t)
evaluated by Horner's rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .numerics import DEFAULT_DPS, DomainError, kronecker, primes_upto
from .qseries import Newform

Poly = list  # [1, c1, c2, ...] meaning 1 + c1 X + c2 X^2 + ... with X = p^{-s}


class ShortfallError(RuntimeError):
    """The requested precision needs more Dirichlet coefficients than allowed."""


class UndeterminedFunctionalEquation(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# symmetric-function helpers


def _power_sums_from_elementary(e: Sequence, K: int) -> list:
    """Newton: power sums p_1..p_K of the roots with elementary symmetric e_1..e_d."""
    d = len(e)
    e = [1] + list(e)
    ps = [0] * (K + 1)
    for k in range(1, K + 1):
        s = (-1) ** (k - 1) * k * e[k] if k <= d else 0
        for i in range(1, min(k - 1, d) + 1):
            s += (-1) ** (i - 1) * e[i] * ps[k - i]
        ps[k] = s
    return ps


def _elementary_from_power_sums(ps: Sequence, d: int) -> list:
    e = [Fraction(1)]
    for k in range(1, d + 1):
        s = Fraction(0)
        for i in range(1, k + 1):
            s += (-1) ** (i - 1) * e[k - i] * ps[i]
        e.append(s / k)
    return e


def _char_poly_from_elementary(e: Sequence) -> Poly:
    """det(1 - A X) from e_0 = 1, e_1, ..., e_d of the eigenvalues of A."""
    out = []
    for k, v in enumerate(e):
        v = Fraction(v)
        if v.denominator != 1:
            raise ArithmeticError("non-integral Euler factor coefficient")
        out.append((-1) ** k * int(v))
    return out


def tensor_euler_factor(e_a: Sequence[int], e_b: Sequence[int]) -> Poly:
    """det(1 - (A tensor B) X) from the elementary symmetric data of A and B."""
    da, db = len(e_a), len(e_b)
    d = da * db
    pa = _power_sums_from_elementary(e_a, d)
    pb = _power_sums_from_elementary(e_b, d)
    pt = [0] + [pa[k] * pb[k] for k in range(1, d + 1)]
    return _char_poly_from_elementary(_elementary_from_power_sums(pt, d), )


def sym2_tensor_euler_factor(p: int, f: Newform, g: Newform) -> Poly:
    """Local factor of L(s, Sym^2(g) x f) at p as a polynomial in X = p^{-s}.

    ``f`` has weight 2 kappa', ``g`` has weight kappa + 1.
    """
    if f.level != g.level:
        raise DomainError("f and g must share the level")
    kappa = g.weight - 1
    af, ag = f.ap(p), g.ap(p)
    if f.level % p == 0:
        c = af * ag * ag
        return [1, -c - c * p, c * c * p]
    e_a = [af, p ** (f.weight - 1)]
    b1 = ag * ag - p**kappa
    e_b = [b1, p**kappa * b1, p ** (3 * kappa)]
    return tensor_euler_factor(e_a, e_b)


def twisted_euler_factor(p: int, f: Newform, D: int) -> Poly:
    chi = kronecker(-D, p)
    a = f.ap(p)
    if f.level % p == 0:
        return [1, -chi * a]
    return [1, -chi * a, chi * chi * p ** (f.weight - 1)]


# ---------------------------------------------------------------------------


@dataclass
class LSeries:
    """Completed L-series Lambda(s) = Q^{s/2} prod_j Gamma_C(s + mu_j) L(s)."""

    label: str
    degree: int
    gamma_shifts: tuple
    weight: int  # Lambda(s) = eps Lambda(w - s)
    euler_factor: Callable[[int], Poly]
    conductor: int = 1
    sign: int = 1
    _coeffs: list = field(default_factory=lambda: [0, 1], repr=False)

    def with_functional_equation(self, sign: int, conductor: int) -> "LSeries":
        return LSeries(self.label, self.degree, self.gamma_shifts, self.weight, self.euler_factor, conductor, sign, self._coeffs)

    def coefficients(self, M: int) -> list[int]:
        if len(self._coeffs) <= M:
            self._coeffs[:] = dirichlet_coefficients(self, M)
        return self._coeffs[: M + 1]

    def gamma_factor(self, s):
        """prod_j Gamma_C(s + mu_j), Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)."""
        out = mpmath.mpf(1)
        for mu in self.gamma_shifts:
            out *= 2 * (2 * mpmath.pi) ** (-(s + mu)) * mpmath.gamma(s + mu)
        return out


def dirichlet_coefficients(L: LSeries, M: int) -> list[int]:
    """a(0..M) (a(0) = 0) from the Euler factors by local inversion and multiplicativity."""
    a = [0] * (M + 1)
    if M >= 1:
        a[1] = 1
    filled = [1]
    for p in primes_upto(M):
        poly = L.euler_factor(p)
        if poly is None:
            raise DomainError(f"missing Euler factor at {p}")
        # local series 1/poly(X) up to X^r with p^r <= M
        r = 0
        pk = 1
        while pk * p <= M:
            pk *= p
            r += 1
        local = [1]
        for k in range(1, r + 1):
            local.append(-sum(poly[i] * local[k - i] for i in range(1, min(k, len(poly) - 1) + 1)))
        new = []
        for n in filled:
            m, k = n * p, 1
            while m <= M:
                a[m] = a[n] * local[k]
                new.append(m)
                m *= p
                k += 1
        filled.extend(new)
    return a


def sym2_tensor_lseries(f: Newform, g: Newform, conductor: int | None = None, sign: int = 1) -> LSeries:
    kappa = g.weight - 1
    kp = f.weight // 2
    return LSeries(
        label=f"Sym2({g.label}) x {f.label}",
        degree=6,
        gamma_shifts=(0, -kappa, -2 * kp + 1),
        weight=2 * kappa + 2 * kp,
        euler_factor=lambda p: sym2_tensor_euler_factor(p, f, g),
        conductor=conductor if conductor is not None else f.level**4,
        sign=sign,
    )


def twisted_lseries(f: Newform, D: int, sign: int = 1) -> LSeries:
    """L(s, f x chi_{-D}) with gamma factor Gamma_C(s) and conductor N D^2."""
    if math.gcd(D, f.level) != 1:
        raise DomainError("twist needs (D, N) = 1")
    return LSeries(
        label=f"{f.label} x chi_-{D}",
        degree=2,
        gamma_shifts=(0,),
        weight=f.weight,
        euler_factor=lambda p: twisted_euler_factor(p, f, D),
        conductor=f.level * D * D,
        sign=sign,
    )


# ---------------------------------------------------------------------------
# smoothed approximate functional equation


@dataclass
class _Kernel:
    """Trapezoid nodes g_k = gamma(s + c + i k h) / (c + i k h), k = 0..K."""

    s: object
    c: object
    h: object
    nodes: list

    def value(self, t):
        """F(t; s) = (1/2 pi i) int gamma(s+z) t^{-s-z} dz / z at t = n / sqrt(Q)."""
        lt = mpmath.log(t)
        w = mpmath.expj(-self.h * lt)
        acc = mpmath.mpc(0)
        for g in reversed(self.nodes[1:]):
            acc = (acc + g) * w
        tot = self.nodes[0] + 2 * acc.real
        return self.h / (2 * mpmath.pi) * mpmath.exp(-(self.s + self.c) * lt) * tot.real

    def values_float(self, t: np.ndarray) -> np.ndarray:
        g = np.array([complex(x) for x in self.nodes])
        K = len(g) - 1
        lt = np.log(t)
        out = np.empty(len(t))
        h = float(self.h)
        step = 2048
        ks = np.arange(1, K + 1)
        for lo in range(0, len(t), step):
            blk = lt[lo : lo + step]
            ph = np.exp(-1j * h * np.outer(blk, ks))
            tot = g[0].real + 2 * (ph @ g[1:]).real
            out[lo : lo + step] = h / (2 * math.pi) * np.exp(-(float(self.s) + float(self.c)) * blk) * tot
        return out


_KERNEL_CACHE: dict = {}


def _kernel(L: LSeries, s, dps: int, c=None) -> _Kernel:
    key = (tuple(L.gamma_shifts), mpmath.mpf(s), dps, c)
    if key in _KERNEL_CACHE:
        return _KERNEL_CACHE[key]
    with mpmath.workdps(dps):
        s = mpmath.mpf(s)
        if c is None:
            # keep the Dirichlet series absolutely convergent on the contour
            c = max(mpmath.mpf(2), mpmath.mpf(L.weight + 1) / 2 - s + mpmath.mpf(3) / 2)
        c = mpmath.mpf(c)
        # trapezoid error ~ exp(-2 pi d / h) with d = c the distance to the pole at z = 0
        h = 2 * mpmath.pi * c / ((dps + 8) * mpmath.log(10))
        nodes = []
        g0 = None
        k = 0
        tol = mpmath.mpf(10) ** (-(dps + 8))
        while True:
            z = mpmath.mpc(c, k * h)
            g = L.gamma_factor(s + z) / z
            nodes.append(g)
            if g0 is None:
                g0 = abs(g)
            elif abs(g) < tol * g0 and k * h > 5:
                break
            k += 1
        ker = _Kernel(s, c, h, nodes)
    _KERNEL_CACHE[key] = ker
    return ker


@dataclass
class LValue:
    value: object  # completed value in the chosen normalization
    error_estimate: float
    terms: int
    conductor: int
    sign: int
    normalization: str


def _log_decay_bound(L: LSeries, ker: _Kernel, t):
    """log of min_{c' >= c} t^{-s-c'} gamma(s+c') / c', a saddle-point size estimate of F(t; s).

    The trapezoid values cannot be used for this: their aliasing floor only
    decays like t^{-s}.
    """
    lt = mpmath.log(t)
    best = None
    cp = ker.c
    step = mpmath.mpf(1) / 2
    while True:
        v = -(ker.s + cp) * lt + mpmath.log(L.gamma_factor(ker.s + cp)) - mpmath.log(cp)
        if best is not None and v > best:
            return best
        best = v if best is None else min(best, v)
        cp += step
        step *= mpmath.mpf(5) / 4


def _cutoff(L: LSeries, kers: Sequence[_Kernel], dps: int, max_terms: int) -> int:
    """Smallest M after which the AFE tail is below 10^-(dps+4) (polynomial coefficient bound)."""
    sq = mpmath.sqrt(L.conductor)
    log_tol = -(dps + 4) * mpmath.log(10)
    expo = mpmath.mpf(L.weight + 1) / 2 + 1
    n = 4
    while True:
        t = n / sq
        lb = max(_log_decay_bound(L, k, t) for k in kers) + expo * mpmath.log(n) + mpmath.log(L.degree)
        if lb < log_tol:
            break
        n = int(n * 1.1) + 1
        if n > max_terms:
            raise ShortfallError(f"{L.label}: needs more than {max_terms} coefficients at {dps} digits")
    return n


def required_terms(L: LSeries, s, dps: int = 30, max_terms: int = 2_000_000, c=None) -> int:
    """Number of Dirichlet coefficients ``evaluate_completed`` will use at (s, dps)."""
    wdps = dps + 10
    with mpmath.workdps(wdps):
        s = mpmath.mpf(s)
        w = mpmath.mpf(L.weight)
        k1 = _kernel(L, s, wdps, c)
        k2 = k1 if s == w - s else _kernel(L, w - s, wdps, c)
        return _cutoff(L, (k1, k2), dps, max_terms)


def evaluate_completed(
    L: LSeries,
    s,
    dps: int = 30,
    normalization: str = "conductor",
    max_terms: int = 2_000_000,
    c=None,
    terms: int | None = None,
) -> LValue:
    """Lambda(s) by the smoothed approximate functional equation.

    ``normalization="conductor"`` returns Q^{s/2} gamma(s) L(s);
    ``"gamma"`` drops the Q^{s/2} factor.  The number of terms is chosen from
    the kernel decay unless ``terms`` is given.
    """
    guard = 10
    wdps = dps + guard
    with mpmath.workdps(wdps):
        s = mpmath.mpf(s)
        w = mpmath.mpf(L.weight)
        k1 = _kernel(L, s, wdps, c)
        k2 = k1 if s == w - s else _kernel(L, w - s, wdps, c)
        # an explicit ``terms`` overrides the automatic cutoff (used to test stability in M)
        M = _cutoff(L, (k1, k2), dps, max_terms) if terms is None else terms
        a = L.coefficients(M)
        sq = mpmath.sqrt(L.conductor)
        if dps <= 13:
            t = np.arange(1, M + 1) / float(sq)
            v1 = k1.values_float(t)
            v2 = v1 if k2 is k1 else k2.values_float(t)
            af = np.array([float(x) for x in a[1 : M + 1]])
            total = mpmath.mpf(float(af @ v1 + L.sign * (af @ v2)))
        else:
            total = mpmath.mpf(0)
            for n in range(1, M + 1):
                if a[n] == 0:
                    continue
                t = n / sq
                v = k1.value(t)
                if k2 is k1:
                    total += a[n] * v * (1 + L.sign)
                else:
                    total += a[n] * (v + L.sign * k2.value(t))
        # aliasing error of the trapezoid rule: each F(n; s) is off by about
        # gamma(s) t^{-s} exp(-2 pi c / h)
        lt = np.log(np.arange(1, M + 1) / float(sq))
        absa = np.array([abs(float(x)) for x in a[1 : M + 1]])
        disc = 0.0
        for k in (k1, k2):
            # gamma(s) itself may sit on a (cancelled) pole; gamma(s + c) is a safe upper scale
            scale = float(abs(k.nodes[0] * k.c) * mpmath.exp(-2 * mpmath.pi * k.c / k.h))
            disc += scale * float(absa @ np.exp(-float(k.s) * lt))
        if dps <= 13:
            rounding = 1e-13 * float(np.abs(af) @ (np.abs(v1) + np.abs(v2)))
        else:
            rounding = 10.0 ** (-(dps + guard - 2)) * float(abs(total))
        err = disc + rounding + 10.0 ** (-(dps + 4))
        if normalization == "gamma":
            scale = mpmath.mpf(L.conductor) ** (-s / 2)
            total *= scale
            err *= float(scale)
        elif normalization != "conductor":
            raise ValueError(f"unknown normalization {normalization!r}")
    with mpmath.workdps(dps):
        return LValue(+total, err, M, L.conductor, L.sign, normalization)


def euler_product_value(L: LSeries, s, dps: int = 30, prime_bound: int | None = None):
    """L(s) from the Euler product, for s in the region of absolute convergence."""
    with mpmath.workdps(dps + 10):
        s = mpmath.mpf(s)
        sigma = s - mpmath.mpf(L.weight - 1) / 2  # decay exponent of |a(p)| p^{-s}
        if sigma <= 1:
            raise DomainError("Euler product does not converge absolutely here")
        if prime_bound is None:
            # tail sum_{p > P} deg p^{-sigma} < 10^-(dps+2)
            prime_bound = int(mpmath.ceil((L.degree * mpmath.mpf(10) ** (dps + 2) / (sigma - 1)) ** (1 / (sigma - 1)))) + 10
            prime_bound = min(prime_bound, 200_000)
        out = mpmath.mpf(1)
        for p in primes_upto(prime_bound):
            X = mpmath.mpf(p) ** (-s)
            poly = L.euler_factor(p)
            out /= mpmath.polyval(list(reversed(poly)), X)
        return out


def completed_from_series(L: LSeries, s, dps: int = 30):
    """Q^{s/2} gamma(s) L(s) with L(s) from the Euler product."""
    with mpmath.workdps(dps + 10):
        v = mpmath.mpf(L.conductor) ** (mpmath.mpf(s) / 2) * L.gamma_factor(mpmath.mpf(s)) * euler_product_value(L, s, dps)
    return v


def weighted_afe(L: LSeries, s, x, dps: int = 12, max_terms: int = 300_000):
    """Lambda(s) from the AFE split at weight x:

        x^{-s} sum a_n F(n / (x sqrt Q); s) + eps x^{w-s} sum a_n F(n x / sqrt Q; w - s).

    Only the true (eps, Q) makes this independent of x; x = 1 is the usual AFE.
    """
    wdps = dps + 10
    with mpmath.workdps(wdps):
        s, x = mpmath.mpf(s), mpmath.mpf(x)
        w = mpmath.mpf(L.weight)
        k1, k2 = _kernel(L, s, wdps), _kernel(L, w - s, wdps)
        M = int(mpmath.ceil(max(x, 1 / x) * _cutoff(L, (k1, k2), dps, max_terms))) + 1
        if M > max_terms:
            raise ShortfallError(f"{L.label}: needs more than {max_terms} coefficients at {dps} digits")
        a = L.coefficients(M)
        sq = mpmath.sqrt(L.conductor)
        if dps <= 13:
            n = np.arange(1, M + 1, dtype=float)
            af = np.array([float(c) for c in a[1 : M + 1]])
            first = af @ k1.values_float(n / float(x * sq))
            second = af @ k2.values_float(n * float(x / sq))
            return x ** (-s) * mpmath.mpf(float(first)) + L.sign * x ** (w - s) * mpmath.mpf(float(second))
        first = second = mpmath.mpf(0)
        for n in range(1, M + 1):
            if a[n]:
                first += a[n] * k1.value(n / (x * sq))
                second += a[n] * k2.value(n * x / sq)
        return x ** (-s) * first + L.sign * x ** (w - s) * second


@dataclass
class FunctionalEquationScan:
    sign: int
    conductor: int
    residual: float
    table: list  # (Q, eps, residual)


def determine_sign_and_conductor(
    L: LSeries,
    candidates: Sequence[int],
    s0=None,
    dps: int = 12,
    threshold: float = 1e-8,
    max_terms: int = 300_000,
) -> FunctionalEquationScan:
    """Pick (eps, Q) from two residuals, keeping the larger.

    The first matches the AFE against the Euler product at s0, where the
    Dirichlet series dominates and Q is only weakly seen.  The second compares
    the AFE split at x = 1 and x = 6/5 at s1 = w/2 + 1/2, close to the centre,
    which is sensitive to both eps and Q.  A candidate whose AFE needs more than
    ``max_terms`` coefficients gets residual inf.
    """
    if not candidates:
        raise ValueError("empty candidate list")
    s0 = mpmath.mpf(L.weight) / 2 + 6 if s0 is None else mpmath.mpf(s0)
    s1 = mpmath.mpf(L.weight) / 2 + mpmath.mpf(1) / 2
    with mpmath.workdps(30):
        series_L = euler_product_value(L, s0, 14)
        gam = L.gamma_factor(s0)
    table = []
    for Q in candidates:
        for eps in (1, -1):
            trial = L.with_functional_equation(eps, Q)
            try:
                v = evaluate_completed(trial, s0, dps=dps, max_terms=max_terms).value
                u1 = weighted_afe(trial, s1, 1, dps, max_terms)
                u2 = weighted_afe(trial, s1, mpmath.mpf(6) / 5, dps, max_terms)
            except ShortfallError:
                table.append((Q, eps, math.inf))
                continue
            ref = mpmath.mpf(Q) ** (s0 / 2) * gam * series_L
            r_series = abs(v - ref) / abs(ref)
            r_split = abs(u1 - u2) / max(abs(u1), abs(u2))
            table.append((Q, eps, float(max(r_series, r_split))))
    Q, eps, res = min(table, key=lambda r: r[2])
    if not res < threshold:
        raise UndeterminedFunctionalEquation(f"{L.label}: best residual {res:.3e} at Q = {Q}, eps = {eps}")
    return FunctionalEquationScan(eps, Q, res, table)
