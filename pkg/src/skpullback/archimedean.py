"""Archimedean constants C_inf(kappa, kappa') and C(kappa, kappa'), the local zeta
integral Z_inf(s), I(Pi_inf), the Hermite-Bessel integral J(m, n; r) and the
Rankin-Selberg (Ghate) sum.

C_inf is rational.  Besides the literal triple sum (``c_infty_direct``) the
module evaluates it through an algebraically equivalent O(m^2) form
(``c_infty``):

* the i-sum is a terminating 3F2 at 1; after partial fractions in n the inner
  sum becomes a Chu-Vandermonde 2F1 and collapses;
* what is left of the n-sum is H(c) = sum_n C(2k, n) (k+n)! (3k-n)! / (c + n),
  which satisfies the first-order recurrence

      (2k+c+1)(k-c) H(c+1) = (2k+1) H_0 - c(3k+1+c) H(c),   H_0 = sum_n C(2k,n)(k+n)!(3k-n)!,

  obtained by telescoping n(3k+1-n) w_n against (2k-n)(k+n+1) w_n.

Then, with L = 2m - j and x = 2k + 2k' + 2j + r,

    S = 2 Gamma(2k+1/2) sum_j (-1)^j C(2m,j) Gamma(k+k'+j) / (Gamma(2k'+j) Gamma(k+k'+j+1/2))
          * sum_{r=0}^{L} C(L, r) H(k'+j+r) / (x)_{L+1}

and C_inf = 2^{4m} Gamma(2k) / (Gamma(4k) Gamma(k')^2 Gamma(2m+1)) * S.
The inner loop runs on integers only (every H(c) is an integer because c <= k).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import gmpy2
import mpmath

from .numerics import DEFAULT_DPS, DomainError, gamma_ratio_exact, half_gamma_exact, hermite, hypergeom_pfq


def _check(kappa: int, kappa_prime: int) -> int:
    if kappa_prime < 1 or kappa < kappa_prime or (kappa - kappa_prime) % 2:
        raise DomainError("need kappa >= kappa' >= 1 with kappa - kappa' even")
    return (kappa - kappa_prime) // 2


def c_infty_direct(kappa: int, kappa_prime: int) -> Fraction:
    """The defining triple sum over (j, n, i), term by term in exact rationals."""
    m = _check(kappa, kappa_prime)
    k, kp = kappa, kappa_prime
    G = lambda x: factorial(x - 1)
    total = Fraction(0)
    for j in range(2 * m + 1):
        b = Fraction(2 * (k + kp + j) + 1, 2)  # k + k' + j + 1/2
        for n in range(2 * k + 1):
            outer = Fraction(
                comb(2 * m, j) * comb(2 * k, n) * G(k + 1 + n) * G(3 * k + 1 - n) * G(kp + j + n) * G(k + kp + j),
                G(2 * kp + j) * (2 * k + kp + j - n),
            )
            A = 2 * k + kp + j - n + 1
            C = kp + j + n + 1
            for i in range(2 * m - j + 1):
                t = (
                    Fraction(G(A), G(A + i) * G(C + i))
                    * gamma_ratio_exact(b + i, b)
                    * Fraction(G(2 * m - j + 1), G(2 * m - j + 1 - i))
                )
                total += (-1) ** (i + j) * outer * t
    return Fraction(2 ** (4 * m) * G(2 * k), G(4 * k) * G(kp) ** 2 * G(2 * m + 1)) * total


def _h_values(k: int, c_lo: int) -> dict[int, gmpy2.mpz]:
    """H(c) for c_lo <= c <= k, by one direct sum and the recurrence."""
    fac = gmpy2.fac
    K2 = 2 * k
    # w_n / (2k)! = (n+1)_k (2k-n+1)_k; the common (2k)! is restored by the caller
    w = [fac(k + n) // fac(n) * (fac(3 * k - n) // fac(K2 - n)) for n in range(K2 + 1)]
    h0 = sum(w)
    H = {c_lo: sum(gmpy2.divexact(w[n], c_lo + n) for n in range(K2 + 1))}
    for c in range(c_lo, k):
        H[c + 1] = gmpy2.divexact((K2 + 1) * h0 - c * (3 * k + 1 + c) * H[c], (K2 + c + 1) * (k - c))
    return H


def c_infty(kappa: int, kappa_prime: int) -> Fraction:
    """C_inf(kappa, kappa') exactly, via the collapsed O(m^2) form."""
    m = _check(kappa, kappa_prime)
    k, kp = kappa, kappa_prime
    fac, divexact = gmpy2.fac, gmpy2.divexact
    H = _h_values(k, kp)
    g = gmpy2.mpz(0)
    for v in H.values():
        g = gmpy2.gcd(g, v)
    H = {c: divexact(v, g) for c, v in H.items()}
    # Sum over j with the common denominator (4k)! / (2k+2k'-1)! * 2^{2m}
    T = gmpy2.mpz(0)
    for j in range(2 * m + 1):
        L = 2 * m - j
        x0 = 2 * (k + kp + j)
        # E_r = C(L, r) (x0)_r (x0+r+L+1)_{L-r}, so E_r / (x0)_{2L+1} = C(L, r) / (x0+r)_{L+1}
        E = fac(x0 + 2 * L) // fac(x0 + L)
        acc = gmpy2.mpz(0)
        for r in range(L + 1):
            acc += E * H[kp + j + r]
            if r < L:
                E = divexact(E * (L - r) * (x0 + r), (r + 1) * (x0 + r + L + 1))
        a = k + kp + j
        # Gamma(2k+1/2)/Gamma(a+1/2) = prod_{t<L} (2(a+t)+1) / 2^L
        odd = fac(2 * (a + L)) // fac(2 * a) // (fac(a + L) // fac(a)) // 2**L
        term = comb(2 * m, j) * (fac(a - 1) // fac(2 * kp + j - 1)) * odd * acc
        term *= fac(2 * k + 2 * kp + 2 * j - 1) // fac(2 * k + 2 * kp - 1) * 2**j
        T += -term if j & 1 else term
    den = fac(4 * k) // fac(2 * k + 2 * kp - 1) * 2 ** (2 * m)
    num = 2 ** (4 * m) * fac(2 * k - 1) * fac(2 * k) * 2 * T * g
    return Fraction(int(num), int(fac(4 * k - 1) * fac(kp - 1) ** 2 * fac(2 * m) * den))


def gamma_correction(kappa: int, kappa_prime: int) -> Fraction:
    """(Gamma(k-2m) Gamma(m+1) / (Gamma(k-m) Gamma(2m+1)))^2."""
    m = _check(kappa, kappa_prime)
    if kappa <= 2 * m:
        raise DomainError("Gamma(kappa - 2m) has a pole")
    r = Fraction(factorial(kappa - 2 * m - 1) * factorial(m), factorial(kappa - m - 1) * factorial(2 * m))
    return r * r


def conjecture_rhs(kappa: int, kappa_prime: int) -> Fraction:
    """The conjectured closed form (Gamma(k-m) Gamma(2m+1) / (Gamma(k-2m) Gamma(m+1)))^2."""
    return 1 / gamma_correction(kappa, kappa_prime)


def c_const(kappa: int, kappa_prime: int, method: str = "reduced") -> Fraction:
    ci = c_infty(kappa, kappa_prime) if method == "reduced" else c_infty_direct(kappa, kappa_prime)
    value = ci * gamma_correction(kappa, kappa_prime)
    if value == 0:
        raise ArithmeticError(f"C({kappa},{kappa_prime}) vanished")
    return value


@dataclass(frozen=True)
class ConstantReport:
    kappa: int
    kappa_prime: int
    m: int
    c_infty: Fraction
    c_const: Fraction
    conjecture_rhs: Fraction
    equal: bool


def constant_report(kappa: int, kappa_prime: int) -> ConstantReport:
    m = _check(kappa, kappa_prime)
    ci = c_infty(kappa, kappa_prime)
    rhs = conjecture_rhs(kappa, kappa_prime)
    return ConstantReport(kappa, kappa_prime, m, ci, ci * gamma_correction(kappa, kappa_prime), rhs, ci == rhs)


@dataclass
class ScanReport:
    kappa_prime_max: int
    m_max: int
    cells: int
    failures: list  # (kappa', m) pairs where C_inf differs from the closed form
    zero_cells: list
    seconds: float

    @property
    def all_equal(self) -> bool:
        return not self.failures


def _scan_cell(cell):
    kp, m = cell
    k = kp + 2 * m
    ci = c_infty(k, kp)
    return kp, m, ci == conjecture_rhs(k, kp), ci != 0


def conjecture_scan(kappa_prime_max: int, m_max: int, workers: int = 1) -> ScanReport:
    """Exact comparison of C_inf with the conjectured closed form on the grid
    1 <= kappa' <= kappa_prime_max, 0 <= m <= m_max (kappa = kappa' + 2m)."""
    if kappa_prime_max < 1 or m_max < 0:
        raise ValueError("bounds must be positive")
    t0 = time.perf_counter()
    cells = [(kp, m) for m in range(m_max + 1) for kp in range(1, kappa_prime_max + 1)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_scan_cell, cells, chunksize=8))
    else:
        results = [_scan_cell(c) for c in cells]
    failures = sorted((kp, m) for kp, m, ok, _ in results if not ok)
    zeros = sorted((kp, m) for kp, m, _, nz in results if not nz)
    return ScanReport(kappa_prime_max, m_max, len(cells), failures, zeros, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# local zeta integral and I(Pi_inf)


def _mpq(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def local_zeta_Z(s, kappa: int, kappa_prime: int, dps: int = DEFAULT_DPS):
    """Z_inf(s) from its closed form; each 3F2 terminates and is summed exactly."""
    m = _check(kappa, kappa_prime)
    k, kp = kappa, kappa_prime
    s = Fraction(s)
    if s <= Fraction(-1, 2):
        raise DomainError("outside the convergence range Re(s) > -1/2")
    half = Fraction(1, 2)
    with mpmath.workdps(dps + 15):
        G = lambda x: mpmath.gamma(_mpq(Fraction(x)))
        pref = (
            mpmath.pi ** _mpq(-s - 4 * k + Fraction(3, 2))
            * mpmath.mpf(2) ** _mpq(-6 * s - 8 * k - 2)
            * G(2 * k + 1)
            * G(k + kp)
            / (G(s + 2 * k + 1) * G(s + 2 * k + half))
        )
        total = mpmath.mpf(0)
        for j in range(2 * m + 1):
            for n in range(2 * k + 1):
                num = G(2 * s + k + 1 + n) * G(2 * s + 3 * k + 1 - n) * G(s + k + kp + j) * G(s + kp + j + n) * G(s + 2 * k + kp + j - n)
                den = G(2 * kp + j) * G(2 * s + 2 * k + kp + j - n + 1) * G(2 * s + kp + j + n + 1)
                f32 = hypergeom_pfq(
                    [s + 1, Fraction(j - 2 * m), 2 * s + k + kp + j + half],
                    [2 * s + kp + j + n + 1, 2 * s + 2 * k + kp + j - n + 1],
                    Fraction(1),
                )
                total += (-1) ** j * comb(2 * m, j) * comb(2 * k, n) * num / den * _mpq(f32)
        v = pref * total
    with mpmath.workdps(dps):
        return +v


def z_cross_check(kappa: int, kappa_prime: int, dps: int = DEFAULT_DPS):
    """Both sides of 2^{-1} zeta_R(2) Z_inf(0) = 2^{-4k-4m-4} pi^{-4k} Gamma(k+k') Gamma(k')^2 Gamma(2m+1) C_inf."""
    m = _check(kappa, kappa_prime)
    k, kp = kappa, kappa_prime
    with mpmath.workdps(dps + 10):
        zeta_r2 = 1 / mpmath.pi  # pi^{-1} Gamma(1)
        lhs = zeta_r2 / 2 * local_zeta_Z(0, k, kp, dps + 10)
        rhs = (
            mpmath.mpf(2) ** (-4 * k - 4 * m - 4)
            * mpmath.pi ** (-4 * k)
            * factorial(k + kp - 1)
            * factorial(kp - 1) ** 2
            * factorial(2 * m)
            * _mpq(c_infty(k, kp))
        )
    with mpmath.workdps(dps):
        return +lhs, +rhs


@dataclass(frozen=True)
class PiMonomial:
    """coefficient * pi^pi_power (pi_power may be a half-integer)."""

    coefficient: Fraction
    pi_power: Fraction

    def value(self, dps: int = DEFAULT_DPS):
        with mpmath.workdps(dps + 5):
            v = _mpq(self.coefficient) * mpmath.pi ** _mpq(self.pi_power)
        with mpmath.workdps(dps):
            return +v


def i_pi_infty(kappa: int, kappa_prime: int) -> PiMonomial:
    """I(Pi_inf) = 2^{-6k+6k'-2} pi^{-4m} (2k+1) C_inf(k, k')."""
    m = _check(kappa, kappa_prime)
    coeff = Fraction(2) ** (-6 * kappa + 6 * kappa_prime - 2) * (2 * kappa + 1) * c_infty(kappa, kappa_prime)
    return PiMonomial(coeff, Fraction(-4 * m))


# ---------------------------------------------------------------------------
# J(m, n; r) and I(m, n; r)


def i_closed_form(m: int, n: int, r) -> dict[int, Fraction]:
    """I(m, n; r) as a Laurent polynomial in pi: {exponent: rational coefficient}."""
    r = Fraction(r)
    out: dict[int, Fraction] = {}
    for j in range(m + 1):
        cj = Fraction(factorial(2 * m - j), factorial(j) * factorial(m - j)) * Fraction(4) ** (j - m)
        for i in range(min(j, n) + 1):
            c = cj * Fraction(factorial(n), factorial(n - i)) * Fraction(-4) ** (-i) * comb(j, i) * r ** (j - i)
            e = j - m - i
            out[e] = out.get(e, Fraction(0)) + c
    return {e: c for e, c in out.items() if c}


def j_closed_form(m: int, n: int, r, dps: int = 30):
    """2^{2n-1} pi^{n/2} e^{-4 pi r} I(m, n; r) for r > 0."""
    r = Fraction(r)
    if r <= 0:
        raise DomainError("closed form holds for r > 0")
    with mpmath.workdps(dps + 10):
        I = sum(_mpq(c) * mpmath.pi**e for e, c in i_closed_form(m, n, r).items())
        v = mpmath.mpf(2) ** (2 * n - 1) * mpmath.pi ** (mpmath.mpf(n) / 2) * mpmath.exp(-4 * mpmath.pi * _mpq(Fraction(r))) * I
    with mpmath.workdps(dps):
        return +v


def j_quadrature(m: int, n: int, r, dps: int = 30):
    """J(m, n; r) = int_0^inf a^{n-2m-2} H_n(sqrt(pi)(r a + 1/a)) exp(-pi (r a + 1/a)^2) da by tanh-sinh."""
    with mpmath.workdps(dps + 10):
        r = _mpq(Fraction(r))
        sp = mpmath.sqrt(mpmath.pi)

        def f(u):
            # a = e^u keeps both ends smooth
            a = mpmath.exp(u)
            y = r * a + 1 / a
            return a ** (n - 2 * m - 1) * hermite(n, sp * y) * mpmath.exp(-mpmath.pi * y * y)

        # exp(-pi y^2) is below 10^-(dps+40) once |y| > ymax, i.e. outside [1/ymax, ymax/|r|]
        ymax = mpmath.sqrt((dps + 40 + 2 * n) * mpmath.log(10) / mpmath.pi) + 2
        lo, hi = -mpmath.log(ymax), mpmath.log(ymax / abs(r))
        u0 = -mpmath.log(abs(r)) / 2
        pts = [lo] + [u for u in (u0 - 1, u0, u0 + 1) if lo < u < hi] + [hi]
        v = mpmath.quad(f, pts)
    with mpmath.workdps(dps):
        return +v


def j_integral_check(m: int, n: int, r, dps: int = 30):
    """(quadrature value, closed-form value); the closed form is 0 when r < 0 and n > m."""
    r = Fraction(r)
    if r == 0 or m < 0 or n < 0:
        raise DomainError("need m, n >= 0 and r != 0")
    quad = j_quadrature(m, n, r, dps)
    if r > 0:
        return quad, j_closed_form(m, n, r, dps)
    if n > m:
        return quad, mpmath.mpf(0)
    raise DomainError("no closed form for r < 0 with n <= m")


# ---------------------------------------------------------------------------
# Rankin-Selberg sum


def ghate_sum_check(kappa: int, kappa_prime: int) -> tuple[PiMonomial, PiMonomial, bool]:
    """Exact comparison of sum_{n = k mod 2} C(2k,n) (-1)^{(n-k)/2} Gamma((k'+n)/2) Gamma((k'+2k-n)/2)
    with 2 (-1)^m Gamma(2m+1) Gamma(k-m) Gamma(k') / Gamma(m+1)."""
    m = _check(kappa, kappa_prime)
    if kappa <= m:
        raise DomainError("need kappa > m")
    k, kp = kappa, kappa_prime
    by_power: dict[int, Fraction] = {}
    for n in range(k % 2, 2 * k + 1, 2):
        a, ea = half_gamma_exact(kp + n)
        b, eb = half_gamma_exact(kp + 2 * k - n)
        sign = -1 if ((n - k) // 2) % 2 else 1
        e = ea + eb  # power of sqrt(pi)
        by_power[e] = by_power.get(e, Fraction(0)) + sign * comb(2 * k, n) * a * b
    by_power = {e: c for e, c in by_power.items() if c}
    if len(by_power) > 1:
        raise ArithmeticError("mixed pi powers in the Rankin-Selberg sum")
    e, c = next(iter(by_power.items())) if by_power else (0, Fraction(0))
    lhs = PiMonomial(c, Fraction(e, 2))
    rhs_c = Fraction(2 * (-1) ** m * factorial(2 * m) * factorial(k - m - 1) * factorial(kp - 1), factorial(m))
    rhs = PiMonomial(rhs_c, Fraction(0))
    return lhs, rhs, lhs == rhs
