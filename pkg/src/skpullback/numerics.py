"""Arbitrary-precision special functions and quadratic symbols.

Real-valued analytic quantities are carried as ``mpmath.mpf`` at a decimal
working precision ``dps``.  Exact quantities are ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Sequence

import mpmath

DEFAULT_DPS = 50


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _is_nonpositive_integer(x) -> bool:
    if isinstance(x, Rational):
        return Fraction(x).denominator == 1 and x <= 0
    x = mpmath.mpf(x)
    return x <= 0 and mpmath.isint(x)


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def gamma(x, dps: int = DEFAULT_DPS):
    """Gamma function at real ``x``; raises at the poles."""
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at {x}")
    with mpmath.workdps(dps + 5):
        v = mpmath.gamma(_to_mpf(x))
    with mpmath.workdps(dps):
        return +v


def rising(a: Fraction, n: int) -> Fraction:
    """Pochhammer symbol (a)_n for rational a and n >= 0."""
    a = Fraction(a)
    num, den = 1, 1
    for k in range(n):
        t = a + k
        num *= t.numerator
        den *= t.denominator
    return Fraction(num, den)


def gamma_ratio_exact(a, b) -> Fraction:
    """Exact Gamma(a)/Gamma(b) for half-integers a, b with a - b integral."""
    a, b = Fraction(a), Fraction(b)
    if (a - b).denominator != 1 or a.denominator > 2:
        raise DomainError("gamma_ratio_exact needs half-integers differing by an integer")
    for x in (a, b):
        if x.denominator == 1 and x <= 0:
            raise DomainError(f"gamma has a pole at {x}")
    d = int(a - b)
    if d >= 0:
        return rising(b, d)
    return 1 / rising(a, -d)


def half_gamma_exact(twice: int) -> tuple[Fraction, int]:
    """Gamma(twice/2) as (rational, e) meaning rational * sqrt(pi)**e."""
    if twice <= 0:
        raise DomainError("pole")
    if twice % 2 == 0:
        return Fraction(_factorial(twice // 2 - 1)), 0
    return gamma_ratio_exact(Fraction(twice, 2), Fraction(1, 2)), 1


def _factorial(n: int) -> int:
    from math import factorial

    return factorial(n)


def bessel_k(nu, z, dps: int = DEFAULT_DPS):
    """Modified Bessel function K_nu(z) for real nu and z > 0."""
    if z <= 0:
        raise DomainError("bessel_k needs z > 0")
    with mpmath.workdps(dps + 10):
        v = mpmath.besselk(_to_mpf(nu), _to_mpf(z))
    with mpmath.workdps(dps):
        return +v


def bessel_k_quadrature(nu, z, dps: int = 30):
    """K_nu(z) straight from its integral representation (tanh-sinh).

    Independent of :func:`bessel_k`; used as a cross-check.
    """
    if z <= 0:
        raise DomainError("bessel_k needs z > 0")
    with mpmath.workdps(dps + 10):
        nu, z = _to_mpf(nu), _to_mpf(z)
        # substitute t = e^u to get a smooth integrand on the whole line
        f = lambda u: mpmath.exp(-z * mpmath.cosh(u) + nu * u)
        # beyond |u| = U the integrand is below 10^-(dps+20); the tails decay doubly exponentially
        tail = (dps + 20) * mpmath.log(10)
        U = mpmath.mpf(1)
        for _ in range(30):
            U = mpmath.acosh(max(mpmath.mpf(1), (tail + abs(nu) * U) / z)) + 1
        peak = mpmath.asinh(nu / z)
        v = mpmath.quad(f, sorted({-U, mpmath.mpf(0), peak, U}), method="tanh-sinh") / 2
    with mpmath.workdps(dps):
        return +v


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence.

    Exact when ``x`` is an int or Fraction, otherwise evaluated in mpmath.
    """
    if n < 0:
        raise DomainError("hermite needs n >= 0")
    exact = isinstance(x, (int, Fraction))
    if not exact:
        x = mpmath.mpf(x) if not isinstance(x, mpmath.mpc) else x
    h0, h1 = (Fraction(1), 2 * Fraction(x)) if exact else (mpmath.mpf(1), 2 * x)
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2 * x * h1 - 2 * k * h0
    return h1


def _terminating_index(num: Sequence) -> int | None:
    best = None
    for a in num:
        if _is_nonpositive_integer(a):
            k = -int(a)
            best = k if best is None else min(best, k)
    return best


def hypergeom_pfq(num: Sequence, den: Sequence, z, dps: int = DEFAULT_DPS):
    """Generalized hypergeometric series pFq(num; den; z), normalized.

    A terminating series with rational data is summed exactly and a
    ``Fraction`` is returned.  Otherwise the value is an ``mpf``.
    """
    for b in den:
        if _is_nonpositive_integer(b):
            stop = _terminating_index(num)
            if stop is None or stop >= -int(b):
                raise DomainError(f"denominator parameter {b} hits a pole")
    stop = _terminating_index(num)
    rational = all(isinstance(v, (int, Fraction)) for v in (*num, *den, z))
    if stop is not None and rational:
        total = Fraction(0)
        term = Fraction(1)
        z = Fraction(z)
        for k in range(stop + 1):
            total += term
            r = Fraction(1)
            for a in num:
                r *= a + k
            for b in den:
                r /= b + k
            term *= r * z / (k + 1)
        return total
    if stop is None:
        p, q = len(num), len(den)
        if p > q + 1 or (p == q + 1 and abs(z) > 1):
            raise DomainError("divergent hypergeometric series")
        if p == q + 1 and abs(z) == 1:
            excess = sum(Fraction(b) if isinstance(b, (int, Fraction)) else b for b in den) - sum(
                Fraction(a) if isinstance(a, (int, Fraction)) else a for a in num
            )
            if excess <= 0:
                raise DomainError("divergent hypergeometric series at |z| = 1")
    with mpmath.workdps(dps + 10):
        v = mpmath.hyper([_to_mpf(a) for a in num], [_to_mpf(b) for b in den], _to_mpf(z))
    with mpmath.workdps(dps):
        return +v


# ---------------------------------------------------------------------------
# quadratic symbols


def _v2_split(n: int) -> tuple[int, int]:
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    return e, n


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd n > 0."""
    if n <= 0 or n % 2 == 0:
        raise DomainError("jacobi needs odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    e, n = _v2_split(n)
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 and a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    return result * jacobi(a, n)


def _ord_unit(x: Fraction, p: int) -> tuple[int, Fraction]:
    x = Fraction(x)
    e = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        e += 1
    while den % p == 0:
        den //= p
        e -= 1
    return e, Fraction(num, den)


def hilbert_symbol(a, b, p) -> int:
    """Local Hilbert symbol (a, b)_p; ``p`` a prime or the string "inf"."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DomainError("hilbert_symbol needs nonzero arguments")
    if p in ("inf", "infinity", mpmath.inf):
        return -1 if a < 0 and b < 0 else 1
    p = int(p)
    alpha, u = _ord_unit(a, p)
    beta, v = _ord_unit(b, p)
    # reduce units to integers coprime to p (multiply by a square of the denominator)
    u = u.numerator * u.denominator
    v = v.numerator * v.denominator
    if p != 2:
        sign = -1 if (alpha * beta) % 2 and p % 4 == 3 else 1
        return sign * kronecker(u, p) ** (beta % 2) * kronecker(v, p) ** (alpha % 2)
    eps = lambda t: ((t - 1) // 2) % 2
    omega = lambda t: ((t * t - 1) // 8) % 2
    expo = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if expo % 2 else 1


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(abs(d))
    if d % 4 == 0:
        q = d // 4
        return q % 4 in (2, 3) and _squarefree(abs(q))
    return False


def _squarefree(n: int) -> bool:
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == [n]


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for k in range(2, int(n**0.5) + 1):
        if sieve[k]:
            sieve[k * k :: k] = bytearray(len(range(k * k, n + 1, k)))
    return [k for k, flag in enumerate(sieve) if flag]


def gcd_many(*xs: int) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
