from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skpullback.numerics import (
    DomainError,
    bessel_k,
    bessel_k_quadrature,
    gamma,
    gamma_ratio_exact,
    half_gamma_exact,
    hermite,
    hilbert_symbol,
    hypergeom_pfq,
    is_fundamental_discriminant,
    is_prime,
    jacobi,
    kronecker,
    prime_factors,
    primes_upto,
    rising,
)

nonzero = st.integers(-10**6, 10**6).filter(bool)


def _places(*xs):
    ps = {2}
    for x in xs:
        x = Fraction(x)
        ps |= set(prime_factors(abs(x.numerator))) | set(prime_factors(x.denominator))
    return sorted(ps)


@settings(max_examples=300, deadline=None)
@given(nonzero, nonzero)
def test_hilbert_product_formula(a, b):
    prod = hilbert_symbol(a, b, "inf")
    for p in _places(a, b):
        prod *= hilbert_symbol(a, b, p)
    assert prod == 1


@settings(max_examples=150, deadline=None)
@given(nonzero, nonzero, st.integers(1, 500), st.integers(1, 500))
def test_hilbert_product_formula_rational(a, b, da, db):
    x, y = Fraction(a, da), Fraction(b, db)
    prod = hilbert_symbol(x, y, "inf")
    for p in _places(x, y):
        prod *= hilbert_symbol(x, y, p)
    assert prod == 1


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_hilbert_symbol_odd_prime_formula(p):
    # (-1)^{alpha beta eps(p)} (u|p)^beta (v|p)^alpha with a = p^alpha u, b = p^beta v
    for a in (1, 2, p, 2 * p, 3):
        for b in (1, 2, p, 5 * p, 7):
            u, v = a, b
            alpha, beta = 0, 0
            while u % p == 0:
                u //= p
                alpha += 1
            while v % p == 0:
                v //= p
                beta += 1
            eps = (p - 1) // 2
            want = (-1) ** (alpha * beta * eps) * jacobi(u, p) ** beta * jacobi(v, p) ** alpha
            assert hilbert_symbol(a, b, p) == want


def test_hilbert_symbol_at_two_table():
    # standard table over units {1, 3, 5, 7} and 2
    units = (1, 3, 5, 7)
    for u in units:
        for v in units:
            assert hilbert_symbol(u, v, 2) == (-1) ** (((u - 1) // 2) * ((v - 1) // 2))
        assert hilbert_symbol(2, u, 2) == (-1) ** ((u * u - 1) // 8)


@pytest.mark.parametrize("x", [Fraction(1, 7), Fraction(1, 2), 1, Fraction(5, 2), 7, Fraction(39, 4), 19, 20])
def test_gamma_recurrence(x):
    P = 50
    mpx = mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
    with mpmath.workdps(P):
        r = gamma(mpx + 1, P) / gamma(mpx, P)
        assert abs(r - mpx) / mpx < mpmath.mpf(10) ** (4 - P)


def test_gamma_poles():
    for x in (0, -1, -7):
        with pytest.raises(DomainError):
            gamma(x)


@pytest.mark.parametrize("twice", range(1, 41))
def test_half_gamma_exact(twice):
    c, e = half_gamma_exact(twice)
    with mpmath.workdps(40):
        want = mpmath.gamma(mpmath.mpf(twice) / 2)
        got = mpmath.mpf(c.numerator) / c.denominator * mpmath.sqrt(mpmath.pi) ** e
        assert abs(got - want) / want < mpmath.mpf(10) ** -35


def test_exact_gamma_helpers():
    assert rising(Fraction(1, 2), 3) == Fraction(15, 8)
    assert gamma_ratio_exact(Fraction(7, 2), Fraction(1, 2)) == Fraction(15, 8)
    assert gamma_ratio_exact(10, 4) == 9 * 8 * 7 * 6 * 5 * 4


@pytest.mark.parametrize("nu", [0, Fraction(1, 2), 3, Fraction(19, 2)])
@pytest.mark.parametrize("z", [Fraction(1, 2), 1, 4])
def test_bessel_k_against_quadrature(nu, z):
    a = bessel_k(nu, z, 30)
    b = bessel_k_quadrature(nu, z, 30)
    assert abs(a - b) / abs(b) < 1e-10


@pytest.mark.parametrize("z", [Fraction(1, 3), 2, 9])
def test_bessel_k_half_closed_form(z):
    with mpmath.workdps(40):
        zz = mpmath.mpf(Fraction(z).numerator) / Fraction(z).denominator
        want = mpmath.sqrt(mpmath.pi / (2 * zz)) * mpmath.exp(-zz)
        assert abs(bessel_k(Fraction(1, 2), z, 40) - want) / want < mpmath.mpf(10) ** -35


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 50), st.fractions(min_value=-20, max_value=20, max_denominator=50))
def test_hermite_parity(n, x):
    assert hermite(n, -x) == (-1) ** n * hermite(n, x)


def test_hermite_small():
    x = Fraction(3, 5)
    assert hermite(0, x) == 1
    assert hermite(2, x) == 4 * x * x - 2
    assert hermite(5, x) == 32 * x**5 - 160 * x**3 + 120 * x


@pytest.mark.parametrize("n", range(0, 8))
def test_hypergeom_chu_vandermonde(n):
    b, c = Fraction(3, 2), Fraction(7, 3)
    got = hypergeom_pfq([-n, b], [c], 1)
    assert got == rising(c - b, n) / rising(c, n)


def test_hypergeom_pfaff_saalschutz():
    # 3F2(-n, a, b; c, 1 + a + b - c - n; 1) = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)
    a, b, c = Fraction(5, 2), Fraction(4, 3), Fraction(11, 2)
    for n in range(6):
        got = hypergeom_pfq([-n, a, b], [c, 1 + a + b - c - n], 1)
        assert got == rising(c - a, n) * rising(c - b, n) / (rising(c, n) * rising(c - a - b, n))


def test_hypergeom_nonterminating_against_mpmath():
    got = hypergeom_pfq([Fraction(1, 3), 1], [Fraction(5, 2)], Fraction(1, 2), dps=30)
    with mpmath.workdps(30):
        want = mpmath.hyp2f1(mpmath.mpf(1) / 3, 1, mpmath.mpf(5) / 2, mpmath.mpf(1) / 2)
    assert abs(got - want) < mpmath.mpf(10) ** -28


@settings(max_examples=300, deadline=None)
@given(st.integers(-500, 500), st.integers(1, 400), st.integers(1, 400))
def test_kronecker_multiplicative(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


@pytest.mark.parametrize("p", primes_upto(60)[1:])
def test_jacobi_euler_criterion(p):
    for a in range(-30, 30):
        e = pow(a % p, (p - 1) // 2, p)
        want = 0 if a % p == 0 else (1 if e == 1 else -1)
        assert jacobi(a, p) == want


def test_kronecker_at_two():
    assert [kronecker(d, 2) for d in (1, 3, 5, 7, 4)] == [1, -1, -1, 1, 0]


def test_fundamental_discriminants():
    def brute(d):
        if d in (0, 1):
            return False
        if d % 4 == 1:
            core = abs(d)
        elif d % 4 == 0 and (d // 4) % 4 in (2, 3):
            core = abs(d // 4)
        else:
            return False
        return all(core % (q * q) for q in range(2, int(core**0.5) + 1))

    for d in range(-300, 300):
        assert is_fundamental_discriminant(d) == brute(d), d


def test_primes():
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert all(is_prime(p) for p in primes_upto(1000))
    assert sum(is_prime(n) for n in range(1000)) == 168
    assert prime_factors(2 * 2 * 3 * 15) == [2, 3, 5]

