import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skpullback.numerics import primes_upto
from skpullback.qseries import (
    DataIntegrityError,
    QExpansion,
    TruncationError,
    UnsupportedFixture,
    bernoulli,
    divisor_sigma_table,
    eisenstein,
    eta_quotient,
    fixture_labels,
    newform_fixture,
    newform_from_text,
)
from skpullback.saitokurokawa import _dim_cusp_forms

M = 400


@pytest.fixture(scope="module", params=["g12.1", "f18.1", "f2.15", "g2.15"])
def form(request):
    return newform_fixture(request.param, M)


def test_fixture_labels():
    assert fixture_labels() == ["f18.1", "f2.15", "g12.1", "g2.15"]
    with pytest.raises(UnsupportedFixture):
        newform_fixture("f4.7")


@pytest.mark.parametrize("p", primes_upto(20))
def test_hecke_eigenform(form, p):
    assert form.hecke_eigen_residual(p) == 0


def test_multiplicativity_against_raw_expansion(form):
    rng = random.Random(20)
    pairs = 0
    while pairs < 200:
        m, n = rng.randint(1, 40), rng.randint(1, 40)
        if gcd(m, n) != 1 or m * n > M:
            continue
        raw = form.expansion
        assert raw[m * n] == raw[m] * raw[n]
        assert form.coefficient(m * n) == raw[m * n]
        pairs += 1


def test_prime_power_recurrence_matches_raw(form):
    for p in (2, 3, 5, 7):
        r = 1
        while p ** (r + 1) <= M:
            r += 1
            assert form.prime_power_coefficient(p, r) == form.expansion[p**r]


def test_ramanujan_bound(form):
    k = form.weight
    for p in primes_upto(M):
        if form.level % p:
            assert form.ap(p) ** 2 <= 4 * p ** (k - 1)


def test_normalized_and_cuspidal(form):
    assert form.expansion[0] == 0
    assert form.expansion[1] == 1


def test_tau_values():
    g = newform_fixture("g12.1", 30)
    assert [g.coefficient(n) for n in range(1, 11)] == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_tau_congruence_691():
    g = newform_fixture("g12.1", M)
    sig = divisor_sigma_table(M, 11)
    assert all((g.expansion[n] - sig[n]) % 691 == 0 for n in range(1, M + 1))


def test_level_one_dimension_sanity():
    # E4^3 - E6^2 = 1728 Delta and (E4^3 - E6^2) E6 = 1728 Delta E6 are second constructions
    E4, E6 = eisenstein(4, M), eisenstein(6, M)
    g, f = newform_fixture("g12.1", M), newform_fixture("f18.1", M)
    assert (E4**3 - E6**2).coefficients == (1728 * g.expansion).coefficients
    assert (E4**3 * E6 - E6**3).coefficients == (1728 * f.expansion).coefficients


def _points_15a(p):
    # y^2 + xy + y = x^3 + x^2 - 10x - 10 over F_p, projective point included
    count = 1
    for x in range(p):
        rhs = (x**3 + x**2 - 10 * x - 10) % p
        for y in range(p):
            if (y * y + x * y + y - rhs) % p == 0:
                count += 1
    return count


@pytest.mark.parametrize("p", [p for p in primes_upto(120) if 15 % p])
def test_level_15_against_elliptic_curve(p):
    f = newform_fixture("f2.15", M)
    assert f.ap(p) == p + 1 - _points_15a(p)


def test_level_15_atkin_lehner():
    f = newform_fixture("f2.15", M)
    assert f.ap(3) == -1 and f.ap(5) == 1
    assert f.tau_signs == {3: -1, 5: 1}
    assert f.al_signs == {3: 1, 5: -1, 15: -1}


@pytest.mark.parametrize("N,k,dim", [(1, 12, 1), (1, 18, 1), (15, 2, 1), (1, 24, 2), (15, 4, 4), (3, 6, 1), (1, 10, 0)])
def test_cusp_form_dimensions(N, k, dim):
    assert _dim_cusp_forms(N, k) == dim


def test_satake_unit_modulus():
    f = newform_fixture("f18.1", M)
    for p in (2, 3, 5, 7, 11):
        s = f.satake(p)
        assert abs(abs(s.alpha) - 1) < 1e-12
        assert abs(2 * s.alpha.real * p ** 8.5 - f.ap(p)) < 1e-6 * p**8.5


def test_text_round_trip():
    f = newform_fixture("f2.15", 60)
    g = newform_from_text(f.to_text())
    assert g.expansion == f.expansion
    assert (g.level, g.weight, g.label) == (15, 2, "f2.15")


def test_text_rejects_unnormalized():
    with pytest.raises(DataIntegrityError):
        newform_from_text("# bad 2 15 3\n0 0\n1 2\n2 0\n3 0\n")


def test_truncation_is_enforced():
    f = newform_fixture("f2.15", 50)
    with pytest.raises(TruncationError):
        f.expansion[51]


def test_product_truncation_uses_valuation():
    a = QExpansion.from_list([0, 0, 1, 3], 3)
    b = QExpansion.from_list([1, 1], 1)
    assert (a * b).truncation == 3
    assert (a * a).truncation == 5


def test_eta_quotient_delta_is_q_product():
    # eta(tau)^24 = q prod (1 - q^n)^24, checked by direct expansion up to q^8
    direct = QExpansion.from_list([0, 1], 8)
    for n in range(1, 9):
        direct = direct * QExpansion.from_list([1] + [0] * (n - 1) + [-1], 8) ** 24
    assert eta_quotient([(1, 24)], 8).coefficients == direct.coefficients


def test_eta_quotient_rejects_fractional_order():
    with pytest.raises(UnsupportedFixture):
        eta_quotient([(1, 1)], 10)


def test_bernoulli():
    assert [bernoulli(k) for k in (2, 4, 6, 12)] == [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-691, 2730)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=2, max_size=20), st.lists(st.integers(-50, 50), min_size=2, max_size=20))
def test_product_commutes(a, b):
    x, y = QExpansion.from_list(a), QExpansion.from_list(b)
    assert (x * y).coefficients == (y * x).coefficients
