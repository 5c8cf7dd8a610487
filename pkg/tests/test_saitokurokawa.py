from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from skpullback.halfintegral import ExtensionRangeError, plus_form_fixture
from skpullback.numerics import DomainError
from skpullback.qseries import newform_fixture
from skpullback.saitokurokawa import (
    GlobalParameters,
    HalfIntegralMatrix,
    SupportError,
    UnsupportedPairing,
    diagonal_coefficient,
    local_factor,
    nearly_holo_coefficient,
    nearly_holo_value,
    pullback_ratio,
    sk_coefficient,
    theorem_rhs,
    verify_pullback,
)

H19 = plus_form_fixture("h19_2.4")
H3 = plus_form_fixture("h3_2.60")


def _A(h, b1, b2, b3):
    try:
        return sk_coefficient(h, HalfIntegralMatrix(b1, b2, b3))
    except ExtensionRangeError:
        assume(False)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([H19, H3]), st.integers(1, 12), st.integers(-12, 12), st.integers(1, 12))
def test_class_invariance(h, b1, b2, b3):
    assume(4 * b1 * b3 - b2 * b2 > 0)
    a = _A(h, b1, b2, b3)
    assert a == _A(h, b3, b2, b1)
    assert a == _A(h, b1, -b2, b3)
    # x -> x + y keeps the GL2(Z) class
    assert a == _A(h, b1, b2 + 2 * b1, b1 + b2 + b3)


@pytest.mark.parametrize("B", [(0, 0, 1), (1, 2, 1), (1, 3, 1), (-1, 0, -1), (2, 5, 3)])
def test_support_error(B):
    with pytest.raises(SupportError):
        sk_coefficient(H19, HalfIntegralMatrix(*B))


def test_divisor_sum_uses_coprime_divisors():
    # A((2, 2, 2)) = c(12) + 2^9 c(3) for N = 1; for N = 15, d = 3 is dropped
    assert sk_coefficient(H19, HalfIntegralMatrix(2, 2, 2)) == H19.coefficient(12) + 2**9 * H19.coefficient(3)
    assert sk_coefficient(H3, HalfIntegralMatrix(3, 3, 3)) == H3.coefficient(27)


def test_example_pullback_sums():
    g12, g2 = newform_fixture("g12.1", 200), newform_fixture("g2.15", 200)
    assert pullback_ratio(H19, g12, 1) == Fraction(-1, 2)
    assert abs(pullback_ratio(H19, g12, 1)) == Fraction(1, 2)
    assert pullback_ratio(H3, g2, 0) == 2


def test_diagonal_coefficients():
    assert diagonal_coefficient(H3, 1, 1) == 2
    assert diagonal_coefficient(H19, 1, 1) == 0
    assert diagonal_coefficient(H19, 1, 2) == diagonal_coefficient(H19, 2, 1)
    with pytest.raises(DomainError):
        diagonal_coefficient(H19, 0, 1)


def test_m_zero_degeneration():
    g2 = newform_fixture("g2.15", 200)
    assert pullback_ratio(H3, g2, 0) == diagonal_coefficient(H3, 1, 1)
    terms = nearly_holo_coefficient(9, 0)
    assert len(terms) == 1 and terms[0].coefficient == 1 and terms[0].pi_power == 0
    B = HalfIntegralMatrix(1, 1, 1)
    assert nearly_holo_value(9, 0, B, [[2, 0], [0, 3]]) == 1


@pytest.mark.parametrize("m", [1, 2, 3])
def test_nearly_holo_index_ranges(m):
    terms = nearly_holo_coefficient(9, m)
    for t in terms:
        assert isinstance(t.coefficient, Fraction)
        assert 0 <= t.j <= m and 0 <= t.i <= m - t.j and 0 <= t.l <= t.i
    assert len(terms) == sum((m - j + 1) * (m - j + 2) // 2 for j in range(m + 1))


def test_nearly_holo_leading_term():
    # the j = m, i = l = 0 term carries det(B)^m with coefficient 1
    t = [t for t in nearly_holo_coefficient(9, 2) if (t.j, t.i, t.l) == (2, 0, 0)]
    assert t[0].coefficient == 1 and t[0].pi_power == 0


def test_nearly_holo_value_scaling_in_y():
    # every monomial other than det(B)^m carries a negative power of the scale of Y
    B = HalfIntegralMatrix(1, 1, 1)
    v = nearly_holo_value(9, 1, B, [[10**6, 0], [0, 10**6]], dps=30)
    assert abs(v - B.det) < 1e-4


def test_pairing_guards():
    g12 = newform_fixture("g12.1", 200)
    with pytest.raises(UnsupportedPairing):
        pullback_ratio(H19, g12, 2)
    with pytest.raises(UnsupportedPairing):
        pullback_ratio(H3, g12, 0)
    with pytest.raises(DomainError):
        pullback_ratio(H19, g12, -1)


def test_global_parameters():
    assert GlobalParameters(11, 9, 1).m == 1
    for bad in ((10, 9, 1), (9, 11, 1), (1, 1, 9), (1, 1, 6)):
        with pytest.raises(DomainError):
            GlobalParameters(*bad)


def test_local_factor():
    assert local_factor(1) == 1
    assert local_factor(15) == Fraction(3, 16) * Fraction(5, 36)


def test_theorem_rhs_linear():
    p = GlobalParameters(11, 9, 1)
    with mpmath.workdps(30):
        a = theorem_rhs(p, mpmath.mpf(2), mpmath.mpf(3), C=Fraction(1))
        assert abs(a - mpmath.mpf(6) / 2**18) < mpmath.mpf(10) ** -28


def test_verify_example1():
    rep = verify_pullback(1, digits=20)
    assert rep.passed
    assert rep.residual < 1e-15
    assert rep.quantity("pullback_ratio_abs").computed == Fraction(1, 2)


def test_negative_control_detects_tampered_coefficient():
    # c(4) = -3 makes (3/2) c(3) + c(4) = -3/2, so the squared pairing is off by 9
    rep = verify_pullback(1, digits=15, coefficient_override={4: -3})
    assert not rep.passed
    assert rep.residual > 1
