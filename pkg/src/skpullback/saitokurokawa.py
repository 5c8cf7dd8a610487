"""Saito-Kurokawa coefficients, the nearly holomorphic expansion and both sides
of the pullback identity.

    |<Delta^m F|_{H x H}, g x g>|^2 / <g,g>^2
        = 2^{-kappa-6m-1} prod_{p | N} p (1+p)^{-2} C(kappa, kappa') <h,h>/<f,f> Lambda(kappa+kappa', Sym^2 g x f)

The left side is evaluated only in the one-dimensional situation of the
worked examples, where the pairing reduces to the q1 q2 coefficient of the
restriction weighted by (1 - b^2/4)^m.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import mpmath

from . import targets
from .archimedean import c_const
from .halfintegral import PlusSpaceForm, kohnen_zagier_ratio, plus_form_fixture
from .lfunctions import evaluate_completed, required_terms, sym2_tensor_lseries, twisted_lseries
from .numerics import DomainError, kronecker, prime_factors
from .petersson import petersson_norm
from .qseries import Newform, newform_fixture


class SupportError(DomainError):
    pass


class UnsupportedPairing(DomainError):
    pass


@dataclass(frozen=True)
class HalfIntegralMatrix:
    """B = [[b1, b2/2], [b2/2, b3]]."""

    b1: int
    b2: int
    b3: int

    @property
    def disc(self) -> int:
        """4 det(B) = 4 b1 b3 - b2^2."""
        return 4 * self.b1 * self.b3 - self.b2 * self.b2

    @property
    def det(self) -> Fraction:
        return Fraction(self.disc, 4)

    @property
    def positive_definite(self) -> bool:
        return self.b1 > 0 and self.b3 > 0 and self.disc > 0

    def trace_with(self, Y) -> object:
        """tr(B Y) for Y = [[y1, v], [v, y2]]."""
        (y1, v), (_, y2) = Y
        return self.b1 * y1 + self.b2 * v + self.b3 * y2


@dataclass(frozen=True)
class GlobalParameters:
    kappa: int
    kappa_prime: int
    N: int

    def __post_init__(self):
        if self.kappa_prime < 1 or self.kappa < self.kappa_prime or (self.kappa - self.kappa_prime) % 2:
            raise DomainError("need kappa >= kappa' >= 1 with kappa - kappa' even")
        if self.N < 1 or self.N % 2 == 0 or any(self.N % (p * p) == 0 for p in prime_factors(self.N)):
            raise DomainError("N must be odd and squarefree")

    @property
    def m(self) -> int:
        return (self.kappa - self.kappa_prime) // 2


def sk_coefficient(h: PlusSpaceForm, B: HalfIntegralMatrix) -> int:
    """A(B) = sum_{d | (b1, b2, b3), (d, N) = 1} d^{kappa'} c((4 b1 b3 - b2^2) / d^2)."""
    if not B.positive_definite:
        raise SupportError(f"{B} is not positive definite")
    N = h.parent.level
    g = math.gcd(math.gcd(B.b1, B.b2), B.b3)
    total = 0
    for d in range(1, g + 1):
        if g % d == 0 and math.gcd(d, N) == 1:
            total += d**h.weight_num * h.coefficient(B.disc // (d * d))
    return total


@dataclass(frozen=True)
class NearlyHoloTerm:
    """coefficient * (4 pi)^{pi_power} det(B)^j det(Y)^{j-m} tr(BY)^{i-l}."""

    j: int
    i: int
    l: int
    coefficient: Fraction
    pi_power: int

    @property
    def det_B_power(self) -> int:
        return self.j

    def det_Y_power(self, m: int) -> int:
        return self.j - m

    @property
    def trace_power(self) -> int:
        return self.i - self.l


def nearly_holo_coefficient(kappa_prime: int, m: int) -> list[NearlyHoloTerm]:
    """The (j, i, l) array multiplying A(B) e^{2 pi i tr(BZ)} in Delta^m F (kappa = kappa' + 2m)."""
    if m < 0:
        raise DomainError("m must be non-negative")
    kappa = kappa_prime + 2 * m
    terms = []
    for j in range(m + 1):
        # Gamma(kappa'+m+1/2)/Gamma(kappa'+j+1/2) = prod_{t=j}^{m-1} (kappa'+t+1/2)
        g = Fraction(1)
        for t in range(j, m):
            g *= Fraction(2 * (kappa_prime + t) + 1, 2)
        outer = (-1) ** (m - j) * g * comb(m, j)
        for i in range(m - j + 1):
            mid = Fraction(factorial(2 * m - 2 * j - i), factorial(i) * factorial(m - j - i))
            for l in range(i + 1):
                inner = Fraction(factorial(kappa + 1), factorial(kappa + 1 - l)) * comb(i, l) * (-1) ** l
                terms.append(NearlyHoloTerm(j, i, l, outer * mid * inner, (j - m) + (i + j - m) - l))
    return terms


def nearly_holo_value(kappa_prime: int, m: int, B: HalfIntegralMatrix, Y, dps: int = 30):
    """The polynomial factor in front of A(B) e^{2 pi i tr(BZ)} at a given imaginary part Y."""
    with mpmath.workdps(dps + 10):
        (y1, v), (_, y2) = Y
        detY = mpmath.mpf(y1) * y2 - mpmath.mpf(v) ** 2
        tr = B.trace_with([[mpmath.mpf(y1), mpmath.mpf(v)], [mpmath.mpf(v), mpmath.mpf(y2)]])
        detB = mpmath.mpf(B.det.numerator) / B.det.denominator
        fp = 4 * mpmath.pi
        total = mpmath.mpf(0)
        for t in nearly_holo_coefficient(kappa_prime, m):
            c = mpmath.mpf(t.coefficient.numerator) / t.coefficient.denominator
            total += c * fp**t.pi_power * detB**t.j * detY ** (t.j - m) * tr ** (t.i - t.l)
    return +total


def diagonal_coefficient(h: PlusSpaceForm, n1: int, n2: int) -> int:
    """q1^{n1} q2^{n2} coefficient of F restricted to H x H: sum_{b^2 < 4 n1 n2} A((n1, b, n2))."""
    if n1 < 1 or n2 < 1:
        raise DomainError("n1, n2 must be positive")
    bmax = math.isqrt(4 * n1 * n2 - 1)
    return sum(sk_coefficient(h, HalfIntegralMatrix(n1, b, n2)) for b in range(-bmax, bmax + 1))


def _dim_cusp_forms(N: int, k: int) -> int:
    """dim S_k(Gamma0(N)) for squarefree N and even k >= 2."""
    if k < 2 or k % 2:
        raise DomainError("even weight >= 2 expected")
    mu = N
    nu2 = nu3 = 1
    for p in prime_factors(N):
        mu = mu // p * (p + 1)
        nu2 *= 1 + kronecker(-4, p)
        nu3 *= 1 + kronecker(-3, p)
    cusps = 2 ** len(prime_factors(N))
    genus = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    if k == 2:
        return int(genus)
    return int((k - 1) * (genus - 1) + (k // 2 - 1) * cusps + nu2 * (k // 4) + nu3 * (k // 3))


def pullback_ratio(h: PlusSpaceForm, g: Newform, m: int) -> Fraction:
    """sum_{b^2 < 4} (1 - b^2/4)^m A((1, b, 1)), the normalized pairing when S_{kappa+1}(Gamma0(N)) = C g."""
    if m < 0:
        raise DomainError("m must be non-negative")
    if g.level != h.parent.level or g.weight != h.weight_num + 2 * m + 1:
        raise UnsupportedPairing("g does not have weight kappa + 1 and level N")
    if _dim_cusp_forms(g.level, g.weight) != 1:
        raise UnsupportedPairing(f"S_{g.weight}(Gamma0({g.level})) is not one-dimensional")
    if g.expansion[1] != 1:
        raise UnsupportedPairing("g is not normalized")
    return sum((1 - Fraction(b * b, 4)) ** m * sk_coefficient(h, HalfIntegralMatrix(1, b, 1)) for b in (-1, 0, 1))


def local_factor(N: int) -> Fraction:
    out = Fraction(1)
    for p in prime_factors(N):
        out *= Fraction(p, (1 + p) ** 2)
    return out


def theorem_rhs(params: GlobalParameters, lambda_central, norm_ratio_h_over_f, C=None):
    """2^{-kappa-6m-1} prod_{p|N} p (1+p)^{-2} C(kappa,kappa') <h,h>/<f,f> Lambda(kappa+kappa')."""
    if C is None:
        C = c_const(params.kappa, params.kappa_prime)
    k, m = params.kappa, params.m
    with mpmath.workdps(mpmath.mp.dps + 10):
        pre = local_factor(params.N) * C / Fraction(2) ** (k + 6 * m + 1)
        v = mpmath.mpf(pre.numerator) / pre.denominator * norm_ratio_h_over_f * lambda_central
    return +v


# ---------------------------------------------------------------------------
# end-to-end verification


@dataclass(frozen=True)
class Example:
    example_id: int
    f_label: str
    g_label: str
    h_label: str
    kz_discriminant: int
    conductor: int  # of Sym^2 g x f; see lfunctions.determine_sign_and_conductor
    sign: int


EXAMPLES = {
    1: Example(1, "f18.1", "g12.1", "h19_2.4", 3, 1, 1),
    2: Example(2, "f2.15", "g2.15", "h3_2.60", 8, 15**4, 1),
}


@dataclass
class Quantity:
    name: str
    computed: object
    target: object = None
    tolerance: float | None = None
    exact: bool = False

    @property
    def abs_delta(self):
        if self.target is None:
            return None
        return abs(self.computed - self.target)

    @property
    def rel_delta(self):
        if self.target is None:
            return None
        return abs(self.computed - self.target) / abs(self.target) if self.target else abs(self.computed)

    @property
    def passed(self) -> bool | None:
        if self.target is None:
            return None
        if self.exact:
            return self.computed == self.target
        return self.rel_delta <= self.tolerance


@dataclass
class VerificationReport:
    example_id: int
    parameters: GlobalParameters
    quantities: list = field(default_factory=list)
    lhs: object = None
    rhs: object = None
    residual: float = float("nan")
    residual_tolerance: float = 1e-4
    digits: int = 30
    seconds: float = 0.0

    def quantity(self, name: str) -> Quantity:
        return next(q for q in self.quantities if q.name == name)

    @property
    def passed(self) -> bool:
        return self.residual <= self.residual_tolerance and all(q.passed is not False for q in self.quantities)


def verify_pullback(example_id: int, digits: int = 20, coefficient_override: dict | None = None) -> VerificationReport:
    """Evaluate both sides of the pullback identity for a worked example.

    ``coefficient_override`` replaces stored c_h(n) values (negative controls).
    """
    if example_id not in EXAMPLES:
        raise DomainError(f"unknown example {example_id}")
    t0 = time.perf_counter()
    ex = EXAMPLES[example_id]
    f, g = newform_fixture(ex.f_label), newform_fixture(ex.g_label)
    h = plus_form_fixture(ex.h_label)
    if coefficient_override:
        h.stored.update(coefficient_override)
        h._memo.clear()
    params = GlobalParameters(g.weight - 1, f.weight // 2, f.level)
    k, kp, m = params.kappa, params.kappa_prime, params.m
    rep = VerificationReport(example_id, params, digits=digits)
    with mpmath.workdps(digits + 10):
        # decimal targets become mpf at the working precision
        tg = targets.EXAMPLES[example_id]
        C = c_const(k, kp)
        rep.quantities.append(Quantity("C", C, tg["C"], exact=True))
        ratio = pullback_ratio(h, g, m)
        rep.quantities.append(Quantity("pullback_ratio_abs", abs(ratio), tg["pullback_ratio_abs"], exact=True))
        norm = petersson_norm(g, digits=digits)
        gg = mpmath.mpf(norm.value)
        rep.quantities.append(Quantity("petersson_g", gg, tg["petersson_g"], tg["petersson_tol"]))
        L = sym2_tensor_lseries(f, g, conductor=ex.conductor, sign=ex.sign)
        need = required_terms(L, k + kp, digits)
        if need > min(f.truncation, g.truncation):
            fb, gb = newform_fixture(ex.f_label, need), newform_fixture(ex.g_label, need)
            L = sym2_tensor_lseries(fb, gb, conductor=ex.conductor, sign=ex.sign)
        lam = evaluate_completed(L, k + kp, dps=digits, normalization="gamma").value
        rep.quantities.append(Quantity("lambda_sym2", lam, tg["lambda_sym2"], tg["lambda_tol"]))
        D = ex.kz_discriminant
        tw = twisted_lseries(f, D)
        lam_tw = evaluate_completed(tw, kp, dps=digits, normalization="gamma").value
        rep.quantities.append(Quantity(f"lambda_twist_D{D}", lam_tw))
        kz = kohnen_zagier_ratio(h, D, lam_tw)
        rep.quantities.append(Quantity("norm_ratio_f_over_h", kz, tg["kz_ratio"], tg["kz_tol"]))
        lhs = mpmath.mpf(ratio.numerator) ** 2 / ratio.denominator**2 * gg**2
        rhs = theorem_rhs(params, lam, 1 / kz, C)
        rep.lhs, rep.rhs = lhs, rhs
        rep.residual = float(abs(lhs - rhs) / abs(rhs))
    rep.seconds = time.perf_counter() - t0
    return rep
