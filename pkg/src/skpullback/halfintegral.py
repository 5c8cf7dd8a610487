"""Kohnen plus-space forms h of weight kappa' + 1/2 attached to a newform f.

Only the printed leading coefficients of h are stored.  Coefficients at
non-fundamental indices xi = d * f^2 (-d a fundamental discriminant) follow
from

    c(xi) = c(d) f^{kappa' - 1/2} prod_p Psi_p(xi; alpha_p),

which is evaluated two ways: ``psi_poly`` follows the local case definitions
literally (floating X on the unit circle), while ``extend_coefficient`` uses
the equivalent integer form

    p^{e (kappa' - 1/2)} Psi_p = a(p^e) - (p, -xi)_p p^{kappa' - 1} a(p^{e-1})   (unramified, e = ord_p f)

with the Hilbert-symbol term present only when ord_p(xi) is even (and, at
p = 2, when -xi / 2^m = 1 mod 4), and a(p^e) at Steinberg primes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .numerics import DomainError, hilbert_symbol, is_fundamental_discriminant, kronecker, prime_factors
from .qseries import Newform, newform_fixture


class VanishingCoefficient(ArithmeticError):
    pass


class ExtensionRangeError(KeyError):
    """The fundamental part of the index is not among the stored coefficients."""


@dataclass
class PlusSpaceForm:
    label: str
    parent: Newform
    weight_num: int  # kappa'; the weight is kappa' + 1/2
    level: int  # 4N
    stored: dict  # n -> c(n) for n <= truncation (absent means 0)
    truncation: int
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def kappa_prime(self) -> int:
        return self.weight_num

    def in_support(self, n: int) -> bool:
        return n > 0 and ((-1) ** self.weight_num * n) % 4 in (0, 1)

    def stored_coefficient(self, n: int) -> int:
        if n > self.truncation:
            raise ExtensionRangeError(f"{self.label}: c({n}) beyond the stored range {self.truncation}")
        return self.stored.get(n, 0)

    def coefficient(self, n: int) -> int:
        """Stored value when available, otherwise the extension relation."""
        if n <= self.truncation:
            return self.stored_coefficient(n)
        return extend_coefficient(self, n)

    def to_text(self) -> str:
        lines = [f"# plus-form {self.label} {self.weight_num} {self.level}"]
        lines += [f"{n} {self.stored.get(n, 0)}" for n in range(1, self.truncation + 1)]
        return "\n".join(lines) + "\n"


_PLUS_FIXTURES = {
    # printed leading coefficients; every other index up to the truncation vanishes
    "h19_2.4": ("f18.1", 9, {3: 1, 4: -2, 7: -16, 8: 36, 11: 99}, 11),
    "h3_2.60": ("f2.15", 1, {3: 1, 8: -2, 15: -1, 20: 2, 23: 2}, 23),
}


def plus_form_labels() -> list[str]:
    return sorted(_PLUS_FIXTURES)


def plus_form_fixture(label: str) -> PlusSpaceForm:
    if label not in _PLUS_FIXTURES:
        raise DomainError(f"unknown plus-space fixture {label!r}")
    parent, kp, coeffs, M = _PLUS_FIXTURES[label]
    f = newform_fixture(parent)
    return PlusSpaceForm(label, f, kp, 4 * f.level, dict(coeffs), M)


def plus_form_from_text(text: str, parent: Newform) -> PlusSpaceForm:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].lstrip("#").split()
    if head[0] != "plus-form":
        raise ValueError("not a plus-form coefficient file")
    label, kp, level = head[1], int(head[2]), int(head[3])
    stored = {}
    M = 0
    for ln in lines[1:]:
        n, c = (int(x) for x in ln.split())
        M = max(M, n)
        if c:
            stored[n] = c
    return PlusSpaceForm(label, parent, kp, level, stored, M)


# ---------------------------------------------------------------------------


def fundamental_part(xi) -> tuple[int, Fraction]:
    """(d, f) with xi = d f^2 and -d the fundamental discriminant of Q(sqrt(-xi))."""
    xi = Fraction(xi)
    if xi <= 0:
        raise DomainError("xi must be positive")
    # squarefree kernel of the numerator times the denominator
    n = xi.numerator * xi.denominator
    core = 1
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            core *= p
    d = core if (-core) % 4 == 1 else 4 * core
    f2 = xi / d
    fr = Fraction(math.isqrt(f2.numerator), math.isqrt(f2.denominator))
    if fr * fr != f2:
        raise ArithmeticError("fundamental_part failed")
    return d, fr


def _ord(x: Fraction, p: int) -> int:
    x = Fraction(x)
    e, a, b = 0, x.numerator, x.denominator
    while a % p == 0:
        a //= p
        e += 1
    while b % p == 0:
        b //= p
        e -= 1
    return e


def _unit_part(x: Fraction, p: int) -> int:
    """An integer congruent to the p-adic unit part of x modulo p^3."""
    x = Fraction(x) / Fraction(p) ** _ord(x, p)
    mod = p**3
    return x.numerator * pow(x.denominator, -1, mod) % mod


def _cheb(X, n: int):
    """(X^{n+1} - X^{-n-1}) / (X - X^{-1}) for n >= -1."""
    if n < 0:
        return 0
    if abs(X * X - 1) < 1e-12:
        return (n + 1) * X**n
    return (X ** (n + 1) - X ** (-n - 1)) / (X - 1 / X)


def psi_poly(kind: str, p: int, xi, alpha):
    """Psi_p(xi; alpha) from the local case definitions ("unramified_odd_p", "p_equals_2", "steinberg")."""
    xi = Fraction(xi)
    if xi == 0:
        raise DomainError("xi must be nonzero")
    if kind == "unramified_odd_p" and p == 2 or kind == "p_equals_2" and p != 2:
        raise DomainError(f"kind {kind!r} does not apply at p = {p}")
    if kind not in ("unramified_odd_p", "p_equals_2", "steinberg"):
        raise DomainError(f"unknown kind {kind!r}")
    m = _ord(xi, p)
    if m < 0:
        return 0
    X = alpha
    if kind == "steinberg":
        return X ** (m // 2)
    if kind == "unramified_odd_p":
        if m % 2:
            return _cheb(X, (m - 1) // 2)
        return _cheb(X, m // 2) - p**-0.5 * hilbert_symbol(p, -xi, p) * _cheb(X, m // 2 - 1)
    u = _unit_part(xi, 2)
    if m % 2:
        return _cheb(X, (m - 1) // 2 - 1)
    if u % 4 == 3:
        return _cheb(X, m // 2) - 2**-0.5 * hilbert_symbol(2, xi, 2) * _cheb(X, m // 2 - 1)
    return _cheb(X, m // 2 - 1)


def psi_kind(f: Newform, p: int) -> str:
    if f.level % p == 0:
        return "steinberg"
    return "p_equals_2" if p == 2 else "unramified_odd_p"


def tau_unit(f: Newform, p: int) -> int:
    """A p-adic unit tau_p with (p, tau_p)_p = p^{1 - kappa'} a_f(p)."""
    eps = f.tau_signs[p]
    if eps == 1:
        return 1
    return next(t for t in range(2, p) if kronecker(t, p) == -1)


def in_local_support(f: Newform, xi) -> bool:
    """xi lies outside -tau_p Q_p^{x2} at every Steinberg prime."""
    xi = Fraction(xi)
    for p in f.bad_primes:
        if _ord(xi, p) % 2 == 0:
            # -xi / tau_p is a square iff its unit part is a square mod p
            u = _unit_part(-xi / tau_unit(f, p), p)
            if kronecker(u, p) == 1:
                return False
    return True


def _local_integer_factor(f: Newform, p: int, xi: Fraction, e: int) -> int:
    """p^{e (kappa' - 1/2)} Psi_p(xi; alpha_p) as an integer (e = ord_p of the square part)."""
    if f.level % p == 0:
        return f.ap(p) ** e
    a = f.prime_power_coefficient
    d, _ = fundamental_part(xi)
    # p | d puts every case on the branch without the Hilbert-symbol term
    if d % p == 0 or e == 0:
        return a(p, e)
    sym = hilbert_symbol(2, xi, 2) if p == 2 else hilbert_symbol(p, -xi, p)
    return a(p, e) - sym * p ** (f.weight // 2 - 1) * a(p, e - 1)


def extend_coefficient(h: PlusSpaceForm, xi: int) -> int:
    """c(xi) from c(d_xi) and the local factors; 0 off the plus space or the local support."""
    if xi in h._memo:
        return h._memo[xi]
    if xi <= 0:
        raise DomainError("xi must be positive")
    if not h.in_support(xi):
        return 0
    if h.weight_num % 2 == 0:
        raise DomainError("only odd kappa' plus spaces are supported")
    f = h.parent
    d, fr = fundamental_part(xi)
    if fr.denominator != 1:
        raise ArithmeticError("integral xi has integral square part")
    if not in_local_support(f, xi):
        h._memo[xi] = 0
        return 0
    if d > h.truncation:
        raise ExtensionRangeError(f"{h.label}: c({d}) is not stored")
    value = h.stored_coefficient(d)
    n = fr.numerator
    for p in prime_factors(n):
        e = _ord(Fraction(n), p)
        value *= _local_integer_factor(f, p, Fraction(xi), e)
    h._memo[xi] = value
    return value


def satake_alpha(f: Newform, p: int):
    """alpha_p: a unit-circle root at p not dividing N, p^{-1/2} eps_p at p | N."""
    return f.satake(p).alpha


def extend_coefficient_literal(h: PlusSpaceForm, xi: int) -> complex:
    """The same relation through ``psi_poly`` in floating point (independent route)."""
    if not h.in_support(xi):
        return 0j
    f = h.parent
    d, fr = fundamental_part(xi)
    if not in_local_support(f, xi):
        return 0j
    value = complex(h.stored_coefficient(d)) * float(fr) ** (h.weight_num - 0.5)
    for p in prime_factors(fr.numerator * fr.denominator) + [p for p in f.bad_primes if fr.numerator % p]:
        value *= psi_poly(psi_kind(f, p), p, Fraction(xi), satake_alpha(f, p))
    return value


# ---------------------------------------------------------------------------
# Kohnen-Zagier


def kohnen_zagier_ratio(h: PlusSpaceForm, D: int, lambda_central):
    """<f,f>/<h,h> = 2^{kappa'-1+nu(N)} D^{kappa'-1/2} Lambda(kappa', f x chi_{-D}) / c(D)^2.

    ``lambda_central`` excludes the conductor factor (gamma normalization).
    """
    d, fr = fundamental_part(D)
    if (d, fr) != (D, 1):
        raise DomainError(f"-{D} is not a fundamental discriminant")
    c = h.coefficient(D)
    if c == 0:
        raise VanishingCoefficient(f"{h.label}: c({D}) = 0")
    kp = h.weight_num
    nu = len(prime_factors(h.parent.level))
    with mpmath.workdps(mpmath.mp.dps + 10):
        v = mpmath.mpf(2) ** (kp - 1 + nu) * mpmath.mpf(D) ** (mpmath.mpf(2 * kp - 1) / 2) * lambda_central / c**2
    return +v


def coefficient_square_from_kz(h: PlusSpaceForm, D: int, lambda_central, norm_ratio_f_over_h):
    """c(D)^2 by inverting the Kohnen-Zagier relation (the sign of c(D) stays undetermined)."""
    kp = h.weight_num
    nu = len(prime_factors(h.parent.level))
    return mpmath.mpf(2) ** (kp - 1 + nu) * mpmath.mpf(D) ** (mpmath.mpf(2 * kp - 1) / 2) * lambda_central / norm_ratio_f_over_h


def kz_discriminants(h: PlusSpaceForm) -> list[int]:
    """Stored fundamental indices D with c(D) != 0 (usable for the Kohnen-Zagier ratio)."""
    out = []
    for D, c in sorted(h.stored.items()):
        if c and math.gcd(D, h.parent.level) == 1 and fundamental_part(D) == (D, 1):
            out.append(D)
    return out


def eligible_discriminants(f: Newform, bound: int) -> list[int]:
    """D <= bound with (D, N) = 1, -D = 1 mod 8, -D fundamental and (p, -tau_p D)_p = -1 for p | N."""
    out = []
    for D in range(1, bound + 1):
        if math.gcd(D, f.level) != 1 or (-D) % 8 != 1 or not is_fundamental_discriminant(-D):
            continue
        if all(hilbert_symbol(p, -tau_unit(f, p) * D, p) == -1 for p in f.bad_primes):
            out.append(D)
    return out
