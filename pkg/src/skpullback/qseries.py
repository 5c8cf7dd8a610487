"""Truncated q-expansions, eta quotients, Eisenstein series and newform fixtures."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

import numpy as np
import sympy

from .numerics import DomainError, is_prime, prime_factors

DEFAULT_TRUNCATION = 2000


class TruncationError(ValueError):
    """A coefficient beyond the valid range of a truncated expansion was requested."""


class UnsupportedFixture(ValueError):
    pass


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


@dataclass(frozen=True)
class QExpansion:
    """sum_{n <= M} a(n) q^n with exact coefficients; ``M`` is the truncation."""

    coefficients: tuple
    truncation: int

    @classmethod
    def from_list(cls, coeffs: Sequence, truncation: int | None = None) -> "QExpansion":
        M = len(coeffs) - 1 if truncation is None else truncation
        c = [_clean(x) for x in list(coeffs)[: M + 1]]
        c += [0] * (M + 1 - len(c))
        return cls(tuple(c), M)

    @classmethod
    def one(cls, M: int) -> "QExpansion":
        return cls.from_list([1], M)

    def __getitem__(self, n: int):
        if n < 0:
            return 0
        if n > self.truncation:
            raise TruncationError(f"coefficient {n} beyond truncation {self.truncation}")
        return self.coefficients[n]

    def __len__(self) -> int:
        return self.truncation + 1

    def _binary(self, other):
        if isinstance(other, QExpansion):
            M = min(self.truncation, other.truncation)
            return M, self.coefficients[: M + 1], other.coefficients[: M + 1]
        M = self.truncation
        return M, self.coefficients, (other,) + (0,) * M

    def __add__(self, other):
        M, a, b = self._binary(other)
        return QExpansion.from_list([x + y for x, y in zip(a, b)], M)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion.from_list([-x for x in self.coefficients], self.truncation)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return QExpansion.from_list([other * x for x in self.coefficients], self.truncation)
        # a leading zero block in one factor extends the valid range of the product
        va, vb = self.valuation(), other.valuation()
        M = min(self.truncation + vb, other.truncation + va)
        a, b = self.coefficients[: M + 1], other.coefficients[: M + 1]
        if all(type(x) is int for x in a) and all(type(x) is int for x in b):
            return QExpansion.from_list(_kronecker_mul(a, b, M), M)
        arr = np.array(a, dtype=object)
        out = np.zeros(M + 1, dtype=object)
        for n, c in enumerate(b):
            if c:
                out[n:] += c * arr[: M + 1 - n]
        return QExpansion.from_list(list(out), M)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = QExpansion.one(self.truncation)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def valuation(self) -> int:
        for n, c in enumerate(self.coefficients):
            if c:
                return n
        return self.truncation + 1

    def inverse(self) -> "QExpansion":
        if self.coefficients[0] == 0:
            raise DomainError("series with zero constant term is not invertible")
        M = self.truncation
        a = self.coefficients
        inv = [Fraction(1) / a[0]]
        for n in range(1, M + 1):
            s = sum(a[k] * inv[n - k] for k in range(1, n + 1) if a[k])
            inv.append(-s * inv[0])
        return QExpansion.from_list(inv, M)

    def scale(self, d: int) -> "QExpansion":
        """f(q) -> f(q^d)."""
        M = self.truncation * d
        out = [0] * (M + 1)
        for n, c in enumerate(self.coefficients):
            out[n * d] = c
        return QExpansion.from_list(out, M)

    def truncate(self, M: int) -> "QExpansion":
        if M > self.truncation:
            raise TruncationError(f"cannot extend truncation {self.truncation} to {M}")
        return QExpansion.from_list(self.coefficients[: M + 1], M)

    def hecke(self, p: int, k: int, level: int = 1) -> "QExpansion":
        """T_p (or U_p when p | level) on a weight-k expansion."""
        M = self.truncation // p
        out = []
        for n in range(M + 1):
            c = self.coefficients[n * p]
            if level % p and n % p == 0:
                c += p ** (k - 1) * self.coefficients[n // p]
            out.append(c)
        return QExpansion.from_list(out, M)

    def to_text(self, header: str) -> str:
        lines = [f"# {header}"]
        lines += [f"{n} {c}" for n, c in enumerate(self.coefficients)]
        return "\n".join(lines) + "\n"


def _kronecker_mul(a: Sequence[int], b: Sequence[int], M: int) -> list[int]:
    """Truncated product of integer sequences by packing them into one big integer."""
    bound = max(map(abs, a), default=0) * max(map(abs, b), default=0) * (min(len(a), len(b)) + 1)
    nbytes = (bound.bit_length() + 2) // 8 + 1
    shift = 8 * nbytes
    x = sum(c << (shift * n) for n, c in enumerate(a) if c)
    y = sum(c << (shift * n) for n, c in enumerate(b) if c)
    z = x * y
    # balanced offset so every packed digit becomes non-negative
    half = 1 << (shift - 1)
    digits = len(a) + len(b)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * digits, "little")
    raw = (z + offset).to_bytes(nbytes * digits, "little")
    return [int.from_bytes(raw[n * nbytes : (n + 1) * nbytes], "little") - half for n in range(M + 1)]


def _euler_product_series(M: int) -> np.ndarray:
    """prod_{n>=1} (1 - q^n) to q^M via pentagonal numbers (sparse, int64 exact)."""
    out = np.zeros(M + 1, dtype=object)
    k = 0
    while True:
        done = True
        for kk in ((k,) if k == 0 else (k, -k)):
            e = kk * (3 * kk - 1) // 2
            if e <= M:
                out[e] += -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    return out


def eta_quotient(spec: Iterable[tuple[int, int]], M: int) -> QExpansion:
    """prod eta(d tau)^e as a q-expansion up to q^M.

    The leading power sum(d*e)/24 must be a non-negative integer.
    """
    spec = list(spec)
    lead24 = sum(d * e for d, e in spec)
    if lead24 % 24 or lead24 < 0:
        raise UnsupportedFixture(f"leading exponent {Fraction(lead24, 24)} is not a non-negative integer")
    lead = lead24 // 24
    if lead > M:
        return QExpansion.from_list([0], M)
    N = M - lead
    base = _euler_product_series(N)
    series = QExpansion.one(N)
    for d, e in spec:
        scaled = np.zeros(N + 1, dtype=object)
        scaled[:: d] = base[: N // d + 1]
        factor = QExpansion.from_list(list(scaled), N)
        series = series * factor**e
    return QExpansion.from_list([0] * lead + list(series.coefficients), M)


def bernoulli(k: int) -> Fraction:
    b = sympy.bernoulli(k)
    return Fraction(int(b.p), int(b.q))


def divisor_sigma_table(M: int, power: int) -> list[int]:
    s = [0] * (M + 1)
    for d in range(1, M + 1):
        dp = d**power
        for n in range(d, M + 1, d):
            s[n] += dp
    return s


def eisenstein(k: int, M: int) -> QExpansion:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise DomainError("eisenstein needs an even weight k >= 4")
    c = -Fraction(2 * k) / bernoulli(k)
    sig = divisor_sigma_table(M, k - 1)
    return QExpansion.from_list([1] + [c * sig[n] for n in range(1, M + 1)], M)


# ---------------------------------------------------------------------------
# newforms


class DataIntegrityError(ValueError):
    pass


@dataclass(frozen=True)
class SatakeData:
    p: int
    ramified: bool
    alpha: complex  # a root of the normalized Hecke polynomial (unit circle when unramified)
    epsilon: int | None = None  # sign p^{1-k/2} a(p) at p | N

    @property
    def trace(self):
        """alpha + alpha^{-1}."""
        return self.alpha + 1 / self.alpha


@dataclass
class Newform:
    label: str
    level: int
    weight: int
    expansion: QExpansion
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.expansion[1] != 1:
            raise DataIntegrityError(f"{self.label}: not normalized")

    @property
    def truncation(self) -> int:
        return self.expansion.truncation

    @property
    def kappa_prime(self) -> int:
        """kappa' when the form plays the role of f (weight 2 kappa')."""
        return self.weight // 2

    @property
    def kappa(self) -> int:
        """kappa when the form plays the role of g (weight kappa + 1)."""
        return self.weight - 1

    def ap(self, p: int) -> int:
        return int(self.expansion[p])

    def coefficient(self, n: int) -> int:
        """a(n) from the stored a(p) by multiplicativity and Hecke recurrences."""
        if n < 1:
            raise DomainError("coefficient index must be positive")
        result = 1
        for p in prime_factors(n):
            r = 0
            while n % p == 0:
                n //= p
                r += 1
            result *= self.prime_power_coefficient(p, r)
        return result

    def prime_power_coefficient(self, p: int, r: int) -> int:
        key = (p, r)
        if key in self._cache:
            return self._cache[key]
        a = self.ap(p)
        if self.level % p == 0:
            v = a**r
        else:
            prev, cur = 1, a
            for _ in range(r - 1):
                prev, cur = cur, a * cur - p ** (self.weight - 1) * prev
            v = cur if r else 1
        self._cache[key] = v
        return v

    @property
    def bad_primes(self) -> list[int]:
        return prime_factors(self.level)

    @property
    def tau_signs(self) -> dict[int, int]:
        """eps_p = p^{1-k/2} a(p) at p | N (the sign attached to tau_p)."""
        out = {}
        for p in self.bad_primes:
            e = Fraction(self.ap(p)) * Fraction(p) ** (1 - Fraction(self.weight, 2))
            if e not in (1, -1):
                raise DataIntegrityError(f"{self.label}: a({p}) is not +-p^(k/2-1)")
            out[p] = int(e)
        return out

    @property
    def al_signs(self) -> dict[int, int]:
        """Atkin-Lehner eigenvalue lambda_Q for every Q | N (Q > 1)."""
        eps = self.tau_signs
        out = {}
        ps = self.bad_primes
        for mask in range(1, 2 ** len(ps)):
            Q, lam = 1, 1
            for i, p in enumerate(ps):
                if mask >> i & 1:
                    Q *= p
                    lam *= -eps[p]
            out[Q] = lam
        return out

    def satake(self, p: int) -> SatakeData:
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        k = self.weight
        if self.level % p == 0:
            eps = self.tau_signs[p]
            return SatakeData(p, True, eps / p**0.5, eps)
        a = self.ap(p)
        if a * a > 4 * p ** (k - 1):
            raise DataIntegrityError(f"{self.label}: Ramanujan bound fails at p = {p}")
        t = a / p ** ((k - 1) / 2)
        root = complex(t * t - 4) ** 0.5
        return SatakeData(p, False, (t + root) / 2)

    def hecke_eigen_residual(self, p: int) -> int:
        """Max |T_p f - a(p) f| over the valid range (0 for an eigenform)."""
        tf = self.expansion.hecke(p, self.weight, self.level)
        M = tf.truncation
        return max(abs(tf[n] - self.ap(p) * self.expansion[n]) for n in range(M + 1))

    def to_text(self) -> str:
        return self.expansion.to_text(f"{self.label} {self.weight} {self.level} {self.truncation}")


def newform_from_text(text: str) -> Newform:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].lstrip("#").split()
    label, weight, level, M = head[0], int(head[1]), int(head[2]), int(head[3])
    coeffs = [0] * (M + 1)
    for ln in lines[1:]:
        n, c = ln.split()
        coeffs[int(n)] = int(c)
    return Newform(label, level, weight, QExpansion.from_list(coeffs, M))


def _build_delta(M: int) -> QExpansion:
    return eta_quotient([(1, 24)], M)


def _build_f18(M: int) -> QExpansion:
    return _build_delta(M) * eisenstein(6, M)


def _build_f2_15(M: int) -> QExpansion:
    return eta_quotient([(1, 1), (3, 1), (5, 1), (15, 1)], M)


_REGISTRY = {
    "g12.1": (1, 12, _build_delta),
    "f18.1": (1, 18, _build_f18),
    "f2.15": (15, 2, _build_f2_15),
    "g2.15": (15, 2, _build_f2_15),
}


def fixture_labels() -> list[str]:
    return sorted(_REGISTRY)


@functools.lru_cache(maxsize=None)
def _cached_fixture(label: str, M: int) -> Newform:
    level, weight, build = _REGISTRY[label]
    return Newform(label, level, weight, build(M))


def newform_fixture(label: str, M: int = DEFAULT_TRUNCATION) -> Newform:
    if label not in _REGISTRY:
        raise UnsupportedFixture(f"unknown fixture label {label!r}")
    return _cached_fixture(label, M)


def theta_binary(a: int, b: int, c: int, M: int) -> QExpansion:
    """Theta series of the positive binary form a x^2 + b xy + c y^2."""
    out = [0] * (M + 1)
    disc = 4 * a * c - b * b
    ymax = isqrt(4 * a * M // disc) + 1
    for y in range(-ymax, ymax + 1):
        xr = isqrt(M // a + 1) + abs(b * y) // (2 * a) + 1
        for x in range(-xr, xr + 1):
            v = a * x * x + b * x * y + c * y * y
            if v <= M:
                out[v] += 1
    return QExpansion.from_list(out, M)

