"""Petersson norms of the integral-weight newform fixtures.

    <f, f> = [SL2(Z) : Gamma0(N)]^{-1} int_{Gamma0(N)\\H} |f|^2 y^k dmu

For squarefree N every coset of Gamma0(N)\\SL2(Z) has a representative

    gamma_{Q,t} = W_Q [[1, t], [0, Q]] / Q,     Q | N,  0 <= t < Q,

with W_Q an Atkin-Lehner matrix, so (f|_k gamma_{Q,t})(tau) = lambda_Q Q^{-k/2} f((tau + t)/Q).
On the standard fundamental domain F the argument (tau + t)/Q has imaginary
part at least sqrt(3)/(2Q) and the q-expansion converges geometrically.

The integral over F splits into the strip y >= 1, done in closed form by
Parseval (an incomplete gamma series), and the compact piece
sqrt(1 - x^2) <= y <= 1, done by tensor Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .numerics import DomainError, prime_factors
from .qseries import Newform, TruncationError

FLOAT_DIGITS = 14


class PrecisionShortfall(RuntimeError):
    """The fixture truncation is too small for the requested accuracy."""


@dataclass(frozen=True)
class CosetRep:
    matrix: tuple[int, int, int, int]  # (a, b, c, d), determinant 1
    Q: int  # Atkin-Lehner divisor attached to the cusp of this coset
    t: int


@dataclass(frozen=True)
class CosetSystem:
    level: int
    representatives: tuple[CosetRep, ...]

    def __len__(self) -> int:
        return len(self.representatives)

    def locate(self, c: int, d: int) -> CosetRep:
        """The representative whose coset contains any matrix with bottom row (c, d)."""
        N = self.level
        for rep in self.representatives:
            _, _, c2, d2 = rep.matrix
            if (c * d2 - d * c2) % N == 0:
                return rep
        raise ArithmeticError(f"bottom row ({c}, {d}) matches no coset")


def _squarefree_level(N: int) -> None:
    if N < 1 or any(N % (p * p) == 0 for p in prime_factors(N)):
        raise DomainError(f"level {N} is not squarefree")


def atkin_lehner_matrix(N: int, Q: int) -> tuple[int, int, int, int]:
    """An integral [[Q x, y], [N z, Q w]] of determinant Q."""
    _squarefree_level(N)
    if N % Q:
        raise DomainError(f"{Q} does not divide {N}")
    M = N // Q
    w = pow(Q, -1, M) if M > 1 else 1
    z = (Q * w - 1) // M
    return (Q, 1, N * z, Q * w)


def coset_reps(N: int) -> CosetSystem:
    _squarefree_level(N)
    reps = []
    for Q in sorted(q for q in range(1, N + 1) if N % q == 0):
        Qx, y, Nz, Qw = atkin_lehner_matrix(N, Q)
        x, z, w = Qx // Q, Nz // N, Qw // Q
        M = N // Q
        for t in range(Q):
            # W_Q [[1, t], [0, Q]] / Q
            reps.append(CosetRep((x, x * t + y, M * z, M * z * t + Q * w), Q, t))
    return CosetSystem(N, tuple(reps))


def index_gamma0(N: int) -> int:
    out = N
    for p in prime_factors(N):
        out = out // p * (p + 1)
    return out


# ---------------------------------------------------------------------------
# point evaluation


def reduce_to_fundamental_domain(z):
    """(tau, (a, b, c, d)) with tau in the standard fundamental domain and z = gamma tau."""
    z = mpmath.mpc(z)
    if z.imag <= 0:
        raise DomainError("point not in the upper half-plane")
    a, b, c, d = 1, 0, 0, 1  # z = gamma * tau with tau the running point
    for _ in range(10000):
        n = int(mpmath.floor(z.real + mpmath.mpf(1) / 2))
        if n:
            z -= n
            # tau_old = T^n tau_new  =>  gamma <- gamma T^n
            b += a * n
            d += c * n
        if abs(z) < 1 - mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
            z = -1 / z
            # tau_old = S^{-1} tau_new = [[0, 1], [-1, 0]] tau_new  =>  gamma <- gamma S^{-1}
            a, b, c, d = -b, a, -d, c
        else:
            return z, (a, b, c, d)
    raise RuntimeError("reduction did not terminate")


def _truncation_for(f: Newform, y_min, digits: int) -> int:
    """Smallest M with the q-expansion tail at Im = y_min below 10^{-digits} relative to a(1) q."""
    r = 2 * math.pi * float(y_min)
    half = (f.weight - 1) / 2 + 0.5
    target = -digits * math.log(10) - 2
    M = 1
    # |a(n)| <= 2 sqrt(n) n^{(k-1)/2}; bound the tail by a geometric series from n = M
    while True:
        ratio = math.exp(-r) * (1 + 1 / M) ** half
        if ratio < 1:
            tail = math.log(2) + half * math.log(M) - r * (M - 1) - math.log1p(-ratio)
            if tail < target:
                return M
        M += 1


def _coefficients(f: Newform, M: int) -> list[int]:
    if M > f.truncation:
        raise PrecisionShortfall(f"{f.label}: need {M} coefficients, fixture holds {f.truncation}")
    return [int(f.expansion[n]) for n in range(M + 1)]


def _qseries_value(coeffs, q):
    acc = 0
    for a in reversed(coeffs):
        acc = acc * q + a
    return acc


def evaluate_form(f: Newform, z, digits: int = 30):
    """f(z) for z in the upper half-plane, via SL2(Z) reduction and Atkin-Lehner unwinding."""
    with mpmath.workdps(digits + 10):
        tau, (a, b, c, d) = reduce_to_fundamental_domain(z)
        reps = coset_reps(f.level)
        rep = reps.locate(c, d)
        Q, k = rep.Q, f.weight
        lam = f.al_signs.get(Q, 1)
        w = (tau + rep.t) / Q
        M = _truncation_for(f, w.imag, digits + 3)
        val = _qseries_value(_coefficients(f, M), mpmath.exp(2j * mpmath.pi * w))
        # f(gamma tau) = (c tau + d)^k (f|gamma)(tau)
        out = (c * tau + d) ** k * lam * mpmath.mpf(Q) ** (-mpmath.mpf(k) / 2) * val
    with mpmath.workdps(digits):
        return +out


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormResult:
    value: float
    error_estimate: float
    nodes_used: int
    strip: float = 0.0
    compact: float = 0.0


def _strip_part(f: Newform, digits: int):
    """sum_Q Q^{1-k} sum_n a(n)^2 (Q/(4 pi n))^{k-1} Gamma(k-1, 4 pi n / Q)."""
    k = f.weight
    total = mpmath.mpf(0)
    for Q in (q for q in range(1, f.level + 1) if f.level % q == 0):
        # terms decay like e^{-4 pi n / Q}
        n_max = int((digits + 6) * math.log(10) * Q / (4 * math.pi)) + 10
        coeffs = _coefficients(f, n_max)
        s = mpmath.mpf(0)
        for n in range(1, n_max + 1):
            if coeffs[n]:
                x = 4 * mpmath.pi * n / Q
                s += coeffs[n] ** 2 * x ** (1 - k) * mpmath.gammainc(k - 1, x)
        total += mpmath.mpf(Q) ** (1 - k) * s
    return total


def _divisors(N: int) -> list[int]:
    return [q for q in range(1, N + 1) if N % q == 0]


def _compact_float(f: Newform, n: int, M: int) -> float:
    """Compact-part integral summed over all cosets, in double precision.

    For fixed Q the t-sum of |f((tau + t)/Q)|^2 equals Q sum_r |S_r|^2 with
    S_r the part of the q-expansion supported on n = r mod Q.
    """
    k = f.weight
    coeffs = np.array(_coefficients(f, M), dtype=float)
    x, wx = np.polynomial.legendre.leggauss(n)
    x, wx = x / 2, wx / 2
    u, wu = np.polynomial.legendre.leggauss(n)
    u, wu = (u + 1) / 2, wu / 2
    X, U = np.meshgrid(x, u, indexing="ij")
    lo = np.sqrt(1 - X * X)
    Y = lo + U * (1 - lo)
    W = np.outer(wx, wu) * (1 - lo) * Y ** (k - 2)
    total = 0.0
    for Q in _divisors(f.level):
        q = np.exp(2j * np.pi * (X + 1j * Y) / Q)
        qQ = q**Q
        acc = 0.0
        for r in range(Q):
            # S_r = q^r sum_j a(r + jQ) (q^Q)^j
            S = np.zeros_like(q)
            for a in coeffs[r::Q][::-1]:
                S = S * qQ + a
            acc = acc + np.abs(S * q**r) ** 2
        total += Q ** (1 - k) * float(np.sum(W * acc))
    return total


def _gl_nodes(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1] at the current mpmath precision."""
    nodes = []
    for i in range(1, n + 1):
        x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (n + mpmath.mpf(1) / 2))
        for _ in range(100):
            p0, p1 = mpmath.mpf(1), x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mpmath.eps * 4:
                break
        p0, p1 = mpmath.mpf(1), x
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = n * (x * p1 - p0) / (x * x - 1)
        nodes.append((x, 2 / ((1 - x * x) * dp * dp)))
    return nodes


def _compact_mp(f: Newform, n: int, M: int):
    k = f.weight
    coeffs = _coefficients(f, M)
    gl = _gl_nodes(n)
    total = mpmath.mpf(0)
    for Q in _divisors(f.level):
        part = mpmath.mpf(0)
        for xn, xw in gl:
            x = xn / 2
            lo = mpmath.sqrt(1 - x * x)
            for un, uw in gl:
                y = lo + (un + 1) / 2 * (1 - lo)
                q = mpmath.exp(2j * mpmath.pi * mpmath.mpc(x, y) / Q)
                S = [mpmath.mpc(0)] * Q
                qn = mpmath.mpc(1)
                for m in range(1, M + 1):
                    qn *= q
                    if coeffs[m]:
                        S[m % Q] += coeffs[m] * qn
                part += xw * uw / 4 * (1 - lo) * y ** (k - 2) * sum(v.real**2 + v.imag**2 for v in S)
        total += mpmath.mpf(Q) ** (1 - k) * part
    return total


def compact_by_cosets(f: Newform, reps, n: int = 8, digits: int = 20):
    """Compact-part integral as a literal sum over the given coset matrices, via ``evaluate_form``.

    Slow; used to check that the norm does not depend on the chosen representatives.
    """
    k = f.weight
    with mpmath.workdps(digits + 5):
        gl = _gl_nodes(n)
        total = mpmath.mpf(0)
        for a, b, c, d in reps:
            for xn, xw in gl:
                x = xn / 2
                lo = mpmath.sqrt(1 - x * x)
                for un, uw in gl:
                    tau = mpmath.mpc(x, lo + (un + 1) / 2 * (1 - lo))
                    z = (a * tau + b) / (c * tau + d)
                    v = evaluate_form(f, z, digits)
                    total += xw * uw / 4 * (1 - lo) * abs(v) ** 2 * z.imag**k / tau.imag**2
    return total


def petersson_norm(f: Newform, digits: int = FLOAT_DIGITS, start_nodes: int = 16, max_nodes: int = 512) -> NormResult:
    """<f, f> with an a posteriori error from successive quadrature refinements."""
    if digits < 1:
        raise ValueError("digits must be positive")
    N, k = f.level, f.weight
    y_min = math.sqrt(3) / 2 / N
    use_float = digits <= FLOAT_DIGITS
    M = _truncation_for(f, y_min, (FLOAT_DIGITS + 2) if use_float else digits + 3)
    idx = index_gamma0(N)
    with mpmath.workdps(max(digits, 15) + 10):
        strip = _strip_part(f, max(digits, 16))
        tol = mpmath.mpf(10) ** (-digits)
        prev, n, diff = None, start_nodes, None
        while n <= max_nodes:
            cur = _compact_float(f, n, M) if use_float else _compact_mp(f, n, M)
            if prev is not None:
                diff = abs(cur - prev)
                if diff <= tol * abs(strip + cur):
                    break
            prev, n = cur, int(n * 1.5)
        else:
            raise PrecisionShortfall(f"{f.label}: quadrature did not settle within {max_nodes} nodes")
        value = (strip + cur) / idx
        rounding = 1e-14 * abs(value) if use_float else mpmath.mpf(10) ** (-digits - 5) * abs(value)
        err = diff / idx + rounding
    return NormResult(float(value) if use_float else value, float(err), n * n * idx, strip / idx, cur / idx)


def scaled(f: Newform, c: int) -> Newform:
    """c * f, keeping the level, weight and Hecke data (only for sesquilinearity checks)."""
    from .qseries import QExpansion

    g = Newform.__new__(Newform)
    g.label, g.level, g.weight = f.label + f"*{c}", f.level, f.weight
    g.expansion = QExpansion.from_list([c * x for x in f.expansion.coefficients], f.truncation)
    g._cache = {}
    return g
