"""Exact moments of ``X(lam)`` through a polynomial recursion over the rationals.

With ``xi(lam)`` the compound Poisson sum of uniforms and ``Y = xi + lam X``,
the moments ``P_n(lam) = E[Y(lam)^n]`` solve

    P_n(lam) = 2 int_0^1 u^n P_n(lam u) du + psi_n(lam),

where ``psi_n`` only involves ``P_0..P_{n-1}`` and the moments ``g_r`` of
``xi``.  Matching coefficients of ``lam^k`` gives
``[lam^k] P_n = (n+k+1)/(n+k-1) [lam^k] psi_n``.  Everything here is exact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

MAX_ORDER = 20


class RationalPolynomial:
    """Polynomial with ``Fraction`` coefficients; ``coeffs[k]`` multiplies ``x**k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, coef=1) -> "RationalPolynomial":
        return cls([0] * k + [coef])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, RationalPolynomial):
            other = _lift(other)
            if other is NotImplemented:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPolynomial({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("lam" if k == 1 else f"lam^{k}")
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"({c})*{mono}")
        return " + ".join(terms)

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial(c * other for c in self.coeffs)
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = RationalPolynomial([1])
        for _ in range(e):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scale(self, mu) -> "RationalPolynomial":
        """``x -> P(mu x)``."""
        mu = Fraction(mu)
        return RationalPolynomial(c * mu**k for k, c in enumerate(self.coeffs))

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def integrate_unit(self) -> Fraction:
        """``int_0^1 P(x) dx``."""
        return sum((c / (k + 1) for k, c in enumerate(self.coeffs)), Fraction(0))

    def as_pairs(self) -> list:
        """Coefficients as ``[numerator, denominator]`` pairs (JSON friendly)."""
        return [[c.numerator, c.denominator] for c in self.coeffs]


def _lift(other):
    if isinstance(other, RationalPolynomial):
        return other
    if isinstance(other, (int, Fraction)):
        return RationalPolynomial([other])
    return NotImplemented


def beta_integral(a: int, b: int) -> Fraction:
    """``int_0^1 u^a (1-u)^b du = a! b! / (a+b+1)!``."""
    return Fraction(math.factorial(a) * math.factorial(b), math.factorial(a + b + 1))


def split_product_integral(a: int, b: int, P: RationalPolynomial, Q: RationalPolynomial) -> RationalPolynomial:
    """``lam -> int_0^1 u^a (1-u)^b P(lam u) Q(lam (1-u)) du`` as an exact polynomial."""
    out = {}
    for i, p in enumerate(P.coeffs):
        if p == 0:
            continue
        for j, q in enumerate(Q.coeffs):
            if q == 0:
                continue
            out[i + j] = out.get(i + j, Fraction(0)) + p * q * beta_integral(a + i, b + j)
    if not out:
        return RationalPolynomial()
    return RationalPolynomial(out.get(k, 0) for k in range(max(out) + 1))


def scaled_moment_integral(n: int, P: RationalPolynomial) -> RationalPolynomial:
    """``lam -> int_0^1 u^n P(lam u) du``."""
    return RationalPolynomial(c / (n + k + 1) for k, c in enumerate(P.coeffs))


def _check_order(n_max: int) -> int:
    if not 0 <= n_max <= MAX_ORDER:
        raise ValueError(f"order must lie in 0..{MAX_ORDER}")
    return n_max


@lru_cache(maxsize=None)
def _g_table(n_max: int) -> tuple:
    # E[exp(s xi)] = exp(lam * h(s)), h(s) = sum_{j>=1} s^j/(j+1)!.  With
    # F = exp(lam h), F' = lam h' F gives r a_r = lam sum_j j h_j a_{r-j}
    # for the power-series coefficients a_r (polynomials in lam).
    h = [Fraction(0)] + [Fraction(1, math.factorial(j + 1)) for j in range(1, n_max + 1)]
    lam = RationalPolynomial([0, 1])
    a = [RationalPolynomial([1])]
    for r in range(1, n_max + 1):
        acc = RationalPolynomial()
        for j in range(1, r + 1):
            acc = acc + a[r - j] * (j * h[j])
        a.append(lam * acc * Fraction(1, r))
    return tuple(a[r] * math.factorial(r) for r in range(n_max + 1))


def g_moments(n_max: int) -> list:
    """``[g_0, ..., g_{n_max}]`` with ``g_r(lam) = E[xi(lam)^r]``."""
    return list(_g_table(_check_order(n_max)))


def _multinomial(n: int, parts) -> int:
    out = math.factorial(n)
    for k in parts:
        out //= math.factorial(k)
    return out


def psi_n(n: int, P: list, g: list) -> RationalPolynomial:
    """``psi_n`` from ``P_0..P_{n-1}`` and ``g_0..g_n``."""
    if n < 1:
        raise ValueError("psi_n is defined for n >= 1")
    if len(P) < n or len(g) < n + 1:
        raise ValueError("need P_0..P_{n-1} and g_0..g_n")
    total = RationalPolynomial()
    for r in range(n + 1):
        for k in range(n - r + 1):
            ell = n - r - k
            if k >= n or ell >= n:
                continue
            term = g[r] * split_product_integral(k, ell, P[k], P[ell])
            total = total + term * _multinomial(n, (r, k, ell))
    return total


@lru_cache(maxsize=None)
def _recursion(n_max: int) -> tuple:
    g = _g_table(n_max)
    P = [RationalPolynomial([1])]
    psis = [RationalPolynomial()]
    for n in range(1, n_max + 1):
        psi = psi_n(n, P, g)
        coeffs = []
        for k, c in enumerate(psi.coeffs):
            if (n, k) == (1, 0):
                coeffs.append(Fraction(0))  # fixed by P_1(0) = 0
            else:
                coeffs.append(Fraction(n + k + 1, n + k - 1) * c)
        P.append(RationalPolynomial(coeffs))
        psis.append(psi)
    return tuple(P), tuple(psis)


def P_n(n_max: int) -> list:
    """``[P_0, ..., P_{n_max}]``, the moments of ``Y(lam) = xi(lam) + lam X(lam)``."""
    return list(_recursion(_check_order(n_max))[0])


def psi_table(n_max: int) -> list:
    """``[0, psi_1, ..., psi_{n_max}]`` as produced alongside :func:`P_n`."""
    return list(_recursion(_check_order(n_max))[1])


def integral_equation_residual(n: int, P: RationalPolynomial, psi: RationalPolynomial) -> RationalPolynomial:
    """``P - 2 int_0^1 u^n P(lam u) du - psi``; the zero polynomial when the recursion holds."""
    return P - scaled_moment_integral(n, P) * 2 - psi


def X_lambda_moments(n_max: int) -> list:
    """``[lam^m E[X(lam)^m] for m = 0..n_max]`` from ``P_m = sum_k C(m,k) g_{m-k} lam^k E[X^k]``."""
    P = P_n(n_max)
    g = g_moments(n_max)
    M = [RationalPolynomial([1])]
    for m in range(1, n_max + 1):
        rest = RationalPolynomial()
        for k in range(m):
            rest = rest + g[m - k] * M[k] * math.comb(m, k)
        M.append(P[m] - rest)
    return M


def X_lambda_variance_poly() -> RationalPolynomial:
    """``lam^2 Var X(lam)`` as a polynomial."""
    M = X_lambda_moments(2)
    return M[2] - M[1] * M[1]


def mergesort_series(tolerance: float = 1e-12) -> float:
    """``sum_{k>=0} 2^k / ((2^k+2)(2^k+3))`` to within ``tolerance``.

    Terms after index ``k`` sum to less than ``2^-k``, which sets the stopping rule.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    total = 0.0
    k = 0
    while True:
        x = 2.0**k
        total += x / ((x + 2.0) * (x + 3.0))
        if 2.0**-k < tolerance / 2:
            return total
        k += 1


def moment_tables(n_max: int) -> dict:
    """``g``, ``psi``, ``P`` and ``lam^n E[X^n]`` tables as numerator/denominator pairs."""
    return {
        "g": [p.as_pairs() for p in g_moments(n_max)],
        "psi": [p.as_pairs() for p in psi_table(n_max)],
        "P": [p.as_pairs() for p in P_n(n_max)],
        "lam_pow_n_EXn": [p.as_pairs() for p in X_lambda_moments(n_max)],
    }
