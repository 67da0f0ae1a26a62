from fractions import Fraction

import pytest
import sympy as sp

from erratic.moments import (
    MAX_ORDER,
    RationalPolynomial,
    X_lambda_moments,
    X_lambda_variance_poly,
    beta_integral,
    g_moments,
    integral_equation_residual,
    mergesort_series,
    moment_tables,
    P_n,
    psi_n,
    psi_table,
    split_product_integral,
)

F = Fraction
lam_s, s_s, u_s = sp.symbols("lam s u")


def to_sympy(poly):
    return sum(sp.Rational(c.numerator, c.denominator) * lam_s**k for k, c in enumerate(poly.coeffs))


def poly(*coeffs):
    return RationalPolynomial(coeffs)


def test_arithmetic():
    a = poly(1, 2)
    b = poly(0, F(1, 2), 3)
    assert a + b == poly(1, F(5, 2), 3)
    assert a * b == poly(0, F(1, 2), 4, 6)
    assert a - a == RationalPolynomial()
    assert (a - a).degree == -1
    assert a.scale(F(1, 2)) == poly(1, 1)
    assert b.derivative() == poly(F(1, 2), 6)
    assert b.integrate_unit() == F(1, 4) + 1
    assert a(F(1, 3)) == F(5, 3)
    assert a**2 == poly(1, 4, 4)
    assert 2 * a == poly(2, 4)
    assert str(poly(0, F(1, 2))) == "(1/2)*lam"


def test_beta_integral_against_sympy():
    for a in range(5):
        for b in range(5):
            expected = sp.integrate(u_s**a * (1 - u_s) ** b, (u_s, 0, 1))
            assert sp.Rational(beta_integral(a, b)) == expected


def test_split_product_against_sympy():
    P = poly(1, F(2, 3), F(-1, 5))
    Q = poly(0, 2, F(1, 7))
    got = to_sympy(split_product_integral(2, 1, P, Q))
    expr = u_s**2 * (1 - u_s) * to_sympy(P).subs(lam_s, lam_s * u_s) * to_sympy(Q).subs(lam_s, lam_s * (1 - u_s))
    assert sp.expand(sp.integrate(expr, (u_s, 0, 1)) - got) == 0


def test_g_low_orders():
    g = g_moments(3)
    assert g[1] == poly(0, F(1, 2))
    assert g[2] == poly(0, F(1, 3), F(1, 4))
    assert g[3] == poly(0, F(1, 4), F(1, 2), F(1, 8))


def test_g_against_sympy_series():
    n = 6
    h = sum(s_s**j / sp.factorial(j + 1) for j in range(1, n + 1))
    series = sp.series(sp.exp(lam_s * h), s_s, 0, n + 1).removeO()
    for r, g in enumerate(g_moments(n)):
        expected = sp.expand(series.coeff(s_s, r) * sp.factorial(r))
        assert sp.expand(expected - to_sympy(g)) == 0


def test_g_shape():
    for r, g in enumerate(g_moments(12)):
        assert g.degree == r
        assert all(c >= 0 for c in g.coeffs)
        if r:
            assert g(0) == 0


def test_psi_and_P_low_orders():
    assert psi_table(2)[1] == poly(0, F(1, 2))
    assert psi_table(2)[2] == poly(0, F(1, 3), F(7, 5))
    P = P_n(2)
    assert P[1] == poly(0, F(3, 2))
    assert P[2] == poly(0, F(2, 3), F(7, 3))


def test_psi2_against_sympy_definition():
    # direct symbolic evaluation of the defining sum for n = 2
    g = [sp.Integer(1), lam_s / 2, lam_s / 3 + lam_s**2 / 4]
    P = [sp.Integer(1), sp.Rational(3, 2) * lam_s]
    total = 0
    for r in range(3):
        for k in range(3 - r):
            ell = 2 - r - k
            if k >= 2 or ell >= 2:
                continue
            mult = sp.factorial(2) / (sp.factorial(r) * sp.factorial(k) * sp.factorial(ell))
            integrand = u_s**k * (1 - u_s) ** ell * P[k].subs(lam_s, lam_s * u_s) * P[ell].subs(lam_s, lam_s * (1 - u_s))
            total += mult * g[r] * sp.integrate(integrand, (u_s, 0, 1))
    assert sp.expand(total - to_sympy(psi_table(2)[2])) == 0


def test_psi_requires_inputs():
    with pytest.raises(ValueError):
        psi_n(3, P_n(1), g_moments(3))
    with pytest.raises(ValueError):
        psi_n(0, [], [])


@pytest.mark.parametrize("n", range(1, 11))
def test_integral_equation_holds(n):
    P = P_n(10)
    psi = psi_table(10)
    assert integral_equation_residual(n, P[n], psi[n]).is_zero()


def test_P_shape():
    for n, P in enumerate(P_n(MAX_ORDER)):
        assert P.degree == n
        if n:
            assert P(0) == 0
    for n, psi in enumerate(psi_table(10)):
        assert psi(0) == 0


def test_X_moments():
    M = X_lambda_moments(2)
    assert M[1] == poly(0, 1)
    assert M[2] == poly(0, F(1, 3), F(13, 12))
    assert X_lambda_variance_poly() == poly(0, F(1, 3), F(1, 12))
    assert M[2](2) == 5


def test_X_moments_vanish_at_zero():
    for n, M in enumerate(X_lambda_moments(8)):
        assert M.degree == n
        if n:
            assert M.coeff(0) == 0
            assert abs(float(M(F(1, 10**6)))) < 1e-5


def test_order_cap():
    with pytest.raises(ValueError):
        P_n(MAX_ORDER + 1)


def test_mergesort_series():
    assert abs(mergesort_series(1e-12) - 0.454674373) < 1e-9
    assert mergesort_series(1e-12) < 1
    with pytest.raises(ValueError):
        mergesort_series(0)


def test_mergesort_series_first_term():
    # first term alone is 1/12; the stopping rule with a huge tolerance keeps only it
    assert mergesort_series(4.0) == pytest.approx(1 / 12)


def test_tables_are_pairs():
    t = moment_tables(2)
    assert t["P"][2] == [[0, 1], [2, 3], [7, 3]]
    assert set(t) == {"g", "psi", "P", "lam_pow_n_EXn"}
