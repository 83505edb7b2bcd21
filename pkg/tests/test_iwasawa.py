from __future__ import annotations

import math
from fractions import Fraction

import pytest
import sympy

from lpzeros.characters import (
    DirichletCharacter,
    character_ring,
    enumerate_classes,
    kernel_families,
    omega_character,
)
from lpzeros.iwasawa import (
    check_levels,
    generalized_bernoulli,
    h_poly,
    is_type_w,
    lp_closed_form,
    lp_evaluate,
    lp_interpolated_value,
    lp_interpolated_value_exact,
    lp_truncated,
    stickelberger_series,
    truncated_euler_factor,
    typeW_twist,
)
from lpzeros.padic import PadicElement, cyclotomic_data, teichmuller, vp_frac
from lpzeros.series import mu_lambda

TRIV = DirichletCharacter.trivial(1)


def sympy_gen_bernoulli(n: int, f: int, values: dict[int, int]) -> Fraction:
    """f^(n-1) sum chi(a) B_n(a/f) with sympy's Bernoulli polynomials."""
    x = sympy.Symbol("x")
    Bn = sympy.bernoulli(n, x)
    tot = sum(values[a] * Bn.subs(x, sympy.Rational(a, f)) for a in values)
    tot = sympy.Rational(f) ** (n - 1) * tot
    return Fraction(int(tot.p), int(tot.q))


def quadratic_values(chi: DirichletCharacter) -> dict[int, int]:
    return {a: (1 if chi.exponent(a) == 0 else -1) for a in range(1, chi.modulus + 1) if chi.exponent(a) is not None}


def padic_equal(x: PadicElement, r: Fraction) -> bool:
    return (x - PadicElement.from_fraction(x.ring, r, x.prec)).is_zero()


# H_chi

def test_h_poly_trivial_is_T():
    H = h_poly(TRIV, 5)
    assert not H.is_one
    c0, c1 = H.coefficients(10)
    assert c0.is_zero() and c1.to_int() == 1


@pytest.mark.parametrize("p,a", [(5, 2), (7, 2), (7, 4), (11, 6), (13, 10)])
def test_h_poly_omega_power_is_one(p, a):
    assert h_poly(omega_character(p, a), p).is_one


def test_h_poly_type_w_p3():
    chi = [c.representative for c in enumerate_classes(3, 9, lower=9) if c.representative.order == 3][0]
    assert is_type_w(chi, 3)
    H = h_poly(chi, 3)
    assert not H.is_one
    z = H.zeta(12)
    assert not (z - PadicElement.from_int(z.ring, 1, 12)).is_zero()
    assert (z ** 3 - PadicElement.from_int(z.ring, 1, 12)).is_zero()


# generalized Bernoulli numbers

def test_bernoulli_examples():
    assert generalized_bernoulli(4, TRIV).rational() == Fraction(-1, 30)
    chi4 = DirichletCharacter.from_function(4, 2, lambda a: 0 if a % 4 == 1 else 1)
    assert generalized_bernoulli(1, chi4).rational() == Fraction(-1, 2)
    leg5 = DirichletCharacter.from_function(5, 2, lambda a: 0 if pow(a, 2, 5) == 1 else 1)
    assert generalized_bernoulli(2, leg5).rational() == Fraction(4, 5)


def test_bernoulli_trivial_n1_rejected():
    with pytest.raises(ValueError):
        generalized_bernoulli(1, TRIV)


@pytest.mark.parametrize("f", [3, 4, 5, 7, 8, 12, 13, 21, 24])
def test_bernoulli_quadratic_against_sympy(f):
    for fam in kernel_families(f, even=None):
        chi = fam[0]
        if chi.order != 2:
            continue
        vals = quadratic_values(chi)
        for n in range(1, 7):
            got = generalized_bernoulli(n, chi).rational()
            assert got == sympy_gen_bernoulli(n, f, vals)
            if (n % 2 == 0) != chi.is_even:
                assert got == 0


@pytest.mark.parametrize("n", range(2, 13))
def test_bernoulli_trivial_against_sympy(n):
    b = sympy.bernoulli(n)
    assert generalized_bernoulli(n, TRIV).rational() == Fraction(int(b.p), int(b.q))


# interpolated values

def test_interpolated_examples():
    w2 = omega_character(5, 2)
    assert lp_interpolated_value_exact(w2, -1, 5).rational() == Fraction(1, 3)
    assert lp_interpolated_value(w2, -1, 5, prec=10).to_int() % 5 == 2
    assert lp_interpolated_value_exact(TRIV, -3, 5).rational() == Fraction(-31, 30)
    # trivial chi at s = -1 picks up B_{2, omega^2} = 4/5 with no Euler factor
    assert lp_interpolated_value_exact(TRIV, -1, 5).rational() == Fraction(-2, 5)


@pytest.mark.parametrize("p,m", [(5, -1), (5, -3), (7, -1), (7, -3), (7, -5), (11, -7), (3, -1), (3, -3)])
def test_interpolated_omega_power(p, m):
    n = 1 - m
    chi = omega_character(p, 1 - m)
    b = sympy.bernoulli(n)
    expected = -Fraction(int(b.p), int(b.q)) / n * (1 - p ** (n - 1))
    val = lp_interpolated_value(chi, m, p, prec=15)
    assert padic_equal(val, expected)


def test_interpolated_rejects_positive():
    with pytest.raises(ValueError):
        lp_interpolated_value(TRIV, 1, 5)


# Stickelberger series

def test_stickelberger_p5_omega2():
    w2 = omega_character(5, 2)
    S = stickelberger_series(w2, 5, 3)
    u = cyclotomic_data(5).u
    from lpzeros.padic import series_eval

    t = PadicElement.from_int(S.ring, u ** 2 - 1, 10)
    val = series_eval(S, t)
    assert val.prec >= 2
    assert padic_equal(val.with_prec(2), Fraction(1, 3))
    assert S.mu_floor == 0
    ml = mu_lambda(S)
    assert (ml.mu, ml.lam) == (0, 0)


def test_stickelberger_p37_irregular_constant_term():
    chi = omega_character(37, 32)
    S = stickelberger_series(chi, 37, 2, L=4)
    b = sympy.bernoulli(32)
    assert vp_frac(Fraction(int(b.p), int(b.q)), 37) == 1
    assert S.coeffs[0].valuation() == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_mu_floor_by_parity_of_p(p):
    for cls in enumerate_classes(p, 40)[:12]:
        chi = cls.representative
        S = stickelberger_series(chi, p, 3 if p < 5 else 2, L=8)
        assert S.mu_floor == (1 if p == 2 else 0)
        for c in S.coeffs:
            v = c.valuation()
            assert v is None or v >= S.mu_floor


@pytest.mark.parametrize("p", [2, 3, 5])
def test_level_stability(p):
    for cls in enumerate_classes(p, 30)[:8]:
        check_levels(cls.representative, p, 4 if p < 5 else 3, L=10)


def sample_chars(p, bound=40, limit=8):
    out = [TRIV] + [c.representative for c in enumerate_classes(p, bound)]
    return out[:limit]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_oracle_consistency(p):
    """lp_evaluate agrees with both the Bernoulli oracle and the closed form."""
    n = {2: 6, 3: 5, 5: 4, 7: 3}[p]
    for chi in sample_chars(p):
        S = stickelberger_series(chi, p, n, L=16)
        for m in (0, -1, -2, -3, -4):
            exact = lp_interpolated_value_exact(chi, m, p)
            if not exact.terms:
                continue
            val = lp_evaluate(chi, m, p, series=S)
            ref = lp_interpolated_value(chi, m, p, prec=math.ceil(val.prec) + 2)
            assert (val - ref).is_zero(), (chi, m)
            cf = lp_closed_form(chi, m, p, prec=math.ceil(val.prec))
            assert (val - cf).is_zero(), (chi, m)


def test_pole_at_one():
    with pytest.raises(ZeroDivisionError):
        lp_evaluate(TRIV, 1, 5)
    S = stickelberger_series(TRIV, 5, 3)
    assert S.coeffs[0].valuation() == 0


# type W twist

def _type_w_p3():
    return [c.representative for c in enumerate_classes(3, 9, lower=9) if c.representative.order == 3][0]


def test_twist_identity():
    w2 = omega_character(5, 2)
    S = stickelberger_series(w2, 5, 3)
    one = PadicElement.from_int(S.ring, 1, 20)
    T = typeW_twist(S, one)
    assert T.coeffs == S.coeffs


@pytest.mark.parametrize("f1", [1, 5, 8, 13])
def test_twist_matches_direct_series(f1):
    chi2 = _type_w_p3()
    if f1 == 1:
        chi1 = TRIV
    else:
        chi1 = [fam[0] for fam in kernel_families(f1) if fam[0].order == 2][0]
    f = chi1.modulus * 9
    chi = (chi1.lift(f) * chi2.lift(f)).primitive()
    R = character_ring(chi, 3)
    S = stickelberger_series(chi, 3, 4, L=12)
    S1 = stickelberger_series(chi1, 3, 4, L=12, ring=R)
    zeta = h_poly(chi2, 3, R).zeta(30)
    T = typeW_twist(S1, zeta)
    assert all((a - b).is_zero() for a, b in zip(S.coeffs, T.coeffs))
    assert mu_lambda(T) == mu_lambda(S1)


def test_pure_type_w_lambda_minus_one():
    chi = _type_w_p3()
    S = stickelberger_series(chi, 3, 4, L=12)
    ml = mu_lambda(S)
    assert (ml.mu, ml.lam) == (0, 0)
    assert not h_poly(chi, 3).is_one
    assert ml.lam - 1 == -1


# truncated Euler factors

def test_truncated_empty_set():
    w2 = omega_character(5, 2)
    S = stickelberger_series(w2, 5, 3)
    assert (lp_truncated(w2, [5], -1, 5, series=S) - lp_evaluate(w2, -1, 5, series=S)).is_zero()


def test_euler_factor_ramified_is_one():
    chi = [fam[0] for fam in kernel_families(13) if fam[0].order == 2][0]
    assert truncated_euler_factor(chi, 13, -2, 5).to_int() == 1


def test_euler_factor_at_zero():
    w2 = omega_character(5, 2)
    f = truncated_euler_factor(w2, 3, 0, 5, K=12)
    expected = PadicElement.from_int(f.ring, 1, 12) - teichmuller(3, p=5, M=12)
    assert (f - expected).is_zero()


def test_truncated_matches_classical():
    w2 = omega_character(5, 2)
    S = stickelberger_series(w2, 5, 4)
    # m = -1: eta trivial, factor 1 - 3; m = -3: eta = Legendre mod 5, factor 1 + 27
    v1 = lp_truncated(w2, [3], -1, 5, series=S)
    assert padic_equal(v1, Fraction(1, 3) * (1 - 3))
    v3 = lp_truncated(w2, [3], -3, 5, series=S)
    assert padic_equal(v3, lp_interpolated_value_exact(w2, -3, 5).rational() * 28)
