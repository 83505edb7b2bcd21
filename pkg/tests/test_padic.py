from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lpzeros.padic import (
    PadicElement,
    PrecisionError,
    SeriesApprox,
    angle_projection,
    base_ring,
    cyclotomic_data,
    make_ring,
    padic_log,
    series_eval,
    teichmuller,
    vp_frac,
)

PRIMES = [2, 3, 5, 7, 11]


def brute_teichmuller(a: int, p: int, K: int) -> int:
    """Search the unique (p-1)-th root of unity mod p^K congruent to a mod p (p odd)."""
    q, order = p, p - 1
    mod = p ** K
    hits = [x for x in range(a % q, mod, q) if pow(x, order, mod) == 1]
    assert len(hits) == 1
    return hits[0]


def rational_log(x: int, p: int, K: int) -> int:
    """log(x) mod p^K from the exact rational series, summed far beyond K."""
    y = Fraction(x - 1)
    acc = Fraction(0)
    for k in range(1, 12 * K + 40):
        acc += (-1) ** (k + 1) * y ** k / k
    num, den = acc.numerator, acc.denominator
    return num * pow(den, -1, p ** K) % p ** K


# make_ring

def test_make_ring_base():
    R = make_ring(2, 1, 1)
    assert (R.e, R.d) == (1, 1)


def test_make_ring_unramified_degree():
    assert make_ring(2, 7, 1).d == 3


def test_make_ring_eisenstein_degree():
    assert make_ring(3, 1, 9).e == 6


def test_make_ring_errors():
    with pytest.raises(ValueError):
        make_ring(4, 1, 1)
    with pytest.raises(ValueError):
        make_ring(3, 6, 1)


@pytest.mark.parametrize("p,m", [(2, 7), (3, 5), (5, 12), (7, 9), (2, 15)])
def test_unram_poly_irreducible_mod_p(p, m):
    import sympy

    R = make_ring(p, m, 1)
    y = sympy.Symbol("y")
    g = sympy.Poly(list(reversed([c % p for c in R.unram_poly])), y, modulus=p)
    assert g.is_irreducible
    assert g.degree() == R.d


def test_uniformizer_valuation():
    R = make_ring(3, 1, 9)
    z = PadicElement.make(R, R.z_element(10), 10)
    assert z.valuation() == Fraction(1, 6)


def test_cyclotomic_data():
    for p in PRIMES:
        c = cyclotomic_data(p)
        assert (c.u - 1) % c.q == 0
        assert c.w == (2 if p == 2 else 1)


# teichmuller

def test_teichmuller_examples():
    assert teichmuller(1, p=5).to_int() == 1
    assert teichmuller(2, p=5, M=2).to_int() == 7
    assert teichmuller(3, p=2, M=10).to_int() == 2 ** 10 - 1


def test_teichmuller_non_unit():
    with pytest.raises(ValueError):
        teichmuller(10, p=5)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_teichmuller_matches_brute_force(p):
    K = 4 if p < 7 else 3
    for a in range(1, 3 * p):
        if a % p:
            assert teichmuller(a, p=p, M=K).to_int() == brute_teichmuller(a, p, K)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 10 ** 6))
def test_teichmuller_properties(p, a):
    if a % p == 0:
        a += 1
    M = 15
    q = p if p != 2 else 4
    t = teichmuller(a, p=p, M=M).to_int()
    order = p - 1 if p != 2 else 2
    assert pow(t, order, p ** M) == 1
    assert (t - a) % q == 0


# angle projection

def test_angle_examples():
    assert angle_projection(1, p=5).to_int() == 1
    assert angle_projection(2, p=5, M=2).to_int() == 11
    assert angle_projection(7, p=2, M=10).to_int() == (-7) % 2 ** 10


def test_angle_non_unit():
    with pytest.raises(ValueError):
        angle_projection(5, p=5)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 10 ** 6))
def test_angle_properties(p, a):
    if a % p == 0:
        a += 1
    M = 12
    q = p if p != 2 else 4
    x = angle_projection(a, p=p, M=M).to_int()
    assert x % q == 1
    assert teichmuller(a, p=p, M=M).to_int() * x % p ** M == a % p ** M


# logarithm

def test_log_one():
    R = base_ring(5)
    assert padic_log(PadicElement.from_int(R, 1, 10)).is_zero()


def test_log_valuations():
    assert padic_log(PadicElement.from_int(base_ring(5), 6, 10)).valuation() == 1
    assert padic_log(PadicElement.from_int(base_ring(2), 5, 10)).valuation() == 2


def test_log_precondition():
    with pytest.raises(ValueError):
        padic_log(PadicElement.from_int(base_ring(2), 3, 10))


@pytest.mark.parametrize("p,x", [(5, 6), (5, 26), (3, 4), (3, 10), (2, 5), (2, 13), (7, 8)])
def test_log_matches_rational_series(p, x):
    K = 8
    got = padic_log(PadicElement.from_int(base_ring(p), x, K))
    assert (got.to_int() - rational_log(x, p, K)) % p ** K == 0


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_log_additive(p, a, b):
    q = p if p != 2 else 4
    K = 10
    R = base_ring(p)
    x = PadicElement.from_int(R, 1 + q * a, K)
    y = PadicElement.from_int(R, 1 + q * b, K)
    lhs = padic_log(x * y)
    rhs = padic_log(x) + padic_log(y)
    assert (lhs - rhs).is_zero()


# valuations

@settings(max_examples=1000, deadline=None)
@given(st.sampled_from(PRIMES),
       st.integers(-10 ** 6, 10 ** 6).filter(lambda n: n != 0),
       st.integers(-10 ** 6, 10 ** 6).filter(lambda n: n != 0))
def test_valuation_multiplicative_and_ultrametric(p, a, b):
    R = base_ring(p)
    K = 30
    x, y = PadicElement.from_int(R, a, K), PadicElement.from_int(R, b, K)
    assert (x * y).valuation() == x.valuation() + y.valuation()
    s = x + y
    if not s.is_zero():
        assert s.valuation() >= min(x.valuation(), y.valuation())


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), st.lists(st.integers(-50, 50), min_size=6, max_size=6),
       st.lists(st.integers(-50, 50), min_size=6, max_size=6))
def test_ramified_valuation_multiplicative(k, u, v):
    R = make_ring(3, 1, 3 ** k if k < 3 else 9)
    K = 12
    dim = R.dim
    a = PadicElement.make(R, tuple((u + [0] * dim)[:dim]), K)
    b = PadicElement.make(R, tuple((v + [0] * dim)[:dim]), K)
    va, vb = a.valuation(), b.valuation()
    if va is None or vb is None or va + vb >= K - 1:
        return
    assert (a * b).valuation() == va + vb


def test_fraction_valuation():
    R = base_ring(5)
    x = PadicElement.from_fraction(R, Fraction(3, 25), 10)
    assert x.valuation() == -2
    assert vp_frac(Fraction(3, 25), 5) == -2


def test_precision_never_increases():
    R = base_ring(5)
    x = PadicElement.from_int(R, 7, 3)
    y = PadicElement.from_int(R, 2, 10)
    assert (x + y).prec == 3
    assert (x * y).prec == 3


# series evaluation

def test_series_eval_linear():
    R = base_ring(5)
    S = SeriesApprox.from_ints(R, [1, 1], 10)
    t = PadicElement.from_int(R, 5, 10)
    assert series_eval(S, t).to_int() == 6


def test_series_eval_tail_bound():
    R = base_ring(5)
    S = SeriesApprox.from_ints(R, [1, 2, 3, 4, 5], 3)
    t = PadicElement.from_int(R, 5, 10)
    val = series_eval(S, t)
    assert val.prec == 3
    S2 = SeriesApprox.from_ints(R, [1, 2, 3], 10)
    assert series_eval(S2, t).prec == 3


STAIRCASE = {0: 6, 3: 5, 4: 4, 5: 5, 6: 3, 8: 4, 11: 2, 12: 1, 15: 3, 16: 0}


def staircase_series(p: int, prec: int = 20) -> SeriesApprox:
    coeffs = [p ** STAIRCASE[i] if i in STAIRCASE else 0 for i in range(17)]
    return SeriesApprox.from_ints(base_ring(p), coeffs, prec)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_series_eval_staircase(p):
    S = staircase_series(p, 30)
    t = PadicElement.from_int(base_ring(p), p, 30)
    assert series_eval(S, t).valuation() == 6


def test_series_eval_rejects_unit():
    R = base_ring(5)
    S = SeriesApprox.from_ints(R, [1, 1], 10)
    with pytest.raises(ValueError):
        series_eval(S, PadicElement.from_int(R, 2, 10))


def test_series_eval_collapse_is_error():
    R = base_ring(5)
    S = SeriesApprox.from_ints(R, [1, 1], 10)
    S = SeriesApprox(R, S.coeffs, mu_floor=Fraction(-5))
    with pytest.raises(PrecisionError):
        series_eval(S, PadicElement.from_int(R, 5, 10))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]),
       st.lists(st.integers(-10 ** 4, 10 ** 4), min_size=1, max_size=8),
       st.lists(st.integers(-10 ** 4, 10 ** 4), min_size=1, max_size=8),
       st.integers(1, 50))
def test_series_eval_linear_and_horner(p, a, b, k):
    R = base_ring(p)
    n = max(len(a), len(b))
    a, b = a + [0] * (n - len(a)), b + [0] * (n - len(b))
    K = 12
    t = PadicElement.from_int(R, p * k, K)
    A = SeriesApprox.from_ints(R, a, K, mu_floor=K)
    B = SeriesApprox.from_ints(R, b, K, mu_floor=K)
    C = SeriesApprox.from_ints(R, [x + y for x, y in zip(a, b)], K, mu_floor=K)
    assert (series_eval(C, t) - series_eval(A, t) - series_eval(B, t)).is_zero()
    direct = sum(c * (p * k) ** i for i, c in enumerate(a))
    assert (series_eval(A, t) - PadicElement.from_int(R, direct, K)).is_zero()
