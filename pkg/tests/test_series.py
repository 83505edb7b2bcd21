from __future__ import annotations


import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from lpzeros import polys
from lpzeros.padic import PadicElement, PrecisionError, SeriesApprox, base_ring, cyclotomic_data
from lpzeros.series import (
    UNDETERMINED,
    EscalationNeeded,
    gsharp_reduce,
    mu_lambda,
    nonintegrality_heuristic,
    poly_eval,
    poly_mul,
    positive_valuation_roots,
    refine_root,
    series_derivative,
    weierstrass_distinguished,
    zero_map,
)

STAIRCASE = {0: 6, 3: 5, 4: 4, 5: 5, 6: 3, 8: 4, 11: 2, 12: 1, 15: 3, 16: 0}


def ints(p, coeffs, prec, mu_floor=0):
    return SeriesApprox.from_ints(base_ring(p), coeffs, prec, mu_floor)


def as_ints(elems):
    return [e.to_int() for e in elems]


def planted(p, roots, unit, L, prec):
    """Coefficients of prod(T - r) * unit, truncated to length L."""
    poly = [1]
    for r in roots:
        poly = polys.mul(poly, [-r, 1])
    return (polys.mul(poly, unit) + [0] * L)[:L], poly


# mu and lambda

def test_mu_lambda_examples():
    ml = mu_lambda(ints(5, [5, 5, 1], 10))
    assert (ml.mu, ml.lam) == (0, 2)
    S = ints(3, [3 ** STAIRCASE[i] if i in STAIRCASE else 0 for i in range(17)], 20)
    ml = mu_lambda(S)
    assert (ml.mu, ml.lam) == (0, 16)


def test_mu_lambda_scaled():
    assert mu_lambda(ints(5, [5, 5], 10)) == UNDETERMINED
    ml = mu_lambda(ints(5, [5, 5], 10, mu_floor=1))
    assert (ml.mu, ml.lam) == (1, 0)


def test_mu_lambda_zero_series_is_error():
    with pytest.raises(PrecisionError):
        mu_lambda(ints(5, [0, 0, 0], 5))


def test_mu_lambda_ambiguous_prefix():
    # the constant term is unknown below the unit at T^1
    R = base_ring(5)
    S = SeriesApprox(R, (PadicElement.from_int(R, 0, 0), PadicElement.from_int(R, 1, 5)))
    assert mu_lambda(S) == UNDETERMINED


# Weierstrass preparation

def test_weierstrass_examples():
    p = 5
    W = weierstrass_distinguished(ints(p, [p, 1], 10))
    assert W.lam == 1 and as_ints(W.distinguished) == [p, 1]
    S = ints(p, [-p, 1 - p, 1], 10)
    W = weierstrass_distinguished(S)
    assert W.lam == 1
    assert (W.distinguished[0] - PadicElement.from_int(S.ring, -p, 10)).is_zero()
    W = weierstrass_distinguished(ints(p, [2, 3, 1], 10))
    assert W.lam == 0 and len(W.distinguished) == 1


def test_weierstrass_lambda_mismatch():
    with pytest.raises(ValueError):
        weierstrass_distinguished(ints(5, [5, 1], 10), lam=2)


def test_weierstrass_too_short():
    with pytest.raises(EscalationNeeded):
        weierstrass_distinguished(ints(5, [5, 5], 10))


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 4), st.randoms(use_true_random=False))
def test_weierstrass_reconstruction(p, lam, rnd):
    prec, L = 12, 14
    D = [p * rnd.randrange(1, p ** 3) for _ in range(lam)] + [1]
    U = [rnd.randrange(1, p)] + [rnd.randrange(p ** 4) for _ in range(8)]
    S = ints(p, (polys.mul(D, U) + [0] * L)[:L], prec)
    W = weierstrass_distinguished(S)
    assert W.lam == lam and W.mu == 0
    for got, want in zip(W.distinguished, D):
        assert (got - PadicElement.from_int(S.ring, want, got.prec)).is_zero()
    recon = poly_mul(W.distinguished, W.unit, L - lam, S.ring, 0)
    for i in range(L - lam):
        assert (S.coeffs[i] - recon[i]).is_zero()


# G sharp

def test_gsharp_identity_p_odd():
    S = ints(5, [1, 2, 3], 10)
    assert gsharp_reduce(S, 0, 5) is S


def test_gsharp_halves_for_p2():
    S = ints(2, [2, 6, 4], 10, mu_floor=1)
    G = gsharp_reduce(S, 0, 2)
    assert as_ints(G.coeffs) == [1, 3, 2]
    assert G.mu_floor == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gsharp_planted_trivial_zero(p):
    a = cyclotomic_data(p).u - 1
    U = [1 + p, 2, 3, 5, 7, 11]
    L = 10
    scale = 2 if p == 2 else 1
    coeffs = [scale * c for c in (polys.mul([-a, 1], U) + [0] * L)[:L]]
    G = ints(p, coeffs, 20, mu_floor=1 if p == 2 else 0)
    Gs = gsharp_reduce(G, 1, p)
    for got, want in zip(Gs.coeffs, U + [0] * L):
        assert (got - PadicElement.from_int(G.ring, want, got.prec)).is_zero()
    before, after = mu_lambda(G), mu_lambda(Gs)
    assert after.lam == before.lam - 1
    assert after.mu == before.mu - (1 if p == 2 else 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 3), st.randoms(use_true_random=False))
def test_gsharp_lambda_drop(p, extra, rnd):
    """lambda(G#) = lambda(G) - r_p on planted series."""
    a = cyclotomic_data(p).u - 1
    roots = [p * rnd.randrange(1, p * p) for _ in range(extra)]
    L = 12
    U = [rnd.randrange(1, p)] + [rnd.randrange(p ** 3) for _ in range(5)]
    coeffs, _ = planted(p, [a] + roots, U, L, 20)
    G = ints(p, coeffs, 20)
    assert mu_lambda(gsharp_reduce(G, 1, p)).lam == mu_lambda(G).lam - 1 == extra


# roots

def test_roots_linear():
    p = 5
    R = base_ring(p)
    D = [PadicElement.from_int(R, -p, 10), PadicElement.from_int(R, 1, 10)]
    (c,) = positive_valuation_roots(D, 1)
    assert c.approx % p ** 2 == p and c.deriv_valuation == 0 and c.multiplicity == 1


def test_roots_two_close():
    p = 5
    R = base_ring(p)
    poly = polys.mul([-p, 1], [-(p + p * p), 1])
    D = [PadicElement.from_int(R, c, 6) for c in poly]
    certs = positive_valuation_roots(D, 1)
    assert len(certs) == 2
    assert sorted(c.approx % p ** 3 for c in certs) == sorted([p, p + p * p])
    for c in certs:
        assert 2 * c.deriv_valuation < 6


def test_roots_eisenstein_none():
    p = 5
    R = base_ring(p)
    D = [PadicElement.from_int(R, c, 10) for c in [-p, 0, 1]]
    assert positive_valuation_roots(D, 1) == []


def brute_roots(poly, p, k, w):
    """Residues r mod p^k in p^w Z with poly(r) = 0 mod p^k."""
    return {r for r in range(0, p ** k, p ** w) if polys.evaluate(poly, r) % p ** k == 0}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 3), st.randoms(use_true_random=False))
def test_roots_planted_and_refined(p, nroots, rnd):
    roots = sorted({p * rnd.randrange(1, p ** 3) for _ in range(nroots)})
    # distinct modulo p^2 keeps each root simple at moderate precision
    if len({r % p ** 2 for r in roots}) < len(roots):
        return
    D, poly = planted(p, roots, [1], len(roots) + 1, 0)
    R = base_ring(p)
    certs = positive_valuation_roots([PadicElement.from_int(R, c, 14) for c in poly], 1)
    assert len(certs) == len(roots)
    for c, r in zip(certs, roots):
        assert c.approx == r % p ** c.precision
        assert 2 * c.deriv_valuation < 14
        precise = [PadicElement.from_int(R, x, 30) for x in poly]
        t = refine_root(precise, c, extra=3)
        val = poly_eval(precise, PadicElement.from_int(R, t, 40))
        assert val.val_lower() >= c.precision + 3
    # the certified set agrees with brute force on residues mod p^3
    k = 3
    bf = brute_roots(poly, p, k + 2, 1)
    assert {c.approx % p ** k for c in certs} == {r % p ** k for r in bf}


def test_roots_from_series():
    p = 5
    L = 10
    coeffs, _ = planted(p, [p, 3 * p * p + p * p * p], [1, 1, 2], L, 0)
    certs = positive_valuation_roots(ints(p, coeffs, 12), 1)
    assert [c.approx % p ** 3 for c in certs] == [p, (3 * p * p + p ** 3) % p ** 3]


# zero map

def test_zero_map_examples():
    for p in (2, 3, 5, 7):
        u = cyclotomic_data(p).u
        assert zero_map(1, p).is_zero()
        assert zero_map(0, p).to_int() == u - 1
    assert zero_map(-1, 5, prec=4).to_int() == 35


def test_zero_map_rejects_small_valuation():
    R = base_ring(2)
    with pytest.raises(ValueError):
        zero_map(PadicElement.from_int(R, 2, 10), 2, to="s")


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([2, 3, 5, 7, 11, 37]), st.integers(-10 ** 9, 10 ** 9))
def test_zero_map_roundtrip(p, s):
    prec = 12
    t = zero_map(s, p, prec=prec)
    back = zero_map(t, p, to="s")
    assert back.prec >= prec - 1
    assert (back - PadicElement.from_int(back.ring, s, back.prec)).is_zero()


# non-integrality heuristic

def test_heuristic_integer_suspect():
    p = 5
    v = nonintegrality_heuristic(lambda E: p % p ** E, 3, p)
    assert v.verdict == "integer-suspect"


def test_heuristic_one_third():
    p = 5
    third = lambda E: pow(3, -1, p ** E)
    v = nonintegrality_heuristic(third, 3, p)
    assert v.verdict == "nonzero-nonint-likely" and v.escalations == 0


def test_heuristic_escalates():
    p = 5
    # agrees with a small integer through 6 digits, then departs
    a = 7 + 4 * p ** 7
    v = nonintegrality_heuristic(lambda E: a % p ** E, 3, p)
    assert v.verdict == "nonzero-nonint-likely" and v.escalations == 1


# derivative

def test_derivative_examples():
    assert series_derivative(ints(5, [3], 10)).coeffs == ()
    d = series_derivative(ints(5, [0, 0, 1], 10))
    assert as_ints(d.coeffs) == [0, 2]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_derivative_staircase_valuations(p):
    from lpzeros.padic import vp_int

    S = ints(p, [p ** STAIRCASE[i] if i in STAIRCASE else 0 for i in range(17)], 30)
    d = series_derivative(S)
    for j in range(1, 17):
        expected = None if j not in STAIRCASE else STAIRCASE[j] + vp_int(j, p)
        assert d.coeffs[j - 1].valuation() == expected
