from __future__ import annotations

import math
from fractions import Fraction

import pytest

from lpzeros import polys
from lpzeros.characters import (
    DirichletCharacter,
    decompose_order,
    enumerate_classes,
    kernel_families,
    omega_character,
    qp_conjugacy_classes,
)
from lpzeros.conjectures import (
    SinnottInput,
    analyze_class,
    gross_check,
    gross_rank,
    lambda_statistics,
    lambda_via_sinnott_Q,
    main_conjecture_verdict,
    mu_check,
    series_with_invariants,
    sinnott_formula,
    stats_members,
)
from lpzeros.harness import planted_counterexample_record
from lpzeros.iwasawa import lp_interpolated_value_exact, stickelberger_series
from lpzeros.padic import SeriesApprox, base_ring, cyclotomic_data


def oracle_gross_rank(chi: DirichletCharacter, p: int) -> int:
    """1 iff eta = chi * omega^-1 is unramified at p with eta(p) = 1."""
    om = omega_character(p, 1)
    inv = om ** (om.order - 1) if om.order > 1 else om
    F = math.lcm(chi.modulus, inv.modulus)
    eta = (chi.lift(F) * inv.lift(F)).primitive()
    if eta.modulus % p == 0:
        return 0
    return 1 if eta.modulus == 1 or eta.exponent(p % eta.modulus) == 0 else 0


def classes_with(p, f, order):
    out = []
    for fam in kernel_families(f, True):
        if fam[0].order == order:
            out.extend(c.representative for c in qp_conjugacy_classes(fam, p))
    return out


# Gross

@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_gross_rank_omega(p):
    assert gross_rank(omega_character(p, 1), p) == 1


def test_gross_rank_examples():
    assert gross_rank(omega_character(5, 2), 5) == 0
    (chi,) = classes_with(2, 7, 3)
    assert gross_rank(chi, 2) == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gross_rank_matches_oracle(p):
    for cls in enumerate_classes(p, 80):
        chi = cls.representative
        r = gross_rank(chi, p)
        assert r in (0, 1)
        assert r == oracle_gross_rank(chi, p), chi


def test_gross_check_unit_value():
    chi = omega_character(5, 2)
    S = stickelberger_series(chi, 5, 3)
    g = gross_check(chi, S, 5)
    assert (g.r_p, g.r_prime, g.matched) == (0, 0, True)


def test_omega_is_odd_and_has_no_series():
    for p in (3, 5, 7):
        with pytest.raises(ValueError):
            stickelberger_series(omega_character(p, 1), p, 3)


@pytest.mark.parametrize("p,f,order", [(3, 33, 2), (3, 24, 2), (5, 20, 4), (7, 21, 6)])
def test_gross_check_trivial_zero(p, f, order):
    # even chi with chi*omega^-1 odd and trivial at p: one trivial zero at s = 0
    for chi in classes_with(p, f, order):
        if gross_rank(chi, p) != 1:
            continue
        assert oracle_gross_rank(chi, p) == 1
        S, _ = series_with_invariants(chi, p)
        g = gross_check(chi, S, p)
        assert (g.r_p, g.r_prime, g.matched) == (1, 1, True)
        break
    else:
        pytest.fail("no class with r_p = 1")


@pytest.mark.parametrize("p", [2, 3, 5])
def test_gross_check_planted_double(p):
    a = cyclotomic_data(p).u - 1
    poly = polys.mul(polys.mul([-a, 1], [-a, 1]), [1, 2, 3, 1])
    L = 12
    S = SeriesApprox.from_ints(base_ring(p), (poly + [0] * L)[:L], 30)
    g = gross_check(None, S, p, r_p=1)
    assert g.r_prime == 2 and not g.matched


# mu

def test_mu_check_regular():
    chi = omega_character(5, 2)
    v = mu_check(chi, stickelberger_series(chi, 5, 3), 5)
    assert v["holds"] and v["mu"] == "0"


def test_mu_check_p2():
    for cls in enumerate_classes(2, 40)[:10]:
        S, ml = series_with_invariants(cls.representative, 2)
        assert ml.mu == 1
        assert mu_check(cls.representative, S, 2)["holds"]


def test_mu_check_planted_failure():
    S = SeriesApprox.from_ints(base_ring(5), [5, 10, 5], 10, mu_floor=1)
    assert mu_check(None, S, 5)["holds"] is False


# main conjecture

def test_main_conjecture_regular():
    rep = analyze_class(omega_character(5, 2), 5)
    assert rep.status == "ok" and rep.lam == 0
    assert rep.main_conjecture["verdict"] == "no nonzero zero in Z_p"


def test_main_conjecture_planted_three():
    rec = planted_counterexample_record(5, 10 ** 4)
    assert rec["status"] == "counterexample"
    assert rec["main_conjecture"]["counterexamples"] == [3]


def test_main_conjecture_non_integer_root():
    third = lambda E: pow(3, -1, 5 ** E)
    v = main_conjecture_verdict([(third(2), 2, third)], 5, m_max=10 ** 4)
    assert v["verdict"] == "no zero at m = 1..10000"
    assert v["roots"][0]["nonintegrality"] == "nonzero-nonint-likely"


def test_main_conjecture_large_residue_not_flagged():
    # s = m_max + 1 is an integer but outside the tested range
    a = 10 ** 4 + 1
    v = main_conjecture_verdict([(a, 10, lambda E: a % 5 ** E)], 5, m_max=10 ** 4)
    assert v["counterexamples"] == []


@pytest.mark.parametrize("p", [3, 5, 7])
def test_no_zero_at_negative_integers(p):
    for cls in enumerate_classes(p, 30)[:6]:
        for m in range(-1, -8, -1):
            assert lp_interpolated_value_exact(cls.representative, m, p).terms


def test_type_w_character():
    (chi,) = [c for c in classes_with(3, 9, 3)][:1]
    rep = analyze_class(chi, 3)
    assert rep.type_w and rep.lam == -1
    assert rep.roots == []
    assert rep.main_conjecture["verdict"] == "no nonzero zero in Z_p"


# Sinnott

def test_sinnott_formula_examples():
    assert sinnott_formula(SinnottInput(-1, 0, ((17, True), (191, True))), 2) == 19
    assert sinnott_formula(SinnottInput(-1, 1, ((257, True),)), 2) == 31
    assert sinnott_formula(SinnottInput(0, 0, ((3, True), (31, True))), 2) == 9


def test_sinnott_non_split_ignored():
    assert sinnott_formula(SinnottInput(-1, 0, ((17, True), (191, False))), 2) == 3


@pytest.mark.parametrize("p,f,order,expected", [
    (2, 3247, 16, 19),
    (3, 2917, 3, 242),
    (2, 3855, 4, 65),
    (5, 1255, 10, 25),
])
def test_lambda_via_sinnott(p, f, order, expected):
    vals = {lambda_via_sinnott_Q(chi, p) for chi in classes_with(p, f, order)}
    assert expected in vals


def test_lambda_via_sinnott_889():
    found = {}
    for chi in classes_with(2, 889, 6):
        theta, psi = decompose_order(chi, 2)
        found[theta.modulus] = lambda_via_sinnott_Q(chi, 2)
    assert found[7] == 32


def test_lambda_via_sinnott_requires_p_power_part():
    assert lambda_via_sinnott_Q(omega_character(5, 2), 5) is None


def test_report_sinnott_matches():
    for cls in enumerate_classes(2, 40):
        rep = analyze_class(cls.representative, 2, heuristic=False)
        if rep.sinnott_lambda_expected is not None:
            assert rep.sinnott_lambda_expected == rep.lam


# lambda statistics

def test_stats_members_p3():
    members = stats_members(3, 1, 20)
    assert sorted(f for f, _ in members) == [5, 8, 13, 17]


def test_lambda_statistics_p3():
    table = {}
    from lpzeros.conjectures import canonical_key

    for f, chi in stats_members(3, 1, 20):
        _, ml = series_with_invariants(chi, 3)
        table[canonical_key(chi, 3)] = ml.lam
    out = lambda_statistics(3, 1, 20, table)
    assert out["total"] == 4 and out["model"] == Fraction(1, 3)
    assert out["count_positive"] == sum(1 for v in table.values() if v > 0)
    assert out["blue"][-1][1] == out["count_positive"]
    assert out["red"][-1][1] == Fraction(4, 3)


def test_lambda_statistics_empty():
    out = lambda_statistics(3, 1, 4, {})
    assert (out["count_positive"], out["total"], out["model"]) == (0, 0, Fraction(1, 3))


def test_lambda_statistics_missing_entry():
    with pytest.raises(KeyError):
        lambda_statistics(3, 1, 20, {})
