"""Verdicts for a character: Gross order of vanishing, mu, simple roots, non-vanishing
at positive integers, Sinnott's lambda formula and lambda statistics.

`analyze_class` is the per-character pipeline used by the batch harness: it
grows the level n and the length L of the Iwasawa series until every
verdict is certified or a precision budget is exhausted.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

from .characters import (
    DirichletCharacter,
    character_ring,
    decompose_order,
    kernel_families,
    omega_character,
    omega_power_value,
    prime_to_p_value_is_one,
    twisted_conductor_p_exponent,
    twisted_is_one,
)
from .iwasawa import h_poly, is_type_w, lp_closed_form, min_level, stickelberger_series
from .newton import SimplicityVerdict, simplicity_criteria
from .padic import (
    PadicElement,
    PrecisionError,
    SeriesApprox,
    angle_int,
    cyclotomic_data,
    mult_order,
    vp_int,
)
from .series import (
    UNDETERMINED,
    EscalationNeeded,
    RootCertificate,
    gsharp_reduce,
    mu_lambda,
    nonintegrality_heuristic,
    positive_valuation_roots,
    weierstrass_distinguished,
    zero_map_t_to_s,
)

M_MAX = 10 ** 8


# --- Gross ------------------------------------------------------------------

@dataclass(frozen=True)
class GrossData:
    r_p: int
    r_prime: int
    matched: bool


def gross_rank(chi: DirichletCharacter, p: int) -> int:
    """1 iff chi * omega^-1 is trivial on the decomposition group at p (k = Q)."""
    if twisted_conductor_p_exponent(chi, -1, p) != 0:
        return 0
    # chi * omega^-1 is unramified at p; its value at p is that of the prime-to-p part of chi
    return 1 if prime_to_p_value_is_one(chi, p, p) else 0


def derivative_at(G: SeriesApprox, a: PadicElement, k: int) -> PadicElement:
    """G^(k)(a)/k! = sum_i C(i,k) G_i a^(i-k), with the truncation tail folded in."""
    va = a.valuation()
    if va is None or va <= 0:
        raise ValueError("evaluation point must lie in the maximal ideal")
    L = G.L
    if k >= L:
        raise PrecisionError("series too short for this derivative")
    acc = None
    for i in range(L - 1, k - 1, -1):
        c = G.coeffs[i] * math.comb(i, k)
        acc = c if acc is None else acc * a + c
    tail = G.mu_floor + va * (L - k)
    return acc.with_prec(min(acc.prec, tail))


def gross_check(chi: DirichletCharacter | None, G: SeriesApprox, p: int, r_p: int | None = None,
                max_order: int = 4) -> GrossData:
    """Order of vanishing of G at u - 1, certified by the first nonzero derivative."""
    if r_p is None:
        r_p = gross_rank(chi, p)
    a = PadicElement.from_int(G.ring, cyclotomic_data(p).u - 1, max(c.prec for c in G.coeffs) + 64)
    for k in range(max_order + 1):
        val = derivative_at(G, a, k)
        if val.prec <= 0:
            break
        if not val.is_zero():
            return GrossData(r_p, k, r_p == k)
    raise EscalationNeeded("no certified nonzero derivative at u - 1")


# --- mu -----------------------------------------------------------------------

def mu_check(chi: DirichletCharacter | None, G: SeriesApprox, p: int) -> dict:
    """mu(G/H) should be 0 for odd p and 1 for p = 2 over Q."""
    ml = mu_lambda(G)
    if ml == UNDETERMINED:
        return {"mu": None, "expected": 0 if p != 2 else 1, "holds": None}
    expected = 0 if p != 2 else 1
    return {"mu": str(ml.mu), "expected": expected, "holds": ml.mu == expected}


# --- roots in s and the main conjecture -----------------------------------------

def root_s_approx(cert: RootCertificate, p: int, ring) -> tuple[int, int]:
    """(s mod p^E, E) for the zero corresponding to a certified root t of G."""
    t = PadicElement.from_int(ring, cert.approx, cert.precision)
    s = zero_map_t_to_s(t, p)
    E = math.floor(s.prec)
    return (s.to_int() % p ** E if E > 0 else 0), max(E, 0)


def closed_form_refiner(chi: DirichletCharacter, p: int, s0: int, E0: int,
                        start_prec: int = 12) -> Callable[[int], int]:
    """s mod p^E for a simple zero of L_p(chi, .) near s0, by digit lifting on the closed form."""
    cache = {E0: s0 % p ** E0 if E0 else 0}

    def value(s: int, prec: int) -> PadicElement:
        if s == 1:
            s += p ** (prec + 8)
        return lp_closed_form(chi, s, p, prec)

    def refine(E: int) -> int:
        k = max(i for i in cache if i <= E) if any(i <= E for i in cache) else E0
        s = cache[k]
        prec = start_prec + E
        while k < E:
            vals = []
            for d in range(p):
                cand = s + d * p ** k
                v = value(cand, prec)
                vals.append(v.val_lower())
            best = max(vals)
            winners = [d for d in range(p) if vals[d] == best]
            if len(winners) != 1:
                prec += 6
                if prec > start_prec + E + 60:
                    raise PrecisionError("digit lifting cannot separate candidates")
                continue
            s = s + winners[0] * p ** k
            k += 1
            cache[k] = s
        return s % p ** E

    return refine


def main_conjecture_verdict(roots_s: list[tuple[int, int, Callable[[int], int]]], p: int,
                            m_max: int = M_MAX, heuristic: bool = True) -> dict:
    """Non-vanishing at m = 1..m_max.  roots_s lists (s mod p^E, E, refine) per zero of L_p in Z_p."""
    if not roots_s:
        return {"verdict": "no nonzero zero in Z_p", "counterexamples": [], "roots": []}
    E_need = 1
    while p ** E_need <= m_max:
        E_need += 1
    out, flagged = [], []
    for s0, E0, refine in roots_s:
        a = refine(E_need)
        rec = {"s_mod": str(a), "E": E_need}
        if 1 <= a <= m_max:
            # s = a < p^E would force s = a mod p^E' for every E' >= E
            deeper = [refine(E_need + k) for k in (3, 6)]
            rec["checked_to"] = E_need + 6
            if all(x == a for x in deeper):
                flagged.append(a)
                rec["candidate_m"] = a
        if heuristic:
            h = nonintegrality_heuristic(refine, E_need, p)
            rec["nonintegrality"] = h.verdict
            rec["E_prime"] = h.E_prime
        out.append(rec)
    verdict = "counterexample candidate" if flagged else f"no zero at m = 1..{m_max}"
    return {"verdict": verdict, "counterexamples": flagged, "roots": out}


# --- Sinnott --------------------------------------------------------------------

@dataclass(frozen=True)
class SinnottInput:
    lambda_base: int
    layer_index: int
    split_primes: tuple[tuple[int, bool], ...]


def a_value(N: int, p: int) -> int:
    """v_p((<N> - 1)/q)."""
    q = p if p != 2 else 4
    K = 64
    x = (angle_int(N, p, K) - 1) % p ** K
    if x == 0:
        raise ValueError("<N> = 1 to working precision")
    return vp_int(x, p) - vp_int(q, p)


def sinnott_formula(inp: SinnottInput, p: int) -> int:
    lam = inp.lambda_base
    for N, split in inp.split_primes:
        if not split:
            continue
        a = a_value(N, p)
        assert a >= inp.layer_index, "a_N < e for a contributing prime"
        lam += p ** (a - inp.layer_index)
    return lam


def sinnott_input_Q(chi: DirichletCharacter, p: int, lambda_theta: Callable[[DirichletCharacter], int]):
    """The formula inputs over Q, or None when the p-power-order part of chi is trivial."""
    theta, psi = decompose_order(chi, p)
    if psi.is_trivial():
        return None
    base = -1 if theta.is_trivial() else lambda_theta(theta)
    split = []
    for ell in sorted(psi.local_conductor_exponents()):
        if ell == p:
            continue
        if theta.modulus % ell == 0:
            split.append((ell, False))
            continue
        if theta.is_trivial():
            split.append((ell, _omega_power_is_one(ell, p - 2, p)))
        else:
            split.append((ell, twisted_is_one(theta, ell, p - 2, p)))
    return SinnottInput(base, 0, tuple(split))


def _omega_power_is_one(ell: int, j: int, p: int) -> bool:
    return omega_power_value(ell, j, p, 8) == 1


_lambda_cache: dict[str, int] = {}


def lambda_via_sinnott_Q(chi: DirichletCharacter, p: int,
                         lambda_theta: Callable[[DirichletCharacter], int] | None = None):
    """lambda(theta*psi) = lambda(theta) + sum of p^{a_l} over split l | cond(psi)."""
    if lambda_theta is None:
        lambda_theta = cached_lambda(p)
    inp = sinnott_input_Q(chi, p, lambda_theta)
    if inp is None:
        return None
    return sinnott_formula(inp, p)


def cached_lambda(p: int) -> Callable[[DirichletCharacter], int]:
    def lam(theta: DirichletCharacter) -> int:
        key = theta.key(p)
        if key not in _lambda_cache:
            S = series_with_invariants(theta, p)[0]
            ml = mu_lambda(S)
            _lambda_cache[key] = ml.lam - (1 if is_type_w(theta, p) else 0)
        return _lambda_cache[key]
    return lam


# --- lambda statistics ------------------------------------------------------------

def canonical_key(chi: DirichletCharacter, p: int) -> str:
    """Key of the Gal(Qbar_p/Q_p)-orbit of chi (the least member key)."""
    n = chi.order
    if n == 1:
        return chi.key(p)
    k = vp_int(n, p)
    m = n // p ** k
    frob = {pow(p, j, m) for j in range(mult_order(p, m))} if m > 1 else {0}
    keys = []
    for t in range(1, n + 1):
        if math.gcd(t, n) == 1 and ((t % m) if m > 1 else 0) in frob:
            keys.append((chi ** t).key(p))
    return min(keys)


def _omega_times(psi: DirichletCharacter, i: int, p: int) -> DirichletCharacter:
    om = omega_character(p, i)
    f = math.lcm(psi.modulus, om.modulus)
    return (psi.lift(f) * om.lift(f)).primitive()


def stats_members(p: int, d: int, N: int) -> list[tuple[int, DirichletCharacter]]:
    """(conductor of psi, chi = omega^i psi) over the admissible family, one per Q_p-class."""
    if p == 2:
        raise ValueError("lambda statistics are defined for odd p")
    out = []
    for f in range(2, N + 1):
        if f % p == 0 or f % 4 == 2:
            continue
        for fam in kernel_families(f, True):
            n = fam[0].order
            if n % p == 0 or n == 1:
                continue
            if mult_order(p, n) != d:
                continue
            seen = set()
            for psi in fam:
                ck = canonical_key(psi, p)
                if ck in seen:
                    continue
                seen.add(ck)
                for i in range(0, p - 1, 2):
                    out.append((f, _omega_times(psi, i, p)))
    return out


def lambda_statistics(p: int, d: int, N: int, table: dict[str, int]) -> dict:
    members = stats_members(p, d, N)
    count = 0
    blue, red = [], []
    run_b, run_r = 0, Fraction(0)
    for f, chi in members:
        key = canonical_key(chi, p)
        if key not in table:
            raise KeyError(f"missing lambda for {key}")
        if table[key] > 0:
            count += 1
            run_b += 1
        run_r += Fraction(1, p ** d)
        if blue and blue[-1][0] == f:
            blue[-1] = (f, run_b)
            red[-1] = (f, run_r)
        else:
            blue.append((f, run_b))
            red.append((f, run_r))
    return {"count_positive": count, "total": len(members), "model": Fraction(1, p ** d),
            "blue": blue, "red": red}


# --- the per-character pipeline ------------------------------------------------------

@dataclass
class ConjectureReport:
    key: str
    class_key: str
    p: int
    conductor: int
    order: int
    orbit_size: int
    type_w: bool
    level: int
    L: int
    mu: str | None
    lambda_G: int | None
    lam: int | None
    distinguished: list[str] = field(default_factory=list)
    distinguished_precision: str | None = None
    roots: list[dict] = field(default_factory=list)
    gross: dict | None = None
    mu_verdict: dict | None = None
    simple_roots: dict | None = None
    main_conjecture: dict | None = None
    sinnott_lambda_expected: int | None = None
    calibration: str = ""
    status: str = "ok"
    error: str | None = None
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Schedule:
    L0: int = 12
    digits: int = 4
    max_size: int = 400_000     # bound on p^n * (ring dimension)
    m_max: int = M_MAX


def _start_level(chi, p, digits, max_size=None):
    w = cyclotomic_data(p).w
    n = max(digits - w + 1, 2 if p != 2 else 3)
    if max_size is not None:
        dim = character_ring(chi, p).dim
        while n > 1 and p ** n * dim > max_size:
            n -= 1
    return max(min_level(chi, p), n)


def series_with_invariants(chi: DirichletCharacter, p: int, sched: Schedule = Schedule()):
    """Smallest (n, L) on the schedule where mu and lambda of G are certified."""
    n = _start_level(chi, p, sched.digits, sched.max_size)
    L = sched.L0
    ring = character_ring(chi, p)
    while p ** n * ring.dim <= sched.max_size:
        S = stickelberger_series(chi, p, n, L=min(L, p ** n))
        try:
            ml = mu_lambda(S)
        except PrecisionError:
            ml = UNDETERMINED
        if ml != UNDETERMINED:
            return S, ml
        if L < p ** n:
            L *= 2
        else:
            n += 1
    raise PrecisionError("mu and lambda not certified within the precision budget")


def analyze_class(chi: DirichletCharacter, p: int, sched: Schedule = Schedule(), orbit_size: int = 1,
                  with_sinnott: bool = True, heuristic: bool = True) -> ConjectureReport:
    t0 = time.perf_counter()
    cd = cyclotomic_data(p)
    ring = character_ring(chi, p)
    rep = ConjectureReport(key=chi.key(p), class_key=canonical_key(chi, p), p=p, conductor=chi.modulus,
                           order=chi.order, orbit_size=orbit_size, type_w=is_type_w(chi, p),
                           level=0, L=0, mu=None, lambda_G=None, lam=None)
    r_p = gross_rank(chi, p)
    n = _start_level(chi, p, sched.digits, sched.max_size)
    L = sched.L0
    last_error = None
    while p ** n * ring.dim <= sched.max_size:
        try:
            S = stickelberger_series(chi, p, n, L=min(L, p ** n))
            rep.level, rep.L, rep.calibration = n, S.L, S.calibration
            ml = mu_lambda(S)
            if ml == UNDETERMINED:
                raise EscalationNeeded("mu/lambda undetermined")
            if ml.lam + 2 > S.L and S.L < p ** n:
                raise EscalationNeeded("series too short")
            rep.mu, rep.lambda_G = str(ml.mu), ml.lam
            rep.lam = ml.lam - (0 if h_poly(chi, p).is_one else 1)
            rep.mu_verdict = mu_check(chi, S, p)
            g = gross_check(chi, S, p, r_p)
            rep.gross = asdict(g)
            Gs = gsharp_reduce(S, g.r_prime, p)
            W = weierstrass_distinguished(Gs)
            certs = positive_valuation_roots(W.distinguished, cd.w)
            simple = simplicity_criteria(Gs) if W.lam > 1 else SimplicityVerdict(True, "G1", [], [])
            if not simple.simple:
                raise EscalationNeeded("simplicity not certified")
            rep.distinguished = [str(c.to_int()) if not any(c.coords[1:]) and not c.shift else
                                 ",".join(str(x) for x in c.coords) for c in W.distinguished]
            rep.distinguished_precision = str(W.precision)
            rep.simple_roots = simple.to_dict()
            roots_s, rdicts = [], []
            for c in certs:
                s0, E0 = root_s_approx(c, p, ring)
                refine = closed_form_refiner(chi, p, s0, E0)
                roots_s.append((s0, E0, refine))
                rd = c.to_dict()
                rd["s_mod"], rd["s_precision"] = str(s0), E0
                rdicts.append(rd)
            rep.roots = rdicts
            rep.main_conjecture = main_conjecture_verdict(roots_s, p, sched.m_max, heuristic)
            if rep.main_conjecture["counterexamples"] or not g.matched:
                rep.status = "counterexample"
            elif rep.mu_verdict["holds"] is False:
                rep.status = "counterexample"
            break
        except (EscalationNeeded, PrecisionError) as exc:
            last_error = str(exc)
            if L < min(p ** n, 4 * sched.L0) and "short" in last_error:
                L *= 2
            else:
                n += 1
                L = max(L, sched.L0)
    else:
        rep.status = "precision-exhausted"
        rep.error = last_error
    if with_sinnott and rep.lam is not None:
        try:
            rep.sinnott_lambda_expected = lambda_via_sinnott_Q(chi, p)
        except PrecisionError:
            rep.sinnott_lambda_expected = None
        if rep.sinnott_lambda_expected is not None and rep.sinnott_lambda_expected != rep.lam:
            rep.status = "counterexample"
            rep.error = "Sinnott lambda disagrees with the series"
    rep.timings = {"total": round(time.perf_counter() - t0, 3)}
    return rep
