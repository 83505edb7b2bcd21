"""Invariants and zeroes of Iwasawa series.

mu and lambda, the Weierstrass distinguished polynomial, the trivial-zero
reduction G#, a digit search with Hensel certificates for roots in p^w Z_p,
the s <-> T coordinate change and the non-integrality heuristic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .padic import (
    PadicElement,
    PrecisionError,
    RingDescriptor,
    SeriesApprox,
    base_ring,
    cyclotomic_data,
    padic_log,
)

UNDETERMINED = "undetermined"


class EscalationNeeded(PrecisionError):
    """More precision (or a longer series) is needed to finish."""


# --- helpers on coefficient lists ---------------------------------------

def _zero(ring: RingDescriptor, prec) -> PadicElement:
    return PadicElement.make(ring, ring.zero(), prec)


def _one(ring: RingDescriptor, prec) -> PadicElement:
    return PadicElement.from_int(ring, 1, prec)


def poly_mul(a, b, n: int, ring: RingDescriptor, pad_prec):
    """Truncated product of coefficient lists modulo T^n."""
    out = []
    for k in range(n):
        acc = None
        for i in range(max(0, k - len(b) + 1), min(k + 1, len(a))):
            term = a[i] * b[k - i]
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else _zero(ring, pad_prec))
    return out


def poly_inverse(b, n: int, ring: RingDescriptor):
    """Inverse of a series with unit constant term, modulo T^n."""
    inv0 = b[0].inverse()
    out = [inv0]
    for k in range(1, n):
        acc = None
        for i in range(1, min(k, len(b) - 1) + 1):
            term = b[i] * out[k - i]
            acc = term if acc is None else acc + term
        out.append(-(acc * inv0) if acc is not None else _zero(ring, inv0.prec))
    return out


def poly_eval(coeffs, t: PadicElement) -> PadicElement:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * t + c
    return acc


def pi_power(ring: RingDescriptor, N: int, prec) -> PadicElement:
    """pi^N with pi = z when e > 1 and pi = p otherwise."""
    if ring.e == 1:
        return PadicElement.from_int(ring, ring.p ** N, prec + N + 64)
    K = math.ceil(prec) + N + 2
    z = PadicElement.make(ring, ring.z_element(K), K + 64)
    return z ** N


# --- mu and lambda ------------------------------------------------------

@dataclass(frozen=True)
class MuLambda:
    mu: Fraction
    lam: int


def mu_lambda(S: SeriesApprox):
    """(mu, lambda) when witnessed by certified digits, else UNDETERMINED."""
    vals = [c.valuation() for c in S.coeffs]
    if S.coeffs and all(v is None for v in vals) and all(c.prec > S.mu_floor for c in S.coeffs):
        raise PrecisionError("series vanishes at certified precision")
    known = [v for v in vals if v is not None]
    if not known:
        return UNDETERMINED
    vmin = min(known)
    if vmin > S.mu_floor:
        return UNDETERMINED
    for i, c in enumerate(S.coeffs):
        v = vals[i]
        if v is not None and v == vmin:
            return MuLambda(Fraction(vmin), i)
        if c.val_lower() <= vmin:
            return UNDETERMINED
    return UNDETERMINED


def series_derivative(S: SeriesApprox) -> SeriesApprox:
    coeffs = tuple(c * (i + 1) for i, c in enumerate(S.coeffs[1:]))
    return SeriesApprox(S.ring, coeffs, S.level, S.mu_floor, S.calibration)


# --- Weierstrass preparation -------------------------------------------

@dataclass
class WeierstrassData:
    mu: Fraction
    lam: int
    distinguished: list[PadicElement]  # monic, lowest degree first
    unit: list[PadicElement] = field(repr=False, default_factory=list)
    residual_ok: bool = True

    @property
    def precision(self) -> Fraction:
        lower = [c.prec for c in self.distinguished[:-1]]
        return min(lower) if lower else Fraction(10 ** 6)


def normalize_mu(S: SeriesApprox, mu: Fraction) -> list[PadicElement]:
    """Coefficients of S / pi^(e*mu)."""
    ring = S.ring
    N = int(mu * ring.e)
    if N == 0:
        return list(S.coeffs)
    c = pi_power(ring, N, max(x.prec for x in S.coeffs) + 2)
    cinv = c.inverse()
    return [x * cinv for x in S.coeffs]


def weierstrass_distinguished(S: SeriesApprox, lam: int | None = None, max_iter: int = 400) -> WeierstrassData:
    """S = pi^(e mu) * D * U with D distinguished of degree lambda and U a unit."""
    ml = mu_lambda(S)
    if ml == UNDETERMINED:
        raise EscalationNeeded("mu and lambda are not determined")
    if lam is not None and lam != ml.lam:
        raise ValueError("lambda does not match the series")
    lam = ml.lam
    ring = S.ring
    L = S.L
    if L <= lam:
        raise EscalationNeeded("series too short for the distinguished polynomial")
    C = normalize_mu(S, ml.mu)
    top = max(c.prec for c in C)
    floor_rel = S.mu_floor - ml.mu  # lower bound for unknown coefficients, relative
    if lam == 0:
        U = C
        return WeierstrassData(ml.mu, 0, [_one(ring, top + 64)], U)
    A = C[:lam]
    W = L - lam
    B = C[lam:]
    vA = min(a.val_lower() for a in A)
    if vA <= 0:
        raise EscalationNeeded("lower coefficients are not certified non-units")
    Binv = poly_inverse(B, W, ring)
    unknown = _zero(ring, max(floor_rel, 0))
    q = list(Binv) + [unknown] * lam
    one = _one(ring, top + 64)
    prev = None
    for _ in range(max_iter):
        qA = poly_mul(q, A, L, ring, 0)
        tau = qA[lam:L]
        rhs = [one - tau[0]] + [-x for x in tau[1:]]
        qn = poly_mul(Binv, rhs, W, ring, 0)
        q = qn + [unknown] * lam
        D = qA[:lam]
        sig = [(d.coords, d.prec, d.shift) for d in D] + [(x.coords, x.prec) for x in qn]
        if sig == prev:
            break
        prev = sig
    else:
        raise EscalationNeeded("Weierstrass iteration did not stabilise")
    qA = poly_mul(q, A, L, ring, 0)
    D = qA[:lam] + [_one(ring, top + 64)]
    # D must be distinguished: lower coefficients in the maximal ideal
    for d in D[:-1]:
        if d.val_lower() <= 0:
            raise EscalationNeeded("distinguished polynomial has a unit lower coefficient")
    U = poly_inverse(qn, W, ring)
    # residual check S/pi^(e mu) = D * U modulo T^W
    recon = poly_mul(D, U, W, ring, 0)
    ok = all((recon[i] - C[i]).is_zero() for i in range(W))
    if not ok:
        raise ArithmeticError("Weierstrass reconstruction failed")
    return WeierstrassData(ml.mu, lam, D, U, ok)


# --- trivial zero reduction ----------------------------------------------

def divide_by_linear(S: SeriesApprox, a: PadicElement) -> SeriesApprox:
    """Q with S = (T - a) Q, assuming S(a) = 0: Q_i = sum_k a^k S_{i+1+k}."""
    va = a.valuation()
    if va is None or va <= 0:
        raise ValueError("root must lie in the maximal ideal")
    L = S.L
    out = []
    acc = None
    for i in range(L - 2, -1, -1):
        acc = S.coeffs[i + 1] if acc is None else S.coeffs[i + 1] + a * acc
        tail = S.mu_floor + va * (L - 1 - i)
        out.append(acc.with_prec(min(acc.prec, tail)))
    out.reverse()
    return SeriesApprox(S.ring, tuple(out), S.level, S.mu_floor, S.calibration)


def gsharp_reduce(G: SeriesApprox, r_p: int, p: int) -> SeriesApprox:
    """G# = c_p * G / (T - (u - 1))^{r_p}, with c_p = 1/2 for p = 2."""
    cd = cyclotomic_data(p)
    a = PadicElement.from_int(G.ring, cd.u - 1, max(c.prec for c in G.coeffs) + 64)
    S = G
    for _ in range(r_p):
        S = divide_by_linear(S, a)
    if p == 2:
        half = Fraction(1, 2)
        coeffs = tuple(c * PadicElement.from_fraction(G.ring, half, c.prec + 64) for c in S.coeffs)
        S = SeriesApprox(G.ring, coeffs, G.level, G.mu_floor - 1, G.calibration)
    return S


# --- roots ----------------------------------------------------------------

@dataclass(frozen=True)
class RootCertificate:
    approx: int                 # the unique root t satisfies t = approx mod p^precision
    precision: int
    deriv_valuation: Fraction   # m = v(D'(approx))
    value_valuation: Fraction   # lower bound for v(D(approx))
    valuation: int | None       # v_p(t), None when t = 0 mod p^precision
    multiplicity: int = 1

    def to_dict(self) -> dict:
        return {"approx": str(self.approx), "precision": self.precision,
                "deriv_valuation": str(self.deriv_valuation), "valuation": self.valuation,
                "multiplicity": self.multiplicity}


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0 and n:
        n //= p
        v += 1
    return v


def _lift_digits(D, dD, r: int, k: int, m, target: int):
    """Extend r mod p^k digit by digit while v(D(r)) >= (digits) + m; None if no digit fits.

    A root t in Z_p with v(D'(t)) = m satisfies v(D(t mod p^j)) >= j + m once j > m,
    so a missing digit means the Hensel root lies outside Z_p.
    """
    ring = D[0].ring
    p = ring.p
    P = min(c.prec for c in D)
    for j in range(k, target):
        nxt = None
        for dgt in range(p):
            cand = r + dgt * p ** j
            val = poly_eval(D, PadicElement.from_int(ring, cand, P + 64))
            if val.val_lower() >= j + 1 + m:
                nxt = cand
                break
        if nxt is None:
            return None
        r = nxt
    return r % p ** target


def positive_valuation_roots(D, w: int) -> list[RootCertificate]:
    """Certified roots in p^w Z_p of a distinguished polynomial (or of a series via its D)."""
    if isinstance(D, SeriesApprox):
        D = weierstrass_distinguished(D).distinguished
    if not D:
        raise ValueError("empty polynomial")
    ring = D[0].ring
    p = ring.p
    if len(D) == 1:
        return []
    P = min(c.prec for c in D)
    dD = [c * (i + 1) for i, c in enumerate(D[1:])]
    out: list[RootCertificate] = []
    depth_cap = math.floor(P)

    def node(r: int, k: int):
        t = PadicElement.from_int(ring, r, P + 64)
        val = poly_eval(D, t)
        vD = val.valuation()
        if vD is not None and vD < k:
            return
        vlow = val.val_lower()
        m = poly_eval(dD, t).valuation()
        if m is not None and vlow > 2 * m and vlow - m >= k and k > m:
            prec = math.floor(P - m)
            a = _lift_digits(D, dD, r, k, m, prec)
            if a is not None:
                out.append(RootCertificate(a, prec, m, vlow, _vp(a, p) if a else None))
            return
        if k >= depth_cap:
            raise EscalationNeeded(f"root near {r} mod {p}^{k} is not certified at precision {P}")
        for dgt in range(p):
            node(r + dgt * p ** k, k + 1)

    node(0, w)
    out.sort(key=lambda c: c.approx)
    return out


def refine_root(D: list[PadicElement], cert: RootCertificate, extra: int = 3) -> int:
    """Lift a certified root by `extra` digits using (more precise) coefficients D."""
    dD = [c * (i + 1) for i, c in enumerate(D[1:])]
    P = min(c.prec for c in D)
    target = cert.precision + extra
    if target > P - cert.deriv_valuation:
        raise EscalationNeeded("coefficients too imprecise for the requested refinement")
    r = _lift_digits(D, dD, cert.approx, cert.precision, cert.deriv_valuation, target)
    if r is None:
        raise ArithmeticError("certified root does not lift")
    return r


# --- s <-> T ----------------------------------------------------------------

def zero_map_s_to_t(s, p: int, prec: int = 20) -> PadicElement:
    """t = u^{1-s} - 1 for s in Z_p (an int, or an element of the base ring)."""
    cd = cyclotomic_data(p)
    ring = base_ring(p)
    if isinstance(s, PadicElement):
        K = math.ceil(s.prec) + cd.w
        x = (1 - s.to_int())
    else:
        K = prec + cd.w
        x = 1 - s
    mod = p ** K
    val = pow(cd.u, x, mod) if x >= 0 else pow(pow(cd.u, -1, mod), -x, mod)
    return PadicElement.from_int(ring, val - 1, K)


def zero_map_t_to_s(t: PadicElement, p: int) -> PadicElement:
    """s = 1 - log(1+t)/log(u) for t in p^w Z_p."""
    cd = cyclotomic_data(p)
    vt = t.valuation()
    if t.shift or (vt is not None and vt < cd.w) or any(t.coords[1:]):
        raise ValueError("t must lie in p^w Z_p")
    ring = t.ring
    K = math.ceil(t.prec)
    num = padic_log(t + 1)
    den = padic_log(PadicElement.from_int(ring, cd.u, K + 64))
    ratio = num / den
    return (1 - ratio).with_prec(K - cd.w)


def zero_map(x, p: int, prec: int = 20, to: str | None = None):
    """Map s to t (ints and base-ring elements of valuation < w are treated as s)."""
    if to == "s" or (to is None and isinstance(x, PadicElement) and (x.valuation() or 10 ** 9) >= cyclotomic_data(p).w
                     and to != "t"):
        return zero_map_t_to_s(x, p)
    return zero_map_s_to_t(x, p, prec)


# --- non-integrality heuristic ------------------------------------------

@dataclass(frozen=True)
class NonIntegralityVerdict:
    verdict: str          # nonzero-nonint-likely | integer-suspect
    E: int
    E_prime: int
    escalations: int


def nonintegrality_heuristic(refine: Callable[[int], int], E0: int, p: int, max_escalations: int = 2) -> NonIntegralityVerdict:
    """Compare (a mod p^E) with (a mod p^{E+3}); escalate by 3 digits a bounded number of times."""
    aE = refine(E0) % p ** E0
    for k in range(max_escalations + 1):
        E2 = E0 + 3 * (k + 1)
        aE2 = refine(E2) % p ** E2
        if aE2 != aE:
            return NonIntegralityVerdict("nonzero-nonint-likely", E0, E2, k)
    return NonIntegralityVerdict("integer-suspect", E0, E0 + 3 * (max_escalations + 1), max_escalations)
