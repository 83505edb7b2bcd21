"""Iwasawa power series of even Dirichlet characters.

G_chi(T) is produced from level-n Stickelberger sums in the group ring of
Gal(Q(mu_{F q p^n})/Q(mu_{F q})).  Two independent checks sit beside it:
the exact generalized-Bernoulli oracle at non-positive integers, and a
closed-form series for L_p(s, chi) used to refine roots to high precision.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import (
    DirichletCharacter,
    _unit_lift,
    character_ring,
    omega_exponent,
    twisted_conductor_p_exponent,
)
from .padic import (
    PadicElement,
    PrecisionError,
    RingDescriptor,
    SeriesApprox,
    angle_int,
    cyclotomic_data,
    series_eval,
    teichmuller_int,
    vp_int,
)

log = logging.getLogger(__name__)


class CalibrationError(RuntimeError):
    pass


# --- exact Bernoulli numbers --------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_numbers(N: int) -> tuple[Fraction, ...]:
    """B_0..B_N with B_1 = -1/2."""
    B = [Fraction(1)]
    for n in range(1, N + 1):
        B.append(-sum(math.comb(n + 1, k) * B[k] for k in range(n)) / (n + 1))
    return tuple(B)


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    B = bernoulli_numbers(n)
    return sum(math.comb(n, k) * B[k] * x ** (n - k) for k in range(n + 1))


# --- exact values in Q(zeta_n, zeta_{phi(q)}) ---------------------------

@dataclass(frozen=True)
class CycloValue:
    """sum c * zeta_n^j * omega(g)^k, stored as {(j, k): c} with exact rationals."""

    n: int
    phi_q: int
    terms: tuple[tuple[tuple[int, int], Fraction], ...]

    @classmethod
    def from_dict(cls, n, phi_q, d) -> "CycloValue":
        return cls(n, phi_q, tuple(sorted((k, v) for k, v in d.items() if v)))

    def rational(self) -> Fraction:
        """Value when every term is real rational (quadratic and trivial characters)."""
        total = Fraction(0)
        for (j, k), c in self.terms:
            sign = 1
            for e, N in ((j, self.n), (k, self.phi_q)):
                if e % N == 0:
                    continue
                if 2 * e % N == 0:
                    sign = -sign
                else:
                    raise ValueError("value is not rational")
            total += sign * c
        return total

    def embed(self, ring: RingDescriptor, p: int, prec) -> PadicElement:
        """Image under zeta_n -> the ring's fixed root, zeta_{phi(q)} -> omega_p(g)."""
        g = _omega_generator(p)
        K = math.ceil(prec) + 4
        N = ring.m * ring.eisen_level
        scale = N // self.n if self.n > 1 else 0
        acc = PadicElement.make(ring, ring.zero(), prec + 64)
        for (j, k), c in self.terms:
            root = ring.root_of_unity(j * scale, K) if self.n > 1 else ring.from_int(1, K)
            w = pow(teichmuller_int(g, p, K), k, p ** K)
            unit = PadicElement.make(ring, ring.scale(root, w, K), K)
            acc = acc + unit * PadicElement.from_fraction(ring, c, prec)
        return acc.with_prec(prec)


def _omega_generator(p: int) -> int:
    import sympy

    return 3 if p == 2 else int(sympy.primitive_root(p))


def _twisted_exponents(chi: DirichletCharacter, p: int, j: int, f_eta: int):
    """Function a -> (chi exponent, omega exponent) of eta = chi*omega^j on units mod f_eta."""
    q = p if p != 2 else 4
    L = math.lcm(chi.modulus, q)

    def fn(a):
        if math.gcd(a, f_eta) != 1:
            return None
        b = _unit_lift(a, f_eta, L)
        return chi.exponent(b % chi.modulus) if chi.modulus > 1 else 0, j * omega_exponent(b, p)

    return fn


def twisted_conductor(chi: DirichletCharacter, p: int, j: int) -> int:
    v = vp_int(chi.modulus, p)
    f0 = chi.modulus // p ** v
    return f0 * p ** twisted_conductor_p_exponent(chi, j, p)


def generalized_bernoulli_twisted(n: int, chi: DirichletCharacter, p: int, j: int) -> CycloValue:
    """B_{n, eta} exactly, for the primitive character eta attached to chi * omega_p^j."""
    phi_q = 2 if p == 2 else p - 1
    f = twisted_conductor(chi, p, j)
    fn = _twisted_exponents(chi, p, j, f)
    acc: dict[tuple[int, int], Fraction] = {}
    if f == 1:
        B = bernoulli_numbers(n)[n]
        if n == 1:
            B = Fraction(1, 2)  # B_{1,1} = +1/2 for the trivial character
        return CycloValue.from_dict(chi.order, phi_q, {(0, 0): B})
    for a in range(1, f + 1):
        e = fn(a)
        if e is None:
            continue
        key = (e[0] % chi.order, e[1] % phi_q)
        acc[key] = acc.get(key, Fraction(0)) + bernoulli_poly(n, Fraction(a, f))
    scale = Fraction(f) ** (n - 1)
    return CycloValue.from_dict(chi.order, phi_q, {k: v * scale for k, v in acc.items()})


def generalized_bernoulli(n: int, chi: DirichletCharacter, p: int | None = None) -> CycloValue:
    """B_{n, chi} for a primitive character chi (exact)."""
    if n < 1:
        raise ValueError("n must be positive")
    if chi.is_trivial():
        if n == 1:
            raise ValueError("B_{1,chi} requires a nontrivial character")
        return CycloValue.from_dict(1, 1, {(0, 0): bernoulli_numbers(n)[n]})
    f = chi.modulus
    acc: dict[tuple[int, int], Fraction] = {}
    for a in range(1, f + 1):
        k = chi.exponent(a)
        if k is None:
            continue
        acc[(k, 0)] = acc.get((k, 0), Fraction(0)) + bernoulli_poly(n, Fraction(a, f))
    scale = Fraction(f) ** (n - 1)
    return CycloValue.from_dict(chi.order, 1, {k: v * scale for k, v in acc.items()})


def _eta_at_p(chi: DirichletCharacter, p: int, j: int):
    """(chi exponent, omega exponent) of eta(p), or None when p divides cond(eta)."""
    f = twisted_conductor(chi, p, j)
    if f % p == 0:
        return None
    return _twisted_exponents(chi, p, j, f)(p % f if f > 1 else 1) if f > 1 else (0, 0)


def lp_interpolated_value_exact(chi: DirichletCharacter, m: int, p: int) -> CycloValue:
    """-(B_{n,eta}/n)(1 - eta(p) p^{n-1}) with n = 1 - m and eta = chi*omega^{m-1}, exactly."""
    if m > 0:
        raise ValueError("interpolation points are m <= 0")
    n = 1 - m
    j = m - 1
    phi_q = 2 if p == 2 else p - 1
    B = generalized_bernoulli_twisted(n, chi, p, j)
    d = {k: -v / n for k, v in B.terms}
    ep = _eta_at_p(chi, p, j)
    if ep is not None:
        for (a, b), v in B.terms:
            key = ((a + ep[0]) % chi.order, (b + ep[1]) % phi_q)
            d[key] = d.get(key, Fraction(0)) + v * p ** (n - 1) / n
    return CycloValue.from_dict(chi.order, phi_q, d)


def lp_interpolated_value(chi: DirichletCharacter, m: int, p: int, prec: int = 20) -> PadicElement:
    ring = character_ring(chi, p)
    return lp_interpolated_value_exact(chi, m, p).embed(ring, p, prec)


# --- H_chi ----------------------------------------------------------------

@dataclass(frozen=True)
class HPoly:
    """H(T) = 1, or zeta*(1+T) - 1 with zeta = chi(gamma) = ring root of unity zeta^exponent."""

    ring: RingDescriptor
    is_one: bool
    zeta_exponent: int = 0

    def zeta(self, K: int) -> PadicElement:
        return PadicElement.make(self.ring, self.ring.root_of_unity(self.zeta_exponent, K), K)

    def evaluate(self, t: PadicElement) -> PadicElement:
        if self.is_one:
            return PadicElement.from_int(t.ring, 1, t.prec + 64)
        K = math.ceil(t.prec) + t.shift + 2
        z = self.zeta(K)
        return z * (t + 1) - 1

    def coefficients(self, K: int):
        if self.is_one:
            return [PadicElement.from_int(self.ring, 1, K)]
        z = self.zeta(K)
        return [z - 1, z]


def is_type_w(chi: DirichletCharacter, p: int) -> bool:
    f, n = chi.modulus, chi.order
    return f == p ** vp_int(f, p) and n == p ** vp_int(n, p)


def h_poly(chi: DirichletCharacter, p: int, ring: RingDescriptor | None = None) -> HPoly:
    ring = ring or character_ring(chi, p)
    if not is_type_w(chi, p):
        return HPoly(ring, True)
    if chi.is_trivial():
        return HPoly(ring, False, 0)
    u = cyclotomic_data(p).u
    k = chi.exponent(u % chi.modulus)
    N = ring.m * ring.eisen_level
    return HPoly(ring, False, k * (N // chi.order))


# --- Stickelberger sums ---------------------------------------------------

CONVENTIONS = (
    ("theta", "shifted", 1),
    ("theta", "plain", 1),
    ("theta_inv", "shifted", 1),
    ("theta_inv", "plain", 1),
    ("theta", "shifted", -1),
    ("theta", "plain", -1),
)
_calibrated: dict[int, tuple] = {}


def _conv_tag(conv) -> str:
    return f"{conv[0]}|{conv[1]}|sign{'+' if conv[2] > 0 else '-'}"


def min_level(chi: DirichletCharacter, p: int) -> int:
    v = vp_int(chi.modulus, p)
    return max(v - (1 if p != 2 else 2), 1)


def coefficient_precision(i: int, n: int, p: int, w: int) -> int:
    if i == 0:
        return n + w
    return n - int(math.floor(math.log(i, p) + 1e-12))


@lru_cache(maxsize=16)
def _dlog_table(p: int, n: int) -> np.ndarray:
    """c_n(r) for units r mod q p^n, with <r> = u^c mod q p^n; -1 off the units."""
    cd = cyclotomic_data(p)
    Q = cd.q * p ** n
    table = np.full(Q, -1, dtype=np.int64)
    if p == 2:
        tors = [1, Q - 1]
    else:
        tors = [teichmuller_int(a, p, n + 1) for a in range(1, p)]
    x = 1
    for c in range(p ** n):
        for t in tors:
            table[(t * x) % Q] = c
        x = x * cd.u % Q
    return table


def _group_ring_element(chi: DirichletCharacter, p: int, n: int, K: int, ring: RingDescriptor, conv):
    """Sum over units a < N of theta(a) * a * [c_n(a)], as (p^n x dim) integers mod p^K."""
    cd = cyclotomic_data(p)
    q = cd.q
    f = chi.modulus
    v = vp_int(f, p)
    F0 = f // p ** v
    Q = q * p ** n
    N = F0 * Q
    if N * N >= 2 ** 52:
        raise ValueError("level too large for exact bucket sums")
    P = p ** n
    nchi = chi.order
    dlog = _dlog_table(p, n)
    chi_tab = np.asarray(chi.table())
    buckets = np.zeros(P * nchi * q, dtype=np.float64)
    CH = 1 << 22
    for start in range(1, N, CH):
        a = np.arange(start, min(start + CH, N), dtype=np.int64)
        c = dlog[a % Q]
        e = chi_tab[a % f]
        ok = (c >= 0) & (e >= 0)
        if F0 > 1:
            ok &= np.gcd(a, F0) == 1
        a, c, e = a[ok], c[ok], e[ok]
        if conv[0] == "theta_inv":
            e = (-e) % nchi
        key = (c * nchi + e) * q + (a % q)
        buckets += np.bincount(key, weights=a.astype(np.float64), minlength=buckets.size)
    S = buckets.astype(np.int64).reshape(P, nchi, q)
    mod = p ** K
    if p == 2:
        om = {1: 1, 3: mod - 1}
    else:
        om = {r: teichmuller_int(r, p, K) for r in range(1, p)}
    w = np.zeros(q, dtype=object)
    for r, val in om.items():
        w[r] = pow(val, -1, mod) if conv[0] == "theta" else val
    s_cj = (S.astype(object) * w[None, None, :]).sum(axis=2) % mod  # (P, nchi)
    Nr = ring.m * ring.eisen_level
    roots = np.array([ring.root_of_unity(j * (Nr // nchi), K) for j in range(nchi)], dtype=object)
    coords = s_cj.dot(roots) % mod if nchi > 1 else (s_cj * roots[0][None, :]) % mod
    return coords, N


def stickelberger_series(chi: DirichletCharacter, p: int, n: int, L: int | None = None,
                         M: int | None = None, conv=None, ring: RingDescriptor | None = None) -> SeriesApprox:
    """G_chi(T) from the level-n sum, with rigorous per-coefficient precision."""
    if not chi.is_even:
        raise ValueError("the Iwasawa series is only defined for even characters")
    if conv is None:
        conv = calibrate(p)
    cd = cyclotomic_data(p)
    if n < min_level(chi, p):
        raise ValueError("level too small for the conductor")
    if ring is None:
        ring = character_ring(chi, p)
    P = p ** n
    L = P if L is None else min(L, P)
    top = n + cd.w
    M = top if M is None else min(M, top)
    vN = vp_int(cd.q, p) + n
    K = M + vN + 2
    if K > ring.M:
        raise PrecisionError("requested precision exceeds the ring precision")
    mod = p ** K
    coords, N = _group_ring_element(chi, p, n, K, ring, conv)
    H = h_poly(chi, p, ring)
    if not H.is_one:
        # multiply by u*zeta*(1+X) - 1 in Z[X]/((1+X)^{p^n} - 1)
        zeta = ring.root_of_unity(H.zeta_exponent, K)
        uz = ring.scale(zeta, cd.u, K)
        shifted = np.roll(coords, 1, axis=0)
        rows = [ring.mul(tuple(int(x) for x in shifted[c]), uz, K) for c in range(P)]
        coords = (np.array(rows, dtype=object) - coords) % mod
    Nunit = N // p ** vp_int(N, p)
    factor = (-conv[2] * pow(Nunit, -1, mod)) % mod
    coords = (coords * factor) % mod
    pv = p ** vp_int(N, p)
    if np.any(coords % pv != 0):
        raise CalibrationError("Stickelberger element is not integral")
    coords = coords // pv
    K2 = K - vp_int(N, p)
    mod2 = p ** K2
    # change of variable: G(T) = sum_c b_c * Y^c with Y = (1+T)/u  (or 1+T when plain)
    uinv = pow(cd.u, -1, mod2) if conv[1] == "shifted" else 1
    acc = np.zeros((L, ring.dim), dtype=object)
    for c in range(P - 1, -1, -1):
        nxt = acc.copy()
        nxt[1:] += acc[:-1]
        acc = (nxt * uinv) % mod2 if uinv != 1 else nxt % mod2
        acc[0] = (acc[0] + coords[c]) % mod2
    coeffs = []
    for i in range(L):
        pr = min(coefficient_precision(i, n, p, cd.w) if conv[1] == "shifted" else n - (0 if i == 0 else int(math.floor(math.log(i, p) + 1e-12))), M)
        coeffs.append(PadicElement.make(ring, tuple(int(x) for x in acc[i]), pr))
    return SeriesApprox(ring, tuple(coeffs), level=n, mu_floor=Fraction(1 if p == 2 else 0),
                        calibration=_conv_tag(conv))


def typeW_twist(G: SeriesApprox, zeta: PadicElement) -> SeriesApprox:
    """G(zeta*(1+T) - 1): the series of chi1*chi2 from that of chi1, with zeta = chi2(u).

    G must already live in the ring of zeta.  Coefficient j is sum_i C(i,j) G_i (zeta-1)^(i-j) zeta^j;
    the unknown G_i with i >= L add at least mu_floor + (L - j) v(zeta - 1).
    """
    ring = G.ring
    one = PadicElement.from_int(ring, 1, zeta.prec + 64)
    a = zeta - one
    va = a.valuation()
    if va is None:
        return G
    L = G.L
    out = []
    zpow = one
    for j in range(L):
        acc = None
        for i in range(L - 1, j - 1, -1):
            c = G.coeffs[i] * math.comb(i, j)
            acc = c if acc is None else acc * a + c
        coeff = acc * zpow
        tail = G.mu_floor + va * (L - j)
        out.append(coeff.with_prec(min(coeff.prec, tail)))
        zpow = zpow * zeta
    return SeriesApprox(ring, tuple(out), G.level, G.mu_floor, G.calibration)


def check_levels(chi: DirichletCharacter, p: int, n: int, L: int | None = None, conv=None) -> SeriesApprox:
    """Level-n series, cross-checked against level n-1 on the digits both certify."""
    S = stickelberger_series(chi, p, n, L, conv=conv)
    if n - 1 >= min_level(chi, p) and n >= 2:
        S0 = stickelberger_series(chi, p, n - 1, L, conv=conv)
        for a, b in zip(S.coeffs, S0.coeffs):
            if not (a - b).is_zero():
                raise CalibrationError("level n-1 and level n series disagree")
    return S


def calibrate(p: int):
    """Pick the summation convention reproducing the Bernoulli oracle; cached per p."""
    if p in _calibrated:
        return _calibrated[p]
    from .characters import omega_character

    probes = [DirichletCharacter.trivial(1)]
    if p >= 5:
        probes.append(omega_character(p, 2))
    for conv in CONVENTIONS:
        ok = True
        for chi in probes:
            try:
                S = stickelberger_series(chi, p, 3 if p < 5 else 2, conv=conv)
            except CalibrationError:
                ok = False
                break
            for m in (-1, -2, -3):
                try:
                    val = lp_evaluate(chi, m, p, series=S)
                except PrecisionError:
                    ok = False
                    break
                ref = lp_interpolated_value(chi, m, p, prec=val.prec + 2)
                if not (val - ref).is_zero():
                    ok = False
                    break
            if not ok:
                break
        if ok:
            _calibrated[p] = conv
            log.info("calibrated convention for p=%d: %s", p, _conv_tag(conv))
            return conv
    raise CalibrationError(f"no summation convention matches the oracle for p={p}")


# --- evaluation ---------------------------------------------------------

def u_power(p: int, x: int, K: int) -> int:
    """u^x modulo p^K for an integer x (negative allowed)."""
    u = cyclotomic_data(p).u
    mod = p ** K
    return pow(u, x, mod) if x >= 0 else pow(pow(u, -1, mod), -x, mod)


def t_of_s(p: int, s: int, ring: RingDescriptor, K: int) -> PadicElement:
    return PadicElement.from_int(ring, u_power(p, 1 - s, K) - 1, K)


def lp_evaluate(chi: DirichletCharacter, s: int, p: int, series: SeriesApprox | None = None,
                n: int | None = None) -> PadicElement:
    """L_p(s, chi) = G(u^{1-s} - 1) / H(u^{1-s} - 1) for an integer s."""
    if chi.is_trivial() and s == 1:
        raise ZeroDivisionError("pole of the p-adic zeta function at s = 1")
    if series is None:
        series = stickelberger_series(chi, p, n or (4 if p != 2 else 3))
    ring = series.ring
    K = max(math.ceil(max(c.prec for c in series.coeffs)) + 4, 8)
    t = t_of_s(p, s, ring, K)
    g = series_eval(series, t)
    H = h_poly(chi, p, ring)
    if H.is_one:
        return g
    return g / H.evaluate(t)


def truncated_euler_factor(chi: DirichletCharacter, ell: int, s: int, p: int, K: int = 20) -> PadicElement:
    """dEul_ell(eta, s) = 1 - eta(ell) <ell>^{-s} for eta = chi*omega^{-1}, or 1 if ell | cond(chi)."""
    if ell == p:
        raise ValueError("ell must differ from p")
    ring = character_ring(chi, p)
    one = PadicElement.from_int(ring, 1, K)
    if chi.modulus % ell == 0:
        return one
    k = chi.exponent(ell % chi.modulus) if chi.modulus > 1 else 0
    N = ring.m * ring.eisen_level
    root = ring.root_of_unity(k * (N // chi.order), K)
    om = pow(teichmuller_int(ell, p, K), -1, p ** K)
    ang = angle_int(ell, p, K)
    mod = p ** K
    a = pow(ang, -s, mod) if s <= 0 else pow(pow(ang, -1, mod), s, mod)
    eta = PadicElement.make(ring, ring.scale(root, om * a, K), K)
    return one - eta


def lp_truncated(chi: DirichletCharacter, S: list[int], s: int, p: int, series=None) -> PadicElement:
    val = lp_evaluate(chi, s, p, series=series)
    K = math.ceil(val.prec) + 2
    for ell in S:
        if ell == p:
            continue
        val = val * truncated_euler_factor(chi, ell, s, p, K)
    return val


# --- closed form (independent of the Stickelberger path) -----------------

def lp_closed_form(chi: DirichletCharacter, s: int, p: int, prec: int) -> PadicElement:
    """L_p(s, chi) = (1/F)(1/(s-1)) sum_{a<=F, p!|a} chi(a) <a>^{1-s} sum_j C(1-s, j)(F/a)^j B_j."""
    if s == 1:
        raise ZeroDivisionError("closed form is singular at s = 1")
    q = p if p != 2 else 4
    F = math.lcm(chi.modulus, q)
    vF = vp_int(F, p)
    loss = vF + vp_int(s - 1, p)
    K = prec + loss + 4
    J = (K + 2) // vF + 2
    B = bernoulli_numbers(J)
    ring = character_ring(chi, p)
    x = 1 - s
    binoms = [Fraction(1)]
    for j in range(1, J + 1):
        binoms.append(binoms[-1] * (x - j + 1) / j)
    Kb = K + J + 4
    modb = p ** Kb
    acc = ring.zero()
    N = ring.m * ring.eisen_level
    for a in range(1, F + 1):
        if a % p == 0:
            continue
        k = chi.exponent(a % chi.modulus) if chi.modulus > 1 else 0
        if k is None:
            continue
        inner = Fraction(0)
        ratio = Fraction(F, a)
        rp = Fraction(1)
        for j in range(J + 1):
            if B[j]:
                inner += binoms[j] * rp * B[j]
            rp *= ratio
        # inner has denominator prime to p except for at most one p from B_j
        num, den = inner.numerator, inner.denominator
        sh = vp_int(den, p)
        inner_int = num * pow(den // p ** sh, -1, modb) % modb
        ang = angle_int(a, p, Kb)
        apow = pow(ang, x, modb) if x >= 0 else pow(pow(ang, -1, modb), -x, modb)
        root = ring.root_of_unity(k * (N // chi.order) if chi.order > 1 else 0, Kb)
        term = ring.scale(root, inner_int * apow * p ** (1 - sh) if sh <= 1 else 0, Kb)
        if sh > 1:
            raise AssertionError("unexpected p-power in Bernoulli denominators")
        acc = ring.add(acc, term, Kb)
    # acc = p * sum; divide by p * F * (s - 1)
    total = PadicElement.make(ring, acc, min(Kb, J * vF))
    denom = PadicElement.from_fraction(ring, Fraction(p * F * (s - 1)), Kb + 8)
    out = total / denom
    return out.with_prec(min(out.prec, prec))


def series_for_precision(chi: DirichletCharacter, p: int, digits: int, L: int = 12,
                         points=(-1, -2, -3), max_level: int = 12):
    """Smallest level whose evaluations at the given points carry `digits` certified digits."""
    cd = cyclotomic_data(p)
    n = max(min_level(chi, p), max(1, digits - cd.w))
    while n <= max_level:
        S = stickelberger_series(chi, p, n, L=L)
        vals = [lp_evaluate(chi, m, p, series=S) for m in points]
        if all(v.prec >= digits for v in vals):
            return S, vals
        n += 1
    raise PrecisionError(f"could not reach {digits} digits by level {max_level}")
