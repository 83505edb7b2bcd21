"""Fixed-precision arithmetic in Z_p and in the tower rings Z_p[mu_m][mu_{p^k}].

A ring element is a vector of integers in the basis y^i z^j (i < d, j < e),
where y is a root of a Hensel-lifted factor g of the m-th cyclotomic
polynomial and z = zeta_{p^k} - 1 satisfies the Eisenstein relation
Phi_{p^k}(z + 1) = 0.  Valuations are normalised by v(p) = 1 and are
rationals with denominator e.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy

from . import polys

INF = math.inf
RING_PRECISION = 64


class PrecisionError(ArithmeticError):
    """Raised when a computation has no certified digits left."""


def vp_int(n: int, p: int) -> float | int:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_frac(x: Fraction, p: int):
    x = Fraction(x)
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def mult_order(a: int, m: int) -> int:
    if m == 1:
        return 1
    k, x = 1, a % m
    while x != 1:
        x = (x * a) % m
        k += 1
    return k


def _ceil(x) -> int:
    return math.ceil(x)


@dataclass(frozen=True)
class RingDescriptor:
    p: int
    q: int
    m: int
    unram_poly: tuple[int, ...]
    eisen_level: int
    e: int
    d: int
    M: int
    factor_index: int = 0
    eisen_poly: tuple[int, ...] = field(default=(0, 1), repr=False)

    @property
    def dim(self) -> int:
        return self.d * self.e

    # -- raw coordinate arithmetic (tuples of ints, modulo p^K) ----------

    def zero(self):
        return (0,) * self.dim

    def from_int(self, n: int, K: int | None = None):
        out = [0] * self.dim
        out[0] = n if K is None else n % self.p ** K
        return tuple(out)

    def add(self, a, b, K: int):
        mod = self.p ** K
        return tuple((x + y) % mod for x, y in zip(a, b))

    def sub(self, a, b, K: int):
        mod = self.p ** K
        return tuple((x - y) % mod for x, y in zip(a, b))

    def scale(self, a, n: int, K: int):
        mod = self.p ** K
        return tuple((x * n) % mod for x in a)

    def mul(self, a, b, K: int):
        mod = self.p ** K
        d, e = self.d, self.e
        if d * e == 1:
            return ((a[0] * b[0]) % mod,)
        if e == 1:
            prod = polys.mul(list(a), list(b))
            _, r = polys.divmod_monic(prod, list(self.unram_poly), mod)
            return tuple(r + [0] * (d - len(r)))
        rows = [[0] * (2 * e - 1) for _ in range(2 * d - 1)]
        bnz = [(i, j, b[i * e + j]) for i in range(d) for j in range(e) if b[i * e + j]]
        for i1 in range(d):
            for j1 in range(e):
                x = a[i1 * e + j1]
                if x:
                    for i2, j2, yv in bnz:
                        rows[i1 + i2][j1 + j2] += x * yv
        E = self.eisen_poly
        for row in rows:
            for j in range(2 * e - 2, e - 1, -1):
                c = row[j]
                if c:
                    row[j] = 0
                    for t in range(e):
                        row[j - e + t] -= c * E[t]
        g = self.unram_poly
        for i in range(2 * d - 2, d - 1, -1):
            ri = rows[i]
            for j in range(e):
                c = ri[j]
                if c:
                    for t in range(d):
                        rows[i - d + t][j] -= c * g[t]
        return tuple(rows[i][j] % mod for i in range(d) for j in range(e))

    def coord_valuation(self, a):
        """Valuation of an exactly known element (INF for zero)."""
        best = INF
        e = self.e
        for idx, x in enumerate(a):
            if x:
                v = vp_int(x, self.p) + Fraction(idx % e, e)
                if v < best:
                    best = v
        return best if best is INF else Fraction(best)

    def canonical(self, a, prec):
        """Reduce coordinates modulo the precision ideal pi^(e*prec)."""
        e = self.e
        out = []
        for idx, x in enumerate(a):
            k = _ceil(prec - Fraction(idx % e, e))
            out.append(x % self.p ** k if k > 0 else 0)
        return tuple(out)

    # -- structure ---------------------------------------------------------

    @property
    def residue_field(self) -> polys.ResidueField:
        return _residue_field(self.p, self.unram_poly)

    def residue(self, a):
        """Reduction modulo the maximal ideal (pi)."""
        e = self.e
        return self.residue_field.reduce([a[i * e] for i in range(self.d)])

    def lift_residue(self, r):
        out = [0] * self.dim
        for i, c in enumerate(r):
            out[i * self.e] = c
        return tuple(out)

    def epsilon(self, K: int):
        """The unit eps with z^e = p*eps (eps = 1 when e = 1)."""
        if self.e == 1:
            return self.from_int(1, K)
        E = self.eisen_poly
        out = [0] * self.dim
        out[0] = -1
        for j in range(1, self.e):
            out[j] = -(E[j] // self.p)
        return tuple(x % self.p ** K for x in out)

    def z_element(self, K: int):
        """z = zeta_{p^k} - 1 (for p^k = 2 this is the integer -2)."""
        if self.e == 1:
            return self.from_int(-self.eisen_poly[0], K)
        return self.z_power(1, K)

    def z_power(self, k: int, K: int):
        out = self.from_int(1, K)
        if self.e == 1:
            return out if k == 0 else self.zero()
        zz = [0] * self.dim
        zz[1] = 1
        zz = tuple(zz)
        for _ in range(k):
            out = self.mul(out, zz, K)
        return out

    def unit_inverse(self, a, K: int):
        r = self.residue(a)
        F = self.residue_field
        x = self.lift_residue(F.inv(r))
        two = self.from_int(2, K)
        steps = max(1, (K * self.e).bit_length() + 1)
        for _ in range(steps):
            x = self.mul(x, self.sub(two, self.mul(a, x, K), K), K)
        return x

    def root_of_unity(self, j: int, K: int):
        """zeta^j for the fixed primitive (m*p^k)-th root zeta = y*(1+z)."""
        return _root_table(self, K)[j % (self.m * self.eisen_level)]


@lru_cache(maxsize=None)
def _residue_field(p, g):
    return polys.ResidueField(p, list(g))


@lru_cache(maxsize=256)
def _inv_epsilon(ring: RingDescriptor, K: int):
    """1/eps where p = pi^e * eps."""
    return ring.unit_inverse(ring.epsilon(K), K)


@lru_cache(maxsize=64)
def _root_table(ring: RingDescriptor, K: int):
    N = ring.m * ring.eisen_level
    yv = [0] * ring.dim
    if ring.d > 1:
        yv[ring.e] = 1
    else:
        yv[0] = (-ring.unram_poly[0]) % ring.p ** K
    zeta = tuple(yv)
    if ring.eisen_level > 1:
        zeta = ring.mul(zeta, ring.add(ring.from_int(1, K), ring.z_element(K), K), K)
    out = [ring.from_int(1, K)]
    for _ in range(N - 1):
        out.append(ring.mul(out[-1], zeta, K))
    return out


@lru_cache(maxsize=None)
def _eisenstein(p: int, pk: int) -> tuple[int, ...]:
    if pk == 1:
        return (0, 1)
    phi = list(polys.cyclotomic(pk))
    # substitute x = z + 1
    out = [0]
    for c in reversed(phi):
        out = polys.add(polys.mul(out, [1, 1]), [c])
    return tuple(out)


@lru_cache(maxsize=None)
def make_ring(p: int, m: int = 1, pk: int = 1, M: int = RING_PRECISION, factor_index: int = 0) -> RingDescriptor:
    """Coefficient ring Z_p[mu_m][mu_pk] with its unramified part lifted to p^M."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1 or math.gcd(m, p) != 1:
        raise ValueError(f"m={m} must be a positive integer prime to p")
    k = 0
    t = pk
    while t % p == 0:
        t //= p
        k += 1
    if t != 1:
        raise ValueError(f"pk={pk} is not a power of {p}")
    q = p if p != 2 else 4
    e = 1 if k == 0 else (p - 1) * p ** (k - 1)
    phi_m = list(polys.cyclotomic(m))
    factors = polys.factor_mod_p(phi_m, p)
    if not 0 <= factor_index < len(factors):
        raise ValueError("factor index out of range")
    lifted = polys.hensel_lift(phi_m, factors, p, M)
    # keep the ordering of the residual factors
    order = sorted(range(len(factors)), key=lambda i: factors[i])
    g = tuple(lifted[order[factor_index]])
    d = len(g) - 1
    assert d == mult_order(p, m)
    return RingDescriptor(p=p, q=q, m=m, unram_poly=g, eisen_level=pk, e=e, d=d, M=M,
                          factor_index=factor_index, eisen_poly=_eisenstein(p, pk))


def base_ring(p: int, M: int = RING_PRECISION) -> RingDescriptor:
    return make_ring(p, 1, 1, M)


# --- elements ------------------------------------------------------------

@dataclass(frozen=True)
class PadicElement:
    """Element p^(-shift) * sum coords[i*e+j] y^i z^j known modulo pi^(e*prec)."""

    ring: RingDescriptor
    coords: tuple[int, ...]
    prec: Fraction
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "prec", Fraction(self.prec))

    # construction
    @classmethod
    def from_int(cls, ring, n: int, prec) -> "PadicElement":
        return cls.make(ring, ring.from_int(n), prec)

    @classmethod
    def from_fraction(cls, ring, x, prec) -> "PadicElement":
        x = Fraction(x)
        p = ring.p
        num, den = x.numerator, x.denominator
        s = 0
        while den % p == 0:
            den //= p
            s += 1
        K = _ceil(prec) + s + 1
        val = num * pow(den, -1, p ** K)
        return cls.make(ring, ring.from_int(val), prec, s)

    @classmethod
    def make(cls, ring, coords, prec, shift: int = 0) -> "PadicElement":
        prec = Fraction(prec)
        coords = ring.canonical(coords, prec + shift)
        while shift > 0 and all(c % ring.p == 0 for c in coords):
            coords = tuple(c // ring.p for c in coords)
            shift -= 1
        return cls(ring, coords, prec, shift)

    # basic queries
    @property
    def p(self) -> int:
        return self.ring.p

    def _K(self) -> int:
        return max(_ceil(self.prec + self.shift), 1)

    def valuation(self):
        """Certified valuation, or None when the known digits are all zero."""
        v = self.ring.coord_valuation(self.coords)
        if v is INF:
            return None
        v = v - self.shift
        return v if v < self.prec else None

    def val_lower(self) -> Fraction:
        v = self.valuation()
        return self.prec if v is None else v

    def is_zero(self) -> bool:
        return self.valuation() is None

    def residue(self):
        if self.shift:
            raise ValueError("element is not integral")
        return self.ring.residue(self.coords)

    def to_int(self) -> int:
        """Integer representative for an element of Z_p."""
        if any(self.coords[1:]) or self.shift:
            raise ValueError("not a p-adic integer of the base ring")
        return self.coords[0] % self.p ** max(_ceil(self.prec), 0)

    def with_prec(self, prec) -> "PadicElement":
        return PadicElement.make(self.ring, self.coords, min(self.prec, Fraction(prec)), self.shift)

    # arithmetic
    def _aligned(self, other):
        if not isinstance(other, PadicElement):
            other = PadicElement.from_fraction(self.ring, other, self.prec + self.shift + 1)
        s = max(self.shift, other.shift)
        prec = min(self.prec, other.prec)
        K = max(_ceil(prec + s), 1)
        a = self.ring.scale(self.coords, self.p ** (s - self.shift), K)
        b = self.ring.scale(other.coords, self.p ** (s - other.shift), K)
        return a, b, s, prec, K

    def __add__(self, other):
        a, b, s, prec, K = self._aligned(other)
        return PadicElement.make(self.ring, self.ring.add(a, b, K), prec, s)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, s, prec, K = self._aligned(other)
        return PadicElement.make(self.ring, self.ring.sub(a, b, K), prec, s)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        K = self._K()
        return PadicElement.make(self.ring, self.ring.scale(self.coords, -1, K), self.prec, self.shift)

    def __mul__(self, other):
        if isinstance(other, int):
            K = self._K()
            prec = self.prec + vp_int(other, self.p) if other else INF
            if other == 0:
                return PadicElement.make(self.ring, self.ring.zero(), self.prec + 64)
            return PadicElement.make(self.ring, self.ring.scale(self.coords, other, K + 1), prec, self.shift)
        if not isinstance(other, PadicElement):
            other = PadicElement.from_fraction(self.ring, other, self.prec + self.shift + 1)
        va, vb = self.val_lower(), other.val_lower()
        prec = min(self.prec + vb, other.prec + va)
        s = self.shift + other.shift
        K = max(_ceil(prec + s), 1)
        return PadicElement.make(self.ring, self.ring.mul(self.coords, other.coords, K), prec, s)

    __rmul__ = __mul__

    def unit_part(self):
        """Return (N, x/pi^N) with N = e*valuation and x/pi^N a unit."""
        v = self.valuation()
        if v is None:
            raise PrecisionError("cannot divide by an element indistinguishable from zero")
        ring = self.ring
        N = int(v * ring.e)
        total = N + ring.e * self.shift
        a, b = divmod(total, ring.e)
        K = _ceil(self.prec + self.shift)
        x = tuple(c // self.p ** a for c in self.coords)
        K -= a
        if b == 0:
            unit = x
            eps_pow = a
            newK = K
        else:
            x = ring.mul(x, ring.z_power(ring.e - b, K), K)
            unit = tuple(c // self.p for c in x)
            eps_pow = a + 1
            newK = K - 1
        if eps_pow:
            inv_eps = _inv_epsilon(ring, newK)
            for _ in range(eps_pow):
                unit = ring.mul(unit, inv_eps, newK)
        rel = min(self.prec - v, Fraction(newK))
        return N, PadicElement.make(ring, unit, rel)

    def inverse(self) -> "PadicElement":
        v = self.valuation()
        if v is None:
            raise PrecisionError("cannot invert an element indistinguishable from zero")
        ring = self.ring
        if v == 0 and self.shift == 0:
            K = self._K()
            return PadicElement.make(ring, ring.unit_inverse(self.coords, K), self.prec)
        N, unit = self.unit_part()
        rel = unit.prec
        Kr = _ceil(rel) + 1
        inv = ring.unit_inverse(unit.coords, Kr)
        # pi^(-N) = p^(-a) * eps^(-a) * [z^(e-b) / (p*eps) when b > 0]
        a, b = divmod(N, ring.e)
        shift = a
        coords = inv
        eps_pow = a
        if b:
            Kx = Kr + 1
            coords = ring.mul(coords, ring.z_power(ring.e - b, Kx), Kx)
            shift += 1
            eps_pow += 1
        if eps_pow and ring.e > 1:
            Kx = Kr + shift + 1
            inv_eps = _inv_epsilon(ring, Kx)
            for _ in range(eps_pow):
                coords = ring.mul(coords, inv_eps, Kx)
        prec = rel - v
        if shift < 0:
            coords = tuple(c * self.p ** (-shift) for c in coords)
            shift = 0
        return PadicElement.make(ring, coords, prec, shift)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicElement.from_fraction(self.ring, other, self.prec + self.shift + 64)
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicElement.from_int(self.ring, 1, self.prec + 10 ** 6)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        v = self.valuation()
        return f"PadicElement(v={v}, prec={self.prec}, coords={self.coords}, shift={self.shift})"

    def digits(self) -> list[int]:
        """Little-endian base-p digits of a base-ring element (for serialization)."""
        n = self.to_int()
        out = []
        for _ in range(max(_ceil(self.prec), 0)):
            out.append(n % self.p)
            n //= self.p
        return out


def exact(ring, n, prec) -> PadicElement:
    return PadicElement.from_fraction(ring, n, prec)


# --- cyclotomic data -----------------------------------------------------

@dataclass(frozen=True)
class CyclotomicData:
    p: int
    q: int
    u: int
    w: int
    r: int
    domain_radius: float


def cyclotomic_data(p: int) -> CyclotomicData:
    q = p if p != 2 else 4
    u = 1 + q
    return CyclotomicData(p=p, q=q, u=u, w=vp_int(u - 1, p), r=1,
                          domain_radius=float(p) * p ** (-1.0 / (p - 1)))


# --- Teichmueller, angle projection, logarithm --------------------------

def teichmuller_int(a: int, p: int, K: int) -> int:
    if a % p == 0:
        raise ValueError(f"{a} is not a unit at {p}")
    if p == 2:
        return 1 if a % 4 == 1 else (-1) % 2 ** K
    return pow(a, p ** (K - 1), p ** K)


def teichmuller(a: int, ring: RingDescriptor | None = None, M: int = 20, p: int | None = None) -> PadicElement:
    """omega_p(a): the root of unity of order dividing phi(q) congruent to a mod q."""
    if ring is None:
        ring = base_ring(p)
    return PadicElement.from_int(ring, teichmuller_int(a, ring.p, M), M)


def angle_int(a: int, p: int, K: int) -> int:
    return (a * pow(teichmuller_int(a, p, K), -1, p ** K)) % p ** K


def angle_projection(x, p: int | None = None, M: int = 20) -> PadicElement:
    """<x> = x * omega_p(x)^(-1), an element of 1 + qZ_p."""
    if isinstance(x, PadicElement):
        a = x.to_int()
        if a % x.p == 0:
            raise ValueError("angle projection needs a unit")
        K = _ceil(x.prec)
        return PadicElement.from_int(x.ring, angle_int(a, x.p, K), K)
    if x % p == 0:
        raise ValueError("angle projection needs a unit")
    return PadicElement.from_int(base_ring(p), angle_int(x, p, M), M)


def padic_log(x: PadicElement) -> PadicElement:
    """Logarithm series on 1 + (maximal ideal) with a rigorous truncation point."""
    ring, p = x.ring, x.p
    one = PadicElement.from_int(ring, 1, x.prec)
    y = x - one
    vy = y.valuation()
    if vy is None:
        return PadicElement.make(ring, ring.zero(), min(x.prec, y.prec))
    if x.shift or vy <= Fraction(1, p - 1):
        raise ValueError("logarithm series needs v(x - 1) > 1/(p - 1)")
    target = x.prec
    # terms k*vy - v_p(k) grow; stop once they exceed the target
    kmax = 1
    while True:
        k = kmax + 1
        bound = min(j * vy - math.floor(math.log(j, p) + 1e-12) for j in range(k, k + p * 4))
        if bound >= target:
            break
        kmax += 1
    guard = math.floor(math.log(kmax, p) + 1e-12) + 1
    K = _ceil(target) + guard
    yc = ring.canonical(y.coords, K)
    acc = ring.zero()
    power = yc
    for k in range(1, kmax + 1):
        vk = vp_int(k, p)
        term = tuple(c // p ** vk for c in power)
        term = ring.scale(term, pow(k // p ** vk, -1, p ** K), K)
        acc = ring.add(acc, term, K) if k % 2 else ring.sub(acc, term, K)
        power = ring.mul(power, yc, K)
    prec = min(target, y.prec + 0)
    return PadicElement.make(ring, acc, prec)


# --- power series approximations ----------------------------------------

@dataclass(frozen=True)
class SeriesApprox:
    """A power series known modulo per-coefficient precisions and T^L."""

    ring: RingDescriptor
    coeffs: tuple[PadicElement, ...]
    level: int | None = None
    mu_floor: Fraction = Fraction(0)
    calibration: str = ""

    @property
    def L(self) -> int:
        return len(self.coeffs)

    @property
    def per_coeff_precision(self) -> tuple[Fraction, ...]:
        return tuple(c.prec for c in self.coeffs)

    def valuations(self):
        return [c.valuation() for c in self.coeffs]

    def truncate(self, L: int) -> "SeriesApprox":
        return SeriesApprox(self.ring, self.coeffs[:L], self.level, self.mu_floor, self.calibration)

    @classmethod
    def from_ints(cls, ring, coeffs, prec, mu_floor=0) -> "SeriesApprox":
        return cls(ring, tuple(PadicElement.from_fraction(ring, c, prec) for c in coeffs),
                   mu_floor=Fraction(mu_floor))

    def to_dict(self) -> dict:
        return {
            "p": self.ring.p,
            "ring": [self.ring.m, self.ring.eisen_level, self.ring.factor_index],
            "coeffs": [[str(c) for c in x.coords] for x in self.coeffs],
            "precisions": [str(x.prec) for x in self.coeffs],
            "shifts": [x.shift for x in self.coeffs],
            "level": self.level,
            "mu_floor": str(self.mu_floor),
            "calibration": self.calibration,
        }

    @classmethod
    def from_dict(cls, data: dict, M: int = RING_PRECISION) -> "SeriesApprox":
        m, pk, idx = data["ring"]
        ring = make_ring(data["p"], m, pk, M, idx)
        coeffs = tuple(
            PadicElement(ring, tuple(int(c) for c in cs), Fraction(pr), sh)
            for cs, pr, sh in zip(data["coeffs"], data["precisions"], data["shifts"])
        )
        return cls(ring, coeffs, data["level"], Fraction(data["mu_floor"]), data["calibration"])


def series_eval(S: SeriesApprox, t: PadicElement) -> PadicElement:
    """Evaluate S at t (v(t) > 0) with the truncation tail folded into the precision."""
    vt = t.valuation()
    if vt is None:
        vt = t.prec
    if vt <= 0:
        raise ValueError("evaluation point must lie in the maximal ideal")
    if not S.coeffs:
        raise PrecisionError("empty series")
    acc = S.coeffs[-1]
    for c in reversed(S.coeffs[:-1]):
        acc = acc * t + c
    tail = S.mu_floor + S.L * vt
    prec = min(acc.prec, tail)
    if prec <= 0:
        raise PrecisionError("series evaluation has no certified digits")
    return acc.with_prec(prec)
