"""Dense univariate polynomials over Z/NZ, over F_p and over F_p[y]/(g).

Polynomials are lists of coefficients, lowest degree first.  These helpers
are deliberately small: they cover cyclotomic factorization, Hensel
lifting and the squarefree tests used on residual polynomials.
"""
from __future__ import annotations

from functools import lru_cache

import sympy


def trim(a: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a: list[int]) -> int:
    return len(trim(a)) - 1


def add(a, b, mod: int | None = None):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    if mod is not None:
        out = [c % mod for c in out]
    return trim(out)


def sub(a, b, mod: int | None = None):
    return add(a, [-c for c in b], mod)


def mul(a, b, mod: int | None = None):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    if mod is not None:
        out = [c % mod for c in out]
    return trim(out)


def divmod_monic(a, b, mod: int | None = None):
    """Divide by a monic polynomial b; returns (quotient, remainder)."""
    b = trim(b)
    if not b or b[-1] != 1:
        raise ValueError("divisor must be monic")
    r = list(a)
    db = len(b) - 1
    if len(r) <= db:
        return [], trim([c % mod for c in r] if mod else r)
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] % mod if mod else r[k]
        if c:
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] -= c * b[j]
    r = r[:db]
    if mod:
        r = [c % mod for c in r]
        q = [c % mod for c in q]
    return trim(q), trim(r)


def evaluate(a, x, mod: int | None = None):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
        if mod:
            acc %= mod
    return acc


def derivative(a):
    return trim([i * a[i] for i in range(1, len(a))])


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, r = divmod_monic(num, list(cyclotomic(d)))
            assert not r
    return tuple(num)


# --- arithmetic over F_p -------------------------------------------------

def fp_divmod(a, b, p: int):
    b = trim([c % p for c in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    monic = [(c * inv) % p for c in b]
    q, r = divmod_monic([c % p for c in a], monic, p)
    return [(c * inv) % p for c in q], r


def fp_gcd(a, b, p: int):
    a = trim([c % p for c in a])
    b = trim([c % p for c in b])
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def fp_xgcd(a, b, p: int):
    """Return (g, s, t) with s*a + t*b = g monic over F_p."""
    r0, r1 = trim([c % p for c in a]), trim([c % p for c in b])
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    scale = lambda v: trim([(c * inv) % p for c in v])
    return scale(r0), scale(s0), scale(t0)


def factor_mod_p(f, p: int) -> list[list[int]]:
    """Monic irreducible factors of a squarefree polynomial over F_p."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed([c % p for c in f])), x, modulus=p)
    out = []
    for fac, mult in poly.factor_list()[1]:
        if mult != 1:
            raise ValueError("polynomial is not squarefree mod p")
        coeffs = [int(c) % p for c in reversed(fac.all_coeffs())]
        inv = pow(coeffs[-1], -1, p)
        out.append([(c * inv) % p for c in coeffs])
    out.sort()
    return out


def hensel_lift(f, factors, p: int, k: int) -> list[list[int]]:
    """Lift a coprime factorization f = prod(factors) mod p to mod p^k.

    f must be monic with integer coefficients; factors are monic.
    """
    if len(factors) == 1:
        return [[c % p ** k for c in f]]
    half = len(factors) // 2
    g0 = [1]
    for fac in factors[:half]:
        g0 = mul(g0, fac, p)
    h0 = [1]
    for fac in factors[half:]:
        h0 = mul(h0, fac, p)
    g, h = _lift_pair(f, g0, h0, p, k)
    return hensel_lift(g, factors[:half], p, k) + hensel_lift(h, factors[half:], p, k)


def _lift_pair(f, g, h, p: int, k: int):
    one, s, t = fp_xgcd(g, h, p)
    if one != [1]:
        raise ValueError("factors are not coprime mod p")
    mod = p
    while mod < p ** k:
        mod2 = min(mod * mod, p ** k)
        e = sub(f, mul(g, h), mod2)
        # g += t*e mod g, h += s*e mod h (monic degrees preserved)
        _, dg = divmod_monic(mul(t, e, mod2), g, mod2)
        _, dh = divmod_monic(mul(s, e, mod2), h, mod2)
        g = add(g, dg, mod2)
        h = add(h, dh, mod2)
        # refresh the Bezout pair: s*g + t*h = 1 mod mod2
        b = sub(add(mul(s, g), mul(t, h)), [1], mod2)
        _, ds = divmod_monic(mul(s, b, mod2), h, mod2)
        _, dt = divmod_monic(mul(t, b, mod2), g, mod2)
        s = sub(s, ds, mod2)
        t = sub(t, dt, mod2)
        mod = mod2
    return g, h


# --- the residue field F_p[y]/(g) ---------------------------------------

class ResidueField:
    """Finite field F_p[y]/(g) with elements stored as coefficient tuples."""

    def __init__(self, p: int, g):
        self.p = p
        self.g = [c % p for c in g]
        self.d = len(self.g) - 1

    def reduce(self, a) -> tuple[int, ...]:
        _, r = divmod_monic([c % self.p for c in a], self.g, self.p)
        return tuple(r + [0] * (self.d - len(r)))

    def zero(self):
        return (0,) * self.d

    def one(self):
        return self.reduce([1])

    def is_zero(self, a) -> bool:
        return not any(a)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        return self.reduce(mul(list(a), list(b)))

    def inv(self, a):
        g, s, _ = fp_xgcd(list(a), self.g, self.p)
        if g != [1]:
            raise ZeroDivisionError("zero has no inverse")
        return self.reduce(s)

    def scalar(self, n: int):
        return self.reduce([n % self.p])


def kpoly_trim(F: ResidueField, a):
    a = list(a)
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def kpoly_divmod(F: ResidueField, a, b):
    b = kpoly_trim(F, b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(kpoly_trim(F, a))
    inv = F.inv(b[-1])
    db = len(b) - 1
    q = [F.zero()] * max(len(r) - db, 0)
    for k in range(len(r) - 1, db - 1, -1):
        c = F.mul(r[k], inv)
        if F.is_zero(c):
            continue
        q[k - db] = c
        for j in range(db + 1):
            r[k - db + j] = F.sub(r[k - db + j], F.mul(c, b[j]))
    return kpoly_trim(F, q), kpoly_trim(F, r[:db])


def kpoly_gcd(F: ResidueField, a, b):
    a, b = kpoly_trim(F, a), kpoly_trim(F, b)
    while b:
        a, b = b, kpoly_divmod(F, a, b)[1]
    return a


def kpoly_derivative(F: ResidueField, a):
    return kpoly_trim(F, [F.mul(F.scalar(i), a[i]) for i in range(1, len(a))])


def kpoly_is_squarefree(F: ResidueField, a) -> bool:
    """Squarefree test via gcd(P, P'); a vanishing derivative means a p-th power."""
    a = kpoly_trim(F, a)
    if len(a) <= 2:
        return bool(a)
    da = kpoly_derivative(F, a)
    if not da:
        return False
    return len(kpoly_gcd(F, a, da)) == 1
