"""Characters of finite abelian groups, instantiated with (Z/f)^*.

Smith and Hermite normal forms drive subgroup enumeration; every subgroup
with cyclic quotient yields a family of characters sharing a kernel.  The
families are then split into orbits under Gal(Qbar_p/Q_p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np
import sympy

from . import polys
from .padic import RING_PRECISION, make_ring, mult_order, teichmuller_int, vp_int

Matrix = list[list[int]]


# --- Smith normal form ---------------------------------------------------

def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A, B) -> Matrix:
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def smith_normal_form(A) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, V, D) with U*A*V = D diagonal, d_{i+1} | d_i, U and V unimodular."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    if _det(A) == 0:
        raise ValueError("matrix is singular")
    D = [list(map(int, row)) for row in A]
    U, V = _identity(n), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c*row_src
        for M in (D, U):
            M[dst] = [x + c * y for x, y in zip(M[dst], M[src])]

    def add_col(src, dst, c):
        for M in (D, V):
            for row in M:
                row[dst] += c * row[src]

    for t in range(n):
        while True:
            # smallest nonzero entry of the remaining block becomes the pivot
            piv = min(((abs(D[i][j]), i, j) for i in range(t, n) for j in range(t, n) if D[i][j]))
            _, i, j = piv
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, n):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        done = False
            if not done:
                continue
            bad = [(i, j) for i in range(t + 1, n) for j in range(t + 1, n) if D[i][j] % D[t][t]]
            if bad:
                add_row(bad[0][0], t, 1)
                continue
            break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    # increasing chain -> decreasing chain
    perm = list(range(n - 1, -1, -1))
    U = [U[i] for i in perm]
    D = [[D[i][j] for j in perm] for i in perm]
    V = [[row[j] for j in perm] for row in V]
    return U, V, D


def _inverse_unimodular(U) -> Matrix:
    inv = sympy.Matrix(U).inv()
    return [[int(x) for x in inv.row(i)] for i in range(inv.rows)]


# --- abstract groups and subgroups ---------------------------------------

@dataclass(frozen=True)
class AbelianPresentation:
    """Z^s / diag(d_1, ..., d_s) with d_{i+1} | d_i and every d_i > 1."""

    invariants: tuple[int, ...]

    def __post_init__(self):
        d = self.invariants
        if any(x <= 1 for x in d) or any(d[i] % d[i + 1] for i in range(len(d) - 1)):
            raise ValueError(f"not a minimal SNF presentation: {d}")

    @property
    def order(self) -> int:
        return math.prod(self.invariants)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def exponent(self) -> int:
        return self.invariants[0] if self.invariants else 1


def enumerate_subgroups(D) -> list[Matrix]:
    """Upper-triangular HNF matrices M, one per subgroup M*Z^s / D*Z^s.

    M has m_ii | d_i, entries right of the diagonal in [0, m_ii), and is kept
    when M^{-1} D is integral.  Rows are chosen bottom-up so that the back
    substitution prunes partial matrices early.
    """
    d = list(D.invariants if isinstance(D, AbelianPresentation) else D)
    s = len(d)
    if s == 0:
        return [[]]
    out = []
    M = [[0] * s for _ in range(s)]
    # xs[col][i]: solution of M x = d_col e_col restricted to rows >= i
    xs = [[0] * s for _ in range(s)]

    # int64 is safe while |t * x| stays well below 2^63
    vectorize = max(d) ** 3 < 2 ** 62

    def rec(i):
        if i < 0:
            out.append([row[:] for row in M])
            return
        k = s - 1 - i
        for mii in sympy.divisors(d[i]):
            if vectorize and k:
                # all tails at once: acc[col] = d_col [col == i] - tail . xs[col][i+1:]
                tails = np.indices((mii,) * k).reshape(k, -1).T
                X = np.array([[xs[col][j] for j in range(i + 1, s)] for col in range(s)], dtype=np.int64).T
                acc = np.array([d[col] if col == i else 0 for col in range(s)], dtype=np.int64) - tails @ X
                good = np.nonzero(np.all(acc % mii == 0, axis=1))[0]
                for r in good:
                    for col in range(s):
                        xs[col][i] = int(acc[r, col]) // mii
                    M[i] = [0] * i + [mii] + [int(t) for t in tails[r]]
                    rec(i - 1)
                continue
            for tail in product(range(mii), repeat=k):
                ok = True
                for col in range(s):
                    acc = (d[col] if col == i else 0) - sum(t * xs[col][j] for t, j in zip(tail, range(i + 1, s)))
                    if acc % mii:
                        ok = False
                        break
                    xs[col][i] = acc // mii
                if ok:
                    M[i] = [0] * i + [mii] + list(tail)
                    rec(i - 1)

    rec(s - 1)
    return out


def _contains_relations(M, d) -> bool:
    """Is M^{-1} D integral?  Back substitution on the triangular M."""
    s = len(d)
    for col in range(s):
        rhs = [d[col] if r == col else 0 for r in range(s)]
        x = [0] * s
        for i in range(s - 1, -1, -1):
            acc = rhs[i] - sum(M[i][j] * x[j] for j in range(i + 1, s))
            if acc % M[i][i]:
                return False
            x[i] = acc // M[i][i]
    return True


def _det(A) -> int:
    """Bareiss fraction-free determinant."""
    M = [list(map(int, row)) for row in A]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k]:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SubgroupCharacter:
    """Character of Z^s/D with kernel M*Z^s: chi(x) = zeta_n^{(U x)_1}."""

    order: int
    row: tuple[int, ...]

    def exponent(self, x) -> int:
        return sum(r * xi for r, xi in zip(self.row, x)) % self.order if self.order > 1 else 0


NON_CYCLIC = "non-cyclic quotient"


def character_for_subgroup(D, M):
    """The generator of the character group of G/H, or NON_CYCLIC."""
    d = list(D.invariants if isinstance(D, AbelianPresentation) else D)
    s = len(d)
    if s == 0:
        return SubgroupCharacter(1, ())
    U, _, E = smith_normal_form(M)
    e = [E[i][i] for i in range(s)]
    if s > 1 and e[1] != 1:
        return NON_CYCLIC
    n = e[0]
    return SubgroupCharacter(n, tuple(x % n if n > 1 else 0 for x in U[0]))


# --- the unit group (Z/f)^* ---------------------------------------------

@dataclass(frozen=True)
class UnitGroup:
    modulus: int
    presentation: AbelianPresentation
    raw_gens: tuple[int, ...]
    raw_orders: tuple[int, ...]
    raw_primes: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]
    gens: tuple[int, ...]

    def raw_dlog(self, a: int) -> tuple[int, ...]:
        return _raw_dlog(self.modulus, a % self.modulus)

    def dlog(self, a: int) -> tuple[int, ...]:
        """Exponent vector of a in the SNF generators."""
        raw = self.raw_dlog(a)
        return tuple(sum(u * r for u, r in zip(row, raw)) % d
                     for row, d in zip(self.U, self.presentation.invariants))

    def element(self, x) -> int:
        out = 1
        for g, k in zip(self.gens, x):
            out = out * pow(g, k, self.modulus) % self.modulus
        return out


def _crt_lift(residue: int, modulus_part: int, f: int) -> int:
    """The integer = residue mod modulus_part and = 1 mod f/modulus_part."""
    other = f // modulus_part
    if other == 1:
        return residue % f
    return sympy.ntheory.modular.crt([modulus_part, other], [residue, 1])[0] % f


@lru_cache(maxsize=None)
def _local_components(f: int):
    """Raw generators per prime power: list of (prime, prime power, generator, order)."""
    comps = []
    for ell, v in sorted(sympy.factorint(f).items()):
        pv = ell ** v
        if ell == 2:
            if v >= 2:
                comps.append((2, pv, pv - 1, 2))
            if v >= 3:
                comps.append((2, pv, 5, 2 ** (v - 2)))
        else:
            g = int(sympy.primitive_root(pv))
            comps.append((ell, pv, g, (ell - 1) * ell ** (v - 1)))
    return comps


@lru_cache(maxsize=None)
def _local_log_table(ell: int, pv: int, g: int):
    table = {}
    x = 1
    for k in range((ell - 1) * (pv // ell)):
        table[x] = k
        x = x * g % pv
    return table


def _raw_dlog(f: int, a: int) -> tuple[int, ...]:
    if math.gcd(a, f) != 1:
        raise ValueError(f"{a} is not a unit modulo {f}")
    out = []
    for ell, pv, g, order in _local_components(f):
        b = a % pv
        if ell == 2:
            if g == pv - 1:  # the sign component
                out.append(0 if b % 4 == 1 else 1)
            else:
                b = b if b % 4 == 1 else (-b) % pv
                out.append(_five_log(b, pv))
        else:
            out.append(_local_log_table(ell, pv, g)[b])
    return tuple(out)


@lru_cache(maxsize=None)
def _five_table(pv: int):
    table = {}
    x = 1
    for k in range(max(pv // 4, 1)):
        table[x] = k
        x = x * 5 % pv
    return table


def _five_log(b: int, pv: int) -> int:
    return _five_table(pv)[b]


@lru_cache(maxsize=None)
def unit_group(f: int) -> UnitGroup:
    """(Z/f)^* by CRT over prime powers, reduced to Smith normal form."""
    if f < 1:
        raise ValueError("modulus must be positive")
    comps = _local_components(f)
    raw_gens = tuple(_crt_lift(g, pv, f) for _, pv, g, _ in comps)
    raw_orders = tuple(order for *_, order in comps)
    raw_primes = tuple(ell for ell, *_ in comps)
    s = len(comps)
    if s == 0:
        return UnitGroup(f, AbelianPresentation(()), (), (), (), (), ())
    R = [[raw_orders[i] if i == j else 0 for j in range(s)] for i in range(s)]
    U, V, D = smith_normal_form(R)
    keep = [i for i in range(s) if D[i][i] > 1]
    Uinv = _inverse_unimodular(U)
    gens = []
    for i in keep:
        x = 1
        for j in range(s):
            x = x * pow(raw_gens[j], Uinv[j][i] % raw_orders[j], f) % f
        gens.append(x)
    return UnitGroup(
        modulus=f,
        presentation=AbelianPresentation(tuple(D[i][i] for i in keep)),
        raw_gens=raw_gens,
        raw_orders=raw_orders,
        raw_primes=raw_primes,
        U=tuple(tuple(U[i]) for i in keep),
        gens=tuple(gens),
    )


# --- Dirichlet characters ------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """chi mod f with chi(raw_gens[j]) = zeta_n^{raw_exps[j]}."""

    modulus: int
    order: int
    raw_exps: tuple[int, ...]

    @classmethod
    def from_function(cls, f: int, n: int, fn) -> "DirichletCharacter":
        G = unit_group(f)
        exps = [fn(g) % n for g in G.raw_gens]
        return cls._normalized(f, n, exps)

    @classmethod
    def _normalized(cls, f, n, exps) -> "DirichletCharacter":
        g = n
        for x in exps:
            g = math.gcd(g, x)
        n2 = n // g if n else 1
        return cls(f, max(n2, 1), tuple((x // g) % max(n2, 1) for x in exps))

    @classmethod
    def trivial(cls, f: int = 1) -> "DirichletCharacter":
        return cls(f, 1, tuple(0 for _ in unit_group(f).raw_gens))

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.modulus)

    def exponent(self, a: int):
        """k with chi(a) = zeta_n^k, or None when gcd(a, f) > 1."""
        if math.gcd(a, self.modulus) != 1:
            return None
        raw = _raw_dlog(self.modulus, a % self.modulus)
        return sum(e * r for e, r in zip(self.raw_exps, raw)) % self.order

    @property
    def gen_exponents(self) -> tuple[int, ...]:
        """Exponents on the SNF generators of (Z/f)^*."""
        return tuple(self.exponent(g) for g in self.group.gens)

    def table(self):
        return _exponent_table(self)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        f = math.lcm(self.modulus, other.modulus)
        n = math.lcm(self.order, other.order)
        a, b = n // self.order, n // other.order
        return DirichletCharacter.from_function(
            f, n, lambda x: a * self.exponent(x) + b * other.exponent(x))

    def __pow__(self, k: int) -> "DirichletCharacter":
        return DirichletCharacter._normalized(self.modulus, self.order, [k * x for x in self.raw_exps])

    def lift(self, f: int) -> "DirichletCharacter":
        if f % self.modulus:
            raise ValueError("can only lift to a multiple of the modulus")
        return DirichletCharacter.from_function(f, self.order, self.exponent)

    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def parity(self) -> int:
        if self.modulus <= 2:
            return 0
        k = self.exponent(self.modulus - 1)
        return 0 if k == 0 else 1

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    def local_conductor_exponents(self) -> dict[int, int]:
        out = {}
        comps = _local_components(self.modulus)
        for ell, v in sympy.factorint(self.modulus).items():
            idx = [i for i, c in enumerate(comps) if c[0] == ell]
            orders = {comps[i][2]: self.order // math.gcd(self.order, self.raw_exps[i]) for i in idx}
            if ell == 2:
                five = [self.order // math.gcd(self.order, self.raw_exps[i]) for i in idx if comps[i][2] == 5]
                sign = [self.order // math.gcd(self.order, self.raw_exps[i]) for i in idx if comps[i][2] != 5]
                o5 = five[0] if five else 1
                os_ = sign[0] if sign else 1
                if o5 == 1 and os_ == 1:
                    c = 0
                elif o5 == 1:
                    c = 2
                else:
                    c = 2 + vp_int(o5, 2)
            else:
                o = list(orders.values())[0] if orders else 1
                c = 0 if o == 1 else 1 + vp_int(o, ell)
            out[ell] = c
        return out

    @property
    def conductor(self) -> int:
        return math.prod(ell ** c for ell, c in self.local_conductor_exponents().items())

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def primitive(self) -> "DirichletCharacter":
        c = self.conductor
        if c == self.modulus:
            return self
        return DirichletCharacter.from_function(c, self.order, lambda g: self.exponent(_unit_lift(g, c, self.modulus)))

    def component(self, ell: int) -> "DirichletCharacter":
        """The local component at the prime ell, as a character mod ell^v."""
        v = vp_int(self.modulus, ell)
        if v == 0:
            return DirichletCharacter.trivial(1)
        pv = ell ** v
        return DirichletCharacter.from_function(pv, self.order,
                                                lambda g: self.exponent(_crt_lift(g, pv, self.modulus)))

    def key(self, p: int, factor_index: int = 0) -> str:
        exps = ",".join(str(x) for x in self.gen_exponents)
        return f"{p}:{self.modulus}:[{exps}]:{self.order}:{factor_index}"


def _unit_lift(g: int, c: int, f: int) -> int:
    """A unit modulo f congruent to g modulo c."""
    x = g % c
    while math.gcd(x, f) != 1:
        x += c
    return x


@lru_cache(maxsize=256)
def _exponent_table(chi: DirichletCharacter):
    """List over a in [0, f): exponent of chi(a), or -1 when gcd(a, f) > 1."""
    import numpy as np

    f = chi.modulus
    out = np.full(f, -1, dtype=np.int64)
    if f == 1:
        out[0] = 0
        return out
    G = unit_group(f)
    # walk the group as a product of cyclic raw generators
    elems = np.array([1], dtype=np.int64)
    exps = np.array([0], dtype=np.int64)
    for g, order, e in zip(G.raw_gens, G.raw_orders, chi.raw_exps):
        powers = [1]
        for _ in range(order - 1):
            powers.append(powers[-1] * g % f)
        powers = np.array(powers, dtype=np.int64)
        pexp = (np.arange(order, dtype=np.int64) * e) % chi.order
        elems = (elems[:, None] * powers[None, :] % f).ravel()
        exps = ((exps[:, None] + pexp[None, :]) % chi.order).ravel()
    out[elems] = exps
    return out


# --- p-adic comparisons with the Teichmueller character -----------------

def conductor_and_parity(chi: DirichletCharacter) -> tuple[int, str]:
    return chi.conductor, "even" if chi.is_even else "odd"


def character_ring(chi: DirichletCharacter, p: int, M: int = RING_PRECISION):
    n = chi.order
    k = vp_int(n, p)
    return make_ring(p, n // p ** k, p ** k, M)


def omega_power_value(a: int, j: int, p: int, K: int) -> int:
    phi_q = p - 1 if p != 2 else 2
    return pow(teichmuller_int(a, p, K), j % phi_q, p ** K)


def twisted_is_one(chi: DirichletCharacter, a: int, j: int, p: int, K: int = 4) -> bool:
    """Decide chi(a) * omega_p(a)^j == 1 inside the coefficient ring of chi."""
    k = chi.exponent(a)
    if k is None:
        raise ValueError("argument is not a unit for chi")
    ring = character_ring(chi, p)
    val = ring.root_of_unity(k, K)
    target = pow(omega_power_value(a, j, p, K), -1, p ** K)
    return val == ring.from_int(target, K)


def twisted_conductor_p_exponent(chi: DirichletCharacter, j: int, p: int) -> int:
    """Exponent of p in the conductor of chi * omega_p^j."""
    v = vp_int(chi.modulus, p)
    q = p if p != 2 else 4
    phi_q = q // 2 if p == 2 else p - 1
    if v == 0:
        return 0 if j % phi_q == 0 else (1 if p != 2 else 2)
    pv = p ** v
    f = chi.modulus
    # tame part: a torsion generator t of (Z/p^v)^*
    if p == 2:
        t = pv - 1
        if v == 1:
            tame_trivial = j % 2 == 0
        else:
            tame_trivial = twisted_is_one(chi, _crt_lift(t, pv, f), j, p)
    else:
        g = int(sympy.primitive_root(pv))
        t = pow(g, pv // p, pv)
        tame_trivial = twisted_is_one(chi, _crt_lift(t, pv, f), j, p)
    # wild part is untouched by omega
    local = chi.component(p)
    wild_gen = (1 + q) % pv if pv > q else None
    wild_order = 1
    if wild_gen is not None and math.gcd(wild_gen, p) == 1:
        wild_order = local.order // math.gcd(local.order, local.exponent(wild_gen)) if local.order > 1 else 1
    if wild_order > 1:
        return (1 if p != 2 else 2) + vp_int(wild_order, p)
    if not tame_trivial:
        return 1 if p != 2 else 2
    return 0


def prime_to_p_value_is_one(chi: DirichletCharacter, p: int, x: int, j: int = 0, K: int = 4) -> bool:
    """Is (chi_{prime-to-p part} * omega^j)(x) = 1, for x prime to the prime-to-p conductor?"""
    v = vp_int(chi.modulus, p)
    pv = p ** v
    f0 = chi.modulus // pv
    if f0 == 1:
        lift = 1
    else:
        lift = sympy.ntheory.modular.crt([f0, pv], [x % f0, 1])[0] if pv > 1 else x % f0
    k = chi.exponent(int(lift))
    ring = character_ring(chi, p)
    val = ring.root_of_unity(k, K)
    target = pow(omega_power_value(x, j, p, K), -1, p ** K) if j else 1
    return val == ring.from_int(target, K)


# --- enumeration ---------------------------------------------------------

def kernel_families(f: int, even: bool | None = True) -> list[list[DirichletCharacter]]:
    """Primitive characters of conductor f grouped by kernel."""
    G = unit_group(f)
    D = G.presentation
    minus = G.dlog(f - 1) if f > 2 else tuple(0 for _ in D.invariants)
    families = []
    for M in enumerate_subgroups(D):
        ch = character_for_subgroup(D, M)
        if ch == NON_CYCLIC:
            continue
        if even is not None:
            par_even = ch.exponent(minus) == 0
            if par_even != even:
                continue
        n = ch.order
        # SNF coordinates -> raw coordinates: x_snf = U x_raw
        raw = [sum(ch.row[i] * G.U[i][j] for i in range(len(ch.row))) % n for j in range(len(G.raw_gens))]
        base = DirichletCharacter._normalized(f, n, raw)
        if not base.is_primitive:
            continue
        fam = [base ** a for a in range(1, n + 1) if math.gcd(a, n) == 1] if n > 1 else [base]
        families.append(fam)
    families.sort(key=lambda fam: (fam[0].order, fam[0].raw_exps))
    return families


def cyclotomic_factorization_qp(n: int, p: int, M: int = 20) -> list[list[int]]:
    """Irreducible factors of Phi_n over Q_p, modulo p^M."""
    if n < 1:
        raise ValueError("n must be positive")
    if n % p:
        factors = polys.factor_mod_p(list(polys.cyclotomic(n)), p)
        if len(factors) == 1:
            return [[c % p ** M for c in polys.cyclotomic(n)]]
        return polys.hensel_lift(list(polys.cyclotomic(n)), factors, p, M)
    prev = cyclotomic_factorization_qp(n // p, p, M)
    mod = p ** M
    out = []
    for F in prev:
        Fp = [0] * ((len(F) - 1) * p + 1)
        for i, c in enumerate(F):
            Fp[i * p] = c
        if (n // p) % p == 0:
            out.append([c % mod for c in Fp])
        else:
            q, r = polys.divmod_monic(Fp, F, mod)
            if r:
                raise ArithmeticError("precision too small for the factor recursion")
            out.append(q)
    return out


@dataclass(frozen=True)
class ConjugacyClass:
    representative: DirichletCharacter
    orbit_size: int
    embedding_degree: int
    exponents: tuple[int, ...]


def qp_conjugacy_classes(family: list[DirichletCharacter], p: int) -> list[ConjugacyClass]:
    """Split a kernel family {chi^a} into Gal(Qbar_p/Q_p)-orbits."""
    base = family[0]
    n = base.order
    k = vp_int(n, p)
    m = n // p ** k
    units = [a for a in range(1, n + 1) if math.gcd(a, n) == 1] if n > 1 else [1]
    frob = {pow(p, j, m) if m > 1 else 0 for j in range(mult_order(p, m))}
    T = [t for t in units if (t % m if m > 1 else 0) in frob] if n > 1 else [1]
    seen = set()
    classes = []
    for a in units:
        if a in seen:
            continue
        orbit = sorted({(a * t) % n if n > 1 else 1 for t in T})
        seen.update(orbit)
        rep = base ** a
        deg = (p - 1) * p ** (k - 1) * mult_order(p, m) if k else mult_order(p, m)
        classes.append(ConjugacyClass(rep, len(orbit), deg, tuple(orbit)))
    expected = len(cyclotomic_factorization_qp(n, p, 4)) if n > 1 else 1
    if len(classes) != expected:
        raise AssertionError(f"orbit count {len(classes)} != factor count {expected} for n={n}, p={p}")
    return classes


def enumerate_classes(p: int, bound: int, lower: int = 1, even: bool = True) -> list[ConjugacyClass]:
    """Q_p-classes of primitive characters with conductor in [lower, bound]."""
    out = []
    for f in range(max(lower, 1), bound + 1):
        if f % 4 == 2:
            continue
        for fam in kernel_families(f, even):
            out.extend(qp_conjugacy_classes(fam, p))
    return out


def decompose_order(chi: DirichletCharacter, p: int) -> tuple[DirichletCharacter, DirichletCharacter]:
    """chi = theta * psi with theta of order prime to p and psi of p-power order."""
    n = chi.order
    k = vp_int(n, p)
    m = n // p ** k
    if k == 0:
        return chi.primitive(), DirichletCharacter.trivial(1)
    if m == 1:
        return DirichletCharacter.trivial(1), chi.primitive()
    a = sympy.ntheory.modular.crt([m, p ** k], [1, 0])[0]
    b = sympy.ntheory.modular.crt([m, p ** k], [0, 1])[0]
    return (chi ** int(a)).primitive(), (chi ** int(b)).primitive()


def omega_exponent(a: int, p: int) -> int:
    """k with omega_p(a) = omega_p(g)^k for the least primitive root g mod q."""
    if p == 2:
        return 0 if a % 4 == 1 else 1
    return _omega_log_table(p)[a % p]


@lru_cache(maxsize=None)
def _omega_log_table(p: int) -> dict[int, int]:
    g = int(sympy.primitive_root(p))
    out, x = {}, 1
    for k in range(p - 1):
        out[x] = k
        x = x * g % p
    return out


def omega_character(p: int, a: int = 1) -> DirichletCharacter:
    """omega_p^a as a Dirichlet character whose values embed as Teichmueller lifts."""
    q = p if p != 2 else 4
    phi_q = q // 2 if p == 2 else p - 1
    a %= phi_q
    n = phi_q // math.gcd(a, phi_q)
    if n == 1:
        return DirichletCharacter.trivial(1)
    ring = character_ring(DirichletCharacter(q, n, ()), p)
    K = 3
    g = int(sympy.primitive_root(q)) if p != 2 else 3
    target = pow(teichmuller_int(g, p, K), a, p ** K)
    k = next(k for k in range(n) if ring.root_of_unity(k, K) == ring.from_int(target, K))
    return DirichletCharacter.from_function(q, n, lambda x: k * omega_exponent(x, p))
