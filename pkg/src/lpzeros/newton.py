"""Newton polygons of power series approximations.

Hull construction with exact rational ordinates, residual polynomials over
the residue field, inference from a truncated series, and the simplicity
criteria G1, G2, S1 to S5 for roots of positive valuation.
"""
from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from . import polys
from .padic import PadicElement, PrecisionError, SeriesApprox, vp_int
from .series import EscalationNeeded, series_derivative, weierstrass_distinguished


@dataclass(frozen=True)
class Segment:
    origin: tuple[int, Fraction]
    end: tuple[int, Fraction]

    @property
    def length(self) -> int:
        return self.end[0] - self.origin[0]

    @property
    def height(self) -> Fraction:
        return self.end[1] - self.origin[1]

    @property
    def slope(self) -> Fraction:
        return self.height / self.length

    def value_at(self, i: int) -> Fraction:
        return self.origin[1] + self.slope * (i - self.origin[0])

    def __str__(self):
        (i, y), (j, z) = self.origin, self.end
        return f"({i},{y})->({j},{z})"


@dataclass
class NewtonPolygon:
    segments: list[Segment]
    on_points: list[list[int]]
    points: dict[int, Fraction] = field(default_factory=dict)

    @property
    def slopes(self) -> list[Fraction]:
        return [s.slope for s in self.segments]

    @property
    def reaches_axis(self) -> bool:
        return bool(self.segments) and self.segments[-1].end[1] == 0

    def slope_multiset(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = {}
        for s in self.segments:
            out[s.slope] = out.get(s.slope, 0) + s.length
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "valuation_num", "valuation_den", "on_polygon"])
        on = {i for pts in self.on_points for i in pts}
        for i in sorted(self.points):
            v = self.points[i]
            w.writerow([i, v.numerator, v.denominator, int(i in on)])
        return buf.getvalue()

    def to_grid(self, scale: int = 1) -> str:
        """Text picture: '*' on the polygon, 'o' above it."""
        if not self.points:
            return ""
        on = {i for pts in self.on_points for i in pts}
        width = max(self.points) + 1
        top = math.ceil(max(self.points.values()) * scale)
        rows = []
        for y in range(top, -1, -1):
            row = []
            for i in range(width):
                v = self.points.get(i)
                if v is not None and math.floor(v * scale) == y:
                    row.append("*" if i in on else "o")
                else:
                    row.append(".")
            rows.append("".join(row))
        return "\n".join(rows)


@dataclass(frozen=True)
class TruncationInference:
    confirmed: list[Segment]
    residual_slope_bound: Fraction | None
    complete: bool


# --- coefficient valuations ------------------------------------------------

def _valuation_data(S):
    """[(certified valuation or None, precision)] from a series, list of elements or list of values."""
    coeffs = S.coeffs if isinstance(S, SeriesApprox) else S
    out = []
    for c in coeffs:
        if isinstance(c, PadicElement):
            out.append((c.valuation(), c.prec))
        elif c is None:
            out.append((None, Fraction(10 ** 9)))
        else:
            out.append((Fraction(c), Fraction(10 ** 9)))
    return out


def build_newton_polygon(S) -> NewtonPolygon:
    """Lower convex hull from (0, v(S_0)) to the first unit coefficient (or the last known point)."""
    data = _valuation_data(S)
    if not data or data[0][0] is None:
        raise PrecisionError("constant term is zero to the known precision")
    stop = len(data) - 1
    for i, (v, _) in enumerate(data):
        if v is not None and v == 0:
            stop = i
            break
    pts = {i: v for i, (v, _) in enumerate(data[:stop + 1]) if v is not None}
    segments = []
    cur = 0
    while cur < stop and pts[cur] > 0:
        y = pts[cur]
        best, best_j = None, None
        for j, v in pts.items():
            if j <= cur:
                continue
            s = (v - y) / (j - cur)
            if best is None or s < best or (s == best and j > best_j):
                best, best_j = s, j
        if best_j is None:
            break
        if best >= 0:
            break
        segments.append(Segment((cur, y), (best_j, pts[best_j])))
        cur = best_j
    # uncertified coefficients must lie strictly above the hull
    for i, (v, prec) in enumerate(data[:stop + 1]):
        if v is None:
            for seg in segments:
                if seg.origin[0] <= i <= seg.end[0] and prec <= seg.value_at(i):
                    raise PrecisionError(f"coefficient {i} is not certified above the polygon")
    on_points = []
    for seg in segments:
        on_points.append([i for i in range(seg.origin[0], seg.end[0] + 1)
                          if i in pts and pts[i] == seg.value_at(i)])
    return NewtonPolygon(segments, on_points, pts)


def infer_from_truncation(S, L1: int | None = None) -> TruncationInference:
    """Segments of the true polygon implied by S known modulo T^L1."""
    data = _valuation_data(S)
    if L1 is None:
        L1 = len(data)
    NP = build_newton_polygon(S if L1 >= len(data) else list(_truncate(S, L1)))
    confirmed: list[Segment] = []
    for seg in NP.segments:
        i, y = seg.origin
        if i < L1 and Fraction(-y, L1 - i) > seg.slope:
            confirmed.append(seg)
        else:
            break
    if not confirmed:
        i, y = 0, NP.points.get(0, Fraction(0))
        if y == 0:
            return TruncationInference([], None, True)
        return TruncationInference([], Fraction(-y, L1), False)
    j, z = confirmed[-1].end
    if z == 0:
        return TruncationInference(confirmed, None, True)
    return TruncationInference(confirmed, Fraction(-z, L1 - j), False)


def _truncate(S, L1):
    coeffs = S.coeffs if isinstance(S, SeriesApprox) else S
    return coeffs[:L1]


# --- residual polynomials ---------------------------------------------------

def residual_polynomial(S, seg: Segment, NP: NewtonPolygon | None = None):
    """P_sigma over the residue field, lowest degree first (residue-field tuples)."""
    coeffs = S.coeffs if isinstance(S, SeriesApprox) else S
    if NP is None:
        NP = build_newton_polygon(S)
    idx = NP.segments.index(seg)
    ring = coeffs[0].ring
    F = ring.residue_field
    c = seg.origin[0]
    out = [F.zero() for _ in range(seg.length + 1)]
    for j in NP.on_points[idx]:
        _, unit = coeffs[j].unit_part()
        out[j - c] = ring.residue(unit.coords)
    return out


def residual_polynomial_int(S, seg: Segment, NP: NewtonPolygon | None = None) -> list[int]:
    """P_sigma as integers mod p when the residue field is F_p."""
    P = residual_polynomial(S, seg, NP)
    return [x[0] for x in P]


# --- simplicity criteria ----------------------------------------------------

@dataclass
class SimplicityVerdict:
    simple: bool
    criterion: str | None                       # global criterion when one applies
    per_segment: list[tuple[str, str | None]]   # (segment, criterion or None)
    failing: list[str]

    def to_dict(self) -> dict:
        return {"simple": self.simple, "criterion": self.criterion,
                "per_segment": [list(x) for x in self.per_segment], "failing": self.failing}


def _monic(F, P):
    P = polys.kpoly_trim(F, P)
    inv = F.inv(P[-1])
    return [F.mul(x, inv) for x in P]


def _slope_status(S, slope: Fraction) -> str:
    """'absent', 'present' or 'unknown' for a slope in the polygon of a truncated series."""
    try:
        inf = infer_from_truncation(S)
    except PrecisionError:
        return "unknown"
    if any(s.slope == slope for s in inf.confirmed):
        return "present"
    if inf.complete:
        return "absent"
    if slope < inf.residual_slope_bound:
        return "absent"
    return "unknown"


def _has_unit(S) -> bool:
    return any(v is not None and v == 0 for v, _ in _valuation_data(S))


def _combine(A, G: SeriesApprox, B, dG: SeriesApprox) -> SeriesApprox:
    """A*G + B*G' truncated to the known length, for integer polynomials A and B."""
    L = dG.L
    ring = G.ring
    out = []
    for k in range(L):
        acc = None
        for i, a in enumerate(A):
            if a and k - i >= 0:
                t = G.coeffs[k - i] * a
                acc = t if acc is None else acc + t
        for i, b in enumerate(B):
            if b and k - i >= 0:
                t = dG.coeffs[k - i] * b
                acc = t if acc is None else acc + t
        if acc is None:
            acc = PadicElement.make(ring, ring.zero(), min(G.coeffs[k].prec, dG.coeffs[k].prec) + 64)
        out.append(acc)
    return SeriesApprox(ring, tuple(out), G.level, G.mu_floor, G.calibration)


def _subresultant_pair(G: SeriesApprox, L1: int, M1: int):
    """Integral A, B with A*G1 + B*G1' = delta for G1 = G mod (p^M1, T^L1) (base ring only)."""
    p = G.ring.p
    x = sympy.Symbol("x")
    g1 = []
    for c in G.coeffs[:L1]:
        if c.shift or any(c.coords[1:]):
            return None
        g1.append(c.coords[0] % p ** M1)
    f = sympy.Poly(list(reversed(g1)), x, domain=sympy.QQ)
    if f.degree() < 1:
        return None
    s, t, h = sympy.gcdex(f, f.diff(x))
    if h.degree() != 0:
        return None
    den = sympy.ilcm(*[sympy.fraction(c)[1] for c in s.all_coeffs() + t.all_coeffs()])
    A = [int(c * den) for c in reversed(s.all_coeffs())]
    B = [int(c * den) for c in reversed(t.all_coeffs())]
    g = math.gcd(*(A + B)) or 1
    return [a // g for a in A], [b // g for b in B]


def simplicity_criteria(G: SeriesApprox, random_trials: int = 32, seed: int = 0) -> SimplicityVerdict:
    """Certify that every root of positive valuation of G (with a unit coefficient) is simple."""
    ring = G.ring
    p, e = ring.p, ring.e
    NP = build_newton_polygon(G)
    if not NP.reaches_axis and not (NP.points.get(0) == 0):
        raise PrecisionError("no certified unit coefficient")
    lam = 0 if NP.points.get(0) == 0 else NP.segments[-1].end[0]
    if lam <= 1:
        return SimplicityVerdict(True, "G1", [], [])
    if NP.points[0] == Fraction(1, e):
        return SimplicityVerdict(True, "G2", [(str(s), "G2") for s in NP.segments], [])
    F = ring.residue_field
    dG = series_derivative(G)
    per, failing = [], []
    rng = random.Random(seed)
    for seg in NP.segments:
        label = None
        l, h = seg.length, seg.height
        P = residual_polynomial(G, seg, NP)
        Pm = _monic(F, P)
        interior = [x for x in Pm[1:-1]]
        if all(F.is_zero(x) for x in interior) and not F.is_zero(Pm[0]) and l % p:
            label = "S1"
        elif math.gcd(l, abs(int(e * h))) == 1 and (e * h).denominator == 1:
            label = "S2"
        elif p == 2 and l == 2 and not F.is_zero(Pm[0]) and not F.is_zero(Pm[1]):
            label = "S3"
        elif polys.kpoly_is_squarefree(F, Pm):
            label = "P-squarefree"
        elif _has_unit(dG) and _slope_status(dG, seg.slope) == "absent":
            label = "S4"
        else:
            label = _try_s5(G, dG, seg, rng, random_trials)
        per.append((str(seg), label))
        if label is None:
            failing.append(str(seg))
    return SimplicityVerdict(not failing, None, per, failing)


def _bezout_on_distinguished(G: SeriesApprox) -> bool:
    """A*D + B*D' = delta for the distinguished D of G, with v(delta) below the precision of D.

    D is known modulo p^P; for integral A, B a common root r of D and D' would force
    delta = 0 mod p^P, so v(delta) < P rules out repeated roots (base ring only).
    """
    ring = G.ring
    if ring.dim != 1:
        return False
    try:
        W = weierstrass_distinguished(G)
    except (EscalationNeeded, ArithmeticError):
        return False
    D = W.distinguished
    if len(D) < 3 or any(c.shift for c in D):
        return False
    P = math.floor(min(c.prec for c in D))
    if P < 1:
        return False
    p = ring.p
    x = sympy.Symbol("x")
    d = [c.coords[0] % p ** P for c in D]
    f = sympy.Poly(list(reversed(d)), x, domain=sympy.QQ)
    s, t, h = sympy.gcdex(f, f.diff(x))
    if h.degree() != 0:
        return False
    den = sympy.ilcm(*[sympy.fraction(c)[1] for c in s.all_coeffs() + t.all_coeffs()])
    # den * (s f + t f') = den, with den * s and den * t integral
    return vp_int(int(den), p) < P


def _try_s5(G, dG, seg, rng, trials):
    ring = G.ring
    p = ring.p
    if _bezout_on_distinguished(G):
        return "S5"
    lam = build_newton_polygon(G).segments[-1].end[0]
    candidates = []
    if ring.dim == 1:
        M1 = max(1, math.floor(min(c.prec for c in G.coeffs[:lam + 1])))
        pair = _subresultant_pair(G, lam + 1, M1)
        if pair is not None:
            candidates.append(pair)
    for _ in range(trials):
        A = [rng.randrange(p) for _ in range(lam + 1)]
        B = [rng.randrange(p) for _ in range(lam + 1)]
        if not any(B):
            B[0] = 1
        candidates.append((A, B))
    for A, B in candidates:
        H = _combine(A, G, B, dG)
        if not _has_unit(H):
            continue
        if _slope_status(H, seg.slope) == "absent":
            return "S5"
    return None
