"""Short Weierstrass curves: group law, division polynomials, point data.

Points are affine pairs over any field in the tower above the curve's
field of definition, plus a shared infinity marker.  All arithmetic is
exact; there is deliberately no projective representation.
"""

from __future__ import annotations

import itertools

from .errors import CapExceeded, PointNotOnCurve, SuppliedPointNotOnCurve
from .fields import (
    FieldDescriptor,
    FieldElement,
    coerce_pair,
    embed,
    is_ancestor,
)
from .polys import Poly


class Curve:
    """y^2 = x^3 + A x + B over an exact field."""

    __slots__ = ("field", "A", "B", "q")

    def __init__(self, field: FieldDescriptor, A: FieldElement, B: FieldElement, q: int | None = None):
        self.field = field
        self.A = embed(A, field) if A.field is not field else A
        self.B = embed(B, field) if B.field is not field else B
        self.q = q if q is not None else field.q
        disc = 4 * self.A**3 + 27 * self.B**2
        if disc.is_zero():
            raise PointNotOnCurve("curve is singular: 4A^3 + 27B^2 = 0")
        ch = field.characteristic()
        if ch and (6 * self.q) % ch == 0:
            raise PointNotOnCurve(f"characteristic {ch} divides 6q")

    def rhs_poly(self, field: FieldDescriptor | None = None) -> Poly:
        """x^3 + A x + B as a polynomial over the given field."""
        f = field or self.field
        return Poly.from_elements(f, [embed(self.B, f), embed(self.A, f), FieldElement(f, f.zero()), FieldElement(f, f.one())])

    def infinity(self, field: FieldDescriptor | None = None) -> "Point":
        return Point(self, field or self.field, None, None, infinity=True)

    def point(self, x, y, field: FieldDescriptor | None = None) -> "Point":
        f = field
        if f is None:
            f = x.field if isinstance(x, FieldElement) else self.field
        if isinstance(x, int):
            x = FieldElement(f, f.from_int(x))
        if isinstance(y, int):
            y = FieldElement(f, f.from_int(y))
        x = embed(x, f) if x.field is not f else x
        y = embed(y, f) if y.field is not f else y
        p = Point(self, f, x, y)
        if not self.contains(p):
            raise PointNotOnCurve(f"({x!r}, {y!r}) not on {self!r}")
        return p

    def contains(self, p: "Point") -> bool:
        if p.infinity:
            return True
        x, y = p.x, p.y
        return (y * y - (x**3 + embed(self.A, p.field) * x + embed(self.B, p.field))).is_zero()

    def base_change(self, field: FieldDescriptor) -> "Curve":
        return Curve(field, embed(self.A, field), embed(self.B, field), self.q)

    def same_curve(self, other: "Curve") -> bool:
        return self.A == other.A and self.B == other.B

    def __repr__(self):
        return f"y^2 = x^3 + ({self.A!r})*x + ({self.B!r}) over {self.field.describe()}"


class Point:
    __slots__ = ("curve", "field", "x", "y", "infinity")

    def __init__(self, curve: Curve, field: FieldDescriptor, x, y, infinity=False):
        self.curve = curve
        self.field = field
        self.x = x
        self.y = y
        self.infinity = infinity

    def key(self):
        if self.infinity:
            return (0,)
        return (1, self.x.key(), self.y.key())

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if self.infinity or other.infinity:
            return self.infinity and other.infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        if self.infinity:
            return hash(("point-at-infinity",))
        return hash((self.x, self.y))

    def __neg__(self):
        if self.infinity:
            return self
        return Point(self.curve, self.field, self.x, -self.y)

    def __add__(self, other):
        return add_points(self, other)

    def __sub__(self, other):
        return add_points(self, -other)

    def __rmul__(self, n: int):
        return scalar_mul(n, self)

    def __repr__(self):
        if self.infinity:
            return "O"
        return f"({self.x!r}, {self.y!r})"


def _common_field(p: Point, r: Point):
    if p.infinity or r.infinity:
        return None
    a, _ = coerce_pair(p.x, r.x)
    return a.field


def lift_point(p: Point, field: FieldDescriptor) -> Point:
    if p.infinity:
        return Point(p.curve, field, None, None, infinity=True)
    return Point(p.curve, field, embed(p.x, field), embed(p.y, field))


def add_points(p: Point, r: Point) -> Point:
    if p.infinity:
        return r
    if r.infinity:
        return p
    if p.curve is not r.curve and not (p.curve.A == r.curve.A and p.curve.B == r.curve.B):
        raise PointNotOnCurve("points on different curves")
    x1, x2 = coerce_pair(p.x, r.x)
    y1, y2 = coerce_pair(p.y, r.y)
    field = x1.field
    curve = p.curve
    if x1 == x2:
        if (y1 + y2).is_zero():
            return Point(curve, field, None, None, infinity=True)
        # tangent
        m = (3 * x1 * x1 + embed(curve.A, field)) / (2 * y1)
    else:
        m = (y2 - y1) / (x2 - x1)
    x3 = m * m - x1 - x2
    y3 = m * (x1 - x3) - y1
    return Point(curve, field, x3, y3)


def scalar_mul(n: int, p: Point) -> Point:
    if n < 0:
        return scalar_mul(-n, -p)
    acc = Point(p.curve, p.field, None, None, infinity=True)
    base = p
    while n:
        if n & 1:
            acc = add_points(acc, base)
        base = add_points(base, base)
        n >>= 1
    return acc


def point_order(p: Point, bound: int = 200) -> int:
    acc = p
    for n in range(1, bound + 1):
        if acc.infinity:
            return n
        acc = add_points(acc, p)
    raise ValueError(f"order exceeds bound {bound}")


# ---------------------------------------------------------------------------
# division polynomials and the multiplication map
# ---------------------------------------------------------------------------

class DivisionPolynomials:
    """psi_n in the split representation psi_n = a_n(x) * y^(n+1 mod 2)."""

    def __init__(self, curve: Curve, field: FieldDescriptor | None = None):
        self.curve = curve
        self.field = field or curve.field
        f = self.field
        A = embed(curve.A, f)
        B = embed(curve.B, f)
        x = Poly.x(f)
        one = Poly.one(f)
        self.rhs = curve.rhs_poly(f)
        a0 = Poly.zero(f)
        a1 = one
        a2 = Poly.constant(f, 2)
        a3 = Poly.from_elements(f, [-(A * A), 12 * B, 6 * A, FieldElement(f, f.zero()), FieldElement(f, f.from_int(3))])
        a4 = Poly.from_elements(
            f,
            [
                -8 * B * B - A**3,
                -4 * A * B,
                -5 * A * A,
                20 * B,
                5 * A,
                FieldElement(f, f.zero()),
                FieldElement(f, f.one()),
            ],
        ).scale(4)
        self._a = {0: a0, 1: a1, 2: a2, 3: a3, 4: a4}

    def a(self, n: int) -> Poly:
        """The x-part of psi_n; psi_n = a_n * y when n is even."""
        if n < 0:
            raise ValueError("index must be nonnegative")
        if n in self._a:
            return self._a[n]
        m = n // 2
        F = self.rhs
        if n % 2 == 1:
            # psi_{2m+1} = psi_{m+2} psi_m^3 - psi_{m-1} psi_{m+1}^3
            t1 = self.a(m + 2) * self.a(m) ** 3
            t2 = self.a(m - 1) * self.a(m + 1) ** 3
            if m % 2 == 1:
                # psi_{m+2}, psi_m odd (pure x); psi_{m-1}, psi_{m+1} even (y*a)
                # term2 carries y^4 = F^2
                out = t1 - t2 * (F * F)
            else:
                out = t1 * (F * F) - t2
        else:
            # psi_{2m} = psi_m (psi_{m+2} psi_{m-1}^2 - psi_{m-2} psi_{m+1}^2) / 2y;
            # tracking parities, the y and F factors cancel uniformly and
            # a_{2m} = a_m (a_{m+2} a_{m-1}^2 - a_{m-2} a_{m+1}^2) / 2
            inner = self.a(m + 2) * self.a(m - 1) ** 2 - self.a(m - 2) * self.a(m + 1) ** 2
            two_inv = FieldElement(self.field, self.field.inv(self.field.from_int(2)))
            out = (self.a(m) * inner).scale(two_inv)
        self._a[n] = out
        return out

    def psi_q(self, q: int) -> Poly:
        """The full division polynomial for odd q (a polynomial in x alone)."""
        if q % 2 == 0:
            raise ValueError("odd index expected")
        return self.a(q)


def division_polynomial(curve: Curve, q: int, field: FieldDescriptor | None = None) -> Poly:
    return DivisionPolynomials(curve, field).psi_q(q)


MULT_MAP_CAP_NUMBER_FIELD = 3
MULT_MAP_CAP_FINITE = 13


def mult_by_q_map(curve: Curve, q: int, field: FieldDescriptor | None = None):
    """Rational maps (xi_num/xi_den, y*ups_num/ups_den) computing [q].

    Returns (xi_num, xi_den, ups_num, ups_den) as polynomials in x; the
    y-coordinate of [q](x, y) is y * ups_num(x)/ups_den(x).
    """
    f = field or curve.field
    cap = MULT_MAP_CAP_FINITE if f.is_finite() else MULT_MAP_CAP_NUMBER_FIELD
    if q > cap:
        raise CapExceeded(f"multiplication map for q = {q} exceeds cap {cap}")
    if q % 2 == 0:
        raise CapExceeded("odd q expected")
    dp = DivisionPolynomials(curve, f)
    F = dp.rhs
    an = dp.a(q)
    am = dp.a(q - 1)
    ap = dp.a(q + 1)
    # x([q]P) = x - psi_{q-1} psi_{q+1} / psi_q^2 ; psi_{q±1} carry y, product has y^2=F
    xi_den = an * an
    xi_num = Poly.x(f) * xi_den - F * am * ap
    # y([q]P) = (psi_{q+2} psi_{q-1}^2 - psi_{q-2} psi_{q+1}^2) / (4 y psi_q^3)
    #         = y * (a_{q+2} a_{q-1}^2 - a_{q-2} a_{q+1}^2) * F / (4 F a_q^3)
    inner = dp.a(q + 2) * am * am - dp.a(q - 2) * ap * ap
    ups_num = inner
    four = FieldElement(f, f.from_int(4))
    ups_den = (an**3).scale(four)
    g = xi_num.gcd(xi_den)
    if g.degree() > 0:
        xi_num, xi_den = xi_num // g, xi_den // g
    g2 = ups_num.gcd(ups_den)
    if g2.degree() > 0:
        ups_num, ups_den = ups_num // g2, ups_den // g2
    return xi_num, xi_den, ups_num, ups_den


def apply_mult_map(maps, p: Point):
    """Evaluate the [q] rational maps at an affine point (test support)."""
    xi_num, xi_den, ups_num, ups_den = maps
    f = p.field
    xi_den_f = xi_den.map_field(f) if xi_den.field is not f else xi_den
    xi_num_f = xi_num.map_field(f) if xi_num.field is not f else xi_num
    ups_num_f = ups_num.map_field(f) if ups_num.field is not f else ups_num
    ups_den_f = ups_den.map_field(f) if ups_den.field is not f else ups_den
    den = xi_den_f.evaluate_elem(p.x.payload)
    if den.is_zero():
        return p.curve.infinity(f)
    x3 = xi_num_f.evaluate_elem(p.x.payload) / den
    y3 = p.y * ups_num_f.evaluate_elem(p.x.payload) / ups_den_f.evaluate_elem(p.x.payload)
    return p.curve.point(x3, y3, f)


# ---------------------------------------------------------------------------
# point enumeration and Mordell-Weil data acquisition
# ---------------------------------------------------------------------------

def enumerate_points(curve: Curve, field: FieldDescriptor | None = None):
    """All points over a finite field, infinity first."""
    f = field or curve.field
    if not f.is_finite():
        raise ValueError("enumeration requires a finite field")
    if f.order() > 20000:
        raise ValueError(
            "exhaustive enumeration capped at field order 20000; use supplied "
            "generators or the connecting-map class collector instead"
        )
    pts = [curve.infinity(f)]
    rhs = curve.rhs_poly(f)
    elements = list(f.elements()) if not hasattr(f, "p") else list(range(f.p))
    for x in elements:
        val = rhs.evaluate(x)
        for y in elements:
            if f.is_zero(f.sub(f.mul(y, y), val)):
                pts.append(Point(curve, f, FieldElement(f, x), FieldElement(f, y)))
    return pts


def mordell_weil_mod_q(curve: Curve, q: int, source: dict):
    """Coset representatives of E(K)/[q]E(K) with a provenance tag.

    source: {"mode": "supplied", "points": [...], "complete": bool}
          | {"mode": "search", "bound": H}
          | {"mode": "exhaustive"}
    Supplied points are re-verified.  Search mode scans small-height
    x-coordinates with rational coefficients bounded by H and is labeled
    as a lower bound only.
    """
    mode = source.get("mode")
    if mode == "exhaustive":
        pts = enumerate_points(curve)
        reps = _reduce_mod_q(pts, q)
        return reps, "exhaustive"
    if mode == "supplied":
        gens = []
        for p in source["points"]:
            if not curve.contains(p):
                raise SuppliedPointNotOnCurve(f"{p!r}")
            gens.append(p)
        reps = _span_mod_q(curve, gens, q)
        tag = "verified-supplied" if source.get("complete") else "verified-supplied-partial"
        return reps, tag
    if mode == "search":
        gens = naive_point_search(curve, source.get("bound", 3))
        reps = _span_mod_q(curve, gens, q)
        return reps, "search-bounded"
    raise ValueError(f"unknown Mordell-Weil source mode: {mode!r}")


def _span_mod_q(curve: Curve, gens, q: int):
    reps = {curve.infinity(): None}
    out = [curve.infinity()]
    if not gens:
        return out
    for combo in itertools.product(range(q), repeat=len(gens)):
        p = curve.infinity()
        for c, g in zip(combo, gens):
            p = add_points(p, scalar_mul(c, g))
        if p not in reps:
            reps[p] = combo
            out.append(p)
    return out


def _reduce_mod_q(points, q: int):
    """Distinct classes of the full point list modulo [q] multiples."""
    q_multiples = {scalar_mul(q, p) for p in points}
    classes = []
    seen = set()
    for p in points:
        if any((p - r) in q_multiples for r in classes):
            continue
        classes.append(p)
    return classes


def naive_point_search(curve: Curve, bound: int):
    """Small-height points over the base field; a lower bound only."""
    from gmpy2 import mpq

    f = curve.field
    found = []
    num_range = range(-bound, bound + 1)
    den_range = range(1, bound + 1)
    candidates = set()
    for n in num_range:
        for d in den_range:
            candidates.add(mpq(n, d))
    tower = f.tower()
    # scan x = c (rational constants embedded into the field) and, for a
    # top-level quadratic/cubic generator, x = c * gen + c'
    rhs = curve.rhs_poly(f)
    from .factor import roots_in_field

    xs = []
    for c in sorted(candidates, key=lambda v: (abs(v), v)):
        xs.append(f.from_int(0) if c == 0 else _embed_rational(f, c))
    for x in xs:
        val = rhs.evaluate(x)
        if f.is_zero(val):
            found.append(Point(curve, f, FieldElement(f, x), FieldElement(f, f.zero())))
            continue
        ysq = [f.neg(val), f.zero(), f.one()]
        rts = roots_in_field(f, ysq)
        if rts:
            y = sorted(rts, key=f.key)[0]
            found.append(Point(curve, f, FieldElement(f, x), FieldElement(f, y)))
    return found


def _embed_rational(field, c):
    from .fields import RationalField, embed_payload

    tower = field.tower()
    bottom = tower[0]
    if isinstance(bottom, RationalField):
        return embed_payload(c, bottom, field)
    num = int(c.numerator) % bottom.p
    den = int(c.denominator) % bottom.p
    return embed_payload(bottom.div(num, den), bottom, field)
