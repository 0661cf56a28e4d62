"""Univariate polynomial factorization over the supported exact fields.

Finite fields use squarefree / distinct-degree / equal-degree splitting
with a deterministically seeded generator.  The rationals go through
integer polynomial factorization (sympy).  Number-field towers descend
one level at a time by the norm-resultant method and lift factors back
with gcds.
"""

from __future__ import annotations

import random

import sympy
from gmpy2 import mpq

from .errors import DegreeOverflow, ReduciblePolynomial
from .fields import (
    ExtensionField,
    FieldDescriptor,
    FieldElement,
    PrimeField,
    RationalField,
    RationalFunctionField,
)
from .polys import Poly

_DEGREE_CAP = 64


def set_degree_cap(n: int):
    global _DEGREE_CAP
    _DEGREE_CAP = n


def degree_cap() -> int:
    return _DEGREE_CAP


def _check_cap(deg: int, context: str):
    if deg > _DEGREE_CAP:
        raise DegreeOverflow(f"degree {deg} exceeds cap {_DEGREE_CAP} ({context})")


def _det_rng(poly: Poly) -> random.Random:
    return random.Random(repr(poly.key()))


# ---------------------------------------------------------------------------
# finite fields: squarefree -> distinct degree -> equal degree
# ---------------------------------------------------------------------------

def _ddf(f: Poly, order: int):
    """Distinct-degree splitting of a squarefree monic polynomial."""
    out = []  # (degree d, product of degree-d irreducibles)
    x = Poly.x(f.field)
    h = x
    d = 0
    while f.degree() > 0:
        d += 1
        if 2 * d > f.degree():
            out.append((f.degree(), f))
            break
        h = h.pow_mod(order, f)
        g = (h - x).gcd(f)
        if g.degree() > 0:
            out.append((d, g.monic()))
            f = (f // g).monic()
            h = h % f
    return out


def _edf(f: Poly, d: int, order: int, rng: random.Random):
    """Cantor-Zassenhaus split of a product of degree-d irreducibles (odd char)."""
    if f.degree() == d:
        return [f.monic()]
    field = f.field
    exp = (order**d - 1) // 2
    n = f.degree()
    while True:
        u = Poly(field, [_random_payload(field, rng) for _ in range(n)])
        if u.degree() < 1:
            continue
        g = u.gcd(f)
        if 0 < g.degree() < f.degree():
            part = g.monic()
        else:
            v = u.pow_mod(exp, f)
            g = (v - Poly.one(field)).gcd(f)
            if not 0 < g.degree() < f.degree():
                continue
            part = g.monic()
        rest = (f // part).monic()
        return _edf(part, d, order, rng) + _edf(rest, d, order, rng)


def _random_payload(field, rng):
    if isinstance(field, PrimeField):
        return rng.randrange(field.p)
    if isinstance(field, ExtensionField):
        return tuple(_random_payload(field.base, rng) for _ in range(field.degree))
    raise ValueError("random payloads only over finite fields")


def _factor_squarefree_finite(f: Poly):
    order = f.field.order()
    rng = _det_rng(f)
    out = []
    for d, g in _ddf(f.monic(), order):
        out.extend(_edf(g, d, order, rng))
    return out


# ---------------------------------------------------------------------------
# rationals: integer factorization via sympy
# ---------------------------------------------------------------------------

_SYMPY_X = sympy.Symbol("x")


def _factor_squarefree_rationals(f: Poly):
    field = f.field
    expr_coeffs = [sympy.Rational(int(c.numerator), int(c.denominator)) for c in f.coeffs]
    sp = sympy.Poly(list(reversed(expr_coeffs)), _SYMPY_X, domain="QQ")
    _, factors = sp.factor_list()
    out = []
    for fac, mult in factors:
        assert mult == 1, "input was squarefree"
        cs = [mpq(c.p, c.q) for c in reversed(fac.all_coeffs())]
        out.append(Poly(field, cs).monic())
    return out


# ---------------------------------------------------------------------------
# number-field towers: norm descent (resultant method)
# ---------------------------------------------------------------------------

def _norm_poly(ext: ExtensionField, f: Poly) -> Poly:
    """Norm of f in (base[x])[theta]/(m) down to base[x], by Bareiss determinant."""
    base = ext.base
    d = ext.degree
    # rewrite f as a vector of polynomials over base: f = sum_i G_i(x) theta^i
    gvec = [[] for _ in range(d)]
    for j, c in enumerate(f.coeffs):
        for i in range(d):
            while len(gvec[i]) <= j:
                gvec[i].append(base.zero())
            gvec[i][j] = c[i]
    gpolys = [Poly(base, v) for v in gvec]
    # columns: coordinates of G * theta^k, reduced via the modulus
    mod_neg = [base.neg(c) for c in ext.modulus[:d]]
    cols = [list(gpolys)]
    for _ in range(d - 1):
        prev = cols[-1]
        top = prev[-1]
        nxt = [top.scale(mod_neg[0])]
        for i in range(1, d):
            nxt.append(prev[i - 1] + top.scale(mod_neg[i]))
        cols.append(nxt)
    mat = [[cols[k][i] for k in range(d)] for i in range(d)]
    return _poly_mat_det(mat, base)


def _poly_mat_det(mat, field) -> Poly:
    """Fraction-free (Bareiss) determinant of a matrix of polynomials."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    mat = [row[:] for row in mat]
    sign = 1
    prev = Poly.one(field)
    for k in range(n - 1):
        if mat[k][k].is_zero():
            swap = None
            for r in range(k + 1, n):
                if not mat[r][k].is_zero():
                    swap = r
                    break
            if swap is None:
                return Poly.zero(field)
            mat[k], mat[swap] = mat[swap], mat[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]
                q, r = divmod(num, prev)
                assert r.is_zero(), "Bareiss division must be exact"
                mat[i][j] = q
        prev = mat[k][k]
    det = mat[n - 1][n - 1]
    return -det if sign < 0 else det


def _factor_squarefree_extension(f: Poly):
    ext: ExtensionField = f.field
    base = ext.base
    gen_payload = ext.gen()
    x = Poly.x(ext)
    for shift in _shift_candidates():
        s = ext.from_int(shift)
        # g(x) = f(x - s*theta)
        offset = ext.mul(s, gen_payload)
        sub = x - Poly(ext, [offset])
        g = f.compose(sub)
        _check_cap(g.degree() * ext.degree, "norm descent")
        norm = _norm_poly(ext, g).monic()
        if norm.gcd(norm.derivative()).degree() == 0:
            break
    else:
        raise ReduciblePolynomial("no squarefree norm shift found")
    base_factors = factor_poly(base, norm)
    out = []
    rest = g
    add_back = x + Poly(ext, [offset])
    for h, mult in base_factors:
        assert mult == 1
        h_up = h.map_field(ext)
        gi = rest.gcd(h_up).monic()
        if gi.degree() > 0:
            out.append(gi.compose(add_back).monic())
            rest = (rest // gi).monic()
        if rest.degree() == 0:
            break
    assert rest.degree() == 0, "norm factorization did not exhaust the polynomial"
    return out


def _shift_candidates():
    yield 0
    k = 1
    while k < 40:
        yield k
        yield -k
        k += 1
    raise ReduciblePolynomial("norm shift search exhausted")


# ---------------------------------------------------------------------------
# public interface
# ---------------------------------------------------------------------------

def factor_poly(field: FieldDescriptor, f: Poly):
    """Monic irreducible factors with multiplicities (unit discarded).

    The product of factors (to multiplicity), scaled by the input's leading
    coefficient, reproduces the input exactly.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    _check_cap(f.degree(), "factorization input")
    f = f.monic()
    result = []
    while f.degree() > 0:
        g = f.squarefree_part()
        for h in _factor_squarefree_dispatch(g):
            mult = 0
            while True:
                q, r = divmod(f, h)
                if not r.is_zero():
                    break
                f = q
                mult += 1
            result.append((h, mult))
    result.sort(key=lambda pair: pair[0].key())
    return result


def _factor_squarefree_dispatch(g: Poly):
    field = g.field
    if g.degree() == 1:
        return [g.monic()]
    if isinstance(field, RationalField):
        return _factor_squarefree_rationals(g)
    if isinstance(field, PrimeField):
        return _factor_squarefree_finite(g)
    if isinstance(field, ExtensionField):
        if field.is_finite():
            return _factor_squarefree_finite(g)
        return _factor_squarefree_extension(g)
    raise ValueError(f"factorization not supported over {field.describe()}")


def factor_univariate(field: FieldDescriptor, coeffs):
    """Spec-facing wrapper: returns (unit payload, [(factor, multiplicity)])."""
    f = Poly.from_elements(field, coeffs) if not isinstance(coeffs, Poly) else coeffs
    unit = f.leading()
    return unit, factor_poly(field, f)


def roots_in_field(field: FieldDescriptor, coeffs):
    """Payload roots of the polynomial that lie in the field, sorted."""
    f = coeffs if isinstance(coeffs, Poly) else Poly(field, list(coeffs))
    if f.is_zero():
        raise ValueError("zero polynomial")
    rts = []
    for h, _ in factor_poly(field, f):
        if h.degree() == 1:
            rts.append(field.neg(h.coeffs[0]))
    rts.sort(key=field.key)
    return rts


def assert_irreducible(field: FieldDescriptor, coeffs):
    f = coeffs if isinstance(coeffs, Poly) else Poly(field, list(coeffs))
    factors = factor_poly(field, f)
    if len(factors) != 1 or factors[0][1] != 1:
        parts = ", ".join(repr(h) for h, m in factors for _ in range(m))
        raise ReduciblePolynomial(f"{f!r} factors as {parts}")


def adjoin_root(field: FieldDescriptor, f: Poly, name: str):
    """Smallest-step splitting: return (field', root) with root a zero of f.

    If f already has a root in the field, the field is returned unchanged
    with the least root.  Otherwise the field is extended by the
    lexicographically least irreducible factor of least degree.
    """
    factors = factor_poly(field, f)
    roots = [field.neg(h.coeffs[0]) for h, _ in factors if h.degree() == 1]
    if roots:
        roots.sort(key=field.key)
        return field, FieldElement(field, roots[0])
    nonlinear = sorted((h for h, _ in factors), key=lambda h: h.key())
    h = nonlinear[0]
    _check_cap(field.absolute_degree() * h.degree(), "tower extension")
    from .fields import extend_field

    ext = extend_field(field, [FieldElement(field, c) for c in h.coeffs], name,
                       check_irreducible=False)
    return ext, FieldElement(ext, ext.gen())


def poly_qth_root(f: Poly, q: int):
    """Exact q-th root of a polynomial, or None (monic-normalized by caller)."""
    if f.is_zero():
        return Poly.zero(f.field)
    if f.degree() % q != 0:
        return None
    field = f.field
    m = f.degree() // q
    lc = f.leading()
    one = field.one()
    if not field.is_zero(field.sub(lc, one)):
        return None
    # Newton coefficient matching, highest coefficients first
    g = [field.zero()] * (m + 1)
    g[m] = one
    qq = field.from_int(q)
    for k in range(1, m + 1):
        # coefficient of x^(q*m - k) in g^q must match f
        gp = Poly(field, g) ** q
        want = f.coeffs[q * m - k] if q * m - k < len(f.coeffs) else field.zero()
        have = gp.coeffs[q * m - k] if q * m - k < len(gp.coeffs) else field.zero()
        diff = field.sub(want, have)
        # d/dg[m-k] of (g^q) at x^(qm-k) is q * (leading)^? = q
        g[m - k] = field.div(diff, qq)
    if Poly(field, g) ** q == f:
        return Poly(field, g)
    return None
