import pytest

from ellbrauer.curves import Curve, add_points, enumerate_points, lift_point, scalar_mul
from ellbrauer.errors import DivisionByZeroFunction, NotPrincipal, NotTorsion, ZeroFunction
from ellbrauer.factor import adjoin_root
from ellbrauer.fields import FieldElement, embed, extend_field, make_prime_field, try_descend
from ellbrauer.funcfield import (
    POLE,
    CurveFunction,
    Divisor,
    certificate_by_series,
    compose_with_mult_map,
    function_divisor,
    function_series,
    function_with_divisor,
    infinity_series,
    normalize_tangent,
    qth_division_point,
    torsion_span,
    weil_pairing,
)
from ellbrauer.polys import Poly


def test_difference_of_squares_canonical(kw, E16):
    ym4 = CurveFunction.from_parts(E16, kw, [-4], [1])
    yp4 = CurveFunction.from_parts(E16, kw, [4], [1])
    x = CurveFunction.coordinate_x(E16, kw)
    assert ym4 * yp4 == x**3


def test_inverse_of_y(kw, E16):
    y = CurveFunction.coordinate_y(E16, kw)
    inv = y.inverse()
    assert inv.v == Poly.one(kw)
    assert inv.w == Poly.from_elements(kw, [16, 0, 0, 1])
    assert y * inv == CurveFunction.one(E16, kw)


def test_inverting_zero_function_raises(kw, E16):
    with pytest.raises(DivisionByZeroFunction):
        CurveFunction.zero(E16, kw).inverse()


def test_evaluate_tangent_at_other_point(kw, E16):
    # t_P = y - 4 evaluated at Q = (-4, 4 sqrt(-3)) gives 4 sqrt(-3) - 4
    w = FieldElement(kw, kw.gen())
    tP = CurveFunction.from_parts(E16, kw, [-4], [1])
    Q = E16.point(FieldElement(kw, kw.from_int(-4)), 8 * w + 4)
    assert tP.evaluate(Q) == 8 * w + 4 - 4


def test_divisor_of_tangent_line(kw, E16):
    tP = CurveFunction.from_parts(E16, kw, [-4], [1])
    d = function_divisor(tP)
    P = E16.point(0, 4)
    assert d.coeffs[P] == 3
    assert d.coeffs[E16.infinity(kw)] == -3
    assert d.degree() == 0 and d.group_sum().infinity


def test_divisor_of_x_vertical(kw, E16):
    x = CurveFunction.coordinate_x(E16, kw)
    d = function_divisor(x)
    P = E16.point(0, 4)
    assert d.coeffs[P] == 1 and d.coeffs[-P] == 1
    assert d.coeffs[E16.infinity(kw)] == -2


def test_divisor_of_constant_empty(kw, E16):
    c = CurveFunction.constant(E16, FieldElement(kw, kw.from_int(5)))
    assert not function_divisor(c).coeffs
    with pytest.raises(ZeroFunction):
        function_divisor(CurveFunction.zero(E16, kw))


def test_divisor_multiplicativity(E7, F7):
    f = CurveFunction.line_through(E7.point(0, 3), E7.point(3, 1), F7)
    g = CurveFunction.vertical(E7.point(5, 1), F7)
    assert function_divisor(f * g) == function_divisor(f) + function_divisor(g)
    assert function_divisor(f.inverse()) == -function_divisor(f)


def test_all_divisors_degree_zero_sum_zero(E7, F7):
    pts = enumerate_points(E7)
    for p in pts[1:5]:
        for r in pts[3:7]:
            f = CurveFunction.line_through(p, r, F7)
            d = function_divisor(f)
            assert d.degree() == 0
            assert d.group_sum().infinity


def test_function_with_divisor_tangent(kw, E16):
    P = E16.point(0, 4)
    div = Divisor(E16, kw, {P: 3, E16.infinity(kw): -3})
    t = function_with_divisor(div)
    assert t == CurveFunction.from_parts(E16, kw, [-4], [1])
    assert function_divisor(t) == div


def test_function_with_divisor_vertical(kw, E16):
    P = E16.point(0, 4)
    div = Divisor(E16, kw, {P: 1, -P: 1, E16.infinity(kw): -2})
    assert function_with_divisor(div) == CurveFunction.coordinate_x(E16, kw)


def test_function_with_divisor_rejects_nonprincipal(kw, E16):
    P = E16.point(0, 4)
    with pytest.raises(NotPrincipal):
        function_with_divisor(Divisor(E16, kw, {P: 1, E16.infinity(kw): -1}))
    Q = E16.point(FieldElement(kw, kw.from_int(-4)), 8 * FieldElement(kw, kw.gen()) + 4)
    with pytest.raises(NotPrincipal):
        # degree 0 but group sum nonzero
        function_with_divisor(Divisor(E16, kw, {P: 1, Q: 1, E16.infinity(kw): -2}))


def test_function_with_divisor_roundtrip_random(E7, F7):
    import random

    rng = random.Random(3)
    pts = [p for p in enumerate_points(E7) if not p.infinity]
    for _ in range(6):
        chosen = rng.sample(pts, 3)
        d = Divisor(E7, F7)
        total = E7.infinity()
        for p in chosen:
            d.add(p, 1)
            total = add_points(total, p)
        d.add(-total, 1)
        total = add_points(total, -total)
        d.add(E7.infinity(), -sum(d.coeffs.values()))
        f = function_with_divisor(d)
        assert function_divisor(f) == d


def test_pole_marker_and_exact_cancellation(kw, E16):
    # (y - 4)/x has a removable-vs-genuine structure at (0, +-4)
    tP = CurveFunction.from_parts(E16, kw, [-4], [1])
    x = CurveFunction.coordinate_x(E16, kw)
    f = tP / x
    P = E16.point(0, 4)
    assert f.evaluate(-P) is POLE
    # at P: ord = 3 - 1 = 2 > 0, so the value is exactly zero
    assert f.evaluate(P).is_zero()
    g = tP / (x * x)
    assert g.order_at(P) == 1  # 3 - 2
    assert (tP / x**3).order_at(P) == 0  # 3 - 3
    assert (tP / x**3).order_at(-P) == -3


def test_weil_pairing_basics(E7):
    P, Q = E7.point(0, 3), E7.point(3, 1)
    e = weil_pairing(P, Q, 3)
    assert e.payload in (2, 4)
    assert weil_pairing(P, P, 3) == 1
    assert weil_pairing(scalar_mul(2, P), Q, 3) == e * e
    assert weil_pairing(Q, P, 3) == e.inverse()


def test_weil_pairing_rejects_non_torsion():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    non_torsion = next(
        p for p in enumerate_points(E) if not p.infinity and not scalar_mul(3, p).infinity
    )
    with pytest.raises(NotTorsion):
        weil_pairing(non_torsion, non_torsion, 3)


def test_weil_pairing_bilinear_exhaustive_three_curves():
    cases = [(7, 0, 2), (13, 0, 4), (13, 2, 6)]
    for p, a, b in cases:
        F = make_prime_field(p, 3)
        E = Curve(F, FieldElement(F, a), FieldElement(F, b))
        from ellbrauer.torsion import torsion_basis

        basis = torsion_basis(E, "finite-field-auto")
        M = torsion_span(basis.P, basis.Q, 3)
        assert len(M) == 9
        pair = {}
        for s in M:
            for t in M:
                pair[(s.key(), t.key())] = weil_pairing(s, t, 3)
        for s in M:
            assert pair[(s.key(), s.key())] == 1  # alternating
        for s in M:
            for t in M:
                for u in M:
                    st = add_points(s, t)
                    assert pair[(st.key(), u.key())] == pair[(s.key(), u.key())] * pair[(t.key(), u.key())]
        # nondegenerate on the basis
        assert pair[(basis.P.key(), basis.Q.key())] != 1


def test_weil_pairing_galois_equivariance():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    from ellbrauer.torsion import classify_case, splitting_field_and_action, torsion_basis

    basis = torsion_basis(E, "finite-field-auto")
    act = splitting_field_and_action(E, basis)
    for sigma in act.elements:
        lhs = weil_pairing(sigma.apply_point(basis.P), sigma.apply_point(basis.Q), 3)
        assert lhs == sigma(basis.rho_check)


def test_pairing_matches_certificate_ratio(E7):
    # e(R, P) = g_P(X + R) / g_P(X) for the certified tangent at P
    P, Q = E7.point(0, 3), E7.point(3, 1)
    cert = normalize_tangent(P, 3, Q)
    g = cert.certificate
    pp = qth_division_point(P, 3)
    big = pp.field
    gB = g.map_field(big) if g.field is not big else g
    M = torsion_span(P, Q, 3)
    for R in M:
        if R.infinity:
            continue
        RB = lift_point(R, big)
        seen = None
        for k in range(2, 6):
            for T in M:
                X = add_points(scalar_mul(k, pp), lift_point(T, big))
                gx = gB.evaluate(X)
                gxr = gB.evaluate(add_points(X, RB))
                if gx is POLE or gxr is POLE or gx.is_zero() or gxr.is_zero():
                    continue
                ratio = gxr / gx
                if seen is None:
                    seen = ratio
                else:
                    assert ratio == seen
        expected = weil_pairing(R, P, 3)
        assert try_descend(seen, P.x.field) == expected


def test_normalize_tangent_f7_exhaustive_certificate(E7):
    P, Q = E7.point(0, 3), E7.point(3, 1)
    cert = normalize_tangent(P, 3, Q)
    assert cert.scaling == 1
    t3 = compose_with_mult_map(cert.t.map_field(cert.certificate.field), 3)
    assert cert.certificate**3 == t3
    # exhaustive evaluation check over all points where both sides defined
    big = cert.certificate.field
    for pt in enumerate_points(E7, big):
        if pt.infinity:
            continue
        lhs = cert.certificate.evaluate(pt)
        q3 = scalar_mul(3, pt)
        rhs = cert.t.evaluate(q3) if not q3.infinity else POLE
        if lhs is POLE or rhs is POLE:
            continue
        assert lhs**3 == rhs


def test_normalize_tangent_61_values(kw, E16):
    w = FieldElement(kw, kw.gen())
    P = E16.point(0, 4)
    Q = E16.point(FieldElement(kw, kw.from_int(-4)), 8 * w + 4)
    certP = normalize_tangent(P, 3, Q)
    assert certP.t == CurveFunction.from_parts(E16, kw, [-4], [1])
    assert certP.scaling == 1
    certQ = normalize_tangent(Q, 3, P)
    # true tangent at Q: y + 2 sqrt(-3) x + 4 sqrt(-3), with sqrt(-3) = 2w+1
    s = 2 * w + 1
    assert certQ.t == CurveFunction(
        E16, kw, Poly.from_elements(kw, [4 * s, 2 * s]), Poly.one(kw), Poly.one(kw)
    )
    assert certQ.scaling == 1


def test_series_expansion_satisfies_curve_equation(E7, F7):
    xs, ys = infinity_series(E7, F7, 14)
    y2 = ys.mul(ys, 10)
    x3 = xs.mul(xs, 10).mul(xs, 10)
    for e in range(-9, 10):
        lhs = y2.coefficient(e)
        rhs = F7.add(x3.coefficient(e), F7.from_int(2) if e == 0 else F7.zero())
        assert F7.is_zero(F7.sub(lhs, rhs))


def test_certificate_by_series_matches_fiber_route(E7, F7):
    P, Q = E7.point(0, 3), E7.point(3, 1)
    tP = CurveFunction.from_parts(E7, F7, [-3], [1])
    g = certificate_by_series(tP, 3, torsion_span(P, Q, 3))
    assert g**3 == compose_with_mult_map(tP, 3)
    cert = normalize_tangent(P, 3, Q)
    # both certificates cube to the same function, so they differ by mu_3
    ratio = g / cert.certificate.map_field(g.field)
    assert ratio.is_constant() and (ratio.constant_value() ** 3 - 1).is_zero()


def test_compose_with_mult_map_agrees_pointwise(E7, F7):
    tP = CurveFunction.from_parts(E7, F7, [-3], [1])
    h = compose_with_mult_map(tP, 3)
    for pt in enumerate_points(E7):
        if pt.infinity:
            continue
        v1 = h.evaluate(pt)
        q3 = scalar_mul(3, pt)
        v2 = tP.evaluate(q3) if not q3.infinity else POLE
        assert (v1 is POLE) == (v2 is POLE)
        if v1 is not POLE:
            assert v1 == v2
