import pytest

from ellbrauer.curves import (
    Curve,
    apply_mult_map,
    division_polynomial,
    enumerate_points,
    lift_point,
    mordell_weil_mod_q,
    mult_by_q_map,
    naive_point_search,
    scalar_mul,
)
from ellbrauer.errors import CapExceeded, PointNotOnCurve, SuppliedPointNotOnCurve
from ellbrauer.factor import roots_in_field
from ellbrauer.fields import FieldElement, make_prime_field, make_rationals, extend_field
from ellbrauer.polys import Poly


def test_identity_law(E7):
    P = E7.point(0, 3)
    assert P + E7.infinity() == P


def test_doubling_and_order(E7):
    P = E7.point(0, 3)
    assert 2 * P == E7.point(0, 4)
    assert (3 * P).infinity


def test_group_axioms_exhaustive(E7):
    pts = enumerate_points(E7)
    assert len(pts) == 9
    for a in pts:
        for b in pts:
            assert a + b == b + a
            assert (a + b) - b == a
    for a in pts[:6]:
        for b in pts[:6]:
            for c in pts[:6]:
                assert (a + b) + c == a + (b + c)


def test_point_not_on_curve_rejected(E7):
    with pytest.raises(PointNotOnCurve):
        E7.point(1, 1)


def test_singular_curve_rejected(F7):
    # 4*0 + 27*0 = 0
    with pytest.raises(PointNotOnCurve):
        Curve(F7, FieldElement(F7, 0), FieldElement(F7, 0))


def test_division_polynomial_closed_forms(kw):
    E = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(16)))
    psi = division_polynomial(E, 3)
    assert psi == Poly.from_elements(kw, [0, 192, 0, 0, 3])
    QQ = make_rationals(3)
    EA = Curve(QQ, FieldElement(QQ, QQ.one()), FieldElement(QQ, QQ.zero()))
    assert division_polynomial(EA, 3) == Poly.from_elements(QQ, [-1, 0, 6, 0, 3])


def test_division_polynomial_roots_are_torsion_x(E7, F7):
    psi = division_polynomial(E7, 3)
    assert psi == Poly.from_elements(F7, [0, 3, 0, 0, 3])
    roots = roots_in_field(F7, psi)
    assert roots == [0, 3, 5, 6]
    torsion_x = sorted({p.x.payload for p in enumerate_points(E7) if not p.infinity})
    assert roots == torsion_x


def test_division_polynomial_degree_general():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    assert division_polynomial(E, 5).degree() == 12
    assert division_polynomial(E, 7).degree() == 24


def test_mult_map_matches_scalar_mul(E7):
    maps = mult_by_q_map(E7, 3)
    assert maps[0].degree() == 9
    for p in enumerate_points(E7):
        if p.infinity:
            continue
        assert apply_mult_map(maps, p) == scalar_mul(3, p)


def test_mult_map_torsion_to_infinity(E7):
    maps = mult_by_q_map(E7, 3)
    P = E7.point(0, 3)
    assert apply_mult_map(maps, P).infinity


def test_mult_map_matches_over_f13():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    maps = mult_by_q_map(E, 3)
    for p in enumerate_points(E):
        if p.infinity:
            continue
        assert apply_mult_map(maps, p) == scalar_mul(3, p)


def test_mult_map_cap(kw):
    E = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(16)))
    with pytest.raises(CapExceeded):
        mult_by_q_map(E, 5)


def test_mordell_weil_exhaustive(E7):
    reps, tag = mordell_weil_mod_q(E7, 3, {"mode": "exhaustive"})
    assert tag == "exhaustive"
    assert len(reps) == 9  # E = E[3], so [3]E = 0 and all points represent


def test_mordell_weil_supplied(kw, E16):
    w = FieldElement(kw, kw.gen())
    P = E16.point(0, 4)
    Q = E16.point(FieldElement(kw, kw.from_int(-4)), 8 * w + 4)
    reps, tag = mordell_weil_mod_q(E16, 3, {"mode": "supplied", "points": [P, Q], "complete": True})
    assert tag == "verified-supplied"
    assert len(reps) == 9
    reps2, tag2 = mordell_weil_mod_q(E16, 3, {"mode": "supplied", "points": [], "complete": True})
    assert len(reps2) == 1 and reps2[0].infinity


def test_mordell_weil_supplied_rejects_bad_point(E16, kw):
    bad = object.__new__(type(E16.infinity()))
    from ellbrauer.curves import Point

    bad = Point(E16, kw, FieldElement(kw, kw.from_int(1)), FieldElement(kw, kw.from_int(1)))
    with pytest.raises(SuppliedPointNotOnCurve):
        mordell_weil_mod_q(E16, 3, {"mode": "supplied", "points": [bad], "complete": False})


def test_mordell_weil_search_finds_small_point(kw):
    # y^2 = x^3 + 2 has the rational point (-1, 1)
    E = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(2)))
    found = naive_point_search(E, 2)
    assert any(p.x == -1 for p in found)
    reps, tag = mordell_weil_mod_q(E, 3, {"mode": "search", "bound": 2})
    assert tag == "search-bounded"
    assert len(reps) >= 3


def test_scalar_mul_negative(E7):
    P = E7.point(0, 3)
    assert scalar_mul(-1, P) == -P
    assert scalar_mul(-2, P) == -(2 * P)


def test_lift_point_between_fields(E7, F7):
    F49 = extend_field(F7, [1, 0, 1], "t")
    P = E7.point(0, 3)
    PL = lift_point(P, F49)
    assert PL.field is F49 and E7.contains(PL)
    assert (3 * PL).infinity
