import pytest

from ellbrauer.curves import Curve, add_points, scalar_mul
from ellbrauer.errors import NotABasis, VerificationFailed, WrongOrder
from ellbrauer.fields import FieldElement, embed, extend_field, make_prime_field, try_descend
from ellbrauer.funcfield import torsion_span, weil_pairing
from ellbrauer.torsion import (
    automorphism_group,
    classify_case,
    identity_automorphism,
    splitting_field_and_action,
    torsion_basis,
)


def _action_61(kw, E16):
    w = FieldElement(kw, kw.gen())
    P = E16.point(0, 4)
    Q = E16.point(FieldElement(kw, kw.from_int(-4)), 8 * w + 4)
    basis = torsion_basis(E16, "user-supplied", (P, Q))
    return classify_case(splitting_field_and_action(E16, basis))


def test_61_split_trivial_group(kw, E16):
    act = _action_61(kw, E16)
    assert act.case == "split"
    assert act.order() == 1 and act.generators == []
    assert act.field is kw


def test_62_closed_form_and_matrix(kw):
    E = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(2)))
    basis = torsion_basis(E, "closed-form-xcubed-plus-B")
    assert basis.field.absolute_degree() == 4  # k(sqrt 2), degree 2 over k
    act = classify_case(splitting_field_and_action(E, basis))
    assert act.case == "coprime-to-q"
    assert act.order() == 2
    non_id = [m for el, m in zip(act.elements, act.matrices) if not el.is_identity()]
    assert non_id == [((2, 0), (0, 2))]


def test_63_q_divides_unipotent(kw):
    E = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(4)))
    L = extend_field(kw, [-2, 0, 0, 1], "c")
    c = FieldElement(L, L.gen())
    isq3 = 2 * embed(FieldElement(kw, kw.gen()), L) + 1
    P = E.point(embed(FieldElement(kw, kw.zero()), L), embed(FieldElement(kw, kw.from_int(2)), L), L)
    Q = E.point(-2 * c, 2 * isq3, L)
    basis = torsion_basis(E, "user-supplied", (P, Q))
    act = classify_case(splitting_field_and_action(E, basis))
    assert act.case == "q-divides"
    assert act.sigma_matrix == ((1, 1), (0, 1))
    assert act.sigma.apply_point(act.basis.P) == act.basis.P
    assert act.sigma.apply_point(act.basis.Q) == add_points(act.basis.P, act.basis.Q)
    assert act.subfield.abstract is kw  # L' = k when [L:k] = q
    l = act.kummer_element
    assert l == c and try_descend(l**3, kw) == FieldElement(kw, kw.from_int(2))


def test_f7_auto_split(E7):
    basis = torsion_basis(E7, "finite-field-auto")
    act = classify_case(splitting_field_and_action(E7, basis))
    assert act.case == "split"


def test_f13_q_divides():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    basis = torsion_basis(E, "finite-field-auto")
    assert basis.field.absolute_degree() == 3
    act = classify_case(splitting_field_and_action(E, basis))
    assert act.case == "q-divides"
    assert act.sigma_matrix == ((1, 1), (0, 1))


def test_combined_case_f7_b3(F7):
    E = Curve(F7, FieldElement(F7, 0), FieldElement(F7, 3))
    basis = torsion_basis(E, "finite-field-auto")
    assert basis.field.absolute_degree() == 6
    act = classify_case(splitting_field_and_action(E, basis))
    assert act.case == "q-divides"
    sub = act.subfield
    assert sub.abstract.absolute_degree() == 2  # L' of index q in [L:k] = 6
    # embedding roundtrip for the fixed field
    gen = FieldElement(sub.abstract, sub.abstract.gen())
    pushed = sub.push(gen)
    assert sub.pull(pushed) == gen
    assert act.sigma(pushed) == pushed  # fixed by sigma
    l = act.kummer_element
    lq = l**3
    assert sub.pull(lq) is not None


def test_determinants_and_equivariance_all_cases(kw):
    cases = []
    E2 = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(2)))
    cases.append(classify_case(splitting_field_and_action(E2, torsion_basis(E2, "closed-form-xcubed-plus-B"))))
    F13 = make_prime_field(13, 3)
    E13 = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    cases.append(classify_case(splitting_field_and_action(E13, torsion_basis(E13, "finite-field-auto"))))
    for act in cases:
        basis = act.basis
        M = basis.module()
        module_coords = {}
        for a in range(3):
            for b in range(3):
                pt = add_points(scalar_mul(a, basis.P), scalar_mul(b, basis.Q))
                module_coords[pt] = (a, b)
        for sigma, mat in zip(act.elements, act.matrices):
            assert (mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]) % 3 == 1
            # matrix action matches the field action on every torsion point
            for T in M:
                a, b = module_coords[T]
                img = sigma.apply_point(T)
                ia = (mat[0][0] * a + mat[0][1] * b) % 3
                ib = (mat[1][0] * a + mat[1][1] * b) % 3
                expected = add_points(scalar_mul(ia, basis.P), scalar_mul(ib, basis.Q))
                assert img == expected
            # pairing preservation
            assert weil_pairing(sigma.apply_point(basis.P), sigma.apply_point(basis.Q), 3) == sigma(basis.rho_check)


def test_unipotent_sum_lemma():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    act = classify_case(splitting_field_and_action(E, torsion_basis(E, "finite-field-auto")))
    sigma = act.sigma
    for R in act.basis.module():
        acc = E.infinity(act.field)
        cur = R
        for _ in range(3):
            acc = add_points(acc, cur)
            cur = sigma.apply_point(cur)
        assert acc.infinity


def test_basis_verification_errors(kw, E16):
    w = FieldElement(kw, kw.gen())
    P = E16.point(0, 4)
    with pytest.raises(WrongOrder):
        torsion_basis(E16, "user-supplied", (E16.infinity(), P))
    with pytest.raises(NotABasis):
        torsion_basis(E16, "user-supplied", (P, scalar_mul(2, P)))


def test_orientation_fix(kw, E16):
    w = FieldElement(kw, kw.gen())
    P = E16.point(0, 4)
    Q = E16.point(FieldElement(kw, kw.from_int(-4)), 8 * w + 4)
    b1 = torsion_basis(E16, "user-supplied", (P, Q))
    # swapping the arguments inverts the pairing, forcing a reorientation
    b2 = torsion_basis(E16, "user-supplied", (Q, P))
    from ellbrauer.fields import rho_index

    assert rho_index(b1.rho_check) == 1
    assert rho_index(b2.rho_check) == 1
    assert b2.orientation_power == 2


def test_automorphism_group_structure(kw):
    L = extend_field(kw, [-2, 0, 0, 1], "c")
    autos = automorphism_group(L, kw)
    assert len(autos) == 3
    orders = sorted(a.order() for a in autos)
    assert orders == [1, 3, 3]
    ident = identity_automorphism(L, kw)
    for a in autos:
        assert a.compose(ident) == a
