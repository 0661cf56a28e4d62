import pytest

from ellbrauer.curves import Curve, add_points, enumerate_points, lift_point, scalar_mul
from ellbrauer.engine import (
    FiniteCyclicQuotient,
    KummerPair,
    Symbol,
    SymbolTensor,
    build_nQ,
    class_is_trivial,
    classes_equal,
    cocycle_is_closed,
    descend_class_representative,
    divisibility_quotient_nontrivial,
    finite_mw_reps_via_delta,
    fixed_set_check,
    inflation_generator,
    kummer_delta,
    point_divisible_over,
    presentation_q_divides,
    presentation_split,
    restriction_image_check,
    symbol_cocycle_oracle,
)
from ellbrauer.errors import NotFiniteQuotient, WrongCase
from ellbrauer.factor import adjoin_root
from ellbrauer.fields import FieldElement, embed, extend_field, make_prime_field, try_descend
from ellbrauer.funcfield import POLE, normalize_tangent, qth_division_point, torsion_span, weil_pairing
from ellbrauer.curves import Point
from ellbrauer.polys import Poly
from ellbrauer.torsion import classify_case, identity_automorphism, splitting_field_and_action, torsion_basis


@pytest.fixture(scope="module")
def f7_setup(E7):
    basis = torsion_basis(E7, "finite-field-auto")
    tP = normalize_tangent(basis.P, 3, basis.Q)
    tQ = normalize_tangent(basis.Q, 3, basis.P)
    return basis, tP, tQ


def test_delta_identity_case(E7, f7_setup):
    basis, tP, tQ = f7_setup
    pair = kummer_delta(E7.infinity(), tP, tQ, basis)
    assert pair.is_trivial()


def test_delta_four_cases_and_values(E7, f7_setup):
    basis, tP, tQ = f7_setup
    P, Q = basis.P, basis.Q
    dP = kummer_delta(P, tP, tQ, basis)
    assert dP.a == tQ.t.evaluate(P)
    PQ = add_points(P, Q)
    assert dP.b == tP.t.evaluate(PQ) / tP.t.evaluate(Q)
    dQ = kummer_delta(Q, tP, tQ, basis)
    assert dQ.b == tP.t.evaluate(Q)
    R = add_points(P, scalar_mul(2, Q))
    dR = kummer_delta(R, tP, tQ, basis)
    assert dR.a == tQ.t.evaluate(R) and dR.b == tP.t.evaluate(R)


def test_delta_additivity_exhaustive(E7, f7_setup):
    basis, tP, tQ = f7_setup
    pts = enumerate_points(E7)
    pairs = {p.key(): kummer_delta(p, tP, tQ, basis) for p in pts}
    for a in pts:
        for b in pts:
            ab = add_points(a, b)
            assert pairs[ab.key()].equivalent(pairs[a.key()].mul(pairs[b.key()]))


def test_delta_frobenius_kummer_oracle(E7, F7, f7_setup):
    """delta agrees with the Galois-cohomology description: pairing the
    Frobenius twist of a division point against the basis recovers the
    Kummer coordinates."""
    basis, tP, tQ = f7_setup
    for R in enumerate_points(E7):
        if R.infinity:
            continue
        pair = kummer_delta(R, tP, tQ, basis)
        S = qth_division_point(R, 3)
        big = S.field

        def frob(pt):
            return Point(
                pt.curve, big,
                FieldElement(big, big.pow(pt.x.payload, 7)),
                FieldElement(big, big.pow(pt.y.payload, 7)),
            )

        D = add_points(frob(S), -S)
        eP = weil_pairing(D, lift_point(basis.P, big), 3)
        eQ = weil_pairing(D, lift_point(basis.Q, big), 3)
        assert try_descend(eP, F7) == FieldElement(F7, F7.pow(pair.b.payload, 2))
        assert try_descend(eQ, F7) == FieldElement(F7, F7.pow(pair.a.payload, 2))


def test_presentation_split_trivial_I_over_f7(E7, f7_setup):
    basis, tP, tQ = f7_setup
    from ellbrauer.curves import mordell_weil_mod_q

    reps, tag = mordell_weil_mod_q(E7, 3, {"mode": "exhaustive"})
    pres = presentation_split(E7, basis, tP, tQ, reps, tag)
    assert pres.case == "split"
    assert len(pres.relations) == 9
    classes = []
    for entry in pres.relations:
        if not any(entry["pair"].equivalent(c) for c in classes):
            classes.append(entry["pair"])
    assert len(classes) == 9  # image exhausts the target: I is trivial
    assert not pres.caveats


def test_epsilon_drops_trivial_slots(E7, f7_setup):
    basis, tP, tQ = f7_setup
    from ellbrauer.engine import epsilon_to_symbols

    F7 = basis.field
    one = FieldElement(F7, F7.one())
    empty = epsilon_to_symbols(KummerPair(one, one, 3), tP, tQ, "k(E)")
    assert empty.is_empty()
    mixed = epsilon_to_symbols(KummerPair(FieldElement(F7, 2), one, 3), tP, tQ, "k(E)")
    assert mixed.length() == 1 and mixed.terms[0].func == tP.t


def test_tensor_length_bound():
    with pytest.raises(WrongCase):
        SymbolTensor([None] * 17, 3).assert_length_bound()


@pytest.fixture(scope="module")
def f13_setup():
    F13 = make_prime_field(13, 3)
    E = Curve(F13, FieldElement(F13, 1), FieldElement(F13, 1))
    basis = torsion_basis(E, "finite-field-auto")
    act = classify_case(splitting_field_and_action(E, basis))
    tP = normalize_tangent(act.basis.P, 3, act.basis.Q)
    tQ = normalize_tangent(act.basis.Q, 3, act.basis.P)
    return F13, E, act, tP, tQ


def test_build_nq_norm_identity(f13_setup):
    F13, E, act, tP, tQ = f13_setup
    n_q = build_nQ(act, tQ)
    L = act.field
    sigma = act.sigma
    conj = tQ.t.map_field(L) if tQ.t.field is not L else tQ.t
    norm = conj
    for _ in range(2):
        conj = conj.map_coefficients(lambda c: sigma.apply_payload(c))
        norm = norm * conj
    assert n_q**3 == norm
    from ellbrauer.funcfield import function_divisor

    d = function_divisor(n_q)
    expected_zeros = {add_points(scalar_mul(i, act.basis.P), act.basis.Q) for i in range(3)}
    assert {p for p, n in d.coeffs.items() if n > 0} == expected_zeros


def test_inflation_generator_and_flags(f13_setup):
    F13, E, act, tP, tQ = f13_setup
    n_q = build_nQ(act, tQ)
    sym, trivial_flag, flags = inflation_generator(act, n_q, quotient_nontrivial=False, mw_complete=True)
    assert not flags
    assert trivial_flag is False
    lq = act.kummer_element ** 3
    assert embed(sym.coeff, act.field) == lq


def test_divisibility_quotient_nontrivial_witness(F7):
    # y^2 = x^3 + 1 over F7: (0,1) is not 3-divisible over F7 but becomes
    # divisible over the torsion field
    E = Curve(F7, FieldElement(F7, 0), FieldElement(F7, 1))
    basis = torsion_basis(E, "finite-field-auto")
    L = basis.field
    witness = E.point(0, 1)
    assert not point_divisible_over(witness, 3, F7)
    assert point_divisible_over(witness, 3, L)
    from ellbrauer.curves import mordell_weil_mod_q

    reps, _ = mordell_weil_mod_q(E, 3, {"mode": "exhaustive"})
    assert divisibility_quotient_nontrivial(reps, 3, L, F7)


def test_divisibility_quotient_trivial_63(kw):
    E = Curve(kw, FieldElement(kw, kw.zero()), FieldElement(kw, kw.from_int(4)))
    L = extend_field(kw, [-2, 0, 0, 1], "c")
    P = E.point(0, 2)
    assert not point_divisible_over(P, 3, L)


def test_fixed_set_check_matches_brute_force(f13_setup):
    F13, E, act, tP, tQ = f13_setup
    L = act.field
    from ellbrauer.corestriction import twisted_action_pair

    reps = []
    for payload in L.elements():
        if L.is_zero(payload):
            continue
        e = FieldElement(L, payload)
        if not any(classes_equal(e, r, 3) for r in reps):
            reps.append(e)
        if len(reps) == 3:
            break
    sigma = act.sigma
    sigma_inv = sigma.compose(sigma)  # order 3
    for a in reps:
        for b in reps:
            got, _ = fixed_set_check(KummerPair(a, b, 3), act)
            ta, tb = twisted_action_pair(sigma, sigma_inv, act.basis, (a, b), 3)
            brute = classes_equal(ta, a, 3) and classes_equal(tb, b, 3)
            assert got == brute


def test_restriction_image_check(f13_setup):
    F13, E, act, tP, tQ = f13_setup
    L = act.field
    one = FieldElement(L, L.one())
    for bk in (2, 3, 5, 6):
        pair = KummerPair(embed(FieldElement(F13, bk), L), one, 3)
        ok, _ = restriction_image_check(pair, act)
        assert ok
    # a pair with a nontrivial second slot is never of the form (b, 1)
    noncube = None
    for payload in L.elements():
        if L.is_zero(payload):
            continue
        e = FieldElement(L, payload)
        if not class_is_trivial(e, 3):
            noncube = e
            break
    ok, witness = restriction_image_check(KummerPair(one, noncube, 3), act)
    assert not ok and witness == {"b_trivial": False}


def test_fixed_set_violating_pair(f13_setup):
    F13, E, act, tP, tQ = f13_set = f13_setup
    L = act.field
    sigma = act.sigma
    # construct (a, b) with b not equivalent to a/sigma(a)
    found = False
    for payload in L.elements():
        if L.is_zero(payload):
            continue
        a = FieldElement(L, payload)
        b = a / sigma(a) * FieldElement(L, L.from_int(1))
        for payload2 in L.elements():
            if L.is_zero(payload2):
                continue
            c = FieldElement(L, payload2)
            if not class_is_trivial(c, 3):
                bad = KummerPair(a, b * c, 3)
                ok, _ = fixed_set_check(bad, act)
                if not ok:
                    found = True
                break
        if found:
            break
    assert found


def test_h90_descent_roundtrip(f13_setup):
    import random

    F13, E, act, tP, tQ = f13_setup
    L = act.field
    rng = random.Random(5)
    done = 0
    while done < 8:
        c = FieldElement(F13, rng.randrange(1, 13))
        payload = tuple(rng.randrange(13) for _ in range(3))
        if L.is_zero(payload):
            continue
        s = FieldElement(L, payload)
        aL = embed(c, L) * s**3
        rep = descend_class_representative(aL, act)
        assert rep is not None
        assert classes_equal(embed(rep, L), aL, 3)
        done += 1


def test_descend_obstruction_dichotomy(f13_setup):
    # over this finite tower every class is sigma-invariant and every base
    # class becomes a cube upstairs, so descent succeeds exactly on the
    # trivial class and the norm obstruction rejects the other two
    F13, E, act, tP, tQ = f13_setup
    L = act.field
    seen_trivial = seen_blocked = 0
    reps = []
    for payload in L.elements():
        if L.is_zero(payload):
            continue
        e = FieldElement(L, payload)
        if not any(classes_equal(e, r, 3) for r in reps):
            reps.append(e)
        if len(reps) == 3:
            break
    for a in reps:
        rep = descend_class_representative(a, act)
        if class_is_trivial(a, 3):
            assert rep is not None
            seen_trivial += 1
        else:
            assert rep is None
            seen_blocked += 1
    assert seen_trivial == 1 and seen_blocked == 2


def test_finite_mw_reps_via_delta(f13_setup):
    F13, E, act, tP, tQ = f13_setup
    L = act.field
    reps = finite_mw_reps_via_delta(E.base_change(L), L, act.basis, tP, tQ)
    assert len(reps) == 9
    pairs = [kummer_delta(r, tP, tQ, act.basis) for r in reps]
    for i, p1 in enumerate(pairs):
        for p2 in pairs[i + 1:]:
            assert not p1.equivalent(p2)


def test_presentation_q_divides_f13(f13_setup):
    F13, E, act, tP, tQ = f13_setup
    from ellbrauer.curves import mordell_weil_mod_q

    n_q = build_nQ(act, tQ)
    mwk, tagk = mordell_weil_mod_q(E, 3, {"mode": "exhaustive"})
    L = act.field
    mwL = finite_mw_reps_via_delta(E.base_change(L), L, act.basis, tP, tQ)
    pres = presentation_q_divides(E, act.basis, act, tP, tQ, n_q, mwk, tagk, mwL, "exhaustive", mw_complete=True)
    assert pres.case == "q-divides"
    assert len(pres.generators) == 2
    for entry in pres.relations:
        if entry.get("tensor") is not None:
            entry["tensor"].assert_length_bound()


# ---------------------------------------------------------------------------
# the finite-quotient cocycle oracle
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def oracle_setup(F7):
    top = F7
    for aval in (3, 5):
        top, _ = adjoin_root(top, Poly.from_elements(top, [top.from_int(-aval), 0, 0, 1]), f"r{aval}")
    return F7, top, FiniteCyclicQuotient(F7, top)


def test_cocycle_tables_closed_and_linked(F7, oracle_setup):
    base, top, quotient = oracle_setup
    a, b = FieldElement(F7, 3), FieldElement(F7, 5)
    std, prp, cob = symbol_cocycle_oracle(a, b, quotient)
    assert cocycle_is_closed(std, quotient)
    assert cocycle_is_closed(prp, quotient)
    n = quotient.order
    for i in range(n):
        for j in range(n):
            assert prp[(i, j)] * cob[(i, j)] == std[(i, j)]


def test_cocycle_qth_power_gives_coboundary(F7, oracle_setup):
    # a = 6 = 3^3 is a cube with a base-field root, so the standard table
    # is itself the coboundary of h(gamma) = r^chi(gamma)
    base, top, quotient = oracle_setup
    a, b = FieldElement(F7, 6), FieldElement(F7, 5)
    std, _, _ = symbol_cocycle_oracle(a, b, quotient)
    from ellbrauer.engine import _qth_root_in
    from ellbrauer.fields import rho_index

    beta = _qth_root_in(b, top, 3)
    r = embed(FieldElement(F7, 3), top)
    n = quotient.order
    chi = [rho_index(quotient.apply(i, beta) / beta) for i in range(n)]
    h = {i: r ** chi[i] for i in range(n)}
    for i in range(n):
        for j in range(n):
            dh = quotient.apply(i, h[j]) * h[i] / h[(i + j) % n]
            assert dh == std[(i, j)]


def test_cocycle_oracle_requires_roots(F7):
    with pytest.raises(NotFiniteQuotient):
        symbol_cocycle_oracle(
            FieldElement(F7, 3), FieldElement(F7, 5), FiniteCyclicQuotient(F7, F7)
        )
