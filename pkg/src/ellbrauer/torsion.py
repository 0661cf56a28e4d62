"""Torsion bases, the splitting field, and the Galois action on torsion.

The splitting field L is realized as the tower generated by the basis
coordinates; its automorphisms over k are enumerated by root-matching on
the tower's defining polynomials, and each one is recorded as a matrix
in SL2(F_q) acting on the chosen basis (P, Q).
"""

from __future__ import annotations

import itertools

from .curves import Curve, Point, add_points, division_polynomial, enumerate_points, lift_point, scalar_mul
from .errors import (
    MatrixNotSL2,
    NoRootOfUnity,
    NotABasis,
    NotGalois,
    NoUnipotentGenerator,
    VerificationFailed,
    WrongOrder,
)
from .factor import adjoin_root, factor_poly, roots_in_field
from .fields import (
    ExtensionField,
    FieldDescriptor,
    FieldElement,
    embed,
    embed_payload,
    is_ancestor,
    rho_element,
    rho_index,
)
from .funcfield import torsion_span, weil_pairing
from .linalg import (
    SubfieldEmbedding,
    flatten_payload,
    kernel_basis,
    levels_between,
    minimal_polynomial,
    relative_degree,
    tower_basis_payloads,
)
from .polys import Poly


# ---------------------------------------------------------------------------
# field automorphisms of a tower
# ---------------------------------------------------------------------------

class FieldAutomorphism:
    """Automorphism of a tower field, fixing a designated base, stored as
    images (payloads of the top field) of each level's generator."""

    __slots__ = ("field", "base", "images")

    def __init__(self, field: FieldDescriptor, base: FieldDescriptor, images: dict):
        self.field = field
        self.base = base
        self.images = images  # level uid -> payload of field

    def apply_payload(self, payload, level: FieldDescriptor | None = None):
        level = level or self.field
        if level is self.base or is_ancestor(level, self.base):
            return embed_payload(payload, level, self.field)
        assert isinstance(level, ExtensionField)
        f = self.field
        img = self.images[level.uid]
        out = f.zero()
        pw = f.one()
        for c in payload:
            oc = self.apply_payload(c, level.base)
            out = f.add(out, f.mul(oc, pw))
            pw = f.mul(pw, img)
        return out

    def __call__(self, elem: FieldElement) -> FieldElement:
        payload = elem.payload
        if elem.field is not self.field:
            payload = embed_payload(payload, elem.field, self.field)
        return FieldElement(self.field, self.apply_payload(payload))

    def apply_point(self, p: Point) -> Point:
        if p.infinity:
            return Point(p.curve, self.field, None, None, infinity=True)
        return Point(p.curve, self.field, self(p.x), self(p.y))

    def compose(self, other: "FieldAutomorphism") -> "FieldAutomorphism":
        """self after other."""
        images = {uid: self.apply_payload(img) for uid, img in other.images.items()}
        return FieldAutomorphism(self.field, self.base, images)

    def is_identity(self) -> bool:
        f = self.field
        for lv in levels_between(self.base, self.field):
            gen = embed_payload(lv.gen(), lv, f)
            if not f.is_zero(f.sub(self.images[lv.uid], gen)):
                return False
        return True

    def key(self):
        f = self.field
        return tuple(f.key(self.images[lv.uid]) for lv in levels_between(self.base, self.field))

    def order(self) -> int:
        acc = self
        for n in range(1, 1000):
            if acc.is_identity():
                return n
            acc = self.compose(acc)
        raise RuntimeError("automorphism order overflow")

    def __eq__(self, other):
        return isinstance(other, FieldAutomorphism) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def identity_automorphism(field: FieldDescriptor, base: FieldDescriptor) -> FieldAutomorphism:
    images = {}
    for lv in levels_between(base, field):
        images[lv.uid] = embed_payload(lv.gen(), lv, field)
    return FieldAutomorphism(field, base, images)


def automorphism_group(field: FieldDescriptor, base: FieldDescriptor):
    """All automorphisms of field fixing base; raises NotGalois when the
    count falls short of the tower degree."""
    levels = levels_between(base, field)
    for lv in levels:
        if not isinstance(lv, ExtensionField):
            raise NotGalois(f"non-algebraic level {lv.describe()}")
    autos = []

    def rec(idx, images):
        if idx == len(levels):
            autos.append(FieldAutomorphism(field, base, dict(images)))
            return
        lv = levels[idx]
        partial = FieldAutomorphism(field, base, dict(images))
        sigma_mod = Poly(
            field,
            [partial.apply_payload(c, lv.base) for c in lv.modulus],
        )
        for root in sorted(roots_in_field(field, sigma_mod), key=field.key):
            images[lv.uid] = root
            rec(idx + 1, images)
            del images[lv.uid]

    rec(0, {})
    expected = relative_degree(base, field)
    if len(autos) != expected:
        raise NotGalois(
            f"{field.describe()} has {len(autos)} automorphisms over "
            f"{base.describe()}, expected {expected}"
        )
    autos.sort(key=lambda a: a.key())
    return autos


def galois_closure(field: FieldDescriptor, base: FieldDescriptor):
    """Extend the tower until it is normal over base (splitting each level)."""
    current = field
    for _ in range(8):
        try:
            automorphism_group(current, base)
            return current
        except NotGalois:
            pass
        extended = False
        for lv in levels_between(base, current):
            mod = Poly(current, [embed_payload(c, lv.base, current) for c in lv.modulus])
            facs = factor_poly(current, mod)
            nonlinear = sorted((h for h, _ in facs if h.degree() > 1), key=lambda h: h.key())
            if nonlinear:
                current, _ = adjoin_root(current, nonlinear[0], f"n{lv.name}")
                extended = True
                break
        if not extended:
            raise NotGalois("tower splits its levels but automorphism count is short")
    raise NotGalois("normal closure loop did not terminate")


# ---------------------------------------------------------------------------
# torsion bases
# ---------------------------------------------------------------------------

class TorsionBasis:
    __slots__ = ("curve", "field", "P", "Q", "rho_check", "orientation_power")

    def __init__(self, curve: Curve, field, P: Point, Q: Point, rho_check, orientation_power=1):
        self.curve = curve
        self.field = field
        self.P = P
        self.Q = Q
        self.rho_check = rho_check
        self.orientation_power = orientation_power

    def module(self):
        return torsion_span(self.P, self.Q, self.curve.q)

    def __repr__(self):
        return f"TorsionBasis(P={self.P!r}, Q={self.Q!r} over {self.field.describe()})"


def _verify_and_orient(curve: Curve, field, P: Point, Q: Point, q: int) -> TorsionBasis:
    for name, pt in (("P", P), ("Q", Q)):
        if pt.infinity:
            raise WrongOrder(f"{name} is the identity")
        if not scalar_mul(q, pt).infinity:
            raise WrongOrder(f"{name} is not {q}-torsion")
    if field.rho is None:
        raise NoRootOfUnity("working field carries no designated root of unity")
    e = weil_pairing(P, Q, q)
    if e == 1:
        raise NotABasis("supplied points are dependent (trivial pairing)")
    m = rho_index(e)
    power = 1
    if m != 1:
        power = pow(m, -1, q)
        Q = scalar_mul(power, Q)
        e = weil_pairing(P, Q, q)
    if rho_index(e) != 1:
        raise VerificationFailed("could not orient the basis to e(P,Q) = rho")
    return TorsionBasis(curve, field, P, Q, e, power)


def full_torsion_field(curve: Curve, q: int, start: FieldDescriptor | None = None):
    """Extend the base tower until all q-torsion is rational; returns
    (field, nonzero torsion points)."""
    field = start or curve.field
    for _ in range(12):
        psi = division_polynomial(curve, q, field)
        facs = factor_poly(field, psi)
        nonlinear = sorted((h for h, _ in facs if h.degree() > 1), key=lambda h: h.key())
        if nonlinear:
            field, _ = adjoin_root(field, nonlinear[0], f"t{len(field.tower())}")
            continue
        xs = sorted((field.neg(h.coeffs[0]) for h, _ in facs), key=field.key)
        rhs = curve.rhs_poly(field)
        need_ext = None
        points = []
        for x0 in xs:
            y2 = rhs.evaluate(x0)
            ypoly = Poly(field, [field.neg(y2), field.zero(), field.one()])
            yroots = roots_in_field(field, ypoly)
            if not yroots:
                need_ext = ypoly
                break
            for y0 in yroots:
                points.append(Point(curve, field, FieldElement(field, x0), FieldElement(field, y0)))
        if need_ext is not None:
            field, _ = adjoin_root(field, need_ext, f"t{len(field.tower())}")
            continue
        if len(points) == q * q - 1:
            return field, points
        raise VerificationFailed("torsion point count mismatch")
    raise VerificationFailed("torsion field construction did not stabilize")


def torsion_basis(curve: Curve, mode: str, supplied=None) -> TorsionBasis:
    """Construct and verify a rho-oriented q-torsion basis.

    mode: "finite-field-auto" | "closed-form-xcubed-plus-B" | "user-supplied"
    """
    q = curve.q
    if mode == "user-supplied":
        P, Q = supplied
        if P.infinity or Q.infinity:
            raise WrongOrder("supplied basis points must be affine q-torsion")
        a, _ = P.x._pair(Q.x)
        field = a.field
        P, Q = lift_point(P, field), lift_point(Q, field)
        for pt in (P, Q):
            if not curve.contains(pt):
                raise NotABasis(f"supplied point {pt!r} is not on the curve")
        return _verify_and_orient(curve, field, P, Q, q)
    if mode == "finite-field-auto":
        if not curve.field.is_finite():
            raise VerificationFailed("auto mode requires a finite base field")
        field, points = full_torsion_field(curve, q)
        points.sort(key=lambda p: p.key())
        P = points[0]
        for cand in points[1:]:
            if weil_pairing(P, cand, q) != 1:
                return _verify_and_orient(curve, field, P, cand, q)
        raise NotABasis("no independent pair among torsion points")
    if mode == "closed-form-xcubed-plus-B":
        if not curve.A.is_zero():
            raise VerificationFailed("closed form requires A = 0")
        k = curve.field
        B = curve.B
        # P = (0, sqrt(B))
        f1, sqrtB = adjoin_root(k, Poly.from_elements(k, [-B, 0, 1]), "sB")
        # Q = (cbrt(-4B), sqrt(-3B))
        B1 = embed(B, f1)
        f2, cbrt = adjoin_root(f1, Poly.from_elements(f1, [4 * B1, 0, 0, 1]), "c4B")
        B2 = embed(B, f2)
        f3, sqrtm3B = adjoin_root(f2, Poly.from_elements(f2, [3 * B2, 0, 1]), "s3B")
        P = curve.point(embed(FieldElement(k, k.zero()), f3), embed(sqrtB, f3), f3)
        Q = curve.point(embed(cbrt, f3), sqrtm3B, f3)
        return _verify_and_orient(curve, f3, P, Q, q)
    raise ValueError(f"unknown torsion mode {mode!r}")


def relative_degree_safe(a, b):
    try:
        return is_ancestor(b, a)
    except Exception:
        return False


# ---------------------------------------------------------------------------
# the Galois action as SL2(F_q) matrices
# ---------------------------------------------------------------------------

class GaloisAction:
    """Gal(L/k) with its matrix representation on the torsion basis."""

    __slots__ = (
        "curve",
        "base",
        "field",
        "basis",
        "elements",
        "matrices",
        "generators",
        "case",
        "sigma",
        "sigma_matrix",
        "subfield",
        "kummer_element",
        "basis_changed",
    )

    def __init__(self, curve, base, field, basis, elements, matrices, generators):
        self.curve = curve
        self.base = base
        self.field = field
        self.basis = basis
        self.elements = elements
        self.matrices = matrices  # parallel to elements
        self.generators = generators  # indices into elements
        self.case = None
        self.sigma = None
        self.sigma_matrix = None
        self.subfield = None  # SubfieldEmbedding of L' when relevant
        self.kummer_element = None
        self.basis_changed = False

    def order(self):
        return len(self.elements)

    def matrix_of(self, sigma: FieldAutomorphism):
        for el, mat in zip(self.elements, self.matrices):
            if el == sigma:
                return mat
        raise KeyError("automorphism not in the recorded group")

    def __repr__(self):
        return (
            f"GaloisAction(order={self.order()}, case={self.case}, "
            f"L={self.field.describe()} over {self.base.describe()})"
        )


def _matrix_of_automorphism(sigma: FieldAutomorphism, basis: TorsionBasis, q: int):
    """Columns: coordinates of sigma(P), sigma(Q) in the basis (P, Q)."""
    module = {}
    for a in range(q):
        for b in range(q):
            pt = add_points(scalar_mul(a, basis.P), scalar_mul(b, basis.Q))
            module[pt] = (a, b)
    sp = sigma.apply_point(basis.P)
    sq = sigma.apply_point(basis.Q)
    if sp not in module or sq not in module:
        raise VerificationFailed("automorphism does not stabilize the torsion module")
    a, c = module[sp]
    b, d = module[sq]
    return ((a, b), (c, d))


def _mat_det(mat, q):
    return (mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]) % q


def _mat_mul(m1, m2, q):
    return (
        (
            (m1[0][0] * m2[0][0] + m1[0][1] * m2[1][0]) % q,
            (m1[0][0] * m2[0][1] + m1[0][1] * m2[1][1]) % q,
        ),
        (
            (m1[1][0] * m2[0][0] + m1[1][1] * m2[1][0]) % q,
            (m1[1][0] * m2[0][1] + m1[1][1] * m2[1][1]) % q,
        ),
    )


def splitting_field_and_action(curve: Curve, basis: TorsionBasis) -> GaloisAction:
    """Automorphisms of L/k with their SL2 matrices; verifies minimality."""
    q = curve.q
    k = curve.field
    L = basis.field
    if L is k:
        ident = []
        return GaloisAction(curve, k, L, basis, [identity_automorphism(L, k)], [((1, 0), (0, 1))], [])
    autos = automorphism_group(L, k)
    matrices = []
    for sigma in autos:
        mat = _matrix_of_automorphism(sigma, basis, q)
        if _mat_det(mat, q) != 1:
            raise MatrixNotSL2(f"determinant {_mat_det(mat, q)} != 1; is rho in k?")
        matrices.append(mat)
    # kernel-field minimality: only the identity may fix the basis pointwise
    fixing = [i for i, m in enumerate(matrices) if m == ((1, 0), (0, 1))]
    if len(fixing) > 1:
        raise VerificationFailed(
            "splitting tower is not minimal: a nontrivial automorphism fixes "
            "the torsion pointwise (supply coordinates over the minimal field)"
        )
    generators = _generating_set(autos, matrices)
    return GaloisAction(curve, k, L, basis, autos, matrices, generators)


def _generating_set(autos, matrices):
    n = len(autos)
    if n == 1:
        return []
    order = {a.key(): i for i, a in enumerate(autos)}
    chosen = []
    generated = {autos_index_identity(autos)}
    for i, a in enumerate(autos):
        if i in generated:
            continue
        chosen.append(i)
        # close under composition
        frontier = set(generated) | {i}
        while True:
            new = set()
            for x in frontier:
                for y in frontier:
                    z = autos[x].compose(autos[y])
                    zi = order[z.key()]
                    if zi not in frontier:
                        new.add(zi)
            if not new:
                break
            frontier |= new
        generated = frontier
        if len(generated) == n:
            break
    return chosen


def autos_index_identity(autos):
    for i, a in enumerate(autos):
        if a.is_identity():
            return i
    raise RuntimeError("identity automorphism missing")


# ---------------------------------------------------------------------------
# case classification
# ---------------------------------------------------------------------------

def classify_case(action: GaloisAction) -> GaloisAction:
    """Tag the action as split / coprime-to-q / q-divides, and in the last
    case normalize the basis so the chosen sigma acts unipotently."""
    q = action.curve.q
    n = action.order()
    if n == 1:
        action.case = "split"
        return action
    if n % q != 0:
        action.case = "coprime-to-q"
        return action
    action.case = "q-divides"
    # elements of order q, deterministic choice by matrix key
    candidates = []
    for i, (el, mat) in enumerate(zip(action.elements, action.matrices)):
        if el.is_identity():
            continue
        if el.order() == q:
            candidates.append((mat, i))
    if not candidates:
        raise NoUnipotentGenerator("q divides the group order but no element of order q found")
    candidates.sort(key=lambda t: t[0])
    mat, idx = candidates[0]
    sigma = action.elements[idx]
    basis = action.basis
    P, Q = basis.P, basis.Q
    # find w with (sigma - 1)w != 0 and det[(sigma-1)w, w] = delta; use sigma^j
    # with j*delta = 1 mod q so the new basis is rho-oriented
    a, b = mat[0]
    c, d = mat[1]
    nmat = ((a - 1) % q, b, c, (d - 1) % q)  # sigma - 1
    w = None
    for wx, wy in itertools.product(range(q), repeat=2):
        ix = (nmat[0] * wx + nmat[1] * wy) % q
        iy = (nmat[2] * wx + nmat[3] * wy) % q
        if ix or iy:
            delta = (ix * wy - iy * wx) % q
            if delta:
                w = (wx, wy)
                break
    if w is None:
        raise NoUnipotentGenerator("sigma - 1 vanished on the module")
    j = pow(delta, -1, q)
    sigma_j = sigma
    mat_j = mat
    for _ in range(j - 1):
        sigma_j = sigma_j.compose(sigma)
        mat_j = _mat_mul(mat_j, mat, q)
    # recompute image under sigma_j - 1
    aj, bj = mat_j[0]
    cj, dj = mat_j[1]
    ix = ((aj - 1) * w[0] + bj * w[1]) % q
    iy = (cj * w[0] + (dj - 1) * w[1]) % q
    new_p = add_points(scalar_mul(ix, P), scalar_mul(iy, Q))
    new_q = add_points(scalar_mul(w[0], P), scalar_mul(w[1], Q))
    e = weil_pairing(new_p, new_q, q)
    if rho_index(e) != 1:
        raise NoUnipotentGenerator("orientation correction failed")
    changed = not (new_p == P and new_q == Q)
    new_basis = TorsionBasis(action.curve, action.field, new_p, new_q, e)
    # sanity: sigma_j(P') = P', sigma_j(Q') = P' + Q'
    if not (sigma_j.apply_point(new_p) == new_p and sigma_j.apply_point(new_q) == add_points(new_p, new_q)):
        raise NoUnipotentGenerator("unipotent normalization failed")
    action.basis = new_basis
    action.basis_changed = changed
    # refresh matrices in the new basis
    mats = [_matrix_of_automorphism(s, new_basis, q) for s in action.elements]
    action.matrices = mats
    action.sigma = sigma_j
    action.sigma_matrix = ((1, 1), (0, 1))
    # fixed field L' of <sigma_j>
    action.subfield = fixed_field_of(action, sigma_j)
    action.kummer_element = kummer_generator(action, sigma_j)
    return action


def fixed_field_of(action: GaloisAction, sigma: FieldAutomorphism) -> SubfieldEmbedding:
    """The fixed field of <sigma> inside L, as an abstract tower over k."""
    q = action.curve.q
    L, k = action.field, action.base
    n = relative_degree(k, L)
    if n == q:
        return SubfieldEmbedding(k, L, None)
    m = n // q
    basis = tower_basis_payloads(L, k)
    rows = []
    for b in basis:
        img = sigma.apply_payload(b)
        diff = L.sub(img, b)
        rows.append(flatten_payload(diff, L, k))
    # kernel of (sigma - 1): coordinates expressed over the tower basis
    mat = [[rows[i][j] for i in range(n)] for j in range(n)]
    fixed_vecs = kernel_basis(mat, k)
    assert len(fixed_vecs) == m, "fixed subspace dimension mismatch"
    from .linalg import unflatten_payload

    candidates = []
    for vec in fixed_vecs:
        candidates.append(unflatten_payload(vec, L, k))
    for extra in list(candidates):
        for other in candidates[:4]:
            candidates.append(L.add(extra, other))
    for payload in candidates:
        elem = FieldElement(L, payload)
        mp = minimal_polynomial(elem, k)
        if mp.degree() == m:
            from .fields import extend_field

            sub = extend_field(k, [FieldElement(k, c) for c in mp.coeffs], "u", check_irreducible=False)
            return SubfieldEmbedding(sub, L, payload)
    raise NoUnipotentGenerator("no primitive element found for the fixed field")


def kummer_generator(action: GaloisAction, sigma: FieldAutomorphism) -> FieldElement:
    """An element l of L with sigma(l) = rho * l, so l^q lies in L'."""
    L = action.field
    q = action.curve.q
    rho = rho_element(L)
    # try tower generators first: sigma(gen)/gen a root of unity
    for lv in levels_between(action.base, L):
        gen = FieldElement(L, embed_payload(lv.gen(), lv, L))
        ratio = sigma(gen) / gen
        try:
            idx = rho_index(ratio)
        except Exception:
            continue
        if idx != 0:
            l = gen if idx == 1 else _resolvent_adjust(gen, sigma, idx, q, rho)
            if l is not None:
                return l
    # Lagrange resolvent over tower basis elements
    basis = tower_basis_payloads(L, action.base)
    rho_inv = rho.inverse()
    for b in basis:
        acc = FieldElement(L, L.zero())
        term = FieldElement(L, b)
        scale = FieldElement(L, L.one())
        cur = term
        for i in range(q):
            acc = acc + scale * cur
            cur = sigma(cur) if i + 1 < q else cur
            scale = scale * rho_inv
        # acc = sum rho^{-i} sigma^i(b); then sigma(acc) = rho * acc
        if not acc.is_zero() and rho_index(sigma(acc) / acc) == 1:
            return acc
    raise NoUnipotentGenerator("no Kummer generator found for the degree-q layer")


def _resolvent_adjust(gen, sigma, idx, q, rho):
    # sigma(gen) = rho^idx * gen: use gen^j with j*idx = 1 mod q
    j = pow(idx, -1, q)
    cand = gen**j
    if rho_index(sigma(cand) / cand) == 1:
        return cand
    return None
