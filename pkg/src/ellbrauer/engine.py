"""The cohomological layer made concrete: Kummer pairs, the connecting-map
evaluation formulas, symbol tensors, the inflation generator, restriction
tools, the finite-quotient cocycle oracle, and the presentation builders
for the split, coprime, and q-divides cases."""

from __future__ import annotations

import itertools

from .corestriction import (
    CyclicStep,
    FunctionFieldDescriptor,
    corestrict_fn_symbol,
    tower_steps,
)
from .curves import Curve, Point, add_points, lift_point, mult_by_q_map, scalar_mul
from .errors import (
    IncompleteMWData,
    NotFiniteQuotient,
    PoleAtEvaluation,
    WrongCase,
)
from .factor import adjoin_root, roots_in_field
from .fields import (
    FieldDescriptor,
    FieldElement,
    embed,
    is_qth_power,
    rho_element,
    rho_index,
)
from .funcfield import (
    POLE,
    CertifiedFunction,
    CurveFunction,
    Divisor,
    function_with_divisor,
    weil_pairing,
)
from .linalg import SubfieldEmbedding, tower_basis_payloads
from .polys import Poly
from .torsion import GaloisAction, TorsionBasis, identity_automorphism


# ---------------------------------------------------------------------------
# Kummer pairs
# ---------------------------------------------------------------------------

class KummerPair:
    """(a, b) in K^x/(K^x)^q squared; equality is tested modulo q-th powers."""

    __slots__ = ("field", "a", "b", "q")

    def __init__(self, a: FieldElement, b: FieldElement, q: int):
        self.a = a
        self.b = b
        self.field = a.field
        self.q = q

    def is_trivial(self) -> bool:
        return class_is_trivial(self.a, self.q) and class_is_trivial(self.b, self.q)

    def mul(self, other: "KummerPair") -> "KummerPair":
        return KummerPair(self.a * other.a, self.b * other.b, self.q)

    def equivalent(self, other: "KummerPair") -> bool:
        a1, a2 = self.a._pair(other.a)
        b1, b2 = self.b._pair(other.b)
        return class_is_trivial(a1 / a2, self.q) and class_is_trivial(b1 / b2, self.q)

    def __repr__(self):
        return f"({self.a!r}, {self.b!r})"


def class_is_trivial(a: FieldElement, q: int) -> bool:
    return is_qth_power(a, q) is not None


def classes_equal(a: FieldElement, b: FieldElement, q: int) -> bool:
    x, y = a._pair(b)
    return class_is_trivial(x / y, q)


# ---------------------------------------------------------------------------
# symbols and tensors
# ---------------------------------------------------------------------------

class FreeParameter:
    """A symbolic coefficient slot ranging over a stated parameter field."""

    __slots__ = ("name", "field_label", "constraint")

    def __init__(self, name: str, field_label: str, constraint: str | None = None):
        self.name = name
        self.field_label = field_label
        self.constraint = constraint

    def __repr__(self):
        base = f"{self.name} in {self.field_label}"
        return f"<{base}; {self.constraint}>" if self.constraint else f"<{base}>"


class Symbol:
    """A single symbol algebra slot pair (coeff, func) over field(E)."""

    __slots__ = ("coeff", "func", "field", "label", "cor_pending")

    def __init__(self, coeff, func, field: FieldDescriptor, label: str, cor_pending=0):
        self.coeff = coeff  # FieldElement | FreeParameter | CurveFunction
        self.func = func  # CurveFunction | FieldElement
        self.field = field
        self.label = label  # display tag like "k(E)" or "L(E)"
        self.cor_pending = cor_pending  # formal Cor-wrapper depth for templates

    def is_template(self) -> bool:
        return isinstance(self.coeff, FreeParameter)

    def coeff_function(self, curve: Curve) -> CurveFunction:
        if isinstance(self.coeff, CurveFunction):
            return self.coeff
        return CurveFunction.constant(curve, self.coeff)

    def func_function(self, curve: Curve) -> CurveFunction:
        if isinstance(self.func, CurveFunction):
            return self.func
        return CurveFunction.constant(curve, self.func)

    def __repr__(self):
        wrap = "Cor" * self.cor_pending
        inner = f"({self.coeff!r}, {self.func!r})_{{{self.label}}}"
        return f"{wrap}{inner}" if wrap else inner


class SymbolTensor:
    """Ordered tensor product of symbols; order is preserved."""

    __slots__ = ("terms", "q")

    def __init__(self, terms, q: int):
        self.terms = list(terms)
        self.q = q

    def is_empty(self) -> bool:
        return not self.terms

    def length(self) -> int:
        return len(self.terms)

    def tensor(self, other: "SymbolTensor") -> "SymbolTensor":
        return SymbolTensor(self.terms + other.terms, self.q)

    def assert_length_bound(self):
        bound = 2 * (self.q - 1) * (self.q + 1)
        if self.length() > bound:
            raise WrongCase(
                f"tensor length {self.length()} exceeds the symbol-length bound {bound}"
            )
        return self

    def __repr__(self):
        if not self.terms:
            return "1 (trivial class)"
        return " (x) ".join(repr(t) for t in self.terms)


# ---------------------------------------------------------------------------
# the connecting map, evaluated
# ---------------------------------------------------------------------------

def _eval_or_raise(fn: CurveFunction, p: Point) -> FieldElement:
    val = fn.evaluate(p)
    if val is POLE or val.is_zero():
        raise PoleAtEvaluation(f"evaluation degenerate at {p!r}")
    return val


def kummer_delta(R: Point, tP: CertifiedFunction, tQ: CertifiedFunction, basis: TorsionBasis) -> KummerPair:
    """phi^{-1} . delta(R) via the four-case evaluation formula."""
    q = basis.curve.q
    field = basis.field
    P, Q = basis.P, basis.Q
    one = FieldElement(field, field.one())
    tp = tP.t if tP.t.field is field else tP.t.map_field(field)
    tq = tQ.t if tQ.t.field is field else tQ.t.map_field(field)
    if R.infinity:
        return KummerPair(one, one, q)
    R = lift_point(R, field) if R.field is not field else R
    PQ = add_points(P, Q)
    if R == P:
        a = _eval_or_raise(tq, P)
        b = _eval_or_raise(tp, PQ) / _eval_or_raise(tp, Q)
        return KummerPair(a, b, q)
    if R == Q:
        a = _eval_or_raise(tq, PQ) / _eval_or_raise(tq, P)
        b = _eval_or_raise(tp, Q)
        return KummerPair(a, b, q)
    return KummerPair(_eval_or_raise(tq, R), _eval_or_raise(tp, R), q)


def epsilon_to_symbols(pair: KummerPair, tP: CertifiedFunction, tQ: CertifiedFunction, label: str) -> SymbolTensor:
    """The two-term tensor (a, t_P) (x) (b, t_Q); trivial slots are dropped."""
    q = pair.q
    terms = []
    if not class_is_trivial(pair.a, q):
        terms.append(Symbol(pair.a, tP.t, pair.field, label))
    if not class_is_trivial(pair.b, q):
        terms.append(Symbol(pair.b, tQ.t, pair.field, label))
    return SymbolTensor(terms, q).assert_length_bound()


# ---------------------------------------------------------------------------
# the norm function n_Q and the inflation generator
# ---------------------------------------------------------------------------

def build_nQ(action: GaloisAction, tQ: CertifiedFunction) -> CurveFunction:
    """The function with divisor sum_i (iP + Q) - q(0), scaled so that its
    q-th power is the norm of t_Q down the degree-q layer; exact identity."""
    if action.case != "q-divides":
        raise WrongCase("n_Q only exists in the q-divides case")
    q = action.curve.q
    basis = action.basis
    L = action.field
    d = Divisor(action.curve, L)
    for i in range(q):
        d.add(add_points(scalar_mul(i, basis.P), basis.Q), 1)
    d.add(action.curve.infinity(L), -q)
    n_q = function_with_divisor(d)
    # exactness: n_Q^q equals the product of the sigma-conjugates of t_Q
    sigma = action.sigma
    conj = tQ.t if tQ.t.field is L else tQ.t.map_field(L)
    norm = conj
    for _ in range(q - 1):
        conj = conj.map_coefficients(lambda c: sigma.apply_payload(c))
        norm = norm * conj
    if n_q**q != norm:
        raise WrongCase("norm identity for n_Q failed (internal inconsistency)")
    return n_q


def inflation_generator(action: GaloisAction, n_q: CurveFunction, quotient_nontrivial, mw_complete: bool):
    """The symbol (l^q, n_Q) over L'(E), with its triviality flag."""
    if action.case != "q-divides":
        raise WrongCase("inflation generator only exists in the q-divides case")
    q = action.curve.q
    l = action.kummer_element
    lq = l**q
    emb = action.subfield
    lq_low = emb.pull(lq)
    if lq_low is None:
        raise WrongCase("l^q does not lie in the fixed field")
    n_low = _pull_function(n_q, emb)
    if n_low is None:
        raise WrongCase("n_Q does not descend to the fixed field")
    label = "L'(E)" if emb.gen_image is not None else f"{emb.abstract.describe()}(E)"
    sym = Symbol(lq_low, n_low, emb.abstract, label)
    flags = []
    if not mw_complete:
        flags.append("quotient-test-incomplete-mw")
    return sym, bool(quotient_nontrivial), flags


def _pull_function(fn: CurveFunction, emb: SubfieldEmbedding):
    if emb.gen_image is None:
        return fn.try_descend(emb.abstract)
    out = []
    for poly in (fn.u, fn.v, fn.w):
        cs = []
        for c in poly.coeffs:
            low = emb.pull(FieldElement(fn.field, c))
            if low is None:
                return None
            cs.append(low.payload)
        out.append(Poly(emb.abstract, cs, normalize=False))
    return CurveFunction(fn.curve, emb.abstract, out[0], out[1], out[2], canonical=True)


def _push_function(fn: CurveFunction, emb: SubfieldEmbedding) -> CurveFunction:
    if emb.gen_image is None:
        return fn.map_field(emb.ambient)
    out = []
    for poly in (fn.u, fn.v, fn.w):
        cs = [emb.push(FieldElement(fn.field, c)).payload for c in poly.coeffs]
        out.append(Poly(emb.ambient, cs, normalize=False))
    return CurveFunction(fn.curve, emb.ambient, out[0], out[1], out[2], canonical=True)


# ---------------------------------------------------------------------------
# membership of a base point in [q] of the larger Mordell-Weil group
# ---------------------------------------------------------------------------

def point_divisible_over(point: Point, q: int, field: FieldDescriptor) -> bool:
    """Is the point in [q]E(field)?  Exact fiber test by factorization."""
    curve = point.curve
    xi_num, xi_den, ups_num, ups_den = mult_by_q_map(curve, q, field)
    x_target = embed(point.x, field)
    theta = xi_num - xi_den.scale(x_target)
    rhs = curve.rhs_poly(field)
    for x0 in roots_in_field(field, theta):
        y2 = rhs.evaluate(x0)
        ys = roots_in_field(field, Poly(field, [field.neg(y2), field.zero(), field.one()]))
        for y0 in ys:
            cand = Point(curve, field, FieldElement(field, x0), FieldElement(field, y0))
            if scalar_mul(q, cand) == lift_point(point, field):
                return True
    return False


def divisibility_quotient_nontrivial(base_reps, q: int, L: FieldDescriptor, base_field: FieldDescriptor):
    """Whether (E(k) cap [q]E(L)) / [q]E(k) is nontrivial, from coset reps
    of E(k)/[q]E(k)."""
    for r in base_reps:
        if r.infinity:
            continue
        if point_divisible_over(r, q, base_field):
            continue  # trivial class, not a witness
        if point_divisible_over(r, q, L):
            return True
    return False


def finite_mw_reps_via_delta(curve: Curve, field: FieldDescriptor, basis: TorsionBasis, tP, tQ):
    """Coset representatives of E(F)/[q]E(F) over a finite field containing
    the full torsion, collected by deduplicating connecting-map images.

    The connecting map is injective on E/[q]E and the target has exactly
    q^2 classes when the q-torsion is rational, so collection stops as soon
    as q^2 distinct classes are seen.
    """
    q = curve.q
    want = q * q
    reps = [curve.infinity(field)]
    pairs = [kummer_delta(reps[0], tP, tQ, basis)]
    from .funcfield import torsion_span

    candidates = iter_point_stream(curve, field, basis)
    for cand in candidates:
        pair = kummer_delta(cand, tP, tQ, basis)
        if any(pair.equivalent(p) for p in pairs):
            continue
        reps.append(cand)
        pairs.append(pair)
        if len(reps) == want:
            break
    else:
        raise IncompleteMWData(
            f"class collection found {len(reps)} of {want} classes before the stream ended"
        )
    return reps


def iter_point_stream(curve: Curve, field: FieldDescriptor, basis: TorsionBasis):
    """Deterministic stream of points over a finite field: the torsion
    module first, then points found by solving for y over increasing x."""
    from .funcfield import torsion_span

    for t in torsion_span(lift_point(basis.P, field), lift_point(basis.Q, field), curve.q):
        if not t.infinity:
            yield t
    rhs = curve.rhs_poly(field)
    count = 0
    for x_payload in field.elements():
        count += 1
        if count > 200000:
            return
        y2 = rhs.evaluate(x_payload)
        if field.is_zero(y2):
            yield Point(curve, field, FieldElement(field, x_payload), FieldElement(field, field.zero()))
            continue
        y = _finite_sqrt(field, y2)
        if y is None:
            continue
        yield Point(curve, field, FieldElement(field, x_payload), FieldElement(field, y))
        yield Point(curve, field, FieldElement(field, x_payload), FieldElement(field, field.neg(y)))


def _finite_sqrt(field: FieldDescriptor, a):
    """Square root in an odd-order finite field (Tonelli-Shanks on payloads)."""
    order = field.order()
    if not field.is_zero(field.sub(field.pow(a, (order - 1) // 2), field.one())):
        return None
    if order % 4 == 3:
        return field.pow(a, (order + 1) // 4)
    # Tonelli-Shanks
    s, t = 0, order - 1
    while t % 2 == 0:
        s += 1
        t //= 2
    # find a non-residue deterministically
    z = None
    for payload in field.elements():
        if field.is_zero(payload):
            continue
        test = field.pow(payload, (order - 1) // 2)
        if not field.is_zero(field.sub(test, field.one())):
            z = payload
            break
    if z is None:
        return None
    m = s
    c = field.pow(z, t)
    u = field.pow(a, t)
    r = field.pow(a, (t + 1) // 2)
    one = field.one()
    while not field.is_zero(field.sub(u, one)):
        i = 0
        probe = u
        while not field.is_zero(field.sub(probe, one)):
            probe = field.mul(probe, probe)
            i += 1
            if i == m:
                return None
        b = c
        for _ in range(m - i - 1):
            b = field.mul(b, b)
        m = i
        c = field.mul(b, b)
        u = field.mul(u, c)
        r = field.mul(r, b)
    return r


# ---------------------------------------------------------------------------
# restriction tools (fixed set and restriction image)
# ---------------------------------------------------------------------------

def fixed_set_check(pair: KummerPair, action: GaloisAction):
    """Is the pair fixed by the degree-q layer, i.e. of the form
    (a, a/sigma(a)) with sigma(a)^2 = sigma^2(a) a mod q-th powers?"""
    if action.case != "q-divides":
        raise WrongCase("fixed-set check belongs to the q-divides case")
    q = pair.q
    sigma = action.sigma
    a = pair.a if pair.a.field is action.field else embed(pair.a, action.field)
    b = pair.b if pair.b.field is action.field else embed(pair.b, action.field)
    sa = sigma(a)
    cond1 = classes_equal(b * sa, a, q)  # b = a/sigma(a)
    cond2 = classes_equal(sa * sa, sigma(sa) * a, q)
    witness = {"b_matches": cond1, "twist_condition": cond2}
    return cond1 and cond2, witness


def restriction_image_check(pair: KummerPair, action: GaloisAction):
    """Is the pair equivalent to (c, 1) with c from the base field?"""
    if action.case != "q-divides":
        raise WrongCase("restriction-image check belongs to the q-divides case")
    q = pair.q
    b_trivial = class_is_trivial(pair.b, q)
    if not b_trivial:
        return False, {"b_trivial": False}
    c = descend_class_representative(pair.a, action)
    return c is not None, {"b_trivial": True, "base_representative": c}


def descend_class_representative(a: FieldElement, action: GaloisAction):
    """A base-field representative of the class of a mod (L^x)^q, or None.

    Existence is decided constructively: sigma-invariance of the class,
    vanishing of the norm obstruction in mu_q, then a Hilbert-90 resolvent.
    """
    q = action.curve.q
    L = action.field
    emb = action.subfield
    base = emb.abstract
    a = a if a.field is L else embed(a, L)
    direct = emb.pull(a)
    if direct is not None:
        return direct
    sigma = action.sigma
    ratio = sigma(a) / a
    w = is_qth_power(ratio, q)
    if w is None:
        return None
    # norm obstruction: N(w) must be 1 in mu_q for a descent to exist
    nw = w
    acc = w
    for _ in range(q - 1):
        acc = sigma(acc)
        nw = nw * acc
    if not (nw - 1).is_zero():
        return None
    # Hilbert 90: v with w = v / sigma(v), via the twisted resolvent
    v = _hilbert90(w, sigma, q, L)
    if v is None:
        return None
    cand = a * v**q
    low = emb.pull(cand)
    return low


def _hilbert90(w: FieldElement, sigma, q: int, L: FieldDescriptor):
    """v with v/sigma(v) = w, for N(w) = 1 over the cyclic degree-q layer.

    The twisted resolvent v = sum_i w_i sigma^i(theta) with
    w_i = w sigma(w) ... sigma^{i-1}(w) works for any theta keeping v != 0.
    """
    weights = [FieldElement(L, L.one()), w]
    acc, cur = w, w
    for _ in range(2, q):
        cur = sigma(cur)
        acc = acc * cur
        weights.append(acc)
    for theta_payload in tower_basis_payloads(L, L.tower()[0]):
        theta = FieldElement(L, theta_payload)
        v = FieldElement(L, L.zero())
        term = theta
        for i in range(q):
            v = v + weights[i] * term
            term = sigma(term)
        if not v.is_zero() and (v / sigma(v) - w).is_zero():
            return v
    return None


# ---------------------------------------------------------------------------
# the finite-quotient cocycle oracle
# ---------------------------------------------------------------------------

class FiniteCyclicQuotient:
    """Gal(F'/F) for finite fields: cyclic, generated by the base Frobenius."""

    def __init__(self, base: FieldDescriptor, top: FieldDescriptor):
        if not (base.is_finite() and top.is_finite()):
            raise NotFiniteQuotient("finite fields required")
        from .linalg import relative_degree

        self.base = base
        self.top = top
        self.order = relative_degree(base, top)
        self.frob_exp = base.order()

    def apply(self, i: int, elem: FieldElement) -> FieldElement:
        """The i-th power of Frobenius."""
        return FieldElement(self.top, self.top.pow(elem.payload, self.frob_exp**(i % self.order)))


def symbol_cocycle_oracle(a: FieldElement, b: FieldElement, quotient: FiniteCyclicQuotient):
    """Both cocycle tables for the symbol (a, b) and the coboundary linking
    them: returns (standard_table, pairing_table, coboundary_table).

    standard[(i,j)] = a^{[chi(i)+chi(j) >= q]} with chi the b-character;
    pairing[(i,j)]  = rho^{-alpha(i) chi(j)} = e(alpha(i) P, chi(j) Q)^{-1};
    coboundary dg from g(i) = root_a^{chi(i)}; standard = pairing * dg.
    """
    q = quotient.base.q
    top = quotient.top
    rho = rho_element(top)
    alpha = _qth_root_in(a, top, q)
    beta = _qth_root_in(b, top, q)
    n = quotient.order
    chi = []
    alph = []
    for i in range(n):
        chi.append(rho_index(quotient.apply(i, beta) / beta))
        alph.append(rho_index(quotient.apply(i, alpha) / alpha))
    a_top = embed(a, top) if a.field is not top else a
    one = FieldElement(top, top.one())
    standard = {}
    pairing = {}
    g = {i: alpha ** chi[i] for i in range(n)}
    coboundary = {}
    for i in range(n):
        for j in range(n):
            standard[(i, j)] = a_top if chi[i] + chi[j] >= q else one
            pairing[(i, j)] = rho ** ((-alph[i] * chi[j]) % q)
            coboundary[(i, j)] = quotient.apply(i, g[j]) * g[i] / g[(i + j) % n]
    return standard, pairing, coboundary


def _qth_root_in(a: FieldElement, top: FieldDescriptor, q: int) -> FieldElement:
    lifted = embed(a, top) if a.field is not top else a
    r = is_qth_power(lifted, q)
    if r is None:
        raise NotFiniteQuotient("quotient field does not contain the q-th root")
    return r


def cocycle_is_closed(table, quotient: FiniteCyclicQuotient) -> bool:
    """The multiplicative 2-cocycle identity, checked on all triples."""
    n = quotient.order
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = table[(i, j)] * table[((i + j) % n, k)]
                rhs = quotient.apply(i, table[(j, k)]) * table[(i, (j + k) % n)]
                if lhs != rhs:
                    return False
    return True


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

class Presentation:
    __slots__ = (
        "case",
        "decomposition",
        "generators",
        "relations",
        "caveats",
        "mw_provenance",
        "notes",
    )

    def __init__(self, case: str, generators, relations, caveats, mw_provenance, notes=None):
        self.case = case
        self.decomposition = "Br(E)[q] = Br(k)[q] + I"
        self.generators = generators
        self.relations = relations
        self.caveats = caveats
        self.mw_provenance = mw_provenance
        self.notes = notes or []

    def __repr__(self):
        lines = [f"case: {self.case}", self.decomposition, "generators:"]
        for g in self.generators:
            lines.append(f"  {g!r}")
        lines.append("relations:")
        for r in self.relations:
            lines.append(f"  {r['tensor']!r}")
        for c in self.caveats:
            lines.append(f"caveat: {c}")
        return "\n".join(lines)


def _relation_entries(reps, tP, tQ, basis, label):
    out = []
    for R in reps:
        pair = kummer_delta(R, tP, tQ, basis)
        tensor = epsilon_to_symbols(pair, tP, tQ, label)
        out.append({"point": R, "pair": pair, "tensor": tensor})
    return out


def presentation_split(curve: Curve, basis: TorsionBasis, tP, tQ, mw_reps, mw_tag) -> Presentation:
    q = curve.q
    label = "k(E)"
    gens = [
        SymbolTensor(
            [
                Symbol(FreeParameter("a", "k^x/(k^x)^q"), tP.t, basis.field, label),
                Symbol(FreeParameter("b", "k^x/(k^x)^q"), tQ.t, basis.field, label),
            ],
            q,
        )
    ]
    relations = _relation_entries(mw_reps, tP, tQ, basis, label)
    caveats = []
    if mw_tag not in ("exhaustive", "verified-supplied"):
        caveats.append(f"relations relative to {mw_tag} Mordell-Weil data (lower bound)")
    return Presentation("split", gens, relations, caveats, mw_tag)


def _corestrict_symbol_obj(sym: Symbol, steps, curve: Curve) -> list[Symbol]:
    """Corestrict a concrete symbol down a chain of cyclic steps."""
    work = [(sym.coeff_function(curve), sym.func_function(curve))]
    field = None
    for step in steps:
        out = []
        for s1, s2 in work:
            out.extend(corestrict_fn_symbol((s1, s2), step))
        work = out
        field = step.lower
    result = []
    label = f"{field.describe()}(E)" if field is not None else sym.label
    for s1, s2 in work:
        c = s1.constant_value() if s1.is_constant() else s1
        f = s2
        result.append(Symbol(c, f, field, label))
    return result


def presentation_coprime(curve: Curve, basis: TorsionBasis, action: GaloisAction, tP, tQ, mw_k_reps, mw_tag) -> Presentation:
    """Generators are corestricted templates; the relation list collects the
    corestricted connecting-map images of the base-field point classes
    (restriction followed by corestriction is multiplication by [L:k],
    an isomorphism on q-torsion here)."""
    if action.case != "coprime-to-q":
        raise WrongCase(f"case is {action.case}")
    q = curve.q
    L = action.field
    k = action.base
    label_L = "L(E)"
    gens = [
        SymbolTensor(
            [
                Symbol(
                    FreeParameter("a", "L^x, norm-one twisted representatives", "N_{L/k}(a) = 1"),
                    tP.t,
                    L,
                    label_L,
                    cor_pending=1,
                ),
                Symbol(
                    FreeParameter("b", "L^x, norm-one twisted representatives", "N_{L/k}(b) = 1"),
                    tQ.t,
                    L,
                    label_L,
                    cor_pending=1,
                ),
            ],
            q,
        )
    ]
    steps = tower_steps(k, L)
    relations = []
    lifted = [lift_point(S, L) for S in mw_k_reps]
    base_entries = _relation_entries(lifted, tP, tQ, basis, label_L)
    for entry in base_entries:
        cor_terms = []
        for sym in entry["tensor"].terms:
            cor_terms.extend(_corestrict_symbol_obj(sym, steps, curve))
        tensor = SymbolTensor(cor_terms, q).assert_length_bound()
        relations.append(
            {
                "point": entry["point"],
                "pair": entry["pair"],
                "tensor": tensor,
                "restricted_tensor": entry["tensor"],
            }
        )
    # the module-level relation set over L (the two basis bullets), kept as
    # metadata: their corestrictions may pick up corestriction-kernel noise
    notes = []
    for name, R in (("P", basis.P), ("Q", basis.Q)):
        pair = kummer_delta(R, tP, tQ, basis)
        notes.append(f"L-level relation at {name}: {pair!r}")
    caveats = ["corestriction kernel may introduce further relations (not decided)"]
    if mw_tag not in ("exhaustive", "verified-supplied"):
        caveats.append(f"relations relative to {mw_tag} Mordell-Weil data (lower bound)")
    return Presentation("coprime-to-q", gens, relations, caveats, mw_tag, notes)


def presentation_q_divides(
    curve: Curve,
    basis: TorsionBasis,
    action: GaloisAction,
    tP,
    tQ,
    n_q: CurveFunction,
    mw_k_reps,
    mw_k_tag,
    mw_L_reps,
    mw_L_tag,
    mw_complete: bool = True,
    lenient: bool = False,
) -> Presentation:
    if action.case != "q-divides":
        raise WrongCase(f"case is {action.case}")
    q = curve.q
    L = action.field
    k = action.base
    emb = action.subfield
    sub = emb.abstract
    sub_is_base = emb.gen_image is None and sub is k
    label_sub = "k(E)" if sub_is_base else "L'(E)"
    # quotient (E(k) cap [q]E(L)) / [q]E(k)
    if mw_k_reps is None:
        if not lenient:
            raise IncompleteMWData("base Mordell-Weil data required for the quotient test")
        quotient_nontrivial = None
    else:
        quotient_nontrivial = divisibility_quotient_nontrivial(mw_k_reps, q, L, k)
    infl_sym, infl_trivial_flag, infl_flags = inflation_generator(
        action, n_q, quotient_nontrivial, mw_complete
    )
    tp_sub = _pull_function(tP.t if tP.t.field is L else tP.t.map_field(L), emb)
    if tp_sub is None:
        raise WrongCase("t_P does not descend to the fixed field")
    gens = [
        SymbolTensor([Symbol(infl_sym.coeff, infl_sym.func, sub, label_sub)], q),
        SymbolTensor(
            [Symbol(FreeParameter("a", f"{sub.describe()}^x"), tp_sub, sub, label_sub)], q
        ),
    ]
    # relations from restriction: preimages of the L-level delta images
    relations = []
    base_entries = _relation_entries(mw_L_reps, tP, tQ, basis, "L(E)")
    for entry in base_entries:
        pair = entry["pair"]
        if not class_is_trivial(pair.b, q):
            relations.append(
                {
                    "point": entry["point"],
                    "pair": pair,
                    "tensor": None,
                    "note": "no pure (a, t_P) preimage (second slot nontrivial)",
                }
            )
            continue
        rep = descend_class_representative(pair.a, action)
        if rep is None:
            relations.append(
                {
                    "point": entry["point"],
                    "pair": pair,
                    "tensor": None,
                    "note": "class not in the restriction image",
                }
            )
            continue
        rep_in_L = emb.push(rep)
        if class_is_trivial(rep_in_L, q):
            tensor = SymbolTensor([], q)
        else:
            tensor = SymbolTensor([Symbol(rep, tp_sub, sub, label_sub)], q)
        relations.append({"point": entry["point"], "pair": pair, "tensor": tensor})
    if quotient_nontrivial:
        relations.append(
            {
                "point": None,
                "pair": None,
                "tensor": SymbolTensor([Symbol(infl_sym.coeff, infl_sym.func, sub, label_sub)], q),
                "note": "inflation relation: the divisibility quotient is nontrivial",
            }
        )
    caveats = list(infl_flags)
    if not sub_is_base:
        # corestrict generators and relations down L'(E) -> k(E)
        steps = tower_steps(k, sub)
        new_relations = []
        for entry in relations:
            if entry.get("tensor") is None or entry["tensor"].is_empty():
                new_relations.append(entry)
                continue
            cor_terms = []
            for sym in entry["tensor"].terms:
                cor_terms.extend(_corestrict_symbol_obj(sym, steps, curve))
            entry = dict(entry)
            entry["restricted_tensor"] = entry["tensor"]
            entry["tensor"] = SymbolTensor(cor_terms, q).assert_length_bound()
            new_relations.append(entry)
        relations = new_relations
        gens_out = []
        infl_cor = _corestrict_symbol_obj(infl_sym, steps, curve)
        gens_out.append(SymbolTensor(infl_cor, q).assert_length_bound())
        gens_out.append(
            SymbolTensor(
                [
                    Symbol(
                        FreeParameter("a", f"{sub.describe()}^x"),
                        tp_sub,
                        sub,
                        label_sub,
                        cor_pending=1,
                    )
                ],
                q,
            )
        )
        gens = gens_out
        caveats.append("corestriction kernel may introduce further relations (not decided)")
    notes = []
    notes.append(f"inflation generator trivial-as-class: {infl_trivial_flag}")
    pres = Presentation("q-divides", gens, relations, caveats, {"k": mw_k_tag, "L": mw_L_tag}, notes)
    return pres
