"""Small exact linear algebra over tower fields: coordinates of a tower
over a subfield, Gaussian elimination, kernels, and minimal polynomials."""

from __future__ import annotations

import itertools

from .fields import (
    ExtensionField,
    FieldDescriptor,
    FieldElement,
    embed_payload,
    is_ancestor,
)
from .polys import Poly


def levels_between(sub: FieldDescriptor, field: FieldDescriptor):
    """Extension levels strictly above sub, bottom first."""
    if not is_ancestor(sub, field):
        raise ValueError("fields are not nested")
    out = []
    f = field
    while f is not sub:
        out.append(f)
        f = f.base
    out.reverse()
    return out


def relative_degree(sub: FieldDescriptor, field: FieldDescriptor) -> int:
    d = 1
    for lv in levels_between(sub, field):
        if not isinstance(lv, ExtensionField):
            raise ValueError("non-algebraic level in tower")
        d *= lv.degree
    return d


def flatten_payload(payload, field: FieldDescriptor, sub: FieldDescriptor):
    """Coordinates of a field payload as a vector over sub (tower basis)."""
    if field is sub:
        return [payload]
    assert isinstance(field, ExtensionField)
    out = []
    for c in payload:
        out.extend(flatten_payload(c, field.base, sub))
    return out


def unflatten_payload(vec, field: FieldDescriptor, sub: FieldDescriptor):
    payload, rest = _unflatten(vec, field, sub)
    assert not rest
    return payload


def _unflatten(vec, field, sub):
    if field is sub:
        return vec[0], vec[1:]
    out = []
    rest = vec
    for _ in range(field.degree):
        c, rest = _unflatten(rest, field.base, sub)
        out.append(c)
    return tuple(out), rest


def tower_basis_payloads(field: FieldDescriptor, sub: FieldDescriptor):
    """Payloads (in field) of the product basis of the tower over sub."""
    dims = relative_degree(sub, field)
    basis = []
    for i in range(dims):
        vec = [sub.zero()] * dims
        vec[i] = sub.one()
        basis.append(unflatten_payload(vec, field, sub))
    return basis


def rref(mat, field: FieldDescriptor):
    """Reduced row echelon form in place; returns pivot column list."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not field.is_zero(mat[i][c]):
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = field.inv(mat[r][c])
        mat[r] = [field.mul(inv, x) for x in mat[r]]
        for i in range(rows):
            if i != r and not field.is_zero(mat[i][c]):
                factor = mat[i][c]
                mat[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def kernel_basis(mat, field: FieldDescriptor):
    """Basis of the right kernel of a matrix (list of rows)."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    work = [row[:] for row in mat]
    pivots = rref(work, field)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero()] * cols
        vec[fc] = field.one()
        for r, pc in enumerate(pivots):
            vec[pc] = field.neg(work[r][fc])
        basis.append(vec)
    return basis


def solve_linear(mat, rhs, field: FieldDescriptor):
    """One solution of mat * x = rhs, or None; mat given as list of rows."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    aug = [mat[i][:] + [rhs[i]] for i in range(rows)]
    pivots = rref(aug, field)
    if cols in pivots:
        return None
    x = [field.zero()] * cols
    for r, pc in enumerate(pivots):
        x[pc] = aug[r][cols]
    return x


def minimal_polynomial(elem: FieldElement, sub: FieldDescriptor) -> Poly:
    """Monic minimal polynomial of elem over the subfield sub."""
    field = elem.field
    n = relative_degree(sub, field)
    powers = []
    acc = field.one()
    for _ in range(n + 1):
        powers.append(flatten_payload(acc, field, sub))
        acc = field.mul(acc, elem.payload)
    for deg in range(1, n + 1):
        # solve sum_{i<deg} c_i a^i = -a^deg
        mat = [[powers[i][j] for i in range(deg)] for j in range(n)]
        rhs = [sub.neg(powers[deg][j]) for j in range(n)]
        sol = solve_linear(mat, rhs, sub)
        if sol is not None:
            return Poly(sub, sol + [sub.one()])
    raise RuntimeError("no minimal polynomial found (inconsistent tower data)")


class SubfieldEmbedding:
    """An abstract field together with its embedding into an ambient tower."""

    def __init__(self, abstract: FieldDescriptor, ambient: FieldDescriptor, gen_image=None):
        self.abstract = abstract
        self.ambient = ambient
        self.gen_image = gen_image  # payload of ambient; None for identity-ancestor
        if gen_image is not None:
            base = abstract.base
            self._pull_cache = None

    def push(self, elem: FieldElement) -> FieldElement:
        if self.gen_image is None:
            return FieldElement(self.ambient, embed_payload(elem.payload, elem.field, self.ambient))
        assert elem.field is self.abstract
        amb = self.ambient
        out = amb.zero()
        pw = amb.one()
        for c in elem.payload:
            c_amb = embed_payload(c, self.abstract.base, amb)
            out = amb.add(out, amb.mul(c_amb, pw))
            pw = amb.mul(pw, self.gen_image)
        return FieldElement(amb, out)

    def pull(self, elem: FieldElement):
        """Rewrite an ambient element in the abstract subfield, or None."""
        if self.gen_image is None:
            from .fields import try_descend

            return try_descend(elem, self.abstract)
        amb = self.ambient
        sub = self.abstract.base  # common bottom of both fields
        n = relative_degree(sub, amb)
        d = self.abstract.degree
        cols = []
        pw = amb.one()
        for _ in range(d):
            cols.append(flatten_payload(pw, amb, sub))
            pw = amb.mul(pw, self.gen_image)
        target = flatten_payload(elem.payload if elem.field is amb else embed_payload(elem.payload, elem.field, amb), amb, sub)
        mat = [[cols[i][j] for i in range(d)] for j in range(n)]
        sol = solve_linear(mat, target, sub)
        if sol is None:
            return None
        return FieldElement(self.abstract, tuple(sol))
