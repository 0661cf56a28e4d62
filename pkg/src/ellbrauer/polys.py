"""Dense univariate polynomials over a FieldDescriptor.

Coefficients are raw payloads of the owning field, lowest degree first,
with no trailing zeros (the zero polynomial has an empty tuple).
"""

from __future__ import annotations

from .fields import (
    FieldDescriptor,
    FieldElement,
    _poly_add,
    _poly_divmod,
    _poly_gcd,
    _poly_mul,
    _poly_sub,
    _trim,
    embed_payload,
    is_ancestor,
)


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs, normalize=True):
        self.field = field
        cs = list(coeffs)
        if normalize:
            cs = _trim(cs, field)
        self.coeffs = tuple(cs)

    # -- constructors ---------------------------------------------------
    @staticmethod
    def from_elements(field, elements) -> "Poly":
        out = []
        for e in elements:
            if isinstance(e, FieldElement):
                if e.field is field:
                    out.append(e.payload)
                elif is_ancestor(e.field, field):
                    out.append(embed_payload(e.payload, e.field, field))
                else:
                    raise ValueError("coefficient from unrelated field")
            elif isinstance(e, int):
                out.append(field.from_int(e))
            else:
                out.append(e)
        return Poly(field, out)

    @staticmethod
    def constant(field, c) -> "Poly":
        if isinstance(c, FieldElement):
            c = c.payload if c.field is field else embed_payload(c.payload, c.field, field)
        elif isinstance(c, int):
            c = field.from_int(c)
        return Poly(field, [c])

    @staticmethod
    def x(field) -> "Poly":
        return Poly(field, [field.zero(), field.one()])

    @staticmethod
    def zero(field) -> "Poly":
        return Poly(field, [])

    @staticmethod
    def one(field) -> "Poly":
        return Poly(field, [field.one()])

    # -- basics ----------------------------------------------------------
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        f = self.field
        return len(self.coeffs) == 1 and f.is_zero(f.sub(self.coeffs[0], f.one()))

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self):
        if not self.coeffs:
            return self.field.zero()
        return self.coeffs[-1]

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else self.field.zero()

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if self.field is not other.field:
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        f = self.field
        return all(f.is_zero(f.sub(a, b)) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.field.uid, tuple(self.field.key(c) for c in self.coeffs)))

    def key(self):
        return (len(self.coeffs), tuple(self.field.key(c) for c in self.coeffs))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        return Poly(self.field, _poly_add(list(self.coeffs), list(other.coeffs), self.field))

    def __sub__(self, other):
        return Poly(self.field, _poly_sub(list(self.coeffs), list(other.coeffs), self.field))

    def __neg__(self):
        f = self.field
        return Poly(f, [f.neg(c) for c in self.coeffs], normalize=False)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(self.field, _poly_mul(list(self.coeffs), list(other.coeffs), self.field))
        return self.scale(other)

    def scale(self, c):
        f = self.field
        if isinstance(c, FieldElement):
            c = c.payload if c.field is f else embed_payload(c.payload, c.field, f)
        elif isinstance(c, int):
            c = f.from_int(c)
        if f.is_zero(c):
            return Poly(f, [])
        return Poly(f, [f.mul(c, x) for x in self.coeffs], normalize=False)

    def __divmod__(self, other):
        q, r = _poly_divmod(list(self.coeffs), list(other.coeffs), self.field)
        return Poly(self.field, q, normalize=False), Poly(self.field, r, normalize=False)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, n: int):
        result = Poly.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def pow_mod(self, n: int, modulus: "Poly") -> "Poly":
        result = Poly.one(self.field) % modulus
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return result

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        f = self.field
        lc = self.coeffs[-1]
        if f.is_zero(f.sub(lc, f.one())):
            return self
        inv = f.inv(lc)
        return Poly(f, [f.mul(inv, c) for c in self.coeffs], normalize=False)

    def gcd(self, other: "Poly") -> "Poly":
        return Poly(self.field, _poly_gcd(list(self.coeffs), list(other.coeffs), self.field), normalize=False)

    def derivative(self) -> "Poly":
        f = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            out.append(f.mul(f.from_int(i), self.coeffs[i]))
        return Poly(f, out)

    def evaluate(self, x):
        """Evaluate at a payload (or FieldElement) of the same field."""
        f = self.field
        if isinstance(x, FieldElement):
            x = x.payload if x.field is f else embed_payload(x.payload, x.field, f)
        acc = f.zero()
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def evaluate_elem(self, x) -> FieldElement:
        return FieldElement(self.field, self.evaluate(x))

    def shift(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if self.is_zero():
            return self
        f = self.field
        return Poly(f, (f.zero(),) * k + self.coeffs, normalize=False)

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * other + Poly(self.field, [c])
        return acc

    def squarefree_part(self) -> "Poly":
        d = self.derivative()
        if d.is_zero():
            # char p with all exponents divisible by p; desk-scale inputs
            # never hit this for the polynomials we factor
            raise ValueError("polynomial is a p-th power; not supported")
        return (self // self.gcd(d)).monic()

    def map_field(self, dst: FieldDescriptor) -> "Poly":
        """Re-tag coefficients into an extension field dst."""
        return Poly(dst, [embed_payload(c, self.field, dst) for c in self.coeffs], normalize=False)

    def map_coeffs(self, fn, dst: FieldDescriptor | None = None) -> "Poly":
        dst = dst or self.field
        return Poly(dst, [fn(c) for c in self.coeffs])

    def __repr__(self):
        from .fields import _format_polystr

        return _format_polystr(self.field, self.coeffs, "x")


def resultant(a: Poly, b: Poly):
    """Resultant of two polynomials over a field, as a payload."""
    f = a.field
    if a.is_zero() or b.is_zero():
        return f.zero()
    res = f.one()
    a = Poly(f, a.coeffs)
    b = Poly(f, b.coeffs)
    while True:
        da, db = a.degree(), b.degree()
        if db == 0:
            return f.mul(res, f.pow(b.coeffs[0], da))
        r = a % b
        if r.is_zero():
            return f.zero()
        dr = r.degree()
        lc = b.leading()
        res = f.mul(res, f.pow(lc, da - dr))
        if (da * db) % 2 == 1:
            res = f.neg(res)
        a, b = b, r
