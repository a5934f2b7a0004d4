"""CM types of quartic CM fields, reflex pairs and type norms.

A quartic CM field is K = Q[x]/(x^4 + A x^2 + B) with roots i y1, -i y1,
i y2, -i y2 (y1 > y2 > 0).  Writing a = i y1 and b = i y2, the sum
a + b is a root of x^4 + 2A x^2 + (A^2 - 4B), which after removing square
factors p (p^2 | 2A, p^4 | A^2 - 4B) defines the reflex field.  Its type
norm sends y to the product of y over the two embeddings taking the reflex
generator to (a + b)/p and (a - b)/p; the product is fixed by the
automorphism of the Galois closure that fixes a, so it lies in K.  Type
norms are computed numerically, reconstructed exactly and then certified by
exact identities, so the Galois closure is never built.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import mpmath

from .ideals import Ideal, PrimeIdeal, factor_ideal
from .nfield import CMField, FieldElem, FieldError, NumberField, element_from_embeddings, is_square

CYCLIC, DIHEDRAL, BIQUADRATIC = "cyclic", "dihedral", "biquadratic"
MAX_PREC = 4096


class NonPrimitiveError(FieldError):
    """Raised for CM types that are induced from an imaginary quadratic subfield."""


def _square_free_part(n: int) -> int:
    """n divided by its largest square factor (n > 0)."""
    from .nfield import factor_integer
    out = 1
    for p, e in factor_integer(n).items():
        if e % 2:
            out *= p
    return out


def _galois_exact(a: int, b: int) -> str:
    if is_square(b):
        return BIQUADRATIC
    if is_square(b * (a * a - 4 * b)):
        return CYCLIC
    return DIHEDRAL


def _galois_numeric(k: CMField, prec: int = 200) -> str | None:
    """Look for an automorphism sending the first root to the third one.

    Returns the Galois class implied by the automorphism found (checked
    exactly on the defining polynomial), or None if K is not Galois.
    """
    with mpmath.workprec(prec + 20):
        r = k.roots(prec)
        # sigma(a) = b; sigma(b) = a (order 2) or -a (order 4)
        for tag, vals in ((BIQUADRATIC, [r[2], r[3], r[0], r[1]]),
                          (CYCLIC, [r[2], r[3], r[1], r[0]])):
            z = element_from_embeddings(k, vals, 1, prec)
            if z is None:
                continue
            acc = k.zero()
            for c in reversed(k.poly):
                acc = acc * z + c
            if acc.is_zero():
                return tag
    return None


def galois_class(k: CMField) -> str:
    """Galois group type of the normal closure: cyclic, dihedral or biquadratic.

    The square tests on B and B(A^2 - 4B) decide it; the answer is then
    cross-checked by searching for the automorphism it predicts.
    """
    exact = _galois_exact(k.A, k.B)
    found = _galois_numeric(k)
    if (exact == DIHEDRAL and found is not None) or (exact != DIHEDRAL and found != exact):
        raise FieldError(f"Galois classification mismatch: {exact} vs {found}")
    return exact


@dataclass(frozen=True)
class CMType:
    """A CM type given by two root indices (0 = i y1, 1 = -i y1, 2 = i y2, 3 = -i y2)."""

    field: CMField
    pair: tuple[int, int]
    label: str = ""

    def __post_init__(self):
        i, j = self.pair
        if i // 2 == j // 2:
            raise ValueError("a CM type cannot contain a pair of conjugate embeddings")

    def values(self, x: FieldElem, prec: int = 128) -> list:
        with mpmath.workprec(prec + 20):
            r = self.field.roots(prec)
            return [x.evaluate(r[i]) for i in self.pair]

    def is_primitive(self) -> bool:
        return galois_class(self.field) != BIQUADRATIC

    def describe(self, prec: int = 53) -> list[str]:
        with mpmath.workprec(prec):
            r = self.field.roots(prec + 20)
            return [mpmath.nstr(r[i].imag, 5) + "i" for i in self.pair]


def cm_types(k: CMField) -> list[CMType]:
    """Representatives of the CM types of K up to equivalence.

    For non-Galois K the two classes are {i y1, i y2} and {i y1, -i y2};
    complex conjugation maps each type to an equivalent one.  Biquadratic
    fields have the same two representatives, both induced from a quadratic
    subfield and therefore not primitive.
    """
    return [CMType(k, (0, 2), "both-positive"), CMType(k, (0, 3), "mixed")]


def reflex_coefficients(a: int, b: int) -> tuple[int, int, int]:
    """(A', B', p): reflex polynomial x^4 + A' x^2 + B' and the scaling p.

    The sum of two non-conjugate roots satisfies x^4 + 2A x^2 + (A^2 - 4B);
    dividing the root by p removes the square factor p^2 | 2A, p^4 | A^2-4B.
    """
    a2, b2 = 2 * a, a * a - 4 * b
    p = 1
    from .nfield import factor_integer
    for q in sorted(factor_integer(abs(a2)) if a2 else {}):
        while a2 % (q * q) == 0 and b2 % q ** 4 == 0:
            a2 //= q * q
            b2 //= q ** 4
            p *= q
    return a2, b2, p


@dataclass
class ReflexPair:
    """(K, Phi) together with its reflex (K^r, Phi^r).

    ``reflex_type`` holds root indices of K^r; the type norm of y is the
    product of y over those two roots and lands in K via the first root
    of K.
    """

    base: CMType
    reflex_field: CMField
    reflex_type: CMType
    scale: int
    galois: str

    @property
    def field(self) -> CMField:
        return self.base.field

    def type_norm(self, x: FieldElem) -> FieldElem:
        return type_norm_elem(self, x)

    def type_norm_ideal(self, b: Ideal) -> Ideal:
        return type_norm_ideal(self, b)


def reflex(phi: CMType) -> ReflexPair:
    k = phi.field
    g = galois_class(k)
    if g == BIQUADRATIC:
        raise NonPrimitiveError("CM types of biquadratic fields are not primitive")
    a2, b2, p = reflex_coefficients(k.A, k.B)
    kr = CMField(a2, b2, name="b")
    prec = 200
    with mpmath.workprec(prec + 20):
        r = k.roots(prec)
        rr = kr.roots(prec)
        i, j = phi.pair
        s = (r[i] + r[j]) / p
        t = (r[i] - r[j]) / p
        tol = mpmath.mpf(2) ** (-prec // 2)
        idx = []
        for target in (s, t):
            hits = [n for n, z in enumerate(rr) if abs(z - target) < tol]
            if len(hits) != 1:
                raise FieldError("reflex type matching failed")
            idx.append(hits[0])
    if {idx[0], idx[1]} != {0, 2}:
        raise FieldError("unexpected reflex type orientation")
    return ReflexPair(phi, kr, CMType(kr, (0, 2), "both-positive"), p, g)


# ---------------------------------------------------------------------------
# type norms

def _tn_values(rp: ReflexPair, y: FieldElem, prec: int) -> list:
    """Values of TN(y) at the four roots of K, in root order."""
    with mpmath.workprec(prec + 40):
        r = rp.reflex_field.roots(prec + 40)
        v = [y.evaluate(z) for z in r]
        p1 = v[0] * v[2]
        p2 = v[0] * v[3]
        return [p1, mpmath.conj(p1), p2, mpmath.conj(p2)]


def _bits(x: FieldElem) -> int:
    return max([abs(c).bit_length() for c in x.num] + [x.den.bit_length()])


def type_norm_elem(rp: ReflexPair, x: FieldElem) -> FieldElem:
    """N_{Phi^r}(x) as an exact element of K, certified by z * conj(z) = N(x)."""
    if x.field != rp.reflex_field:
        raise FieldError("element must lie in the reflex field")
    k = rp.field
    if x.is_zero():
        return k.zero()
    if x.is_rational():
        q = Fraction(x.num[0], x.den)
        return k.one() * (q * q)
    coords = x.field.int_coords(x)
    d = lcm(*[c.denominator for c in coords])
    y = x * d
    target = y.norm()
    prec = max(128, 2 * _bits(y) + 96)
    while prec <= MAX_PREC:
        z = element_from_embeddings(k, _tn_values(rp, y, prec), 1, prec)
        if z is not None and not z.is_zero() and z * z.conj() == k.one() * target:
            if _matches(rp, y, z):
                return z / (d * d)
        prec *= 2
    raise ArithmeticError("type norm reconstruction failed at the precision ceiling")


def _matches(rp: ReflexPair, y: FieldElem, z: FieldElem, prec: int = 128) -> bool:
    with mpmath.workprec(prec + 20):
        want = _tn_values(rp, y, prec)[0]
        got = z.embed(prec)[0]
        return abs(want - got) <= mpmath.mpf(2) ** (-prec // 2) * (1 + abs(want))


_PRIME_TN: dict = {}


def type_norm_prime(rp: ReflexPair, q: PrimeIdeal) -> Ideal:
    """Type norm of a prime of K^r, certified by norm and conjugate-product identities."""
    key = (rp.reflex_field.poly, rp.field.poly, q)
    if key in _PRIME_TN:
        return _PRIME_TN[key]
    k, kr = rp.field, rp.reflex_field
    nq = q.norm_int
    target_norm = nq * nq
    full = Ideal.principal(k.one() * nq)
    pi = kr.from_int_coords(q.pi)
    gens = [k.one() * nq, type_norm_elem(rp, pi)]
    basis = q.basis_elements()
    import random
    rng = random.Random(nq)
    for attempt in range(60):
        cand = Ideal.from_gens(k, gens)
        if cand.num_norm == target_norm and cand.den == 1 and cand * cand.conj() == full:
            _PRIME_TN[key] = cand
            return cand
        c = [rng.randint(-3, 3) for _ in basis]
        e = kr.zero()
        for ci, bi in zip(c, basis):
            e = e + bi * ci
        if not e.is_zero():
            gens.append(type_norm_elem(rp, e))
    raise ArithmeticError("type norm certificate never satisfied")


def type_norm_ideal(rp: ReflexPair, b: Ideal) -> Ideal:
    """N_{Phi^r}(b) for a fractional ideal b of K^r, prime by prime."""
    k = rp.field
    num, den = b.numerator_denominator()
    out = Ideal.unit(k)
    if num.num_norm != 1:
        for q, e in factor_ideal(num).items():
            out = out * (type_norm_prime(rp, q) ** e)
    if den != 1:
        out = out.scale(Fraction(1, den * den))
    return out
