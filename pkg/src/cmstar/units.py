"""Unit groups of real quadratic fields and quartic CM fields."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import mpmath

from .lattice import fincke_pohst
from .nfield import CMField, FieldElem, NumberField, element_from_embeddings


def _pqa_unit(d: int) -> tuple[int, int]:
    """Fundamental unit (p - q w) of discriminant d > 0, with w = (s + sqrt d)/2.

    Runs the continued fraction of w until the complete quotient returns to
    denominator 2, at which point the convergent gives a unit.
    """
    s = d % 2
    P, Q = s, 2
    sq = isqrt(d)
    p_prev, p = 1, None
    q_prev, q = 0, None
    pm2, pm1 = 0, 1
    qm2, qm1 = 1, 0
    for _ in range(100000):
        a = (P + sq) // Q
        pk = a * pm1 + pm2
        qk = a * qm1 + qm2
        pm2, pm1 = pm1, pk
        qm2, qm1 = qm1, qk
        P = a * Q - P
        Q = (d - P * P) // Q
        if Q == 2:
            return pk, qk
    raise ArithmeticError("continued fraction did not close")


@lru_cache(maxsize=None)
def _real_quadratic_unit_cached(poly: tuple) -> tuple:
    field = NumberField(list(poly), check=False)
    c, b = poly[0], poly[1]
    big_d = b * b - 4 * c
    d = field.disc
    f2 = big_d // d
    f = isqrt(f2)
    assert f * f == f2
    # sqrt(big_d) := 2 r + b where r is the generator; sqrt(d) = sqrt(big_d)/f
    r = field.gen()
    sqrt_d = (2 * r + b) * Fraction(1, f)
    s = d % 2
    w = (sqrt_d + s) * Fraction(1, 2)
    p, q = _pqa_unit(d)
    eps = p - q * w
    nm = eps.norm()
    if abs(nm) != 1:
        raise ArithmeticError("continued fraction produced a non-unit")
    cands = [eps, -eps, eps.inverse(), -eps.inverse()]
    good = [e for e in cands if all(x >= 0 for x in e.num)]
    if not good:
        good = cands
    best = min(good, key=lambda e: (max(abs(x) for x in e.num), e.num))
    return best.num, best.den


def fundamental_unit_real_quadratic(field: NumberField) -> FieldElem:
    """Fundamental unit, normalised to nonnegative coordinates of least height."""
    num, den = _real_quadratic_unit_cached(field.poly)
    return FieldElem(field, num, den)


def totally_positive_generator(field: NumberField) -> FieldElem:
    """Generator of the totally positive units modulo torsion.

    eps if eps >> 0, -eps if -eps >> 0, otherwise eps^2.
    """
    e = fundamental_unit_real_quadratic(field)
    sg = e.real_signs()
    if all(s > 0 for s in sg):
        return e
    if all(s < 0 for s in sg):
        return -e
    return e * e


def torsion_units(field: NumberField) -> list[FieldElem]:
    """All roots of unity of a totally imaginary field (integral T2 = n elements)."""
    from .classgroup import t2_gram_of_vectors
    n = field.degree
    basis = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    gram = t2_gram_of_vectors(field, basis)
    vecs = fincke_pohst(gram, n)
    out = []
    for v in vecs:
        x = field.from_int_coords(v)
        for s in (1, -1):
            y = x * s
            for k in (1, 2, 3, 4, 5, 6, 8, 10, 12):
                if y ** k == field.one():
                    out.append(y)
                    break
    return out


@dataclass
class UnitGroupData:
    """Units: torsion generator of order w and one fundamental unit."""
    field: NumberField
    torsion_gen: FieldElem
    torsion_order: int
    fundamental_units: list
    eps0: FieldElem | None = None          # fundamental unit of the real subfield
    eps0_plus: FieldElem | None = None     # generator of its totally positive units
    unit_index: int = 1                    # [O_K^x : W O_K0^x] for CM fields

    def unit(self, exps) -> FieldElem:
        """zeta^exps[0] * eps^exps[1]."""
        z, e = exps
        return (self.torsion_gen ** (z % self.torsion_order)) * (self.fundamental_units[0] ** e)


def _order_of_root(x: FieldElem) -> int:
    one = x.field.one()
    for k in range(1, 25):
        if x ** k == one:
            return k
    raise ArithmeticError("not a root of unity")


def _sqrt_in_field(x: FieldElem, prec: int = 256) -> FieldElem | None:
    """A square root of x in a quartic CM field, or None (decided exactly)."""
    f = x.field
    with mpmath.workprec(prec + 40):
        vals = x.embed(prec)
        s1 = mpmath.sqrt(vals[0])
        s2 = mpmath.sqrt(vals[2])
        for t in (1, -1):
            cand = [s1, mpmath.conj(s1), t * s2, mpmath.conj(t * s2)]
            y = element_from_embeddings(f, cand, 1, prec)
            if y is not None and y * y == x:
                return y
    return None


_UNIT_CACHE: dict = {}


def unit_group(field: NumberField) -> UnitGroupData:
    if field.poly in _UNIT_CACHE:
        return _UNIT_CACHE[field.poly]
    if field.degree == 2:
        c, b = field.poly[0], field.poly[1]
        if b * b - 4 * c > 0:
            e = fundamental_unit_real_quadratic(field)
            res = UnitGroupData(field, -field.one(), 2, [e], e, totally_positive_generator(field))
        else:
            tors = torsion_units(field)
            z = max(tors, key=_order_of_root)
            res = UnitGroupData(field, z, _order_of_root(z), [])
    elif isinstance(field, CMField):
        k0 = field.K0
        e0 = fundamental_unit_real_quadratic(k0)
        tors = torsion_units(field)
        z = max(tors, key=_order_of_root)
        w = _order_of_root(z)
        e0k = field.embed_real(e0)
        eps, q = e0k, 1
        for zeta in (field.one(), z):
            r = _sqrt_in_field(zeta * e0k)
            if r is not None:
                eps, q = r, 2
                break
        res = UnitGroupData(field, z, w, [eps], e0, totally_positive_generator(k0), q)
    else:
        raise NotImplementedError("unit groups are implemented for quadratic and quartic CM fields")
    _UNIT_CACHE[field.poly] = res
    return res
