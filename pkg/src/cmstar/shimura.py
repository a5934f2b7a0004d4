"""The Shimura ray class group C_K(m) of a quartic CM field and the maps into it.

C_K(m) consists of pairs (a, a0) with a an ideal prime to m and a0 a totally
positive element of K0 with a * conj(a) = a0 O_K, modulo the pairs
(xO, x conj(x)) with x = 1 mod* m.  It sits in the exact sequence

    O^x_{K,m,1} --N1--> O^{x+}_{K0} --f--> C_K(m) --g--> Cl_K(m) --N2--> Cl+_{K0}(1)

and is assembled as the extension of ker N2 by coker N1.  The preimage of f
is computed by finding a generator x = 1 mod* m of the ideal part and
dividing the scalar part by x conj(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath
import sympy

from .classgroup import _lll_basis, find_generator, mul_reduced, pow_reduced, reduce_ideal, relative_norm_ideal
from .fgab import AbGroup, Morphism, Subgroup, cyclic, extension_group, morphism_kernel, solve_preimage
from .ideals import Ideal
from .nfield import CMField, FieldElem, FieldError
from .rayclass import RayClassGroup, ray_class_group, unit_generators
from .units import unit_group


@dataclass
class ShimuraElement:
    """The pair (beta * J, t * beta conj(beta)); J is kept reduced and t is a
    totally positive generator of the relative norm of J."""

    ideal: Ideal
    beta: FieldElem
    t: FieldElem

    @classmethod
    def from_scalar(cls, ideal: Ideal, beta: FieldElem, scalar: FieldElem) -> "ShimuraElement":
        return cls(ideal, beta, scalar / ideal.field.rel_norm(beta))

    @property
    def scalar(self) -> FieldElem:
        return self.t * self.ideal.field.rel_norm(self.beta)

    def ideal_part(self) -> Ideal:
        return Ideal.principal(self.beta) * self.ideal

    def is_valid(self) -> bool:
        """a * conj(a) = a0 O_K and a0 totally positive, checked exactly."""
        ok = relative_norm_ideal(self.ideal) == Ideal.principal(self.t)
        return ok and self.t.is_totally_positive()


def shimura_mul(x: ShimuraElement, y: ShimuraElement) -> ShimuraElement:
    """Product without normalisation (sizes grow; ShimuraGroup.mul reduces)."""
    red, z = reduce_ideal(x.ideal * y.ideal)
    k = red.field
    return ShimuraElement(red, x.beta * y.beta / z, x.t * y.t * k.rel_norm(z))


def shimura_one(field: CMField) -> ShimuraElement:
    return ShimuraElement(Ideal.unit(field), field.one(), field.K0.one())


def principal_pair(x: FieldElem) -> ShimuraElement:
    """(xO, x conj(x)): trivial in C_K(m) when x = 1 mod* m."""
    k = x.field
    return ShimuraElement(Ideal.unit(k), x, k.K0.one())


def _reduce_mod_lattice(x: FieldElem, lat: Ideal) -> FieldElem:
    """x minus a nearby point of the lattice ``lat`` (Babai rounding on an LLL basis)."""
    f = x.field
    vecs = _lll_basis(lat)
    cols = sympy.Matrix([[sympy.Rational(v[i], lat.den) for v in vecs] for i in range(f.degree)])
    c = sympy.Matrix([sympy.Rational(q.numerator, q.denominator) for q in f.int_coords(x)])
    a = cols.LUsolve(c)
    shift = [sum(int(sympy.floor(a[j] + sympy.Rational(1, 2))) * Fraction(vecs[j][i], lat.den)
                 for j in range(f.degree)) for i in range(f.degree)]
    return x - f.from_int_coords(shift)


def _unit_power_exponent(u: FieldElem, eps: FieldElem) -> int | None:
    """k with eps^k = u for units of a real quadratic field, or None."""
    prec = 64 + 2 * max(max(abs(c).bit_length() for c in v.num) + v.den.bit_length() for v in (u, eps))
    with mpmath.workprec(prec):
        lu = mpmath.log(abs(u.embed(prec)[0]))
        le = mpmath.log(abs(eps.embed(prec)[0]))
        k = int(mpmath.nint(lu / le))
    return k if eps ** k == u else None


def _totally_positive_associate(y0: FieldElem, eps0: FieldElem) -> FieldElem | None:
    for u in (1, -1):
        for e in (0, 1):
            z = y0 * u * eps0 ** e
            if z.is_totally_positive():
                return z
    return None


class ShimuraGroup:
    """C_K(m) with discrete logarithms on ShimuraElements."""

    def __init__(self, field: CMField, m: int, seed: int = 0):
        if not isinstance(field, CMField):
            raise FieldError("the Shimura class group needs a quartic CM field")
        if field.is_biquadratic():
            raise FieldError("biquadratic CM fields are not supported")
        self.field, self.modulus = field, m
        k0 = field.K0
        self.ray: RayClassGroup = ray_class_group(field, m, seed=seed)
        self.narrow0: RayClassGroup = ray_class_group(k0, 1, narrow=True, seed=seed)
        ud = unit_group(field)
        self.eps0 = ud.eps0
        self.eps0_plus = ud.eps0_plus
        self.unit_abgroup, self.unit_gens = unit_generators(field)
        self.unit_map: Morphism = self.ray.res.unit_map
        self._build_n1()
        self._build_n2()
        self._build_extension()

    # -- the two ends of the exact sequence
    def unit_element(self, std) -> FieldElem:
        base = self.unit_abgroup.to_base(list(std))
        out = self.field.one()
        for g, e in zip(self.unit_gens, base):
            out = out * g ** e
        return out

    def _n1_exponent(self, u: FieldElem) -> int:
        k = _unit_power_exponent(self.field.rel_norm(u), self.eps0_plus)
        if k is None:
            raise ArithmeticError("relative norm of a unit is not a power of eps0+")
        return k

    def _build_n1(self):
        self.ker_s: Subgroup = morphism_kernel(self.unit_map)
        kgens = [g for g in self.ker_s.gens() if any(g)]
        self.ker_s_units = [self.unit_element(g) for g in kgens]
        self.n1_images = [self._n1_exponent(u) for u in self.ker_s_units]
        g = 0
        for v in self.n1_images:
            g = gcd(g, v)
        if g == 0:
            raise ArithmeticError("N1 image has infinite index")
        self.n1_index = g
        self.coker_n1: AbGroup = cyclic(g)

    def _n2_of_parts(self, x: FieldElem, parts) -> tuple[int, ...]:
        # (x conj x) is totally positive, so only the class group part matters
        out = self.narrow0.group.zero()
        for gi, k in parts:
            c = self.narrow0.dlog(relative_norm_ideal(gi))
            out = self.narrow0.group.add(out, self.narrow0.group.scale(k, c))
        return out

    def _build_n2(self):
        rg = self.ray.group
        imgs = []
        self._parts = []
        for i in range(rg.ngens):
            x, parts = self.ray.element_parts(rg.unit(i))
            self._parts.append((x, parts))
            imgs.append(self._n2_of_parts(x, parts))
        self.map_n2 = Morphism.from_images(rg, self.narrow0.group, imgs)
        self.ker_n2: Subgroup = morphism_kernel(self.map_n2)
        self.ker_n2_group: AbGroup = self.ker_n2.as_group()

    # -- handles
    def _compact_of_parts(self, x: FieldElem, parts) -> tuple[Ideal, FieldElem]:
        cur = (Ideal.unit(self.field), x)
        for gi, k in parts:
            cur = mul_reduced(cur, pow_reduced(gi, k))
        return cur

    def lift_ideal(self, j: Ideal, beta: FieldElem) -> ShimuraElement:
        """A pair (beta J, a0) with a0 >> 0; the class of beta J must lie in ker N2."""
        k = self.field
        rel = relative_norm_ideal(j)
        y0 = find_generator(rel)
        if y0 is None:
            raise ArithmeticError("relative norm is not principal")
        a0 = _totally_positive_associate(y0, self.eps0)
        if a0 is None:
            raise ArithmeticError("no totally positive generator of the relative norm")
        return self.normalize(ShimuraElement(j, beta, a0))

    def _lift(self, jc: int) -> ShimuraElement:
        c = self.ker_n2_group
        v = self.ker_n2_vector(c.to_base(c.unit(jc)))
        x, parts = self.ray.element_parts(v)
        j, beta = self._compact_of_parts(x, parts)
        return self.lift_ideal(j, beta)

    def ker_n2_vector(self, base) -> tuple[int, ...]:
        h = self.ker_n2.hnf
        n = self.ray.group.ngens
        return self.ray.group.reduce([sum(h[i][t] * base[t] for t in range(len(base))) for i in range(n)])

    def project(self, b: ShimuraElement) -> tuple[int, ...]:
        """Image under g in ker N2, in its standard coordinates."""
        v = self.ray.dlog_compact(b.ideal, b.beta)
        c = self.ker_n2.coords(v)
        if c is None:
            raise ArithmeticError("ideal class is not in the kernel of N2")
        return self.ker_n2_group.from_base(c)

    def preimage_f(self, b: ShimuraElement) -> tuple[int, ...]:
        """Coordinates in coker N1 of a pair lying in the image of f."""
        k = self.field
        gamma = find_generator(b.ideal)
        if gamma is None:
            raise ValueError("ideal part is not principal: element is not in the image of f")
        x0 = b.beta * gamma
        r = self.ray.res.dlog(x0)
        u = solve_preimage(self.unit_map, self.ray.res.group.neg(r))
        if u is None:
            raise ValueError("no generator congruent to 1 mod m: element is not in the image of f")
        x = x0 * self.unit_element(u)
        # scalar / N(x) with scalar = t N(beta) and x = beta gamma u
        alpha = b.t / k.rel_norm(x / b.beta)
        e = _unit_power_exponent(alpha, self.eps0_plus)
        if e is None:
            raise ArithmeticError("scalar quotient is not a totally positive unit")
        return self.coker_n1.from_base([e])

    def inject(self, a) -> ShimuraElement:
        e = self.coker_n1.to_base(list(a))[0] if self.coker_n1.ngens else 0
        k = self.field
        return ShimuraElement(Ideal.unit(k), k.one(), self.eps0_plus ** e)

    # -- group law on handles, with size reduction
    def normalize(self, b: ShimuraElement) -> ShimuraElement:
        """An equivalent handle with beta reduced modulo m J^-1 and t balanced.

        beta' - beta in m J^-1 makes beta'/beta = 1 mod* m (beta J is prime to
        m), so (beta J, t N(beta)) and (beta' J, t N(beta')) differ by a
        trivial pair.  Multiplying t by a power of eps0+^g changes nothing
        because eps0+^g lies in the image of N1.
        """
        k = self.field
        m = self.modulus
        if m == 1:
            beta = k.one()
        else:
            beta = _reduce_mod_lattice(b.beta, b.ideal.inverse().scale(m))
            if beta.is_zero():
                beta = b.beta
        t = b.t
        g = self.n1_index
        prec = 64 + 2 * (max(abs(c).bit_length() for c in t.num) + t.den.bit_length())
        with mpmath.workprec(prec):
            tv = t.embed(prec)
            ev = self.eps0_plus.embed(prec)
            spread = mpmath.log(abs(tv[0])) - mpmath.log(abs(tv[1]))
            step = g * (mpmath.log(abs(ev[0])) - mpmath.log(abs(ev[1])))
            j = int(mpmath.nint(spread / step))
        if j:
            t = t * self.eps0_plus ** (-g * j)
        return ShimuraElement(b.ideal, beta, t)

    def mul(self, x: ShimuraElement, y: ShimuraElement) -> ShimuraElement:
        return self.normalize(shimura_mul(x, y))

    def power(self, x: ShimuraElement, e: int) -> ShimuraElement:
        if e < 0:
            x = ShimuraElement(x.ideal.inverse(), x.beta.inverse(), x.t.inverse())
            x = self.normalize(shimura_mul(x, shimura_one(self.field)))
            e = -e
        out = shimura_one(self.field)
        while e:
            if e & 1:
                out = self.mul(out, x)
            e >>= 1
            if e:
                x = self.mul(x, x)
        return out

    def _build_extension(self):
        self.group = extension_group(
            self.coker_n1, self.ker_n2_group, self._lift, self.preimage_f,
            mul=self.mul, power=self.power, project=self.project, inject=self.inject)
        self.reps = self.group.generator_handles() if self.group.ngens else []

    # -- public API
    @property
    def invariants(self) -> tuple[int, ...]:
        return self.group.invariants

    def order(self) -> int:
        return self.group.order()

    def dlog(self, b: ShimuraElement) -> tuple[int, ...]:
        return self.group.dlog(b)

    def map_f(self) -> Morphism:
        a = self.coker_n1
        imgs = [self.dlog(self.inject(a.unit(i))) for i in range(a.ngens)]
        return Morphism.from_images(a, self.group, imgs)

    def map_g(self) -> Morphism:
        """C_K(m) -> Cl_K(m), forgetting the scalar part."""
        imgs = []
        for i in range(self.group.ngens):
            h = self.reps[i]
            imgs.append(self.ray.dlog_compact(h.ideal, h.beta))
        return Morphism.from_images(self.group, self.ray.group, imgs)


_SHIMURA_CACHE: dict = {}


def shimura_group(field: CMField, m: int, seed: int = 0) -> ShimuraGroup:
    key = (field.poly, m)
    if key not in _SHIMURA_CACHE:
        _SHIMURA_CACHE[key] = ShimuraGroup(field, m, seed)
    return _SHIMURA_CACHE[key]


def map_n1(field: CMField, m: int) -> tuple[list[FieldElem], list[int]]:
    """Generators of O^x_{K,m,1} and their N1 images as exponents of eps0+."""
    sg = shimura_group(field, m)
    return sg.ker_s_units, sg.n1_images


def map_n2(field: CMField, m: int) -> Morphism:
    return shimura_group(field, m).map_n2


def reduce_ideal_pair(a: Ideal) -> tuple[Ideal, FieldElem]:
    """(J, beta) with a = beta J and J reduced."""
    j, x = reduce_ideal(a)
    return j, x.inverse()


def map_f2(rp, m: int, domain_modulus: int | None = None) -> Morphism:
    """Cl_{K^r}(M) -> C_K(m), [b] -> [(N_{Phi^r}(b), N(b))], where M defaults to m.

    A domain modulus M that is a multiple of m gives the composite with the
    projection Cl_{K^r}(M) -> Cl_{K^r}(m).
    """
    from .cm import type_norm_elem, type_norm_ideal
    k = rp.field
    sg = shimura_group(k, m)
    mm = m if domain_modulus is None else domain_modulus
    if mm % m:
        raise ValueError("the domain modulus must be a multiple of m")
    rr = ray_class_group(rp.reflex_field, mm)
    imgs = []
    for i in range(rr.group.ngens):
        x, parts = rr.element_parts(rr.group.unit(i))
        # TN(x) conj(TN(x)) = N(x), so the scalar part of (TN(x)) contributes t = 1
        h = sg.normalize(ShimuraElement(Ideal.unit(k), type_norm_elem(rp, x), k.K0.one()))
        for gi, e in parts:
            tg = type_norm_ideal(rp, gi)
            hg = sg.normalize(ShimuraElement.from_scalar(*reduce_ideal_pair(tg), k.K0.one() * gi.norm()))
            h = sg.mul(h, sg.power(hg, e))
        imgs.append(sg.dlog(h))
    return Morphism.from_images(rr.group, sg.group, imgs)
