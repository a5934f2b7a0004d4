"""Residue unit groups (O/mO)^x and ray class groups modulo a rational integer m.

The ray class group is presented on generators of (O/m)^x, one sign per
flagged real place, and ideal classes prime to m lifting the standard
generators of the class group.  Relations are the orders of the residue
generators and signs, the images of global units, and d_i g_i = (alpha_i)
for each class group generator of order d_i.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

from .classgroup import class_group_data, find_generator, mul_reduced, pow_reduced, _lll_basis
from .fgab import AbGroup, Morphism, from_columns, group_from_relations
from .ideals import Ideal
from .nfield import FieldElem, NumberField, factor_integer
from .units import unit_group

BRUTE_FORCE_LIMIT = 1 << 20


class CoprimalityError(ValueError):
    """Raised when an element or ideal is not prime to the modulus."""


# ---------------------------------------------------------------------------
# residues modulo m

def residue(x: FieldElem, m: int) -> tuple[int, ...]:
    """Integral-basis coordinates of x modulo m, for x integral at primes dividing m."""
    c = x.field.int_coords(x)
    d = 1
    for q in c:
        d = d * q.denominator // gcd(d, q.denominator)
    if gcd(d, m) != 1:
        raise CoprimalityError("element is not integral at the primes dividing the modulus")
    inv = pow(d, -1, m) if m > 1 else 0
    return tuple(int(q * d) * inv % m for q in c)


def _mulmod(field: NumberField, a, b, m: int) -> tuple[int, ...]:
    return tuple(field.mul_int(a, b, m))


def _norm_mod(field: NumberField, v, m: int) -> int:
    from .fgab import det
    mat = field.mult_matrix_int(list(v))
    return det(mat) % m


class _PrimePowerResidues:
    """(O/qO)^x for a prime power q by exhaustive closure."""

    def __init__(self, field: NumberField, q: int, p: int, seed: int = 0):
        n = field.degree
        self.field, self.q, self.p = field, q, p
        size = q ** n
        if size > BRUTE_FORCE_LIMIT:
            raise NotImplementedError(f"residue ring of size {size} exceeds the enumeration limit")
        one = tuple([1 % q] + [0] * (n - 1))
        units = [v for v in itertools.product(range(q), repeat=n) if _norm_mod(field, v, p) % p]
        self.order = len(units)
        rng = random.Random(seed + q)
        gens: list[tuple] = []
        rels: list[list[int]] = []
        table = {one: ()}
        while len(table) < self.order:
            g = rng.choice(units)
            if g in table:
                continue
            # smallest k with g^k in the current subgroup
            k, cur = 1, g
            while cur not in table:
                cur = _mulmod(field, cur, g, q)
                k += 1
            r = len(gens)
            rel = [-x for x in table[cur]] + [0] * (r - len(table[cur])) + [k]
            gens.append(g)
            rels = [row + [0] for row in rels] if rels else []
            rels.append(rel)
            new = {}
            powg = one
            for j in range(k):
                for h, coords in table.items():
                    e = _mulmod(field, h, powg, q)
                    new[e] = tuple(coords) + (0,) * (r - len(coords)) + (j,)
                powg = _mulmod(field, powg, g, q)
            table = new
        self.gens = gens
        self.table = table
        k = len(gens)
        cols = [rel + [0] * (k - len(rel)) for rel in rels]
        self.base_relations = cols
        self.group = group_from_relations(k, from_columns(cols, k)) if k else AbGroup([], 0)

    def base_coords(self, v) -> list[int]:
        v = tuple(x % self.q for x in v)
        if v not in self.table:
            raise CoprimalityError("element is not a unit modulo the modulus")
        c = list(self.table[v])
        return c + [0] * (len(self.gens) - len(c))


@dataclass
class ResidueUnitGroup:
    """(O/mO)^x with dlog, and the reduction map s on global units."""
    field: NumberField
    modulus: int
    group: AbGroup
    components: list
    gen_residues: list
    unit_map: Morphism | None = None

    def dlog_residue(self, v) -> tuple[int, ...]:
        base = []
        for comp in self.components:
            base += comp.base_coords([x % comp.q for x in v])
        return self.group.from_base(base)

    def dlog(self, x: FieldElem) -> tuple[int, ...]:
        if self.modulus == 1:
            return ()
        return self.dlog_residue(residue(x, self.modulus))

    def element(self, coords) -> tuple[int, ...]:
        """A residue vector with the given standard coordinates."""
        n = self.field.degree
        if self.modulus == 1:
            return tuple([1] + [0] * (n - 1))
        base = self.group.to_base(list(coords))
        res = tuple([1 % self.modulus] + [0] * (n - 1))
        for g, e in zip(self.gen_residues, base):
            e %= self.group.exponent() or 1
            for _ in range(e):
                res = _mulmod(self.field, res, g, self.modulus)
        return res


def residue_unit_group(field: NumberField, m: int, seed: int = 0) -> ResidueUnitGroup:
    """Structure of (O/mO)^x; the unit map s is attached when units are available."""
    if m < 1:
        raise ValueError("modulus must be positive")
    n = field.degree
    if m == 1:
        res = ResidueUnitGroup(field, 1, AbGroup([], 0), [], [])
        res.unit_map = _unit_morphism(res)
        return res
    comps = []
    gen_res = []
    for p, k in sorted(factor_integer(m).items()):
        q = p ** k
        comp = _PrimePowerResidues(field, q, p, seed)
        comps.append(comp)
        other = m // q
        # CRT lift: x = g mod q, 1 mod other
        u = other * pow(other, -1, q) % m if other > 1 else 1
        for g in comp.gens:
            lift = [(u * g[i] + (1 - u) * (1 if i == 0 else 0)) % m for i in range(n)]
            gen_res.append(tuple(lift))
    total = sum(len(c.gens) for c in comps)
    cols = []
    off = 0
    for c in comps:
        for col in c.base_relations:
            cols.append([0] * off + col + [0] * (total - off - len(col)))
        off += len(c.gens)
    grp = group_from_relations(total, from_columns(cols, total)) if cols else AbGroup([], total)
    res = ResidueUnitGroup(field, m, grp, comps, gen_res)
    res.unit_map = _unit_morphism(res)
    return res


def unit_generators(field: NumberField) -> tuple[AbGroup, list[FieldElem]]:
    """The unit group as an abstract group with generators (torsion, fundamental)."""
    if field.degree == 1:
        return group_from_relations(1, [[2]]), [-field.one()]
    u = unit_group(field)
    gens = [u.torsion_gen] + list(u.fundamental_units)
    rels = [[u.torsion_order] + [0] * len(u.fundamental_units)]
    return group_from_relations(len(gens), from_columns(rels, len(gens))), gens


def _unit_morphism(res: ResidueUnitGroup) -> Morphism:
    ug, gens = unit_generators(res.field)
    imgs_base = [res.dlog(g) for g in gens]
    # images of the standard generators of the unit group
    imgs = []
    for i in range(ug.ngens):
        b = ug.to_base(ug.unit(i))
        img = res.group.zero()
        for e, im in zip(b, imgs_base):
            img = res.group.add(img, res.group.scale(e, im))
        imgs.append(img)
    return Morphism.from_images(ug, res.group, imgs)


# ---------------------------------------------------------------------------
# ray class groups

def coprime_representative(I: Ideal, m: int, seed: int = 0) -> tuple[Ideal, FieldElem]:
    """(J, x) with J = x * I integral and prime to m."""
    f = I.field
    if I.is_integral() and I.is_coprime_to(m):
        return I, f.one()
    inv = I.inverse()
    red = _lll_basis(inv)
    n = len(red)
    rng = random.Random(seed)
    for r in itertools.count(1):
        for _ in range(200):
            c = [rng.randint(-r, r) for _ in range(n)]
            if not any(c):
                continue
            v = [sum(c[j] * red[j][i] for j in range(n)) for i in range(n)]
            x = f.from_int_coords([Fraction(t, inv.den) for t in v])
            J = Ideal.principal(x) * I
            if J.is_coprime_to(m):
                return J, x
        if r > 20:
            raise ArithmeticError("no coprime representative found")


def _sign_vector(x: FieldElem, narrow: bool) -> list[int]:
    if not narrow:
        return []
    return [0 if s > 0 else 1 for s in x.real_signs()]


class RayClassGroup:
    """Cl_F(m), or its narrow version when ``narrow`` (signs at all real places)."""

    def __init__(self, field: NumberField, m: int, narrow: bool = False, seed: int = 0):
        self.field, self.modulus, self.narrow = field, m, narrow
        r1 = field.signature()[0]
        self.real_place_flags = [narrow] * r1
        self.nsigns = r1 if narrow else 0
        self.cl = class_group_data(field)
        self.res = residue_unit_group(field, m, seed)
        rg = self.res.group
        cg = self.cl.group
        nr, ns, nc = rg.ngens, self.nsigns, cg.ngens
        self._layout = (nr, ns, nc)
        cols = []
        for i, d in enumerate(rg.invariants):
            cols.append([d if j == i else 0 for j in range(nr)] + [0] * (ns + nc))
        for i in range(ns):
            cols.append([0] * nr + [2 if j == i else 0 for j in range(ns)] + [0] * nc)
        _, ugens = unit_generators(field)
        for u in ugens:
            cols.append(self._principal_part(u) + [0] * nc)
        # class group generators prime to m and their relations
        self.cl_gens = []
        self.cl_alphas = []
        for i, d in enumerate(cg.invariants):
            J0, _ = self.cl.ideal_of_base(cg.to_base(cg.unit(i)))
            g, _ = coprime_representative(J0, m, seed + i)
            self.cl_gens.append(g)
            alpha = _generator_of_power(g, d)
            self.cl_alphas.append(alpha)
            pp = self._principal_part(alpha)
            cols.append([-x for x in pp] + [d if j == i else 0 for j in range(nc)])
        total = nr + ns + nc
        self.group = group_from_relations(total, from_columns(cols, total)) if cols else AbGroup([], total)

    # -- coordinates
    def _principal_part(self, x: FieldElem) -> list[int]:
        return list(self.res.dlog(x)) + _sign_vector(x, self.narrow)

    def principal_class(self, x: FieldElem) -> tuple[int, ...]:
        """Class of the principal ideal xO for x prime to m."""
        return self.group.from_base(self._principal_part(x) + [0] * self._layout[2])

    def dlog(self, I: Ideal) -> tuple[int, ...]:
        """Standard coordinates of the ray class of an ideal prime to m."""
        if not I.is_coprime_to(self.modulus):
            raise CoprimalityError("ideal is not prime to the modulus")
        return self.dlog_compact(I, self.field.one())

    def dlog_compact(self, J0: Ideal, beta0: FieldElem) -> tuple[int, ...]:
        """Coordinates of the class of beta0 * J0, which must be prime to m.

        Only the product needs to be prime to m, so large powers can be kept
        in reduced form (J0 small, beta0 exact).
        """
        e = self.cl.dlog(J0)
        cur = (J0, beta0)
        for g, k in zip(self.cl_gens, e):
            if k:
                cur = mul_reduced(cur, pow_reduced(g, -k))
        J, beta = cur
        gamma = find_generator(J)
        if gamma is None:
            raise ArithmeticError("class group discrete logarithm inconsistent")
        b = beta * gamma
        return self.group.from_base(self._principal_part(b) + list(e))

    def order(self) -> int:
        return self.group.order()

    @property
    def invariants(self) -> tuple[int, ...]:
        return self.group.invariants

    def element_ideal(self, coords) -> Ideal:
        """An integral ideal prime to m in the ray class with the given coordinates."""
        nr, ns, nc = self._layout
        base = self.group.to_base(list(coords))
        rpart, spart, cpart = base[:nr], base[nr:nr + ns], base[nr + ns:]
        x = self._element_with(rpart, spart)
        ideal = Ideal.principal(x)
        for g, k in zip(self.cl_gens, cpart):
            if k:
                ideal = ideal * (g ** k)
        return ideal

    def element_parts(self, coords) -> tuple[FieldElem, list[tuple[Ideal, int]]]:
        """(x, [(g, k)]) with xO * prod g^k the ideal returned by element_ideal."""
        nr, ns, nc = self._layout
        base = self.group.to_base(list(coords))
        x = self._element_with(base[:nr], base[nr:nr + ns])
        return x, [(g, k) for g, k in zip(self.cl_gens, base[nr + ns:]) if k]

    def ideal_reps(self) -> list[Ideal]:
        return [self.element_ideal(self.group.unit(i)) for i in range(self.group.ngens)]

    def _element_with(self, rcoords, signs) -> FieldElem:
        """An integral element with prescribed residue coordinates and signs."""
        f = self.field
        m = self.modulus
        v = self.res.element(rcoords)
        base = f.from_int_coords(list(v))
        if not self.narrow:
            return base
        want = [s % 2 for s in signs]
        n = f.degree
        for r in itertools.count(0):
            for c in itertools.product(range(-r, r + 1), repeat=n):
                if r and max(abs(t) for t in c) != r:
                    continue
                x = base + f.from_int_coords([m * t for t in c])
                if x.is_zero():
                    continue
                if _sign_vector(x, True) == want:
                    return x


def _generator_of_power(g: Ideal, d: int) -> FieldElem:
    """alpha with g^d = alpha O (g has class of order dividing d)."""
    J, beta = pow_reduced(g, d)
    gamma = find_generator(J)
    if gamma is None:
        raise ArithmeticError("class group order inconsistent with principality test")
    return beta * gamma


_RAY_CACHE: dict = {}


def ray_class_group(field: NumberField, m: int, narrow: bool = False, seed: int = 0) -> RayClassGroup:
    key = (field.poly, m, narrow)
    if key not in _RAY_CACHE:
        _RAY_CACHE[key] = RayClassGroup(field, m, narrow, seed)
    return _RAY_CACHE[key]


def class_group(field: NumberField) -> RayClassGroup:
    return ray_class_group(field, 1, False)
