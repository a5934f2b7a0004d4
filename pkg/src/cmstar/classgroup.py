"""Principal ideal testing, ideal reduction and certified class groups.

Principality is decided by a complete short-vector search: a generator of
an integral ideal J, suitably multiplied by a unit, is a lattice vector of J
whose size under a weighted T2 form is bounded in terms of N(J) alone, so
enumerating that region either finds it or proves there is none.

Class groups are presented on a small set S0 of primes.  Every prime up to
the Minkowski bound is written as a combination of S0 through explicit
principal ideals, which makes Z^S0 -> Cl surjective; relations come from
principal ideals as well, and the remaining kernel is excluded by testing
one representative per order-q line of the q-torsion with the principality
search.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd, isqrt, log, prod

import mpmath

from .fgab import AbGroup, group_from_relations, from_columns
from .ideals import Ideal, PrimeIdeal, factor_ideal, prime_decomposition, primes_up_to
from .lattice import fincke_pohst, lll_gram
from .nfield import CMField, FieldElem, NumberField, factor_integer

_BASIS_VALUES: dict = {}


def _prec_for(entries) -> int:
    big = max((abs(x) for x in entries), default=1)
    return 160 + 2 * big.bit_length()


def _basis_values(field: NumberField, prec: int):
    key = (field.poly, prec)
    if key not in _BASIS_VALUES:
        with mpmath.workprec(prec + 20):
            roots = field.roots(prec)
            _BASIS_VALUES[key] = [[w.evaluate(z) for w in field.integral_basis] for z in roots]
    return _BASIS_VALUES[key]


def places(field: NumberField) -> list[tuple[int, bool]]:
    """(root index, is_complex) for each place, real places first."""
    r1, r2 = field.signature()
    return [(i, False) for i in range(r1)] + [(r1 + 2 * j, True) for j in range(r2)]


def weighted_gram(field: NumberField, vecs, weights, prec: int):
    """Gram matrix of sum_places weight * |sigma(x)|^2 on the given vectors."""
    pl = places(field)
    with mpmath.workprec(prec + 20):
        bv = _basis_values(field, prec)
        vals = []
        for v in vecs:
            vals.append([sum((c * bv[s][i] for i, c in enumerate(v) if c), mpmath.mpf(0))
                         for s, _ in pl])
        n = len(vecs)
        g = [[mpmath.mpf(0)] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                t = mpmath.mpf(0)
                for k, w in enumerate(weights):
                    t += w * mpmath.re(vals[a][k] * mpmath.conj(vals[b][k]))
                g[a][b] = g[b][a] = t
        return g


def t2_weights(field: NumberField) -> list:
    return [2 if cx else 1 for _, cx in places(field)]


def t2_gram_of_vectors(field: NumberField, vecs, prec: int | None = None):
    if prec is None:
        prec = _prec_for([x for v in vecs for x in v])
    return weighted_gram(field, vecs, t2_weights(field), prec)


# ---------------------------------------------------------------------------
# reduction and small elements

def _lll_basis(I: Ideal) -> list[list[int]]:
    """LLL-reduced (under T2) basis of the numerator lattice of I."""
    vecs = I.basis_vectors()
    g = t2_gram_of_vectors(I.field, vecs)
    t, _ = lll_gram(g, prec=_prec_for([x for v in vecs for x in v]))
    n = len(vecs)
    return [[sum(t[j][k] * vecs[k][i] for k in range(n)) for i in range(n)] for j in range(n)]


def reduce_ideal(I: Ideal) -> tuple[Ideal, FieldElem]:
    """(J, x) with J = x * I integral of small norm in the class of I."""
    f = I.field
    inv = I.inverse()
    red = _lll_basis(inv)
    best = None
    for v in red:
        x = f.from_int_coords([Fraction(c, inv.den) for c in v])
        nx = abs(x.norm())
        if best is None or nx < best[0]:
            best = (nx, x)
    x = best[1]
    return Ideal.principal(x) * I, x


def small_elements(I: Ideal, radius: int = 1):
    """Short nonzero elements of the numerator of I (integral-basis vectors).

    Yields the LLL basis first, then small combinations of it.
    """
    red = _lll_basis(I)
    n = len(red)
    seen = set()
    for r in range(1, radius + 1):
        for coeffs in itertools.product(range(-r, r + 1), repeat=n):
            if max(abs(c) for c in coeffs) != r and r > 1:
                continue
            if not any(coeffs):
                continue
            first = next(c for c in coeffs if c)
            if first < 0:
                continue
            v = tuple(sum(c * red[j][i] for j, c in enumerate(coeffs)) for i in range(n))
            if v in seen:
                continue
            seen.add(v)
            yield list(v)


# ---------------------------------------------------------------------------
# principal ideal test

def _int_norm(field: NumberField, v) -> int:
    x = field.from_int_coords(v)
    return abs(int(x.norm()))


def _search(J: Ideal, weights, bound, prec: int):
    f = J.field
    vecs = J.basis_vectors()
    nj = J.num_norm
    g = weighted_gram(f, vecs, weights, prec)

    def ok(c):
        return _int_norm(f, [sum(c[k] * vecs[k][i] for k in range(len(vecs))) for i in range(len(vecs))]) == nj

    res = fincke_pohst(g, bound, prec=prec, accept=ok)
    if not res:
        # the bound is already sufficient; one doubled pass guards against
        # boundary effects in the enumeration
        res = fincke_pohst(g, 2 * bound, prec=prec, accept=ok)
    if not res:
        return None
    c = res[0]
    return f.from_int_coords([sum(c[k] * vecs[k][i] for k in range(len(vecs))) for i in range(len(vecs))])


def _generator_quadratic(J: Ideal):
    from .units import unit_group
    f = J.field
    n = J.num_norm
    prec = _prec_for([n] + [x for r in J.hnf for x in r])
    if f.signature()[0] == 0:
        # imaginary quadratic: |x|^2 = N(J), T2 = 2 N(J)
        return _search(J, [2], 2 * n, prec)
    eps = unit_group(f).eps0
    with mpmath.workprec(prec):
        e1 = abs(eps.embed(prec)[0])
        eta = e1 * e1
        if eta < 1:
            eta = 1 / eta
        w = 1 / mpmath.sqrt(eta)
        top = mpmath.sqrt(eta)
        grid = []
        while True:
            grid.append([w, 1 / w])
            if 2 * w >= top:
                break
            w *= 4
    for ws in grid:
        x = _search(J, ws, mpmath.mpf(n) * mpmath.mpf(2.5), prec)
        if x is not None:
            return x
    return None


def relative_norm_ideal(J: Ideal) -> Ideal:
    """N_{K/K0}(J) as an ideal of the real subfield of a CM field."""
    from .fgab import integer_kernel
    k = J.field
    assert isinstance(k, CMField)
    l = J * J.conj()
    elems = l.basis_elements()
    d = 1
    for e in elems:
        d = d * e.den // gcd(d, e.den)
    nums = [[c * (d // e.den) for c in e.num] for e in elems]
    odd = [[nums[j][1] for j in range(4)], [nums[j][3] for j in range(4)]]
    ker = integer_kernel(odd)
    gens = []
    for kv in ker:
        c = [sum(kv[j] * nums[j][i] for j in range(4)) for i in range(4)]
        gens.append(FieldElem(k.K0, [c[0], c[2]], d))
    return Ideal.from_gens(k.K0, gens)


def _generator_cm(J: Ideal):
    from .units import unit_group
    k = J.field
    n = J.num_norm
    y0 = find_generator(relative_norm_ideal(J))
    if y0 is None:
        return None
    eps0 = unit_group(k.K0).eps0
    prec = _prec_for([n] + [x for r in J.hnf for x in r] + list(y0.num))
    for u in (1, -1, eps0, -eps0):
        z = y0 * u
        if not z.is_totally_positive():
            continue
        with mpmath.workprec(prec):
            t1, t2 = z.embed(prec)
            w = mpmath.sqrt(t2 / t1)
            ws = [w, 1 / w]
            bound = 2 * mpmath.sqrt(mpmath.mpf(n))
        x = _search(J, ws, bound, prec)
        if x is not None:
            return x
    return None


def find_generator(I: Ideal) -> FieldElem | None:
    """A generator of the fractional ideal I, or None when I is not principal.

    The answer is certified: for quadratic and quartic CM fields the search
    region provably contains a unit multiple of any generator.
    """
    f = I.field
    J, d = I.numerator_denominator()
    if J.num_norm == 1:
        return f.one() * Fraction(1, d)
    if f.degree == 1:
        return f.from_int_coords([J.hnf[0][0]]) * Fraction(1, d)
    if f.degree == 2:
        x = _generator_quadratic(J)
    elif isinstance(f, CMField):
        x = _generator_cm(J)
    else:
        raise NotImplementedError("principality testing needs a quadratic or quartic CM field")
    if x is None:
        return None
    return x * Fraction(1, d)


# ---------------------------------------------------------------------------
# class groups

@dataclass
class ClassGroupData:
    """Cl(F) presented on the primes ``s0``; ``group`` has base coordinates on s0."""
    field: NumberField
    s0: list
    group: AbGroup
    relations: list
    expr: dict = dc_field(default_factory=dict)
    builder: object = None

    def base_vector(self, I: Ideal) -> list[int]:
        """Coordinates over s0 of the class of a fractional ideal."""
        return self.builder.ideal_vector(I)

    def dlog(self, I: Ideal) -> tuple[int, ...]:
        return self.group.from_base(self.base_vector(I))

    def ideal_of_base(self, v) -> tuple[Ideal, FieldElem]:
        """(J, beta) with prod s0^v = beta * J and J integral and small."""
        return self.builder.ideal_of_vector(v)

    def generators(self) -> list[Ideal]:
        """Small integral ideals representing the standard generators."""
        out = []
        for i in range(self.group.ngens):
            J, _ = self.ideal_of_base(self.group.to_base(self.group.unit(i)))
            out.append(J)
        return out


def mul_reduced(a, b):
    """(J, beta) products with reduction: represents beta * J."""
    j = a[0] * b[0]
    red, x = reduce_ideal(j)
    return red, a[1] * b[1] / x


def pow_reduced(I: Ideal, k: int) -> tuple[Ideal, FieldElem]:
    """(J, beta) with I^k = beta * J and J small integral."""
    f = I.field
    if k < 0:
        I, k = I.inverse(), -k
    base = reduce_ideal(I)
    base = (base[0], f.one() / base[1])
    res = (Ideal.unit(f), f.one())
    while k:
        if k & 1:
            res = mul_reduced(res, base)
        k >>= 1
        if k:
            base = mul_reduced(base, base)
    return res


class _Builder:
    def __init__(self, field: NumberField, seed: int = 1):
        self.field = field
        self.rng = random.Random(seed)
        self.mink = field.minkowski_bound()
        b0 = min(self.mink, max(30.0, min(60.0, self.mink)))
        self.s0 = primes_up_to(field, b0) if self.mink >= 2 else []
        self.index = {P: i for i, P in enumerate(self.s0)}
        self.expr: dict = {P: [1 if j == i else 0 for j in range(len(self.s0))] for P, i in self.index.items()}

    # -- expressing primes over s0
    def _vec_of_fac(self, fac: dict, skip=None) -> list[int] | None:
        k = len(self.s0)
        out = [0] * k
        for R, e in fac.items():
            if R == skip:
                continue
            v = self.express(R)
            if v is None:
                return None
            out = [a + e * b for a, b in zip(out, v)]
        return out

    def _s0_product(self, vec) -> Ideal:
        res = Ideal.unit(self.field)
        for P, e in zip(self.s0, vec):
            if e:
                res = res * (P ** e)
        return res

    def express(self, P: PrimeIdeal, depth: int = 0) -> list[int] | None:
        if P in self.expr:
            return self.expr[P]
        if not self.s0:
            return []
        k = len(self.s0)
        nP = P.norm_int
        for attempt in range(60):
            avec = [0] * k
            if attempt >= 3:
                for _ in range(1 + attempt // 20):
                    avec[self.rng.randrange(k)] += 1
            I = P * self._s0_product(avec) if any(avec) else P
            nI = I.num_norm
            for v in small_elements(I, radius=1 if attempt < 3 else 2):
                nx = _int_norm(self.field, v)
                c = nx // nI
                if c > 1 and max(factor_integer(c)) > nP:
                    continue
                Q = Ideal.principal(self.field.from_int_coords(v)) / I
                fac = factor_ideal(Q)
                if P in fac:
                    continue
                if any(R.norm_int >= nP and R not in self.expr for R in fac):
                    continue
                rest = self._vec_of_fac(fac)
                if rest is None:
                    continue
                vec = [-(a + b) for a, b in zip(avec, rest)]
                self.expr[P] = vec
                return vec
        raise ArithmeticError(f"could not express {P} over the factor base")

    def ideal_vector(self, I: Ideal) -> list[int]:
        J, _ = I.numerator_denominator()
        if J.num_norm == 1 or not self.s0:
            return [0] * len(self.s0)
        if J.num_norm > 10 ** 6:
            J, _ = reduce_ideal(J)
        fac = factor_ideal(J)
        return self._vec_of_fac(fac)

    def ideal_of_vector(self, vec) -> tuple[Ideal, FieldElem]:
        f = self.field
        res = (Ideal.unit(f), f.one())
        for P, e in zip(self.s0, vec):
            if e:
                res = mul_reduced(res, pow_reduced(P, e))
        return res

    # -- relations
    def relation(self) -> list[int] | None:
        k = len(self.s0)
        avec = [0] * k
        for _ in range(self.rng.randint(1, 3)):
            avec[self.rng.randrange(k)] += 1
        I = self._s0_product(avec)
        cands = list(small_elements(I, radius=1))
        v = self.rng.choice(cands)
        x = self.field.from_int_coords(v)
        Q = Ideal.principal(x) / I
        if Q.num_norm > max(10 ** 5, 50 * self.mink):
            return None
        rest = self._vec_of_fac(factor_ideal(Q))
        if rest is None:
            return None
        return [a + b for a, b in zip(avec, rest)]


def _lines(invariants, q):
    """Generators of the order-q subgroups of G[q] in standard coordinates."""
    idx = [i for i, d in enumerate(invariants) if d % q == 0]
    r = len(idx)
    for vec in itertools.product(range(q), repeat=r):
        if not any(vec):
            continue
        first = next(c for c in vec if c)
        if first != 1:
            continue
        x = [0] * len(invariants)
        for c, i in zip(vec, idx):
            x[i] = c * (invariants[i] // q)
        yield x


_CLASS_CACHE: dict = {}


def class_group_data(field: NumberField, seed: int = 1) -> ClassGroupData:
    if field.poly in _CLASS_CACHE:
        return _CLASS_CACHE[field.poly]
    b = _Builder(field, seed)
    k = len(b.s0)
    if k == 0:
        data = ClassGroupData(field, [], AbGroup([], 0), [], b.expr, b)
        _CLASS_CACHE[field.poly] = data
        return data
    # surjectivity: every prime up to the Minkowski bound over s0
    for P in primes_up_to(field, b.mink):
        b.express(P)
    rels = []
    stable, last = 0, None
    tries = 0
    while True:
        tries += 1
        r = b.relation()
        if r is not None and any(r):
            rels.append(r)
        if len(rels) >= k:
            g = group_from_relations(k, from_columns(rels, k))
            h = g.order() if g.is_finite() else 0
            if h and h == last:
                stable += 1
            else:
                stable = 0
            last = h
            if stable >= 8:
                break
        if tries > 4000:
            raise ArithmeticError("class group relation search did not stabilise")
    # certification: no nontrivial element of the kernel of Z^s0/L -> Cl
    while True:
        g = group_from_relations(k, from_columns(rels, k))
        h = g.order()
        found = None
        for q in sorted(factor_integer(h)) if h > 1 else []:
            for x in _lines(g.invariants, q):
                bv = g.to_base(x)
                J, beta = b.ideal_of_vector(bv)
                if find_generator(J) is not None:
                    found = bv
                    break
            if found:
                break
        if found is None:
            break
        rels.append(found)
    data = ClassGroupData(field, b.s0, g, rels, b.expr, b)
    _CLASS_CACHE[field.poly] = data
    return data
