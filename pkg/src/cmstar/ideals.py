"""Fractional ideals, prime decomposition and valuations.

An ideal is stored as ``(1/den) * H Z^n`` where the columns of the
upper-triangular column HNF ``H`` are integral-basis coordinates.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm, prod
from typing import Iterable, Sequence

import sympy

from .fgab import det, hnf_basis, matmul, solve_upper
from .nfield import FieldElem, NumberField, factor_integer, kernel_mod_p


def _hnf_cols(vectors: list[list[int]], n: int, modulus: int | None = None) -> list[list[int]]:
    mat = [[v[i] for v in vectors] for i in range(n)]
    h = hnf_basis(mat, modulus)
    if not h or not h[0] or len(h[0]) != n:
        raise ValueError("generators do not span a full-rank lattice")
    return h


class Ideal:
    """Nonzero fractional ideal of the maximal order of ``field``."""

    __slots__ = ("field", "hnf", "den", "__dict__")

    def __init__(self, field: NumberField, hnf: list[list[int]], den: int = 1, canonical: bool = False):
        self.field = field
        if not canonical:
            g = gcd(den, *[x for row in hnf for x in row])
            if g > 1:
                hnf = [[x // g for x in row] for row in hnf]
                den //= g
        self.hnf = hnf
        self.den = den

    # -- constructors
    @classmethod
    def unit(cls, field: NumberField) -> "Ideal":
        n = field.degree
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], 1, True)

    @classmethod
    def from_int_vectors(cls, field: NumberField, vecs: list[list[int]], den: int = 1,
                         modulus: int | None = None) -> "Ideal":
        """Ideal generated as an O-module by integral-basis vectors (scaled by 1/den)."""
        n = field.degree
        gens = []
        for v in vecs:
            if any(v):
                for j in range(n):
                    e = [1 if k == j else 0 for k in range(n)]
                    gens.append(field.mul_int(v, e))
        if modulus is None:
            modulus = min((abs(det(field.mult_matrix_int(v))) for v in vecs if any(v)), default=0)
        return cls(field, _hnf_cols(gens, n, modulus or None), den)

    @classmethod
    def from_gens(cls, field: NumberField, gens: Iterable) -> "Ideal":
        """Ideal generated by field elements (or rationals)."""
        coords = []
        for g in gens:
            if not isinstance(g, FieldElem):
                g = field.elem([Fraction(g)])
            coords.append(field.int_coords(g))
        d = lcm(*(c.denominator for v in coords for c in v))
        vecs = [[int(c * d) for c in v] for v in coords]
        return cls.from_int_vectors(field, vecs, d)

    @classmethod
    def principal(cls, x: FieldElem) -> "Ideal":
        return cls.from_gens(x.field, [x])

    # -- basic data
    @property
    def degree(self) -> int:
        return self.field.degree

    def basis_vectors(self) -> list[list[int]]:
        n = self.degree
        return [[self.hnf[i][j] for i in range(n)] for j in range(n)]

    def basis_elements(self) -> list[FieldElem]:
        return [self.field.from_int_coords([Fraction(x, self.den) for x in v]) for v in self.basis_vectors()]

    @cached_property
    def num_norm(self) -> int:
        return prod(self.hnf[i][i] for i in range(self.degree))

    def norm(self) -> Fraction:
        return Fraction(self.num_norm, self.den ** self.degree)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_one(self) -> bool:
        return self.den == 1 and self.num_norm == 1

    def min_integer(self) -> Fraction:
        """Positive generator of the ideal intersected with Q."""
        # smallest positive integer in the numerator lattice is hnf[0][0]
        return Fraction(self.hnf[0][0], self.den)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ideal) and self.field == other.field and \
            self.den == other.den and self.hnf == other.hnf

    def __hash__(self):
        return hash((self.den, tuple(map(tuple, self.hnf))))

    def __repr__(self) -> str:
        return f"Ideal(norm={self.norm()}, {self.two_element_str()})"

    # -- membership
    def contains(self, x: FieldElem) -> bool:
        c = self.field.int_coords(x)
        c = [v * self.den for v in c]
        if any(v.denominator != 1 for v in c):
            return False
        return solve_upper(self.hnf, [int(v) for v in c]) is not None

    def contains_int(self, v: Sequence[int]) -> bool:
        """Membership of an integral element given by integral-basis coordinates."""
        return solve_upper(self.hnf, [x * self.den for x in v]) is not None

    # -- arithmetic
    def __mul__(self, other: "Ideal") -> "Ideal":
        if isinstance(other, FieldElem):
            return self * Ideal.principal(other)
        if self.is_one():
            return other
        if other.is_one():
            return self
        f = self.field
        n = self.degree
        a = self.__dict__.get("_two") or self.basis_vectors()
        gens = []
        bv = other.basis_vectors()
        for g in a:
            for v in bv:
                gens.append(f.mul_int(g, v))
        mod = self.num_norm * other.num_norm
        return Ideal(f, _hnf_cols(gens, n, mod), self.den * other.den)

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            return self.inverse() ** (-k)
        result = Ideal.unit(self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __add__(self, other: "Ideal") -> "Ideal":
        n = self.degree
        d = lcm(self.den, other.den)
        gens = [[x * (d // self.den) for x in v] for v in self.basis_vectors()]
        gens += [[x * (d // other.den) for x in v] for v in other.basis_vectors()]
        mod = gcd(self.num_norm * (d // self.den) ** n, other.num_norm * (d // other.den) ** n)
        return Ideal(self.field, _hnf_cols(gens, n, mod), d)

    def scale(self, q) -> "Ideal":
        """The ideal q * self for a nonzero rational q."""
        q = Fraction(q)
        n = self.degree
        h = [[x * abs(q.numerator) for x in row] for row in self.hnf]
        return Ideal(self.field, h, self.den * q.denominator)

    def inverse(self) -> "Ideal":
        """Inverse ideal, via the dual of the row lattice of the multiplication matrices."""
        f = self.field
        n = self.degree
        rows = []
        for v in self.basis_vectors():
            m = f.mult_matrix_int(v)
            rows.extend(m)
        # x (coords c) lies in the inverse of the numerator lattice iff rows . c in Z
        mt = [[r[i] for r in rows] for i in range(n)]
        b = hnf_basis(mt)  # columns span the row lattice
        d = det(b)
        # dual lattice = b^{-T} Z^n = adj(b)^T / det(b)
        adj = _adjugate(b)
        # dual basis vectors are the rows of adj(b) / det(b)
        dual_cols = [[adj[i][k] for k in range(n)] for i in range(n)]
        sgn = 1 if d > 0 else -1
        dual_cols = [[sgn * x for x in c] for c in dual_cols]
        h = _hnf_cols(dual_cols, n)
        res = Ideal(f, h, abs(d))
        # the inverse of (1/den) L is den * L^{-1}
        return res.scale(self.den)

    def __truediv__(self, other: "Ideal") -> "Ideal":
        return self * other.inverse()

    def intersect(self, other: "Ideal") -> "Ideal":
        n = self.degree
        d = lcm(self.den, other.den)
        a = [[x * (d // self.den) for x in row] for row in self.hnf]
        b = [[x * (d // other.den) for x in row] for row in other.hnf]
        from .fgab import integer_kernel
        big = [a[i] + [-x for x in b[i]] for i in range(n)]
        ker = integer_kernel(big)
        vecs = [[sum(a[i][j] * k[j] for j in range(n)) for i in range(n)] for k in ker]
        return Ideal(self.field, _hnf_cols(vecs, n), d)

    def conj(self) -> "Ideal":
        """Image under the involution a -> -a."""
        f = self.field
        vecs = [f.int_coords(e.conj()) for e in self.basis_elements()]
        d = lcm(*(c.denominator for v in vecs for c in v))
        iv = [[int(c * d) for c in v] for v in vecs]
        return Ideal(f, _hnf_cols(iv, self.degree), d)

    def numerator_denominator(self) -> tuple["Ideal", int]:
        """(integral ideal J, integer d) with self = J / d."""
        return Ideal(self.field, self.hnf, 1, True), self.den

    # -- two-element form
    def two_element_int(self) -> list[list[int]]:
        """Generators (integral-basis vectors of the numerator) as an O-module.

        Returns [a, beta] for a small two-element presentation when one is
        readily found, else the full HNF basis.
        """
        cached = self.__dict__.get("_two")
        if cached is not None:
            return cached
        n = self.degree
        a = self.hnf[0][0]
        basis = self.basis_vectors()
        res = None
        if self.num_norm == a ** n:
            res = [[a] + [0] * (n - 1)]
        else:
            rng = random.Random(hash((a, self.num_norm)))
            for attempt in range(40):
                if attempt < len(basis):
                    beta = basis[attempt]
                else:
                    beta = [sum(rng.randint(-2, 2) * v[i] for v in basis) for i in range(n)]
                    if not any(beta):
                        continue
                # (a, beta) generates iff the HNF matches
                cand = Ideal.from_int_vectors(self.field, [[a] + [0] * (n - 1), beta], 1,
                                              modulus=self.num_norm)
                if cand.hnf == self.hnf:
                    res = [[a] + [0] * (n - 1), beta]
                    break
        if res is None:
            res = basis
        self.__dict__["_two"] = res
        return res

    def two_element(self) -> tuple[Fraction, FieldElem]:
        gens = self.two_element_int()
        f = self.field
        a = Fraction(gens[0][0], self.den)
        beta = f.from_int_coords([Fraction(x, self.den) for x in gens[-1]])
        return a, beta

    def two_element_str(self) -> str:
        a, b = self.two_element()
        return f"({a}, {b})"

    # -- coprimality
    def is_coprime_to(self, m: int) -> bool:
        """True when no prime above a divisor of m divides this ideal."""
        if self.den != 1:
            return gcd(self.den, m) == 1 and Ideal(self.field, self.hnf, 1, True).is_coprime_to(m)
        # I + mO = O
        n = self.degree
        s = self + Ideal.unit(self.field).scale(m)
        return s.is_one()


def _adjugate(m: list[list[int]]) -> list[list[int]]:
    n = len(m)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return adj


# ---------------------------------------------------------------------------
# prime ideals

class PrimeIdeal(Ideal):
    """Prime ideal with residue characteristic p, ramification e, degree f."""

    def __init__(self, field: NumberField, hnf, p: int, e: int, f: int, pi: list[int], beta: list[int]):
        super().__init__(field, hnf, 1, True)
        self.p, self.e, self.f = p, e, f
        self.pi = pi            # uniformiser-ish second generator, integral-basis coords
        self.beta = beta        # element of p * P^{-1} not in pO, for valuations
        self.__dict__["_two"] = [[p] + [0] * (field.degree - 1), pi]

    def __repr__(self) -> str:
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f}, {self.two_element_str()})"

    def __eq__(self, other):
        return Ideal.__eq__(self, other)

    def __hash__(self):
        return Ideal.__hash__(self)

    @property
    def norm_int(self) -> int:
        return self.p ** self.f

    def valuation_int(self, v: Sequence[int]) -> int:
        """P-adic valuation of a nonzero integral element (integral-basis coords)."""
        f = self.field
        p = self.p
        v = list(v)
        if not any(v):
            raise ValueError("valuation of zero")
        k = 0
        # strip rational powers of p first: v_P(p) = e
        while all(x % p == 0 for x in v):
            v = [x // p for x in v]
            k += self.e
        while True:
            w = f.mul_int(v, self.beta)
            if all(x % p == 0 for x in w):
                v = [x // p for x in w]
                k += 1
            else:
                return k

    def valuation(self, x) -> int:
        """Valuation of a nonzero field element or fractional ideal."""
        if isinstance(x, Ideal):
            val = min(self.valuation_int(v) for v in x.basis_vectors())
            return val - self.e * _vp(x.den, self.p)
        c = self.field.int_coords(x)
        d = lcm(*(q.denominator for q in c))
        iv = [int(q * d) for q in c]
        return self.valuation_int(iv) - self.e * _vp(d, self.p)

    def residue_field_size(self) -> int:
        return self.p ** self.f


def _vp(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    while n and n % p == 0:
        n //= p
        k += 1
    return k


def _quotient_coords(h: list[list[int]], p: int):
    """Free coordinates of O/I for an ideal p*O <= I <= O in HNF (diag in {1,p})."""
    return [i for i in range(len(h)) if h[i][i] == p]


def _reduce_mod_lattice(h: list[list[int]], v: list[int]) -> list[int]:
    v = list(v)
    for i in range(len(h) - 1, -1, -1):
        q = v[i] // h[i][i]
        if q:
            v = [a - q * h[r][i] for r, a in enumerate(v)]
    return v


def _poly_eval_int(field: NumberField, coeffs: list[int], x: list[int], p: int) -> list[int]:
    """Evaluate sum coeffs[k] x^k (integral-basis coordinates) modulo p."""
    n = field.degree
    acc = [0] * n
    for c in reversed(coeffs):
        acc = field.mul_int(acc, x, p)
        acc[0] = (acc[0] + c) % p
    return acc


def _min_poly_mod(field: NumberField, h, x: list[int], p: int) -> list[int]:
    """Minimal polynomial (constant term first, monic) of x in O/I over F_p."""
    n = field.degree
    free = _quotient_coords(h, p)
    powers = []
    cur = [1] + [0] * (n - 1)
    vecs = []
    for k in range(len(free) + 1):
        red = _reduce_mod_lattice(h, cur)
        vecs.append([red[i] % p for i in free])
        # check dependency
        mat = [[vecs[j][i] for j in range(len(vecs))] for i in range(len(free))]
        ker = kernel_mod_p(mat, len(vecs), p)
        if ker:
            v = ker[0]
            lead = v[-1]
            if lead % p:
                inv = pow(lead, -1, p)
                return [c * inv % p for c in v]
        cur = field.mul_int(cur, x, p)
    raise ArithmeticError("minimal polynomial not found")


def _factor_mod_p(coeffs: list[int], p: int) -> list[tuple[list[int], int]]:
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(coeffs)), t, modulus=p)
    _, facs = poly.factor_list()
    out = []
    for fac, e in facs:
        c = [int(x) % p for x in reversed(fac.all_coeffs())]
        out.append((c, int(e)))
    return out


def _ideal_plus_elem(field: NumberField, h, x: list[int], p: int):
    n = field.degree
    gens = [[h[i][j] for i in range(n)] for j in range(n)]
    for j in range(n):
        e = [1 if k == j else 0 for k in range(n)]
        gens.append(field.mul_int(x, e))
    return _hnf_cols(gens, n, p ** n)


def _radical_hnf(field: NumberField, p: int):
    n = field.degree
    table = field.mult_table
    q = p
    while q < n:
        q *= p
    from .nfield import _pow_mod
    imgs = [_pow_mod([1 if k == i else 0 for k in range(n)], q, table, p) for i in range(n)]
    mat = [[imgs[j][i] for j in range(n)] for i in range(n)]
    ker = kernel_mod_p(mat, n, p)
    gens = ker + [[p if k == i else 0 for k in range(n)] for i in range(n)]
    return _hnf_cols(gens, n, p ** n)


_PRIME_CACHE: dict = {}


def prime_decomposition(field: NumberField, p: int) -> list[PrimeIdeal]:
    """Primes above p with ramification and residue degrees, ordered canonically.

    Works for every p, including primes dividing the index [O_K : Z[a]]:
    O/pO modulo its radical is split into fields by factoring minimal
    polynomials of random elements and separating with the factors.
    """
    key = (field.poly, p)
    if key in _PRIME_CACHE:
        return _PRIME_CACHE[key]
    n = field.degree
    rng = random.Random(p * 7919 + sum(field.poly))
    rad = _radical_hnf(field, p)
    pending = [rad]
    maximal = []
    while pending:
        h = pending.pop()
        free = _quotient_coords(h, p)
        dim = len(free)
        if dim == 1:
            maximal.append((h, 1))
            continue
        for attempt in range(200):
            x = [rng.randrange(p) for _ in range(n)]
            if attempt == 0 and n > 1:
                x = [0, 1] + [0] * (n - 2)
            mp = _min_poly_mod(field, h, x, p)
            facs = _factor_mod_p(mp, p)
            if len(facs) > 1:
                for g, _ in facs:
                    gx = _poly_eval_int(field, g, x, p)
                    pending.append(_ideal_plus_elem(field, h, gx, p))
                break
            g, _ = facs[0]
            if len(g) - 1 == dim:
                maximal.append((h, dim))
                break
        else:
            raise ArithmeticError("prime splitting failed")
    primes = []
    for h, fdeg in maximal:
        primes.append(_make_prime(field, h, p, fdeg, rng))
    # ramification indices from valuations of p
    for P in primes:
        P.e = _ram_index(P, primes)
    total = sum(P.e * P.f for P in primes)
    if total != n:
        raise ArithmeticError(f"decomposition of {p} inconsistent: sum e f = {total}")
    primes.sort(key=lambda P: (P.f, P.e, P.hnf))
    for P in primes:
        P.__dict__["_two"] = [[p] + [0] * (n - 1), _find_pi(field, P, primes, rng)]
        P.pi = P.__dict__["_two"][1]
    _PRIME_CACHE[key] = primes
    return primes


def _find_beta(field: NumberField, h, p: int) -> list[int]:
    """An element of p P^{-1} outside pO: kernel of x -> x * P mod p."""
    n = field.degree
    basis = [[h[i][j] for i in range(n)] for j in range(n)]
    rows = []
    for v in basis:
        m = field.mult_matrix_int(v)
        rows.extend(m)
    ker = kernel_mod_p(rows, n, p)
    for v in ker:
        if any(x % p for x in v):
            return v
    raise ArithmeticError("no valuation helper found")


def _make_prime(field, h, p, fdeg, rng) -> PrimeIdeal:
    beta = _find_beta(field, h, p)
    return PrimeIdeal(field, h, p, 0, fdeg, basis_pi(h), beta)


def basis_pi(h):
    n = len(h)
    return [h[i][n - 1] for i in range(n)]


def _ram_index(P: PrimeIdeal, primes) -> int:
    n = P.field.degree
    p = P.p
    # v_P(p) by the beta method (P.e unknown yet, so do not strip p)
    v = [p] + [0] * (n - 1)
    k = 0
    while True:
        w = P.field.mul_int(v, P.beta)
        if all(x % p == 0 for x in w):
            v = [x // p for x in w]
            k += 1
        else:
            return k


def _find_pi(field, P: PrimeIdeal, primes, rng) -> list[int]:
    n = field.degree
    basis = P.basis_vectors()
    p = P.p
    cands = [basis[j] for j in range(n)]
    for attempt in range(400):
        if attempt < len(cands):
            pi = cands[attempt]
        else:
            pi = [sum(rng.randint(-3, 3) * v[i] for v in basis) for i in range(n)]
        if not any(pi):
            continue
        if P.valuation_int(pi) != 1 and P.e > 1:
            continue
        if any(Q is not P and Q.valuation_int(pi) > 0 for Q in primes):
            continue
        if P.e == 1 and P.valuation_int(pi) < 1:
            continue
        return pi
    raise ArithmeticError("two-element form not found")


# ---------------------------------------------------------------------------
# factorisation

def factor_ideal(I: Ideal) -> dict[PrimeIdeal, int]:
    """Prime factorisation of a nonzero fractional ideal."""
    field = I.field
    out: dict = {}
    ps = set(factor_integer(I.num_norm)) | set(factor_integer(I.den))
    for p in sorted(ps):
        for P in prime_decomposition(field, p):
            v = P.valuation(I)
            if v:
                out[P] = v
    return out


def factor_element(x: FieldElem, norm: Fraction | None = None) -> dict[PrimeIdeal, int]:
    field = x.field
    if norm is None:
        norm = x.norm()
    c = field.int_coords(x)
    d = lcm(*(q.denominator for q in c))
    ps = set(factor_integer(norm.numerator)) | set(factor_integer(norm.denominator)) | set(factor_integer(d))
    out = {}
    for p in sorted(ps):
        for P in prime_decomposition(field, p):
            v = P.valuation(x)
            if v:
                out[P] = v
    return out


def ideal_from_factorization(field: NumberField, fac: dict) -> Ideal:
    res = Ideal.unit(field)
    for P, e in fac.items():
        res = res * (P ** e)
    return res


def primes_up_to(field: NumberField, bound: float) -> list[PrimeIdeal]:
    """All prime ideals of norm at most ``bound``, ordered by norm."""
    out = []
    for p in sympy.primerange(2, int(bound) + 1):
        for P in prime_decomposition(field, int(p)):
            if P.norm_int <= bound:
                out.append(P)
    out.sort(key=lambda P: (P.norm_int, P.p, P.hnf))
    return out


# ---------------------------------------------------------------------------
# entry points implemented in sibling modules

def is_principal(a: Ideal):
    """A generator of a, or None when a is not principal (certified search)."""
    from .classgroup import find_generator
    return find_generator(a)


def unit_group(field: NumberField):
    from .units import unit_group as _ug
    return _ug(field)


def class_group(field: NumberField):
    from .rayclass import class_group as _cg
    return _cg(field)


def residue_unit_group(field: NumberField, m: int):
    from .rayclass import residue_unit_group as _rug
    return _rug(field, m)


def ray_class_group(field: NumberField, m: int, narrow: bool = False):
    from .rayclass import ray_class_group as _rcg
    return _rcg(field, m, narrow)
