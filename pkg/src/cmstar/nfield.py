"""Number fields defined by monic integer polynomials.

Elements are stored exactly as an integer coordinate vector in the power
basis 1, a, a^2, ... together with a positive common denominator.  The
maximal order is computed by the Round-2 (Pohst-Zassenhaus) algorithm and
stored as an integral basis in power-basis coordinates.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt, lcm
from typing import Sequence

import mpmath
import sympy

from .fgab import det, hnf_basis, matmul, solve_upper

DEFAULT_PREC = 212


class FieldError(ValueError):
    """Invalid field construction or input."""


def factor_integer(n: int) -> dict[int, int]:
    """Prime factorisation of a nonzero integer (sign dropped)."""
    n = abs(n)
    if n <= 1:
        return {}
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def kernel_mod_p(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {v in F_p^ncols : rows * v = 0}."""
    m = [[x % p for x in r] for r in rows]
    pivcols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivcols.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivcols]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivcols):
            v[c] = -m[i][f] % p
        basis.append(v)
    return basis


class NumberField:
    """Q[x]/(f) for a monic irreducible integer polynomial f.

    ``poly`` lists the coefficients from the constant term upwards.
    """

    def __init__(self, poly: Sequence[int], name: str = "a", check: bool = True):
        poly = [int(c) for c in poly]
        while len(poly) > 1 and poly[-1] == 0:
            poly.pop()
        if len(poly) < 2 or poly[-1] != 1:
            raise FieldError("defining polynomial must be monic of degree >= 1")
        self.poly = tuple(poly)
        self.degree = len(poly) - 1
        self.name = name
        if check and self.degree > 1:
            x = sympy.Symbol("x")
            if not sympy.Poly(list(reversed(poly)), x).is_irreducible:
                raise FieldError(f"polynomial {self.poly_str()} is reducible")
        self._prec_cache: dict[int, list] = {}

    # -- presentation
    def poly_str(self, var: str = "x") -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.poly[i]
            if c == 0:
                continue
            mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mon and abs(c) == 1:
                s = mon
            else:
                s = f"{abs(c)}{'*' + mon if mon else ''}"
            terms.append(("-" if c < 0 else "+", s))
        out = terms[0][1] if terms[0][0] == "+" else "-" + terms[0][1]
        for sgn, s in terms[1:]:
            out += f" {sgn} {s}"
        return out

    def __repr__(self) -> str:
        return f"NumberField({self.poly_str()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self) -> int:
        return hash(self.poly)

    # -- elements
    def elem(self, coords: Sequence, den: int = 1) -> "FieldElem":
        """Element from power-basis coordinates (ints or Fractions)."""
        coords = list(coords) + [0] * (self.degree - len(coords))
        if any(isinstance(c, Fraction) for c in coords):
            d = lcm(*(Fraction(c).denominator for c in coords))
            coords = [int(Fraction(c) * d) for c in coords]
            den *= d
        return FieldElem(self, coords, den)

    def one(self) -> "FieldElem":
        return self.elem([1])

    def zero(self) -> "FieldElem":
        return self.elem([0])

    def gen(self) -> "FieldElem":
        return self.elem([0, 1])

    def from_int_coords(self, v: Sequence) -> "FieldElem":
        """Element with coordinates ``v`` in the integral basis."""
        n = self.degree
        num = [0] * n
        den = 1
        fr = [Fraction(x) for x in v]
        d = lcm(*(x.denominator for x in fr)) if fr else 1
        iv = [int(x * d) for x in fr]
        for j in range(n):
            num[j] = sum(iv[i] * self.basis_num[i][j] for i in range(n))
        return FieldElem(self, num, self.basis_den * d)

    # -- polynomial data
    @cached_property
    def poly_disc(self) -> int:
        x = sympy.Symbol("x")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.poly)), x)))

    # -- maximal order
    @cached_property
    def _order(self) -> tuple[list[list[int]], int]:
        return maximal_order_basis(self)

    @property
    def basis_num(self) -> list[list[int]]:
        """Rows: integral basis elements as power-basis numerators."""
        return self._order[0]

    @property
    def basis_den(self) -> int:
        return self._order[1]

    @cached_property
    def integral_basis(self) -> list["FieldElem"]:
        return [FieldElem(self, row, self.basis_den) for row in self.basis_num]

    @cached_property
    def index(self) -> int:
        """[O_K : Z[a]]."""
        n = self.degree
        return self.basis_den ** n // abs(det(self.basis_num))

    @cached_property
    def disc(self) -> int:
        d = self.poly_disc
        return d // (self.index ** 2)

    @cached_property
    def _basis_cols_upper(self) -> list[list[int]]:
        # transpose of basis_num: column i = basis element i; upper triangular
        n = self.degree
        return [[self.basis_num[j][i] for j in range(n)] for i in range(n)]

    def int_coords(self, x: "FieldElem") -> list[Fraction]:
        """Integral-basis coordinates of ``x`` (rational in general)."""
        n = self.degree
        # solve B^T c = num * basis_den / den, upper triangular
        h = self._basis_cols_upper
        target = [c * self.basis_den for c in x.num]
        c = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            s = target[i] - sum(h[i][j] * c[j] for j in range(i + 1, n))
            c[i] = Fraction(s, h[i][i])
        return [v / x.den for v in c]

    def int_coords_integral(self, x: "FieldElem") -> list[int]:
        """Integral-basis coordinates of an algebraic integer."""
        c = self.int_coords(x)
        if any(v.denominator != 1 for v in c):
            raise ValueError("element is not integral")
        return [int(v) for v in c]

    @cached_property
    def mult_table(self) -> list[list[list[int]]]:
        """T[i][j] = integral-basis coordinates of w_i * w_j."""
        w = self.integral_basis
        n = self.degree
        t = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                t[i][j] = t[j][i] = self.int_coords_integral(w[i] * w[j])
        return t

    def mul_int(self, a: Sequence[int], b: Sequence[int], mod: int | None = None) -> list[int]:
        """Product of two elements given by integral-basis coordinates."""
        n = self.degree
        t = self.mult_table
        out = [0] * n
        for i in range(n):
            ai = a[i]
            if not ai:
                continue
            for j in range(n):
                c = ai * b[j]
                if c:
                    row = t[i][j]
                    for k in range(n):
                        out[k] += c * row[k]
        if mod:
            out = [x % mod for x in out]
        return out

    def mult_matrix_int(self, a: Sequence[int]) -> list[list[int]]:
        """Matrix (columns = images of basis) of multiplication by a, integral basis."""
        n = self.degree
        cols = [self.mul_int(a, [1 if k == j else 0 for k in range(n)]) for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    @cached_property
    def trace_matrix(self) -> list[list[int]]:
        n = self.degree
        w = self.integral_basis
        return [[int((w[i] * w[j]).trace()) for j in range(n)] for i in range(n)]

    # -- embeddings
    def signature(self) -> tuple[int, int]:
        roots = self.roots(64)
        r1 = sum(1 for z in roots if mpmath.im(z) == 0)
        return r1, (self.degree - r1) // 2

    def is_totally_real(self) -> bool:
        return self.signature()[1] == 0

    def is_totally_imaginary(self) -> bool:
        return self.signature()[0] == 0

    def roots(self, prec: int = DEFAULT_PREC) -> list:
        """Roots of the defining polynomial, ordered canonically.

        Real roots come first in ascending order, followed by complex pairs
        (z, conj z) with Im z > 0, ordered by decreasing |Im z| and then by
        real part.
        """
        if prec in self._prec_cache:
            return self._prec_cache[prec]
        with mpmath.workprec(prec + 20):
            roots = _roots(self.poly, prec)
        self._prec_cache[prec] = roots
        return roots

    def embeddings(self, prec: int = DEFAULT_PREC) -> "EmbeddingSet":
        return EmbeddingSet(self, prec, self.roots(prec))

    def minkowski_bound(self) -> float:
        from math import factorial, pi, sqrt
        n = self.degree
        r2 = self.signature()[1]
        return factorial(n) / n ** n * (4 / pi) ** r2 * sqrt(abs(self.disc))


def _roots(poly: Sequence[int], prec: int) -> list:
    n = len(poly) - 1
    mp = mpmath.mp
    if n == 1:
        return [mpmath.mpf(-poly[0])]
    if n == 2:
        c, b = poly[0], poly[1]
        d = b * b - 4 * c
        if d >= 0:
            s = mpmath.sqrt(d)
            return [(-b - s) / 2, (-b + s) / 2]
        s = mpmath.sqrt(-d)
        return [mpmath.mpc(-b / mpmath.mpf(2), s / 2), mpmath.mpc(-b / mpmath.mpf(2), -s / 2)]
    if n == 4 and poly[1] == 0 and poly[3] == 0:
        b, a = poly[0], poly[2]
        d = a * a - 4 * b
        if d > 0:
            s = mpmath.sqrt(d)
            t1, t2 = (-a - s) / 2, (-a + s) / 2  # roots in x^2
            if t1 < 0 and t2 < 0:
                y1, y2 = mpmath.sqrt(-t1), mpmath.sqrt(-t2)
                return [mpmath.mpc(0, y1), mpmath.mpc(0, -y1), mpmath.mpc(0, y2), mpmath.mpc(0, -y2)]
    coeffs = list(reversed(poly))
    rts = mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * prec)
    real, cplx = [], []
    eps = mpmath.mpf(2) ** (-prec // 2)
    for z in rts:
        z = mpmath.mpc(z)
        if abs(z.imag) < eps:
            real.append(mpmath.mpf(z.real))
        elif z.imag > 0:
            cplx.append(z)
    real.sort()
    cplx.sort(key=lambda z: (-z.imag, z.real))
    out = list(real)
    for z in cplx:
        out += [z, mpmath.conj(z)]
    if len(out) != n:
        raise FieldError("root isolation failed")
    return out


class FieldElem:
    """Exact element ``(num[0] + num[1] a + ...) / den`` of a NumberField."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: NumberField, num: Sequence[int], den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        num = [int(c) for c in num]
        if den < 0:
            num, den = [-c for c in num], -den
        g = gcd(den, *num)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self.field = field
        self.num = tuple(num)
        self.den = den

    # -- basics
    @property
    def coords(self) -> list[Fraction]:
        return [Fraction(c, self.den) for c in self.num]

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.elem([other])
        return isinstance(other, FieldElem) and self.field == other.field and \
            self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"FieldElem({self})"

    def __str__(self) -> str:
        var = self.field.name
        parts = []
        for i in range(len(self.num) - 1, -1, -1):
            c = Fraction(self.num[i], self.den)
            if c == 0:
                continue
            mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            mag = abs(c)
            if mon:
                s = mon if mag == 1 else f"{mag}*{mon}"
            else:
                s = str(mag)
            parts.append(("-" if c < 0 else "+", s))
        if not parts:
            return "0"
        out = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sg, s in parts[1:]:
            out += f" {sg} {s}"
        return out

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, int):
            return FieldElem(self.field, [other] + [0] * (self.field.degree - 1))
        if isinstance(other, Fraction):
            return FieldElem(self.field, [other.numerator] + [0] * (self.field.degree - 1),
                             other.denominator)
        return NotImplemented

    # -- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.den * o.den // gcd(self.den, o.den)
        a, b = d // self.den, d // o.den
        return FieldElem(self.field, [a * x + b * y for x, y in zip(self.num, o.num)], d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, [-x for x in self.num], self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prod_ = poly_mul(self.num, o.num)
        return FieldElem(self.field, _reduce_mod(prod_, self.field.poly), self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mult_matrix(self) -> list[list[int]]:
        """Integer matrix (columns = a^j * num) of multiplication in the power basis."""
        n = self.field.degree
        cols = []
        cur = list(self.num)
        for _ in range(n):
            cols.append(cur)
            cur = _reduce_mod([0] + cur, self.field.poly)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.field.degree
        m = [[Fraction(x) for x in row] for row in self.mult_matrix()]
        # solve M c = e_0 * den
        rhs = [Fraction(self.den if i == 0 else 0) for i in range(n)]
        aug = [m[i] + [rhs[i]] for i in range(n)]
        for c in range(n):
            piv = next(i for i in range(c, n) if aug[i][c] != 0)
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
        return self.field.elem([aug[i][n] for i in range(n)])

    def conj(self) -> "FieldElem":
        """The involution a -> -a (complex conjugation for even CM polynomials)."""
        p = self.field.poly
        if any(p[i] for i in range(1, len(p), 2)):
            raise FieldError("a -> -a is an automorphism only for even polynomials")
        return FieldElem(self.field, [(-c if i % 2 else c) for i, c in enumerate(self.num)], self.den)

    # -- invariants
    def norm(self) -> Fraction:
        n = self.field.degree
        return Fraction(det(self.mult_matrix()), self.den ** n)

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return Fraction(sum(m[i][i] for i in range(len(m))), self.den)

    def charpoly(self) -> list[Fraction]:
        """Characteristic polynomial coefficients, constant term first."""
        x = sympy.Symbol("x")
        m = sympy.Matrix(self.mult_matrix()) / self.den
        cp = m.charpoly(x).all_coeffs()
        return [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(cp)]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.field.int_coords(self))

    def int_coords(self) -> list[int]:
        return self.field.int_coords_integral(self)

    def evaluate(self, z) -> object:
        """Value of the coordinate polynomial at a complex/real number z."""
        acc = mpmath.mpf(0)
        for c in reversed(self.num):
            acc = acc * z + c
        return acc / self.den

    def embed(self, prec: int = DEFAULT_PREC) -> list:
        with mpmath.workprec(prec + 20):
            return [self.evaluate(z) for z in self.field.roots(prec)]

    def real_signs(self) -> tuple[int, ...]:
        """Signs of x at the real embeddings (in root order), decided exactly."""
        f = self.field
        if self.is_zero():
            raise ZeroDivisionError("sign of zero")
        if f.degree == 2 and f.poly[1] ** 2 - 4 * f.poly[0] > 0:
            return _quadratic_signs(self)
        r1 = f.signature()[0]
        prec = 128
        while True:
            vals = self.embed(prec)[:r1]
            tol = mpmath.mpf(2) ** (-prec // 2) * (1 + max(abs(v) for v in vals))
            if all(abs(v) > tol for v in vals):
                return tuple(1 if v > 0 else -1 for v in vals)
            prec *= 2
            if prec > 1 << 14:
                raise FieldError("sign determination did not converge")

    def is_totally_positive(self) -> bool:
        if self.is_zero():
            raise ZeroDivisionError("positivity of zero")
        if not self.field.is_totally_real():
            raise FieldError("total positivity needs a totally real field")
        return all(s > 0 for s in self.real_signs())


def _quadratic_signs(x: FieldElem) -> tuple[int, int]:
    # field Q[t]/(t^2 + b t + c), roots r_{1,2} = (-b -+ sqrt D)/2 in that order
    c, b = x.field.poly[0], x.field.poly[1]
    d = b * b - 4 * c
    u, v = x.num[0], x.num[1]
    # x = u + v r = (2u - v b)/2 -+ (v/2) sqrt(D)
    p = 2 * u - v * b
    out = []
    for s in (-1, 1):
        q = s * v
        out.append(_sign_p_q_sqrt(p, q, d))
    return tuple(out)


def _sign_p_q_sqrt(p: int, q: int, d: int) -> int:
    """Sign of p + q sqrt(d) for d > 0 nonsquare (or any d >= 0)."""
    if q == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return (q > 0) - (q < 0)
    if (p > 0) == (q > 0):
        return 1 if p > 0 else -1
    # opposite signs: compare p^2 and q^2 d
    lhs, rhs = p * p, q * q * d
    if lhs == rhs:
        return 0
    bigger_p = lhs > rhs
    return (1 if p > 0 else -1) if bigger_p else (1 if q > 0 else -1)


def _reduce_mod(c: list[int], poly: Sequence[int]) -> list[int]:
    n = len(poly) - 1
    c = list(c)
    for k in range(len(c) - 1, n - 1, -1):
        t = c[k]
        if t:
            for j in range(n):
                c[k - n + j] -= t * poly[j]
        c[k] = 0
    out = c[:n]
    return out + [0] * (n - len(out))


class EmbeddingSet:
    """Roots of the defining polynomial at a fixed working precision."""

    def __init__(self, field: NumberField, precision: int, values: list):
        self.field = field
        self.precision = precision
        self.values = values

    @property
    def error_bound(self):
        return mpmath.mpf(2) ** (1 - self.precision)

    def __len__(self) -> int:
        return len(self.values)

    def refine(self, precision: int) -> "EmbeddingSet":
        return self.field.embeddings(precision)


# ---------------------------------------------------------------------------
# Round 2

def _power_frobenius_kernel(f: NumberField, basis: list[list[Fraction]], table, p: int) -> list[list[int]]:
    """Radical of O/pO as kernel of x -> x^(p^j), p^j >= n."""
    n = f.degree
    q = p
    while q < n:
        q *= p
    rows_cols = []
    for i in range(n):
        e = [1 if k == i else 0 for k in range(n)]
        rows_cols.append(_pow_mod(e, q, table, p))
    # matrix with columns = images; kernel of that map
    mat = [[rows_cols[j][i] for j in range(n)] for i in range(n)]
    return kernel_mod_p(mat, n, p)


def _mul_table(a, b, table, mod=None):
    n = len(a)
    out = [0] * n
    for i in range(n):
        if a[i]:
            for j in range(n):
                c = a[i] * b[j]
                if c:
                    row = table[i][j]
                    for k in range(n):
                        out[k] += c * row[k]
    if mod:
        out = [x % mod for x in out]
    return out


def _pow_mod(e, k, table, p):
    n = len(e)
    result = None
    base = e
    while k:
        if k & 1:
            result = base if result is None else _mul_table(result, base, table, p)
        base = _mul_table(base, base, table, p)
        k >>= 1
    return result


def _order_table(cols: list[list[int]], den: int, poly) -> list:
    """Multiplication table of the lattice with basis columns/den (power basis)."""
    n = len(cols)
    f = NumberField(poly, check=False)
    elems = [FieldElem(f, c, den) for c in cols]
    # solve in basis: upper triangular matrix H (columns = basis numerators)
    h = [[cols[j][i] for j in range(n)] for i in range(n)]
    table = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            pr = elems[i] * elems[j]
            # pr = H c / den  => H c = pr.num * den / pr.den
            target = [Fraction(x * den, pr.den) for x in pr.num]
            c = [Fraction(0)] * n
            for r in range(n - 1, -1, -1):
                s = target[r] - sum(h[r][t] * c[t] for t in range(r + 1, n))
                c[r] = s / h[r][r]
            if any(x.denominator != 1 for x in c):
                raise ArithmeticError("lattice is not a ring")
            table[i][j] = table[j][i] = [int(x) for x in c]
    return table


def _canon_lattice(cols: list[list[int]], den: int) -> tuple[list[list[int]], int]:
    n = len(cols[0])
    mat = [[c[i] for c in cols] for i in range(n)]
    h = hnf_basis(mat)
    g = gcd(den, *[x for row in h for x in row])
    h = [[x // g for x in row] for row in h]
    den //= g
    return [[h[i][j] for i in range(n)] for j in range(n)], den


def maximal_order_basis(f: NumberField) -> tuple[list[list[int]], int]:
    """Integral basis rows (power-basis numerators) and common denominator."""
    n = f.degree
    cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    den = 1
    if n == 1:
        return cols, 1
    disc = f.poly_disc
    for p, e in factor_integer(disc).items():
        if e < 2:
            continue
        while True:
            table = _order_table(cols, den, f.poly)
            rad = _power_frobenius_kernel(f, None, table, p)
            # I_p in O-coordinates: radical lifts + p*O
            gens = rad + [[p if k == i else 0 for k in range(n)] for i in range(n)]
            imat = [[g[i] for g in gens] for i in range(n)]
            ih = hnf_basis(imat, p ** n)
            icols = [[ih[i][j] for i in range(n)] for j in range(n)]
            # map O/pO -> End(I/pI): w_i -> (v_k -> w_i v_k in I-coords) mod p
            rows = []
            for i in range(n):
                ei = [1 if k == i else 0 for k in range(n)]
                block = []
                for v in icols:
                    prod_ = _mul_table(ei, v, table)
                    c = solve_upper(ih, prod_)
                    if c is None:
                        raise ArithmeticError("radical is not an ideal")
                    block.extend(x % p for x in c)
                rows.append(block)
            # kernel of the linear map x -> sum x_i rows[i]
            mat = [[rows[i][r] for i in range(n)] for r in range(n * n)]
            ker = kernel_mod_p(mat, n, p)
            if not ker:
                break
            # new order = (U)/p where U = ker + pO, in O coordinates
            ugens = ker + [[p if k == i else 0 for k in range(n)] for i in range(n)]
            umat = [[g[i] for g in ugens] for i in range(n)]
            uh = hnf_basis(umat, p ** n)
            if all(uh[i][i] == p for i in range(n)):
                break
            # convert to power-basis columns: O basis H (cols/den); new = H * uh / (p den)
            hpow = [[cols[j][i] for j in range(n)] for i in range(n)]
            newmat = matmul(hpow, uh)
            newcols = [[newmat[i][j] for i in range(n)] for j in range(n)]
            cols, den = _canon_lattice(newcols, den * p)
    rows = cols  # column j of the HNF = basis element j
    return [list(r) for r in rows], den


def element_from_embeddings(field: NumberField, values: list, den: int = 1,
                            prec: int = DEFAULT_PREC) -> FieldElem | None:
    """Recover an element from its values at all roots (in root order).

    The integral-basis coordinates times ``den`` are rounded to integers; the
    caller must verify the result exactly.  Returns None when the rounding
    error is not small.
    """
    n = field.degree
    with mpmath.workprec(prec + 40):
        roots = field.roots(prec)
        w = field.integral_basis
        m = mpmath.matrix(n, n)
        for s in range(n):
            for i in range(n):
                m[s, i] = w[i].evaluate(roots[s])
        rhs = mpmath.matrix([mpmath.mpmathify(v) for v in values])
        sol = mpmath.lu_solve(m, rhs)
        coords = []
        for i in range(n):
            c = sol[i] * den
            r = int(mpmath.nint(mpmath.re(c)))
            if abs(c - r) > mpmath.mpf(2) ** (-prec // 4):
                return None
            coords.append(Fraction(r, den))
    return field.from_int_coords(coords)


class CMField(NumberField):
    """Quartic CM field Q[x]/(x^4 + A x^2 + B) with real subfield Q(a0), a0 = a^2.

    The subfield is presented as Q[y]/(y^2 + A y + B); the inclusion sends
    y to a^2.  Roots are ordered (i y1, -i y1, i y2, -i y2) with y1 > y2 > 0,
    and the real subfield roots ascending, so the first place of the real
    subfield is the restriction of the first complex place.
    """

    def __init__(self, a: int, b: int, name: str = "a"):
        self.A, self.B = int(a), int(b)
        d = self.A * self.A - 4 * self.B
        if self.A <= 0 or self.B <= 0 or d <= 0:
            raise FieldError("x^4 + A x^2 + B needs A > 0, B > 0 and A^2 - 4B > 0 to be CM")
        if is_square(d):
            raise FieldError("A^2 - 4B is a square: the real subfield is not a field")
        super().__init__([self.B, 0, self.A, 0, 1], name=name)
        self.K0 = NumberField([self.B, self.A, 1], name=name + "0")

    def __repr__(self) -> str:
        return f"CMField({self.A}, {self.B})"

    def embed_real(self, x: FieldElem) -> FieldElem:
        """Image of an element of the real subfield under a0 -> a^2."""
        c0, c1 = x.num
        return FieldElem(self, [c0, 0, c1, 0], x.den)

    def to_real(self, x: FieldElem) -> FieldElem:
        """Inverse of embed_real; x must lie in the real subfield."""
        if x.num[1] or x.num[3]:
            raise FieldError("element does not lie in the real subfield")
        return FieldElem(self.K0, [x.num[0], x.num[2]], x.den)

    def rel_norm(self, x: FieldElem) -> FieldElem:
        """x * conj(x) as an element of the real subfield."""
        return self.to_real(x * x.conj())

    def is_biquadratic(self) -> bool:
        return is_square(self.B)


def make_cm_field(a: int, b: int) -> tuple[CMField, NumberField]:
    k = CMField(a, b)
    return k, k.K0
