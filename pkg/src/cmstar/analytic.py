"""Genus-2 theta constants, Rosenhain and Igusa invariants, CM period matrices.

Theta constants are summed over the ellipsoid where the Gaussian factor is
above the target precision.  Igusa-Clebsch invariants are computed from the
six branch points 0, 1, lambda_1, lambda_2, lambda_3, infinity of the
Rosenhain model, after a Moebius change of variable that makes all of them
finite; the absolute invariants do not depend on that change.

A CM period matrix for (K, Phi) and an ideal a comes from a xi in K with
conj(xi) = -xi and xi O = (a conj(a) D)^-1, D the different: the form
E(x, y) = Tr(xi conj(x) y) is then integral and unimodular on a, a
symplectic basis of a for E is found by integer reduction, and the two
halves of that basis give Omega.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .classgroup import find_generator
from .fgab import hnf_basis
from .ideals import Ideal
from .nfield import CMField, FieldElem
from .rayclass import unit_generators

DEFAULT_PRECISION = int(os.environ.get("CMSTAR_PRECISION", "212"))

EVEN = (0, 1, 2, 3, 4, 6, 8, 9, 12, 15)
ODD = (5, 7, 10, 11, 13, 14)


class DegenerateError(ValueError):
    """Raised when a theta constant needed as a denominator vanishes."""


@dataclass
class PeriodMatrix:
    entries: list  # 2x2 nested list of mpc
    precision: int

    def __post_init__(self):
        with mpmath.workprec(self.precision):
            tol = mpmath.mpf(2) ** (4 - self.precision) * (1 + self.norm())
            if abs(self.entries[0][1] - self.entries[1][0]) > tol:
                raise ValueError("period matrix is not symmetric")
            y = self.imag()
            if not (y[0][0] > tol and y[0][0] * y[1][1] - y[0][1] * y[1][0] > tol):
                raise ValueError("imaginary part is not positive definite")

    def norm(self):
        return max(abs(x) for row in self.entries for x in row)

    def imag(self):
        return [[mpmath.im(x) for x in row] for row in self.entries]

    def matrix(self) -> mpmath.matrix:
        return mpmath.matrix(self.entries)


def make_period_matrix(rows, precision: int = DEFAULT_PRECISION, symmetrize: bool = False) -> PeriodMatrix:
    with mpmath.workprec(precision):
        e = [[mpmath.mpc(x) for x in row] for row in rows]
        if symmetrize:
            s = (e[0][1] + e[1][0]) / 2
            e[0][1] = e[1][0] = s
    return PeriodMatrix(e, precision)


def characteristic(i: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(a1, a2, b1, b2) for theta index i = 16 a2 + 8 a1 + 4 b2 + 2 b1."""
    h = Fraction(1, 2)
    return (h * ((i >> 2) & 1), h * ((i >> 3) & 1), h * (i & 1), h * ((i >> 1) & 1))


def is_even(i: int) -> bool:
    a1, a2, b1, b2 = characteristic(i)
    return (4 * (a1 * b1 + a2 * b2)) % 2 == 0


def theta_constant(i: int, om: PeriodMatrix, precision: int | None = None):
    """theta_i(0, Omega); odd characteristics give exactly 0."""
    if not is_even(i):
        return mpmath.mpc(0)
    return theta_series(i, om, precision)


def theta_series(i: int, om: PeriodMatrix, precision: int | None = None):
    """The theta series at z = 0 summed until the tail is below 2^-precision."""
    prec = precision or om.precision
    a1, a2, b1, b2 = characteristic(i)
    with mpmath.workprec(prec + 30):
        w = om.entries
        y = om.imag()
        lam = _min_eig(y)
        if lam <= 0:
            raise ValueError("imaginary part is not positive definite")
        # exp(-pi Q) < 2^-(prec+10) once Q > r2
        r2 = ((prec + 10) * mpmath.log(2) + 5) / mpmath.pi
        r = mpmath.sqrt(r2 / lam)
        bound = int(mpmath.ceil(r)) + 1
        total = mpmath.mpc(0)
        ipi = mpmath.mpc(0, 1) * mpmath.pi
        for n1 in range(-bound, bound + 1):
            x1 = n1 + mpmath.mpf(a1.numerator) / a1.denominator
            for n2 in range(-bound, bound + 1):
                x2 = n2 + mpmath.mpf(a2.numerator) / a2.denominator
                q = y[0][0] * x1 * x1 + 2 * y[0][1] * x1 * x2 + y[1][1] * x2 * x2
                if q > r2:
                    continue
                quad = w[0][0] * x1 * x1 + 2 * w[0][1] * x1 * x2 + w[1][1] * x2 * x2
                lin = x1 * (mpmath.mpf(b1.numerator) / b1.denominator) + x2 * (mpmath.mpf(b2.numerator) / b2.denominator)
                total += mpmath.exp(ipi * quad + 2 * ipi * lin)
        return +total


def _min_eig(y):
    a, b, d = y[0][0], y[0][1], y[1][1]
    tr = a + d
    disc = mpmath.sqrt((a - d) ** 2 + 4 * b * b)
    return (tr - disc) / 2


def theta_table(om: PeriodMatrix) -> list:
    return [theta_constant(i, om) for i in range(16)]


@dataclass
class RosenhainTriple:
    l1: object
    l2: object
    l3: object

    def as_list(self) -> list:
        return [self.l1, self.l2, self.l3]


def rosenhain(om: PeriodMatrix, thetas: list | None = None) -> RosenhainTriple:
    t = thetas or theta_table(om)
    with mpmath.workprec(om.precision):
        tol = mpmath.mpf(2) ** (-om.precision // 2)
        for i in (2, 3, 15):
            if abs(t[i]) < tol:
                raise DegenerateError(f"theta_{i} vanishes")
        l1 = (t[0] * t[1] / (t[2] * t[3])) ** 2
        l2 = (t[1] * t[12] / (t[2] * t[15])) ** 2
        l3 = (t[0] * t[12] / (t[3] * t[15])) ** 2
    return RosenhainTriple(l1, l2, l3)


def rosenhain_via_shared_factor(om: PeriodMatrix, thetas: list | None = None) -> RosenhainTriple:
    """Same triple using l3 = l1 * l2 * (theta_2 / theta_1)^4: an independent check."""
    t = thetas or theta_table(om)
    with mpmath.workprec(om.precision):
        l1 = (t[0] * t[1] / (t[2] * t[3])) ** 2
        l2 = (t[1] * t[12] / (t[2] * t[15])) ** 2
        l3 = l1 * l2 * (t[2] / t[1]) ** 4
    return RosenhainTriple(l1, l2, l3)


# ---------------------------------------------------------------------------
# Igusa-Clebsch invariants of a genus-2 curve from its branch points

def _pairings(s):
    if not s:
        yield []
        return
    a = s[0]
    for j in range(1, len(s)):
        rest = s[1:j] + s[j + 1:]
        for p in _pairings(rest):
            yield [(a, s[j])] + p


def _triples():
    out = []
    for t in itertools.combinations(range(6), 3):
        if 0 in t:
            out.append((t, tuple(i for i in range(6) if i not in t)))
    return out


def igusa_clebsch_from_roots(roots) -> tuple:
    """(I2, I4, I6, I10) of the monic sextic with the given six roots."""
    d = {}
    for i in range(6):
        for j in range(6):
            if i != j:
                d[i, j] = (roots[i] - roots[j]) ** 2
    i2 = sum(d[p[0]] * d[p[1]] * d[p[2]] for p in _pairings(list(range(6))))
    i4 = mpmath.mpc(0)
    i6 = mpmath.mpc(0)
    for t, u in _triples():
        tri = d[t[0], t[1]] * d[t[1], t[2]] * d[t[2], t[0]] * d[u[0], u[1]] * d[u[1], u[2]] * d[u[2], u[0]]
        i4 += tri
        for perm in itertools.permutations(u):
            i6 += tri * d[t[0], perm[0]] * d[t[1], perm[1]] * d[t[2], perm[2]]
    i10 = mpmath.mpc(1)
    for i in range(6):
        for j in range(i + 1, 6):
            i10 *= d[i, j]
    return i2, i4, i6, i10


def igusa_from_rosenhain(tr: RosenhainTriple, precision: int):
    """Absolute invariants (I2^5/I10, I2^3 I4/I10, I2^2 I6/I10) of the Rosenhain curve."""
    with mpmath.workprec(precision):
        c = mpmath.mpc(-mpmath.mpf(3) / 7, mpmath.mpf(5) / 11)
        finite = [mpmath.mpc(0), mpmath.mpc(1), tr.l1, tr.l2, tr.l3]
        roots = [1 / (x - c) for x in finite] + [mpmath.mpc(0)]
        i2, i4, i6, i10 = igusa_clebsch_from_roots(roots)
        if abs(i10) < mpmath.mpf(2) ** (-precision // 2) * (abs(i2) ** 5 + 1):
            raise DegenerateError("discriminant vanishes")
        return (i2 ** 5 / i10, i2 ** 3 * i4 / i10, i2 ** 2 * i6 / i10)


def igusa_invariants(om: PeriodMatrix):
    return igusa_from_rosenhain(rosenhain(om), om.precision)


# ---------------------------------------------------------------------------
# symplectic action (used to test invariance)

def act_symplectic(om: PeriodMatrix, a, b, c, d) -> PeriodMatrix:
    """(A Omega + B)(C Omega + D)^-1 for integer 2x2 blocks."""
    with mpmath.workprec(om.precision + 20):
        w = om.matrix()
        ma, mb, mc, md = (mpmath.matrix(x) for x in (a, b, c, d))
        r = (ma * w + mb) * mpmath.inverse(mc * w + md)
        rows = [[r[0, 0], r[0, 1]], [r[1, 0], r[1, 1]]]
    return make_period_matrix(rows, om.precision, symmetrize=True)


def translate(om: PeriodMatrix, s) -> PeriodMatrix:
    return act_symplectic(om, [[1, 0], [0, 1]], s, [[0, 0], [0, 0]], [[1, 0], [0, 1]])


def invert(om: PeriodMatrix) -> PeriodMatrix:
    return act_symplectic(om, [[0, 0], [0, 0]], [[-1, 0], [0, -1]], [[1, 0], [0, 1]], [[0, 0], [0, 0]])


def reduce_real_part(om: PeriodMatrix) -> PeriodMatrix:
    s = [[-int(mpmath.nint(mpmath.re(om.entries[i][j]))) for j in range(2)] for i in range(2)]
    return translate(om, s)


def _gauss_reduce(y):
    """Unimodular U (rows) making U Y U^T Lagrange-reduced."""
    b = [[1, 0], [0, 1]]

    def ip(u, v):
        return sum(u[i] * y[i][j] * v[j] for i in range(2) for j in range(2))

    while True:
        if ip(b[1], b[1]) < ip(b[0], b[0]):
            b = [b[1], b[0]]
        mu = int(mpmath.nint(ip(b[0], b[1]) / ip(b[0], b[0])))
        if mu == 0:
            break
        b[1] = [b[1][0] - mu * b[0][0], b[1][1] - mu * b[0][1]]
    if b[0][0] * b[1][1] - b[0][1] * b[1][0] < 0:
        b[1] = [-b[1][0], -b[1][1]]
    return b


def siegel_reduce(om: PeriodMatrix, extra: int = 0, max_iter: int = 200) -> PeriodMatrix:
    """An Sp4(Z)-equivalent matrix with reduced imaginary part, |Re| <= 1/2 and |Omega_11| >= 1."""
    prec = om.precision + extra
    with mpmath.workprec(prec + 20):
        w = mpmath.matrix(om.entries)
        one = mpmath.mpf(1)
        for _ in range(max_iter):
            y = [[mpmath.im(w[i, j]) for j in range(2)] for i in range(2)]
            u = mpmath.matrix(_gauss_reduce(y))
            w = u * w * u.T
            for i in range(2):
                for j in range(2):
                    w[i, j] -= mpmath.nint(mpmath.re(w[i, j]))
            if abs(w[0, 0]) < one - mpmath.mpf(2) ** (-prec // 2):
                a = mpmath.matrix([[0, 0], [0, 1]])
                bb = mpmath.matrix([[-1, 0], [0, 0]])
                c = mpmath.matrix([[1, 0], [0, 0]])
                d = mpmath.matrix([[0, 0], [0, 1]])
                w = (a * w + bb) * mpmath.inverse(c * w + d)
                continue
            break
        else:
            raise ArithmeticError("Siegel reduction did not terminate")
        rows = [[w[0, 0], w[0, 1]], [w[1, 0], w[1, 1]]]
    return make_period_matrix(rows, om.precision, symmetrize=True)


# ---------------------------------------------------------------------------
# CM period matrices

def codifferent(field) -> Ideal:
    """{x : Tr(x O) in Z}, the inverse of the different."""
    n = field.degree
    tq = [[Fraction(x) for x in row] for row in field.trace_matrix]
    inv = _inverse_fraction(tq)
    w = field.integral_basis
    gens = []
    for i in range(n):
        e = field.zero()
        for j in range(n):
            e = e + w[j] * inv[j][i]
        gens.append(e)
    return Ideal.from_gens(field, gens)


def _inverse_fraction(m):
    n = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def polarization(phi, a: Ideal) -> FieldElem | None:
    """xi with conj(xi) = -xi, Im phi(xi) > 0 on Phi and xi O = (a conj(a) D)^-1."""
    k = phi.field
    target = (a * a.conj()).inverse() * codifferent(k)
    xi0 = find_generator(target)
    if xi0 is None:
        return None
    _, gens = unit_generators(k)
    tors, fund = gens[0], gens[1:]
    cands = []
    for t in range(_torsion_order(tors)):
        for e in range(-2, 3):
            u = tors ** t * (fund[0] ** e if fund else k.one())
            cands.append(xi0 * u)
    for xi in cands:
        if xi.conj() != -xi:
            continue
        vals = phi.values(xi, 128)
        if all(mpmath.im(v) > 0 for v in vals):
            return xi
    return None


def _torsion_order(z: FieldElem) -> int:
    k, p = 1, z
    while p != z.field.one():
        p = p * z
        k += 1
    return k


def _symplectic_basis(e: list[list[int]]) -> list[list[int]]:
    """Integer change of basis (rows = new vectors e1, e2, f1, f2) making E standard."""
    n = len(e)

    def form(x, y):
        return sum(x[i] * e[i][j] * y[j] for i in range(n) for j in range(n))

    vecs = [[int(i == j) for j in range(n)] for i in range(n)]
    es, fs = [], []
    while vecs:
        v = next((x for x in vecs if any(form(x, y) for y in vecs)), None)
        if v is None:
            raise ValueError("form is degenerate")
        row = [form(v, y) for y in vecs]
        # combine vecs to get w with form(v, w) = 1
        coeffs = _bezout_vector(row)
        w = [sum(c * y[i] for c, y in zip(coeffs, vecs)) for i in range(n)]
        if form(v, w) != 1:
            raise ValueError("form is not unimodular")
        es.append(v)
        fs.append(w)
        rest = []
        for x in vecs:
            y = [x[i] - form(v, x) * w[i] + form(w, x) * v[i] for i in range(n)]
            rest.append(y)
        # a basis of the orthogonal complement from the projected vectors
        h = hnf_basis([[r[i] for r in rest] for i in range(n)])
        cols = [[h[i][j] for i in range(n)] for j in range(len(h[0]))] if h and h[0] else []
        vecs = [c for c in cols if any(c)]
    return es + fs


def _bezout_vector(row: list[int]) -> list[int]:
    coeffs = [0] * len(row)
    g = 0
    for i, r in enumerate(row):
        if r == 0:
            continue
        if g == 0:
            g, coeffs = r, [int(j == i) for j in range(len(row))]
            continue
        from .fgab import xgcd
        u, v, d = xgcd(g, r)
        coeffs = [u * c for c in coeffs]
        coeffs[i] += v
        g = d
    if g < 0:
        coeffs = [-c for c in coeffs]
    return coeffs


def riemann_form_matrix(xi: FieldElem, basis: list[FieldElem]) -> list[list[int]]:
    """E(b_i, b_j) = Tr(xi conj(b_i) b_j); raises if not integral."""
    out = []
    for x in basis:
        row = []
        for y in basis:
            t = (xi * x.conj() * y).trace()
            if t.denominator != 1:
                raise ValueError("Riemann form is not integral on the lattice")
            row.append(int(t))
        out.append(row)
    return out


def period_matrix(phi, a: Ideal, precision: int = DEFAULT_PRECISION) -> PeriodMatrix:
    """A period matrix of C^2 / Phi(a) with the principal polarization from xi."""
    xi = polarization(phi, a)
    if xi is None:
        raise ValueError("no principal polarization of this shape exists for the ideal")
    basis = a.basis_elements()
    e = riemann_form_matrix(xi, basis)
    from .fgab import det
    if abs(det(e)) != 1:
        raise ValueError("Riemann form is not unimodular")
    change = _symplectic_basis(e)
    sb = []
    for row in change:
        x = phi.field.zero()
        for c, b in zip(row, basis):
            x = x + b * c
        sb.append(x)
    # check E is standard on the new basis
    es = riemann_form_matrix(xi, sb)
    std = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    if es != std:
        raise ArithmeticError("symplectic reduction failed")
    work = 2 * precision + 64
    with mpmath.workprec(work):
        cols = [phi.values(x, work) for x in sb]
        m1 = mpmath.matrix([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
        m2 = mpmath.matrix([[cols[2][0], cols[3][0]], [cols[2][1], cols[3][1]]])
        for first, second in ((m2, m1), (m1, m2)):
            om = mpmath.inverse(second) * first
            rows = [[om[0, 0], om[0, 1]], [om[1, 0], om[1, 1]]]
            try:
                raw = make_period_matrix(rows, work)
            except ValueError:
                continue
            red = siegel_reduce(raw)
            return make_period_matrix(red.entries, precision)
    raise ArithmeticError("no orientation gives a matrix in the Siegel upper half space")
