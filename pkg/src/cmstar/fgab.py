"""Finitely generated abelian groups over exact integer matrices.

Matrices are plain lists of rows of Python ints.  A group is presented as
``Z^k / (column span of a relation matrix)``; the Smith normal form of the
relations gives the invariant factors and the discrete logarithm.

Column Hermite normal form follows Cohen's convention: upper triangular,
positive pivots, and entries to the right of each pivot reduced into
``[0, pivot)``.
"""

from __future__ import annotations

from itertools import product
from math import gcd, prod
from typing import Callable, Iterable, Sequence

Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# small matrix helpers

def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (u, v, d) with u*a + v*b = d = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -x0, -y0, -a
    return x0, y0, a


def _bezout(a: int, b: int) -> tuple[int, int, int]:
    """Like xgcd, but returns (sign, 0, |a|) when a divides b.

    Keeping the pivot row/column in place in that case guarantees that the
    elimination loops make progress.
    """
    if a and b % a == 0:
        return (1 if a > 0 else -1), 0, abs(a)
    return xgcd(a, b)


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def transpose(m: Matrix, nrows: int | None = None) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    bt = transpose(b) if b else []
    ncols = len(b[0]) if b else 0
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] if ncols else []
            for row in a]


def matvec(a: Matrix, v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def columns(m: Matrix, nrows: int) -> list[list[int]]:
    if not m or not m[0]:
        return []
    return [list(c) for c in zip(*m)]


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> Matrix:
    if not cols:
        return [[] for _ in range(nrows)]
    return [[c[i] for c in cols] for i in range(nrows)]


def det(m: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Hermite normal form

def hnf_with_transform(m: Matrix) -> tuple[Matrix, Matrix]:
    """Column HNF with a unimodular transform.

    Returns ``(A, T)`` where ``A = m * T``.  The nonzero columns of ``A`` sit
    at the right end and form the Hermite normal form; the leading columns of
    ``T`` (those matching zero columns of ``A``) are a basis of the integer
    kernel of ``m``.
    """
    nr = len(m)
    nc = len(m[0]) if nr else 0
    cols = [[m[i][j] for i in range(nr)] for j in range(nc)]
    tr = [[1 if i == j else 0 for i in range(nc)] for j in range(nc)]  # columns of T

    def comb(j: int, k: int, u: int, v: int, s: int, t: int) -> None:
        # (col_j, col_k) <- (s*col_j + t*col_k, u*col_j + v*col_k)
        cj, ck = cols[j], cols[k]
        cols[j] = [s * x + t * y for x, y in zip(cj, ck)]
        cols[k] = [u * x + v * y for x, y in zip(cj, ck)]
        tj, tk = tr[j], tr[k]
        tr[j] = [s * x + t * y for x, y in zip(tj, tk)]
        tr[k] = [u * x + v * y for x, y in zip(tj, tk)]

    k = nc - 1
    for i in range(nr - 1, -1, -1):
        if k < 0:
            break
        for j in range(k - 1, -1, -1):
            a, b = cols[k][i], cols[j][i]
            if b == 0:
                continue
            u, v, d = _bezout(a, b)
            # new col_k = u*col_k + v*col_j ; new col_j = (a/d) col_j - (b/d) col_k
            comb(j, k, v, u, a // d, -(b // d))
        piv = cols[k][i]
        if piv == 0:
            continue
        if piv < 0:
            cols[k] = [-x for x in cols[k]]
            tr[k] = [-x for x in tr[k]]
            piv = -piv
        for j in range(k + 1, nc):
            q = cols[j][i] // piv
            if q:
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[k])]
                tr[j] = [x - q * y for x, y in zip(tr[j], tr[k])]
        k -= 1
    a = [[cols[j][i] for j in range(nc)] for i in range(nr)]
    t = [[tr[j][i] for j in range(nc)] for i in range(nc)]
    return a, t


def _hnf_plain(m: Matrix) -> Matrix:
    nr = len(m)
    nc = len(m[0]) if nr else 0
    cols = [[m[i][j] for i in range(nr)] for j in range(nc)]
    out: list[list[int]] = []
    pivots: list[int] = []
    for i in range(nr - 1, -1, -1):
        live = [c for c in cols if any(c)]
        cand = [c for c in live if c[i]]
        if not cand:
            cols = live
            continue
        rest = [c for c in live if not c[i]]
        piv = cand[0]
        for c in cand[1:]:
            u, v, d = _bezout(piv[i], c[i])
            a, b = piv[i] // d, c[i] // d
            newp = [u * x + v * y for x, y in zip(piv, c)]
            other = [a * y - b * x for x, y in zip(piv, c)]
            piv = newp
            if any(other):
                rest.append(other)
        if piv[i] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        pivots.append(i)
        cols = rest
    return _finish_hnf(out, pivots, nr)


def _finish_hnf(out: list[list[int]], pivots: list[int], nr: int) -> Matrix:
    # out[t] has pivot row pivots[t]; pivots decreasing.  Reduce rightward.
    out = out[::-1]
    pivots = pivots[::-1]
    r = len(out)
    for t in range(r - 1, -1, -1):
        i, p = pivots[t], out[t][pivots[t]]
        for s in range(t + 1, r):
            q = out[s][i] // p
            if q:
                out[s] = [x - q * y for x, y in zip(out[s], out[t])]
    return from_columns(out, nr)


def hnf(m: Matrix, modulus: int | None = None) -> Matrix:
    """Column Hermite normal form of ``m``.

    The result has ``min(rows, cols)`` columns: when ``m`` is rank deficient
    the basis is padded on the left with zero columns, so ``[[0]]`` maps to
    itself.  See :func:`hnf_basis` for the variant without padding.
    """
    nr = len(m)
    if nr == 0:
        return []
    h = hnf_basis(m, modulus)
    nc = len(m[0])
    width = min(nr, nc)
    r = len(h[0]) if h and h[0] else 0
    if r >= width:
        return h
    return [[0] * (width - r) + row for row in h]


def hnf_basis(m: Matrix, modulus: int | None = None) -> Matrix:
    """Column Hermite normal form of ``m`` (zero columns removed).

    With ``modulus`` D a nonzero multiple of the lattice determinant of a
    full-rank lattice, entries are kept reduced modulo D during elimination
    (the lattice spanned by ``m`` must contain ``D * Z^n``).
    """
    nr = len(m)
    if nr == 0:
        return []
    if modulus:
        return _hnf_mod(m, abs(modulus))
    return _hnf_plain(m)


def _hnf_mod(m: Matrix, d: int) -> Matrix:
    nr = len(m)
    cols = [[x % d for x in c] for c in columns(m, nr)]
    out: list[list[int]] = []
    pivots: list[int] = []
    r = d
    for i in range(nr - 1, -1, -1):
        # gcd-combine all entries of row i together with r (the lattice has r*e_i mod lower rows)
        piv = [0] * nr
        piv[i] = r
        rest = []
        for c in cols:
            if c[i] % r == 0:
                c = [x % r for x in c]
                if any(c[:i]):
                    rest.append(c)
                continue
            u, v, g = _bezout(piv[i], c[i])
            a, b = piv[i] // g, c[i] // g
            newp = [(u * x + v * y) % r for x, y in zip(piv, c)]
            other = [(a * y - b * x) % r for x, y in zip(piv, c)]
            newp[i] = g
            piv = newp
            if any(other[:i]):
                rest.append(other)
        g = piv[i]
        out.append(piv)
        pivots.append(i)
        cols = rest
        r //= g
        cols = [[x % r for x in c] for c in cols]
    # each pivot column stored mod the running modulus; the true lattice
    # contains (D/prod(previous pivots)) e_i-type vectors, so finishing the
    # reduction yields the correct HNF.
    return _finish_hnf(out, pivots, nr)


def is_hnf(m: Matrix) -> bool:
    nr = len(m)
    if nr == 0:
        return True
    nc = len(m[0])
    if nc != nr:
        return False
    for i in range(nr):
        if m[i][i] <= 0:
            return False
        for j in range(i):
            if m[i][j] != 0:
                return False
        for j in range(i + 1, nr):
            if not 0 <= m[i][j] < m[i][i]:
                return False
    return True


def solve_upper(h: Matrix, x: Sequence[int]) -> list[int] | None:
    """Solve h*c = x over Z for square upper-triangular h; None if no solution."""
    n = len(h)
    x = list(x)
    c = [0] * n
    for i in range(n - 1, -1, -1):
        s = x[i] - sum(h[i][j] * c[j] for j in range(i + 1, n))
        if s % h[i][i]:
            return None
        c[i] = s // h[i][i]
    return c


def integer_kernel(m: Matrix, ncols: int | None = None) -> list[list[int]]:
    """Basis (list of vectors) of {x in Z^c : m x = 0}."""
    if not m:
        c = ncols or 0
        return [[1 if i == j else 0 for i in range(c)] for j in range(c)]
    a, t = hnf_with_transform(m)
    nc = len(m[0])
    basis = []
    for j in range(nc):
        if all(a[i][j] == 0 for i in range(len(m))):
            basis.append([t[i][j] for i in range(nc)])
    return basis


# ---------------------------------------------------------------------------
# Smith normal form

def snf(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form with certificates.

    Returns ``(D, U, V)`` with ``U * m * V == D``; U, V unimodular, D diagonal
    with nonnegative entries d1 | d2 | ... (ascending, zeros last).
    """
    d, u, v, _ = _snf_full(m)
    return d, u, v


def _snf_full(m: Matrix) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    nr = len(m)
    nc = len(m[0]) if nr else 0
    a = [row[:] for row in m]
    u = identity(nr)
    uinv = identity(nr)
    v = identity(nc)

    def row_comb(i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        # rows (i, j) <- (p*row_i + q*row_j, r*row_i + s*row_j), det = ps - qr = 1
        for mat in (a, u):
            ri, rj = mat[i], mat[j]
            mat[i] = [p * x + q * y for x, y in zip(ri, rj)]
            mat[j] = [r * x + s * y for x, y in zip(ri, rj)]
        # inverse acts on columns of uinv: cols (i, j) <- (s*c_i - r*c_j, -q*c_i + p*c_j)
        for row in uinv:
            ci, cj = row[i], row[j]
            row[i] = s * ci - r * cj
            row[j] = -q * ci + p * cj

    def col_comb(i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        for mat in (a, v):
            for row in mat:
                ci, cj = row[i], row[j]
                row[i] = p * ci + q * cj
                row[j] = r * ci + s * cj

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            for mat in (a, u):
                mat[i], mat[j] = mat[j], mat[i]
            for row in uinv:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for mat in (a, v):
                for row in mat:
                    row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        # pivot: smallest nonzero in the lower-right block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    x, y = a[t][t], a[i][t]
                    p, q, g = _bezout(x, y)
                    row_comb(t, i, p, q, -(y // g), x // g)
                    done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    x, y = a[t][t], a[t][j]
                    p, q, g = _bezout(x, y)
                    col_comb(t, j, p, q, -(y // g), x // g)
                    done = False
            if done and all(a[i][t] == 0 for i in range(t + 1, nr)):
                piv = a[t][t]
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                row_comb(t, bad, 1, 1, 0, 1)
        if a[t][t] < 0:
            for mat in (a, u):
                mat[t] = [-x for x in mat[t]]
            for row in uinv:
                row[t] = -row[t]
        t += 1
    return a, u, v, uinv


# ---------------------------------------------------------------------------
# groups

class AbGroup:
    """Finitely generated abelian group ``Z^k / L`` with standard generators.

    ``relations`` is a k x r matrix whose columns span L.  The group is
    presented on its invariant factors d1, d2, ... in descending order with
    d_{i+1} | d_i, where 0 stands for an infinite cyclic factor.  Standard
    coordinates are vectors in prod Z/d_i.

    ``gens`` and ``handle_to_base`` optionally attach concrete elements: the
    group can then take discrete logarithms of opaque handles.
    """

    def __init__(self, relations: Matrix, nbase: int | None = None,
                 handle_to_base: Callable | None = None, base_handles: Sequence | None = None):
        k = len(relations) if nbase is None else nbase
        if k and relations and relations[0]:
            rel = [list(r) for r in relations]
        else:
            rel = [[] for _ in range(k)]
        self.nbase = k
        if k and rel[0]:
            d, u, _, uinv = _snf_full(rel)
            diag = [d[i][i] if i < len(d[0]) else 0 for i in range(k)]
        else:
            u, uinv = identity(k), identity(k)
            diag = [0] * k
        keep = [i for i in range(k) if diag[i] != 1]
        keep.reverse()  # descending: zeros (free part) first, then largest finite
        keep.sort(key=lambda i: (diag[i] != 0, -diag[i]))
        self.invariants: tuple[int, ...] = tuple(diag[i] for i in keep)
        # base coords -> standard coords
        self._to_std = []
        for i in keep:
            row = u[i]
            if diag[i]:
                row = [x % diag[i] for x in row]
            self._to_std.append(row)
        # standard generators in base coordinates (columns of U^{-1})
        self._gens_base = [[uinv[r][i] for i in keep] for r in range(k)]
        self.handle_to_base = handle_to_base
        self.base_handles = list(base_handles) if base_handles is not None else None

    # -- basic data
    @property
    def ngens(self) -> int:
        return len(self.invariants)

    def order(self) -> int:
        """Group order; 0 when the group is infinite."""
        if any(d == 0 for d in self.invariants):
            return 0
        return prod(self.invariants)

    def is_finite(self) -> bool:
        return all(self.invariants)

    def exponent(self) -> int:
        if not self.invariants:
            return 1
        return self.invariants[0]

    def __repr__(self) -> str:
        return f"AbGroup{list(self.invariants)}"

    def __str__(self) -> str:
        if not self.invariants:
            return "trivial"
        return " x ".join("Z" if d == 0 else f"C{d}" for d in self.invariants)

    # -- coordinates
    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(v % d if d else v for v, d in zip(x, self.invariants))

    def from_base(self, v: Sequence[int]) -> tuple[int, ...]:
        """Standard coordinates of the element given in base coordinates."""
        return self.reduce(matvec(self._to_std, v))

    def to_base(self, x: Sequence[int]) -> list[int]:
        return matvec(self._gens_base, x) if self.nbase else []

    def dlog(self, h) -> tuple[int, ...]:
        if self.handle_to_base is None:
            raise TypeError("group has no handle discrete logarithm attached")
        return self.from_base(self.handle_to_base(h))

    def unit(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.ngens))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def add(self, x, y) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(x, y)])

    def neg(self, x) -> tuple[int, ...]:
        return self.reduce([-a for a in x])

    def scale(self, k: int, x) -> tuple[int, ...]:
        return self.reduce([k * a for a in x])

    def element_order(self, x) -> int:
        o = 1
        for v, d in zip(self.reduce(x), self.invariants):
            if d == 0:
                if v:
                    return 0
                continue
            o = o * (d // gcd(v, d)) // gcd(o, d // gcd(v, d))
        return o

    def elements(self) -> Iterable[tuple[int, ...]]:
        if not self.is_finite():
            raise ValueError("cannot enumerate an infinite group")
        return product(*(range(d) for d in self.invariants))

    def relation_matrix(self) -> Matrix:
        """Diagonal relation columns d_i e_i (zero columns omitted)."""
        n = self.ngens
        cols = [[d if j == i else 0 for j in range(n)] for i, d in enumerate(self.invariants) if d]
        return from_columns(cols, n)

    def isomorphic(self, other: "AbGroup") -> bool:
        return self.invariants == other.invariants


def group_from_relations(n_gens: int, relations: Matrix, **kw) -> AbGroup:
    """Z^n_gens modulo the column span of ``relations``."""
    if relations and len(relations) != n_gens:
        raise ValueError("relations must have n_gens rows")
    return AbGroup(relations, nbase=n_gens, **kw)


def cyclic(n: int) -> AbGroup:
    return AbGroup([[n]], nbase=1)


def product_group(*invs: int) -> AbGroup:
    k = len(invs)
    return AbGroup([[d if i == j else 0 for j in range(k)] for i, d in enumerate(invs)], nbase=k)


class Subgroup:
    """Subgroup of an AbGroup, stored by the canonical HNF of its lattice.

    The lattice is the preimage in Z^n (standard coordinates) and therefore
    always contains the relation columns d_i e_i of the ambient group.
    """

    def __init__(self, ambient: AbGroup, hnf_matrix: Matrix):
        self.ambient = ambient
        self.hnf = hnf_matrix

    @classmethod
    def generated_by(cls, g: AbGroup, gens: Iterable[Sequence[int]]) -> "Subgroup":
        n = g.ngens
        cols = [list(x) for x in gens]
        cols += [[d if j == i else 0 for j in range(n)] for i, d in enumerate(g.invariants) if d]
        cols = [c for c in cols if any(c)]
        if n == 0:
            return cls(g, [])
        if not cols:
            return cls(g, [[] for _ in range(n)])
        m = from_columns(cols, n)
        mod = g.order() if g.is_finite() else None
        return cls(g, hnf_basis(m, mod))

    @classmethod
    def whole(cls, g: AbGroup) -> "Subgroup":
        return cls.generated_by(g, [g.unit(i) for i in range(g.ngens)])

    @classmethod
    def trivial(cls, g: AbGroup) -> "Subgroup":
        return cls.generated_by(g, [])

    def gens(self) -> list[tuple[int, ...]]:
        n = self.ambient.ngens
        return [self.ambient.reduce(c) for c in columns(self.hnf, n)]

    def index(self) -> int:
        """[G : S]; 0 if infinite."""
        n = self.ambient.ngens
        cols = columns(self.hnf, n)
        if len(cols) < n:
            return 0
        return prod(self.hnf[i][i] for i in range(n))

    def order(self) -> int:
        g = self.ambient
        if not g.is_finite():
            raise ValueError("order of a subgroup of an infinite group")
        return g.order() // self.index()

    def contains(self, x: Sequence[int]) -> bool:
        n = self.ambient.ngens
        if n == 0:
            return True
        cols = columns(self.hnf, n)
        if len(cols) == n:
            return solve_upper(self.hnf, x) is not None
        return _in_lattice(self.hnf, list(x))

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.hnf == other.hnf

    def __hash__(self):
        return hash(tuple(map(tuple, self.hnf)))

    def as_group(self) -> AbGroup:
        """The subgroup as an abstract group; base generators = HNF columns."""
        g = self.ambient
        n = g.ngens
        cols = columns(self.hnf, n)
        r = len(cols)
        lam = [c for c in columns(g.relation_matrix(), n)]
        # relations among the columns: c with H c in Lambda_G
        if not lam:
            rel = []
        else:
            big = [self.hnf[i] + [-x for x in lr] for i, lr in enumerate(from_columns(lam, n))]
            ker = integer_kernel(big)
            rel = [v[:r] for v in ker]
        relm = from_columns(rel, r) if rel else [[] for _ in range(r)]
        sub = AbGroup(relm, nbase=r)
        return sub

    def coords(self, x: Sequence[int]) -> list[int] | None:
        """Coefficients c with HNF * c = x (x any representative in S)."""
        n = self.ambient.ngens
        if len(columns(self.hnf, n)) == n:
            return solve_upper(self.hnf, x)
        return _solve_lattice(self.hnf, list(x))

    def describe(self) -> str:
        return str(self.as_group())


def _solve_lattice(h: Matrix, x: list[int]) -> list[int] | None:
    n = len(h)
    cols = columns(h, n)
    if not cols:
        return [] if not any(x) else None
    m = [h[i] + [x[i]] for i in range(n)]
    ker = integer_kernel(m)
    r = len(cols)
    # look for a kernel vector with last coordinate -1 (gcd combination)
    lasts = [v[r] for v in ker]
    g = 0
    coeffs = []
    for v in lasts:
        coeffs.append(v)
    # combine kernel vectors to get last coord = -1
    acc = [0] * (r + 1)
    cur = 0
    for v in ker:
        if v[r] == 0:
            continue
        u, w, d = xgcd(cur, v[r])
        acc = [u * a + w * b for a, b in zip(acc, v)]
        cur = d
    if cur != 1:
        return None
    return [-a for a in acc[:r]]


def _in_lattice(h: Matrix, x: list[int]) -> bool:
    return _solve_lattice(h, x) is not None


class Morphism:
    """Homomorphism between AbGroups in standard coordinates.

    ``matrix`` has one column per standard generator of the domain, holding
    its image in the codomain's standard coordinates.
    """

    def __init__(self, domain: AbGroup, codomain: AbGroup, matrix: Matrix, check: bool = True):
        self.domain = domain
        self.codomain = codomain
        n = codomain.ngens
        self.matrix = [list(r) for r in matrix] if n else []
        if check and not self.is_well_defined():
            raise ValueError("matrix does not define a homomorphism")

    @classmethod
    def from_images(cls, domain: AbGroup, codomain: AbGroup, images: Sequence[Sequence[int]],
                    check: bool = True) -> "Morphism":
        return cls(domain, codomain, from_columns([codomain.reduce(x) for x in images], codomain.ngens),
                   check=check)

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self.matrix]

    def is_well_defined(self) -> bool:
        for j, d in enumerate(self.domain.invariants):
            img = self.codomain.reduce([d * x for x in self.column(j)])
            if any(img):
                return False
        return True

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        if not self.codomain.ngens:
            return ()
        return self.codomain.reduce(matvec(self.matrix, x))

    def image(self) -> Subgroup:
        return Subgroup.generated_by(self.codomain, [self.column(j) for j in range(self.domain.ngens)])

    def compose(self, other: "Morphism") -> "Morphism":
        """self o other."""
        cols = [self(other.column(j)) if other.codomain.ngens else self([]) for j in range(other.domain.ngens)]
        return Morphism.from_images(other.domain, self.codomain, cols)


def _preimage_lattice(f: Morphism, target_cols: list[list[int]]) -> Subgroup:
    g, h = f.domain, f.codomain
    n, k = g.ngens, h.ngens
    if k == 0 or (not target_cols and not any(any(r) for r in f.matrix)):
        return Subgroup.whole(g)
    if n == 0:
        return Subgroup.trivial(g)
    big = [f.matrix[i] + [-c[i] for c in target_cols] for i in range(k)]
    ker = integer_kernel(big)
    gens = [v[:n] for v in ker]
    return Subgroup.generated_by(g, gens)


def solve_preimage(f: Morphism, y: Sequence[int]) -> tuple[int, ...] | None:
    """Some x in the domain with f(x) = y, or None if y is not in the image."""
    g, h = f.domain, f.codomain
    n, k = g.ngens, h.ngens
    if k == 0 or not any(h.reduce(y)):
        return g.zero()
    lam = columns(h.relation_matrix(), k)
    cols = [f.column(j) for j in range(n)] + lam
    if not cols:
        return None
    big = [[c[i] for c in cols] + [-y[i]] for i in range(k)]
    ker = integer_kernel(big)
    m = len(cols)
    acc = [0] * (m + 1)
    cur = 0
    for v in ker:
        if v[m] == 0:
            continue
        u, w, d = xgcd(cur, v[m])
        acc = [u * a + w * b for a, b in zip(acc, v)]
        cur = d
    if abs(cur) != 1:
        return None
    if cur == -1:
        acc = [-a for a in acc]
    x = g.reduce(acc[:n])
    if f(x) != h.reduce(y):
        raise ArithmeticError("preimage solver produced an inconsistent answer")
    return x


def morphism_kernel(f: Morphism) -> Subgroup:
    h = f.codomain
    lam = columns(h.relation_matrix(), h.ngens)
    return _preimage_lattice(f, lam)


def inverse_image(f: Morphism, s: Subgroup) -> Subgroup:
    if s.ambient is not f.codomain and s.ambient.invariants != f.codomain.invariants:
        raise ValueError("subgroup must live in the codomain")
    return _preimage_lattice(f, columns(s.hnf, f.codomain.ngens))


def quotient_group(g: AbGroup, s: Subgroup) -> AbGroup:
    """G/S with base generators = standard generators of G."""
    n = g.ngens
    cols = columns(s.hnf, n)
    q = AbGroup(from_columns(cols, n) if cols else [[] for _ in range(n)], nbase=n)
    if g.handle_to_base is not None:
        q.handle_to_base = lambda h, _g=g: list(_g.dlog(h))
    return q


def subgroup_intersection(s1: Subgroup, s2: Subgroup) -> Subgroup:
    g = s1.ambient
    n = g.ngens
    if n == 0:
        return s1
    c1, c2 = columns(s1.hnf, n), columns(s2.hnf, n)
    if not c1 or not c2:
        return Subgroup.trivial(g)
    big = [s1.hnf[i] + [-x for x in s2.hnf[i]] for i in range(n)]
    ker = integer_kernel(big)
    r = len(c1)
    gens = [matvec(s1.hnf, v[:r]) for v in ker]
    return Subgroup.generated_by(g, gens)


def subgroup_leq(s1: Subgroup, s2: Subgroup) -> bool:
    return subgroup_intersection(s1, s2) == s1


def subgroup_sum(s1: Subgroup, s2: Subgroup) -> Subgroup:
    return Subgroup.generated_by(s1.ambient, s1.gens() + s2.gens())


def torsion_subgroup(g: AbGroup, k: int) -> Subgroup:
    """The k-torsion G[k] = {x : k x = 0}."""
    gens = []
    for i, d in enumerate(g.invariants):
        if d == 0:
            continue
        e = d // gcd(d, k)
        gens.append([e if j == i else 0 for j in range(g.ngens)])
    return Subgroup.generated_by(g, gens)


# ---------------------------------------------------------------------------
# group extensions

class ExtensionGroup(AbGroup):
    """Middle term B of 1 -> A -> B -> C -> 1 computed from lifts.

    Base generators are f(a_1..a_r) followed by lift(c_1..c_s).
    """

    def __init__(self, a: AbGroup, c: AbGroup, lifts: list, act: Callable,
                 mul: Callable, power: Callable, project: Callable, inject: Callable | None = None):
        r, s = a.ngens, c.ngens
        rels = []
        for i, d in enumerate(a.invariants):
            if d:
                rels.append([d if j == i else 0 for j in range(r)] + [0] * s)
        for j, d in enumerate(c.invariants):
            if d == 0:
                continue
            pw = power(lifts[j], d)
            av = a.reduce(act(pw))
            if av is None:
                raise ValueError("lift power lies outside the image of A")
            rels.append([-x for x in av] + [d if t == j else 0 for t in range(s)])
        relm = from_columns(rels, r + s) if rels else [[] for _ in range(r + s)]
        self.sub, self.quo = a, c
        self.lifts = lifts
        self._act, self._mul, self._power, self._project = act, mul, power, project
        self._inject = inject
        super().__init__(relm, nbase=r + s, handle_to_base=self._base_coords)

    def _base_coords(self, b) -> list[int]:
        cc = self.quo.reduce(self._project(b))
        x = b
        for j, e in enumerate(cc):
            if e:
                x = self._mul(x, self._power(self.lifts[j], -e))
        av = self._act(x)
        return list(self.sub.reduce(av)) + list(cc)

    def generator_handles(self) -> list:
        """Standard generators of B as handles (needs ``inject`` for A-parts)."""
        out = []
        for k in range(self.ngens):
            v = self.to_base(self.unit(k))
            r = self.sub.ngens
            h = None
            if any(v[:r]):
                if self._inject is None:
                    raise TypeError("inject callable required to realise A-components")
                h = self._inject(v[:r])
            for j, e in enumerate(v[r:]):
                if e:
                    t = self._power(self.lifts[j], e)
                    h = t if h is None else self._mul(h, t)
            if h is None:
                h = self._inject([0] * r) if self._inject else None
            out.append(h)
        return out


def extension_group(a: AbGroup, c: AbGroup, lift: Callable, act: Callable, *,
                    mul: Callable, power: Callable, project: Callable,
                    inject: Callable | None = None) -> ExtensionGroup:
    """Group extension B of C by A.

    ``lift(j)`` returns a B-handle mapping to the j-th standard generator of
    C; ``act(b)`` returns A-coordinates of a B-handle lying in the image of
    A; ``project(b)`` returns the C-coordinates of a B-handle; ``mul`` and
    ``power`` implement the group law on handles.
    """
    lifts = [lift(j) for j in range(c.ngens)]
    return ExtensionGroup(a, c, lifts, act, mul, power, project, inject)
