"""Lattice reduction and short-vector enumeration for positive definite forms.

Forms are given by their Gram matrix as mpmath numbers.  LLL only serves to
make the enumeration fast, so it runs in floating point; the enumeration
itself is a Fincke-Pohst search whose completeness depends on the Cholesky
data, computed at the working precision with a relative safety margin.
"""

from __future__ import annotations

from typing import Callable

import mpmath


def lll_gram(gram, delta: float = 0.99, prec: int = 160):
    """LLL-reduce a positive definite Gram matrix.

    Returns ``(T, G')`` with T an integer unimodular matrix (list of columns)
    and ``G' = T^t G T``.
    """
    n = len(gram)
    with mpmath.workprec(prec):
        g = [[mpmath.mpf(gram[i][j]) for j in range(n)] for i in range(n)]
        t = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # columns

        def gram_of(cols):
            gc = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    gc[i][j] = gc[j][i] = _bil(g, cols[i], cols[j])
            return gc

        cur = gram_of(t)
        k = 1
        steps = 0
        while k < n and steps < 20000:
            steps += 1
            mu, bb = _gso(cur)
            changed = False
            for j in range(k - 1, -1, -1):
                q = int(mpmath.nint(mu[k][j]))
                if q:
                    t[k] = [a - q * b for a, b in zip(t[k], t[j])]
                    for r in range(j + 1):
                        mu[k][r] -= q * (mu[j][r] if r < j else 1)
                    changed = True
            if changed:
                cur = gram_of(t)
                mu, bb = _gso(cur)
            if bb[k] < (delta - mu[k][k - 1] ** 2) * bb[k - 1]:
                t[k], t[k - 1] = t[k - 1], t[k]
                cur = gram_of(t)
                k = max(k - 1, 1)
            else:
                k += 1
        return t, gram_of(t)


def _bil(g, u, v):
    n = len(g)
    s = mpmath.mpf(0)
    for i in range(n):
        if u[i]:
            for j in range(n):
                if v[j]:
                    s += u[i] * g[i][j] * v[j]
    return s


def _gso(cur):
    n = len(cur)
    mu = [[mpmath.mpf(0)] * n for _ in range(n)]
    bb = [mpmath.mpf(0)] * n
    for i in range(n):
        for j in range(i):
            s = cur[i][j] - sum(mu[j][k] * mu[i][k] * bb[k] for k in range(j))
            mu[i][j] = s / bb[j]
        bb[i] = cur[i][i] - sum(mu[i][k] ** 2 * bb[k] for k in range(i))
    return mu, bb


def cholesky_q(gram):
    """Cohen's quadratic-form decomposition: Q(x) = sum q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    n = len(gram)
    q = [[mpmath.mpf(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] = q[k][l] - q[k][i] * q[i][l]
    return q


def fincke_pohst(gram, bound, prec: int = 160, reduce: bool = True,
                 limit: int | None = None, accept: Callable | None = None):
    """All nonzero integer vectors x (up to sign) with x^t G x <= bound.

    ``accept`` is an optional predicate on vectors; when supplied, the first
    accepted vector is returned as a single-element list.  ``limit`` caps
    the number of collected vectors (raising if exceeded).
    """
    n = len(gram)
    with mpmath.workprec(prec):
        if reduce:
            t, g = lll_gram(gram, prec=prec)
        else:
            t = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
            g = [[mpmath.mpf(gram[i][j]) for j in range(n)] for i in range(n)]
        q = cholesky_q(g)
        c = mpmath.mpf(bound) * (1 + mpmath.mpf(2) ** (-prec // 3)) + mpmath.mpf(2) ** (-prec // 3)
        out = []
        x = [0] * n
        tt = [mpmath.mpf(0)] * n
        uu = [mpmath.mpf(0)] * n
        ub = [0] * n
        i = n - 1
        tt[i] = c
        uu[i] = mpmath.mpf(0)

        def bounds(i):
            z = mpmath.sqrt(max(tt[i], 0) / q[i][i])
            lo = int(mpmath.ceil(-z - uu[i]))
            hi = int(mpmath.floor(z - uu[i]))
            return lo, hi

        lo, hi = bounds(i)
        x[i] = lo - 1
        ub[i] = hi
        while True:
            x[i] += 1
            if x[i] > ub[i]:
                i += 1
                if i >= n:
                    break
                continue
            if i > 0:
                tt[i - 1] = tt[i] - q[i][i] * (x[i] + uu[i]) ** 2
                i -= 1
                uu[i] = sum(q[i][j] * x[j] for j in range(i + 1, n))
                lo, hi = bounds(i)
                x[i] = lo - 1
                ub[i] = hi
                continue
            if all(v == 0 for v in x):
                # end of the search: the zero vector is the midpoint of the last row
                # only skip it
                continue
            # canonical sign: first nonzero coordinate from the top positive
            last = next(v for v in reversed(x) if v)
            if last < 0:
                continue
            vec = [sum(t[k][r] * x[k] for k in range(n)) for r in range(n)]
            if accept is not None:
                if accept(vec):
                    return [vec]
                continue
            out.append(vec)
            if limit is not None and len(out) > limit:
                raise OverflowError("too many short vectors")
        return out


def qform(gram, v):
    n = len(gram)
    return sum(gram[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
