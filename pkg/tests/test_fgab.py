import random
from itertools import product
from math import gcd, prod

import pytest
from hypothesis import given, settings, strategies as st

from cmstar.fgab import (
    AbGroup, Morphism, Subgroup, det, extension_group, group_from_relations, hnf,
    hnf_basis, hnf_with_transform, inverse_image, is_hnf, matmul, morphism_kernel,
    product_group, cyclic, quotient_group, snf, subgroup_intersection, subgroup_leq,
    torsion_subgroup,
)


def span_box(cols, bound):
    """All integer combinations of the columns with coefficients in [-bound, bound]."""
    out = set()
    for coeffs in product(range(-bound, bound + 1), repeat=len(cols)):
        out.add(tuple(sum(c * col[i] for c, col in zip(coeffs, cols)) for i in range(len(cols[0]))))
    return out


def canonical_mod(h, x):
    """Reduce x modulo the full-rank upper-triangular lattice h."""
    x = list(x)
    for i in range(len(h) - 1, -1, -1):
        q = x[i] // h[i][i]
        x = [a - q * h[r][i] for r, a in enumerate(x)]
    return tuple(x)


def cols_of(m):
    return [list(c) for c in zip(*m)]


# -- normal forms ------------------------------------------------------------

def test_hnf_identity_and_zero():
    assert hnf([[1, 0], [0, 1]]) == [[1, 0], [0, 1]]
    assert hnf([[0]]) == [[0]]


def test_hnf_small_example_span():
    m = [[2, 1], [0, 2]]
    h = hnf(m)
    assert is_hnf(h)
    # spans agree on the box |x| <= 4 (coefficient bound 10 covers it)
    a = {v for v in span_box(cols_of(m), 10) if max(map(abs, v)) <= 4}
    b = {v for v in span_box(cols_of(h), 10) if max(map(abs, v)) <= 4}
    assert a == b
    # the lattice has determinant 4 and contains (1, 2)
    assert abs(det(h)) == 4
    assert (1, 2) in a


def test_snf_examples():
    d, u, v = snf([[4, 0], [0, 2]])
    assert d == [[2, 0], [0, 4]]
    assert matmul(matmul(u, [[4, 0], [0, 2]]), v) == d
    d, u, v = snf([[2, 1], [0, 2]])
    assert d == [[1, 0], [0, 4]]
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    assert snf([]) == ([], [], [])


def test_snf_cyclic_by_coset_count():
    h = hnf_basis([[2, 1], [0, 2]])
    cosets = {canonical_mod(h, (a, b)) for a in range(8) for b in range(8)}
    assert len(cosets) == 4
    g = group_from_relations(2, [[2, 1], [0, 2]])
    assert g.invariants == (4,)


def random_matrix(rng, maxdim=5, bound=9):
    n, c = rng.randint(1, maxdim), rng.randint(1, maxdim)
    return [[rng.randint(-bound, bound) for _ in range(c)] for _ in range(n)]


def test_normal_form_certificates_random():
    rng = random.Random(20240601)
    for _ in range(500):
        m = random_matrix(rng)
        d, u, v = snf(m)
        assert matmul(matmul(u, m), v) == d
        assert abs(det(u)) == 1 and abs(det(v)) == 1
        diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
        for i in range(len(d)):
            for j in range(len(d[0])):
                if i != j:
                    assert d[i][j] == 0
        for a, b in zip(diag, diag[1:]):
            assert a >= 0 and (b == 0 or b % a == 0 if a else b == 0)
        h = hnf_basis(m)
        a, t = hnf_with_transform(m)
        assert matmul(m, t) == a and abs(det(t)) == 1
        nz = [j for j in range(len(a[0])) if any(row[j] for row in a)]
        assert [[row[j] for j in nz] for row in a] == h
        rank = len(h[0]) if h and h[0] else 0
        assert rank == sum(1 for x in diag if x)
        if rank == len(m):
            assert is_hnf(h)
            dd = prod(diag)
            assert hnf_basis(m, dd * rng.randint(1, 4)) == h


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=3))
def test_hnf_is_canonical_under_column_ops(rows):
    # right-multiplying by a unimodular matrix keeps the HNF
    u = [[1, 2, 0], [0, 1, -3], [1, 2, 1]]
    assert abs(det(u)) == 1
    assert hnf_basis(rows) == hnf_basis(matmul(rows, u))


# -- groups ------------------------------------------------------------------

def test_group_from_relations_examples():
    assert group_from_relations(2, [[2, 0], [0, 2]]).invariants == (2, 2)
    assert group_from_relations(1, [[12]]).invariants == (12,)
    g = group_from_relations(2, [[2, 0], [1, 4]])
    assert g.invariants == (8,)
    h = hnf_basis([[2, 0], [1, 4]])
    cosets = {canonical_mod(h, (a, b)) for a in range(-8, 8) for b in range(-8, 8)}
    assert len(cosets) == 8


def test_free_factor_first():
    g = group_from_relations(3, [[2, 0], [0, 0], [0, 6]])
    assert g.invariants == (0, 6, 2)
    assert not g.is_finite() and g.order() == 0


def random_group(rng, max_order=512):
    while True:
        k = rng.randint(1, 3)
        m = [[rng.randint(-6, 6) for _ in range(k)] for _ in range(k)]
        dt = abs(det(m))
        if 0 < dt <= max_order:
            return m, group_from_relations(k, m)


def test_dlog_bijection_and_homomorphism():
    rng = random.Random(7)
    for _ in range(40):
        m, g = random_group(rng)
        k = len(m)
        h = hnf_basis(m)
        assert g.order() == abs(det(m))
        # enumerate cosets of Z^k / L via canonical representatives
        reps = set()
        for x in product(*(range(h[i][i]) for i in range(k))):
            reps.add(canonical_mod(h, x))
        images = {g.from_base(x) for x in reps}
        assert len(images) == len(reps) == g.order()
        for _ in range(20):
            x = [rng.randint(-30, 30) for _ in range(k)]
            y = [rng.randint(-30, 30) for _ in range(k)]
            s = [a + b for a, b in zip(x, y)]
            assert g.from_base(s) == g.add(g.from_base(x), g.from_base(y))
            # relations map to zero
        for c in cols_of(m):
            assert not any(g.from_base(c))
        # standard generators round-trip
        for i in range(g.ngens):
            assert g.from_base(g.to_base(g.unit(i))) == g.unit(i)


def random_morphism(rng, g, h):
    # random images then rescale to make the map well defined
    imgs = []
    for d in g.invariants:
        x = [rng.randint(0, max(e, 1) - 1) for e in h.invariants]
        # multiply by the exponent quotient so that d * image == 0
        e = h.exponent()
        f = e // gcd(e, d) if d else 0
        imgs.append(h.reduce([f * a for a in x]))
    return Morphism.from_images(g, h, imgs)


def test_kernel_image_orders_and_first_isomorphism():
    rng = random.Random(11)
    for _ in range(40):
        _, g = random_group(rng, 128)
        _, h = random_group(rng, 64)
        f = random_morphism(rng, g, h)
        ker = morphism_kernel(f)
        img = f.image()
        # brute force
        elems = list(g.elements())
        bk = [x for x in elems if not any(f(x))]
        bi = {f(x) for x in elems}
        assert ker.order() == len(bk)
        assert img.order() == len(bi)
        assert ker.order() * img.order() == g.order()
        assert all(ker.contains(x) for x in bk)
        q = quotient_group(g, ker)
        assert q.invariants == img.as_group().invariants


def test_kernel_examples():
    c4 = cyclic(4)
    dbl = Morphism.from_images(c4, c4, [(2,)])
    k = morphism_kernel(dbl)
    assert k.order() == 2 and k.contains((2,))
    zero = Morphism.from_images(cyclic(6), cyclic(5), [(0,)])
    assert morphism_kernel(zero).order() == 6
    g = product_group(16, 2)
    proj = Morphism.from_images(g, cyclic(16), [(1,), (0,)])
    k = morphism_kernel(proj)
    brute = [x for x in g.elements() if proj(x) == (0,)]
    assert k.order() == len(brute) == 2
    assert k.as_group().invariants == (2,)


def test_inverse_image_examples():
    c8, c4 = cyclic(8), cyclic(4)
    red = Morphism.from_images(c8, c4, [(1,)])
    assert inverse_image(red, Subgroup.whole(c4)) == Subgroup.whole(c8)
    assert inverse_image(red, Subgroup.trivial(c4)) == morphism_kernel(red)
    pre = inverse_image(red, Subgroup.generated_by(c4, [(2,)]))
    brute = [x for x in c8.elements() if red(x)[0] % 2 == 0]
    assert pre.order() == len(brute) == 4
    assert all(pre.contains(x) for x in brute)


def test_quotient_examples():
    c4 = cyclic(4)
    assert quotient_group(c4, Subgroup.trivial(c4)).invariants == (4,)
    assert quotient_group(c4, Subgroup.whole(c4)).invariants == ()
    g = product_group(8, 2)
    s = Subgroup.generated_by(g, [(4, 0)])
    q = quotient_group(g, s)
    assert q.invariants == (4, 2)
    cosets = {frozenset(g.add(x, y) for y in [(0, 0), (4, 0)]) for x in g.elements()}
    assert len(cosets) == q.order()


def test_intersection_and_leq():
    g = product_group(16, 2)
    whole = Subgroup.whole(g)
    s2 = Subgroup.generated_by(g, [(8, 0)])
    assert subgroup_intersection(whole, s2) == s2
    assert subgroup_intersection(s2, s2) == s2
    triv = Subgroup.trivial(g)
    assert subgroup_intersection(s2, triv) == triv
    assert subgroup_leq(triv, s2)
    assert not subgroup_leq(whole, s2)
    rng = random.Random(3)
    for _ in range(30):
        a = Subgroup.generated_by(g, [(rng.randrange(16), rng.randrange(2))])
        b = Subgroup.generated_by(g, [(rng.randrange(16), rng.randrange(2))])
        inter = subgroup_intersection(a, b)
        ea = {x for x in g.elements() if a.contains(x)}
        eb = {x for x in g.elements() if b.contains(x)}
        assert {x for x in g.elements() if inter.contains(x)} == ea & eb
        assert subgroup_leq(a, b) == (ea <= eb)


def test_torsion_subgroup():
    g = product_group(48, 4, 2)
    t = torsion_subgroup(g, 2)
    assert t.order() == 8
    assert all(not any(g.scale(2, x)) for x in t.gens())


# -- extensions ----------------------------------------------------------------

class _Cyc:
    """Z/n with handles = ints, used to realise concrete extensions."""

    def __init__(self, n):
        self.n = n


def test_extension_trivial_kernel():
    a = product_group()
    c = product_group(8, 4)
    # B = C itself; handles are coordinate tuples
    b = extension_group(
        a, c, lift=lambda j: c.unit(j), act=lambda x: (),
        mul=c.add, power=lambda x, k: c.scale(k, x), project=lambda x: x)
    assert b.invariants == (8, 4)
    assert b.order() == a.order() * c.order()


def test_extension_of_trivial_quotient():
    a = cyclic(2)
    c = product_group()
    b = extension_group(a, c, lift=None or (lambda j: None), act=lambda x: x,
                        mul=lambda x, y: x, power=lambda x, k: x, project=lambda x: ())
    assert b.invariants == (2,)


@pytest.mark.parametrize("nonsplit", [True, False])
def test_extension_c2_by_c2(nonsplit):
    # B = Z/4 (non-split) or Z/2 x Z/2 (split), both mapping onto C = C2 with kernel A = C2
    if nonsplit:
        n = 4
        b = cyclic(4)
        mul, power = b.add, lambda x, k: b.scale(k, x)
        project = lambda x: (x[0] % 2,)
        act = lambda x: (x[0] // 2,)
        lift = lambda j: (1,)
    else:
        b = product_group(2, 2)
        mul, power = b.add, lambda x, k: b.scale(k, x)
        project = lambda x: (x[1],)
        act = lambda x: (x[0],)
        lift = lambda j: (0, 1)
    ext = extension_group(cyclic(2), cyclic(2), lift, act, mul=mul, power=power, project=project)
    assert ext.invariants == ((4,) if nonsplit else (2, 2))
    # dlog of handles is a bijection onto the group
    handles = list(b.elements())
    assert len({ext.dlog(h) for h in handles}) == 4
    for x in handles:
        for y in handles:
            assert ext.dlog(mul(x, y)) == ext.add(ext.dlog(x), ext.dlog(y))


def test_extension_order_random():
    rng = random.Random(5)
    for _ in range(20):
        # B = Z/n1 x Z/n2 with A = subgroup generated by a random element
        n1, n2 = rng.randint(2, 12), rng.randint(1, 6)
        b = product_group(n1, n2) if n2 > 1 else cyclic(n1)
        sub = Subgroup.generated_by(b, [tuple(rng.randrange(d) for d in b.invariants)])
        a = sub.as_group()
        q = quotient_group(b, sub)
        inv_q = q
        lift = lambda j: tuple(b.reduce(q.to_base(q.unit(j))))

        def act(x, sub=sub, a=a):
            c = sub.coords(list(x))
            # sub.coords solves with the HNF columns (the base of a)
            return a.from_base(c)

        ext = extension_group(a, q, lift, act, mul=b.add, power=lambda x, k: b.scale(k, x),
                              project=lambda x: q.from_base(list(x)))
        assert ext.order() == a.order() * q.order() == b.order()
        assert ext.invariants == b.invariants
