import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cmstar.ideals import Ideal, prime_decomposition
from cmstar.nfield import CMField, FieldError, NumberField, factor_integer
from cmstar.units import fundamental_unit_real_quadratic, unit_group

EXAMPLES = [(53, 500), (106, 809), (65, 425), (130, 2525), (52, 477), (104, 796)]

# field discriminants; all but (52, 477) agree with sympy's round_two, which
# returns an odd value there although disc(K) must be divisible by disc(K0)^2
DISCS = {(53, 500): 52358480, (106, 809): 323600, (65, 425): 4335425,
         (130, 2525): 729725, (52, 477): 537306368, (104, 796): 35775424}
K0_DISCS = {(53, 500): 809, (106, 809): 5, (65, 425): 101, (130, 2525): 17,
            (52, 477): 796, (104, 796): 53}


@pytest.fixture(scope="module", params=EXAMPLES, ids=lambda p: f"{p[0]},{p[1]}")
def field(request):
    return CMField(*request.param)


def small_elements(k, n, seed, bound=5):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        x = k.elem([rng.randint(-bound, bound) for _ in range(k.degree)])
        if not x.is_zero():
            out.append(x)
    return out


def test_discriminants(field):
    key = (field.A, field.B)
    assert field.disc == DISCS[key]
    assert field.K0.disc == K0_DISCS[key]
    assert field.disc % (field.K0.disc ** 2) == 0
    assert field.poly_disc == field.disc * field.index ** 2


def test_round_two_agrees_with_sympy_where_sympy_is_reliable():
    from sympy import Poly, symbols
    from sympy.polys.numberfields.basis import round_two
    x = symbols("x")
    for a, b in [(53, 500), (106, 809), (65, 425)]:
        _, dk = round_two(Poly(x ** 4 + a * x ** 2 + b, x))
        assert int(dk) == CMField(a, b).disc


def test_ring_closure(field):
    basis = field.integral_basis
    for x in basis:
        for y in basis:
            assert (x * y).is_integral()


def test_norm_and_trace_match_embeddings(field):
    prec = 160
    with mpmath.workprec(prec):
        for x in small_elements(field, 100, seed=1):
            vals = x.embed(prec)
            prod = mpmath.fprod(vals)
            assert abs(prod - x.norm()) <= mpmath.mpf(2) ** -100 * (1 + abs(prod))
            assert abs(mpmath.fsum(vals) - x.trace()) < mpmath.mpf(2) ** -100 * (1 + abs(x.trace()))


def test_embedding_count_and_trace_coefficient(field):
    roots = field.roots(128)
    assert len(roots) == field.degree
    assert abs(mpmath.fsum(roots) + field.poly[-2]) < mpmath.mpf(2) ** -100


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=8, max_size=8))
def test_conj_is_an_involutive_ring_homomorphism(cs):
    k = CMField(53, 500)
    x, y = k.elem(cs[:4]), k.elem(cs[4:])
    assert x.conj().conj() == x
    assert (x * y).conj() == x.conj() * y.conj()
    assert (x + y).conj() == x.conj() + y.conj()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=8, max_size=8))
def test_norm_is_multiplicative(cs):
    k = CMField(65, 425)
    x, y = k.elem(cs[:4]), k.elem(cs[4:])
    assert (x * y).norm() == x.norm() * y.norm()
    if not x.is_zero():
        assert (x * x.inverse()) == k.one()


def test_galois_closed_cm_fields_rejected_where_required():
    with pytest.raises(FieldError):
        CMField(-5, 4)     # not totally imaginary
    assert CMField(4, 1).is_biquadratic()
    assert not CMField(53, 500).is_biquadratic()


def test_fundamental_unit_running_example():
    k = CMField(53, 500)
    eps = unit_group(k).eps0
    a0 = k.K0.gen()
    assert eps == a0 * 30506849866 + 374579495409
    assert eps.norm() in (1, -1)
    assert fundamental_unit_real_quadratic(k.K0) == eps


@pytest.mark.parametrize("d,eps", [(2, (1, 1)), (3, (2, 1)), (5, (Fraction(1, 2), Fraction(1, 2))),
                                   (7, (8, 3)), (13, (Fraction(3, 2), Fraction(1, 2))), (94, (2143295, 221064))])
def test_fundamental_units_of_small_quadratic_fields(d, eps):
    f = NumberField([-d, 0, 1])
    u = fundamental_unit_real_quadratic(f)
    w = f.gen()
    expected = f.one() * eps[0] + w * eps[1]
    assert u in (expected, expected * -1, expected.inverse(), expected.inverse() * -1)


def test_prime_decomposition_products(field):
    for p in [q for q in range(2, 51) if factor_integer(q) == {q: 1}]:
        primes = prime_decomposition(field, p)
        assert sum(P.e * P.f for P in primes) == field.degree
        prod = Ideal.unit(field)
        for P in primes:
            prod = prod * P ** P.e
        assert prod == Ideal.principal(field.one() * p)
