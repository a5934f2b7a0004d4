import random

import pytest

from cmstar.fgab import morphism_kernel
from cmstar.ideals import Ideal
from cmstar.nfield import CMField
from cmstar.shimura import (ShimuraElement, map_f2, map_n1, principal_pair, shimura_group, shimura_mul)
from cmstar.cm import cm_types, reflex

INSTANCES = [((53, 500), 1), ((53, 500), 2), ((53, 500), 3), ((65, 425), 2), ((106, 809), 2)]


@pytest.fixture(scope="module", params=INSTANCES, ids=lambda p: f"{p[0][0]},{p[0][1]}-m{p[1]}")
def sg(request):
    ab, m = request.param
    return shimura_group(CMField(*ab), m)


def test_running_example_group():
    sg = shimura_group(CMField(53, 500), 2)
    assert sg.invariants == (8, 4)
    assert sg.coker_n1.order() == 1
    assert sg.ker_n2_group.invariants == (8, 4)
    assert sg.narrow0.order() == 1


def test_order_identity(sg):
    assert sg.order() == sg.coker_n1.order() * sg.ker_n2_group.order()


def test_representatives_are_valid(sg):
    for h in sg.reps:
        assert h.is_valid()
        assert h.ideal_part().is_coprime_to(sg.modulus)


def test_representatives_map_to_generators(sg):
    for i, h in enumerate(sg.reps):
        assert sg.dlog(h) == sg.group.unit(i)


def test_g_after_f_is_trivial(sg):
    for i in range(sg.coker_n1.ngens):
        h = sg.inject(sg.coker_n1.unit(i))
        assert not any(sg.ray.dlog_compact(h.ideal, h.beta))


def test_f_after_n1_is_trivial(sg):
    k = sg.field
    units, _ = map_n1(k, sg.modulus)
    for u in units:
        h = ShimuraElement(Ideal.unit(k), k.one(), k.rel_norm(u))
        assert sg.dlog(h) == sg.group.zero()


def test_principal_pairs_congruent_to_one_are_trivial(sg):
    k = sg.field
    m = sg.modulus
    rng = random.Random(4)
    for _ in range(5):
        x = k.elem([1 + m * rng.randint(-2, 2)] + [m * rng.randint(-2, 2) for _ in range(3)])
        if x.is_zero() or not Ideal.principal(x).is_coprime_to(m):
            continue
        assert sg.dlog(principal_pair(x)) == sg.group.zero()


@pytest.mark.parametrize("ab,m", [((53, 500), 3), ((106, 809), 2)])
def test_dlog_is_a_homomorphism(ab, m):
    sg = shimura_group(CMField(*ab), m)
    rng = random.Random(2)
    for _ in range(25):
        a = [rng.randint(0, 7) for _ in sg.reps]
        b = [rng.randint(0, 7) for _ in sg.reps]
        ha = hb = None
        for h, e in zip(sg.reps, a):
            ha = sg.power(h, e) if ha is None else sg.mul(ha, sg.power(h, e))
        for h, e in zip(sg.reps, b):
            hb = sg.power(h, e) if hb is None else sg.mul(hb, sg.power(h, e))
        da, db = sg.dlog(ha), sg.dlog(hb)
        assert da == sg.group.reduce(a)
        assert sg.dlog(shimura_mul(ha, hb)) == sg.group.add(da, db)


def test_normalisation_keeps_the_class(sg):
    if not sg.reps:
        pytest.skip("trivial group")
    h = sg.reps[0]
    raw = shimura_mul(shimura_mul(h, h), h)
    assert sg.dlog(raw) == sg.dlog(sg.normalize(raw)) == sg.group.scale(3, sg.dlog(h))


def test_negative_powers(sg):
    if not sg.reps:
        pytest.skip("trivial group")
    h = sg.reps[-1]
    assert sg.dlog(sg.mul(h, sg.power(h, -1))) == sg.group.zero()


def test_non_principal_pairs_are_not_in_the_image_of_f():
    sg = shimura_group(CMField(53, 500), 2)
    with pytest.raises(ValueError):
        sg.preimage_f(sg.reps[0])


def test_type_norm_map_running_example():
    rp = reflex(cm_types(CMField(53, 500))[0])
    f2 = map_f2(rp, 2)
    assert f2.is_well_defined()
    assert morphism_kernel(f2).order() == 2
