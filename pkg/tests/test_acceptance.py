"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Every criterion prints one PASS/FAIL line (also collected in the terminal
summary).  Criteria 4 and 8 each contain one target value that this
implementation does not reproduce; those tests keep the stated value and are
marked as strict expected failures, with the observed value and a diagnostic
in the printed line.  See README.md for the analysis.
"""

import random
import time

import mpmath
import pytest

import cmstar
from cmstar.analytic import (ODD, igusa_invariants, make_period_matrix, period_matrix, theta_series)
from cmstar.cli import parse_ideal
from cmstar.cm import cm_types, reflex
from cmstar.fgab import Subgroup
from cmstar.ideals import Ideal, prime_decomposition
from cmstar.nfield import CMField
from cmstar.rayclass import ray_class_group
from cmstar.shimura import shimura_group
from cmstar.star import (does_star_hold, exponent_two_violations, find_m_s, minimal_star_m, mixed_containment,
                         verify_theorem_main1)
from cmstar.units import unit_group
from conftest import ACCEPTANCE

# verdicts computed in criteria 3-5, reused by criterion 6
VERDICTS: dict = {}


class Checks:
    def __init__(self, n: int):
        self.n = n
        self.items: list[tuple[str, bool, str]] = []
        cmstar.clear_caches()
        self.t0 = time.time()

    def check(self, name: str, observed, expected) -> None:
        self.items.append((name, observed == expected, f"{name}={observed!r} (want {expected!r})"))

    def check_true(self, name: str, ok: bool, detail: str = "") -> None:
        self.items.append((name, bool(ok), f"{name}: {detail or ok}"))

    def finish(self, limit: float, note: str = "") -> None:
        dt = time.time() - self.t0
        self.check_true("runtime", dt < limit, f"{dt:.1f}s < {limit:.0f}s")
        bad = [d for _, ok, d in self.items if not ok]
        ok = not bad
        detail = f"[{len(self.items) - len(bad)}/{len(self.items)} checks, {dt:.1f}s]"
        if bad:
            detail += " failed: " + "; ".join(bad)
        if note:
            detail += " | " + note
        ACCEPTANCE[self.n] = (ok, detail)
        print(f"\ncriterion {self.n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail


def test_criterion_1_running_example():
    c = Checks(1)
    k = CMField(53, 500)
    a0 = k.K0.gen()
    c.check("eps0", unit_group(k).eps0, a0 * 30506849866 + 374579495409)
    r2 = ray_class_group(k, 2)
    c.check("(O/2)^x", r2.res.group.invariants, (2, 2))
    c.check("units 1 mod* 2 are all units", r2.res.unit_map.image().order(), 1)
    sg = shimura_group(k, 2)
    c.check("coker N1", sg.coker_n1.invariants, ())
    c.check("Cl_K(2)", r2.invariants, (8, 4))
    c.check("Cl+_K0(1)", ray_class_group(k.K0, 1, narrow=True).invariants, ())
    c.check("C_K(2)", sg.invariants, (8, 4))
    c.finish(60)


def test_criterion_2_reflex_fields():
    c = Checks(2)
    for (a, b), (ar, br) in [((53, 500), (106, 809)), ((65, 425), (130, 2525))]:
        kr = reflex(cm_types(CMField(a, b))[0]).reflex_field
        c.check(f"reflex of ({a},{b})", (kr.A, kr.B), (ar, br))
    c.finish(60)


def test_criterion_3_running_example_kernels():
    c = Checks(3)
    rp = reflex(cm_types(CMField(53, 500))[0])
    v = does_star_hold(rp, 2)
    VERDICTS[("53,500", 2)] = v
    c.check("Cl_Kr(2)", v.group.invariants, (16, 2))
    c.check("|ker f0|", v.ker_f0.order(), 4)
    c.check("ker f0 shape", v.ker_f0.as_group().invariants, (2, 2))
    c.check("ker f1 is everything", v.ker_f1.order(), v.group.order())
    c.check("|ker f2|", v.ker_f2.order(), 2)
    c.check("|ker f1 ∩ ker f2|", v.intersection.order(), 2)
    c.check("star_2", v.holds, True)
    c.finish(120)


@pytest.mark.xfail(strict=True, reason="stated |ker f0| = 96 conflicts with |Cl(8)|/|Cl(1)| = 1536/8 = 192")
def test_criterion_4_second_example():
    c = Checks(4)
    rp = reflex(cm_types(CMField(65, 425))[0])
    kr = rp.reflex_field
    two = prime_decomposition(kr, 2)
    b = kr.gen()
    p1 = Ideal.from_gens(kr, [kr.one() * 2, b / 2 - kr.one() / 2])
    p2 = Ideal.from_gens(kr, [kr.one() * 2, b / 2 + kr.one() / 2])
    p3 = Ideal.principal(b * b / 20 + kr.one() * 7 / 4)
    c.check("three primes above 2", len(two), 3)
    c.check_true("stated prime shapes", set(two) == {p1, p2, p3}, "p1, p2 two-element; p3 principal")
    cl = ray_class_group(kr, 1)
    c.check("Cl_Kr(1) cyclic of order 8", cl.invariants, (8,))
    c.check("generated by p1", Subgroup.generated_by(cl.group, [cl.dlog(p1)]).index(), 1)
    sel = find_m_s(kr)
    c.check("m_S", sel.m_S, 8)
    v = does_star_hold(rp, 8)
    VERDICTS[("65,425", 8)] = v
    c.check("Cl_Kr(8)", v.group.invariants, (48, 4, 2, 2, 2))
    c.check("|ker f1(8)|", v.ker_f1.order(), 384)
    c.check("|ker f2(8)|", v.ker_f2.order(), 4)
    c.check("|ker f1 ∩ ker f2|", v.intersection.order(), 2)
    c.check("star_8", v.holds, True)
    for m in (1, 2, 4):
        vm = does_star_hold(rp, m)
        VERDICTS[("65,425", m)] = vm
        c.check(f"star_{m}", vm.holds, False)
    c.check("mixed (4,8)", mixed_containment(rp, 4, 8), False)
    c.check("mixed (8,4)", mixed_containment(rp, 8, 4), False)
    c.check("minimal m", minimal_star_m(rp, 10), 5)
    # the stated order; Cl(8) has 1536 elements and Cl(1) has 8, so f0 being
    # onto forces |ker f0| = 192
    c.check("|ker f0|", v.ker_f0.order(), 96)
    c.finish(600, note=f"diagnostic: |Cl(8)|/|Cl(1)| = {v.group.order()}/{cl.order()} = "
                       f"{v.group.order() // cl.order()} = observed |ker f0|")


def test_criterion_5_cyclic_32_field():
    c = Checks(5)
    k = CMField(52, 477)
    rp = reflex(cm_types(k)[0])
    kr = rp.reflex_field
    c.check("field", (kr.A, kr.B), (104, 796))
    c.check("Cl_Kr(1)", ray_class_group(kr, 1).invariants, (32,))
    v = does_star_hold(rp, 2)
    VERDICTS[("52,477", 2)] = v
    c.check("star_2", v.holds, True)
    c.finish(600)


def test_criterion_6_exponent_two():
    c = Checks(6)
    if len(VERDICTS) < 6:
        for key, ab, m in [(("53,500", 2), (53, 500), 2), (("65,425", 8), (65, 425), 8),
                           (("65,425", 1), (65, 425), 1), (("65,425", 2), (65, 425), 2),
                           (("65,425", 4), (65, 425), 4), (("52,477", 2), (52, 477), 2)]:
            if key not in VERDICTS:
                VERDICTS[key] = does_star_hold(reflex(cm_types(CMField(*ab))[0]), m)
    for (field, m), v in sorted(VERDICTS.items()):
        c.check(f"violations ({field}, m={m})", exponent_two_violations(v), [])
    c.finish(600)


def test_criterion_7_theorem_check():
    c = Checks(7)
    for ab in [(53, 500), (65, 425)]:
        kr = reflex(cm_types(CMField(*ab))[0]).reflex_field
        sel = find_m_s(kr)
        c.check(f"({kr.A},{kr.B}) m_S={sel.m_S}", verify_theorem_main1(kr, sel), True)
    c.finish(600)


PRINTED_OMEGA = [[1.5852j, -1.6036], [-1.6036, 0.5 + 1.7723j]]


@pytest.mark.xfail(strict=True, reason="the printed off-diagonal -1.6036 is ten times the computed -0.16036")
def test_criterion_8_analytic():
    c = Checks(8)
    prec = 212
    k = CMField(53, 500)
    om = period_matrix(cm_types(k)[0], parse_ideal(k, "49,alpha+5"), prec)
    e = om.entries
    with mpmath.workprec(prec):
        c.check_true("symmetric", abs(e[0][1] - e[1][0]) < mpmath.mpf(2) ** (4 - prec))
        y = om.imag()
        c.check_true("Im positive definite", y[0][0] > 0 and y[0][0] * y[1][1] - y[0][1] ** 2 > 0)
        odd = max(abs(theta_series(i, om)) for i in ODD)
        c.check_true("odd thetas vanish", odd < mpmath.mpf(2) ** (4 - prec), mpmath.nstr(odd, 3))
        ours = igusa_invariants(om)
        printed = igusa_invariants(make_period_matrix(PRINTED_OMEGA, prec))
        corrected = [[1.5852j, -0.16036], [-0.16036, 0.5 + 1.7723j]]
        fixed = igusa_invariants(make_period_matrix(corrected, prec))
        rel = max(abs(a - b) / abs(a) for a, b in zip(ours, printed))
        rel_fixed = max(abs(a - b) / abs(a) for a, b in zip(ours, fixed))
    c.check_true("Igusa vs printed matrix", rel < 1e-2, f"relative difference {mpmath.nstr(rel, 3)}")
    c.finish(60, note=(f"diagnostic: computed Omega_12 = {mpmath.nstr(mpmath.re(e[0][1]), 6)}; with the "
                       f"printed -1.6036 read as -0.16036 the Igusa invariants agree to "
                       f"{mpmath.nstr(rel_fixed, 2)}"))


def test_criterion_9_property_suites():
    import test_classgroup
    import test_cm
    import test_fgab
    c = Checks(9)
    runs = [("SNF/HNF certificates, 500 matrices", test_fgab.test_normal_form_certificates_random, ()),
            ("dlog bijection and homomorphism", test_fgab.test_dlog_bijection_and_homomorphism, ()),
            ("kernel/image and first isomorphism", test_fgab.test_kernel_image_orders_and_first_isomorphism, ())]
    for ab in sorted(test_classgroup.RAY):
        runs.append((f"|Cl(m)| formula {ab}", test_classgroup.test_ray_class_number_formula, (ab,)))
    for ab in test_cm.PAIRS:
        rp = reflex(cm_types(CMField(*ab))[0])
        runs.append((f"type norm certificates {ab}", test_cm.test_prime_type_norm_certificates, (rp,)))
        runs.append((f"type norm multiplicativity {ab}", test_cm.test_type_norm_ideal_multiplicative, (rp,)))
        runs.append((f"norm identities {ab}", test_cm.test_type_norm_norm_identities, (rp,)))
    for name, fn, args in runs:
        try:
            fn(*args)
            c.check_true(name, True)
        except AssertionError as err:
            c.check_true(name, False, f"assertion failed: {err}")
    c.finish(900)
