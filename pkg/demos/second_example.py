"""Star scans for the field x^4 + 65x^2 + 425 and its reflex x^4 + 130x^2 + 2525.

Selects the prime set S and modulus m_S, checks the resulting containment,
scans moduli up to 10 and tests mixed moduli.  Takes about a minute.
"""

from cmstar.cm import cm_types, reflex
from cmstar.nfield import CMField
from cmstar.rayclass import ray_class_group
from cmstar.star import does_star_hold, find_m_s, mixed_containment, star_scan, verify_theorem_main1


def main():
    rp = reflex(cm_types(CMField(65, 425))[0])
    kr = rp.reflex_field
    print(f"reflex field x^4 + {kr.A}x^2 + {kr.B}, Cl = {ray_class_group(kr, 1).invariants}")

    sel = find_m_s(kr)
    print(f"S: {len(sel.S)} primes above {sel.P_S}, m_S = {sel.m_S}, "
          f"containment at m_S verified: {verify_theorem_main1(kr, sel)}")

    v = does_star_hold(rp, sel.m_S)
    print(f"m={sel.m_S}: Cl_Kr(m) {v.group.invariants}, |ker f0| {v.ker_f0.order()}, "
          f"|ker f1| {v.ker_f1.order()}, |ker f2| {v.ker_f2.order()}, holds {v.holds}")

    scan = star_scan(rp, 10)
    print("star holds at m =", [m for m, ok in scan.items() if ok])
    for m1, m2 in [(4, 8), (8, 4), (8, 8)]:
        print(f"mixed ({m1},{m2}): {mixed_containment(rp, m1, m2)}")


if __name__ == "__main__":
    main()
