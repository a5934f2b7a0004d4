"""Walk through the field x^4 + 53x^2 + 500 at modulus 2.

Prints the unit data, the residue and ray class groups, the Shimura class
group C_K(2) with its order identity, and the star verdict for the reflex
pair.  Run with `python demos/running_example.py`.
"""

from cmstar.cm import cm_types, reflex
from cmstar.nfield import CMField
from cmstar.rayclass import ray_class_group
from cmstar.shimura import shimura_group
from cmstar.star import does_star_hold
from cmstar.units import unit_group


def main():
    k = CMField(53, 500)
    print(f"K = Q[x]/(x^4 + {k.A}x^2 + {k.B}), disc {k.disc}, real subfield disc {k.K0.disc}")
    print(f"fundamental unit of K0: {unit_group(k).eps0}")

    for m in (1, 2):
        r = ray_class_group(k, m)
        print(f"Cl_K({m}) = {r.invariants}  (O/{m})^x = {r.res.group.invariants}")

    sg = shimura_group(k, 2)
    print(f"C_K(2) = {sg.invariants}: coker N1 {sg.coker_n1.invariants}, ker N2 {sg.ker_n2_group.invariants}, "
          f"{sg.order()} = {sg.coker_n1.order()} * {sg.ker_n2_group.order()}")

    rp = reflex(cm_types(k)[0])
    kr = rp.reflex_field
    print(f"reflex field x^4 + {kr.A}x^2 + {kr.B}, Cl = {ray_class_group(kr, 1).invariants}")
    for m in (1, 2):
        v = does_star_hold(rp, m)
        print(f"m={m}: Cl_Kr(m) {v.group.invariants}, |ker f0| {v.ker_f0.order()}, |ker f1| {v.ker_f1.order()}, "
              f"|ker f2| {v.ker_f2.order()}, |ker f1 ∩ ker f2| {v.intersection.order()} -> star holds: {v.holds}")


if __name__ == "__main__":
    main()
