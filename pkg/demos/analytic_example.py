"""Period matrix, theta constants and Igusa invariants for x^4 + 53x^2 + 500.

Uses the ideal (49, alpha + 5) and the first CM type, and compares the two CM
types of the field.
"""

import mpmath

from cmstar.analytic import EVEN, igusa_invariants, period_matrix, rosenhain, theta_table
from cmstar.cli import parse_ideal
from cmstar.cm import cm_types
from cmstar.nfield import CMField

PREC = 212


def main():
    k = CMField(53, 500)
    a = parse_ideal(k, "49,alpha+5")
    phis = cm_types(k)
    om = period_matrix(phis[0], a, PREC)
    print("Omega =")
    for row in om.entries:
        print("  ", [mpmath.nstr(x, 12) for x in row])
    th = theta_table(om)
    print("even theta constants:")
    for i in EVEN:
        print(f"  theta[{i:2d}] = {mpmath.nstr(th[i], 12)}")
    print("Rosenhain:", [mpmath.nstr(x, 12) for x in rosenhain(om, th).as_list()])
    for n, phi in enumerate(phis):
        inv = igusa_invariants(period_matrix(phi, a, PREC))
        print(f"Igusa invariants, CM type {n}:", [mpmath.nstr(mpmath.re(x), 15) for x in inv])


if __name__ == "__main__":
    main()
