"""Command-line front end: JSON reports for class groups, Shimura groups, (star_m) and theta data.

Exit codes: 0 success, 2 invalid input, 3 resource ceiling reached.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from importlib import resources

import mpmath
import sympy

log = logging.getLogger("cmstar")

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE = 0, 2, 3


class InputError(ValueError):
    pass


def _schema() -> dict:
    return json.loads(resources.files("cmstar").joinpath("report_schema.json").read_text())


def validate_report(report: dict) -> None:
    import jsonschema
    jsonschema.validate(report, _schema())


# ---------------------------------------------------------------------------
# input parsing

def parse_field(text: str):
    from .nfield import CMField, FieldError
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"field must be given as A,B (got {text!r})")
    try:
        k = CMField(a, b)
    except FieldError as e:
        raise InputError(str(e))
    if k.is_biquadratic():
        raise InputError("biquadratic CM fields are not supported")
    if _reducible(a, b):
        raise InputError("polynomial is reducible")
    return k


def _reducible(a: int, b: int) -> bool:
    x = sympy.Symbol("x")
    return not sympy.Poly(x ** 4 + a * x ** 2 + b, x).is_irreducible


def parse_quadratic(d: int):
    from .nfield import NumberField, is_square
    if d in (0, 1) or is_square(abs(d)) and d > 0:
        raise InputError("D must not be a square")
    return NumberField([-d, 0, 1], name="w")


def parse_element(field, text: str):
    """Parse a polynomial in alpha (or a) with rational coefficients."""
    from fractions import Fraction
    al = sympy.Symbol("alpha")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"alpha": al, "a": al})
        poly = sympy.Poly(expr, al)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
        raise InputError(f"cannot parse element {text!r}: {e}")
    out = field.zero()
    g = field.gen()
    for (k,), c in poly.terms():
        c = sympy.Rational(c)
        out = out + g ** k * Fraction(int(c.p), int(c.q))
    return out


def parse_ideal(field, text: str):
    from .ideals import Ideal
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise InputError("empty ideal")
    gens = [parse_element(field, p) for p in parts]
    if all(x.is_zero() for x in gens):
        raise InputError("zero ideal")
    return Ideal.from_gens(field, gens)


def parse_omega(text: str):
    from .analytic import make_period_matrix
    try:
        flat = text.replace("[", "").replace("]", "").replace(" ", "")
        vals = [complex(x.replace("i", "j")) for x in flat.split(",")]
    except ValueError as e:
        raise InputError(f"cannot parse period matrix: {e}")
    if len(vals) != 4:
        raise InputError("period matrix needs four entries")
    try:
        return make_period_matrix([[vals[0], vals[1]], [vals[2], vals[3]]], _precision(None))
    except ValueError as e:
        raise InputError(str(e))


def _precision(p: int | None) -> int:
    if p:
        return p
    return int(os.environ.get("CMSTAR_PRECISION", "212"))


# ---------------------------------------------------------------------------
# commands

def _elem_str(x) -> str:
    return str(x)


def cmd_classgroup(args) -> dict:
    from .rayclass import ray_class_group
    if args.field:
        k = parse_field(args.field)
        fdesc = {"A": k.A, "B": k.B}
    elif args.quadratic is not None:
        k = parse_quadratic(args.quadratic)
        fdesc = {"quadratic": args.quadratic}
    else:
        raise InputError("give --field A,B or --quadratic D")
    if args.m < 1:
        raise InputError("modulus must be positive")
    if args.narrow and k.signature()[0] == 0:
        raise InputError("--narrow needs real places")
    g = ray_class_group(k, args.m, narrow=args.narrow, seed=args.seed)
    gens = [I.two_element_str() for I in g.ideal_reps()]
    return {"inputs": {**fdesc, "m": args.m, "narrow": args.narrow},
            "invariants": list(g.invariants), "order": str(g.order()), "generators": gens}


def cmd_shimura(args) -> dict:
    from .shimura import shimura_group
    k = parse_field(args.field)
    if args.m < 1:
        raise InputError("modulus must be positive")
    sg = shimura_group(k, args.m, seed=args.seed)
    reps = [{"ideal": r.ideal_part().two_element_str(), "scalar": _elem_str(r.scalar)} for r in sg.reps]
    co, kn = sg.coker_n1.order(), sg.ker_n2_group.order()
    return {"inputs": {"A": k.A, "B": k.B, "m": args.m},
            "invariants": list(sg.invariants), "order": str(sg.order()),
            "coker_N1": list(sg.coker_n1.invariants), "ker_N2": list(sg.ker_n2_group.invariants),
            "order_identity": {"coker_N1": str(co), "ker_N2": str(kn), "holds": co * kn == sg.order()},
            "units": {"eps0": _elem_str(sg.eps0), "eps0_plus": _elem_str(sg.eps0_plus)},
            "generators": reps}


def _verdict_json(v) -> dict:
    return {"m": v.m, "holds": v.holds, "cl_invariants": list(v.group.invariants),
            "orders": {k: str(x) for k, x in v.orders().items()}}


def cmd_star(args) -> dict:
    from .star import (as_reflex_pair, does_star_hold, find_m_s, minimal_star_m, mixed_containment,
                       verify_theorem_main1)
    from .cm import cm_types, reflex
    k = parse_field(args.field)
    types = cm_types(k)
    phi = types[0] if args.type == "both-positive" else types[1]
    rp = reflex(phi)
    out = {"inputs": {"A": k.A, "B": k.B, "cm_type": phi.label},
           "reflex": {"A": rp.reflex_field.A, "B": rp.reflex_field.B}}
    if args.find_ms:
        sel = find_m_s(rp.reflex_field)
        out["selection"] = {"S": [p.two_element_str() for p in sel.S], "P_S": sel.P_S, "m_S": sel.m_S,
                            "theorem_check": verify_theorem_main1(rp.reflex_field, sel)}
    elif args.minimal:
        if args.bound is None:
            raise InputError("--minimal needs --bound")
        out["minimal_m"] = minimal_star_m(rp, args.bound)
    elif args.mixed:
        try:
            m1, m2 = (int(x) for x in args.mixed.split(","))
        except ValueError:
            raise InputError("--mixed expects m1,m2")
        out["mixed"] = {"m1": m1, "m2": m2, "holds": mixed_containment(rp, m1, m2)}
    elif args.m:
        out["verdict"] = _verdict_json(does_star_hold(rp, args.m))
    else:
        raise InputError("give --m, --find-ms, --minimal or --mixed")
    return out


def _c(z, digits: int = 20) -> dict:
    return {"re": mpmath.nstr(mpmath.re(z), digits), "im": mpmath.nstr(mpmath.im(z), digits)}


def cmd_analytic(args) -> dict:
    from .analytic import (igusa_from_rosenhain, period_matrix, rosenhain, theta_constant, theta_table)
    from .cm import cm_types
    prec = _precision(args.precision)
    out: dict = {"inputs": {"precision": prec}}
    if args.omega:
        om = parse_omega(args.omega)
        om.precision = prec
        out["inputs"]["omega"] = args.omega
    else:
        if not (args.field and args.ideal):
            raise InputError("give --field and --ideal, or --omega")
        k = parse_field(args.field)
        types = cm_types(k)
        phi = types[0] if args.type == "both-positive" else types[1]
        a = parse_ideal(k, args.ideal)
        om = period_matrix(phi, a, prec)
        out["inputs"].update({"A": k.A, "B": k.B, "ideal": a.two_element_str(), "cm_type": phi.label})
    with mpmath.workprec(prec):
        out["omega"] = [[_c(x) for x in row] for row in om.entries]
        th = theta_table(om)
        if args.theta_table:
            out["theta"] = [_c(t) for t in th]
        tr = rosenhain(om, th)
        out["rosenhain"] = [_c(x) for x in tr.as_list()]
        out["igusa"] = [_c(x) for x in igusa_from_rosenhain(tr, prec)]
    out["precision_tag"] = f"{prec} bits working, 20 digits shown"
    return out


COMMANDS = {"classgroup": cmd_classgroup, "shimura": cmd_shimura, "star": cmd_star, "analytic": cmd_analytic}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmstar", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classgroup", help="ray or narrow class group invariants and generators")
    c.add_argument("--field")
    c.add_argument("--quadratic", type=int)
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--narrow", action="store_true")

    s = sub.add_parser("shimura", help="Shimura ray class group C_K(m)")
    s.add_argument("--field", required=True)
    s.add_argument("--m", type=int, default=1)

    t = sub.add_parser("star", help="decide (star_m), find m_S, scan for the minimal m")
    t.add_argument("--field", required=True)
    t.add_argument("--type", choices=["both-positive", "mixed"], default="both-positive")
    t.add_argument("--m", type=int)
    t.add_argument("--find-ms", action="store_true")
    t.add_argument("--minimal", action="store_true")
    t.add_argument("--bound", type=int)
    t.add_argument("--mixed")

    a = sub.add_parser("analytic", help="period matrix, theta constants, Rosenhain and Igusa invariants")
    a.add_argument("--field")
    a.add_argument("--type", choices=["both-positive", "mixed"], default="both-positive")
    a.add_argument("--ideal")
    a.add_argument("--omega", help="four comma-separated complex entries, e.g. 1.5852j,-0.16036,-0.16036,0.5+1.7723j")
    a.add_argument("--precision", type=int)
    a.add_argument("--theta-table", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(message)s")
    t0 = time.time()
    try:
        body = COMMANDS[args.command](args)
    except InputError as e:
        print(json.dumps({"command": args.command, "error": str(e)}), file=sys.stdout)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NotImplementedError, MemoryError) as e:
        print(json.dumps({"command": args.command, "error": f"resource ceiling: {e}"}), file=sys.stdout)
        print(f"resource ceiling: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    report = {"command": args.command, "seed": args.seed, **body}
    validate_report(report)
    # timings go to the log only, so that reports are byte-identical across runs
    log.info("%s finished in %.2f s", args.command, time.time() - t0)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
