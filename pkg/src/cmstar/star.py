"""Deciding the containment (star_m) and choosing the modulus m_S.

For a primitive quartic CM pair (K, Phi) with reflex (K^r, Phi^r), every
field in the containment H_{K^r}(1) in H_{K0^r}(m) CM_{K^r,Phi^r}(m) is the
fixed field of a subgroup of Cl_{K^r}(m):

    f0: Cl_{K^r}(m) -> Cl_{K^r}(1)       (forget the modulus)
    f1: Cl_{K^r}(m) -> Cl_{K0^r}(m)      (relative norm)
    f2: Cl_{K^r}(m) -> C_K(m)            (type norm with the rational norm)

and the containment holds exactly when ker f1 and ker f2 intersect inside
ker f0.  Everything is decided in Cl_{K^r}(m); no extension is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm, prod

from .classgroup import mul_reduced, pow_reduced, relative_norm_ideal
from .cm import CMType, ReflexPair, cm_types, reflex
from .fgab import (AbGroup, Morphism, Subgroup, morphism_kernel, quotient_group, subgroup_intersection,
                   subgroup_leq, torsion_subgroup)
from .ideals import Ideal, PrimeIdeal, prime_decomposition, primes_up_to
from .nfield import CMField, NumberField, factor_integer
from .rayclass import ray_class_group
from .shimura import map_f2


@dataclass
class StarVerdict:
    m: int
    holds: bool
    group: AbGroup
    ker_f0: Subgroup
    ker_f1: Subgroup
    ker_f2: Subgroup
    intersection: Subgroup

    def orders(self) -> dict[str, int]:
        return {"group": self.group.order(), "ker_f0": self.ker_f0.order(),
                "ker_f1": self.ker_f1.order(), "ker_f2": self.ker_f2.order(),
                "intersection": self.intersection.order()}


@dataclass
class SSelection:
    S: list[PrimeIdeal]
    P_S: list[int]
    m_S: int


def as_reflex_pair(obj) -> ReflexPair:
    """Accept a ReflexPair, a CMType or a CM field (both-positive type)."""
    if isinstance(obj, ReflexPair):
        return obj
    if isinstance(obj, CMType):
        return reflex(obj)
    if isinstance(obj, CMField):
        return reflex(cm_types(obj)[0])
    raise TypeError("expected a CM field, CM type or reflex pair")


# ---------------------------------------------------------------------------
# the three maps out of Cl_{K^r}(m)

def map_f0(kr: NumberField, m: int) -> Morphism:
    """Cl_{K^r}(m) -> Cl_{K^r}(1)."""
    rm = ray_class_group(kr, m)
    r1 = ray_class_group(kr, 1)
    imgs = []
    for i in range(rm.group.ngens):
        _, parts = rm.element_parts(rm.group.unit(i))
        img = r1.group.zero()
        for g, e in parts:
            img = r1.group.add(img, r1.group.scale(e, r1.dlog(g)))
        imgs.append(img)
    return Morphism.from_images(rm.group, r1.group, imgs)


def map_f1(kr: CMField, m: int, target_modulus: int | None = None) -> Morphism:
    """Cl_{K^r}(M) -> Cl_{K0^r}(m) induced by the relative norm (M defaults to m)."""
    mm = m if target_modulus is None else target_modulus
    big = m if target_modulus is None else lcm(m, mm)
    rm = ray_class_group(kr, big)
    r0 = ray_class_group(kr.K0, mm)
    imgs = []
    for i in range(rm.group.ngens):
        x, parts = rm.element_parts(rm.group.unit(i))
        cur = (Ideal.unit(kr.K0), kr.rel_norm(x))
        for g, e in parts:
            cur = mul_reduced(cur, pow_reduced(relative_norm_ideal(g), e))
        imgs.append(r0.dlog_compact(*cur))
    return Morphism.from_images(rm.group, r0.group, imgs)


def does_star_hold(pair, m: int) -> StarVerdict:
    """Decide (star_m): ker f1 and ker f2 intersect inside ker f0."""
    rp = as_reflex_pair(pair)
    kr = rp.reflex_field
    g = ray_class_group(kr, m).group
    k0 = morphism_kernel(map_f0(kr, m))
    k1 = morphism_kernel(map_f1(kr, m))
    k2 = morphism_kernel(map_f2(rp, m))
    inter = subgroup_intersection(k1, k2)
    return StarVerdict(m, subgroup_leq(inter, k0), g, k0, k1, k2, inter)


def mixed_containment(pair, m1: int, m2: int) -> bool:
    """Whether H_{K^r}(1) lies in H_{K0^r}(m1) CM_{K^r,Phi^r}(m2), decided over M = lcm(m1, m2)."""
    rp = as_reflex_pair(pair)
    kr = rp.reflex_field
    big = lcm(m1, m2)
    k0 = morphism_kernel(map_f0(kr, big))
    k1 = morphism_kernel(map_f1(kr, big, target_modulus=m1))
    k2 = morphism_kernel(map_f2(rp, m2, domain_modulus=big))
    return subgroup_leq(subgroup_intersection(k1, k2), k0)


def minimal_star_m(pair, bound: int) -> int | None:
    """The least m <= bound for which (star_m) holds, or None."""
    rp = as_reflex_pair(pair)
    for m in range(1, bound + 1):
        if does_star_hold(rp, m).holds:
            return m
    return None


def star_scan(pair, bound: int) -> dict[int, bool]:
    """(star_m) for every m <= bound, checking that it is inherited by multiples."""
    rp = as_reflex_pair(pair)
    out = {m: does_star_hold(rp, m).holds for m in range(1, bound + 1)}
    for d, ok in out.items():
        for m in range(2 * d, bound + 1, d):
            if ok and not out[m]:
                raise ArithmeticError(f"(star_{d}) holds but (star_{m}) fails")
    return out


def exponent_two_violations(v: StarVerdict) -> list[tuple[int, ...]]:
    """Elements of ker f1 and ker f2 whose order exceeds 2 (expected: none)."""
    g = v.group
    bad = []
    sub = v.intersection.as_group()
    h = v.intersection.hnf
    n = g.ngens
    for e in sub.elements():
        base = sub.to_base(list(e))
        x = g.reduce([sum(h[i][t] * base[t] for t in range(len(base))) for i in range(n)])
        if any(g.scale(2, x)):
            bad.append(x)
    return bad


# ---------------------------------------------------------------------------
# the modulus m_S

def _quotient_order(kr: NumberField, s: list[PrimeIdeal]) -> int:
    cl = ray_class_group(kr, 1)
    sub = Subgroup.generated_by(cl.group, [cl.dlog(p) for p in s])
    return sub.index()


def _two_part(n: int) -> int:
    return n & -n


def find_m_s(kr: NumberField) -> SSelection:
    """A set S of primes satisfying the hypotheses for m_S, and m_S itself.

    S starts with all primes above 2; while |Cl/<S>| is even the smallest
    prime (by norm, then characteristic, then HNF) that lowers the 2-part
    of the quotient is added; S is then padded to at least three primes.
    """
    s = list(prime_decomposition(kr, 2))
    bound = 50
    while _quotient_order(kr, s) % 2 == 0:
        cur = _two_part(_quotient_order(kr, s))
        cands = sorted((p for p in primes_up_to(kr, bound) if p not in s),
                       key=lambda p: (p.norm_int, p.p, p.hnf))
        for p in cands:
            if _two_part(_quotient_order(kr, s + [p])) < cur:
                s.append(p)
                break
        else:
            bound *= 2
    if len(s) < 3:
        bound = 50
        while len(s) < 3:
            cands = sorted((p for p in primes_up_to(kr, bound) if p not in s),
                           key=lambda p: (p.norm_int, p.p, p.hnf))
            s += cands[:3 - len(s)]
            bound *= 2
    ps = sorted({p.p for p in s})
    return SSelection(s, ps, 4 * prod(ps))


def verify_theorem_main1(kr: NumberField, sel: SSelection) -> bool:
    """Whether Cl_{K^r}(m_S)[2] lies in ker(Cl_{K^r}(m_S) -> Cl_{K^r}(1)).

    This is the group-side form of H_{K^r}(1) in E_{K^r}(m_S), where E is
    the fixed field of the 2-torsion.
    """
    g = ray_class_group(kr, sel.m_S).group
    return subgroup_leq(torsion_subgroup(g, 2), morphism_kernel(map_f0(kr, sel.m_S)))
