"""Rational functions over F_{q^m}: simplest-form reduction, evaluation with a
pole marker, the excluded set S, and membership in the admissible class
(degree-sum-n rational functions avoiding perfect-power shape and with a
denominator factor of modest multiplicity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ffield import FieldContext, FieldElement
from .numtheory import IntFactorization, IncompleteFactorizationError
from .polyalg import Poly, factor_poly, gcd_poly, parse_poly, poly_to_text

__all__ = [
    "RationalFunction",
    "MembershipEvidence",
    "POLE",
    "reduce",
    "check_membership",
    "evaluate",
    "excluded_set",
    "factor_multiplicities",
    "parse_rational",
    "rational_to_text",
]


class _Pole:
    """Marker value returned when evaluating at a pole."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "POLE"


POLE = _Pole()


@dataclass(frozen=True)
class RationalFunction:
    """lead * f1/f2 with f1, f2 monic coprime and f2 the monic denominator."""

    f1: Poly
    f2: Poly
    lead: object  # scalar in the top field

    @property
    def n1(self) -> int:
        return self.f1.degree

    @property
    def n2(self) -> int:
        return self.f2.degree

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def field(self):
        return self.f1.field

    def __repr__(self):
        return f"RationalFunction({rational_to_text(self)})"


def reduce(raw_num: Poly, raw_den: Poly) -> RationalFunction:
    """Divide out the gcd, normalize both parts monic, pull the scalar out front."""
    if raw_den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if raw_num.field != raw_den.field:
        raise ValueError("numerator and denominator over different fields")
    fld = raw_num.field
    if raw_num.is_zero():
        return RationalFunction(Poly.zero(fld), Poly.one(fld), fld.one)
    g = gcd_poly(raw_num, raw_den)
    num = raw_num // g
    den = raw_den // g
    lead = fld.mul(num.leading(), fld.inv(den.leading()))
    return RationalFunction(num.monic(), den.monic(), lead)


@dataclass(frozen=True)
class MembershipEvidence:
    in_class: bool
    condition_i: bool
    witness_d: int | None  # violating divisor of q^m-1 (0 marks the pure-monomial case)
    condition_ii: bool
    witness_factor: Poly | None  # denominator factor certifying (ii), with its multiplicity
    witness_multiplicity: int | None
    excluded_set_size: int


def factor_multiplicities(f: RationalFunction, seed: int = 0):
    """[(irreducible, multiplicity, from_denominator)] over f1*f2; f reduced."""
    out = []
    if f.f1.degree > 0:
        out.extend((h, e, False) for h, e in factor_poly(f.f1, seed))
    if f.f2.degree > 0:
        out.extend((h, e, True) for h, e in factor_poly(f.f2, seed))
    return out


def check_membership(
    f: RationalFunction,
    qm_minus_1: IntFactorization,
    strict_char_mode: bool = False,
    seed: int = 0,
) -> MembershipEvidence:
    """Decide membership in the admissible class of degree-sum-n rational functions.

    Condition (i): f is not c*x^j*h^d for a divisor d > 1 of q^m-1.  Decided via
    the gcd d0 of the multiplicities of all irreducible factors other than x
    (the x^j term absorbs x); violated exactly when gcd(d0, q^m-1) > 1, with
    d0 = 0 (no non-x factors) meaning every d works.

    Condition (ii): some monic irreducible factor of the denominator has
    multiplicity r with q^m not dividing r -- as printed, this is equivalent to
    a nonconstant denominator at any feasible scale.  ``strict_char_mode``
    instead requires p not dividing r.
    """
    if not qm_minus_1.complete:
        raise IncompleteFactorizationError("membership needs the full factorization of q^m-1")
    N = qm_minus_1.value
    fld = f.field
    x_poly = Poly.x(fld)
    facs = factor_multiplicities(f, seed)

    d0 = 0
    for h, e, _ in facs:
        if h == x_poly:
            continue
        d0 = math.gcd(d0, e)
    g0 = math.gcd(d0, N)
    cond_i = g0 == 1
    witness_d = None
    if not cond_i:
        if d0 == 0:
            witness_d = 0
        else:
            witness_d = next(p for p in qm_minus_1.primes() if g0 % p == 0)

    qm = N + 1
    p_char = fld.char
    cond_ii = False
    wit_f = wit_r = None
    for h, e, from_den in facs:
        if not from_den:
            continue
        ok = (e % p_char != 0) if strict_char_mode else (e % qm != 0)
        if ok:
            cond_ii = True
            wit_f, wit_r = h, e
            break

    s_size = _excluded_set_size(f, seed)
    return MembershipEvidence(
        in_class=cond_i and cond_ii,
        condition_i=cond_i,
        witness_d=witness_d,
        condition_ii=cond_ii,
        witness_factor=wit_f,
        witness_multiplicity=wit_r,
        excluded_set_size=s_size,
    )


def excluded_set(ctx: FieldContext, f: RationalFunction, seed: int = 0) -> set[FieldElement]:
    """S: zeros of f1 and f2 in F_{q^m}, together with 0."""
    fld = f.field
    out = {ctx.zero()}
    for poly in (f.f1, f.f2):
        if poly.degree < 1:
            continue
        for h, _ in factor_poly(poly, seed):
            if h.degree == 1:
                out.add(FieldElement(ctx, fld.neg(h.coeffs[0])))
    return out


def _excluded_set_size(f: RationalFunction, seed: int = 0) -> int:
    fld = f.field
    roots = set()
    for poly in (f.f1, f.f2):
        if poly.degree < 1:
            continue
        for h, _ in factor_poly(poly, seed):
            if h.degree == 1:
                roots.add(h.coeffs[0])
    zero_root = fld.neg(fld.zero)
    return len(roots | {zero_root})


def evaluate(f: RationalFunction, x: FieldElement):
    """f1(x)*lead / f2(x), or POLE when the denominator vanishes."""
    fld = f.field
    xv = x.value
    den = f.f2.evaluate(xv)
    if den == fld.zero:
        return POLE
    num = fld.mul(f.lead, f.f1.evaluate(xv))
    return FieldElement(x.ctx, fld.mul(num, fld.inv(den)))


def parse_rational(field, text: str) -> RationalFunction:
    """Parse "(NUM)/(DEN)" (or a bare polynomial) in the shared poly format."""
    text = text.strip()
    if "/" in text:
        num_s, den_s = text.split("/", 1)
    else:
        num_s, den_s = text, "1"
    num_s = num_s.strip()
    den_s = den_s.strip()
    if num_s.startswith("(") and num_s.endswith(")"):
        num_s = num_s[1:-1]
    if den_s.startswith("(") and den_s.endswith(")"):
        den_s = den_s[1:-1]
    return reduce(parse_poly(field, num_s), parse_poly(field, den_s))


def rational_to_text(f: RationalFunction) -> str:
    fld = f.field
    num = f.f1.scale(f.lead)
    return f"({poly_to_text(num)})/({poly_to_text(f.f2)})"
