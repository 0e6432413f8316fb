"""Polynomial algebra over the tower's coefficient fields: gcd, irreducibility,
factorization (squarefree / distinct-degree / seeded equal-degree), the
cyclotomic-coset factorization of x^m - 1, and the divisor statistics
Phi, Theta, mu', W for F_q-polynomials.

A ``Poly`` is tagged with its coefficient field; mixing levels is rejected.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import numtheory

__all__ = [
    "Poly",
    "CycloFactorization",
    "PolyDivisorStats",
    "gcd_poly",
    "is_irreducible",
    "factor_poly",
    "cyclotomic_factorization",
    "divisor_stats",
    "parse_poly",
    "poly_to_text",
]

EXPLICIT_LIMIT = 1 << 24


class Poly:
    """Immutable dense polynomial; coeffs ascending, trailing zeros trimmed."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == field.zero:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (field.one,))

    @classmethod
    def x(cls, field):
        return cls(field, (field.zero, field.one))

    @classmethod
    def x_pow_minus_one(cls, field, m: int):
        return cls(field, tuple([field.neg(field.one)] + [field.zero] * (m - 1) + [field.one]))

    @classmethod
    def from_roots(cls, field, roots):
        out = cls.one(field)
        for r in roots:
            out = out * cls(field, (field.neg(r), field.one))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial: -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one

    def leading(self):
        if not self.coeffs:
            return self.field.zero
        return self.coeffs[-1]

    def _check(self, other: "Poly"):
        if self.field != other.field:
            raise ValueError("polynomials over different field levels")

    def __add__(self, other):
        self._check(other)
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [f.zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [f.zero] * (n - len(other.coeffs))
        return Poly(f, (f.add(x, y) for x, y in zip(a, b)))

    def __sub__(self, other):
        self._check(other)
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [f.zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [f.zero] * (n - len(other.coeffs))
        return Poly(f, (f.sub(x, y) for x, y in zip(a, b)))

    def __neg__(self):
        f = self.field
        return Poly(f, (f.neg(c) for c in self.coeffs))

    def __mul__(self, other):
        self._check(other)
        f = self.field
        if self.is_zero() or other.is_zero():
            return Poly.zero(f)
        out = [f.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == f.zero:
                continue
            for j, b in enumerate(other.coeffs):
                if b == f.zero:
                    continue
                out[i + j] = f.add(out[i + j], f.mul(a, b))
        return Poly(f, out)

    def scale(self, c) -> "Poly":
        f = self.field
        return Poly(f, (f.mul(c, x) for x in self.coeffs))

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        r = list(self.coeffs)
        dv = other.degree
        lead_inv = f.inv(other.leading())
        q = [f.zero] * max(len(r) - dv, 1)
        while len(r) - 1 >= dv and any(c != f.zero for c in r):
            while r and r[-1] == f.zero:
                r.pop()
            if len(r) - 1 < dv:
                break
            du = len(r) - 1
            c = f.mul(r[-1], lead_inv)
            q[du - dv] = c
            for j in range(dv + 1):
                r[du - dv + j] = f.sub(r[du - dv + j], f.mul(c, other.coeffs[j]))
        return Poly(f, q), Poly(f, r)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero() or self.is_monic():
            return self
        return self.scale(self.field.inv(self.leading()))

    def pow_mod(self, e: int, modulus: "Poly") -> "Poly":
        out = Poly.one(self.field)
        base = self % modulus
        while e:
            if e & 1:
                out = (out * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return out

    def evaluate(self, x):
        """Horner evaluation; x is a coefficient-field scalar."""
        f = self.field
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def derivative(self) -> "Poly":
        f = self.field
        out = []
        for i, c in enumerate(self.coeffs[1:], 1):
            s = f.zero
            for _ in range(i % f.char if f.char else i):
                s = f.add(s, c)
            out.append(s)
        return Poly(f, out)

    def reverse(self) -> "Poly":
        """Coefficient reversal x^deg * f(1/x) (for nonzero constant term)."""
        return Poly(self.field, tuple(reversed(self.coeffs)))

    def __eq__(self, other):
        return (
            isinstance(other, Poly) and other.field == self.field and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        return f"Poly({poly_to_text(self)})"

    def sort_key(self):
        f = self.field
        return (self.degree, tuple(f.to_int(c) for c in reversed(self.coeffs)))


def gcd_poly(a: Poly, b: Poly) -> Poly:
    """Monic gcd by Euclid's algorithm."""
    if a.field != b.field:
        raise ValueError("polynomials over different field levels")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _pth_root(f: Poly) -> Poly:
    """For f = g(x^p) over F_q with q = p^e: recover g via p-th roots of coefficients."""
    fld = f.field
    p = fld.char
    root_exp = fld.order // p  # a -> a^(q/p) inverts the Frobenius on F_q
    return Poly(fld, tuple(fld.pow(f.coeffs[i], root_exp) for i in range(0, len(f.coeffs), p)))


def _squarefree_part_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """(squarefree monic factor, multiplicity) pairs; handles char-p p-th powers."""
    fld = f.field
    p = fld.char
    out: dict[Poly, int] = {}

    def run(g: Poly, mult: int):
        g = g.monic()
        if g.degree < 1:
            return
        d = g.derivative()
        if d.is_zero():
            run(_pth_root(g), mult * p)
            return
        c = gcd_poly(g, d)
        w = g // c
        i = 1
        while w.degree > 0:
            y = gcd_poly(w, c)
            fac = w // y
            if fac.degree > 0:
                out[fac.monic()] = out.get(fac.monic(), 0) + mult * i
            w = y
            c = c // y
            i += 1
        if c.degree > 0:
            run(c, mult)  # pure p-th-power part, derivative now zero

    run(f, 1)
    return sorted(out.items(), key=lambda t: t[0].sort_key())


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    """Split squarefree monic f into (product of its degree-d irreducibles, d)."""
    fld = f.field
    q = fld.order
    out = []
    x = Poly.x(fld)
    rem = f
    h = x % f
    d = 0
    while rem.degree >= 2 * (d + 1):
        d += 1
        h = h.pow_mod(q, rem)
        g = gcd_poly(h - x, rem)
        if g.degree > 0:
            out.append((g, d))
            rem = rem // g
            h = h % rem
    if rem.degree > 0:
        out.append((rem, rem.degree))
    return out


def _equal_degree_split(f: Poly, d: int, rng: random.Random) -> Poly:
    """Cantor-Zassenhaus: find a proper monic factor of f (product of degree-d irreducibles)."""
    fld = f.field
    q = fld.order
    n = f.degree
    while True:
        h = Poly(fld, tuple(fld.rand(rng) for _ in range(n)))
        if h.degree < 1:
            continue
        g = gcd_poly(h, f)
        if 0 < g.degree < n:
            return g
        if q % 2 == 1:
            t = h.pow_mod((q**d - 1) // 2, f) - Poly.one(fld)
        else:
            # char 2: trace map sum h^(2^i) over the degree-d subfield
            k2 = d * int(math.log2(q))
            t = Poly.zero(fld)
            cur = h % f
            for _ in range(k2):
                t = t + cur
                cur = (cur * cur) % f
        g = gcd_poly(t, f)
        if 0 < g.degree < n:
            return g


def factor_poly(f: Poly, seed: int = 0) -> list[tuple[Poly, int]]:
    """Complete factorization into monic irreducibles, deterministic per seed."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if f.degree < 1:
        return []
    fingerprint = 0
    for c in f.coeffs:
        fingerprint = fingerprint * 1_000_003 + f.field.to_int(c) + 1
    rng = random.Random((seed << 12) ^ 0x5EED ^ (fingerprint & 0xFFFFFFFF))
    out: list[tuple[Poly, int]] = []
    for sq, mult in _squarefree_part_decomposition(f):
        for part, d in _distinct_degree(sq):
            stack = [part]
            while stack:
                g = stack.pop()
                if g.degree == d:
                    out.append((g.monic(), mult))
                    continue
                h = _equal_degree_split(g, d, rng)
                stack.extend([h, g // h])
    out.sort(key=lambda t: t[0].sort_key())
    return out


def is_irreducible(f: Poly) -> bool:
    """Rabin irreducibility test."""
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    fld = f.field
    q = fld.order
    n = f.degree
    x = Poly.x(fld)
    # x^(q^n) == x mod f
    h = x
    for _ in range(n):
        h = h.pow_mod(q, f)
    if (h - x) % f != Poly.zero(fld):
        return False
    for r in {p for p, _ in numtheory.factor(n).factors}:
        h = x
        for _ in range(n // r):
            h = h.pow_mod(q, f)
        if gcd_poly(h - x, f).degree != 0:
            return False
    return True


@dataclass(frozen=True)
class CycloFactorization:
    """Distinct irreducible factors of x^m - 1 over F_q from q-cyclotomic cosets."""

    q: int
    m: int
    m_prime: int
    j: int  # p-adic valuation of m
    multiplicity: int  # p^j, shared by every factor
    coset_degrees: tuple[int, ...]  # sorted sizes of the cosets mod m'
    factors: tuple[Poly, ...] | None  # explicit monic irreducibles, or None
    explicit: bool

    @property
    def M_prime(self) -> int:
        return len(self.coset_degrees)

    @property
    def W(self) -> int:
        """Number of squarefree monic divisors of x^m - 1 over F_q."""
        return 1 << self.M_prime

    def degrees_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.coset_degrees:
            out[d] = out.get(d, 0) + 1
        return out


def _cyclotomic_cosets(q: int, n: int) -> list[list[int]]:
    seen = bytearray(n)
    cosets = []
    for s in range(n):
        if seen[s]:
            continue
        orbit = []
        t = s
        while not seen[t]:
            seen[t] = 1
            orbit.append(t)
            t = t * q % n
        cosets.append(orbit)
    return cosets


def cyclotomic_factorization(
    field, m: int, explicit: bool = False, limit: int = EXPLICIT_LIMIT, seed: int = 0
) -> CycloFactorization:
    """Factor x^m - 1 over F_q.  Degrees always; explicit polynomials on request.

    Explicit factors are built from roots of unity in the splitting field
    F_{q^e} (e = ord of q mod m'), then verified to recombine.
    """
    q = field.order
    p = field.char
    mp, j = m, 0
    while mp % p == 0:
        mp //= p
        j += 1
    cosets = _cyclotomic_cosets(q, mp)
    degrees = tuple(sorted(len(c) for c in cosets))
    polys = None
    if explicit:
        e = max(len(c) for c in cosets)
        if q**e > limit:
            raise numtheory.ResourceBudgetError(
                f"splitting field order {q}^{e} exceeds explicit-factor limit"
            )
        polys = tuple(_explicit_coset_factors(field, mp, cosets, e, seed))
    return CycloFactorization(
        q=q,
        m=m,
        m_prime=mp,
        j=j,
        multiplicity=p**j,
        coset_degrees=degrees,
        factors=polys,
        explicit=explicit,
    )


def _explicit_coset_factors(field, mp: int, cosets, e: int, seed: int):
    """Multiply out (x - zeta^c) over each coset in the splitting field."""
    from . import ffield as ff

    if mp == 1:
        return [Poly(field, (field.neg(field.one), field.one))]
    if e == 1:
        # all roots already in F_q: zeta = element of multiplicative order mp
        zeta = _element_of_order(field, mp, seed)
        pow_cache = [field.one]
        for _ in range(mp - 1):
            pow_cache.append(field.mul(pow_cache[-1], zeta))
        return sorted(
            (Poly.from_roots(field, [pow_cache[c] for c in coset]) for coset in cosets),
            key=Poly.sort_key,
        )
    # build F_{q^e} over F_q, find zeta of order mp, multiply and project down
    rng = random.Random((seed << 10) ^ 0xC0527)
    big = ff.ExtensionField(field, ff._find_irreducible(field, e, rng))
    zeta = _element_of_order(big, mp, seed)
    pow_cache = [big.one]
    for _ in range(mp - 1):
        pow_cache.append(big.mul(pow_cache[-1], zeta))
    out = []
    for coset in cosets:
        prod = Poly.one(big)
        for c in coset:
            prod = prod * Poly(big, (big.neg(pow_cache[c]), big.one))
        # coefficients must lie in F_q (first coordinate of the tuple)
        coeffs = []
        for cf in prod.coeffs:
            if any(x != field.zero for x in cf[1:]):
                raise ValueError("coset product has coefficients outside F_q")
            coeffs.append(cf[0])
        out.append(Poly(field, coeffs))
    return sorted(out, key=Poly.sort_key)


def _element_of_order(field, n: int, seed: int):
    """Element of exact multiplicative order n in the given field."""
    size = field.order
    if (size - 1) % n != 0:
        raise ValueError(f"no element of order {n} in field of size {size}")
    fact_n = numtheory.factor(n)
    rng = random.Random((seed << 4) ^ size ^ n)
    while True:
        cand = field.rand(rng)
        if cand == field.zero:
            continue
        z = field.pow(cand, (size - 1) // n)
        if all(field.pow(z, n // ell) != field.one for ell in fact_n.primes()):
            return z


@dataclass(frozen=True)
class PolyDivisorStats:
    """w, W = 2^w, Phi, Theta, mu' for a monic F_q-polynomial."""

    poly: Poly
    w: int
    W: int
    Phi: int
    Theta: Fraction
    mu_prime: int


def divisor_stats(g: Poly, seed: int = 0) -> PolyDivisorStats:
    """Phi/Theta/W/w/mu' via the complete factorization of g."""
    if g.is_zero() or not g.is_monic():
        raise ValueError("divisor_stats needs a monic nonzero polynomial")
    q = g.field.order
    facs = factor_poly(g, seed)
    phi = 1
    for h, e in facs:
        d = h.degree
        phi *= (q**d - 1) * q ** ((e - 1) * d)
    squarefree = all(e == 1 for _, e in facs)
    mu = (-1) ** len(facs) if squarefree else 0
    return PolyDivisorStats(
        poly=g,
        w=len(facs),
        W=1 << len(facs),
        Phi=phi,
        Theta=Fraction(phi, q**g.degree),
        mu_prime=mu,
    )


# --- text format: "c_d*x^d + ... + c_0", extension coefficients bracketed ---

_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?P<coeff>\[[^\]]*\]|\d+)?\s*
        (?:\*?\s*(?P<var>x)\s*(?:\^\s*(?P<exp>\d+))?)?\s*""",
    re.VERBOSE,
)


def _scalar_from_text(field, text: str):
    text = text.strip()
    if text.startswith("["):
        parts = [t for t in text[1:-1].split(",") if t.strip()]
        vals = [int(t) for t in parts]  # most significant first
        coords = list(reversed(vals))
        base = field.base
        coords += [0] * (field.degree - len(coords))
        return tuple(base.scalar_from_int(v) for v in coords[: field.degree])
    return field.scalar_from_int(int(text))


def parse_poly(field, text: str) -> Poly:
    """Parse the printable polynomial format; round-trips with poly_to_text."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    coeffs: dict[int, object] = {}
    pos = 0
    any_term = False
    while pos < len(text):
        msg = _TERM_RE.match(text, pos)
        if not msg or msg.end() == pos:
            raise ValueError(f"cannot parse polynomial at ...{text[pos:pos + 20]!r}")
        sign = -1 if msg.group("sign") == "-" else 1
        coeff_txt = msg.group("coeff")
        var = msg.group("var")
        exp = msg.group("exp")
        if coeff_txt is None and var is None:
            raise ValueError(f"cannot parse polynomial at ...{text[pos:pos + 20]!r}")
        e = int(exp) if exp else (1 if var else 0)
        if coeff_txt is None:
            c = field.one
        else:
            c = _scalar_from_text(field, coeff_txt)
        if sign < 0:
            c = field.neg(c)
        coeffs[e] = field.add(coeffs.get(e, field.zero), c)
        any_term = True
        pos = msg.end()
    if not any_term:
        raise ValueError("empty polynomial text")
    deg = max(coeffs)
    return Poly(field, tuple(coeffs.get(i, field.zero) for i in range(deg + 1)))


def _scalar_to_text(field, c) -> str:
    if isinstance(c, int):
        return str(c)
    return "[" + ",".join(str(field.base.to_int(x)) for x in reversed(c)) + "]"


def poly_to_text(f: Poly) -> str:
    if f.is_zero():
        return "0"
    fld = f.field
    terms = []
    for i in range(f.degree, -1, -1):
        c = f.coeffs[i]
        if c == fld.zero:
            continue
        ct = _scalar_to_text(fld, c)
        if i == 0:
            terms.append(ct)
        elif i == 1:
            terms.append(f"{ct}*x" if ct != "1" else "x")
        else:
            terms.append(f"{ct}*x^{i}" if ct != "1" else f"x^{i}")
    return " + ".join(terms)
