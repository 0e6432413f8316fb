"""Tower finite fields F_p < F_q < F_{q^m}: arithmetic, trace, Frobenius,
the F_q[x]-module action, and discrete-log tables for small fields.

Coefficient fields come in two flavours sharing one duck-typed interface:
``PrimeField`` (elements are ints mod p) and ``ExtensionField`` (elements are
coefficient tuples over the base).  ``FieldContext`` assembles the two-level
tower used everywhere else.
"""

from __future__ import annotations

import random
from array import array
from bisect import bisect_left
from dataclasses import dataclass

from . import numtheory
from .numtheory import (
    IntFactorization,
    ResourceBudgetError,
    factor_qm_minus_1,
    is_probable_prime,
)

__all__ = [
    "PrimeField",
    "ExtensionField",
    "FieldContext",
    "FieldElement",
    "DlogTable",
    "make_context",
    "FieldIntegrityError",
]

DLOG_LIMIT = 1 << 24


class FieldIntegrityError(RuntimeError):
    """Internal inconsistency (corrupt modulus, non-bijective table, ...)."""


class PrimeField:
    """F_p with elements represented as ints in [0, p)."""

    def __init__(self, p: int):
        if not is_probable_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.order = p
        self.degree = 1  # over F_p
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def pow(self, a, e: int):
        if e < 0:
            return self.inv(pow(a, -e, self.p))
        return pow(a, e, self.p)

    def scalar_from_int(self, i: int):
        return i % self.p

    def to_int(self, a) -> int:
        return a % self.p

    def from_int(self, i: int):
        if not 0 <= i < self.p:
            raise ValueError("index out of range")
        return i

    def elements(self):
        return range(self.p)

    def rand(self, rng: random.Random):
        return rng.randrange(self.p)

    def base_coords(self, a):
        return (a % self.p,)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class ExtensionField:
    """base[t]/(modulus): elements are coefficient tuples (ascending) of fixed length."""

    def __init__(self, base, modulus: tuple):
        k = len(modulus) - 1
        if k < 1 or modulus[-1] != base.one:
            raise ValueError("modulus must be monic of degree >= 1")
        self.base = base
        self.modulus = tuple(modulus)
        self.degree = k
        self.char = base.char
        self.order = base.order**k
        self.zero = (base.zero,) * k
        self.one = tuple([base.one] + [base.zero] * (k - 1))
        # reduction rows: t^(k+i) mod modulus for i in [0, k-1)
        self._red = []
        cur = list(self._mod_reduce_poly([base.zero] * k + [base.one]))
        self._red.append(tuple(cur))
        for _ in range(k - 2):
            cur = [base.zero] + cur
            cur = list(self._mod_reduce_poly(cur))
            self._red.append(tuple(cur))

    def _mod_reduce_poly(self, coeffs: list) -> tuple:
        """Reduce an arbitrary-degree coefficient list mod modulus (schoolbook)."""
        b = self.base
        k = self.degree
        cs = list(coeffs)
        for i in range(len(cs) - 1, k - 1, -1):
            c = cs[i]
            if c == b.zero:
                continue
            shift = i - k
            for j, mj in enumerate(self.modulus[:-1]):
                cs[shift + j] = b.sub(cs[shift + j], b.mul(c, mj))
            cs[i] = b.zero
        cs = cs[:k]
        cs += [b.zero] * (k - len(cs))
        return tuple(cs)

    def add(self, a, b):
        f = self.base
        return tuple(f.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        f = self.base
        return tuple(f.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        f = self.base
        return tuple(f.neg(x) for x in a)

    def mul(self, a, b):
        f = self.base
        k = self.degree
        prod = [f.zero] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai == f.zero:
                continue
            for j, bj in enumerate(b):
                if bj == f.zero:
                    continue
                prod[i + j] = f.add(prod[i + j], f.mul(ai, bj))
        out = list(prod[:k])
        for i in range(k, 2 * k - 1):
            c = prod[i]
            if c == f.zero:
                continue
            row = self._red[i - k]
            for j in range(k):
                out[j] = f.add(out[j], f.mul(c, row[j]))
        return tuple(out)

    def scalar_mul(self, c, a):
        f = self.base
        return tuple(f.mul(c, x) for x in a)

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid on polynomials over base
        b = self.base

        def pdeg(u):
            for i in range(len(u) - 1, -1, -1):
                if u[i] != b.zero:
                    return i
            return -1

        def pdivmod(u, v):
            u = list(u)
            dv = pdeg(v)
            lead_inv = b.inv(v[dv])
            q = [b.zero] * (max(pdeg(u) - dv + 1, 0) or 1)
            while pdeg(u) >= dv:
                du = pdeg(u)
                c = b.mul(u[du], lead_inv)
                q[du - dv] = c
                for j in range(dv + 1):
                    u[du - dv + j] = b.sub(u[du - dv + j], b.mul(c, v[j]))
            return q, u

        r0, r1 = list(self.modulus), list(a)
        s0, s1 = [b.zero], [b.one]
        while pdeg(r1) > 0:
            q, r = pdivmod(r0, r1)
            r0, r1 = r1, r
            # s_next = s0 - q*s1
            qs = [b.zero] * (len(q) + len(s1))
            for i, qi in enumerate(q):
                if qi == b.zero:
                    continue
                for j, sj in enumerate(s1):
                    qs[i + j] = b.add(qs[i + j], b.mul(qi, sj))
            s_next = [b.zero] * max(len(s0), len(qs))
            for i in range(len(s_next)):
                x = s0[i] if i < len(s0) else b.zero
                y = qs[i] if i < len(qs) else b.zero
                s_next[i] = b.sub(x, y)
            s0, s1 = s1, s_next
        d = pdeg(r1)
        if d != 0:
            raise FieldIntegrityError("modulus not irreducible: gcd nontrivial")
        c_inv = b.inv(r1[0])
        out = [b.mul(c_inv, x) for x in s1]
        return self._mod_reduce_poly(out)

    def pow(self, a, e: int):
        if e < 0:
            return self.inv(self.pow(a, -e))
        out = self.one
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def scalar_from_int(self, i: int):
        return self.from_int(i % self.order)

    def to_int(self, a) -> int:
        out = 0
        for c in reversed(a):
            out = out * self.base.order + self.base.to_int(c)
        return out

    def from_int(self, i: int):
        if not 0 <= i < self.order:
            raise ValueError("index out of range")
        cs = []
        for _ in range(self.degree):
            i, r = divmod(i, self.base.order)
            cs.append(self.base.from_int(r))
        return tuple(cs)

    def embed(self, c):
        """Embed a base-field scalar as a constant."""
        return tuple([c] + [self.base.zero] * (self.degree - 1))

    def elements(self):
        return (self.from_int(i) for i in range(self.order))

    def rand(self, rng: random.Random):
        return tuple(self.base.rand(rng) for _ in range(self.degree))

    def base_coords(self, a):
        """Flatten to F_p coordinates (ascending)."""
        out = []
        for c in a:
            out.extend(self.base.base_coords(c))
        return tuple(out)

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash(("ExtensionField", self.base, self.modulus))

    def __repr__(self):
        return f"GF({self.base.order}^{self.degree})"


def _find_irreducible(base, degree: int, rng: random.Random) -> tuple:
    """Seeded random search for a monic irreducible of the given degree."""
    from . import polyalg

    while True:
        coeffs = [base.rand(rng) for _ in range(degree)] + [base.one]
        f = polyalg.Poly(base, tuple(coeffs))
        if polyalg.is_irreducible(f):
            return tuple(coeffs)


@dataclass(frozen=True, eq=False)
class FieldContext:
    """The tower F_p < F_q < F_{q^m} with chosen moduli and optional generator."""

    p: int
    k: int
    m: int
    seed: int
    Fp: PrimeField
    Fq: PrimeField | ExtensionField
    Fqm: ExtensionField

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def order(self) -> int:
        return self.q**self.m

    def __post_init__(self):
        object.__setattr__(self, "_generator", None)
        object.__setattr__(self, "_qm_fact", None)
        object.__setattr__(self, "_frob_cols", None)

    def element(self, value) -> "FieldElement":
        return FieldElement(self, value)

    def zero(self) -> "FieldElement":
        return FieldElement(self, self.Fqm.zero)

    def one(self) -> "FieldElement":
        return FieldElement(self, self.Fqm.one)

    def from_int(self, i: int) -> "FieldElement":
        return FieldElement(self, self.Fqm.from_int(i))

    def embed_scalar(self, c) -> "FieldElement":
        """Lift an F_q scalar into F_{q^m}."""
        return FieldElement(self, self.Fqm.embed(c))

    def qm_minus_1(self) -> IntFactorization:
        if self._qm_fact is None:
            object.__setattr__(self, "_qm_fact", factor_qm_minus_1(self.q, self.m))
        return self._qm_fact

    def _frobenius_columns(self):
        # images of basis powers x^j under y -> y^q; F_q-linear map
        if self._frob_cols is None:
            F = self.Fqm
            xq = F.pow(tuple([F.base.zero, F.base.one] + [F.base.zero] * (self.m - 2)) if self.m > 1 else F.one, self.q)
            cols = []
            cur = F.one
            for _ in range(self.m):
                cols.append(cur)
                cur = F.mul(cur, xq)
            object.__setattr__(self, "_frob_cols", tuple(cols))
        return self._frob_cols

    def generator(self) -> "FieldElement":
        """A certified multiplicative generator of F_{q^m}^*, found deterministically."""
        if self._generator is None:
            fact = self.qm_minus_1()
            if not fact.complete:
                raise numtheory.IncompleteFactorizationError(
                    "generator certification needs the full factorization of q^m-1"
                )
            n = self.order - 1
            rng = random.Random((self.seed << 16) ^ 0xBEEF)
            F = self.Fqm
            while True:
                cand = F.rand(rng)
                if cand == F.zero:
                    continue
                if all(F.pow(cand, n // ell) != F.one for ell in fact.primes()):
                    object.__setattr__(self, "_generator", FieldElement(self, cand))
                    break
        return self._generator

    def __repr__(self):
        return f"FieldContext(p={self.p}, k={self.k}, m={self.m})"


class FieldElement:
    """Element of F_{q^m}; canonical coefficient tuple, hashable, immutable."""

    __slots__ = ("ctx", "value")

    def __init__(self, ctx: FieldContext, value: tuple):
        self.ctx = ctx
        self.value = value

    def _coerce(self, other) -> tuple:
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx and other.ctx.Fqm != self.ctx.Fqm:
                raise ValueError("elements from different field contexts")
            return other.value
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.Fqm.add(self.value, self._coerce(other)))

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.Fqm.sub(self.value, self._coerce(other)))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.Fqm.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.Fqm.mul(self.value, self._coerce(other)))

    def inv(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.Fqm.inv(self.value))

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.ctx.Fqm.mul(self.value, self.ctx.Fqm.inv(o)))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.Fqm.pow(self.value, e))

    def __eq__(self, other):
        return isinstance(other, FieldElement) and other.value == self.value

    def __hash__(self):
        return hash(self.value)

    def is_zero(self) -> bool:
        return self.value == self.ctx.Fqm.zero

    def to_int(self) -> int:
        return self.ctx.Fqm.to_int(self.value)

    def frobenius(self, i: int = 1) -> "FieldElement":
        """x^(q^i) via the precomputed F_q-linear Frobenius map."""
        i %= self.ctx.m
        out = self
        cols = self.ctx._frobenius_columns()
        F = self.ctx.Fqm
        for _ in range(i):
            acc = F.zero
            for j, c in enumerate(out.value):
                if c != F.base.zero:
                    acc = F.add(acc, F.scalar_mul(c, cols[j]))
            out = FieldElement(self.ctx, acc)
        return out

    def trace_to_base(self):
        """Tr_{F_{q^m}/F_q}: returns an F_q scalar; checks the result lies in F_q."""
        acc = self
        conj = self
        for _ in range(self.ctx.m - 1):
            conj = conj.frobenius(1)
            acc = acc + conj
        for c in acc.value[1:]:
            if c != self.ctx.Fq.zero:
                raise FieldIntegrityError("trace left the base field; modulus corrupt")
        return acc.value[0]

    def absolute_trace_int(self) -> int:
        """Tr down to F_p as an int in [0, p)."""
        t = self.trace_to_base()
        if self.ctx.k == 1:
            return self.ctx.Fp.to_int(t)
        acc = t
        conj = t
        Fq = self.ctx.Fq
        for _ in range(self.ctx.k - 1):
            conj = Fq.pow(conj, self.ctx.p)
            acc = Fq.add(acc, conj)
        coords = Fq.base_coords(acc)
        if any(c != 0 for c in coords[1:]):
            raise FieldIntegrityError("absolute trace not in F_p")
        return coords[0]

    def module_action(self, poly) -> "FieldElement":
        """f o x = sum a_i x^(q^i) for f = sum a_i t^i over F_q."""
        F = self.ctx.Fqm
        acc = self.ctx.zero()
        conj = self
        for i, a in enumerate(poly.coeffs):
            if a != self.ctx.Fq.zero:
                acc = acc + FieldElement(self.ctx, F.scalar_mul(a, conj.value))
            if i + 1 < len(poly.coeffs):
                conj = conj.frobenius(1)
        return acc

    def to_text(self) -> str:
        """Nested coefficient lists, most significant first."""
        if self.ctx.k == 1:
            inner = [str(c) for c in reversed(self.value)]
        else:
            inner = ["[" + ",".join(str(x) for x in reversed(c)) + "]" for c in reversed(self.value)]
        return "[" + ",".join(inner) + "]"

    def __repr__(self):
        return f"FieldElement({self.to_text()})"


def make_context(p: int, k: int, m: int, seed: int = 0) -> FieldContext:
    """Build the tower; moduli found by seeded search, deterministic per seed."""
    if not is_probable_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    Fp = PrimeField(p)
    rng = random.Random((seed << 8) ^ (p * 1_000_003 + k * 1009 + m))
    if k == 1:
        Fq = Fp
    else:
        Fq = ExtensionField(Fp, _find_irreducible(Fp, k, rng))
    if m == 1:
        # degenerate top level: modulus t - 1 keeps the tower shape uniform
        top = ExtensionField(Fq, (Fq.neg(Fq.one), Fq.one))
    else:
        top = ExtensionField(Fq, _find_irreducible(Fq, m, rng))
    return FieldContext(p=p, k=k, m=m, seed=seed, Fp=Fp, Fq=Fq, Fqm=top)


class DlogTable:
    """Exponent table over a certified generator, backed by sorted packed keys."""

    def __init__(self, ctx: FieldContext, generator: FieldElement, keys_in_exp_order):
        self.ctx = ctx
        self.generator = generator
        n = ctx.order - 1
        self.group_order = n
        self._by_exp = keys_in_exp_order  # array: exponent -> packed key
        order = sorted(range(n), key=keys_in_exp_order.__getitem__)
        self._sorted_keys = array("q", (keys_in_exp_order[i] for i in order))
        self._exps = array("q", order)
        if len(set(self._sorted_keys)) != n:
            raise FieldIntegrityError("discrete log table is not a bijection")

    def lookup(self, x: FieldElement) -> int:
        return self.lookup_key(x.to_int())

    def lookup_key(self, key: int) -> int:
        if key == 0:
            raise ZeroDivisionError("zero has no discrete log")
        i = bisect_left(self._sorted_keys, key)
        if i == len(self._sorted_keys) or self._sorted_keys[i] != key:
            raise FieldIntegrityError(f"key {key} missing from dlog table")
        return self._exps[i]

    def element(self, exponent: int) -> FieldElement:
        return self.ctx.from_int(self._by_exp[exponent % self.group_order])

    def __len__(self):
        return self.group_order


def build_dlog(ctx: FieldContext, limit: int = DLOG_LIMIT) -> DlogTable:
    """Full dlog table by repeated multiplication by the certified generator."""
    if ctx.order > limit:
        raise ResourceBudgetError(f"field order {ctx.order} exceeds dlog limit {limit}")
    gen = ctx.generator()
    F = ctx.Fqm
    n = ctx.order - 1
    keys = array("q")
    cur = F.one
    for _ in range(n):
        keys.append(F.to_int(cur))
        cur = F.mul(cur, gen.value)
    if cur != F.one:
        raise FieldIntegrityError("generator order mismatch")
    return DlogTable(ctx, gen, keys)
