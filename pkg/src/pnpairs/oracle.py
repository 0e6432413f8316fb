"""Ground-truth layer on brute-forceable fields: freeness and normality tests,
exact character sums for the three characteristic functions, trace-constrained
pair counts N_{f,a,b}, and numeric verification of the two character-sum bounds.

The pair scan runs on the flat kernels (compiled when available); everything
here is exact, with complex arithmetic only at final summation.
"""

from __future__ import annotations

import cmath
import math
from array import array
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import _scan, numtheory, ratfunc
from .ffield import FieldContext, FieldElement, FieldIntegrityError
from .numtheory import IntFactorization
from .polyalg import Poly, cyclotomic_factorization, divisor_stats, factor_poly
from .ratfunc import RationalFunction, evaluate, excluded_set

__all__ = [
    "FreenessSpec",
    "PairCountResult",
    "CharacterSystem",
    "SCAN_LIMIT",
    "is_e_free",
    "is_primitive",
    "is_g_free",
    "is_normal",
    "count_pairs",
    "characteristic_rho",
    "characteristic_eta",
    "characteristic_tau",
    "weil_sum_check",
    "castro_sum_check",
    "NumericIntegrityError",
]

SCAN_LIMIT = 1 << 24
RESIDUAL_TOL = 1e-6


class NumericIntegrityError(RuntimeError):
    """Character-sum result failed to round to a clean rational."""


@dataclass(frozen=True)
class FreenessSpec:
    """e | q^m-1 as a sub-factorization plus a subset of irreducible factors of x^m-1."""

    e_fact: IntFactorization
    g_factors: tuple[Poly, ...]

    @property
    def e_primes(self) -> tuple[int, ...]:
        return self.e_fact.primes()

    @staticmethod
    def trivial(ctx: FieldContext) -> "FreenessSpec":
        return FreenessSpec(IntFactorization(1, ()), ())

    @staticmethod
    def full(ctx: FieldContext, seed: int = 0) -> "FreenessSpec":
        """e = q^m-1 and g = x^m-1 (all distinct irreducible factors)."""
        cyc = cyclotomic_factorization(ctx.Fq, ctx.m, explicit=True, seed=seed)
        return FreenessSpec(ctx.qm_minus_1(), tuple(cyc.factors))


def _cofactor_poly(ctx: FieldContext, h: Poly) -> Poly:
    full = Poly.x_pow_minus_one(ctx.Fq, ctx.m)
    quot, rem = full.divmod(h)
    if not rem.is_zero():
        raise ValueError(f"{h!r} does not divide x^{ctx.m}-1")
    return quot


def is_e_free(x: FieldElement, e_fact: IntFactorization) -> bool:
    """Prime-wise power test: x^((q^m-1)/ell) != 1 for every prime ell | e."""
    if x.is_zero():
        raise ValueError("freeness is undefined at 0")
    n = x.ctx.order - 1
    one = x.ctx.one()
    return all(x ** (n // ell) != one for ell in e_fact.primes())


def is_primitive(x: FieldElement) -> bool:
    return is_e_free(x, x.ctx.qm_minus_1())


def is_g_free(x: FieldElement, g_factors: tuple[Poly, ...]) -> bool:
    """x is g-free iff ((x^m-1)/h) o x != 0 for every irreducible h | g."""
    ctx = x.ctx
    zero = ctx.zero()
    for h in g_factors:
        if x.module_action(_cofactor_poly(ctx, h)) == zero:
            return False
    return True


@lru_cache(maxsize=32)
def _all_factors(ctx: FieldContext, seed: int = 0) -> tuple[Poly, ...]:
    return tuple(cyclotomic_factorization(ctx.Fq, ctx.m, explicit=True, seed=seed).factors)


def is_normal(x: FieldElement) -> bool:
    if x.is_zero():
        return False
    return is_g_free(x, _all_factors(x.ctx))


# --- scan machinery ---


class ScanData:
    """Per-context tables for the kernels: power table, sorted keys, trace matrix."""

    def __init__(self, ctx: FieldContext):
        n = ctx.order - 1
        if ctx.order > SCAN_LIMIT:
            raise numtheory.ResourceBudgetError(
                f"scan requires enumerating {ctx.order} elements, over the limit {SCAN_LIMIT}"
            )
        self.ctx = ctx
        self.n = n
        self.flat = _scan.FlatField(ctx)
        gen = ctx.generator()
        step = self.flat.mul_matrix(gen)
        self.powtable = _scan.enumerate_powers(step, self.flat.dim, ctx.p, n)
        self.keys = _scan.pack_all(bytes(self.powtable), n, self.flat.dim, ctx.p)
        self.sorted_keys, self.exps = self.flat.sort_keys(self.keys)
        if len(set(self.sorted_keys)) != n:
            raise FieldIntegrityError("enumerated powers are not distinct")
        self.trace_mat = self.flat.trace_matrix()

    def dlog_of_key(self, key: int) -> int:
        i = bisect_left(self.sorted_keys, key)
        if i == len(self.sorted_keys) or self.sorted_keys[i] != key:
            raise FieldIntegrityError(f"key {key} not in power table")
        return self.exps[i]

    def dlog(self, x: FieldElement) -> int:
        return self.dlog_of_key(x.to_int())

    def element(self, exponent: int) -> FieldElement:
        d = self.flat.dim
        base = (exponent % self.n) * d
        return self.flat.from_flat(self.powtable[base : base + d])


@lru_cache(maxsize=8)
def get_scan_data(ctx: FieldContext) -> ScanData:
    return ScanData(ctx)


@dataclass(frozen=True)
class PairCountResult:
    count: int
    witness: FieldElement | None
    scanned: int


def _g_matrices(sd: ScanData, g_factors: tuple[Poly, ...]) -> tuple[bytes, int]:
    mats = bytearray()
    for h in g_factors:
        cof = _cofactor_poly(sd.ctx, h)
        mats += sd.flat.linear_matrix(lambda el, _c=cof: el.module_action(_c))
    return bytes(mats), len(g_factors)


@lru_cache(maxsize=64)
def _scan_table(
    ctx: FieldContext,
    f: RationalFunction,
    spec1: FreenessSpec,
    spec2: FreenessSpec,
    jobs: int = 1,
):
    """Full (a, b) count/witness table for fixed freeness specs."""
    sd = get_scan_data(ctx)
    flat = sd.flat
    num_coeffs, num_deg = flat.poly_coeff_rows(f.f1, lead=f.lead)
    den_coeffs, den_deg = flat.poly_coeff_rows(f.f2)
    e1 = array("q", sorted(spec1.e_primes))
    e2 = array("q", sorted(spec2.e_primes))
    g1_mats, g1_count = _g_matrices(sd, spec1.g_factors)
    g2_mats, g2_count = _g_matrices(sd, spec2.g_factors)
    exclude = sorted(
        sd.dlog(el) for el in excluded_set(ctx, f, seed=0) if not el.is_zero()
    )
    excl = array("q", exclude)
    q_int = ctx.q
    args = (
        bytes(sd.powtable),
        sd.n,
        flat.dim,
        ctx.p,
        flat.tensor,
        sd.sorted_keys,
        sd.exps,
        num_coeffs,
        num_deg,
        den_coeffs,
        den_deg,
        e1,
        e2,
        g1_mats,
        g1_count,
        g2_mats,
        g2_count,
        sd.trace_mat,
        ctx.k,
        excl,
        q_int,
    )
    jobs = max(1, jobs)
    if jobs == 1:
        parts = [_scan.scan_pairs(*args, 0, sd.n)]
    else:
        step = (sd.n + jobs - 1) // jobs
        ranges = [(s, min(s + step, sd.n)) for s in range(0, sd.n, step)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda r: _scan.scan_pairs(*args, r[0], r[1]), ranges))
    counts = [0] * (q_int * q_int)
    witnesses = [-1] * (q_int * q_int)
    for part in parts:
        if part is None:
            raise FieldIntegrityError("scan lookup failed: power table inconsistent")
        c, w = part
        for i in range(q_int * q_int):
            counts[i] += c[i]
            if w[i] >= 0 and (witnesses[i] < 0 or w[i] < witnesses[i]):
                witnesses[i] = w[i]
    scanned = sd.n - len(exclude)
    return counts, witnesses, scanned


def _verify_witness(
    ctx: FieldContext,
    f: RationalFunction,
    eps: FieldElement,
    a_idx: int | None,
    b_idx: int | None,
    spec1: FreenessSpec,
    spec2: FreenessSpec,
) -> bool:
    """Slow-path re-verification of a scan witness."""
    sd = get_scan_data(ctx)
    if spec1.e_primes and not is_e_free(eps, spec1.e_fact):
        return False
    if spec1.g_factors and not is_g_free(eps, spec1.g_factors):
        return False
    if a_idx is not None and sd.flat.trace_index(eps.trace_to_base()) != a_idx:
        return False
    val = evaluate(f, eps)
    if val is ratfunc.POLE:
        return False
    if spec2.e_primes:
        if val.is_zero() or not is_e_free(val, spec2.e_fact):
            return False
    if spec2.g_factors and not is_g_free(val, spec2.g_factors):
        return False
    if b_idx is not None and sd.flat.trace_index(val.trace_to_base()) != b_idx:
        return False
    return True


def count_pairs(
    ctx: FieldContext,
    f: RationalFunction,
    a,
    b,
    spec1: FreenessSpec,
    spec2: FreenessSpec,
    jobs: int = 1,
) -> PairCountResult:
    """Exact N_{f,a,b} over the scanned elements; a or b of None means unrestricted.

    a and b are F_q scalars.  The witness, when any, is independently
    re-verified through the slow field-arithmetic path before being returned.
    """
    counts, witnesses, scanned = _scan_table(ctx, f, spec1, spec2, jobs)
    sd = get_scan_data(ctx)
    q = ctx.q
    a_idx = None if a is None else sd.flat.trace_index(a)
    b_idx = None if b is None else sd.flat.trace_index(b)
    total = 0
    wit_exp = -1
    for ai in range(q) if a_idx is None else (a_idx,):
        for bi in range(q) if b_idx is None else (b_idx,):
            total += counts[ai * q + bi]
            w = witnesses[ai * q + bi]
            if w >= 0 and (wit_exp < 0 or w < wit_exp):
                wit_exp = w
    witness = None
    if wit_exp >= 0:
        witness = sd.element(wit_exp)
        if not _verify_witness(ctx, f, witness, a_idx, b_idx, spec1, spec2):
            raise FieldIntegrityError("scan witness failed slow-path re-verification")
    return PairCountResult(count=total, witness=witness, scanned=scanned)


# --- character system ---


class CharacterSystem:
    """Exact multiplicative and additive characters on a dlog-scale field."""

    def __init__(self, ctx: FieldContext, seed: int = 0):
        self.ctx = ctx
        self.sd = get_scan_data(ctx)
        self.n = ctx.order - 1
        flat = self.sd.flat
        dim = flat.dim
        # absolute-trace row: Tr_p(b_j) for each flat basis vector
        self._abs_trace = bytes(
            FieldElement(ctx, b).absolute_trace_int() for b in flat._basis
        )
        cyc = cyclotomic_factorization(ctx.Fq, ctx.m, explicit=True, seed=seed)
        self.cyclo = cyc
        self._divisors = self._monic_divisors(cyc)
        self._orders = self._fq_orders()

    # additive characters are indexed by v in F_{q^m}: psi_v(x) = e(Tr_p(v x)/p)

    def _monic_divisors(self, cyc) -> list[Poly]:
        divs = [Poly.one(self.ctx.Fq)]
        for h in cyc.factors:
            new = []
            for d in divs:
                cur = d
                for _ in range(cyc.multiplicity):
                    cur = cur * h
                    new.append(cur)
            divs.extend(new)
        divs.sort(key=Poly.sort_key)
        return divs

    def _fq_orders(self) -> dict[int, Poly]:
        """F_q-order of every element, keyed by packed int."""
        ctx = self.ctx
        flat = self.sd.flat
        dim = flat.dim
        mats = [
            (g, flat.linear_matrix(lambda el, _g=g: el.module_action(_g)))
            for g in self._divisors
        ]
        orders: dict[int, Poly] = {}
        for idx in range(ctx.order):
            vec = flat.unpack(idx)
            for g, mat in mats:
                if all(
                    sum(mat[t * dim + j] * vec[j] for j in range(dim)) % ctx.p == 0
                    for t in range(dim)
                ):
                    orders[idx] = g
                    break
            else:
                raise FieldIntegrityError("element with no annihilating divisor")
        return orders

    def mult_char(self, d: int, u: int = 1):
        """chi of exact order d (d | q^m-1, gcd(u, d) = 1) as a callable on elements."""
        if d < 1 or (self.n % d) != 0:
            raise ValueError(f"{d} does not divide q^m-1")
        if math.gcd(u, d) != 1:
            raise ValueError("character index must be coprime to the order")
        step = (self.n // d) * u

        def chi(x: FieldElement) -> complex:
            if x.is_zero():
                return 1.0 + 0j if d == 1 else 0j
            t = self.sd.dlog(x)
            return cmath.exp(2j * cmath.pi * ((step * t) % self.n) / self.n)

        chi.order = d
        return chi

    def mult_char_indices(self, d: int) -> list[int]:
        """All u with gcd(u, d) = 1: the phi(d) characters of exact order d."""
        return [u for u in range(1, d + 1) if math.gcd(u, d) == 1] if d > 1 else [1]

    def additive_char(self, v: FieldElement):
        """psi_v(x) = e(2 pi i Tr_p(v x) / p)."""
        flat = self.sd.flat
        p = self.ctx.p
        dim = flat.dim
        mat = flat.mul_matrix(v)
        row = [
            sum(self._abs_trace[t] * mat[t * dim + j] for t in range(dim)) % p
            for j in range(dim)
        ]

        def psi(x: FieldElement) -> complex:
            vec = flat.to_flat(x)
            idx = sum(row[j] * vec[j] for j in range(dim)) % p
            return cmath.exp(2j * cmath.pi * idx / p)

        psi.vector = v
        return psi

    def canonical_char(self):
        return self.additive_char(self.ctx.one())

    def additive_chars_of_order(self, h: Poly) -> list[FieldElement]:
        """Vectors v whose character psi_v has F_q-order h: Ord(v) = reverse of h."""
        target = self._reverse_divisor(h)
        out = []
        for idx, g in self._orders.items():
            if g == target:
                out.append(self.ctx.from_int(idx))
        return out

    def _reverse_divisor(self, h: Poly) -> Poly:
        if h.degree == 0:
            return h
        rev = h.reverse()
        return rev.monic()

    def rho(self, x: FieldElement, e_fact: IntFactorization) -> complex:
        """Characteristic sum for e-free elements, as a complex value."""
        if x.is_zero():
            raise ValueError("rho is defined on the multiplicative group")
        e = e_fact.value
        th = numtheory.theta(e_fact)
        total = 0j
        t = self.sd.dlog(x)
        for d in numtheory.divisors_from_factorization(e_fact):
            mu = numtheory.mobius(numtheory.factor(d))
            if mu == 0:
                continue
            phi_d = numtheory.euler_phi(numtheory.factor(d))
            inner = 0j
            step = self.n // d
            for u in self.mult_char_indices(d):
                inner += cmath.exp(2j * cmath.pi * ((step * u * t) % self.n) / self.n)
            total += (mu / phi_d) * inner
        return complex(th) * total

    def eta(self, x: FieldElement, g: Poly, seed: int = 0) -> complex:
        """Characteristic sum for g-free elements."""
        stats = divisor_stats(g, seed)
        total = 0j
        for h in self._monic_sub_divisors(g):
            st_h = divisor_stats(h, seed)
            if st_h.mu_prime == 0:
                continue
            inner = 0j
            for v in self.additive_chars_of_order(h):
                inner += self.additive_char(v)(x)
            total += (st_h.mu_prime / st_h.Phi) * inner
        return complex(stats.Theta) * total

    def _monic_sub_divisors(self, g: Poly) -> list[Poly]:
        facs = factor_poly(g)
        divs = [Poly.one(self.ctx.Fq)]
        for h, e in facs:
            new = []
            for d in divs:
                cur = d
                for _ in range(e):
                    cur = cur * h
                    new.append(cur)
            divs.extend(new)
        return sorted(divs, key=Poly.sort_key)

    def tau(self, x: FieldElement, a) -> complex:
        """Characteristic sum for Tr(x) = a; a is an F_q scalar."""
        ctx = self.ctx
        Fq = ctx.Fq
        tr = x.trace_to_base()
        diff = Fq.sub(tr, a)
        total = 0j
        for i in range(ctx.q):
            u = Fq.from_int(i)
            y = Fq.mul(u, diff)
            idx = self._abs_trace_fq(y)
            total += cmath.exp(2j * cmath.pi * idx / ctx.p)
        return total / ctx.q

    def _abs_trace_fq(self, y) -> int:
        """Absolute trace F_q -> F_p of a base scalar."""
        ctx = self.ctx
        if ctx.k == 1:
            return y % ctx.p
        acc = y
        conj = y
        for _ in range(ctx.k - 1):
            conj = ctx.Fq.pow(conj, ctx.p)
            acc = ctx.Fq.add(acc, conj)
        coords = ctx.Fq.base_coords(acc)
        if any(c for c in coords[1:]):
            raise FieldIntegrityError("absolute trace left F_p")
        return coords[0]


def _round_binary(value: complex, tol: float = RESIDUAL_TOL) -> tuple[int, float]:
    """Round a characteristic-function value to 0/1, reporting the residual."""
    best = min((0, 1), key=lambda r: abs(value - r))
    residual = abs(value - best)
    if residual > tol:
        raise NumericIntegrityError(f"characteristic value {value} not within {tol} of 0/1")
    return best, residual


def characteristic_rho(cs: CharacterSystem, x: FieldElement, e_fact: IntFactorization) -> int:
    return _round_binary(cs.rho(x, e_fact))[0]


def characteristic_eta(cs: CharacterSystem, x: FieldElement, g: Poly) -> int:
    return _round_binary(cs.eta(x, g))[0]


def characteristic_tau(cs: CharacterSystem, x: FieldElement, a) -> int:
    return _round_binary(cs.tau(x, a))[0]


# --- Weil / mixed character sum checks ---


@dataclass(frozen=True)
class SumCheck:
    magnitude: float
    bound: float
    passed: bool
    applicable: bool
    note: str = ""


def _multiplicity_gcd(f: RationalFunction, seed: int = 0) -> int:
    g = 0
    for _, e, _ in ratfunc.factor_multiplicities(f, seed):
        g = math.gcd(g, e)
    return g


@lru_cache(maxsize=8)
def get_character_system(ctx: FieldContext, seed: int = 0) -> CharacterSystem:
    return CharacterSystem(ctx, seed)


def weil_sum_check(ctx: FieldContext, f: RationalFunction, d: int, u: int = 1) -> SumCheck:
    """|sum over alpha, f(alpha) != 0, inf of chi_d(f(alpha))| vs the branch-point bound."""
    cs = get_character_system(ctx)
    n = ctx.order - 1
    if d <= 1 or n % d != 0:
        return SumCheck(0.0, 0.0, True, False, "character must be nontrivial of order dividing q^m-1")
    if numtheory.mobius(numtheory.factor(d)) == 0:
        return SumCheck(0.0, 0.0, True, False, "order not squarefree")
    mg = _multiplicity_gcd(f)
    if mg == 0 or mg % d == 0:
        return SumCheck(0.0, 0.0, True, False, "f is of the excluded perfect-power shape")
    chi = cs.mult_char(d, u)
    total = 0j
    for idx in range(ctx.order):
        alpha = ctx.from_int(idx)
        val = evaluate(f, alpha)
        if val is ratfunc.POLE or val.is_zero():
            continue
        total += chi(val)
    deg_sum = sum(h.degree for h, _, _ in ratfunc.factor_multiplicities(f))
    bound = (deg_sum - 1) * ctx.order**0.5
    mag = abs(total)
    return SumCheck(mag, bound, mag <= bound + RESIDUAL_TOL, True)


def _artin_schreier_status(g: RationalFunction) -> tuple[bool, str]:
    """Necessary-condition test that g is not of the form h^p - h + beta.

    Any such g has every pole multiplicity (finite poles and the pole at
    infinity) divisible by p.  A pole with multiplicity not divisible by p
    certifies the hypothesis; otherwise it stays unverified.
    """
    p = g.field.char
    if g.f2.degree > 0:
        for _, e in factor_poly(g.f2):
            if e % p != 0:
                return True, "finite pole multiplicity not divisible by p"
    inf_order = g.n1 - g.n2
    if inf_order > 0 and inf_order % p != 0:
        return True, "pole order at infinity not divisible by p"
    if g.f2.degree == 0 and 0 < g.f1.degree < p:
        return True, "polynomial of degree below p"
    return False, "hypothesis unverified: all pole orders divisible by p"


def castro_sum_check(
    ctx: FieldContext,
    f: RationalFunction,
    g: RationalFunction,
    d: int,
    v: FieldElement | None = None,
    u: int = 1,
) -> SumCheck:
    """Mixed sum |sum chi(f) psi(g)| over F_{q^m} minus poles, vs the degree bound."""
    cs = get_character_system(ctx)
    n = ctx.order - 1
    if d <= 1 or n % d != 0:
        return SumCheck(0.0, 0.0, True, False, "multiplicative character must be nontrivial")
    if v is not None and v.is_zero():
        return SumCheck(0.0, 0.0, True, False, "additive character must be nontrivial")
    mg = _multiplicity_gcd(f)
    if mg == 0 or mg % d == 0:
        return SumCheck(0.0, 0.0, True, False, "f is of the excluded power shape beta*h^r")
    as_ok, as_note = _artin_schreier_status(g)
    chi = cs.mult_char(d, u)
    psi = cs.additive_char(v if v is not None else ctx.one())

    # S: poles of f and of g
    poles = set()
    for rf in (f, g):
        if rf.f2.degree > 0:
            for h, _ in factor_poly(rf.f2):
                if h.degree == 1:
                    poles.add(ctx.Fqm.neg(h.coeffs[0]))
    total = 0j
    for idx in range(ctx.order):
        alpha = ctx.from_int(idx)
        if alpha.value in poles:
            continue
        fv = evaluate(f, alpha)
        gv = evaluate(g, alpha)
        if fv is ratfunc.POLE or gv is ratfunc.POLE:
            continue
        cval = chi(fv) if not fv.is_zero() else 0j
        total += cval * psi(gv)

    deg_g_inf = max(g.n1, g.n2)
    l0 = sum(h.degree for h, _, _ in ratfunc.factor_multiplicities(f))
    l1 = sum(h.degree for h, _ in factor_poly(g.f2)) if g.f2.degree > 0 else 0
    if g.n1 > g.n2:
        l1 += 1
    l2 = 0
    if f.f2.degree > 0:
        g_zero_poles = g.f1 * g.f2
        for h, _ in factor_poly(f.f2):
            if g_zero_poles.degree > 0 and (g_zero_poles % h).is_zero():
                l2 += h.degree
    bound = (deg_g_inf + l0 + l1 - l2 - 2) * ctx.order**0.5
    mag = abs(total)
    note = "" if as_ok else as_note
    return SumCheck(mag, bound, mag <= bound + RESIDUAL_TOL, as_ok, note)
