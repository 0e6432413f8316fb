"""Big-integer arithmetic functions: factorization, phi, mu, omega, W, theta.

Factoring strategy: trial division over a shared prime sieve, then Brent's
variant of Pollard rho with Miller-Rabin certification.  Numbers of the form
q^m - 1 are pre-split into cyclotomic pieces Phi_d(q) before any of that.
Partial factorizations are legal values: callers inspect ``cofactor``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate

__all__ = [
    "IntFactorization",
    "FactorEffort",
    "WBoundParams",
    "IncompleteFactorizationError",
    "ResourceBudgetError",
    "is_probable_prime",
    "primes_below",
    "factor",
    "factor_qm_minus_1",
    "parse_factor_table",
    "euler_phi",
    "mobius",
    "omega",
    "big_w",
    "theta",
    "w_upper_bound",
    "compute_D",
    "mult_order",
    "divisors_from_factorization",
    "cyclotomic_value",
]

# Deterministic Miller-Rabin witness schedule; proves primality below
# 3.3e24 and acts as a fixed strong-probable-prime test beyond that.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SIEVE_LIMIT = 1_000_000


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def primes_below(limit: int) -> tuple[int, ...]:
    """All primes < limit via a byte sieve."""
    if limit <= 2:
        return ()
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit, i)))
    return tuple(i for i in range(limit) if sieve[i])


class IncompleteFactorizationError(ValueError):
    """Raised when an operation needs a complete factorization but got a partial one."""


class ResourceBudgetError(RuntimeError):
    """A computation would exceed its configured memory or scan budget."""


@dataclass(frozen=True)
class IntFactorization:
    """Multiset of (prime, exponent) for ``value``, possibly with a composite cofactor."""

    value: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("value must be nonnegative")
        prod = self.cofactor
        prev = 1
        for p, e in self.factors:
            if e < 1:
                raise ValueError(f"exponent {e} < 1 for prime {p}")
            if p <= prev:
                raise ValueError("primes must be strictly increasing")
            if not is_probable_prime(p):
                raise ValueError(f"listed factor {p} is not prime")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValueError("factors and cofactor do not recombine to value")
        if self.cofactor != 1 and is_probable_prime(self.cofactor):
            raise ValueError("prime cofactor must be listed as a factor")

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def restrict(self, primes) -> "IntFactorization":
        """Sub-factorization keeping only the given primes (d = product of them)."""
        keep = tuple((p, e) for p, e in self.factors if p in set(primes))
        val = 1
        for p, e in keep:
            val *= p**e
        return IntFactorization(val, keep)

    def to_report(self) -> dict:
        return {
            "value": str(self.value),
            "factors": [[str(p), e] for p, e in self.factors],
            "cofactor": str(self.cofactor),
            "complete": self.complete,
            "provenance": list(self.provenance),
        }


@dataclass(frozen=True)
class FactorEffort:
    """Budget descriptor for factor(); identical budgets and seed give identical output."""

    trial_bound: int = _SIEVE_LIMIT
    rho_iterations: int = 2_000_000
    rho_restarts: int = 24
    rho_size_limit: int = 10**30
    seed: int = 1


DEFAULT_EFFORT = FactorEffort()
LIGHT_EFFORT = FactorEffort(trial_bound=100_000, rho_iterations=0, rho_restarts=0)


def _brent_rho(n: int, c: int, max_iters: int) -> int:
    """One Brent-cycle attempt; returns a nontrivial factor of n or 1."""
    if n % 2 == 0:
        return 2
    y, r, q = 2 + c, 1, 1
    g = 1
    x = ys = y
    iters = 0
    m = 128
    while g == 1 and iters < max_iters:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        iters += r
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g if g != n else 1


def _split(n: int, effort: FactorEffort) -> tuple[int, ...] | None:
    """Try to split composite n into two nontrivial parts."""
    if n >= effort.rho_size_limit or effort.rho_iterations <= 0:
        return None
    for attempt in range(effort.rho_restarts):
        c = 1 + ((effort.seed + attempt) % (n - 3 if n > 4 else 1))
        g = _brent_rho(n, c, effort.rho_iterations)
        if 1 < g < n:
            return (g, n // g)
    return None


def factor(n: int, effort: FactorEffort = DEFAULT_EFFORT) -> IntFactorization:
    """Deterministic trial-division + Brent-rho factorization of n >= 1."""
    if n < 1:
        raise ValueError("factor() requires n >= 1")
    if n == 1:
        return IntFactorization(1, ())
    counts: dict[int, int] = {}
    rest = n
    for p in primes_below(min(effort.trial_bound, _SIEVE_LIMIT) + 1):
        if p * p > rest:
            break
        while rest % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rest //= p
    cofactor = 1
    stack = [rest] if rest > 1 else []
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_probable_prime(c):
            counts[c] = counts.get(c, 0) + 1
            continue
        parts = _split(c, effort)
        if parts is None:
            cofactor *= c
        else:
            stack.extend(parts)
    factors = tuple(sorted(counts.items()))
    prov = ("complete",) if cofactor == 1 else ("partial",)
    return IntFactorization(n, factors, cofactor, prov)


def _merge_known(n: int, known: list[int], effort: FactorEffort, prov: list[str]) -> IntFactorization:
    """Factor n after stripping externally supplied prime factors."""
    counts: dict[int, int] = {}
    rest = n
    for p in known:
        while rest % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rest //= p
    inner = factor(rest, effort)
    for p, e in inner.factors:
        counts[p] = counts.get(p, 0) + e
    return IntFactorization(
        n, tuple(sorted(counts.items())), inner.cofactor, tuple(prov) + tuple(inner.provenance)
    )


def parse_factor_table(text: str) -> dict[tuple[int, int], list[int]]:
    """Parse external factor tables: lines "base^exp-1: p1 p2 ...", '#' comments."""
    table: dict[tuple[int, int], list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, tail = line.split(":", 1)
            base_s, exp_s = head.strip().split("^", 1)
            if not exp_s.endswith("-1"):
                raise ValueError("expected base^exp-1")
            base = int(base_s)
            exp = int(exp_s[:-2])
            primes = [int(t) for t in tail.split()]
        except ValueError as exc:
            raise ValueError(f"malformed factor table line {lineno}: {raw!r}") from exc
        target = base**exp - 1
        for p in primes:
            if p < 2 or target % p != 0:
                raise ValueError(
                    f"factor table line {lineno}: {p} does not divide {base}^{exp}-1"
                )
            if not is_probable_prime(p):
                raise ValueError(f"factor table line {lineno}: {p} is not prime")
        table[(base, exp)] = primes
    return table


def cyclotomic_value(d: int, q: int) -> int:
    """Phi_d(q) as an exact integer via the Mobius product."""
    num = den = 1
    for delta in divisors(d):
        mu = _mobius_int(delta)
        if mu == 1:
            num *= q ** (d // delta) - 1
        elif mu == -1:
            den *= q ** (d // delta) - 1
    assert num % den == 0
    return num // den


def factor_qm_minus_1(
    q: int,
    m: int,
    effort: FactorEffort = DEFAULT_EFFORT,
    tables: dict[tuple[int, int], list[int]] | None = None,
) -> IntFactorization:
    """Factor q^m - 1 with cyclotomic pre-splitting and optional external factors."""
    if q < 2 or m < 1:
        raise ValueError("need q >= 2, m >= 1")
    n = q**m - 1
    known: list[int] = []
    prov: list[str] = [f"cyclotomic split over divisors of m={m}"]
    if tables:
        for (base, exp), primes in tables.items():
            if base**exp - 1 != 0 and n % (base**exp - 1) == 0:
                known.extend(p for p in primes if n % p == 0)
        if known:
            prov.append("external factors merged")
    counts: dict[int, int] = {}
    cofactor = 1
    piece_prov: list[str] = []
    for d in divisors(m):
        piece = cyclotomic_value(d, q)
        part = _merge_known(piece, known, effort, [])
        for p, e in part.factors:
            counts[p] = counts.get(p, 0) + e
        if not part.complete:
            cofactor *= part.cofactor
            piece_prov.append(f"partial piece Phi_{d}({q})")
    prov.extend(piece_prov)
    prov.append("complete" if cofactor == 1 else "partial")
    return IntFactorization(n, tuple(sorted(counts.items())), cofactor, tuple(prov))


def _require_complete(f: IntFactorization):
    if not f.complete:
        raise IncompleteFactorizationError(
            f"complete factorization required, cofactor {f.cofactor} remains"
        )


def euler_phi(f: IntFactorization) -> int:
    _require_complete(f)
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def mobius(f: IntFactorization) -> int:
    _require_complete(f)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def omega(f: IntFactorization) -> int:
    _require_complete(f)
    return len(f.factors)


def big_w(f: IntFactorization) -> int:
    """W(n) = 2^omega(n), the number of squarefree divisors."""
    _require_complete(f)
    return 1 << len(f.factors)


def theta(f: IntFactorization) -> Fraction:
    """theta(e) = phi(e)/e as an exact rational."""
    _require_complete(f)
    out = Fraction(1)
    for p, _ in f.factors:
        out *= Fraction(p - 1, p)
    return out


def w_upper_bound(f: IntFactorization, trial_bound: int) -> int:
    """Certified upper bound on W(value) given all primes < trial_bound are stripped.

    The cofactor has at most log(cofactor)/log(trial_bound) prime factors.
    """
    if trial_bound < 2:
        raise ValueError("trial_bound must be >= 2")
    extra = 0
    if f.cofactor > 1:
        extra = int(math.log(f.cofactor) / math.log(trial_bound))
    return 1 << (len(f.factors) + extra)


def _mobius_int(n: int) -> int:
    out = 1
    x = n
    p = 2
    while p * p <= x:
        if x % p == 0:
            x //= p
            if x % p == 0:
                return 0
            out = -out
        p += 1
    if x > 1:
        out = -out
    return out


def divisors(n: int) -> list[int]:
    """Sorted divisors of a smallish n by trial division."""
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def divisors_from_factorization(f: IntFactorization) -> list[int]:
    _require_complete(f)
    out = [1]
    for p, e in f.factors:
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


# --- the W(t) < D * t^(1/nu) bound of the numerical section ---

_D_SIEVE_LIMIT = 1 << 26


@dataclass(frozen=True)
class WBoundParams:
    """Worst-case constant D for W(t) < D*t^(1/nu), kept in log10 scale."""

    nu: float
    log10_D: float
    excluded: tuple[int, ...] = ()


class _PrimeLogCache:
    """Primes to 2^nu with prefix sums of log10 p, grown on demand."""

    def __init__(self):
        self.limit = 0
        self.primes: tuple[int, ...] = ()
        self.cum: list[float] = [0.0]

    def ensure(self, limit: int):
        if limit > _D_SIEVE_LIMIT:
            raise ResourceBudgetError(
                f"prime sieve to {limit} exceeds the configured budget {_D_SIEVE_LIMIT}"
            )
        if limit > self.limit:
            self.primes = primes_below(limit + 1)
            self.cum = [0.0] + list(accumulate(math.log10(p) for p in self.primes))
            self.limit = limit


_PLC = _PrimeLogCache()


def compute_D(nu: float, exclude: tuple[int, ...] = ()) -> WBoundParams:
    """D = product over primes p <= 2^nu of max(1, 2/p^(1/nu)), in log10.

    ``exclude`` drops primes known not to divide the target t (for t = q^m - 1
    the characteristic never divides, which sharpens the bound and matches the
    reference computations).
    """
    if nu <= 1:
        raise ValueError("nu must exceed 1")
    bound = int(2**nu)
    _PLC.ensure(bound)
    idx = bisect_right(_PLC.primes, bound)
    log_d = idx * math.log10(2.0) - _PLC.cum[idx] / nu
    dropped = []
    for p in set(exclude):
        if p <= bound and is_probable_prime(p):
            log_d -= math.log10(2.0) - math.log10(p) / nu
            dropped.append(p)
    return WBoundParams(nu, log_d, tuple(sorted(dropped)))


def mult_order(q: int, n: int) -> int:
    """Least e >= 1 with q^e = 1 (mod n)."""
    if n < 1:
        raise ValueError("modulus must be positive")
    if n == 1:
        return 1
    if math.gcd(q, n) != 1:
        raise ValueError(f"gcd({q}, {n}) != 1, order undefined")
    e = euler_phi(factor(n))
    for p, _ in factor(e).factors:
        while e % p == 0 and pow(q, e // p, n) == 1:
            e //= p
    return e
