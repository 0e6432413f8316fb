"""Pure-Python scan kernels: the fallback when the compiled core is missing.

Same contracts as ``_core``; tens of times slower on big fields, identical
results.  Everything works on flat byte vectors (see prep.FlatField).
"""

from __future__ import annotations

from array import array
from bisect import bisect_left

BACKEND = "python"


def enumerate_powers(step_matrix: bytes, dim: int, p: int, count: int) -> bytearray:
    """Rows gamma^0 .. gamma^(count-1): row 0 is 1, row i+1 = M @ row i (mod p)."""
    out = bytearray(count * dim)
    cur = [0] * dim
    cur[0] = 1
    rng = range(dim)
    for i in range(count):
        base = i * dim
        out[base : base + dim] = bytes(cur)
        nxt = [0] * dim
        for t in rng:
            row = step_matrix[t * dim : (t + 1) * dim]
            acc = 0
            for j in rng:
                c = cur[j]
                if c:
                    acc += row[j] * c
            nxt[t] = acc % p
        cur = nxt
    return out


def pack_all(table: bytes, n: int, dim: int, p: int) -> array:
    keys = array("q", bytes(8 * n))
    for i in range(n):
        key = 0
        for t in range(dim - 1, -1, -1):
            key = key * p + table[i * dim + t]
        keys[i] = key
    return keys


def _mul(a, b, tensor, dim, p):
    out = [0] * dim
    for i in range(dim):
        ai = a[i]
        if not ai:
            continue
        for j in range(dim):
            bj = b[j]
            if not bj:
                continue
            c = ai * bj
            base = (i * dim + j) * dim
            for t in range(dim):
                v = tensor[base + t]
                if v:
                    out[t] += v * c
    return [v % p for v in out]


def _horner(coeffs, deg, x, tensor, dim, p):
    acc = list(coeffs[deg * dim : (deg + 1) * dim])
    for i in range(deg - 1, -1, -1):
        acc = _mul(acc, x, tensor, dim, p)
        for t in range(dim):
            acc[t] = (acc[t] + coeffs[i * dim + t]) % p
    return acc


def _kills_freeness(exponent: int, primes) -> bool:
    for ell in primes:
        if exponent % ell == 0:
            return True
    return False


def _survives_mats(vec, mats, count, dim, p) -> bool:
    """True when every matrix sends vec to a nonzero vector."""
    for c in range(count):
        base = c * dim * dim
        nonzero = False
        for t in range(dim):
            acc = 0
            row = base + t * dim
            for j in range(dim):
                v = vec[j]
                if v:
                    acc += mats[row + j] * v
            if acc % p:
                nonzero = True
                break
        if not nonzero:
            return False
    return True


def _trace_idx(vec, trace_mat, k, dim, p) -> int:
    key = 0
    for r in range(k - 1, -1, -1):
        acc = 0
        row = r * dim
        for j in range(dim):
            v = vec[j]
            if v:
                acc += trace_mat[row + j] * v
        key = key * p + acc % p
    return key


def scan_pairs(
    powtable,
    n: int,
    dim: int,
    p: int,
    tensor,
    sorted_keys,
    exps,
    num_coeffs,
    num_deg: int,
    den_coeffs,
    den_deg: int,
    e1_primes,
    e2_primes,
    g1_mats,
    g1_count: int,
    g2_mats,
    g2_count: int,
    trace_mat,
    k: int,
    exclude_exps,
    q_int: int,
    start: int,
    stop: int,
):
    """Count, for each trace pair (a, b), the scanned elements eps = gamma^i with
    i in [start, stop) passing the four freeness predicates; also record the
    first witness exponent per cell.  Returns (counts, witnesses).
    """
    counts = array("q", bytes(8 * q_int * q_int))
    witnesses = array("q", [-1] * (q_int * q_int))
    excl = set(exclude_exps)
    nkeys = len(sorted_keys)
    for i in range(start, stop):
        if i in excl:
            continue
        if _kills_freeness(i, e1_primes):
            continue
        eps = powtable[i * dim : (i + 1) * dim]
        if g1_count and not _survives_mats(eps, g1_mats, g1_count, dim, p):
            continue
        num = _horner(num_coeffs, num_deg, eps, tensor, dim, p)
        den = _horner(den_coeffs, den_deg, eps, tensor, dim, p)
        den_key = 0
        for t in range(dim - 1, -1, -1):
            den_key = den_key * p + den[t]
        if den_key == 0:
            continue  # pole: excluded set should cover this, stay safe
        num_key = 0
        for t in range(dim - 1, -1, -1):
            num_key = num_key * p + num[t]
        if num_key == 0:
            # f(eps) = 0: fails any nontrivial freeness demand on the value
            if len(e2_primes) or g2_count:
                continue
            fvec = bytes(dim)
            b_idx = 0
        else:
            ni = bisect_left(sorted_keys, num_key)
            di = bisect_left(sorted_keys, den_key)
            if ni >= nkeys or sorted_keys[ni] != num_key or di >= nkeys or sorted_keys[di] != den_key:
                return None  # integrity failure; caller raises
            j_f = (exps[ni] - exps[di]) % n
            if _kills_freeness(j_f, e2_primes):
                continue
            fvec = powtable[j_f * dim : (j_f + 1) * dim]
            if g2_count and not _survives_mats(fvec, g2_mats, g2_count, dim, p):
                continue
            b_idx = _trace_idx(fvec, trace_mat, k, dim, p)
        a_idx = _trace_idx(eps, trace_mat, k, dim, p)
        cell = a_idx * q_int + b_idx
        counts[cell] += 1
        if witnesses[cell] < 0:
            witnesses[cell] = i
    return counts, witnesses
