# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels: element enumeration, key packing, and the fused
primitive/normal/trace pair scan.  Mirrors pyscan exactly."""

from cpython.bytearray cimport PyByteArray_AS_STRING
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy, memset

from array import array

BACKEND = "compiled"


def enumerate_powers(const unsigned char[::1] step_matrix, int dim, int p, Py_ssize_t count):
    cdef bytearray out_ba = bytearray(count * dim)
    cdef unsigned char* out = <unsigned char*> PyByteArray_AS_STRING(out_ba)
    cdef long* cur = <long*> malloc(dim * sizeof(long))
    cdef long* nxt = <long*> malloc(dim * sizeof(long))
    cdef Py_ssize_t i
    cdef int t, j
    cdef long acc
    if cur == NULL or nxt == NULL:
        free(cur); free(nxt)
        raise MemoryError()
    for t in range(dim):
        cur[t] = 0
    cur[0] = 1
    with nogil:
        for i in range(count):
            for t in range(dim):
                out[i * dim + t] = <unsigned char> cur[t]
            for t in range(dim):
                acc = 0
                for j in range(dim):
                    if cur[j] != 0:
                        acc += step_matrix[t * dim + j] * cur[j]
                nxt[t] = acc % p
            for t in range(dim):
                cur[t] = nxt[t]
    free(cur); free(nxt)
    return out_ba


def pack_all(const unsigned char[::1] table, Py_ssize_t n, int dim, int p):
    keys = array("q", bytes(8 * n))
    cdef long long[::1] kv = keys
    cdef Py_ssize_t i
    cdef int t
    cdef long long key
    with nogil:
        for i in range(n):
            key = 0
            for t in range(dim - 1, -1, -1):
                key = key * p + table[i * dim + t]
            kv[i] = key
    return keys


cdef inline long long _bisect(const long long* keys, Py_ssize_t n, long long target) nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    if lo >= n or keys[lo] != target:
        return -1
    return lo


cdef inline void _mul(const unsigned char* a, const unsigned char* b,
                      const unsigned char* tensor, int dim, int p,
                      unsigned char* out) nogil:
    cdef int i, j, t
    cdef long c
    cdef long acc[64]
    for t in range(dim):
        acc[t] = 0
    for i in range(dim):
        if a[i] == 0:
            continue
        for j in range(dim):
            if b[j] == 0:
                continue
            c = <long> a[i] * b[j]
            for t in range(dim):
                acc[t] += tensor[(i * dim + j) * dim + t] * c
    for t in range(dim):
        out[t] = <unsigned char> (acc[t] % p)


cdef inline void _horner(const unsigned char* coeffs, int deg, const unsigned char* x,
                         const unsigned char* tensor, int dim, int p,
                         unsigned char* out, unsigned char* tmp) nogil:
    cdef int i, t
    for t in range(dim):
        out[t] = coeffs[deg * dim + t]
    for i in range(deg - 1, -1, -1):
        _mul(out, x, tensor, dim, p, tmp)
        for t in range(dim):
            out[t] = <unsigned char> ((tmp[t] + coeffs[i * dim + t]) % p)


cdef inline bint _kills_freeness(long long e, const long long* primes, Py_ssize_t np) nogil:
    cdef Py_ssize_t idx
    for idx in range(np):
        if e % primes[idx] == 0:
            return 1
    return 0


cdef inline bint _survives_mats(const unsigned char* vec, const unsigned char* mats,
                                int count, int dim, int p) nogil:
    cdef int c, t, j
    cdef long acc
    cdef bint nonzero
    for c in range(count):
        nonzero = 0
        for t in range(dim):
            acc = 0
            for j in range(dim):
                if vec[j] != 0:
                    acc += mats[c * dim * dim + t * dim + j] * vec[j]
            if acc % p != 0:
                nonzero = 1
                break
        if not nonzero:
            return 0
    return 1


cdef inline long _trace_idx(const unsigned char* vec, const unsigned char* trace_mat,
                            int k, int dim, int p) nogil:
    cdef long key = 0
    cdef int r, j
    cdef long acc
    for r in range(k - 1, -1, -1):
        acc = 0
        for j in range(dim):
            if vec[j] != 0:
                acc += trace_mat[r * dim + j] * vec[j]
        key = key * p + acc % p
    return key


def scan_pairs(const unsigned char[::1] powtable, Py_ssize_t n, int dim, int p,
               const unsigned char[::1] tensor,
               const long long[::1] sorted_keys, const long long[::1] exps,
               const unsigned char[::1] num_coeffs, int num_deg,
               const unsigned char[::1] den_coeffs, int den_deg,
               const long long[::1] e1_primes, const long long[::1] e2_primes,
               const unsigned char[::1] g1_mats, int g1_count,
               const unsigned char[::1] g2_mats, int g2_count,
               const unsigned char[::1] trace_mat, int k,
               const long long[::1] exclude_exps,
               int q_int, Py_ssize_t start, Py_ssize_t stop):
    if dim > 64:
        raise ValueError("flat dimension above compiled kernel limit 64")
    counts = array("q", bytes(8 * q_int * q_int))
    witnesses = array("q", [-1] * (q_int * q_int))
    cdef long long[::1] cv = counts
    cdef long long[::1] wv = witnesses
    cdef Py_ssize_t i, ne = exclude_exps.shape[0]
    cdef Py_ssize_t n1 = e1_primes.shape[0], n2 = e2_primes.shape[0]
    cdef unsigned char num_v[64]
    cdef unsigned char den_v[64]
    cdef unsigned char tmp_v[64]
    cdef long long num_key, den_key, ni, di, j_f
    cdef long a_idx, b_idx
    cdef int t
    cdef Py_ssize_t eidx
    cdef bint skip, integrity = 0
    cdef const unsigned char* fvec
    cdef unsigned char zero_v[64]
    memset(zero_v, 0, 64)
    with nogil:
        for i in range(start, stop):
            skip = 0
            for eidx in range(ne):
                if exclude_exps[eidx] == i:
                    skip = 1
                    break
            if skip:
                continue
            if _kills_freeness(i, &e1_primes[0] if n1 else NULL, n1):
                continue
            if g1_count and not _survives_mats(&powtable[i * dim], &g1_mats[0], g1_count, dim, p):
                continue
            _horner(&num_coeffs[0], num_deg, &powtable[i * dim], &tensor[0], dim, p, num_v, tmp_v)
            _horner(&den_coeffs[0], den_deg, &powtable[i * dim], &tensor[0], dim, p, den_v, tmp_v)
            den_key = 0
            for t in range(dim - 1, -1, -1):
                den_key = den_key * p + den_v[t]
            if den_key == 0:
                continue
            num_key = 0
            for t in range(dim - 1, -1, -1):
                num_key = num_key * p + num_v[t]
            if num_key == 0:
                if n2 > 0 or g2_count > 0:
                    continue
                fvec = zero_v
                b_idx = 0
            else:
                ni = _bisect(&sorted_keys[0], n, num_key)
                di = _bisect(&sorted_keys[0], n, den_key)
                if ni < 0 or di < 0:
                    integrity = 1
                    break
                j_f = (exps[ni] - exps[di]) % n
                if j_f < 0:
                    j_f += n
                if _kills_freeness(j_f, &e2_primes[0] if n2 else NULL, n2):
                    continue
                fvec = &powtable[j_f * dim]
                if g2_count and not _survives_mats(fvec, &g2_mats[0], g2_count, dim, p):
                    continue
                b_idx = _trace_idx(fvec, &trace_mat[0], k, dim, p)
            a_idx = _trace_idx(&powtable[i * dim], &trace_mat[0], k, dim, p)
            cv[a_idx * q_int + b_idx] += 1
            if wv[a_idx * q_int + b_idx] < 0:
                wv[a_idx * q_int + b_idx] = i
    if integrity:
        return None
    return counts, witnesses
