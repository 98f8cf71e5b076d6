# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exceptional-class lattice search and batched cone margins.

Pure-Python twins with identical signatures live in ``_kernels_py``.
"""
from libc.stdlib cimport malloc, free

cdef enum:
    MAXK = 8


cdef Py_ssize_t _search(int k, int a, int* out, Py_ssize_t cap) noexcept nogil:
    # depth-first over b_1..b_k in [-(a+1), a+1], pruned by sum b^2 = a^2+1,
    # sum b = 3a-1 and Cauchy-Schwarz on the unfilled slots
    cdef int b[MAXK]
    cdef long long sq[MAXK + 1]
    cdef long long lin[MAXK + 1]
    cdef int bound = a + 1
    cdef long long target_sq = <long long>a * a + 1
    cdef long long target_lin = 3 * <long long>a - 1
    cdef int i = 0, j, rem
    cdef long long s, l, R, L
    cdef Py_ssize_t count = 0
    if k <= 0 or k > MAXK or a < -1:
        return 0
    sq[0] = 0
    lin[0] = 0
    b[0] = -bound - 1
    while i >= 0:
        b[i] += 1
        if b[i] > bound:
            i -= 1
            continue
        s = sq[i] + <long long>b[i] * b[i]
        l = lin[i] + b[i]
        R = target_sq - s
        L = target_lin - l
        rem = k - i - 1
        if R < 0 or L * L > rem * R:
            continue
        if rem == 0:
            if R == 0 and L == 0:
                if out != NULL and count < cap:
                    for j in range(k):
                        out[count * k + j] = b[j]
                count += 1
            continue
        sq[i + 1] = s
        lin[i + 1] = l
        i += 1
        b[i] = -bound - 1
    return count


def degree_solutions(int k, int a):
    """All integer (b_1..b_k) with sum b^2 = a^2 + 1 and sum b = 3a - 1."""
    cdef Py_ssize_t n, i
    cdef int j
    cdef int* buf
    with nogil:
        n = _search(k, a, NULL, 0)
    if n == 0:
        return []
    buf = <int*>malloc(n * k * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            _search(k, a, buf, n)
        return [tuple([buf[i * k + j] for j in range(k)]) for i in range(n)]
    finally:
        free(buf)


def first_violations(long long[:, ::1] weights, long long[::1] den,
                     long long[:, ::1] classes, long long[::1] result):
    """For each row of integer numerators (sorted non-increasing, common
    denominator ``den[row]``) write the first failing constraint:
    -1 all pass, -2 volume, -3 anticanonical, c >= 0 index into ``classes``
    (rows ``(d, m_1..m_k)`` with ``m`` sorted non-increasing)."""
    cdef Py_ssize_t n = weights.shape[0], k = weights.shape[1]
    cdef Py_ssize_t nc = classes.shape[0]
    cdef Py_ssize_t r, c, j
    cdef long long q, sq, lin, pair
    with nogil:
        for r in range(n):
            q = den[r]
            sq = 0
            lin = 0
            for j in range(k):
                sq += weights[r, j] * weights[r, j]
                lin += weights[r, j]
            if q * q - sq <= 0:
                result[r] = -2
                continue
            if 3 * q - lin <= 0:
                result[r] = -3
                continue
            result[r] = -1
            for c in range(nc):
                pair = 0
                for j in range(k):
                    pair += classes[c, j + 1] * weights[r, j]
                if classes[c, 0] * q - pair <= 0:
                    result[r] = c
                    break
