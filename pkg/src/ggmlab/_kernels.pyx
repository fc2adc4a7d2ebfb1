# cython: language_level=3
"""Compiled Fock-space kernels.

Mirror of ``_kernels_py``: same signatures, same term ordering.
"""

import numpy as np

from libc.math cimport lgamma, sqrt


def _logfact_table(long n):
    """``log(k!)`` for ``k = 0..n``."""
    out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] t = out
    cdef long k
    for k in range(n + 1):
        t[k] = lgamma(<double>k + 1.0)
    return out


def fmsv_shells(double logx, m, bint subtract, long n_lo, long n_hi):
    cdef long m1 = m[0], m2 = m[1], m3 = m[2], m4 = m[3]
    cdef long n, r1, r2, k, K = 0
    cdef long a_lo, a_hi, b_lo, b_hi
    for n in range(n_lo, n_hi):
        if subtract:
            a_lo, a_hi, b_lo, b_hi = m3, n - m1, m4, n - m2
        else:
            a_lo, a_hi, b_lo, b_hi = 0, n, 0, n
        if a_hi >= a_lo and b_hi >= b_lo:
            K += (a_hi - a_lo + 1) * (b_hi - b_lo + 1)

    occ_arr = np.empty((K, 4), dtype=np.int64)
    la_arr = np.empty(K, dtype=np.float64)
    sh_arr = np.empty(K, dtype=np.int64)
    cdef long long[:, ::1] occ = occ_arr
    cdef double[::1] la = la_arr
    cdef long long[::1] sh = sh_arr
    cdef long b0, b1, b2, b3
    cdef long s = -1 if subtract else 1
    cdef double head, lf1, term
    lf_arr = _logfact_table(n_hi + max(m1, m2, m3, m4) + 1)
    cdef const double[::1] _lf = lf_arr

    k = 0
    with nogil:
        for n in range(n_lo, n_hi):
            if subtract:
                a_lo, a_hi, b_lo, b_hi = m3, n - m1, m4, n - m2
            else:
                a_lo, a_hi, b_lo, b_hi = 0, n, 0, n
            if a_hi < a_lo or b_hi < b_lo:
                continue
            head = n * logx + _lf[n]
            for r1 in range(a_lo, a_hi + 1):
                b0 = n - r1
                b2 = r1
                lf1 = head - 0.5 * (_lf[b0] + _lf[b2])
                if subtract:
                    lf1 += 0.5 * (_lf[b0] - _lf[b0 - m1] + _lf[b2] - _lf[b2 - m3])
                else:
                    lf1 += 0.5 * (_lf[b0 + m1] - _lf[b0] + _lf[b2 + m3] - _lf[b2])
                for r2 in range(b_lo, b_hi + 1):
                    b1 = n - r2
                    b3 = r2
                    term = lf1 - 0.5 * (_lf[b1] + _lf[b3])
                    if subtract:
                        term += 0.5 * (_lf[b1] - _lf[b1 - m2] + _lf[b3] - _lf[b3 - m4])
                    else:
                        term += 0.5 * (_lf[b1 + m2] - _lf[b1] + _lf[b3 + m4] - _lf[b3])
                    occ[k, 0] = b0 + s * m1
                    occ[k, 1] = b1 + s * m2
                    occ[k, 2] = b2 + s * m3
                    occ[k, 3] = b3 + s * m4
                    la[k] = term
                    sh[k] = n
                    k += 1
    return occ_arr, la_arr, sh_arr


cdef inline bint _crystal_keep(long k, long r, long s, bint zero2, bint zero3,
                               bint subtract, long m1, long m2, long m3) nogil:
    if zero2 and r > 0:
        return False
    if zero3 and s > 0:
        return False
    if subtract and (k < m1 or r < m2 or s < m3):
        return False
    return True


def crystal_shells(double logu2, double logu3, bint zero2, bint zero3, m,
                   bint subtract, long k_lo, long k_hi):
    cdef long m1 = m[0], m2 = m[1], m3 = m[2]
    cdef long k, r, s, K = 0, i
    for k in range(k_lo, k_hi):
        for r in range(k + 1):
            if _crystal_keep(k, r, k - r, zero2, zero3, subtract, m1, m2, m3):
                K += 1

    occ_arr = np.empty((K, 3), dtype=np.int64)
    la_arr = np.empty(K, dtype=np.float64)
    r_arr = np.empty(K, dtype=np.int64)
    s_arr = np.empty(K, dtype=np.int64)
    cdef long long[:, ::1] occ = occ_arr
    cdef double[::1] la = la_arr
    cdef long long[::1] ro = r_arr
    cdef long long[::1] so = s_arr
    cdef long sg = -1 if subtract else 1
    cdef double term
    lf_arr = _logfact_table(k_hi + max(m1, m2, m3) + 1)
    cdef const double[::1] _lf = lf_arr

    i = 0
    with nogil:
        for k in range(k_lo, k_hi):
            for r in range(k + 1):
                s = k - r
                if not _crystal_keep(k, r, s, zero2, zero3, subtract, m1, m2, m3):
                    continue
                term = 0.5 * (_lf[k] - _lf[r] - _lf[s])
                if r > 0:
                    term += r * logu2
                if s > 0:
                    term += s * logu3
                if subtract:
                    term += 0.5 * (_lf[k] - _lf[k - m1] + _lf[r] - _lf[r - m2]
                                   + _lf[s] - _lf[s - m3])
                else:
                    term += 0.5 * (_lf[k + m1] - _lf[k] + _lf[r + m2] - _lf[r]
                                   + _lf[s + m3] - _lf[s])
                occ[i, 0] = k + sg * m1
                occ[i, 1] = r + sg * m2
                occ[i, 2] = s + sg * m3
                la[i] = term
                ro[i] = r
                so[i] = s
                i += 1
    return occ_arr, la_arr, r_arr, s_arr


cdef double complex _shift_sum(const long long[::1] keys, const double complex[::1] amp,
                               const long long[:, ::1] occ, long long delta, int kind,
                               long i, long j) noexcept nogil:
    """``sum_t conj(amp[p(t)]) c_t amp[t]`` where ``keys[p(t)] = keys[t] - delta``.

    Keys are ascending, so the shifted queries are too and a single forward
    pointer replaces a binary search per row. ``kind`` selects the
    matrix element: 0 ``a_i``, 1 ``a_i a_i``, 2 ``a_i^+ a_j``, 3 ``a_i a_j``.
    """
    cdef long K = keys.shape[0], t, p = 0
    cdef long long q
    cdef double oi, oj, c
    cdef double complex acc = 0
    for t in range(K):
        oi = occ[t, i]
        oj = occ[t, j]
        if kind == 0:
            if oi < 1:
                continue
            c = sqrt(oi)
        elif kind == 1:
            if oi < 2:
                continue
            c = sqrt(oi * (oi - 1))
        elif kind == 2:
            if oj < 1:
                continue
            c = sqrt(oj * (oi + 1))
        else:
            if oi < 1 or oj < 1:
                continue
            c = sqrt(oi * oj)
        q = keys[t] - delta
        while p < K and keys[p] < q:
            p += 1
        if p == K:
            break
        if keys[p] == q:
            acc = acc + amp[p].conjugate() * c * amp[t]
    return acc


def ladder_moments(occ_in, amp_in, keys_in, shifts_in):
    cdef const long long[:, ::1] occ = np.ascontiguousarray(occ_in, dtype=np.int64)
    cdef const double complex[::1] amp = np.ascontiguousarray(amp_in, dtype=np.complex128)
    cdef const long long[::1] keys = np.ascontiguousarray(keys_in, dtype=np.int64)
    shifts = np.ascontiguousarray(shifts_in, dtype=np.int64)
    cdef long K = occ.shape[0], N = occ.shape[1]
    unit_arr = np.left_shift(np.int64(1), shifts)
    cdef const long long[::1] unit = unit_arr

    mean_arr = np.zeros(N, dtype=np.complex128)
    nd_arr = np.zeros((N, N), dtype=np.complex128)
    aa_arr = np.zeros((N, N), dtype=np.complex128)
    cdef double complex[::1] mean = mean_arr
    cdef double complex[:, ::1] nd = nd_arr
    cdef double complex[:, ::1] aa = aa_arr

    cdef long t, i, j
    cdef double pop
    with nogil:
        for i in range(N):
            pop = 0
            for t in range(K):
                pop += occ[t, i] * (amp[t].real * amp[t].real + amp[t].imag * amp[t].imag)
            nd[i, i] = pop
            mean[i] = _shift_sum(keys, amp, occ, unit[i], 0, i, i)
            aa[i, i] = _shift_sum(keys, amp, occ, 2 * unit[i], 1, i, i)
            for j in range(N):
                if j == i:
                    continue
                nd[i, j] = _shift_sum(keys, amp, occ, unit[j] - unit[i], 2, i, j)
                if j > i:
                    aa[i, j] = _shift_sum(keys, amp, occ, unit[i] + unit[j], 3, i, j)
                    aa[j, i] = aa[i, j]
    return mean_arr, nd_arr, aa_arr
