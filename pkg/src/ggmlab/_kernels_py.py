"""Numpy implementation of the Fock-space kernels.

Used when the compiled ``_kernels`` extension is unavailable, or when
``GGMLAB_PURE_PYTHON=1``. Signatures and output ordering match the
extension exactly.
"""

import numpy as np
from scipy.special import gammaln


def _shell_fmsv(n, m, subtract):
    m1, m2, m3, m4 = m
    if subtract:
        r1 = np.arange(m3, n - m1 + 1)
        r2 = np.arange(m4, n - m2 + 1)
    else:
        r1 = np.arange(n + 1)
        r2 = np.arange(n + 1)
    if r1.size == 0 or r2.size == 0:
        return None
    R1, R2 = np.meshgrid(r1, r2, indexing="ij")
    R1, R2 = R1.ravel(), R2.ravel()
    base = np.stack([n - R1, n - R2, R1, R2], axis=1)
    return base


def fmsv_shells(logx, m, subtract, n_lo, n_hi):
    """Closed-form terms of the (photon-varied) four-mode squeezed vacuum.

    Returns ``(occ, logamp, shell)`` for principal indices ``n_lo <= n < n_hi``;
    ``logamp`` excludes the global normalisation.
    """
    m = np.asarray(m, dtype=np.int64)
    occs, logs, shells = [], [], []
    for n in range(n_lo, n_hi):
        base = _shell_fmsv(n, m, subtract)
        if base is None:
            continue
        la = n * logx + 0.5 * (
            2 * gammaln(n + 1)
            - gammaln(base[:, 2] + 1)
            - gammaln(base[:, 0] + 1)
            - gammaln(base[:, 3] + 1)
            - gammaln(base[:, 1] + 1)
        )
        if subtract:
            new = base - m
            la = la + 0.5 * np.sum(gammaln(base + 1) - gammaln(new + 1), axis=1)
        else:
            new = base + m
            la = la + 0.5 * np.sum(gammaln(new + 1) - gammaln(base + 1), axis=1)
        occs.append(new)
        logs.append(la)
        shells.append(np.full(len(la), n, dtype=np.int64))
    if not occs:
        return np.empty((0, 4), np.int64), np.empty(0), np.empty(0, np.int64)
    return (
        np.concatenate(occs).astype(np.int64),
        np.concatenate(logs),
        np.concatenate(shells),
    )


def crystal_shells(logu2, logu3, zero2, zero3, m, subtract, k_lo, k_hi):
    """Closed-form terms of the (photon-varied) crystal state.

    Returns ``(occ, logamp, r, s)`` for shells ``k = r + s`` in
    ``[k_lo, k_hi)``; the phase ``exp(-i(r phi2 + s phi3))`` and the global
    normalisation are left to the caller.
    """
    m = np.asarray(m, dtype=np.int64)
    occs, logs, rs, ss = [], [], [], []
    for k in range(k_lo, k_hi):
        r = np.arange(k + 1)
        if zero2:
            r = r[:1]
        s = k - r
        keep = np.ones(r.size, bool)
        if zero3:
            keep &= s == 0
        base = np.stack([np.full(r.size, k), r, s], axis=1)
        if subtract:
            keep &= np.all(base >= m, axis=1)
        r, s, base = r[keep], s[keep], base[keep]
        if r.size == 0:
            continue
        la = 0.5 * (gammaln(k + 1) - gammaln(r + 1) - gammaln(s + 1))
        la = la + np.where(r > 0, r * logu2, 0.0) + np.where(s > 0, s * logu3, 0.0)
        if subtract:
            new = base - m
            la = la + 0.5 * np.sum(gammaln(base + 1) - gammaln(new + 1), axis=1)
        else:
            new = base + m
            la = la + 0.5 * np.sum(gammaln(new + 1) - gammaln(base + 1), axis=1)
        occs.append(new)
        logs.append(la)
        rs.append(r)
        ss.append(s)
    if not occs:
        e = np.empty(0, np.int64)
        return np.empty((0, 3), np.int64), np.empty(0), e, e
    return (
        np.concatenate(occs).astype(np.int64),
        np.concatenate(logs),
        np.concatenate(rs).astype(np.int64),
        np.concatenate(ss).astype(np.int64),
    )


def _lookup(keys, query):
    pos = np.searchsorted(keys, query)
    pos = np.minimum(pos, len(keys) - 1)
    hit = keys[pos] == query
    return pos, hit


def ladder_moments(occ, amp, keys, shifts):
    """First and second ladder moments of a sparse pure state.

    Args:
        occ: ``(K, N)`` occupations, rows sorted by ``keys``.
        amp: ``(K,)`` complex amplitudes (normalised).
        keys: ``(K,)`` ascending packed keys, ``sum(occ[:, i] << shifts[i])``.
        shifts: ``(N,)`` bit offsets of each mode within a key.

    Returns:
        ``(mean, nd, aa)`` with ``mean[i] = <a_i>``, ``nd[i, j] = <a_i^+ a_j>``
        and ``aa[i, j] = <a_i a_j>``.
    """
    occ = np.asarray(occ, dtype=np.int64)
    amp = np.asarray(amp, dtype=complex)
    keys = np.asarray(keys, dtype=np.int64)
    N = occ.shape[1]
    unit = np.left_shift(np.int64(1), np.asarray(shifts, dtype=np.int64))
    o = occ.astype(float)
    camp = np.conj(amp)

    def contract(coef, query, valid):
        pos, hit = _lookup(keys, query)
        sel = valid & hit
        return np.sum(camp[pos[sel]] * coef[sel] * amp[sel])

    mean = np.zeros(N, complex)
    nd = np.zeros((N, N), complex)
    aa = np.zeros((N, N), complex)
    for i in range(N):
        mean[i] = contract(np.sqrt(o[:, i]), keys - unit[i], occ[:, i] > 0)
        nd[i, i] = np.sum(o[:, i] * np.abs(amp) ** 2)
        aa[i, i] = contract(np.sqrt(o[:, i] * (o[:, i] - 1)), keys - 2 * unit[i], occ[:, i] > 1)
        for j in range(N):
            if j == i:
                continue
            nd[i, j] = contract(
                np.sqrt(o[:, j] * (o[:, i] + 1)), keys - unit[j] + unit[i], occ[:, j] > 0
            )
            if j > i:
                aa[i, j] = aa[j, i] = contract(
                    np.sqrt(o[:, i] * o[:, j]),
                    keys - unit[i] - unit[j],
                    (occ[:, i] > 0) & (occ[:, j] > 0),
                )
    return mean, nd, aa
