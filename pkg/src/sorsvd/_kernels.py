"""Hot inner loops: Householder thin QR and element-wise soft thresholding.

Every kernel exists twice, a numba version (``*_nb``) and a pure-numpy
version (``*_np``). The public name points at one of them depending on
:data:`sorsvd._accel.USE_NUMBA`. Both follow the same arithmetic recipe, so
they agree to rounding but are not bit-identical to each other.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


def householder_qr_np(a):
    """Thin Householder QR of a C-contiguous float64 ``a`` (m >= n).

    Returns ``(q, r)`` with ``q`` m x n orthonormal and ``r`` n x n upper
    triangular with a nonnegative diagonal.
    """
    m, n = a.shape
    r = np.array(a, dtype=np.float64, order="C", copy=True)
    vs = np.zeros((m, n))
    betas = np.zeros(n)
    for j in range(n):
        x = r[j:, j]
        normx = np.sqrt(x @ x)
        if normx == 0.0:
            continue
        v = x.copy()
        v[0] += normx if v[0] >= 0.0 else -normx
        beta = 2.0 / (v @ v)
        w = v @ r[j:, j:]
        r[j:, j:] -= np.outer(beta * v, w)
        vs[j:, j] = v
        betas[j] = beta

    q = np.zeros((m, n))
    q[np.arange(n), np.arange(n)] = 1.0
    for j in range(n - 1, -1, -1):
        beta = betas[j]
        if beta == 0.0:
            continue
        v = vs[j:, j]
        w = v @ q[j:, j:]
        q[j:, j:] -= np.outer(beta * v, w)

    r = np.triu(r[:n, :])
    neg = np.diag(r) < 0.0
    r[neg, :] *= -1.0
    q[:, neg] *= -1.0
    return q, r


@njit
def householder_qr_nb(a):
    m, n = a.shape
    r = a.copy()
    vs = np.zeros((m, n))
    betas = np.zeros(n)
    w = np.zeros(n)
    for j in range(n):
        normsq = 0.0
        for i in range(j, m):
            normsq += r[i, j] * r[i, j]
        if normsq == 0.0:
            continue
        normx = np.sqrt(normsq)
        for i in range(j, m):
            vs[i, j] = r[i, j]
        if vs[j, j] >= 0.0:
            vs[j, j] += normx
        else:
            vs[j, j] -= normx
        vv = 0.0
        for i in range(j, m):
            vv += vs[i, j] * vs[i, j]
        beta = 2.0 / vv
        betas[j] = beta
        for c in range(j, n):
            w[c] = 0.0
        for i in range(j, m):
            vi = vs[i, j]
            for c in range(j, n):
                w[c] += vi * r[i, c]
        for i in range(j, m):
            bvi = beta * vs[i, j]
            for c in range(j, n):
                r[i, c] -= bvi * w[c]

    q = np.zeros((m, n))
    for i in range(n):
        q[i, i] = 1.0
    for j in range(n - 1, -1, -1):
        beta = betas[j]
        if beta == 0.0:
            continue
        for c in range(j, n):
            w[c] = 0.0
        for i in range(j, m):
            vi = vs[i, j]
            for c in range(j, n):
                w[c] += vi * q[i, c]
        for i in range(j, m):
            bvi = beta * vs[i, j]
            for c in range(j, n):
                q[i, c] -= bvi * w[c]

    rr = np.zeros((n, n))
    for i in range(n):
        flip = r[i, i] < 0.0
        for c in range(i, n):
            rr[i, c] = -r[i, c] if flip else r[i, c]
        if flip:
            for k in range(m):
                q[k, i] = -q[k, i]
    return q, rr


def soft_threshold_np(x, eps):
    # x - clip(x) yields +0.0 inside the dead zone and x -/+ eps outside
    return x - np.clip(x, -eps, eps)


@njit
def soft_threshold_nb(x, eps):
    flat = x.ravel()
    out = np.empty_like(flat)
    for i in range(flat.size):
        v = flat[i]
        if v > eps:
            out[i] = v - eps
        elif v < -eps:
            out[i] = v + eps
        else:
            out[i] = 0.0
    return out.reshape(x.shape)


if USE_NUMBA:
    householder_qr = householder_qr_nb
    soft_threshold = soft_threshold_nb
else:
    householder_qr = householder_qr_np
    soft_threshold = soft_threshold_np
