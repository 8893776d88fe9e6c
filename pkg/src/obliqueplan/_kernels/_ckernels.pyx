# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, INFINITY

cnp.import_array()

cdef double IMPROVE_EPS = 1e-12


def chain_length(points):
    cdef double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], j
    cdef double total = 0.0, dx, dy, dz
    for j in range(n - 1):
        dx = p[j + 1, 0] - p[j, 0]
        dy = p[j + 1, 1] - p[j, 1]
        dz = p[j + 1, 2] - p[j, 2]
        total += sqrt(dx * dx + dy * dy + dz * dz)
    return total


def smoothed_chain(points, double eps):
    cdef double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], j, a, b
    grad_arr = np.zeros((n, 3))
    hess_arr = np.empty((max(n - 1, 0), 3, 3))
    cdef double[:, ::1] g = grad_arr
    cdef double[:, :, ::1] h = hess_arr
    cdef double d[3]
    cdef double u[3]
    cdef double total = 0.0, nrm, inv
    for j in range(n - 1):
        for a in range(3):
            d[a] = p[j + 1, a] - p[j, a]
        nrm = sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + eps * eps)
        total += nrm
        inv = 1.0 / nrm
        for a in range(3):
            u[a] = d[a] * inv
            g[j, a] -= u[a]
            g[j + 1, a] += u[a]
        for a in range(3):
            for b in range(3):
                h[j, a, b] = ((1.0 if a == b else 0.0) - u[a] * u[b]) * inv
    return total, grad_arr, hess_arr


def held_karp_table(dist, to_end):
    cdef double[:, ::1] D = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t K = D.shape[0]
    cost_arr = np.full((1 << K, K), np.inf)
    cost_arr[0] = to_end
    cdef double[:, ::1] cost = cost_arr
    cdef Py_ssize_t S, j, k, prev
    cdef double best, c
    for S in range(1, 1 << K):
        for j in range(K):
            best = INFINITY
            for k in range(K):
                if S & (1 << k):
                    prev = S ^ (1 << k)
                    c = D[j, k] + cost[prev, k]
                    if c < best:
                        best = c
            cost[S, j] = best
    return cost_arr


def two_opt(order, dist):
    cdef double[:, ::1] D = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t K = len(order), i, j, lo, hi, tmp
    seq_arr = np.empty(K + 2, dtype=np.intp)
    cdef Py_ssize_t[::1] seq = seq_arr
    seq[0] = 0
    for i in range(K):
        seq[i + 1] = <Py_ssize_t>order[i] + 1
    seq[K + 1] = K + 1
    cdef bint improved = True
    cdef double delta
    while improved:
        improved = False
        for i in range(1, K):
            for j in range(i + 1, K + 1):
                delta = (D[seq[i - 1], seq[j]] + D[seq[i], seq[j + 1]]
                         - D[seq[i - 1], seq[i]] - D[seq[j], seq[j + 1]])
                if delta < -IMPROVE_EPS:
                    lo = i
                    hi = j
                    while lo < hi:
                        tmp = seq[lo]
                        seq[lo] = seq[hi]
                        seq[hi] = tmp
                        lo += 1
                        hi -= 1
                    improved = True
    return [int(seq[i]) - 1 for i in range(1, K + 1)]


def altitude_constraints(z, z0, L2, r2, log_ratio, double b1, double b2, double guard, bint derivatives=True):
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    cdef double[::1] z0v = np.ascontiguousarray(z0, dtype=np.float64)
    cdef double[::1] L2v = np.ascontiguousarray(L2, dtype=np.float64)
    cdef double[::1] r2v = np.ascontiguousarray(r2, dtype=np.float64)
    cdef double[::1] lr = np.ascontiguousarray(log_ratio, dtype=np.float64)
    cdef Py_ssize_t K = zv.shape[0], k
    vals_arr = np.empty((K, 4))
    cdef double[:, ::1] v = vals_arr
    cdef double[:, :, ::1] g
    cdef double[:, :, :, ::1] h
    if derivatives:
        grads_arr = np.empty((K, 4, 1))
        hess_arr = np.empty((K, 4, 1, 1))
        g = grads_arr
        h = hess_arr
    cdef double zz, a, Lsq, L, s, scale, inner, safe, phi1, phi2, lower, dlower
    cdef bint ok
    for k in range(K):
        zz = zv[k]
        a = z0v[k]
        Lsq = L2v[k]
        L = sqrt(Lsq)
        s = Lsq + a * a
        scale = s * s
        inner = zz * zz - Lsq / (b1 * b1)
        ok = inner >= guard * zz * zz
        safe = inner if ok else 1.0
        if ok:
            phi1 = -1.5 * log(s) - 1.5 / s * (zz * zz - a * a)
            phi2 = -3.0 * log(a) - 3.0 / a * (zz - a)
            v[k, 0] = lr[k] - 2.0 * log(safe) - phi1 - phi2
        else:
            v[k, 0] = INFINITY
        lower = a * a * a * a + 4.0 * a * a * a * (zz - a) + 2.0 * a * a * Lsq + 4.0 * a * Lsq * (zz - a) + Lsq * Lsq
        v[k, 1] = (r2v[k] * (b1 * zz + L) * (b1 * zz + L) - lower) / scale
        v[k, 2] = (r2v[k] * (b2 * b2 * zz * zz + (1.0 + b2 * b2) * Lsq) - lower) / scale
        v[k, 3] = (L - b1 * zz) / a
        if not derivatives:
            continue
        g[k, 0, 0] = -4.0 * zz / safe + 3.0 * zz / s + 3.0 / a
        h[k, 0, 0, 0] = 4.0 * (zz * zz + Lsq / (b1 * b1)) / (safe * safe) + 3.0 / s
        dlower = 4.0 * a * a * a + 4.0 * a * Lsq
        g[k, 1, 0] = (2.0 * r2v[k] * b1 * (b1 * zz + L) - dlower) / scale
        h[k, 1, 0, 0] = 2.0 * r2v[k] * b1 * b1 / scale
        g[k, 2, 0] = (2.0 * r2v[k] * b2 * b2 * zz - dlower) / scale
        h[k, 2, 0, 0] = 2.0 * r2v[k] * b2 * b2 / scale
        g[k, 3, 0] = -b1 / a
        h[k, 3, 0, 0] = 0.0
    if derivatives:
        return vals_arr, grads_arr, hess_arr
    return vals_arr


def horizontal_constraints(l, z, l0, r2, log_ratio, double b1, double b2, double guard, double smoothing,
                           bint derivatives=True):
    cdef double[:, ::1] lv = np.ascontiguousarray(l, dtype=np.float64).reshape(-1, 2)
    cdef double[::1] zv = np.ascontiguousarray(z, dtype=np.float64)
    cdef double[:, ::1] l0v = np.ascontiguousarray(l0, dtype=np.float64).reshape(-1, 2)
    cdef double[::1] r2v = np.ascontiguousarray(r2, dtype=np.float64)
    cdef double[::1] lr = np.ascontiguousarray(log_ratio, dtype=np.float64)
    cdef Py_ssize_t K = lv.shape[0], k, i, j
    vals_arr = np.empty((K, 4))
    cdef double[:, ::1] v = vals_arr
    cdef double[:, :, ::1] g
    cdef double[:, :, :, ::1] h
    if derivatives:
        grads_arr = np.empty((K, 4, 2))
        hess_arr = np.empty((K, 4, 2, 2))
        g = grads_arr
        h = hess_arr
    cdef double zz, x0, x1, y0, y1, n2, n2_0, proj, s, scale, D, safe, theta1, lower
    cdef double u, t, bz2, c0, c1, c2, dl, eye, outer, rr
    cdef bint ok
    for k in range(K):
        x0 = lv[k, 0]
        x1 = lv[k, 1]
        y0 = l0v[k, 0]
        y1 = l0v[k, 1]
        zz = zv[k]
        rr = r2v[k]
        n2 = x0 * x0 + x1 * x1
        n2_0 = y0 * y0 + y1 * y1
        proj = y0 * (x0 - y0) + y1 * (x1 - y1)
        s = n2_0 + zz * zz
        scale = s * s
        D = b1 * b1 * zz * zz - n2
        ok = D >= guard * b1 * b1 * zz * zz
        safe = D if ok else 1.0
        if ok:
            theta1 = -1.5 * log(s) - 1.5 / s * (n2 - n2_0)
            v[k, 0] = lr[k] - 2.0 * log(safe / (b1 * b1)) - theta1 + 3.0 * log(zz)
        else:
            v[k, 0] = INFINITY
        lower = (zz * zz * zz * zz + 2.0 * zz * zz * n2_0 + 4.0 * zz * zz * proj
                 + n2_0 * n2_0 + 4.0 * n2_0 * proj)
        u = sqrt(n2 + (smoothing * zz) * (smoothing * zz))
        t = b1 * zz + u
        bz2 = (b1 * zz) * (b1 * zz)
        v[k, 1] = (rr * t * t - lower) / scale
        v[k, 2] = (rr * (b2 * b2 * zz * zz + (1.0 + b2 * b2) * n2) - lower) / scale
        v[k, 3] = n2 / bz2 - 1.0
        if not derivatives:
            continue
        c0 = 4.0 / safe + 3.0 / s
        c1 = 2.0 * rr * t / u
        c2 = 2.0 * rr * (1.0 + b2 * b2)
        dl = 4.0 * zz * zz + 4.0 * n2_0
        g[k, 0, 0] = c0 * x0
        g[k, 0, 1] = c0 * x1
        g[k, 1, 0] = (c1 * x0 - dl * y0) / scale
        g[k, 1, 1] = (c1 * x1 - dl * y1) / scale
        g[k, 2, 0] = (c2 * x0 - dl * y0) / scale
        g[k, 2, 1] = (c2 * x1 - dl * y1) / scale
        g[k, 3, 0] = 2.0 / bz2 * x0
        g[k, 3, 1] = 2.0 / bz2 * x1
        for i in range(2):
            for j in range(2):
                eye = 1.0 if i == j else 0.0
                outer = lv[k, i] * lv[k, j]
                h[k, 0, i, j] = c0 * eye + 8.0 / (safe * safe) * outer
                h[k, 1, i, j] = (2.0 * rr / (u * u) * outer
                                 + 2.0 * rr * t * (eye / u - outer / (u * u * u))) / scale
                h[k, 2, i, j] = c2 / scale * eye
                h[k, 3, i, j] = 2.0 / bz2 * eye
    if derivatives:
        return vals_arr, grads_arr, hess_arr
    return vals_arr
