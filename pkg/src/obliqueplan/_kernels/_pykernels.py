"""Reference implementations of the hot kernels (numpy / pure Python)."""
import numpy as np

IMPROVE_EPS = 1e-12


def chain_length(points):
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return 0.0
    d = np.diff(points, axis=0)
    return float(np.sum(np.sqrt(np.sum(d * d, axis=1))))


def smoothed_chain(points, eps):
    """Value, point gradients and per-leg Hessians of ``sum_j sqrt(|p_{j+1}-p_j|^2 + eps^2)``.

    Returns ``(value, grad (n, 3), leg_hess (n-1, 3, 3))``; the Hessian of leg
    ``j`` with respect to ``(p_j, p_{j+1})`` is ``[[H, -H], [-H, H]]``.
    """
    points = np.asarray(points, dtype=float)
    d = np.diff(points, axis=0)
    n = np.sqrt(np.sum(d * d, axis=1) + eps * eps)
    u = d / n[:, None]
    grad = np.zeros_like(points)
    grad[:-1] -= u
    grad[1:] += u
    leg_hess = (np.eye(3)[None, :, :] - u[:, :, None] * u[:, None, :]) / n[:, None, None]
    return float(np.sum(n)), grad, leg_hess


def held_karp_table(dist, to_end):
    """Suffix table ``cost[S, j]``: shortest path from node ``j`` through every node of
    bitmask ``S`` (``j`` not in ``S``) ending at the terminal point."""
    dist = np.asarray(dist, dtype=float)
    K = len(dist)
    cost = np.full((1 << K, K), np.inf)
    cost[0] = to_end
    bits = 1 << np.arange(K)
    for S in range(1, 1 << K):
        members = np.nonzero(S & bits)[0]
        prev = cost[S ^ bits[members], members]
        cost[S] = np.min(dist[:, members] + prev[None, :], axis=1)
    return cost


def two_opt(order, dist):
    """First-improvement 2-opt on an open path with fixed terminals.

    ``dist`` is over ``K + 2`` nodes: ``0`` is the start, ``K + 1`` the end and
    waypoint ``k`` is node ``k + 1``.  ``order`` lists waypoint indices.
    """
    dist = np.asarray(dist, dtype=float).tolist()
    seq = [0] + [int(o) + 1 for o in order] + [len(order) + 1]
    K = len(order)
    improved = True
    while improved:
        improved = False
        for i in range(1, K):
            a, c = seq[i - 1], seq[i]
            for j in range(i + 1, K + 1):
                b, e = seq[j], seq[j + 1]
                delta = dist[a][b] + dist[c][e] - dist[a][c] - dist[b][e]
                if delta < -IMPROVE_EPS:
                    seq[i:j + 1] = seq[i:j + 1][::-1]
                    improved = True
                    c = seq[i]
    return [s - 1 for s in seq[1:-1]]


# Surrogate constraints in g <= 0 form, one row of four per waypoint:
# resolution, full projection (near side), full projection (slanted side), focal.
# Quartic rows are divided by (z_ref^2 + |l_ref|^2)^2.


def altitude_constraints(z, z0, L2, r2, log_ratio, b1, b2, guard, derivatives=True):
    """Free altitude ``z`` (K,); ``z0`` expansion altitudes, ``L2`` frozen ``|l|^2``."""
    z = np.asarray(z, dtype=float)
    K = len(z)
    L = np.sqrt(L2)
    s = L2 + z0 * z0
    scale = s * s
    vals = np.empty((K, 4))

    inner = z * z - L2 / b1**2
    ok = inner >= guard * z * z
    safe = np.where(ok, inner, 1.0)
    phi1 = -1.5 * np.log(s) - 1.5 / s * (z * z - z0 * z0)
    phi2 = -3.0 * np.log(z0) - 3.0 / z0 * (z - z0)
    vals[:, 0] = np.where(ok, log_ratio - 2.0 * np.log(safe) - phi1 - phi2, np.inf)
    lower = z0**4 + 4.0 * z0**3 * (z - z0) + 2.0 * z0 * z0 * L2 + 4.0 * z0 * L2 * (z - z0) + L2 * L2
    vals[:, 1] = (r2 * (b1 * z + L) ** 2 - lower) / scale
    vals[:, 2] = (r2 * (b2**2 * z * z + (1.0 + b2**2) * L2) - lower) / scale
    vals[:, 3] = (L - b1 * z) / z0
    if not derivatives:
        return vals

    grads = np.empty((K, 4, 1))
    hess = np.empty((K, 4, 1, 1))
    grads[:, 0, 0] = -4.0 * z / safe + 3.0 * z / s + 3.0 / z0
    hess[:, 0, 0, 0] = 4.0 * (z * z + L2 / b1**2) / safe**2 + 3.0 / s
    dlower = 4.0 * z0**3 + 4.0 * z0 * L2
    grads[:, 1, 0] = (2.0 * r2 * b1 * (b1 * z + L) - dlower) / scale
    hess[:, 1, 0, 0] = 2.0 * r2 * b1**2 / scale
    grads[:, 2, 0] = (2.0 * r2 * b2**2 * z - dlower) / scale
    hess[:, 2, 0, 0] = 2.0 * r2 * b2**2 / scale
    grads[:, 3, 0] = -b1 / z0
    hess[:, 3, 0, 0] = 0.0
    return vals, grads, hess


def horizontal_constraints(l, z, l0, r2, log_ratio, b1, b2, guard, smoothing, derivatives=True):
    """Free offsets ``l`` (K, 2); ``z`` frozen altitudes, ``l0`` expansion offsets."""
    l = np.asarray(l, dtype=float).reshape(-1, 2)
    K = len(l)
    n2 = np.einsum("ki,ki->k", l, l)
    n2_0 = np.einsum("ki,ki->k", l0, l0)
    proj = np.einsum("ki,ki->k", l0, l - l0)
    s = n2_0 + z * z
    scale = s * s
    vals = np.empty((K, 4))

    D = b1**2 * z * z - n2  # b1^2 (z^2 - |l|^2 / b1^2)
    ok = D >= guard * b1**2 * z * z
    safe = np.where(ok, D, 1.0)
    theta1 = -1.5 * np.log(s) - 1.5 / s * (n2 - n2_0)
    vals[:, 0] = np.where(ok, log_ratio - 2.0 * np.log(safe / b1**2) - theta1 + 3.0 * np.log(z), np.inf)
    lower = z**4 + 2.0 * z * z * n2_0 + 4.0 * z * z * proj + n2_0 * n2_0 + 4.0 * n2_0 * proj
    u = np.sqrt(n2 + (smoothing * z) ** 2)
    t = b1 * z + u
    bz2 = (b1 * z) ** 2
    vals[:, 1] = (r2 * t * t - lower) / scale
    vals[:, 2] = (r2 * (b2**2 * z * z + (1.0 + b2**2) * n2) - lower) / scale
    vals[:, 3] = n2 / bz2 - 1.0
    if not derivatives:
        return vals

    eye = np.eye(2)
    outer = l[:, :, None] * l[:, None, :]
    grads = np.empty((K, 4, 2))
    hess = np.empty((K, 4, 2, 2))
    c0 = 4.0 / safe + 3.0 / s
    grads[:, 0] = c0[:, None] * l
    hess[:, 0] = c0[:, None, None] * eye + (8.0 / safe**2)[:, None, None] * outer
    dlower = (4.0 * z * z + 4.0 * n2_0)[:, None] * l0
    grads[:, 1] = ((2.0 * r2 * t / u)[:, None] * l - dlower) / scale[:, None]
    hess[:, 1] = (
        (2.0 * r2 / u**2)[:, None, None] * outer
        + (2.0 * r2 * t)[:, None, None] * (eye / u[:, None, None] - outer / (u**3)[:, None, None])
    ) / scale[:, None, None]
    grads[:, 2] = ((2.0 * r2 * (1.0 + b2**2))[:, None] * l - dlower) / scale[:, None]
    hess[:, 2] = (2.0 * r2 * (1.0 + b2**2) / scale)[:, None, None] * eye
    grads[:, 3] = (2.0 / bz2)[:, None] * l
    hess[:, 3] = (2.0 / bz2)[:, None, None] * eye
    return vals, grads, hess
