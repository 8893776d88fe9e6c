"""Independent reference computations used by the tests.

Nothing here imports the package.  The footprint is obtained by casting rays
from the sensor corners through the lens onto the ground, the route order by
brute-force enumeration, 1-D optima by golden-section search.
"""
import itertools
import math

import numpy as np

F0, W0, L0 = 0.035, 0.0156, 0.0235


def ray_cast_footprint(z, ell, f0=F0, w0=W0, l0=L0):
    """Ground quadrilateral seen by a camera at height ``z`` and horizontal
    distance ``ell`` from the target centre (the origin), aimed at it.

    The sensor sits at the UAV point and the lens ``f0`` in front of it along
    the optical axis.  Returns the four ground corners ordered near-left,
    near-right, far-right, far-left.
    """
    uav = np.array([-ell, 0.0, z])
    du = math.hypot(ell, z)
    axis = np.array([ell, 0.0, -z]) / du
    e_u = np.array([z, 0.0, ell]) / du  # sensor direction within the tilt plane
    e_v = np.array([0.0, 1.0, 0.0])
    lens = uav + f0 * axis
    corners = {}
    for s in (-1, 1):
        for t in (-1, 1):
            c = uav + s * 0.5 * w0 * e_u + t * 0.5 * l0 * e_v
            d = lens - c
            lam = -lens[2] / d[2]
            if lam <= 0:
                raise ValueError("ray does not reach the ground")
            corners[(s, t)] = (lens + lam * d)[:2]
    # the sensor's upper edge (s=+1) images the near side after inversion
    near = sorted([corners[(1, -1)], corners[(1, 1)]], key=lambda p: p[1])
    far = sorted([corners[(-1, -1)], corners[(-1, 1)]], key=lambda p: -p[1])
    if np.mean([p[0] for p in near]) > np.mean([p[0] for p in far]):
        near, far = [far[1], far[0]], [near[1], near[0]]
    return np.array(near + far)


def polygon_area(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def point_line_distance(p, a, b):
    ab, ap = b - a, p - a
    return abs(ab[0] * ap[1] - ab[1] * ap[0]) / math.hypot(*ab)


def footprint_metrics(z, ell, **cam):
    """Area, near-side length, far-side length, depth, near-side and
    slanted-side distances from the target centre."""
    poly = ray_cast_footprint(z, ell, **cam)
    o = np.zeros(2)
    near_len = np.linalg.norm(poly[1] - poly[0])
    far_len = np.linalg.norm(poly[2] - poly[3])
    depth = abs(np.mean(poly[2:, 0]) - np.mean(poly[:2, 0]))
    return {
        "area": polygon_area(poly),
        "ad": near_len,
        "bc": far_len,
        "ef": depth,
        "d1": point_line_distance(o, poly[0], poly[1]),
        "d2": point_line_distance(o, poly[1], poly[2]),
    }


def path_length(start, end, pts, order):
    seq = [start] + [pts[i] for i in order] + [end]
    return sum(math.dist(seq[i], seq[i + 1]) for i in range(len(seq) - 1))


def brute_force_order(start, end, pts):
    """Shortest open path start -> all pts -> end; lexicographically first among
    orders within a relative 1e-10 of the optimum."""
    start, end, pts = np.asarray(start, float), np.asarray(end, float), np.asarray(pts, float)
    best, best_len = None, math.inf
    results = []
    for perm in itertools.permutations(range(len(pts))):
        length = path_length(start, end, pts, perm)
        results.append((perm, length))
        if length < best_len:
            best_len = length
    tol = 1e-10 * max(1.0, best_len)
    best = min(p for p, length in results if length <= best_len + tol)
    return list(best), best_len


def golden_section(f, lo, hi, tol=1e-10):
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    while b - a > tol:
        if f(c) < f(d):
            b = d
        else:
            a = c
        c, d = b - g * (b - a), a + g * (b - a)
    return 0.5 * (a + b)
