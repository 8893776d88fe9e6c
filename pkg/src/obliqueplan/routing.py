"""Visiting order for fixed waypoints: an open-path TSP with fixed terminals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels

DEFAULT_EXACT_CAP = 13
TIE_RTOL = 1e-10


@dataclass(frozen=True)
class Tour:
    order: Tuple[int, ...]  # 0-based waypoint indices in visiting order
    length: float


def _node_matrix(endpoints, waypoints) -> np.ndarray:
    """Distances over nodes ``[start, wp_0 .. wp_{K-1}, end]``."""
    start, end = endpoints
    pts = np.vstack([np.asarray(start, float)] + [np.asarray(w, float) for w in waypoints] + [np.asarray(end, float)])
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2)), pts


def tour_length(endpoints, waypoints, order: Sequence[int]) -> float:
    start, end = endpoints
    pts = [np.asarray(start, float)] + [np.asarray(waypoints[i], float) for i in order] + [np.asarray(end, float)]
    return _kernels.chain_length(np.vstack(pts))


def solve_order_exact(endpoints, waypoints, exact_cap: int = DEFAULT_EXACT_CAP) -> Tour:
    """Optimal order by dynamic programming over subsets.

    Among orders whose length is within a relative ``1e-10`` of the optimum the
    lexicographically smallest is returned.
    """
    K = len(waypoints)
    if K == 0:
        raise ValueError("no waypoints to order")
    if K > exact_cap:
        raise ValueError(f"exact ordering limited to {exact_cap} waypoints, got {K}")
    D, _ = _node_matrix(endpoints, waypoints)
    inner = np.ascontiguousarray(D[1:-1, 1:-1])
    cost = _kernels.held_karp_table(inner, np.ascontiguousarray(D[1:-1, -1]))
    full = (1 << K) - 1
    first = D[0, 1:-1] + cost[full ^ (1 << np.arange(K)), np.arange(K)]
    tol = TIE_RTOL * max(1.0, float(np.min(first)))

    order: List[int] = []
    remaining = full
    from_cur = D[0, 1:-1]
    while remaining:
        members = [k for k in range(K) if remaining >> k & 1]
        totals = [from_cur[k] + cost[remaining ^ (1 << k), k] for k in members]
        best = min(totals)
        k = next(k for k, c in zip(members, totals) if c <= best + tol)
        order.append(k)
        remaining ^= 1 << k
        from_cur = inner[k]
    return Tour(tuple(order), tour_length(endpoints, waypoints, order))


def nearest_neighbour_order(D: np.ndarray) -> List[int]:
    K = len(D) - 2
    left = set(range(K))
    order = []
    cur = 0
    while left:
        k = min(left, key=lambda i: (D[cur, i + 1], i))
        order.append(k)
        left.remove(k)
        cur = k + 1
    return order


def is_two_opt_optimal(endpoints, waypoints, order: Sequence[int], eps: float = 1e-9) -> bool:
    """True when no segment reversal shortens the path by more than ``eps``."""
    D, _ = _node_matrix(endpoints, waypoints)
    seq = [0] + [o + 1 for o in order] + [len(order) + 1]
    for i in range(1, len(order)):
        for j in range(i + 1, len(order) + 1):
            delta = D[seq[i - 1], seq[j]] + D[seq[i], seq[j + 1]] - D[seq[i - 1], seq[i]] - D[seq[j], seq[j + 1]]
            if delta < -eps:
                return False
    return True


def solve_order_heuristic(
    endpoints,
    waypoints,
    rng_seed: int = 0,
    restarts: int = 8,
    incumbent: Optional[Sequence[int]] = None,
) -> Tour:
    """Nearest-neighbour construction plus 2-opt, repeated from seeded random starts.

    An ``incumbent`` order is also 2-opt improved and competes, so the result is
    never longer than it.  Deterministic for a given seed.
    """
    K = len(waypoints)
    if K == 0:
        raise ValueError("no waypoints to order")
    D, _ = _node_matrix(endpoints, waypoints)
    D = np.ascontiguousarray(D)
    starts = [nearest_neighbour_order(D)]
    if incumbent is not None:
        starts.append([int(k) for k in incumbent])
    rng = np.random.default_rng(rng_seed)
    starts.extend(rng.permutation(K).tolist() for _ in range(restarts))

    best: Optional[Tour] = None
    for s in starts:
        order = _kernels.two_opt(s, D)
        length = tour_length(endpoints, waypoints, order)
        if best is None or length < best.length:
            best = Tour(tuple(order), length)
    return best


def solve_order(
    endpoints,
    waypoints,
    method: str = "auto",
    exact_cap: int = DEFAULT_EXACT_CAP,
    rng_seed: int = 0,
    restarts: int = 8,
    incumbent: Optional[Sequence[int]] = None,
) -> Tour:
    if method == "exact" or (method == "auto" and len(waypoints) <= exact_cap):
        return solve_order_exact(endpoints, waypoints, exact_cap=exact_cap)
    return solve_order_heuristic(endpoints, waypoints, rng_seed=rng_seed, restarts=restarts, incumbent=incumbent)
