from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Mapping


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps for every optimization layer.

    ``max_bcd_iters`` bounds the altitude/horizontal sweeps of one waypoint
    optimization, ``max_outer_iters`` the waypoint/order rounds of a plan.
    """

    obj_tol: float = 1e-6
    feas_tol: float = 1e-6
    model_tol: float = 1e-9
    # chain solver
    max_iters: int = 500
    newton_per_stage: int = 50
    barrier_t0: float = 1.0
    barrier_mu: float = 10.0
    smoothing_start: float = 1e-2
    smoothing_end: float = 1e-8
    # successive convex approximation / block coordinate descent
    max_sca_iters: int = 30
    max_bcd_iters: int = 20
    max_outer_iters: int = 10
    bcd_order: str = "ZQ"
    sca_interleave: bool = False
    # visiting order
    order_solver: str = "auto"
    exact_cap: int = 13
    heuristic_restarts: int = 8
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("max_iters", "newton_per_stage", "max_sca_iters", "max_bcd_iters", "max_outer_iters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("obj_tol", "feas_tol", "model_tol", "smoothing_start", "smoothing_end", "barrier_t0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.barrier_mu <= 1:
            raise ValueError("barrier_mu must exceed 1")
        if sorted(self.bcd_order) != ["Q", "Z"]:
            raise ValueError(f"bcd_order must be 'ZQ' or 'QZ', got {self.bcd_order!r}")
        if self.order_solver not in ("auto", "exact", "heuristic"):
            raise ValueError(f"unknown order_solver {self.order_solver!r}")
        if self.exact_cap < 1 or self.heuristic_restarts < 0:
            raise ValueError("exact_cap must be >= 1 and heuristic_restarts >= 0")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SolverConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown solver config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)
