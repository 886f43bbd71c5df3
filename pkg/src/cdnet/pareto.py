"""Multi-objective selection of protocol parameters.

Every candidate parameter choice carries a vector of objectives (one expected
virtual neighborhood size per user node, all to be maximized). The Pareto
frontier keeps the candidates not strictly dominated in every coordinate;
candidates that tie a dominator in some coordinate stay in. Quality-of-service
thresholds then cut the frontier down to the optimal region.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np


@dataclass(frozen=True)
class ParetoPoint:
    """One parameter choice and its per-user objective vector."""

    theta: Any
    objectives: tuple[float, ...]

    def __post_init__(self) -> None:
        obj = tuple(float(x) for x in self.objectives)
        if not obj:
            raise ValueError("objectives must be non-empty")
        if not all(np.isfinite(x) and x >= 0 for x in obj):
            raise ValueError(f"objectives must be finite and >= 0, got {obj}")
        object.__setattr__(self, "objectives", obj)


def frontier_mask(objectives: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not strictly dominated in every column."""
    obj = np.asarray(objectives, dtype=float)
    if obj.ndim != 2 or obj.shape[0] == 0:
        raise ValueError("need a non-empty 2-D objective matrix")
    n = obj.shape[0]
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        mask[i] = not bool(np.any(np.all(obj > obj[i], axis=1)))
    return mask


def pareto_frontier(points: Sequence[ParetoPoint]) -> list[ParetoPoint]:
    """Points that no other point strictly beats in all objectives at once.

    Never empty for non-empty input: a maximizer of any single objective
    cannot be strictly dominated.
    """
    if not points:
        raise ValueError("the candidate set must be non-empty")
    _check_dimensions(points)
    obj = np.array([p.objectives for p in points])
    mask = frontier_mask(obj)
    return [p for p, keep in zip(points, mask) if keep]


def qos_filter(points: Sequence[ParetoPoint], thresholds: Sequence[float]) -> list[ParetoPoint]:
    """Points meeting every per-user minimum: objectives[i] >= thresholds[i]."""
    dim = _check_dimensions(points)
    if dim is not None and len(thresholds) != dim:
        raise ValueError(f"{len(thresholds)} thresholds for {dim} objectives")
    return [
        p
        for p in points
        if all(value >= limit for value, limit in zip(p.objectives, thresholds))
    ]


def optimal_region(points: Sequence[ParetoPoint], thresholds: Sequence[float]) -> list[ParetoPoint]:
    """Frontier points that also meet the thresholds; may legitimately be empty."""
    admissible = {id(p) for p in qos_filter(points, thresholds)}
    return [p for p in pareto_frontier(points) if id(p) in admissible]


def _check_dimensions(points: Sequence[ParetoPoint]) -> int | None:
    dims = {len(p.objectives) for p in points}
    if len(dims) > 1:
        raise ValueError(f"inconsistent objective dimensions: {sorted(dims)}")
    return dims.pop() if dims else None
