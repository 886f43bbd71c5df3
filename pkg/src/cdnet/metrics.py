"""Performance metrics read from a network state.

The virtual neighborhood size of a node counts the distinct nodes it shares
at least one entangled link with; the virtual node degree counts all links
incident to it. Both are read-only over the state and are sampled once per
time step, after consumption and before ages advance.
"""
from __future__ import annotations

from dataclasses import dataclass

from .netstate import NetworkState


def _check_node(state: NetworkState, node: int) -> None:
    if not 0 <= node < state.topology.n:
        raise ValueError(f"node index {node} outside 0..{state.topology.n - 1}")


def virtual_neighborhood_size(state: NetworkState, node: int) -> int:
    """Number of distinct nodes sharing at least one link with ``node``."""
    _check_node(state, node)
    return sum(1 for pair, count in state.shared_pairs() if node in pair and count > 0)


def virtual_degree(state: NetworkState, node: int) -> int:
    """Total number of entangled links incident to ``node``."""
    _check_node(state, node)
    return sum(count for pair, count in state.shared_pairs() if node in pair)


@dataclass(slots=True)
class MetricSnapshot:
    """Per-node metrics at one time step: ``v[i]`` neighborhood size, ``k[i]`` degree."""

    time: int
    v: list[int]
    k: list[int]


def measure(state: NetworkState) -> MetricSnapshot:
    """Both metrics for every node in one pass over the shared-pair index."""
    n = state.topology.n
    v = [0] * n
    k = [0] * n
    for (a, b), ids in state._pair_links.items():
        count = len(ids)
        v[a] += 1
        v[b] += 1
        k[a] += count
        k[b] += count
    return MetricSnapshot(time=state.clock, v=v, k=k)
