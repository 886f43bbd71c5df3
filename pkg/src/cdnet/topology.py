"""Physical network topologies: validated adjacency matrices and balanced trees.

A topology is an undirected, unweighted, connected graph given by a binary
adjacency matrix. It is immutable after construction and can be shared
freely between concurrent simulation realizations.
"""
from __future__ import annotations

from collections import deque

import numpy as np


class TopologyError(ValueError):
    """Raised when an adjacency matrix or tree specification is invalid."""


class Topology:
    """Immutable physical graph.

    Attributes:
        n: number of nodes.
        adjacency: symmetric n x n 0/1 matrix with zero diagonal (read-only).
        degrees: per-node physical degree, ``degrees[i] = sum_j adjacency[i, j]``.
        edges: sorted list of edges ``(i, j)`` with ``i < j``.
        neighbors: tuple of per-node neighbor tuples.
    """

    def __init__(self, adjacency) -> None:
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise TopologyError(f"adjacency must be square, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise TopologyError("adjacency entries must be 0 or 1")
        a = a.astype(np.int8)
        if (a != a.T).any():
            raise TopologyError("adjacency must be symmetric")
        if np.diagonal(a).any():
            raise TopologyError("adjacency diagonal must be zero")
        n = a.shape[0]
        if n < 1:
            raise TopologyError("topology needs at least one node")

        self.n = n
        self.adjacency = a
        self.adjacency.setflags(write=False)
        self.degrees = a.sum(axis=1).astype(int)
        self.neighbors = tuple(tuple(int(j) for j in np.flatnonzero(a[i])) for i in range(n))
        self.edges = [(i, j) for i in range(n) for j in self.neighbors[i] if i < j]
        # Plain nested lists: scalar A[i][j] lookups in the simulator hot loop
        # are several times faster than ndarray indexing.
        self._rows = [[int(x) for x in row] for row in a]

        if not self._connected():
            raise TopologyError("graph must be connected")

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in self.neighbors[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return len(seen) == self.n

    def are_neighbors(self, i: int, j: int) -> bool:
        return bool(self._rows[i][j])

    def bfs_levels(self) -> list[int]:
        """Distance of every node from node 0 (the root for tree layouts)."""
        level = [-1] * self.n
        level[0] = 0
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in self.neighbors[i]:
                if level[j] < 0:
                    level[j] = level[i] + 1
                    queue.append(j)
        return level

    def __eq__(self, other) -> bool:
        return isinstance(other, Topology) and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency.tobytes()))

    def __repr__(self) -> str:
        return f"Topology(n={self.n}, edges={len(self.edges)})"


def from_adjacency(matrix) -> Topology:
    """Build a validated topology from a square 0/1 matrix."""
    return Topology(matrix)


def tree_topology(branching: int, levels: int) -> Topology:
    """Balanced tree with ``levels`` levels and ``branching ** l`` nodes in level l.

    Every node in level l < levels - 1 connects to ``branching`` nodes in level
    l + 1; every node below the root connects to exactly one parent. Nodes are
    indexed breadth-first from the root (node 0), so all nodes of a level are
    contiguous and per-level reporting is deterministic.
    """
    if branching < 2:
        raise TopologyError(f"branching factor must be >= 2, got {branching}")
    if levels < 1:
        raise TopologyError(f"level count must be >= 1, got {levels}")

    n = (branching**levels - 1) // (branching - 1)
    a = np.zeros((n, n), dtype=np.int8)
    offset = 0  # index of the first node in the current level
    for level in range(levels - 1):
        width = branching**level
        child_offset = offset + width
        for p in range(width):
            parent = offset + p
            for c in range(branching):
                child = child_offset + p * branching + c
                a[parent, child] = 1
                a[child, parent] = 1
        offset = child_offset
    return Topology(a)


def read_adjacency_file(path) -> Topology:
    """Read a topology from a plain-text file: first line n, then n rows of 0/1."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise TopologyError(f"{path}: empty adjacency file")
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise TopologyError(f"{path}: non-integer token in adjacency file") from exc
    n = values[0]
    if n < 1:
        raise TopologyError(f"{path}: node count must be >= 1, got {n}")
    if len(values) != 1 + n * n:
        raise TopologyError(f"{path}: expected {n * n} matrix entries, got {len(values) - 1}")
    matrix = np.array(values[1:], dtype=np.int8).reshape(n, n)
    return Topology(matrix)
