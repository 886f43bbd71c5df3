"""Mutable network state: addressed qubits and the entangled links between them.

Qubits are identified by a static three-tuple address ``(i, j, m)``: the node
``i`` holding the qubit, the physical neighbor ``j`` it generates entanglement
with, and a slot index ``m`` in ``0..r-1`` distinguishing parallel qubits for
the same neighbor. The generation partner is fixed in hardware, but after
swaps a qubit may hold a link to any node, so the current peer is a property
of the link occupying the qubit, not of the address.

A state instance is owned by exactly one simulation realization; none of the
operations here are thread-safe on a shared instance. The internal indexes
(per-node occupancy entries, per-pair link lists, per-edge free-slot bitmasks)
exist so that the per-time-step protocol work never scans the full link table;
``audit`` cross-checks them all.
"""
from __future__ import annotations

from dataclasses import dataclass

from .topology import Topology

Address = tuple[int, int, int]


class StateError(ValueError):
    """Raised when a state operation violates its preconditions."""


@dataclass(slots=True, eq=False)
class EntangledLink:
    """One bipartite entangled link.

    ``age`` counts completed time steps since creation. ``elementary_count``
    is the number of elementary links swapped into this link (1 for a link
    produced directly by generation). Links compare by identity.
    """

    link_id: int
    qubit_a: Address
    qubit_b: Address
    age: int
    elementary_count: int

    @property
    def node_a(self) -> int:
        return self.qubit_a[0]

    @property
    def node_b(self) -> int:
        return self.qubit_b[0]

    def nodes(self) -> tuple[int, int]:
        """Endpoint node pair, smaller index first."""
        a, b = self.qubit_a[0], self.qubit_b[0]
        return (a, b) if a < b else (b, a)


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class NetworkState:
    """Live configuration of entangled links on a fixed topology.

    Attributes:
        topology: the physical graph (shared, immutable).
        qubits_per_neighbor: r, qubit slots per node per physical neighbor.
        clock: current time step.
        links: mapping link_id -> :class:`EntangledLink`.
    """

    def __init__(self, topology: Topology, qubits_per_neighbor: int) -> None:
        if qubits_per_neighbor < 1:
            raise StateError(f"qubits_per_neighbor must be >= 1, got {qubits_per_neighbor}")
        self.topology = topology
        self.qubits_per_neighbor = qubits_per_neighbor
        self.clock = 0
        self.links: dict[int, EntangledLink] = {}
        self._next_id = 0
        # Occupied-qubit entries per node, each a mutable [address, peer, link]
        # triple (peer = node at the link's far end, kept current across swaps).
        self._node_entries: list[list[list]] = [[] for _ in range(topology.n)]
        # Links per unordered node pair, for consumption and the metrics.
        self._pair_links: dict[tuple[int, int], list[EntangledLink]] = {}
        # One occupancy bitmask per directed edge side; bit m set means qubit
        # (i, j, m) is busy. Lookup via topology edge order: side 0 holds the
        # lower-indexed node's qubits.
        self._edge_side: dict[tuple[int, int], int] = {}
        for index, (i, j) in enumerate(topology.edges):
            self._edge_side[(i, j)] = 2 * index
            self._edge_side[(j, i)] = 2 * index + 1
        self._masks: list[int] = [0] * (2 * len(topology.edges))
        self._full_mask = (1 << qubits_per_neighbor) - 1

    # -- queries ---------------------------------------------------------

    def qubit_capacity(self, node: int) -> int:
        return self.qubits_per_neighbor * int(self.topology.degrees[node])

    def is_free(self, address: Address) -> bool:
        i, j, m = address
        side = self._edge_side.get((i, j))
        if side is None:
            raise StateError(f"{address} is not a qubit address of this topology")
        if not 0 <= m < self.qubits_per_neighbor:
            raise StateError(f"slot index {m} outside 0..{self.qubits_per_neighbor - 1}")
        return not self._masks[side] >> m & 1

    def occupied_qubits(self, node: int) -> tuple[Address, ...]:
        """Occupied qubit addresses at ``node`` (copy; order not meaningful)."""
        return tuple(entry[0] for entry in self._node_entries[node])

    def occupied_count(self, node: int) -> int:
        return len(self._node_entries[node])

    def link_at(self, address: Address) -> EntangledLink:
        for entry in self._node_entries[address[0]]:
            if entry[0] == address:
                return entry[2]
        raise StateError(f"qubit {address} is not occupied")

    def peer_node(self, address: Address) -> int:
        """Node at the far end of the link occupying ``address``."""
        for entry in self._node_entries[address[0]]:
            if entry[0] == address:
                return entry[1]
        raise StateError(f"qubit {address} is not occupied")

    def link_count(self, i: int, j: int) -> int:
        """Number of entangled links whose endpoint nodes are {i, j}."""
        if i == j:
            raise StateError(f"link_count needs two distinct nodes, got {i}")
        links = self._pair_links.get(_pair(i, j))
        return len(links) if links else 0

    def links_between(self, i: int, j: int) -> list[EntangledLink]:
        return list(self._pair_links.get(_pair(i, j), ()))

    def shared_pairs(self):
        """Iterate over ``((a, b), count)`` for node pairs sharing >= 1 link."""
        for pair, links in self._pair_links.items():
            yield pair, len(links)

    def free_pair_slot(self, i: int, j: int) -> int | None:
        """Lowest slot index m with both (i, j, m) and (j, i, m) free, or None."""
        side = self._edge_side.get((i, j))
        if side is None:
            raise StateError(f"nodes {i} and {j} are not physical neighbors")
        combined = self._masks[side] | self._masks[side ^ 1]
        if combined == self._full_mask:
            return None
        lowest = ~combined & (combined + 1)
        return lowest.bit_length() - 1

    # -- mutations -------------------------------------------------------

    def _install(self, qubit_a: Address, qubit_b: Address, age: int, count: int) -> EntangledLink:
        link = EntangledLink(self._next_id, qubit_a, qubit_b, age, count)
        self._next_id += 1
        self.links[link.link_id] = link
        a, b = qubit_a[0], qubit_b[0]
        self._node_entries[a].append([qubit_a, b, link])
        self._node_entries[b].append([qubit_b, a, link])
        self._pair_links.setdefault(_pair(a, b), []).append(link)
        masks = self._masks
        masks[self._edge_side[qubit_a[:2]]] |= 1 << qubit_a[2]
        masks[self._edge_side[qubit_b[:2]]] |= 1 << qubit_b[2]
        return link

    def _uninstall(self, link: EntangledLink) -> None:
        del self.links[link.link_id]
        for address in (link.qubit_a, link.qubit_b):
            entries = self._node_entries[address[0]]
            for position, entry in enumerate(entries):
                if entry[2] is link:
                    entries[position] = entries[-1]
                    entries.pop()
                    break
        pair = link.nodes()
        links = self._pair_links[pair]
        links.remove(link)
        if not links:
            del self._pair_links[pair]
        masks = self._masks
        masks[self._edge_side[link.qubit_a[:2]]] &= ~(1 << link.qubit_a[2])
        masks[self._edge_side[link.qubit_b[:2]]] &= ~(1 << link.qubit_b[2])

    def _merge(
        self,
        far_a: Address,
        link_a: EntangledLink,
        far_b: Address,
        link_b: EntangledLink,
        age: int,
        count: int,
    ) -> EntangledLink:
        """Replace two links by one spanning their far-end qubits (inputs validated)."""
        self._uninstall(link_a)
        self._uninstall(link_b)
        return self._install(far_a, far_b, age=age, count=count)

    def create_elementary_link(self, i: int, j: int, m: int) -> EntangledLink:
        """Create a fresh elementary link on qubits (i, j, m) and (j, i, m)."""
        if not self.topology.are_neighbors(i, j):
            raise StateError(f"nodes {i} and {j} are not physical neighbors")
        if not 0 <= m < self.qubits_per_neighbor:
            raise StateError(f"slot index {m} outside 0..{self.qubits_per_neighbor - 1}")
        for address in ((i, j, m), (j, i, m)):
            if self._masks[self._edge_side[address[:2]]] >> m & 1:
                raise StateError(f"qubit {address} already occupied")
        return self._install((i, j, m), (j, i, m), age=0, count=1)

    def remove_link(self, link_id: int) -> None:
        """Discard a link and free its two qubits."""
        link = self.links.get(link_id)
        if link is None:
            raise StateError(f"unknown link id {link_id}")
        self._uninstall(link)

    def merge_links(self, at_node: int, link_id1: int, link_id2: int) -> EntangledLink:
        """Swap at ``at_node``: consume links a-b and b-c, produce a-c.

        The new link occupies the two far-end qubits, takes the age of the
        older input, and adds the inputs' elementary counts.
        """
        if link_id1 == link_id2:
            raise StateError("cannot merge a link with itself")
        try:
            link1, link2 = self.links[link_id1], self.links[link_id2]
        except KeyError as exc:
            raise StateError(f"unknown link id {exc.args[0]}") from None

        def far_qubit(link: EntangledLink) -> Address:
            if link.qubit_a[0] == at_node:
                return link.qubit_b
            if link.qubit_b[0] == at_node:
                return link.qubit_a
            raise StateError(f"link {link.link_id} is not incident to node {at_node}")

        far1, far2 = far_qubit(link1), far_qubit(link2)
        if far1[0] == far2[0]:
            raise StateError(f"merge would loop: both far ends at node {far1[0]}")
        age = max(link1.age, link2.age)
        count = link1.elementary_count + link2.elementary_count
        return self._merge(far1, link1, far2, link2, age=age, count=count)

    def advance_ages(self) -> None:
        """End of time slot: every link ages by one step, the clock advances."""
        for link in self.links.values():
            link.age += 1
        self.clock += 1

    # -- diagnostics -----------------------------------------------------

    def snapshot(self) -> str:
        """One line per link: ``node_a node_b age elementary_count``."""
        lines = []
        for link_id in sorted(self.links):
            link = self.links[link_id]
            a, b = link.nodes()
            lines.append(f"{a} {b} {link.age} {link.elementary_count}")
        return "\n".join(lines)

    def audit(self) -> None:
        """Verify every internal index; raises StateError on any violation."""
        seen_addresses = set()
        for link in self.links.values():
            if link.qubit_a[0] == link.qubit_b[0]:
                raise StateError(f"link {link.link_id} loops at node {link.qubit_a[0]}")
            if link.age < 0 or link.elementary_count < 1:
                raise StateError(f"link {link.link_id} has bad age/count")
            for address in (link.qubit_a, link.qubit_b):
                if address in seen_addresses:
                    raise StateError(f"qubit {address} held by two links")
                seen_addresses.add(address)
                side = self._edge_side.get(address[:2])
                if side is None or not 0 <= address[2] < self.qubits_per_neighbor:
                    raise StateError(f"link {link.link_id} holds invalid address {address}")
                if not self._masks[side] >> address[2] & 1:
                    raise StateError(f"occupancy bit clear for busy qubit {address}")
        for side, mask in enumerate(self._masks):
            expected = 0
            edge = self.topology.edges[side // 2]
            node, gen_peer = edge if side % 2 == 0 else edge[::-1]
            for m in range(self.qubits_per_neighbor):
                if (node, gen_peer, m) in seen_addresses:
                    expected |= 1 << m
            if mask != expected:
                raise StateError(f"occupancy mask stale for qubits ({node}, {gen_peer}, *)")
        entry_total = 0
        for node, entries in enumerate(self._node_entries):
            entry_total += len(entries)
            if len(entries) > self.qubit_capacity(node):
                raise StateError(f"node {node} exceeds its qubit budget")
            for address, peer, link in entries:
                if address[0] != node or address not in seen_addresses:
                    raise StateError(f"node {node} lists stale qubit {address}")
                if self.links.get(link.link_id) is not link:
                    raise StateError(f"node {node} lists dead link {link.link_id}")
                far = link.qubit_b if link.qubit_a == address else link.qubit_a
                if far[0] != peer:
                    raise StateError(f"peer cache wrong for qubit {address}")
        if entry_total != 2 * len(self.links):
            raise StateError("occupied-qubit count does not equal twice the link count")
        pair_total = 0
        for pair, links in self._pair_links.items():
            if not links:
                raise StateError(f"empty pair entry {pair}")
            pair_total += len(links)
            for link in links:
                if self.links.get(link.link_id) is not link or link.nodes() != pair:
                    raise StateError(f"pair index stale for link {link.link_id}")
        if pair_total != len(self.links):
            raise StateError("pair index does not cover all links")
