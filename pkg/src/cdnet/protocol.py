"""The single-random-swap (SRS) protocol: one synchronous time-step transition.

Each time slot applies, in order: cutoff removal, entanglement generation on
every physical link, at most one randomly chosen swap attempt per node,
classical information exchange (a no-op here, since every operation already
sees the global state), removal of links assembled from too many elementary
links, and consumption of one link per sharing node pair. Ages advance at the
end of the slot, after metrics are read.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .netstate import NetworkState
from .physics import FidelityParams, max_cutoff
from .topology import Topology


@dataclass(frozen=True)
class SimulationParams:
    """Full parameter tuple of one protocol configuration.

    ``cutoff`` is the integer storage limit in time steps; when omitted it is
    resolved to the largest integer within the fidelity bound of
    :func:`cdnet.physics.max_cutoff`. An explicit value must still satisfy
    that bound.

    ``swap_attempt_prob`` is the protocol knob (a node that found a valid pair
    of links attempts the swap with this probability); ``p_swap`` is the
    hardware success probability of an attempted swap.
    """

    topology: Topology
    p_gen: float
    f_new: float
    p_swap: float
    qubits_per_neighbor: int
    coherence_time: float
    max_swap_distance: int
    p_cons: float
    f_app: float
    swap_attempt_prob: float
    cutoff: int | None = None

    def __post_init__(self) -> None:
        for name in ("p_gen", "p_swap", "p_cons", "swap_attempt_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.qubits_per_neighbor < 1:
            raise ValueError(f"qubits_per_neighbor must be >= 1, got {self.qubits_per_neighbor}")
        bound = math.floor(max_cutoff(self.fidelity_params))
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", bound)
        elif not 1 <= self.cutoff <= bound:
            raise ValueError(
                f"cutoff must lie in 1..{bound} for these fidelity parameters, got {self.cutoff}"
            )

    @property
    def fidelity_params(self) -> FidelityParams:
        return FidelityParams(
            coherence_time=self.coherence_time,
            f_new=self.f_new,
            f_app=self.f_app,
            max_swap_distance=self.max_swap_distance,
        )

    def new_state(self) -> NetworkState:
        return NetworkState(self.topology, self.qubits_per_neighbor)


def apply_cutoffs(state: NetworkState, cutoff: int) -> NetworkState:
    """Remove every link whose age has reached the cutoff."""
    expired = [link for link in state.links.values() if link.age >= cutoff]
    for link in expired:
        state._uninstall(link)
    return state


def attempt_generation(state: NetworkState, p_gen: float, rng) -> NetworkState:
    """One generation attempt per physical edge that still has a free qubit pair.

    A successful attempt creates a single fresh elementary link on the lowest
    free slot; edges with no free pair are skipped.
    """
    masks = state._masks
    full = state._full_mask
    rand = rng.random
    side = 0
    for i, j in state.topology.edges:
        combined = masks[side] | masks[side + 1]
        side += 2
        if combined != full and rand() < p_gen:
            m = (~combined & (combined + 1)).bit_length() - 1
            state._install((i, j, m), (j, i, m), age=0, count=1)
    return state


def perform_swaps(state: NetworkState, swap_attempt_prob: float, p_swap: float, rng) -> NetworkState:
    """Every node attempts at most one swap, in a fresh random node order.

    A node picks one of its occupied qubits uniformly at random (its link's
    far end being some node j), then picks uniformly among its other occupied
    qubits whose far-end node k is neither j nor a physical neighbor of j. If
    no such qubit exists the node does nothing this slot. Otherwise, with
    probability ``swap_attempt_prob`` the swap is attempted: it merges the two
    links with probability ``p_swap`` and discards both with probability
    ``1 - p_swap``.

    Nodes act sequentially in the sampled order, so a link already consumed by
    an earlier node this slot is never offered to a later one. The order is
    resampled every call, which makes the serialization symmetric across nodes
    in expectation.
    """
    if swap_attempt_prob == 0.0:
        return state  # no node may attempt a swap; skip the sampling work
    rand = rng.random
    adjacency_rows = state.topology._rows
    node_entries = state._node_entries
    order = list(range(state.topology.n))
    for position in range(len(order) - 1, 0, -1):  # Fisher-Yates, fresh each slot
        other = int((position + 1) * rand())
        order[position], order[other] = order[other], order[position]
    for node in order:
        entries = node_entries[node]
        if not entries:
            continue
        first = entries[int(len(entries) * rand())]
        peer1 = first[1]
        forbidden = adjacency_rows[peer1]
        candidates = [e for e in entries if e[1] != peer1 and not forbidden[e[1]]]
        if not candidates:
            continue
        second = candidates[int(len(candidates) * rand())]
        if rand() < swap_attempt_prob:
            link1, link2 = first[2], second[2]
            if rand() < p_swap:
                far1 = link1.qubit_b if link1.qubit_a[0] == node else link1.qubit_a
                far2 = link2.qubit_b if link2.qubit_a[0] == node else link2.qubit_a
                state._merge(
                    far1,
                    link1,
                    far2,
                    link2,
                    age=max(link1.age, link2.age),
                    count=link1.elementary_count + link2.elementary_count,
                )
            else:
                state._uninstall(link1)
                state._uninstall(link2)
    return state


def remove_long_links(state: NetworkState, max_swap_distance: int) -> NetworkState:
    """Remove links assembled from more than ``max_swap_distance`` elementary links."""
    too_long = [
        link for link in state.links.values() if link.elementary_count > max_swap_distance
    ]
    for link in too_long:
        state._uninstall(link)
    return state


def consume(
    state: NetworkState, p_cons: float, rng, policy: str = "oldest"
) -> list[tuple[int, int]]:
    """Background applications: each sharing pair consumes one link with prob p_cons.

    The default policy removes the pair's oldest link (ties broken toward the
    earliest-created), which keeps the freshest stock in memory; ``random``
    picks uniformly instead, as a sensitivity check. Returns the node pairs
    that consumed this slot.
    """
    if p_cons == 0.0:
        return []
    if policy not in ("oldest", "random"):
        raise ValueError(f"unknown consumption policy {policy!r}")
    consumed = []
    rand = rng.random
    pair_links = state._pair_links
    for pair in sorted(pair_links):
        if rand() < p_cons:
            links = pair_links[pair]
            if policy == "oldest":
                chosen = links[0]
                for link in links:
                    if link.age > chosen.age or (
                        link.age == chosen.age and link.link_id < chosen.link_id
                    ):
                        chosen = link
            else:
                chosen = links[int(len(links) * rand())]
            state._uninstall(chosen)
            consumed.append(pair)
    return consumed


def srs_step(state: NetworkState, params: SimulationParams, rng, observe=None) -> NetworkState:
    """Advance the state by one full protocol time slot.

    ``observe``, when given, is called with the state after consumption and
    before ages advance; that is the per-slot metric sampling point.
    """
    apply_cutoffs(state, params.cutoff)
    attempt_generation(state, params.p_gen, rng)
    perform_swaps(state, params.swap_attempt_prob, params.p_swap, rng)
    # Classical communication: instantaneous global knowledge, nothing to do.
    remove_long_links(state, params.max_swap_distance)
    consume(state, params.p_cons, rng)
    if observe is not None:
        observe(state)
    state.advance_ages()
    return state
