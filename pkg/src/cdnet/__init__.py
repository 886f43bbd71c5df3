"""Simulation and analysis toolkit for continuous entanglement distribution.

Library layout:

- :mod:`cdnet.topology` - physical graphs, balanced-tree generator.
- :mod:`cdnet.physics` - Werner-state fidelity model and the cutoff bound.
- :mod:`cdnet.netstate` - addressed qubits and the live link configuration.
- :mod:`cdnet.protocol` - the single-random-swap protocol, one slot at a time.
- :mod:`cdnet.metrics` - virtual neighborhood size and virtual node degree.
- :mod:`cdnet.analytic` - no-swap closed forms and the birth-death solver.
- :mod:`cdnet.stats` - Monte Carlo runs and steady-state detection.
- :mod:`cdnet.pareto` - frontier and quality-of-service selection.
- :mod:`cdnet.cli` - the ``cdnet`` experiment runner.
"""

from .analytic import (
    BirthDeathChain,
    noswap_chain,
    noswap_distribution,
    noswap_k,
    noswap_limits,
    noswap_v,
    stationary_distribution,
)
from .metrics import MetricSnapshot, measure, virtual_degree, virtual_neighborhood_size
from .netstate import EntangledLink, NetworkState, StateError
from .pareto import ParetoPoint, optimal_region, pareto_frontier, qos_filter
from .physics import (
    FidelityParams,
    decayed_fidelity,
    default_cutoff,
    max_cutoff,
    swap_fidelity,
    werner_parameter,
    worst_case_link_fidelity,
)
from .protocol import (
    SimulationParams,
    apply_cutoffs,
    attempt_generation,
    consume,
    perform_swaps,
    remove_long_links,
    srs_step,
)
from .stats import (
    MonteCarloRun,
    SampleSeries,
    SteadyStateResult,
    detect_steady_state,
    run_realizations,
    steady_state_estimate,
)
from .topology import Topology, TopologyError, from_adjacency, read_adjacency_file, tree_topology

__version__ = "0.1.0"

__all__ = [
    "BirthDeathChain",
    "EntangledLink",
    "FidelityParams",
    "MetricSnapshot",
    "MonteCarloRun",
    "NetworkState",
    "ParetoPoint",
    "SampleSeries",
    "SimulationParams",
    "StateError",
    "SteadyStateResult",
    "Topology",
    "TopologyError",
    "apply_cutoffs",
    "attempt_generation",
    "consume",
    "decayed_fidelity",
    "default_cutoff",
    "detect_steady_state",
    "from_adjacency",
    "max_cutoff",
    "measure",
    "noswap_chain",
    "noswap_distribution",
    "noswap_k",
    "noswap_limits",
    "noswap_v",
    "optimal_region",
    "pareto_frontier",
    "perform_swaps",
    "qos_filter",
    "read_adjacency_file",
    "remove_long_links",
    "run_realizations",
    "srs_step",
    "stationary_distribution",
    "steady_state_estimate",
    "swap_fidelity",
    "tree_topology",
    "virtual_degree",
    "virtual_neighborhood_size",
    "werner_parameter",
    "worst_case_link_fidelity",
]
