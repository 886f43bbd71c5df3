"""Steady-state results without swaps, via a birth-death chain on link counts.

With swapping disabled, the number of links shared by a pair of physical
neighbors is a random walk on {0, .., r}: it moves up when generation succeeds
and the slot's consumption does not fire, down in the opposite case, and the
boundary states lose one of the two moves (no generation at r because all
qubit pairs are busy, no consumption at 0 because there is nothing to consume).
The closed forms below are the stationary quantities of that walk; they assume
the cutoff is large enough that links are consumed well before expiring
(cutoff > r and cutoff >> 1/p_cons).

``stationary_distribution`` solves the balance equations numerically and is
deliberately independent of the closed forms, so each can check the other.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BirthDeathChain:
    """Random walk on {0, .., r} with per-state forward/backward probabilities.

    ``forward[w]`` moves w -> w+1, ``backward[w]`` moves w -> w-1, and the
    remainder is the holding probability. Boundary entries ``forward[r]`` and
    ``backward[0]`` must be zero.
    """

    forward: tuple[float, ...]
    backward: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.forward) != len(self.backward) or len(self.forward) < 2:
            raise ValueError("forward/backward must have equal length >= 2")
        if self.forward[-1] != 0.0 or self.backward[0] != 0.0:
            raise ValueError("boundary transitions must be zero")
        for p, q in zip(self.forward, self.backward):
            if p < 0 or q < 0 or p + q > 1:
                raise ValueError("transition probabilities must be in [0,1] with p+q <= 1")

    @property
    def top(self) -> int:
        """Highest state r."""
        return len(self.forward) - 1

    def transition_matrix(self) -> np.ndarray:
        r = self.top
        matrix = np.zeros((r + 1, r + 1))
        for w in range(r + 1):
            p, q = self.forward[w], self.backward[w]
            if w < r:
                matrix[w, w + 1] = p
            if w > 0:
                matrix[w, w - 1] = q
            matrix[w, w] = 1.0 - p - q
        return matrix


def noswap_chain(p_gen: float, p_cons: float, r: int) -> BirthDeathChain:
    """Link-count walk for one physical edge under generation and consumption."""
    _check_prob(p_gen, "p_gen")
    _check_prob(p_cons, "p_cons")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    up = p_gen * (1.0 - p_cons)
    down = p_cons * (1.0 - p_gen)
    forward = (up,) * r + (0.0,)
    backward = (0.0,) + (down,) * (r - 1) + (p_cons,)
    return BirthDeathChain(forward, backward)


def stationary_distribution(chain: BirthDeathChain) -> np.ndarray:
    """Stationary distribution by solving the balance equations directly.

    Degenerate chains do not fail: with no upward moves the walk settles at 0,
    with no downward moves at the top state, matching a protocol started from
    the empty configuration.
    """
    r = chain.top
    if all(p == 0.0 for p in chain.forward):
        out = np.zeros(r + 1)
        out[0] = 1.0
        return out
    if all(q == 0.0 for q in chain.backward):
        out = np.zeros(r + 1)
        out[r] = 1.0
        return out
    matrix = chain.transition_matrix()
    system = np.vstack([matrix.T - np.eye(r + 1), np.ones(r + 1)])
    rhs = np.zeros(r + 2)
    rhs[-1] = 1.0
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    solution[np.abs(solution) < 1e-15] = 0.0
    return solution / solution.sum()


def _check_prob(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _closed_form_applies(p_gen: float, p_cons: float) -> bool:
    return 0.0 < p_gen < 1.0 and 0.0 < p_cons < 1.0 and p_gen != p_cons


def noswap_distribution(p_gen: float, p_cons: float, r: int) -> np.ndarray:
    """Closed-form stationary distribution of the link-count walk.

    The unnormalized weights are geometric, rho**w with
    rho = p_gen (1 - p_cons) / (p_cons (1 - p_gen)), except the top state,
    which carries an extra factor (1 - p_gen). The weights are anchored at
    whichever end dominates before normalizing, so large r neither overflows
    nor underflows. Parameter combinations where the geometric form degenerates
    (p_gen = p_cons, or either probability at 0 or 1) are delegated to
    :func:`stationary_distribution`.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not _closed_form_applies(p_gen, p_cons):
        return stationary_distribution(noswap_chain(p_gen, p_cons, r))
    rho = p_gen * (1.0 - p_cons) / (p_cons * (1.0 - p_gen))
    if rho >= 1.0:
        weights = np.array([rho ** (w - r) for w in range(r)] + [1.0 - p_gen])
    else:
        weights = np.array([rho**w for w in range(r)] + [rho**r * (1.0 - p_gen)])
    return weights / weights.sum()


def noswap_v(d: float, p_gen: float, p_cons: float, r: int) -> float:
    """Expected steady-state virtual neighborhood size without swaps.

    Equals d * Pr[the walk is nonzero]; proportional to the physical degree d
    and otherwise independent of the topology.
    """
    if not _closed_form_applies(p_gen, p_cons):
        pi = stationary_distribution(noswap_chain(p_gen, p_cons, max(r, 1)))
        return d * (1.0 - pi[0])
    lam = p_cons * (1.0 - p_gen) / (p_gen * (1.0 - p_cons))
    if lam <= 1.0:
        lam_r = lam**r
        num = 1.0 - ((1.0 - p_cons) / (1.0 - p_gen)) * lam_r
        den = 1.0 - (p_cons / p_gen) * lam_r
    else:
        # lam**r overflows for large r; divide through by lam**r instead.
        inv = lam ** (-r)
        num = inv - (1.0 - p_cons) / (1.0 - p_gen)
        den = inv - p_cons / p_gen
    return d * num / den


def noswap_k(d: float, p_gen: float, p_cons: float, r: int) -> float:
    """Expected steady-state virtual node degree without swaps (d * E[walk])."""
    if not _closed_form_applies(p_gen, p_cons):
        pi = stationary_distribution(noswap_chain(p_gen, p_cons, max(r, 1)))
        return d * float(np.arange(len(pi)) @ pi)
    lam = p_cons * (1.0 - p_gen) / (p_gen * (1.0 - p_cons))
    scale = p_cons * (1.0 - p_cons) / (p_gen - p_cons)
    if lam <= 1.0:
        lam_r = lam**r
        num = r + scale * (lam_r - 1.0)
        den = p_gen - p_cons * lam_r
    else:
        inv = lam ** (-r)
        num = r * inv + scale * (1.0 - inv)
        den = p_gen * inv - p_cons
    return d * p_gen * num / den


def noswap_limits(d: float, p_gen: float, p_cons: float) -> tuple[float, float]:
    """Large-resource limits (r -> infinity) of the no-swap metrics.

    When generation outpaces consumption the neighborhood saturates at the
    physical degree and the expected degree grows without bound (returned as
    ``inf``); in the opposite regime both converge to finite values.
    """
    if not _closed_form_applies(p_gen, p_cons):
        raise ValueError("limits require p_gen != p_cons, both strictly inside (0, 1)")
    if p_cons < p_gen:
        return d, math.inf
    rho = p_gen * (1.0 - p_cons) / (p_cons * (1.0 - p_gen))
    return d * rho, d * p_gen * (1.0 - p_cons) / (p_cons - p_gen)


def warn_if_outside_validity(cutoff: int, qubits_per_neighbor: int, p_cons: float) -> bool:
    """Warn when simulated data is compared against the closed forms unfairly.

    The closed forms ignore cutoff expiry, which is accurate only when the
    cutoff exceeds r and is much larger than the mean consumption interval.
    Returns True when a warning was issued.
    """
    mean_interval = math.inf if p_cons == 0 else 1.0 / p_cons
    if cutoff <= qubits_per_neighbor or cutoff < 10.0 * mean_interval:
        warnings.warn(
            f"cutoff {cutoff} is too small for the no-swap closed forms "
            f"(need cutoff > r={qubits_per_neighbor} and cutoff >> 1/p_cons={mean_interval:.3g}); "
            "expect systematic deviations",
            stacklevel=2,
        )
        return True
    return False
