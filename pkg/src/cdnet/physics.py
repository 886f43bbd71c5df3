"""Werner-state fidelity model: decay in memory, swap composition, cutoff bound.

Every entangled link is a Werner state, so a single number (its fidelity F,
or equivalently its Werner parameter w = (4F - 1)/3) fully describes it.
Storage and swaps act multiplicatively on the Werner parameter, which is what
makes a closed-form cutoff bound possible: fixing the maximum age and the
maximum number of elementary links per long link guarantees a minimum
delivered fidelity without tracking fidelities at run time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

FULLY_MIXED_FIDELITY = 0.25


def werner_parameter(fidelity: float) -> float:
    """Werner parameter w = (4F - 1) / 3 of a Werner state with fidelity F."""
    return (4.0 * fidelity - 1.0) / 3.0


def fidelity_from_werner(w: float) -> float:
    """Inverse of :func:`werner_parameter`."""
    return (3.0 * w + 1.0) / 4.0


def _check_fidelity(f: float, name: str = "fidelity") -> None:
    if not FULLY_MIXED_FIDELITY <= f <= 1.0:
        raise ValueError(f"{name} must lie in [0.25, 1], got {f}")


def decayed_fidelity(fidelity: float, dt: float, coherence_time: float) -> float:
    """Fidelity after storing a Werner state for ``dt`` time steps.

    Depolarizing memory noise pulls the state toward the fully mixed state:
    F(t + dt) = 1/4 + (F(t) - 1/4) exp(-dt / T), where T is the memory decay
    constant ``coherence_time``.
    """
    _check_fidelity(fidelity)
    if dt < 0:
        raise ValueError(f"elapsed time must be >= 0, got {dt}")
    if coherence_time <= 0:
        raise ValueError(f"coherence time must be > 0, got {coherence_time}")
    return FULLY_MIXED_FIDELITY + (fidelity - FULLY_MIXED_FIDELITY) * math.exp(-dt / coherence_time)


def swap_fidelity(f1: float, f2: float) -> float:
    """Fidelity of the Werner state produced by swapping two Werner inputs.

    F_out = F1 F2 + (1 - F1)(1 - F2) / 3; never exceeds min(F1, F2).
    """
    _check_fidelity(f1, "f1")
    _check_fidelity(f2, "f2")
    return f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0


@dataclass(frozen=True)
class FidelityParams:
    """Hardware and application constants that determine the cutoff time.

    Attributes:
        coherence_time: exponential decay constant of stored fidelity (time steps).
        f_new: fidelity of newly generated elementary links, in (0.25, 1].
        f_app: minimum fidelity applications accept, in (0.25, f_new].
        max_swap_distance: maximum number of elementary links combinable into
            one long link (>= 1).
    """

    coherence_time: float
    f_new: float
    f_app: float
    max_swap_distance: int

    def __post_init__(self) -> None:
        if self.coherence_time <= 0:
            raise ValueError(f"coherence_time must be > 0, got {self.coherence_time}")
        if not FULLY_MIXED_FIDELITY < self.f_app <= self.f_new <= 1.0:
            raise ValueError(
                f"need 0.25 < f_app <= f_new <= 1, got f_app={self.f_app}, f_new={self.f_new}"
            )
        if self.max_swap_distance < 1:
            raise ValueError(f"max_swap_distance must be >= 1, got {self.max_swap_distance}")


def max_cutoff(params: FidelityParams) -> float:
    """Largest real storage age compatible with the application fidelity.

    A link assembled from at most ``max_swap_distance`` elementary links, each
    stored for at most t time steps, still has fidelity >= f_app provided

        t <= -T ln( 3 / (4 f_new - 1) * ((4 f_app - 1) / 3)^(1 / M) ).

    Returns that bound; raises ValueError when it is <= 0 (the application
    fidelity is unreachable even for fresh links, so no storage is allowed).
    """
    ratio = (3.0 / (4.0 * params.f_new - 1.0)) * (
        (4.0 * params.f_app - 1.0) / 3.0
    ) ** (1.0 / params.max_swap_distance)
    bound = -params.coherence_time * math.log(ratio)
    if bound <= 0.0:
        raise ValueError(
            f"no positive cutoff exists for f_new={params.f_new}, f_app={params.f_app}, "
            f"max_swap_distance={params.max_swap_distance}"
        )
    return bound


def default_cutoff(params: FidelityParams) -> int:
    """Integer cutoff: the largest whole number of time steps within the bound.

    Time is slotted, so the simulator uses floor(max_cutoff). Published plots
    for the same parameters occasionally quote a value 1-2 steps away from
    this convention; the bound itself is what :func:`max_cutoff` returns.
    """
    return math.floor(max_cutoff(params))


def worst_case_link_fidelity(age: float, elementary_count: int, params: FidelityParams) -> float:
    """Lower bound on the fidelity of a link of a given age and composition.

    A link built from ``elementary_count`` elementary links, each at most
    ``age`` time steps old, has Werner parameter at least
    (w_new * exp(-age / T))^m, since swaps multiply Werner parameters and the
    output of a swap inherits the age of its oldest input.

    Provided for reporting and verification; the protocol itself never
    inspects fidelities, it relies on the cutoff guarantee.
    """
    if age < 0:
        raise ValueError(f"age must be >= 0, got {age}")
    if elementary_count < 1:
        raise ValueError(f"elementary_count must be >= 1, got {elementary_count}")
    w = werner_parameter(params.f_new) * math.exp(-age / params.coherence_time)
    return fidelity_from_werner(w**elementary_count)
