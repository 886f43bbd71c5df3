"""Monte Carlo orchestration, sample statistics, and steady-state detection.

Realizations are independent: each owns its network state and its own RNG
stream, derived from the base seed and the realization index through a
splittable seed construction. Per-step metric samples are accumulated as
integer sums and sums of squares, so the aggregate is exact and identical
whatever the degree of parallelism.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .metrics import measure
from .protocol import SimulationParams, srs_step

DEFAULT_HORIZON_CUTOFFS = 10
DEFAULT_WINDOW_CUTOFFS = 2


@dataclass
class SampleSeries:
    """Per-time sample mean and standard deviation of one bounded process."""

    times: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    n_realizations: int
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")


@dataclass
class SteadyStateResult:
    """Outcome of the steady-state search on one series.

    ``start_index`` is the first time index of the detected steady state
    (0 means steady from the start); it is None when the search aborted.
    ``standard_error`` is twice the final-time sample standard deviation over
    sqrt(N), the error-bar convention used throughout.
    """

    start_index: int | None
    aborted: bool
    estimate: float
    standard_error: float


@dataclass
class MonteCarloRun:
    """Per-node sample series for both metrics over one batch of realizations."""

    neighborhood: list[SampleSeries]
    degree: list[SampleSeries]
    horizon: int
    n_realizations: int
    base_seed: int


def realization_rng(base_seed: int, index: int) -> random.Random:
    """Independent, reproducible RNG stream for one realization."""
    sequence = np.random.SeedSequence(entropy=base_seed, spawn_key=(index,))
    return random.Random(int.from_bytes(sequence.generate_state(4, np.uint32).tobytes(), "little"))


def _simulate_block(params: SimulationParams, horizon: int, base_seed: int, start: int, count: int):
    """Run realizations [start, start+count) and return integer metric sums."""
    n = params.topology.n
    sums = [np.zeros((horizon, n), dtype=np.int64) for _ in range(4)]
    sum_v, sumsq_v, sum_k, sumsq_k = sums
    for index in range(start, start + count):
        rng = realization_rng(base_seed, index)
        state = params.new_state()
        v_buf: list[int] = []
        k_buf: list[int] = []

        def observe(current) -> None:
            snap = measure(current)
            v_buf.extend(snap.v)
            k_buf.extend(snap.k)

        for _ in range(horizon):
            srs_step(state, params, rng, observe)
        v_arr = np.array(v_buf, dtype=np.int64).reshape(horizon, n)
        k_arr = np.array(k_buf, dtype=np.int64).reshape(horizon, n)
        sum_v += v_arr
        sumsq_v += v_arr * v_arr
        sum_k += k_arr
        sumsq_k += k_arr * k_arr
    return sums


def _series_from_sums(total, total_sq, n_real, horizon, lower, upper) -> list[SampleSeries]:
    times = np.arange(horizon)
    mean = total / n_real
    if n_real > 1:
        variance = (total_sq - n_real * mean**2) / (n_real - 1)
        std = np.sqrt(np.maximum(variance, 0.0))
    else:
        std = np.zeros_like(mean)
    return [
        SampleSeries(
            times=times,
            mean=mean[:, i],
            std=std[:, i],
            n_realizations=n_real,
            lower=0.0,
            upper=float(upper[i]),
        )
        for i in range(mean.shape[1])
    ]


def run_realizations(
    params: SimulationParams,
    n_realizations: int,
    horizon: int | None = None,
    base_seed: int = 0,
    jobs: int = 1,
) -> MonteCarloRun:
    """Simulate N independent realizations from the empty initial state.

    Records both metrics for every node at every time step (sampled after
    consumption, before ages advance). ``horizon`` defaults to ten cutoff
    times. ``jobs`` > 1 shards realizations over worker processes; the result
    is bit-identical regardless.
    """
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be >= 1, got {n_realizations}")
    if horizon is None:
        horizon = DEFAULT_HORIZON_CUTOFFS * params.cutoff
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")

    if jobs > 1 and n_realizations > 1:
        chunks = []
        n_chunks = min(n_realizations, jobs * 4)
        base, extra = divmod(n_realizations, n_chunks)
        start = 0
        for c in range(n_chunks):
            count = base + (1 if c < extra else 0)
            chunks.append((start, count))
            start += count
        totals = None
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_simulate_block, params, horizon, base_seed, start, count)
                for start, count in chunks
            ]
            for future in futures:
                block = future.result()
                if totals is None:
                    totals = block
                else:
                    for acc, part in zip(totals, block):
                        acc += part
    else:
        totals = _simulate_block(params, horizon, base_seed, 0, n_realizations)

    sum_v, sumsq_v, sum_k, sumsq_k = totals
    degrees = params.topology.degrees
    n_nodes = params.topology.n
    v_bound = [min(params.qubits_per_neighbor * int(d), n_nodes) for d in degrees]
    k_bound = [params.qubits_per_neighbor * int(d) for d in degrees]
    return MonteCarloRun(
        neighborhood=_series_from_sums(sum_v, sumsq_v, n_realizations, horizon, 0.0, v_bound),
        degree=_series_from_sums(sum_k, sumsq_k, n_realizations, horizon, 0.0, k_bound),
        horizon=horizon,
        n_realizations=n_realizations,
        base_seed=base_seed,
    )


def detect_steady_state(
    series: SampleSeries, window: int, inflate_range: float = 1.0
) -> SteadyStateResult:
    """Locate the onset of the steady state in a sample-mean series.

    The tolerance is eps = (b - a) / sqrt(N), from the bounds of the process;
    two times are compatible when the overlap of their +-eps confidence
    intervals, 2 eps - |mean_i - mean_j|, is at least 1.5 eps. The last
    ``window`` points must be pairwise compatible, else the search aborts
    (reported via the result, not an exception). The window is then grown
    backward until the first incompatible point; the steady state starts just
    after it. A constant series therefore yields start_index 0, even when
    N is so large that eps is effectively zero.

    ``inflate_range`` scales the bound range, for slowly converging means
    whose tiny errors would otherwise trip the compatibility check.
    """
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    means = series.mean
    length = len(means)
    if length < window:
        raise ValueError(f"series of length {length} shorter than window {window}")
    eps = inflate_range * (series.upper - series.lower) / math.sqrt(series.n_realizations)
    estimate = float(means[-1])
    standard_error = 2.0 * float(series.std[-1]) / math.sqrt(series.n_realizations)

    tail = means[length - window :]
    low = float(tail.min())
    high = float(tail.max())
    if 2.0 * eps - (high - low) < 1.5 * eps:
        return SteadyStateResult(None, True, estimate, standard_error)

    start = 0
    for k in range(length - window - 1, -1, -1):
        value = float(means[k])
        # Worst pairwise gap against the grown window is to one of its extremes.
        if 2.0 * eps - max(high - value, value - low) < 1.5 * eps:
            start = k + 1
            break
        low = min(low, value)
        high = max(high, value)
    return SteadyStateResult(start, False, estimate, standard_error)


def steady_state_estimate(series: SampleSeries, result: SteadyStateResult) -> tuple[float, float]:
    """Final-time sample mean and its error bar, once a steady state was found."""
    if result.aborted:
        raise ValueError("no steady state was detected; the estimate is not meaningful")
    return result.estimate, result.standard_error


def series_to_csv(run: MonteCarloRun, stream, header_lines: list[str] | None = None) -> None:
    """Write per-node series as CSV rows time,node,mean_v,std_v,mean_k,std_k."""
    for line in header_lines or []:
        stream.write(f"# {line}\n")
    stream.write("time,node,mean_v,std_v,mean_k,std_k\n")
    horizon = run.horizon
    for t in range(horizon):
        for node, (v_series, k_series) in enumerate(zip(run.neighborhood, run.degree)):
            stream.write(
                f"{t},{node},{v_series.mean[t]!r},{v_series.std[t]!r},"
                f"{k_series.mean[t]!r},{k_series.std[t]!r}\n"
            )
