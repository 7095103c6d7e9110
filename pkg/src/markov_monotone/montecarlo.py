"""Trajectory simulation used as an empirical oracle for return/hitting times.

Random numbers come from SplitMix64 streams, one per trajectory. Trajectory
``k`` under seed ``s`` uses the stream whose initial state is
``mix(mix(s) ^ k)``, where ``mix`` is the SplitMix64 output finaliser; its
``t``-th draw is ``mix(state + (t + 1) * 0x9E3779B97F4A7C15)``, and the top 53
bits become a uniform double in ``[0, 1)``. Because each draw depends only on
``(seed, k, t)``, estimates do not depend on the order or grouping in which
trajectories are advanced. All trajectories are stepped together as numpy
arrays.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .chain import TransitionMatrix, require_ergodic
from .errors import CapExceeded, SameState, ValidationError

STEP_CAP = 10_000_000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=np.uint64))
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, trajectories: np.ndarray) -> np.ndarray:
    """Initial SplitMix64 state for each trajectory index."""
    base = _mix(np.array([seed & _MASK64], dtype=np.uint64))
    return _mix(base ^ np.asarray(trajectories, dtype=np.uint64))


def uniforms(keys: np.ndarray, step: int | np.ndarray) -> np.ndarray:
    """Draw number ``step`` (0-based) of each stream in ``keys``."""
    counter = (np.atleast_1d(np.asarray(step, dtype=np.uint64)) + np.uint64(1)) * _GOLDEN
    bits = _mix(np.asarray(keys, dtype=np.uint64) + counter)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SimulationEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def z_score(self, exact: float) -> float | None:
        """``(mean - exact) / std_error``; ``None`` when the spread is zero."""
        if self.std_error == 0.0:
            return 0.0 if self.mean == exact else None
        return (self.mean - exact) / self.std_error

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "samples": self.samples, "seed": self.seed}


def _cumulative_rows(P: np.ndarray) -> np.ndarray:
    cum = np.cumsum(P, axis=1)
    for i, row in enumerate(P):
        last = np.flatnonzero(row > 0)[-1]
        cum[i, last:] = 1.0
    return cum


def _next_states(cum: np.ndarray, states: np.ndarray, u: np.ndarray) -> np.ndarray:
    # inverse CDF: first j with u < cum[state, j]
    return (cum[states] <= u[:, None]).sum(axis=1)


def _first_passage_times(matrix, start: int, target: int, trajectories: int, seed: int, cap: int) -> np.ndarray:
    cum = _cumulative_rows(matrix.entries)
    keys = stream_keys(seed, np.arange(trajectories))
    times = np.zeros(trajectories, dtype=np.int64)
    live = np.arange(trajectories)
    states = np.full(trajectories, start, dtype=np.int64)
    step = 0
    while live.size:
        if step >= cap:
            raise CapExceeded(cap)
        states = _next_states(cum, states, uniforms(keys[live], step))
        step += 1
        arrived = states == target
        times[live[arrived]] = step
        live = live[~arrived]
        states = states[~arrived]
    return times


def _estimate(times: np.ndarray, seed: int) -> SimulationEstimate:
    n = len(times)
    mean = float(times.mean())
    se = float(times.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SimulationEstimate(mean=mean, std_error=se, samples=n, seed=seed)


def _check_count(trajectories: int):
    if trajectories < 1:
        raise ValidationError(f"trajectories must be >= 1, got {trajectories}")


def simulate_return_time(
    matrix: TransitionMatrix, s0: int, trajectories: int, seed: int, cap: int = STEP_CAP
) -> SimulationEstimate:
    """Mean of ``min{t >= 1 : X_t = s0}`` over trajectories started at ``s0``."""
    _check_count(trajectories)
    s0 = matrix.check_state(s0)
    require_ergodic(matrix)
    return _estimate(_first_passage_times(matrix, s0, s0, trajectories, seed, cap), seed)


def simulate_hitting_time(
    matrix: TransitionMatrix, start: int, s0: int, trajectories: int, seed: int, cap: int = STEP_CAP
) -> SimulationEstimate:
    """Mean steps to first reach ``s0`` from ``start != s0``."""
    _check_count(trajectories)
    start = matrix.check_state(start)
    s0 = matrix.check_state(s0)
    if start == s0:
        raise SameState(s0, "start and target")
    require_ergodic(matrix)
    return _estimate(_first_passage_times(matrix, start, s0, trajectories, seed, cap), seed)


def simulate_occupancy(matrix: TransitionMatrix, steps: int, seed: int, start: int = 0) -> np.ndarray:
    """Fraction of time spent in each state along one trajectory of ``steps`` moves."""
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    state = matrix.check_state(start)
    cum = _cumulative_rows(matrix.entries).tolist()
    key = stream_keys(seed, np.array([0]))
    draws = uniforms(np.repeat(key, steps), np.arange(steps)).tolist()
    counts = [0] * matrix.n
    for u in draws:
        state = bisect.bisect_right(cum[state], u)
        counts[state] += 1
    return np.asarray(counts, dtype=float) / steps
