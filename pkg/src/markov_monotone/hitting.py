"""Expected first hitting times to a target state and the expected return time.

For target ``s`` let ``Q`` be ``P`` with row and column ``s`` removed. The
hitting times ``m[j] = E_j[min{t >= 0 : X_t = s}]`` for ``j != s`` solve

    m[j] = 1 + sum_{k != s} P[j, k] m[k],   i.e.  (I - Q) m = 1,

and the return time is ``1 + sum_{k != s} P[s, k] m[k]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg
from .chain import TransitionMatrix, require_ergodic


@dataclass(frozen=True, eq=False)
class HittingProfile:
    """Hitting times to ``target``.

    ``hit[target]`` is 0 by convention; the return time lives in
    ``return_time``.
    """

    target: int
    hit: np.ndarray
    return_time: float

    def to_dict(self) -> dict:
        return {"target": self.target, "hit": self.hit.tolist(), "return_time": self.return_time}


def others(n: int, s: int) -> np.ndarray:
    """Indices ``0..n-1`` without ``s``."""
    return np.delete(np.arange(n), s)


def _reduced_system(matrix: TransitionMatrix, s0: int):
    keep = others(matrix.n, s0)
    Q = matrix.entries[np.ix_(keep, keep)]
    return keep, np.eye(len(keep)) - Q


def expected_hitting_times(matrix: TransitionMatrix, s0: int) -> HittingProfile:
    """Expected steps to first reach ``s0`` from every state.

    Examples
    --------
    >>> from markov_monotone.chain import validate
    >>> prof = expected_hitting_times(validate([[0.5, 0.5], [0.25, 0.75]]), 0)
    >>> prof.hit.tolist(), prof.return_time
    ([0.0, 4.0], 3.0)
    """
    s0 = matrix.check_state(s0)
    require_ergodic(matrix)
    keep, A = _reduced_system(matrix, s0)
    m = _linalg.solve(A, np.ones(len(keep)))
    hit = np.zeros(matrix.n)
    hit[keep] = m
    hit.setflags(write=False)
    return_time = 1.0 + float(matrix.entries[s0, keep] @ m)
    return HittingProfile(target=s0, hit=hit, return_time=return_time)


def expected_return_time(matrix: TransitionMatrix, s0: int) -> float:
    """Expected number of steps to come back to ``s0`` starting from ``s0``."""
    return expected_hitting_times(matrix, s0).return_time


def hitting_residual(matrix: TransitionMatrix, profile: HittingProfile) -> float:
    """Max-norm residual of ``(I - Q) m = 1`` for a computed profile."""
    keep, A = _reduced_system(matrix, profile.target)
    return float(np.max(np.abs(A @ profile.hit[keep] - 1.0)))
