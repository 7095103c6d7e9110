"""Invariant distribution of an irreducible chain, three independent ways.

``stationary_linear`` solves ``pi P = pi`` directly, ``stationary_power``
iterates ``x <- x P`` (aperiodic chains only), and
``stationary_via_return_time`` uses ``pi[s] = 1 / E_s[return time to s]``.
Each serves as an oracle for the others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg
from .chain import TransitionMatrix, require_ergodic
from .errors import NoConvergence, NotAperiodic, ValidationError


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over states.

    ``iterations`` is filled in by :func:`stationary_power` only.
    """

    probs: np.ndarray
    iterations: int | None = None

    def __post_init__(self):
        p = np.array(self.probs, dtype=float, copy=True)
        if p.ndim != 1:
            raise ValidationError("distribution must be a vector")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError(f"not a probability vector: {p.tolist()}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __getitem__(self, idx):
        return self.probs[idx]

    def __len__(self):
        return len(self.probs)

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def tolist(self) -> list[float]:
        return self.probs.tolist()

    def __repr__(self):
        return f"Distribution({self.probs.tolist()!r})"


def _normalised(x: np.ndarray) -> np.ndarray:
    return x / x.sum()


def stationary_linear(matrix: TransitionMatrix) -> Distribution:
    """Solve ``(P^T - I) pi = 0`` with the last equation replaced by ``sum(pi) = 1``.

    Raises
    ------
    NotIrreducible
        If the chain has more than one communicating class.
    SingularSystem
        If the bordered system is numerically singular.
    """
    require_ergodic(matrix)
    n = matrix.n
    A = matrix.entries.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = _linalg.solve(A, b)
    # roundoff can leave tiny negatives only for degenerate input; clip before renormalising
    pi = np.clip(pi, 0.0, None)
    return Distribution(_normalised(pi))


def stationary_power(matrix: TransitionMatrix, tol: float = 1e-12, max_iters: int = 100_000) -> Distribution:
    """Power iteration from the uniform vector until the L1 step is ``<= tol``.

    Refuses periodic chains, whose iterates oscillate instead of converging.
    """
    report = require_ergodic(matrix)
    if not report.aperiodic:
        raise NotAperiodic(report.period)
    P = matrix.entries
    x = np.full(matrix.n, 1.0 / matrix.n)
    for it in range(1, max_iters + 1):
        nxt = x @ P
        step = np.abs(nxt - x).sum()
        x = nxt
        if step <= tol:
            return Distribution(_normalised(x), iterations=it)
    raise NoConvergence(max_iters)


def stationary_via_return_time(matrix: TransitionMatrix, s0: int) -> float:
    """``pi[s0]`` computed as the reciprocal of the expected return time to ``s0``."""
    from .hitting import expected_return_time

    return 1.0 / expected_return_time(matrix, s0)
