"""Derivative of the return time to a target state under coupled column moves.

Row ``i`` is perturbed by moving mass ``c_i`` from a donor column into the
target column::

    P[i, target] += c_i,    P[i, donor] -= c_i

so ``dP[i, donor] / dP[i, target] = -1``. Writing ``m`` for the hitting times
to the target, ``Q`` for ``P`` without the target row/column and
``N = (I - Q)^{-1}``, the derivative at ``c = 0`` is

    d mu / d c_target = -m[donor]
    d mu / d c_j      = -m[donor] * (P[target, others] @ N)[j]     (j != target)

Both are strictly negative for irreducible chains: pushing mass towards the
target always shortens the expected return.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg
from .chain import TransitionMatrix, require_ergodic, validate
from .errors import InfeasibleStep, SameState, ValidationError
from .hitting import expected_hitting_times, expected_return_time, others


@dataclass(frozen=True)
class CouplingSpec:
    """Pair of columns: mass flows from ``donor`` into ``target``."""

    target: int
    donor: int

    def __post_init__(self):
        if self.target == self.donor:
            raise SameState(self.target, "target and donor")

    def check(self, matrix: TransitionMatrix) -> "CouplingSpec":
        matrix.check_state(self.target)
        matrix.check_state(self.donor)
        return self


@dataclass(frozen=True, eq=False)
class SensitivityVector:
    """``d_mu[i]`` is the derivative of the target's return time w.r.t. ``c_i``."""

    spec: CouplingSpec
    d_mu: np.ndarray

    def __getitem__(self, i):
        return self.d_mu[i]

    def tolist(self) -> list[float]:
        return self.d_mu.tolist()


def _assemble(matrix, spec, visits, m_donor) -> SensitivityVector:
    d_mu = np.empty(matrix.n)
    d_mu[spec.target] = -m_donor
    d_mu[others(matrix.n, spec.target)] = -m_donor * visits
    d_mu.setflags(write=False)
    return SensitivityVector(spec, d_mu)


def coupled_derivative_direct(matrix: TransitionMatrix, spec: CouplingSpec) -> SensitivityVector:
    """Exact sensitivities via one extra linear solve, ``(I - Q)^T w = P[target, others]``.

    ``w[j]`` is the expected number of visits to ``j`` during one excursion
    away from the target.
    """
    spec.check(matrix)
    require_ergodic(matrix)
    s = spec.target
    keep = others(matrix.n, s)
    m = expected_hitting_times(matrix, s).hit
    A = np.eye(len(keep)) - matrix.entries[np.ix_(keep, keep)]
    visits = _linalg.solve(A, matrix.entries[s, keep], transpose=True)
    return _assemble(matrix, spec, visits, float(m[spec.donor]))


def coupled_derivative_series(matrix: TransitionMatrix, spec: CouplingSpec, terms: int) -> SensitivityVector:
    """Same quantity with ``N`` replaced by the partial sum ``I + Q + ... + Q^(terms-1)``.

    The ``target`` entry is exact for any ``terms >= 1``; the others converge
    geometrically at the rate of the spectral radius of ``Q``.
    """
    if terms < 1:
        raise ValidationError(f"terms must be >= 1, got {terms}")
    spec.check(matrix)
    require_ergodic(matrix)
    s = spec.target
    keep = others(matrix.n, s)
    Q = matrix.entries[np.ix_(keep, keep)]
    m = expected_hitting_times(matrix, s).hit
    v = matrix.entries[s, keep].copy()
    visits = np.zeros_like(v)
    for _ in range(terms):
        visits += v
        v = v @ Q
    return _assemble(matrix, spec, visits, float(m[spec.donor]))


def perturb_row(matrix: TransitionMatrix, spec: CouplingSpec, row: int, c: float) -> TransitionMatrix:
    """Move ``c`` (possibly negative) from donor to target in a single row."""
    E = matrix.entries.copy()
    E[row, spec.target] += c
    E[row, spec.donor] -= c
    return validate(E, 1e-12, labels=matrix.labels)


def finite_difference_check(matrix: TransitionMatrix, spec: CouplingSpec, row: int, h: float = 1e-6) -> float:
    """Central difference ``[mu(c_row = +h) - mu(c_row = -h)] / 2h``.

    Both stencil points must stay inside the simplex, which needs
    ``P[row, donor] >= h`` and ``P[row, target] >= h``.

    Raises
    ------
    InfeasibleStep
        If a stencil point would have a negative entry.
    NotIrreducible
        If either stencil matrix is reducible.
    """
    spec.check(matrix)
    row = matrix.check_state(row)
    P = matrix.entries
    if P[row, spec.donor] < h:
        raise InfeasibleStep(row, float(P[row, spec.donor]), h)
    if P[row, spec.target] < h:
        raise InfeasibleStep(row, float(P[row, spec.target]), h)
    up = expected_return_time(perturb_row(matrix, spec, row, h), spec.target)
    down = expected_return_time(perturb_row(matrix, spec, row, -h), spec.target)
    return (up - down) / (2.0 * h)


def fd_feasible(matrix: TransitionMatrix, spec: CouplingSpec, row: int, h: float = 1e-6) -> bool:
    P = matrix.entries
    return bool(P[row, spec.donor] >= h and P[row, spec.target] >= h)


def fd_tolerance(value: float) -> float:
    """Agreement budget between analytic and central-difference derivatives."""
    return max(1e-4, 1e-3 * abs(value))
