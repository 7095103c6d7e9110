"""Mass-moving perturbations of a chain and the monotonicity hypothesis.

An :class:`ElementaryPerturbation` moves ``c[i]`` from one donor column into
the target column in every row ``i``. Any pair ``(P, P')`` where column
``s0`` only grows and every other column only shrinks splits into one
elementary move per donor column (:func:`decompose`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import TransitionMatrix, validate
from .errors import (
    ConditionsViolated,
    DimensionMismatch,
    InfeasibleAmount,
    ValidationError,
)
from .sensitivity import CouplingSpec

AMOUNT_TOL = 1e-15
CONDITION_TOL = 1e-15
STRICT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ElementaryPerturbation:
    spec: CouplingSpec
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=float, copy=True)
        if c.ndim != 1:
            raise ValidationError("amounts must be a vector")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def target(self) -> int:
        return self.spec.target

    @property
    def donor(self) -> int:
        return self.spec.donor

    def is_strict(self, tol: float = STRICT_TOL) -> bool:
        return bool(np.any(self.c > tol))

    def to_dict(self) -> dict:
        return {"target": self.target, "donor": self.donor, "c": self.c.tolist()}

    @classmethod
    def from_dict(cls, doc) -> "ElementaryPerturbation":
        try:
            target, donor, c = doc["target"], doc["donor"], doc["c"]
        except (KeyError, TypeError):
            raise ValidationError('perturbation needs "target", "donor" and "c" fields') from None
        for name, v in (("target", target), ("donor", donor)):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if not isinstance(c, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in c):
            raise ValidationError('"c" must be a list of numbers')
        return cls(CouplingSpec(target, donor), c)

    def __repr__(self):
        return f"ElementaryPerturbation(target={self.target}, donor={self.donor}, c={self.c.tolist()!r})"


@dataclass(frozen=True)
class TheoremConditionReport:
    """Whether ``P'`` dominates ``P`` in column ``s0`` and is dominated elsewhere.

    ``violations`` holds ``(row, column, p, p_prime)`` tuples.
    """

    holds: bool
    strict: bool
    violations: list = field(default_factory=list)
    strict_rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "strict": self.strict,
            "violations": [list(v) for v in self.violations],
            "strict_rows": list(self.strict_rows),
        }


def apply_elementary(matrix: TransitionMatrix, pert: ElementaryPerturbation) -> TransitionMatrix:
    """Return ``P`` with ``c[i]`` moved from the donor to the target in each row.

    Raises
    ------
    InfeasibleAmount
        If some ``c[i]`` is negative or exceeds ``P[i, donor]``.
    """
    pert.spec.check(matrix)
    if len(pert.c) != matrix.n:
        raise DimensionMismatch(len(pert.c), matrix.n)
    t, d = pert.target, pert.donor
    P = matrix.entries
    for i, ci in enumerate(pert.c):
        if ci < 0 or ci > P[i, d] + AMOUNT_TOL:
            raise InfeasibleAmount(i, float(ci), float(P[i, d]))
    E = P.copy()
    E[:, t] += pert.c
    E[:, d] -= pert.c
    E[:, d] = np.maximum(E[:, d], 0.0)
    return validate(E, 1e-12, labels=matrix.labels)


def check_theorem_conditions(p: TransitionMatrix, p_prime: TransitionMatrix, s0: int) -> TheoremConditionReport:
    """Compare two chains entrywise against the monotonicity hypothesis for ``s0``."""
    if p.n != p_prime.n:
        raise DimensionMismatch(p.n, p_prime.n)
    s0 = p.check_state(s0)
    A, B = p.entries, p_prime.entries
    violations = []
    strict_rows = []
    for i in range(p.n):
        for j in range(p.n):
            a, b = float(A[i, j]), float(B[i, j])
            if j == s0:
                if b < a - CONDITION_TOL:
                    violations.append((i, j, a, b))
                elif b > a + STRICT_TOL:
                    strict_rows.append(i)
            elif b > a + CONDITION_TOL:
                violations.append((i, j, a, b))
    holds = not violations
    return TheoremConditionReport(
        holds=holds,
        strict=holds and bool(strict_rows),
        violations=violations,
        strict_rows=strict_rows,
    )


def decompose(p: TransitionMatrix, p_prime: TransitionMatrix, s0: int) -> list[ElementaryPerturbation]:
    """Split ``P -> P'`` into elementary moves, one per donor column, ascending.

    Columns whose amounts are all zero are omitted, so ``decompose(P, P)``
    is empty.

    Raises
    ------
    ConditionsViolated
        If ``(P, P')`` does not satisfy the hypothesis.
    """
    report = check_theorem_conditions(p, p_prime, s0)
    if not report.holds:
        raise ConditionsViolated(report.violations)
    moves = []
    for d in range(p.n):
        if d == s0:
            continue
        c = np.maximum(p.entries[:, d] - p_prime.entries[:, d], 0.0)
        if np.any(c > 0):
            moves.append(ElementaryPerturbation(CouplingSpec(s0, d), c))
    return moves


def compose(matrix: TransitionMatrix, moves) -> TransitionMatrix:
    """Apply ``moves`` left to right."""
    for pert in moves:
        matrix = apply_elementary(matrix, pert)
    return matrix
