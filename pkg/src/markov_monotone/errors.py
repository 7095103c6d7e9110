"""Exception hierarchy for chain analysis.

Validation problems derive from :class:`ValidationError` (a ``ValueError``),
so callers that only care about "bad input" can catch one type. The CLI maps
these families onto its exit codes.
"""

from __future__ import annotations


class MarkovError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MarkovError, ValueError):
    """Input does not describe a valid object."""


class TooSmall(ValidationError):
    def __init__(self, n: int):
        super().__init__(f"need at least 2 states, got {n}")
        self.n = n


class NotSquare(ValidationError):
    def __init__(self, shape):
        super().__init__(f"transition matrix must be square, got shape {tuple(shape)}")
        self.shape = tuple(shape)


class NegativeEntry(ValidationError):
    def __init__(self, i: int, j: int, value: float):
        super().__init__(f"negative entry p({i},{j}) = {value!r}")
        self.i, self.j, self.value = i, j, value


class RowSumViolation(ValidationError):
    def __init__(self, i: int, total: float):
        super().__init__(f"row {i} sums to {total!r}, not 1")
        self.i, self.total = i, total


class InvalidState(ValidationError):
    def __init__(self, state, n: int):
        super().__init__(f"state index {state!r} outside [0, {n})")
        self.state, self.n = state, n


class SameState(ValidationError):
    def __init__(self, state: int, what: str = "states"):
        super().__init__(f"{what} must differ, both are {state}")
        self.state = state


class DimensionMismatch(ValidationError):
    def __init__(self, a: int, b: int):
        super().__init__(f"dimension mismatch: {a} vs {b}")
        self.a, self.b = a, b


class InfeasibleAmount(ValidationError):
    def __init__(self, i: int, amount: float, available: float):
        super().__init__(
            f"row {i}: amount {amount!r} not in [0, p(i, donor) = {available!r}]"
        )
        self.i, self.amount, self.available = i, amount, available


class InfeasibleStep(ValidationError):
    def __init__(self, row: int, available: float, h: float):
        super().__init__(
            f"row {row}: p(row, donor) = {available!r} < step {h!r}; stencil leaves the simplex"
        )
        self.row, self.available, self.h = row, available, h


class InfeasibleFloor(ValidationError):
    def __init__(self, n: int, min_entry: float):
        super().__init__(f"entry floor {min_entry!r} infeasible for n = {n} (need 0 <= floor < 1/n)")
        self.n, self.min_entry = n, min_entry


class NotIrreducible(MarkovError):
    def __init__(self, classes):
        self.classes = [tuple(c) for c in classes]
        super().__init__(f"chain is not irreducible; communicating classes: {self.classes}")


class NotAperiodic(MarkovError):
    def __init__(self, period):
        super().__init__(f"power iteration needs an aperiodic chain (period = {period})")
        self.period = period


class NoConvergence(MarkovError):
    def __init__(self, iterations: int):
        super().__init__(f"no convergence after {iterations} iterations")
        self.iterations = iterations


class SingularSystem(MarkovError):
    """A linear system that should be nonsingular was not (numerically)."""


class ConditionsViolated(MarkovError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"monotonicity conditions violated at {len(self.violations)} entries")


class CapExceeded(MarkovError):
    def __init__(self, cap: int):
        super().__init__(f"trajectory exceeded the step cap of {cap}")
        self.cap = cap
