"""Finite Markov chain model: validated transition matrices and their structure.

A chain is a row-stochastic ``n x n`` matrix ``P`` with ``P[i, j]`` the
probability of moving from state ``i`` to state ``j``. States are 0-based
integers. :func:`validate` is the public constructor; every analysis routine
in the package takes the resulting :class:`TransitionMatrix`.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, reduce
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    InvalidState,
    NegativeEntry,
    NotIrreducible,
    NotSquare,
    RowSumViolation,
    TooSmall,
    ValidationError,
)

DEFAULT_TOLERANCE = 1e-9
_ROW_SLACK = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class StructureReport:
    """Graph structure of the positive-entry digraph ``i -> j iff P[i, j] > 0``.

    ``period`` is ``None`` when the chain is reducible.
    """

    irreducible: bool
    aperiodic: bool
    period: int | None
    communicating_classes: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "aperiodic": self.aperiodic,
            "period": self.period,
            "communicating_classes": [list(c) for c in self.communicating_classes],
        }


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Validated row-stochastic matrix. Build instances with :func:`validate`.

    The stored array is a read-only copy, so instances are safe to share.
    """

    entries: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx):
        return self.entries[idx]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self):
        return f"TransitionMatrix(n={self.n}, entries={self.entries.tolist()!r})"

    @cached_property
    def structure(self) -> StructureReport:
        return structure(self)

    def check_state(self, s) -> int:
        """Return ``s`` as an int after checking it indexes a state."""
        if isinstance(s, (bool, np.bool_)) or not isinstance(s, (int, np.integer)):
            raise InvalidState(s, self.n)
        if not 0 <= s < self.n:
            raise InvalidState(s, self.n)
        return int(s)


def validate(raw_entries, tolerance: float = DEFAULT_TOLERANCE, labels: Sequence[str] | None = None) -> TransitionMatrix:
    """Check and normalise a raw matrix into a :class:`TransitionMatrix`.

    Entries in ``[-tolerance, 0)`` are treated as floating-point dust and set
    to zero. Rows whose sums are within ``tolerance`` of 1 are divided by
    their sum (and the largest entry nudged by a few ulps where that makes the
    float sum exactly 1); anything further off is rejected. Re-validating a
    validated matrix returns it unchanged.

    Raises
    ------
    TooSmall, NotSquare, NegativeEntry, RowSumViolation
    """
    try:
        arr = np.array(raw_entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix is not a rectangular array of numbers: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotSquare(arr.shape)
    n = arr.shape[0]
    if n < 2:
        raise TooSmall(n)
    if not np.all(np.isfinite(arr)):
        i, j = map(int, np.argwhere(~np.isfinite(arr))[0])
        raise ValidationError(f"non-finite entry p({i},{j}) = {arr[i, j]!r}")
    for i in range(n):
        for j in range(n):
            if arr[i, j] < -tolerance:
                raise NegativeEntry(i, j, float(arr[i, j]))
    arr[arr < 0] = 0.0
    sums = arr.sum(axis=1)
    for i, total in enumerate(sums):
        if abs(total - 1.0) > tolerance:
            raise RowSumViolation(i, float(total))
    for i in range(n):
        arr[i] = _exact_row(arr[i])
    if labels is not None and len(labels) != n:
        raise ValidationError(f"expected {n} labels, got {len(labels)}")
    return TransitionMatrix(arr, labels)


def _exact_row(row: np.ndarray) -> np.ndarray:
    # drive the floating-point row sum to exactly 1.0 so re-validation is a no-op
    if abs(row.sum() - 1.0) <= _ROW_SLACK:
        return row
    row = row / row.sum()
    k = int(np.argmax(row))
    base = up = down = row[k]
    for _ in range(32):
        up, down = np.nextafter(up, np.inf), np.nextafter(down, -np.inf)
        for cand in (up, down):
            row[k] = cand
            if row.sum() == 1.0:
                return row
    row[k] = base
    return row


def _period(adj: list[list[int]]) -> int:
    # gcd of level[u] + 1 - level[v] over all edges of a BFS from state 0
    level = [-1] * len(adj)
    level[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    diffs = (level[u] + 1 - level[v] for u in range(len(adj)) for v in adj[u])
    return reduce(math.gcd, diffs, 0)


def structure(matrix: TransitionMatrix) -> StructureReport:
    """Communicating classes, irreducibility and period of ``matrix``."""
    positive = matrix.entries > 0
    n_comp, comp = connected_components(csr_matrix(positive), directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for state, c in enumerate(comp):
        groups.setdefault(int(c), []).append(state)
    classes = tuple(sorted(tuple(g) for g in groups.values()))
    irreducible = n_comp == 1
    period = None
    if irreducible:
        adj = [list(np.flatnonzero(row)) for row in positive]
        period = _period(adj)
    return StructureReport(
        irreducible=irreducible,
        aperiodic=irreducible and period == 1,
        period=period,
        communicating_classes=classes,
    )


def require_ergodic(matrix: TransitionMatrix) -> StructureReport:
    """Return the structure report, raising :class:`NotIrreducible` if needed.

    Only irreducibility is required; periodic chains still have a unique,
    strictly positive invariant distribution.
    """
    report = matrix.structure
    if not report.irreducible:
        raise NotIrreducible(report.communicating_classes)
    return report


# --- chain JSON ------------------------------------------------------------

def chain_from_dict(doc, tolerance: float = DEFAULT_TOLERANCE) -> TransitionMatrix:
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ValidationError('chain document must be an object with a "matrix" field')
    rows = doc["matrix"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValidationError('"matrix" must be a list of rows')
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ValidationError(f"entry ({i},{j}) is not a number: {x!r}")
    return validate(rows, tolerance, labels=doc.get("labels"))


def chain_to_dict(matrix: TransitionMatrix) -> dict:
    doc: dict = {}
    if matrix.labels is not None:
        doc["labels"] = list(matrix.labels)
    doc["matrix"] = matrix.entries.tolist()
    return doc


def load_chain(path) -> TransitionMatrix:
    """Read a chain JSON file ``{"labels": [...], "matrix": [[...], ...]}``."""
    return chain_from_dict(read_json(path))


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
