"""Randomised end-to-end verification of the monotonicity property.

Each trial draws a chain with every entry above a floor, picks a target
state and a strict elementary perturbation, and checks that the target's
invariant probability strictly increases, along with the cross-module
identities (return-time reciprocity, sensitivity signs, finite differences,
decompose/compose round trips). Failures are collected as data; a failure's
``trial`` descriptor is enough to replay it with :func:`run_trial`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .chain import TransitionMatrix, validate
from .errors import InfeasibleFloor, MarkovError, ValidationError
from .hitting import expected_return_time
from .perturbation import (
    ElementaryPerturbation,
    apply_elementary,
    check_theorem_conditions,
    compose,
    decompose,
)
from .sensitivity import (
    CouplingSpec,
    coupled_derivative_direct,
    fd_feasible,
    fd_tolerance,
    finite_difference_check,
)
from .stationary import stationary_linear

HEADROOM = 0.9
MAX_RESAMPLES = 100
AMOUNT_STRICT_TOL = 1e-12
RECIPROCITY_TOL = 1e-8
ROUND_TRIP_TOL = 1e-14


@dataclass(frozen=True)
class TrialConfig:
    trials: int = 1000
    n_min: int = 2
    n_max: int = 8
    min_entry: float = 0.01
    seed: int = 42
    strictness_tolerance: float = 1e-12

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if not 2 <= self.n_min <= self.n_max:
            raise ValidationError(f"need 2 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if not 0 <= self.min_entry < 1.0 / self.n_max:
            raise InfeasibleFloor(self.n_max, self.min_entry)


@dataclass
class VerificationReport:
    trials_run: int
    failures: list = field(default_factory=list)
    min_gap: float | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "trials": self.trials_run,
            "failures": self.failures,
            "min_gap": self.min_gap,
        }


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & ((1 << 64) - 1), index])


def random_ergodic_chain(n: int, min_entry: float, rng: np.random.Generator) -> TransitionMatrix:
    """Rows uniform on the simplex, mixed with the uniform row to enforce the floor.

    ``row = (1 - n * min_entry) * w + min_entry`` keeps every entry at least
    ``min_entry`` and the row sum at 1.
    """
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    if not 0 <= min_entry < 1.0 / n:
        raise InfeasibleFloor(n, min_entry)
    w = rng.exponential(size=(n, n))
    w /= w.sum(axis=1, keepdims=True)
    return validate((1.0 - n * min_entry) * w + min_entry)


def random_feasible_perturbation(
    matrix: TransitionMatrix, s0: int, rng: np.random.Generator, tol: float = AMOUNT_STRICT_TOL
) -> ElementaryPerturbation:
    """Draw a strict elementary move into ``s0`` with ``c[i] ~ U[0, 0.9 * P[i, donor]]``."""
    s0 = matrix.check_state(s0)
    P = matrix.entries
    donors = [d for d in range(matrix.n) if d != s0 and P[:, d].max() > 0]
    if not donors:
        raise ValidationError(f"no column other than {s0} carries mass")
    d = int(donors[rng.integers(len(donors))])
    cap = P[:, d] * HEADROOM
    for _ in range(MAX_RESAMPLES):
        c = rng.uniform(0.0, 1.0, size=matrix.n) * cap
        if np.any(c > tol):
            return ElementaryPerturbation(CouplingSpec(s0, d), c)
    c = np.zeros(matrix.n)
    row = next(i for i in range(matrix.n) if cap[i] > 0)
    c[row] = cap[row] / 2
    return ElementaryPerturbation(CouplingSpec(s0, d), c)


def _failure(config: TrialConfig, index: int, prop: str, **observed) -> dict:
    descriptor = {
        "seed": config.seed,
        "index": index,
        "n_min": config.n_min,
        "n_max": config.n_max,
        "min_entry": config.min_entry,
        "strictness_tolerance": config.strictness_tolerance,
    }
    return {"trial": descriptor, "property": prop, "observed": observed}


def run_trial(config: TrialConfig, index: int) -> tuple[float | None, list[dict]]:
    """Run trial ``index`` of ``config``; return ``(gap, failures)``.

    ``gap`` is ``pi'[s0] - pi[s0]`` for the trial's strict perturbation, or
    ``None`` if the trial aborted before computing it.
    """
    rng = trial_rng(config.seed, index)
    failures: list[dict] = []

    def fail(prop, **obs):
        failures.append(_failure(config, index, prop, **obs))

    try:
        n = int(rng.integers(config.n_min, config.n_max + 1))
        P = random_ergodic_chain(n, config.min_entry, rng)
        s0 = int(rng.integers(n))
        pert = random_feasible_perturbation(P, s0, rng)
        P2 = apply_elementary(P, pert)
        if not P2.structure.irreducible:
            fail("perturbed_irreducible", s0=s0, donor=pert.donor)
            return None, failures

        pi, pi2 = stationary_linear(P), stationary_linear(P2)
        gap = float(pi2[s0] - pi[s0])
        if not gap > config.strictness_tolerance:
            fail("monotonicity", s0=s0, donor=pert.donor, pi=float(pi[s0]), pi_prime=float(pi2[s0]), gap=gap)

        for name, chain, dist in (("base", P, pi), ("perturbed", P2, pi2)):
            err = abs(dist[s0] * expected_return_time(chain, s0) - 1.0)
            if not err <= RECIPROCITY_TOL:
                fail("return_time_reciprocity", chain=name, s0=s0, error=float(err))

        spec = pert.spec
        sens = coupled_derivative_direct(P, spec)
        if not np.all(sens.d_mu < 0):
            fail("sensitivity_negative", s0=s0, donor=spec.donor, d_mu=sens.tolist())

        row = int(rng.integers(n))
        if fd_feasible(P, spec, row):
            fd = finite_difference_check(P, spec, row)
            analytic = float(sens[row])
            if not abs(fd - analytic) <= fd_tolerance(analytic):
                fail("finite_difference", s0=s0, donor=spec.donor, row=row, analytic=analytic, fd=fd)

        Pk = P
        for _ in range(int(rng.integers(1, 4))):
            Pk = apply_elementary(Pk, random_feasible_perturbation(Pk, s0, rng))
        rebuilt = compose(P, decompose(P, Pk, s0))
        err = float(np.max(np.abs(rebuilt.entries - Pk.entries)))
        if not err <= ROUND_TRIP_TOL:
            fail("decompose_round_trip", s0=s0, error=err)
        if check_theorem_conditions(P, Pk, s0).strict and Pk.structure.irreducible:
            pair_gap = float(stationary_linear(Pk)[s0] - pi[s0])
            if not pair_gap > 0:
                fail("decomposition_gap", s0=s0, gap=pair_gap)
        return gap, failures
    except MarkovError as exc:
        fail("exception", error=f"{type(exc).__name__}: {exc}")
        return None, failures


def run_suite(config: TrialConfig) -> VerificationReport:
    """Run every trial of ``config`` and aggregate failures and the smallest gap."""
    report = VerificationReport(trials_run=0)
    gaps = []
    for index in range(config.trials):
        gap, failures = run_trial(config, index)
        report.trials_run += 1
        report.failures.extend(failures)
        if gap is not None:
            gaps.append(gap)
    report.min_gap = min(gaps) if gaps else None
    return report


def config_dict(config: TrialConfig) -> dict:
    return asdict(config)
