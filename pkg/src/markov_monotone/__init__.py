"""Exact analysis of finite discrete-time Markov chains.

Stationary distributions, hitting and return times, return-time
sensitivities under mass-moving perturbations, Monte Carlo oracles and a
randomised check that moving transition mass into a state raises its
invariant probability.
"""

from .chain import StructureReport, TransitionMatrix, require_ergodic, structure, validate
from .hitting import HittingProfile, expected_hitting_times, expected_return_time
from .montecarlo import SimulationEstimate, simulate_hitting_time, simulate_return_time
from .perturbation import (
    ElementaryPerturbation,
    TheoremConditionReport,
    apply_elementary,
    check_theorem_conditions,
    decompose,
)
from .sensitivity import (
    CouplingSpec,
    SensitivityVector,
    coupled_derivative_direct,
    coupled_derivative_series,
    finite_difference_check,
)
from .stationary import Distribution, stationary_linear, stationary_power, stationary_via_return_time
from .harness import TrialConfig, VerificationReport, random_ergodic_chain, random_feasible_perturbation, run_suite

__version__ = "0.1.0"
