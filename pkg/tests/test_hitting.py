import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _corpus import floored_corpus, mixed_corpus
from markov_monotone.chain import validate
from markov_monotone.errors import InvalidState, NotIrreducible
from markov_monotone.harness import random_ergodic_chain
from markov_monotone.hitting import expected_hitting_times, expected_return_time, hitting_residual
from markov_monotone.stationary import stationary_linear


def survival_oracle(P, start, target, eps=1e-15, max_steps=10**6):
    """E[T] = sum_t Pr(T > t), propagating mass with the target made absorbing."""
    P = np.asarray(P)
    v = np.zeros(len(P))
    v[start] = 1.0
    total, t = 0.0, 0
    if start == target:  # return time: the first step always happens
        total, v = 1.0, v @ P
        v[target] = 0.0
    while v.sum() > eps and t < max_steps:
        total += v.sum()
        v = v @ P
        v[target] = 0.0
        t += 1
    return total


class TestFixtures:
    def test_two_state(self, two_state):
        prof = expected_hitting_times(two_state, 0)
        # geometric first success with rate b = 0.25
        np.testing.assert_allclose(prof.hit, [0.0, 1 / 0.25], atol=1e-12)
        assert prof.return_time == pytest.approx(1 + 0.5 * 4, abs=1e-12)

    def test_two_state_other_target(self, two_state):
        assert expected_return_time(two_state, 1) == pytest.approx(1 / (2 / 3), abs=1e-12)

    def test_uniform(self, uniform3):
        prof = expected_hitting_times(uniform3, 0)
        np.testing.assert_allclose(prof.hit, [0, 3, 3], atol=1e-12)
        assert prof.return_time == pytest.approx(3, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_uniform_any_target(self, n):
        P = validate(np.full((n, n), 1 / n))
        for s in range(n):
            assert expected_return_time(P, s) == pytest.approx(n, abs=1e-12)

    def test_cycle(self, cycle2):
        prof = expected_hitting_times(cycle2, 0)
        np.testing.assert_array_equal(prof.hit, [0, 1])
        assert prof.return_time == 2

    def test_reducible(self, reducible):
        with pytest.raises(NotIrreducible):
            expected_hitting_times(reducible, 0)

    def test_bad_state(self, two_state):
        with pytest.raises(InvalidState):
            expected_hitting_times(two_state, 2)


@pytest.mark.parametrize("P", floored_corpus(25, 8, 0.02, seed=21), ids=lambda P: f"n{P.n}")
def test_against_survival_oracle(P):
    for s in range(P.n):
        prof = expected_hitting_times(P, s)
        for j in range(P.n):
            if j != s:
                assert prof.hit[j] == pytest.approx(survival_oracle(P, j, s), rel=1e-9)
        assert prof.return_time == pytest.approx(survival_oracle(P, s, s), rel=1e-9)


@pytest.mark.parametrize("P", mixed_corpus(60, 12, seed=8), ids=lambda P: f"n{P.n}")
def test_identities(P):
    pi = stationary_linear(P).probs
    E = P.entries
    for s in range(P.n):
        prof = expected_hitting_times(P, s)
        keep = [k for k in range(P.n) if k != s]
        assert prof.hit[s] == 0.0
        assert np.all(prof.hit[keep] >= 1.0)
        assert hitting_residual(P, prof) <= 1e-10
        for j in keep:
            assert abs(prof.hit[j] - (1 + E[j, keep] @ prof.hit[keep])) <= 1e-10 * max(1.0, prof.hit[j])
        assert prof.return_time == pytest.approx(1 + E[s, keep] @ prof.hit[keep], rel=1e-14)
        assert abs(prof.return_time * pi[s] - 1.0) <= 1e-8
        # lower bound: the return needs at least the cheapest hitting time from a reachable state
        reach = [k for k in keep if E[s, k] > 0]
        bound = 1 + min(prof.hit[k] for k in reach) * E[s, keep].sum()
        assert prof.return_time >= bound - 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_return_time_at_least_one(n, seed):
    P = random_ergodic_chain(n, 0.0, np.random.default_rng(seed))
    for s in range(n):
        assert expected_return_time(P, s) >= 1.0


def test_self_loop_state_return_time():
    # from 0: stay w.p. 0.9, else go to 1 which returns in exactly one step
    P = validate([[0.9, 0.1], [1.0, 0.0]])
    assert expected_return_time(P, 0) == pytest.approx(0.9 * 1 + 0.1 * 2, abs=1e-14)
