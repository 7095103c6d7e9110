import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markov_monotone.chain import (
    chain_from_dict,
    chain_to_dict,
    load_chain,
    require_ergodic,
    structure,
    validate,
)
from markov_monotone.errors import (
    InvalidState,
    NegativeEntry,
    NotIrreducible,
    NotSquare,
    RowSumViolation,
    TooSmall,
    ValidationError,
)


def brute_force_period(P, state=0):
    # gcd of return lengths k <= 3n, read off boolean matrix powers
    A = (np.asarray(P) > 0).astype(int)
    n = len(A)
    M = np.eye(n, dtype=int)
    lengths = []
    for k in range(1, 3 * n + 1):
        M = np.minimum(M @ A, 1)
        if M[state, state]:
            lengths.append(k)
    return reduce(math.gcd, lengths, 0)


def brute_force_irreducible(P):
    A = (np.asarray(P) > 0).astype(int)
    n = len(A)
    R = np.minimum(np.eye(n, dtype=int) + A, 1)
    for _ in range(n):
        R = np.minimum(R @ R, 1)
    return bool(R.all())


class TestValidate:
    def test_valid_two_state(self):
        P = validate([[0.5, 0.5], [0.25, 0.75]], 1e-9)
        assert P.n == 2
        np.testing.assert_array_equal(P.entries, [[0.5, 0.5], [0.25, 0.75]])

    def test_row_sum_violation(self):
        with pytest.raises(RowSumViolation) as exc:
            validate([[1.0, 0.1], [0.5, 0.5]], 1e-9)
        assert exc.value.i == 0
        assert exc.value.total == pytest.approx(1.1)

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry) as exc:
            validate([[0.5, 0.5], [-0.1, 1.1]], 1e-9)
        assert (exc.value.i, exc.value.j) == (1, 0)

    @pytest.mark.parametrize("raw", [[[1.0]], np.ones((1, 1))])
    def test_too_small(self, raw):
        with pytest.raises(TooSmall):
            validate(raw)

    @pytest.mark.parametrize("raw", [[[0.5, 0.5]], [0.5, 0.5], [[1.0, 0.0], [1.0]]])
    def test_not_square(self, raw):
        with pytest.raises(ValidationError):
            validate(raw)

    def test_not_square_type(self):
        with pytest.raises(NotSquare):
            validate(np.full((2, 3), 1 / 3))

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            validate([[np.nan, 1.0], [0.5, 0.5]])

    def test_small_deviation_renormalised(self):
        P = validate([[0.5 + 4e-10, 0.5], [0.25, 0.75 - 3e-10]], 1e-9)
        np.testing.assert_allclose(P.entries.sum(axis=1), 1.0, rtol=0, atol=1e-15)

    def test_dust_negative_clipped(self):
        P = validate([[1.0 + 1e-12, -1e-12], [0.5, 0.5]], 1e-9)
        assert P.entries[0, 1] == 0.0

    def test_zero_row_rejected(self):
        with pytest.raises(RowSumViolation):
            validate([[0.0, 0.0], [0.5, 0.5]])

    def test_read_only(self, two_state):
        with pytest.raises(ValueError):
            two_state.entries[0, 0] = 1.0

    def test_labels(self):
        P = validate([[0.5, 0.5], [0.25, 0.75]], labels=["a", "b"])
        assert P.labels == ("a", "b")
        with pytest.raises(ValidationError):
            validate([[0.5, 0.5], [0.25, 0.75]], labels=["a"])

    def test_check_state(self, two_state):
        assert two_state.check_state(np.int64(1)) == 1
        for bad in (2, -1, 0.5, True):
            with pytest.raises(InvalidState):
                two_state.check_state(bad)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 10), st.integers(0, 2**32 - 1))
    def test_idempotent(self, n, seed):
        rng = np.random.default_rng(seed)
        W = rng.random((n, n)) * (rng.random((n, n)) < 0.7)
        W[np.arange(n), rng.integers(n, size=n)] += 0.1
        P = validate(W / W.sum(axis=1, keepdims=True))
        assert validate(P.entries) == P


class TestStructure:
    def test_two_cycle(self, cycle2):
        r = structure(cycle2)
        assert r.irreducible and r.period == 2 and not r.aperiodic

    def test_self_loop(self, two_state):
        r = structure(two_state)
        assert r.irreducible and r.period == 1 and r.aperiodic

    def test_absorbing(self, reducible):
        r = structure(reducible)
        assert not r.irreducible
        assert r.period is None and not r.aperiodic
        assert set(r.communicating_classes) == {(0,), (1,)}

    def test_three_cycle(self):
        P = validate(np.roll(np.eye(3), 1, axis=1))
        assert structure(P).period == 3

    def test_bipartite_period_two(self):
        P = validate([[0, 0.5, 0.5], [1, 0, 0], [1, 0, 0]])
        r = structure(P)
        assert r.irreducible and r.period == 2

    def test_cycles_of_two_and_three(self):
        # 0->1->0 and 0->1->2->0 give gcd(2, 3) = 1
        P = validate([[0, 1, 0], [0.5, 0, 0.5], [1, 0, 0]])
        assert structure(P).period == 1

    @pytest.mark.parametrize("n", range(2, 17))
    def test_positive_matrices(self, n):
        rng = np.random.default_rng(n)
        W = rng.random((n, n)) + 1e-3
        r = structure(validate(W / W.sum(axis=1, keepdims=True)))
        assert r.irreducible and r.period == 1 and r.aperiodic
        assert r.communicating_classes == (tuple(range(n)),)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**32 - 1), st.floats(0.05, 0.6))
    def test_matches_brute_force(self, n, seed, density):
        rng = np.random.default_rng(seed)
        W = (rng.random((n, n)) < density).astype(float)
        W[np.arange(n), rng.integers(n, size=n)] = 1.0
        P = validate(W / W.sum(axis=1, keepdims=True))
        r = structure(P)
        assert r.irreducible == brute_force_irreducible(P)
        flat = sorted(s for c in r.communicating_classes for s in c)
        assert flat == list(range(n))
        if r.irreducible:
            assert r.period == brute_force_period(P)
            assert r.aperiodic == (r.period == 1)
            assert len(r.communicating_classes) == 1


class TestRequireErgodic:
    def test_periodic_ok(self, cycle2):
        assert require_ergodic(cycle2).period == 2

    def test_uniform_ok(self, uniform3):
        assert require_ergodic(uniform3).aperiodic

    def test_reducible(self, reducible):
        with pytest.raises(NotIrreducible) as exc:
            require_ergodic(reducible)
        assert sorted(exc.value.classes) == [(0,), (1,)]


class TestChainJson:
    def test_round_trip(self, tmp_path):
        P = validate([[0.5, 0.5], [0.25, 0.75]], labels=["x", "y"])
        path = tmp_path / "c.json"
        import json

        path.write_text(json.dumps(chain_to_dict(P)))
        assert load_chain(path) == P

    @pytest.mark.parametrize(
        "doc",
        [[], {"labels": ["a"]}, {"matrix": "no"}, {"matrix": [[0.5, "x"], [0.5, 0.5]]}, {"matrix": [[True, 0], [0, 1]]}],
    )
    def test_bad_documents(self, doc):
        with pytest.raises(ValidationError):
            chain_from_dict(doc)

    def test_bad_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ValidationError):
            load_chain(bad)
        with pytest.raises(ValidationError):
            load_chain(tmp_path / "missing.json")
