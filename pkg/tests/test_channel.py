"""Markov channel construction, stepping, observation, and stationary vectors."""

import re

import numpy as np
import pytest

from wavesel.channel import (
    ChannelError,
    ChannelSpec,
    ConvergenceError,
    MarkovChannel,
    ObservationModel,
    build_channel,
    stationary_distribution,
    stationary_distribution_cesaro,
)

TWO_STATES = [[1, 1, 0, 0], [0, 0, 1, 1]]
SYM = [[0.7, 0.3], [0.3, 0.7]]


def stationary_by_solve(P):
    """Oracle: solve the balance equations directly."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    mu, *_ = np.linalg.lstsq(A, b, rcond=None)
    return mu


class TestBuild:
    def test_constructor_echo(self):
        ch = build_channel(TWO_STATES, SYM, initial=0)
        assert ch.current == 0
        assert ch.states == ((1, 1, 0, 0), (0, 0, 1, 1))
        assert ch.d == 4

    def test_non_stochastic_row_reports_index_and_sum(self):
        with pytest.raises(ChannelError, match=r"row 0 sums to 0\.9"):
            build_channel(TWO_STATES, [[0.5, 0.4], [0.3, 0.7]], initial=0)

    def test_mixed_state_lengths(self):
        with pytest.raises(ChannelError, match="length"):
            build_channel([[1, 0, 0, 0], [0, 1, 0, 0, 0]], SYM, initial=0)

    def test_empty_states(self):
        with pytest.raises(ChannelError, match="empty"):
            build_channel([], [], initial=0)

    def test_matrix_dimension_mismatch(self):
        with pytest.raises(ChannelError):
            build_channel(TWO_STATES, [[1.0]], initial=0)

    def test_bad_initial_index(self):
        with pytest.raises(ChannelError):
            build_channel(TWO_STATES, SYM, initial=5)

    def test_duplicate_states(self):
        with pytest.raises(ChannelError, match="duplicate"):
            build_channel([[1, 0], [1, 0]], SYM, initial=0)

    def test_non_binary_state(self):
        with pytest.raises(ChannelError):
            build_channel([[1, 2], [0, 1]], SYM, initial=0)

    def test_random_initial(self):
        rng = np.random.default_rng(3)
        seen = {build_channel(TWO_STATES, SYM, "random", rng).current for _ in range(50)}
        assert seen == {0, 1}

    def test_random_initial_needs_rng(self):
        with pytest.raises(ChannelError):
            build_channel(TWO_STATES, SYM, "random")


class TestStep:
    def test_absorbing_row(self):
        ch = build_channel(TWO_STATES, [[1, 0], [0, 1]], initial=0)
        rng = np.random.default_rng(0)
        assert all(ch.step(rng) == 0 for _ in range(100))

    def test_deterministic_swap(self):
        ch = build_channel(TWO_STATES, [[0, 1], [1, 0]], initial=0)
        rng = np.random.default_rng(0)
        assert [ch.step(rng) for _ in range(4)] == [1, 0, 1, 0]

    def test_transition_frequency(self):
        ch = build_channel(TWO_STATES, SYM, initial=0)
        rng = np.random.default_rng(99)
        from_zero = switched = 0
        prev = ch.current
        for _ in range(1_000_000):
            nxt = ch.step(rng)
            if prev == 0:
                from_zero += 1
                switched += nxt == 1
            prev = nxt
        assert abs(switched / from_zero - 0.3) < 0.005

    def test_empirical_matrix_converges(self):
        ch = build_channel(TWO_STATES, SYM, initial=0)
        rng = np.random.default_rng(2)
        counts = np.zeros((2, 2))
        prev = ch.current
        for _ in range(1_000_000):
            nxt = ch.step(rng)
            counts[prev, nxt] += 1
            prev = nxt
        empirical = counts / counts.sum(axis=1, keepdims=True)
        assert np.max(np.abs(empirical - np.array(SYM))) < 0.01

    def test_step_mutates_only_current(self):
        ch = build_channel(TWO_STATES, SYM, initial=0)
        states_before = ch.states
        matrix_before = ch.transitions.copy()
        rng = np.random.default_rng(1)
        for _ in range(100):
            ch.step(rng)
        assert ch.states is states_before
        assert np.array_equal(ch.transitions, matrix_before)


class TestObserve:
    def test_perfect_observation_is_identity(self):
        ch = build_channel([[1, 0, 0, 1], [0, 1, 1, 0]], SYM, initial=0)
        rng = np.random.default_rng(0)
        model = ObservationModel(p_miss=0.0)
        for idx in range(2):
            ch.current = idx
            assert ch.observe(model, rng) == ch.states[idx]

    def test_forced_miss(self):
        ch = build_channel([[1, 0, 0, 1], [0, 1, 1, 0]], SYM, initial=0)
        rng = np.random.default_rng(0)
        assert ch.observe(ObservationModel(p_miss=1.0), rng) == (0, 0, 0, 0)

    def test_miss_frequency(self):
        ch = build_channel([[1, 0, 0, 1], [0, 1, 1, 0]], SYM, initial=0)
        rng = np.random.default_rng(8)
        model = ObservationModel(p_miss=0.25)
        zeros = sum(
            ch.observe(model, rng) == (0, 0, 0, 0) for _ in range(100_000)
        )
        assert abs(zeros / 100_000 - 0.25) < 0.01

    def test_bad_p_miss(self):
        with pytest.raises(ChannelError):
            ObservationModel(p_miss=1.5)


class TestStationary:
    def test_symmetric_chain(self):
        mu = stationary_distribution(SYM)
        assert np.allclose(mu, [0.5, 0.5], atol=1e-9)

    def test_asymmetric_matches_linear_solve(self):
        P = [[0.8, 0.2], [0.6, 0.4]]
        mu = stationary_distribution(P)
        assert np.allclose(mu, [0.75, 0.25], atol=1e-9)
        assert np.allclose(mu, stationary_by_solve(P), atol=1e-9)

    def test_period_two_raises(self):
        with pytest.raises(ConvergenceError, match="oscillat"):
            stationary_distribution([[0, 1], [1, 0]])

    def test_cesaro_handles_period_two(self):
        mu = stationary_distribution_cesaro([[0, 1], [1, 0]])
        assert np.allclose(mu, [0.5, 0.5], atol=1e-9)

    def test_residual_and_normalization(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            raw = rng.random((n, n)) + 0.05
            P = raw / raw.sum(axis=1, keepdims=True)
            mu = stationary_distribution(P)
            assert np.max(np.abs(mu @ P - mu)) < 1e-9
            assert abs(mu.sum() - 1.0) < 1e-12
            assert np.all(mu >= 0)
            assert np.allclose(mu, stationary_by_solve(P), atol=1e-8)


class TestChannelSpec:
    def test_round_trip(self, tmp_path):
        spec = ChannelSpec.from_dict(
            {
                "d": 4,
                "states": TWO_STATES,
                "P": SYM,
                "initial": 1,
                "p_miss": 0.2,
            }
        )
        path = tmp_path / "chan.json"
        import json

        path.write_text(json.dumps(spec.to_dict()))
        again = ChannelSpec.from_file(path)
        assert again == spec
        ch = again.build()
        assert isinstance(ch, MarkovChannel)
        assert ch.current == 1

    def test_missing_field(self):
        with pytest.raises(ChannelError, match="missing"):
            ChannelSpec.from_dict({"d": 4, "states": TWO_STATES})
