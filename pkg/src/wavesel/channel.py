"""Finite-state Markov interference channel and the radar's lossy view of it.

The interferer hops between a finite set of occupancy states according to a
row-stochastic transition matrix.  Transitions do not depend on the radar's
waveform choice.  The radar observes the current state, except that with
probability ``p_miss`` the observation is replaced by the all-zeros vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

ROW_SUM_TOL = 1e-9
STATIONARY_TOL = 1e-12
STATIONARY_MAX_ITER = 10**6

__all__ = [
    "ChannelError",
    "ConvergenceError",
    "ObservationModel",
    "MarkovChannel",
    "ChannelSpec",
    "validate_occupancy",
    "validate_transitions",
    "build_channel",
    "stationary_distribution",
    "stationary_distribution_cesaro",
]


class ChannelError(ValueError):
    """Invalid channel specification (dimensions, stochasticity, indices)."""


class ConvergenceError(ArithmeticError):
    """An iterative numeric procedure failed to converge."""


def validate_occupancy(bits: Sequence[int], d: int | None = None) -> tuple[int, ...]:
    """Check a 0/1 occupancy vector, optionally against an expected length."""
    vec = tuple(int(b) for b in bits)
    if d is not None and len(vec) != d:
        raise ChannelError(f"occupancy vector has length {len(vec)}, expected {d}")
    if any(b not in (0, 1) for b in vec):
        raise ChannelError(f"occupancy vector must be 0/1, got {vec}")
    return vec


def validate_transitions(transitions: Sequence[Sequence[float]]) -> np.ndarray:
    """Validate and return a row-stochastic transition matrix as float64."""
    P = np.asarray(transitions, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ChannelError(f"transition matrix must be square, got shape {P.shape}")
    if np.any(P < 0) or np.any(P > 1):
        raise ChannelError("transition probabilities must lie in [0, 1]")
    sums = P.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > ROW_SUM_TOL:
            raise ChannelError(f"row {i} sums to {s}")
    return P


@dataclass(frozen=True)
class ObservationModel:
    """Sensing failure model: with probability p_miss the radar sees all zeros."""

    p_miss: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_miss <= 1.0:
            raise ChannelError(f"p_miss must lie in [0, 1], got {self.p_miss}")


class MarkovChannel:
    """Interference state process: enumerated occupancy states + transition matrix.

    Single-writer: ``step`` mutates only the current-state index.  The state
    list and matrix are never modified, so independent instances may be
    simulated concurrently.
    """

    def __init__(
        self,
        states: Sequence[Sequence[int]],
        transitions: Sequence[Sequence[float]],
        current: int,
    ) -> None:
        if len(states) == 0:
            raise ChannelError("state list is empty")
        d = len(states[0])
        self.states: tuple[tuple[int, ...], ...] = tuple(
            validate_occupancy(s, d) for s in states
        )
        if len(set(self.states)) != len(self.states):
            raise ChannelError("state list contains duplicates")
        self.d = d
        self.transitions = validate_transitions(transitions)
        if self.transitions.shape[0] != len(self.states):
            raise ChannelError(
                f"transition matrix is {self.transitions.shape[0]}x"
                f"{self.transitions.shape[1]} but there are {len(self.states)} states"
            )
        if not 0 <= current < len(self.states):
            raise ChannelError(f"initial state index {current} out of range")
        self.current = int(current)
        self._zeros = (0,) * d
        # Row cumulative sums for inverse-CDF sampling of the next state.
        self._row_cum = [tuple(np.cumsum(row)) for row in self.transitions]

    @property
    def num_states(self) -> int:
        return len(self.states)

    def step_with(self, u: float) -> int:
        """Advance using a pre-drawn uniform variate in [0, 1)."""
        row = self._row_cum[self.current]
        j = len(row) - 1
        for idx, threshold in enumerate(row):
            if u < threshold:
                j = idx
                break
        self.current = j
        return j

    def step(self, rng: np.random.Generator) -> int:
        """Sample the next state from the current row; returns the new index."""
        return self.step_with(rng.random())

    def observe(
        self, model: ObservationModel, rng: np.random.Generator
    ) -> tuple[int, ...]:
        """Current state's occupancy, or all-zeros on a sensing miss.

        Always consumes exactly one uniform draw, so observation streams stay
        aligned across configurations.
        """
        u = rng.random()
        if u < model.p_miss:
            return self._zeros
        return self.states[self.current]


def build_channel(
    states: Sequence[Sequence[int]],
    transitions: Sequence[Sequence[float]],
    initial: int | str = 0,
    rng: np.random.Generator | None = None,
) -> MarkovChannel:
    """Construct a channel, optionally drawing the initial state uniformly.

    Args:
        states: ordered list of 0/1 occupancy vectors, all the same length.
        transitions: row-stochastic |S| x |S| matrix.
        initial: state index, or "random" for a uniform draw (requires rng).
        rng: seeded generator, consumed once when initial == "random".
    """
    if initial == "random":
        if rng is None:
            raise ChannelError('initial="random" requires an rng')
        if len(states) == 0:
            raise ChannelError("state list is empty")
        initial = int(rng.integers(len(states)))
    return MarkovChannel(states, transitions, int(initial))


def _power_iterate(
    P: np.ndarray, detect_oscillation: bool, cesaro: bool
) -> np.ndarray:
    n = P.shape[0]
    # Start from a basis vector: for periodic chains this keeps the iteration
    # oscillating (so detection can fire) instead of silently landing on the
    # uniform fixed point.
    mu = np.zeros(n)
    mu[0] = 1.0
    prev = mu
    for _ in range(STATIONARY_MAX_ITER):
        nxt = mu @ P
        if cesaro:
            candidate = 0.5 * (mu + nxt)
            if np.max(np.abs(candidate @ P - candidate)) < STATIONARY_TOL:
                return candidate / candidate.sum()
        if np.max(np.abs(nxt - mu)) < STATIONARY_TOL:
            return nxt / nxt.sum()
        if detect_oscillation and np.max(np.abs(nxt - prev)) < STATIONARY_TOL:
            raise ConvergenceError(
                "power iteration oscillates (period-2 chain); "
                "use the Cesaro variant for periodic chains"
            )
        prev = mu
        mu = nxt
    raise ConvergenceError(
        f"stationary distribution did not converge within {STATIONARY_MAX_ITER} iterations"
    )


def stationary_distribution(transitions: Sequence[Sequence[float]]) -> np.ndarray:
    """Stationary vector of an irreducible aperiodic chain by power iteration.

    Iterates mu <- mu P from a basis start to residual below 1e-12, capped at
    1e6 iterations.  Periodic chains are detected via two-step oscillation and
    reported as ConvergenceError.
    """
    P = validate_transitions(transitions)
    return _power_iterate(P, detect_oscillation=True, cesaro=False)


def stationary_distribution_cesaro(
    transitions: Sequence[Sequence[float]],
) -> np.ndarray:
    """Stationary vector via averaged successive iterates.

    Handles period-2 chains (e.g. a deterministic two-state swap), which the
    plain iteration rejects.
    """
    P = validate_transitions(transitions)
    return _power_iterate(P, detect_oscillation=False, cesaro=True)


@dataclass(frozen=True)
class ChannelSpec:
    """Declarative channel description: the on-disk JSON interface.

    Fields: ``d``, ``states`` (list of 0/1 arrays), ``P`` (row-major matrix),
    ``initial`` (index or "random"), ``p_miss``.
    """

    d: int
    states: tuple[tuple[int, ...], ...]
    transitions: tuple[tuple[float, ...], ...]
    initial: int | str = "random"
    p_miss: float = 0.0

    @classmethod
    def from_dict(cls, data: dict) -> "ChannelSpec":
        try:
            d = int(data["d"])
            states = tuple(validate_occupancy(s, d) for s in data["states"])
            P = validate_transitions(data["P"])
        except KeyError as exc:
            raise ChannelError(f"channel spec missing field {exc}") from exc
        initial = data.get("initial", "random")
        if initial != "random":
            initial = int(initial)
        return cls(
            d=d,
            states=states,
            transitions=tuple(tuple(float(x) for x in row) for row in P),
            initial=initial,
            p_miss=float(data.get("p_miss", 0.0)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ChannelSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "states": [list(s) for s in self.states],
            "P": [list(row) for row in self.transitions],
            "initial": self.initial,
            "p_miss": self.p_miss,
        }

    def build(self, rng: np.random.Generator | None = None) -> MarkovChannel:
        return build_channel(self.states, self.transitions, self.initial, rng)
