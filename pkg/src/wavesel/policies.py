"""Waveform-selection policies behind one decide/update lifecycle.

Five kinds:

* sense-and-avoid: widest vacancy of the previous observation, ties random;
* Thompson sampling: per-arm Bayesian linear regression over the loss with
  context [observation bits; 1], arm drawn by posterior sampling;
* Bellman oracle: one-step-lookahead table built from the true transition
  matrix by value iteration (an analysis tool, not a fair contestant);
* genie: widest vacancy of the true current state (regret comparator);
* fixed: a constant waveform.

``decide`` is called with the policy's stored information from before the
channel steps; ``update`` then delivers the new observation and the realized
loss.  Non-learning kinds ignore the loss.  Each policy instance is
single-threaded; run independent instances for concurrent trials.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ConvergenceError, MarkovChannel
from .metrics import LossParams, loss as pri_loss
from .waveforms import Waveform, enumerate_waveforms, widest_vacancy

__all__ = [
    "Policy",
    "SenseAndAvoidPolicy",
    "ThompsonSamplingPolicy",
    "BellmanTable",
    "bellman_build",
    "BellmanOraclePolicy",
    "GeniePolicy",
    "FixedWaveformPolicy",
    "make_policy",
    "policy_names",
]

VALUE_ITERATION_TOL = 1e-10
VALUE_ITERATION_MAX_ITER = 10**6
# Exact re-inversion cadence for the Thompson posterior (guards against
# accumulated round-off in the rank-1 inverse updates).
_REFRESH_EVERY = 256


class Policy:
    """Decide/update lifecycle shared by all policy kinds."""

    name: str = "policy"
    #: True for comparators that act on the true post-transition state.
    uses_true_state: bool = False

    def decide(self, rng: np.random.Generator) -> Waveform:
        raise NotImplementedError

    def decide_from_state(
        self, state: Sequence[int], rng: np.random.Generator
    ) -> Waveform:
        raise NotImplementedError(f"{self.name} does not act on the true state")

    def update(self, observation: Sequence[int], observed_loss: float) -> None:
        """Receive the post-transition observation and realized loss; no-op by default."""


class SenseAndAvoidPolicy(Policy):
    """Transmit in the widest vacancy of the most recent observation.

    The stored observation starts all-zeros, so the first decision is the
    full band.
    """

    name = "saa"

    def __init__(self, d: int) -> None:
        self.d = d
        self._last_obs: tuple[int, ...] = (0,) * d

    @property
    def last_observation(self) -> tuple[int, ...]:
        return self._last_obs

    def decide(self, rng: np.random.Generator) -> Waveform:
        return widest_vacancy(self._last_obs, rng)

    def update(self, observation: Sequence[int], observed_loss: float) -> None:
        if len(observation) != self.d:
            raise ValueError(
                f"observation has length {len(observation)}, expected {self.d}"
            )
        self._last_obs = tuple(observation)


class _ContextEntry:
    """Cached per-arm score statistics for one distinct observation vector."""

    __slots__ = ("x", "outer", "mean", "sd", "versions")

    def __init__(self, x: np.ndarray, num_arms: int) -> None:
        self.x = x
        self.outer = np.outer(x, x)
        self.mean = np.zeros(num_arms)
        self.sd = np.zeros(num_arms)
        self.versions = [-1] * num_arms


class ThompsonSamplingPolicy(Policy):
    """Posterior sampling over per-arm Bayesian linear-regression loss models.

    Arm k keeps a Gaussian posterior N(A_k^-1 b_k, noise_var * A_k^-1) over
    its coefficient vector, with A_k initialized to prior_precision * I and
    context x = [observation bits; 1].  A decision samples each arm's
    predicted loss x'theta_k and plays the minimizer; only the sampled
    prediction matters, so the scalar x'theta_k ~ N(x'mu_k,
    noise_var * x'A_k^-1 x) is drawn directly (one standard-normal vector of
    length num_arms per decision).  Ties go to the lowest arm index.
    """

    name = "ts"

    def __init__(
        self, d: int, prior_precision: float = 1.0, noise_var: float = 0.25
    ) -> None:
        if prior_precision <= 0:
            raise ValueError(f"prior precision must be positive, got {prior_precision}")
        if noise_var <= 0:
            raise ValueError(f"noise variance must be positive, got {noise_var}")
        self.d = d
        self.catalog = enumerate_waveforms(d)
        self.num_arms = len(self.catalog)
        self.prior_precision = float(prior_precision)
        self.noise_var = float(noise_var)
        self._noise_sd = float(np.sqrt(noise_var))
        ctx_dim = d + 1
        self._precision = np.stack(
            [np.eye(ctx_dim) * prior_precision for _ in range(self.num_arms)]
        )
        self._precision_inv = np.stack(
            [np.eye(ctx_dim) / prior_precision for _ in range(self.num_arms)]
        )
        self._response = np.zeros((self.num_arms, ctx_dim))
        self._mean = np.zeros((self.num_arms, ctx_dim))
        self._version = [0] * self.num_arms
        self._updates = [0] * self.num_arms
        self._contexts: dict[tuple[int, ...], _ContextEntry] = {}
        self._last_obs: tuple[int, ...] = (0,) * d
        self._pending: tuple[tuple[int, ...], int] | None = None

    def _context_vector(self, obs: tuple[int, ...]) -> np.ndarray:
        x = np.empty(self.d + 1)
        x[: self.d] = obs
        x[self.d] = 1.0
        return x

    def _entry(self, obs: tuple[int, ...]) -> _ContextEntry:
        entry = self._contexts.get(obs)
        if entry is None:
            entry = _ContextEntry(self._context_vector(obs), self.num_arms)
            self._contexts[obs] = entry
        seen = entry.versions
        current = self._version
        if seen != current:
            x = entry.x
            for k in range(self.num_arms):
                if seen[k] != current[k]:
                    entry.mean[k] = self._mean[k] @ x
                    variance = x @ self._precision_inv[k] @ x
                    assert variance > 0.0, "posterior precision lost positive definiteness"
                    entry.sd[k] = self._noise_sd * np.sqrt(variance)
                    seen[k] = current[k]
        return entry

    def select_arm(self, observation: Sequence[int], rng: np.random.Generator) -> int:
        """Sample every arm's posterior predicted loss; return the argmin index."""
        entry = self._entry(tuple(observation))
        z = rng.standard_normal(self.num_arms)
        scores = entry.mean + entry.sd * z
        return int(scores.argmin())

    def record(
        self, observation: Sequence[int], arm: int, observed_loss: float
    ) -> None:
        """Fold one (context, arm, loss) observation into that arm's posterior."""
        if not 0 <= arm < self.num_arms:
            raise ValueError(f"arm index {arm} out of range")
        if not 0.0 <= observed_loss <= 1.0:
            raise ValueError(f"loss {observed_loss} outside [0, 1]")
        obs = tuple(observation)
        entry = self._contexts.get(obs)
        if entry is None:
            entry = _ContextEntry(self._context_vector(obs), self.num_arms)
            self._contexts[obs] = entry
        x = entry.x
        A_inv = self._precision_inv[arm]
        Ax = A_inv @ x
        A_inv -= np.outer(Ax, Ax) / (1.0 + float(x @ Ax))
        self._precision[arm] += entry.outer
        self._response[arm] += observed_loss * x
        self._updates[arm] += 1
        if self._updates[arm] % _REFRESH_EVERY == 0:
            self._precision_inv[arm] = np.linalg.inv(self._precision[arm])
        self._mean[arm] = self._precision_inv[arm] @ self._response[arm]
        self._version[arm] += 1

    def predicted_loss(self, observation: Sequence[int], arm: int) -> float:
        """Posterior mean loss of one arm at one context (no sampling)."""
        return float(self._mean[arm] @ self._context_vector(tuple(observation)))

    def decide(self, rng: np.random.Generator) -> Waveform:
        arm = self.select_arm(self._last_obs, rng)
        self._pending = (self._last_obs, arm)
        return self.catalog[arm]

    def update(self, observation: Sequence[int], observed_loss: float) -> None:
        if self._pending is not None:
            ctx_obs, arm = self._pending
            self.record(ctx_obs, arm, observed_loss)
            self._pending = None
        self._last_obs = tuple(observation)


@dataclass(frozen=True)
class BellmanTable:
    """Per-state optimal actions plus the expected one-step cost of every arm."""

    states: tuple[tuple[int, ...], ...]
    actions: tuple[Waveform, ...]
    expected_cost: np.ndarray  # shape (num_states, num_arms)
    values: np.ndarray  # converged state values

    def action_for(self, state_index: int) -> Waveform:
        return self.actions[state_index]


def bellman_build(
    channel: MarkovChannel, params: LossParams, alpha: float = 0.9
) -> BellmanTable:
    """Value-iteration policy table from the true transition matrix.

    Because transitions do not depend on the action, the continuation term is
    the same for every arm and the converged argmin coincides with the myopic
    one-step-lookahead argmin; ties resolve to the first arm in catalog order.

    Args:
        channel: channel whose states and matrix define the problem.
        params: loss parameters.
        alpha: discount in [0, 1); 1 or more is rejected.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"discount must lie in [0, 1), got {alpha}")
    params.validate_for(channel.d)
    catalog = enumerate_waveforms(channel.d)
    P = channel.transitions
    # loss_table[k, j] = loss of arm k against state j
    loss_table = np.array(
        [[pri_loss(w, s, params) for s in channel.states] for w in catalog]
    )
    expected = P @ loss_table.T  # (num_states, num_arms)
    values = np.zeros(channel.num_states)
    for _ in range(VALUE_ITERATION_MAX_ITER):
        q = expected + alpha * (P @ values)[:, None]
        new_values = q.min(axis=1)
        if np.max(np.abs(new_values - values)) < VALUE_ITERATION_TOL:
            values = new_values
            break
        values = new_values
    else:
        raise ConvergenceError("value iteration did not converge")
    q = expected + alpha * (P @ values)[:, None]
    actions = tuple(catalog[int(k)] for k in q.argmin(axis=1))
    return BellmanTable(
        states=channel.states, actions=actions, expected_cost=expected, values=values
    )


class BellmanOraclePolicy(Policy):
    """Plays the value-iteration table keyed by the last observed state.

    Observations that match no channel state (the all-zeros start, or a
    sensing miss) fall back to the widest vacancy of the observation itself.
    """

    name = "bellman"

    def __init__(self, table: BellmanTable) -> None:
        self.table = table
        self.d = len(table.states[0])
        self._action_by_state = {
            s: table.actions[i] for i, s in enumerate(table.states)
        }
        self._last_obs: tuple[int, ...] = (0,) * self.d

    def decide(self, rng: np.random.Generator) -> Waveform:
        action = self._action_by_state.get(self._last_obs)
        if action is None:
            return widest_vacancy(self._last_obs, rng)
        return action

    def update(self, observation: Sequence[int], observed_loss: float) -> None:
        self._last_obs = tuple(observation)


class GeniePolicy(Policy):
    """Widest vacancy of the true current state: zero loss whenever one exists."""

    name = "genie"
    uses_true_state = True

    def __init__(self, d: int) -> None:
        self.d = d

    def decide_from_state(
        self, state: Sequence[int], rng: np.random.Generator
    ) -> Waveform:
        return widest_vacancy(state, rng)


class FixedWaveformPolicy(Policy):
    """Always the same waveform, observations ignored."""

    def __init__(self, waveform: Waveform) -> None:
        self.waveform = waveform
        self.d = waveform.d
        self.name = f"fixed:{waveform.start}:{waveform.width}"

    def decide(self, rng: np.random.Generator) -> Waveform:
        return self.waveform


def policy_names() -> tuple[str, ...]:
    return ("saa", "ts", "bellman", "genie", "fixed:<start>:<width>")


def make_policy(
    name: str,
    d: int,
    channel: MarkovChannel | None = None,
    params: LossParams | None = None,
    ts_prior: float = 1.0,
    ts_noise: float = 0.25,
    alpha: float = 0.9,
) -> Policy:
    """Build a fresh policy instance from its CLI name."""
    if name == "saa":
        return SenseAndAvoidPolicy(d)
    if name == "ts":
        return ThompsonSamplingPolicy(d, prior_precision=ts_prior, noise_var=ts_noise)
    if name == "genie":
        return GeniePolicy(d)
    if name == "bellman":
        if channel is None or params is None:
            raise ValueError("bellman policy needs the channel and loss parameters")
        return BellmanOraclePolicy(bellman_build(channel, params, alpha))
    if name.startswith("fixed:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise ValueError(f"fixed policy must be fixed:<start>:<width>, got {name!r}")
        try:
            start, width = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValueError(f"bad fixed policy spec {name!r}") from exc
        return FixedWaveformPolicy(Waveform(start=start, width=width, d=d))
    raise ValueError(f"unknown policy {name!r}; known: {', '.join(policy_names())}")
