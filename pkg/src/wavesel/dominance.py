"""Analytic policy comparison: transition decomposition, long-run cost,
stochastic-dominance orderings, and regret diagnostics.

For a fixed decision rule on a Markov interference channel, every supported
transition either produces a collision, leaves vacant bandwidth unused, or is
benign; weighting those events by stationary mass gives the rule's long-term
average cost in closed form.  Sampled policies are compared instead through
empirical loss distributions (statewise, first-order, second-order) and
through cumulative regret against a coupled comparator trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .channel import MarkovChannel, stationary_distribution_cesaro
from .metrics import LossParams, collision_count, loss, missed_opportunity_count
from .waveforms import Waveform, zero_runs

__all__ = [
    "TransitionClasses",
    "classify_transitions",
    "saa_state_map",
    "analytic_average_cost",
    "EmpiricalCdf",
    "empirical_cdf",
    "DominanceOrder",
    "first_order_dominates",
    "second_order_dominates",
    "statewise_dominates",
    "RegretCurve",
    "regret_curve",
    "LinearityDiagnostic",
    "linearity_diagnostic",
]

DEFAULT_TOL = 1e-9

ActionMap = Mapping[int, "Waveform | Sequence[tuple[Waveform, float]]"]


def _normalize_choices(
    entry: "Waveform | Sequence[tuple[Waveform, float]]",
) -> list[tuple[Waveform, float]]:
    if isinstance(entry, Waveform):
        return [(entry, 1.0)]
    choices = list(entry)
    total = sum(w for _, w in choices)
    if total <= 0:
        raise ValueError("action choices must carry positive total weight")
    return [(wf, w / total) for wf, w in choices]


def saa_state_map(channel: MarkovChannel) -> dict[int, list[tuple[Waveform, float]]]:
    """Sense-and-avoid as a per-state action distribution under perfect sensing.

    Tied maximal vacancies get equal weight; a fully occupied state spreads
    weight over all width-1 starts (the forced-transmission fallback).
    """
    mapping: dict[int, list[tuple[Waveform, float]]] = {}
    for i, state in enumerate(channel.states):
        runs = zero_runs(state)
        if not runs:
            choices = [Waveform(start=s, width=1, d=channel.d) for s in range(channel.d)]
        else:
            best = max(length for _, length in runs)
            choices = [
                Waveform(start=s, width=length, d=channel.d)
                for s, length in runs
                if length == best
            ]
        weight = 1.0 / len(choices)
        mapping[i] = [(wf, weight) for wf in choices]
    return mapping


@dataclass
class TransitionClasses:
    """Supported transitions split by what acting on the rule produces.

    Masses are stationary-weighted: mass(i, j) = mu_i * p_ij, split across
    tied action choices where the rule randomizes.  For a deterministic rule
    the three sets partition the supported pairs exactly.
    """

    collision: dict[tuple[int, int], float] = field(default_factory=dict)
    missed: dict[tuple[int, int], float] = field(default_factory=dict)
    benign: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def total_mass(self) -> float:
        return (
            sum(self.collision.values())
            + sum(self.missed.values())
            + sum(self.benign.values())
        )

    @property
    def num_classified(self) -> int:
        return len(self.collision) + len(self.missed) + len(self.benign)


def classify_transitions(
    channel: MarkovChannel, policy_map: ActionMap, params: LossParams
) -> TransitionClasses:
    """Assign each supported transition (i, j) to collision / missed / benign.

    A pair lands in the collision set when the action taken in state i
    collides with state j; in the missed set when it is collision-free but
    narrower than j's widest vacancy; otherwise it is benign.  Randomized
    actions are evaluated per tie choice and mass-weighted, so a tied pair
    may carry mass in more than one set.
    """
    mu = stationary_distribution_cesaro(channel.transitions)
    out = TransitionClasses()
    for i, state_row in enumerate(channel.transitions):
        if i not in policy_map:
            raise ValueError(f"action map missing state index {i}")
        choices = _normalize_choices(policy_map[i])
        for j, p_ij in enumerate(state_row):
            if p_ij <= 0.0:
                continue
            target = channel.states[j]
            for wf, weight in choices:
                mass = float(mu[i] * p_ij * weight)
                if collision_count(wf, target) > 0:
                    bucket = out.collision
                elif missed_opportunity_count(wf, target) > 0:
                    bucket = out.missed
                else:
                    bucket = out.benign
                bucket[(i, j)] = bucket.get((i, j), 0.0) + mass
    return out


def analytic_average_cost(
    channel: MarkovChannel, policy_map: ActionMap, params: LossParams
) -> float:
    """Long-term average loss of a fixed (possibly tie-randomized) rule.

    lambda = sum_i mu_i sum_j p_ij E[loss(s_j, pi(s_i))], with mu the
    stationary distribution (Cesaro variant, so deterministic swap chains are
    handled).
    """
    mu = stationary_distribution_cesaro(channel.transitions)
    total = 0.0
    for i, state_row in enumerate(channel.transitions):
        if i not in policy_map:
            raise ValueError(f"action map missing state index {i}")
        choices = _normalize_choices(policy_map[i])
        for j, p_ij in enumerate(state_row):
            if p_ij <= 0.0:
                continue
            target = channel.states[j]
            expected = sum(w * loss(wf, target, params) for wf, w in choices)
            total += mu[i] * p_ij * expected
    return float(total)


class EmpiricalCdf:
    """Right-continuous step CDF of a sampled performance statistic."""

    def __init__(self, support: np.ndarray, cumprob: np.ndarray, n: int) -> None:
        self.support = support
        self.cumprob = cumprob
        self.n = n

    def __call__(self, x: "float | np.ndarray") -> "float | np.ndarray":
        idx = np.searchsorted(self.support, x, side="right")
        probs = np.concatenate(([0.0], self.cumprob))
        result = probs[idx]
        if np.isscalar(x):
            return float(result)
        return result

    @property
    def mean(self) -> float:
        weights = np.diff(np.concatenate(([0.0], self.cumprob)))
        return float(np.dot(self.support, weights))


def empirical_cdf(samples: Sequence[float]) -> EmpiricalCdf:
    """Step CDF from samples; rejects empty input."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot build a CDF from zero samples")
    support, counts = np.unique(arr, return_counts=True)
    cumprob = np.cumsum(counts) / arr.size
    cumprob[-1] = 1.0
    return EmpiricalCdf(support=support, cumprob=cumprob, n=arr.size)


class DominanceOrder(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


def _merged_grid(f1: EmpiricalCdf, f2: EmpiricalCdf) -> np.ndarray:
    return np.union1d(f1.support, f2.support)


def _verdict(diffs: np.ndarray, tol: float) -> DominanceOrder:
    hi = float(diffs.max())
    lo = float(diffs.min())
    if hi <= tol and lo >= -tol:
        return DominanceOrder.EQUAL
    if lo >= -tol and hi > tol:
        return DominanceOrder.DOMINATES
    if hi <= tol and lo < -tol:
        return DominanceOrder.DOMINATED
    return DominanceOrder.INCOMPARABLE


def first_order_dominates(
    f1: EmpiricalCdf, f2: EmpiricalCdf, tol: float = DEFAULT_TOL
) -> DominanceOrder:
    """First-order ordering on a loss statistic (lower is better).

    Policy 1 dominates when its survival function is everywhere at most
    policy 2's, i.e. F1 >= F2 on the merged support, strictly (beyond tol)
    somewhere.
    """
    xs = _merged_grid(f1, f2)
    return _verdict(np.asarray(f1(xs)) - np.asarray(f2(xs)), tol)


def second_order_dominates(
    f1: EmpiricalCdf, f2: EmpiricalCdf, tol: float = DEFAULT_TOL
) -> DominanceOrder:
    """Second-order ordering for losses under risk aversion.

    Integrates the CDF difference by trapezoid over the merged grid and
    requires the upper-tail integral int_x^inf [F1 - F2] to be >= -tol at
    every grid point with strict excess (> tol) somewhere.  The upper-tail
    orientation makes a sure intermediate loss dominate an equal-mean coin
    flip between extremes, matching risk-averse preferences over costs;
    first-order dominance always implies this ordering.
    """
    xs = _merged_grid(f1, f2)
    diff = np.asarray(f1(xs)) - np.asarray(f2(xs))
    if xs.size == 1:
        return _verdict(np.zeros(1), tol)
    segments = 0.5 * (diff[:-1] + diff[1:]) * np.diff(xs)
    upper = np.concatenate((np.cumsum(segments[::-1])[::-1], [0.0]))
    return _verdict(upper, tol)


def statewise_dominates(
    loss_by_state_1: Sequence[float], loss_by_state_2: Sequence[float]
) -> bool:
    """Weak statewise ordering: policy 1's expected loss <= policy 2's in every state."""
    if len(loss_by_state_1) != len(loss_by_state_2):
        raise ValueError(
            f"state lists differ in length: {len(loss_by_state_1)} vs {len(loss_by_state_2)}"
        )
    return all(a <= b for a, b in zip(loss_by_state_1, loss_by_state_2))


@dataclass(frozen=True)
class RegretCurve:
    """Cumulative loss gap of a policy over a coupled comparator trace."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def final(self) -> float:
        return float(self.values[-1])


def regret_curve(trace_policy, trace_baseline) -> RegretCurve:
    """Per-PRI cumulative loss difference between two coupled traces.

    Both traces must come from the identical channel realization; that is
    enforced through the stored state-sequence hash.
    """
    if trace_policy.losses.size != trace_baseline.losses.size:
        raise ValueError(
            f"trace lengths differ: {trace_policy.losses.size} vs {trace_baseline.losses.size}"
        )
    if trace_policy.state_hash != trace_baseline.state_hash:
        raise ValueError("traces were generated on different channel realizations")
    return RegretCurve(values=np.cumsum(trace_policy.losses - trace_baseline.losses))


@dataclass(frozen=True)
class LinearityDiagnostic:
    """Least-squares shape summary of a regret curve."""

    slope: float
    r_squared: float
    doubling_ratio: float
    degenerate: bool = False


def linearity_diagnostic(curve: RegretCurve) -> LinearityDiagnostic:
    """Slope and R^2 of regret vs t, plus regret(n) / regret(n/2).

    A flat (e.g. all-zero) curve has no meaningful R^2 and is flagged
    degenerate with slope 0.
    """
    n = curve.n
    if n < 100:
        raise ValueError(f"need at least 100 points, got {n}")
    y = curve.values
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 1e-300:
        return LinearityDiagnostic(
            slope=0.0, r_squared=float("nan"), doubling_ratio=float("nan"), degenerate=True
        )
    t = np.arange(1, n + 1, dtype=float)
    slope, intercept = np.polyfit(t, y, 1)
    residuals = y - (slope * t + intercept)
    r_squared = 1.0 - float(np.sum(residuals**2)) / ss_tot
    half = y[n // 2 - 1]
    doubling = float(y[-1] / half) if half != 0 else float("nan")
    return LinearityDiagnostic(
        slope=float(slope), r_squared=r_squared, doubling_ratio=doubling
    )
