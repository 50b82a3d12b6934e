"""Seeded episode runner, parameter sweeps, and aggregate statistics.

Event order within a PRI: the policy decides from what it already knows, the
channel then steps, the outcome is scored against the post-transition state,
and finally the policy receives the (possibly missed) observation of that
state together with the realized loss.  Comparators that act on the true
state (the genie) decide after the step instead.

Reproducibility contract: one master seed; trial t derives its streams from
``seed + t``, split into three independent substreams consumed in a fixed
order per PRI -- channel (one uniform per step, plus one draw when the
initial state is random), observation (one uniform per PRI), and policy
(whatever the policy documents).  Splitting per component keeps the channel
realization identical across policies on the same trial, which is what makes
regret curves couplable.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import (
    ChannelError,
    MarkovChannel,
    build_channel,
    validate_occupancy,
    validate_transitions,
)
from .dominance import (
    empirical_cdf,
    first_order_dominates,
    regret_curve,
    second_order_dominates,
    statewise_dominates,
)
from .metrics import LossParams, score_pri
from .policies import Policy, make_policy
from .waveforms import Waveform, enumerate_waveforms

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "EpisodeTrace",
    "AggregateStats",
    "SweepRow",
    "default_states",
    "run_episode",
    "run_trials",
    "sweep_p12",
    "sweep_joint",
    "sweep_miss",
    "short_horizon",
    "run_dominance",
    "parse_grid",
    "write_rows_csv",
    "write_rows_json",
    "write_regret_csv",
    "write_trace",
    "CSV_COLUMNS",
]

CSV_COLUMNS = [
    "experiment",
    "p12",
    "p21",
    "p_miss",
    "n",
    "trials",
    "policy",
    "collision_rate",
    "collision_se",
    "missed_opp_rate",
    "missed_se",
    "mean_loss",
    "loss_se",
    "mean_sinr_db",
    "sinr_se",
    "final_regret",
]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def default_states(d: int = 5) -> tuple[tuple[int, ...], ...]:
    """Two mirrored single-occupant states: first sub-band vs last sub-band.

    These admit a width-(d-2) waveform that never collides with either state,
    which is what separates the mirror / safe-middle / anticipate behavioral
    regimes as the switching probability grows.
    """
    if d < 2:
        raise ConfigError(f"default states need d >= 2, got {d}")
    a = tuple(1 if i == 0 else 0 for i in range(d))
    b = tuple(1 if i == d - 1 else 0 for i in range(d))
    return (a, b)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce an experiment bit-for-bit."""

    d: int = 5
    n: int = 10_000
    trials: int = 20
    eta: float = 0.1
    p_miss: float = 0.0
    snr0_db: float = 10.0
    inr_db: float = 14.0
    policies: tuple[str, ...] = ("saa", "ts")
    seed: int = 1234
    p12: float = 0.3
    p21: float = 0.3
    states: tuple[tuple[int, ...], ...] | None = None
    transitions: tuple[tuple[float, ...], ...] | None = None
    initial: int | str = "random"
    ts_prior: float = 1.0
    ts_noise: float = 0.25
    alpha: float = 0.9
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.n < 1:
            raise ConfigError(f"horizon must be at least 1, got {self.n}")
        if self.trials < 1:
            raise ConfigError(f"need at least one trial, got {self.trials}")
        for name in ("p12", "p21", "p_miss"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not self.policies:
            raise ConfigError("policy list is empty")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        try:
            self.loss_params().validate_for(self.d)
            self.channel_states()
            self.channel_matrix()
            for p in self.policies:
                if not (p in ("saa", "ts", "bellman", "genie") or p.startswith("fixed:")):
                    raise ConfigError(f"unknown policy {p!r}")
        except (ValueError, ChannelError) as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def loss_params(self) -> LossParams:
        return LossParams(eta=self.eta, snr0_db=self.snr0_db, inr_db=self.inr_db)

    def channel_states(self) -> tuple[tuple[int, ...], ...]:
        if self.states is not None:
            return tuple(validate_occupancy(s, self.d) for s in self.states)
        return default_states(self.d)

    def channel_matrix(self) -> np.ndarray:
        if self.transitions is not None:
            P = validate_transitions(self.transitions)
            if P.shape[0] != len(self.channel_states()):
                raise ConfigError(
                    f"matrix is {P.shape[0]}x{P.shape[1]} for "
                    f"{len(self.channel_states())} states"
                )
            return P
        if len(self.channel_states()) != 2:
            raise ConfigError("p12/p21 shorthand requires exactly 2 states")
        return np.array(
            [[1.0 - self.p12, self.p12], [self.p21, 1.0 - self.p21]], dtype=float
        )

    def pair_probs(self) -> tuple[float, float]:
        """(p12, p21) as they appear in output rows; nan for non-2-state chains."""
        P = self.channel_matrix()
        if P.shape[0] == 2:
            return float(P[0, 1]), float(P[1, 0])
        return float("nan"), float("nan")

    def build_channel(self, rng: np.random.Generator) -> MarkovChannel:
        return build_channel(
            self.channel_states(), self.channel_matrix(), self.initial, rng
        )

    def make_policy(self, name: str, channel: MarkovChannel) -> Policy:
        return make_policy(
            name,
            d=self.d,
            channel=channel,
            params=self.loss_params(),
            ts_prior=self.ts_prior,
            ts_noise=self.ts_noise,
            alpha=self.alpha,
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["policies"] = list(self.policies)
        if self.states is not None:
            data["states"] = [list(s) for s in self.states]
        if self.transitions is not None:
            data["transitions"] = [list(r) for r in self.transitions]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        channel = data.pop("channel", None)
        if channel is None and "states" in data and "P" in data:
            # A bare channel-spec file is also accepted as a config.
            channel = data
            data = {k: v for k, v in data.items() if k in ("d", "p_miss")}
        if channel is not None:
            if "states" not in channel or "P" not in channel:
                raise ConfigError("channel spec needs both 'states' and 'P'")
            states = tuple(tuple(int(b) for b in s) for s in channel["states"])
            if not states:
                raise ConfigError("channel spec has an empty state list")
            data.setdefault("d", int(channel.get("d", len(states[0]))))
            data["states"] = states
            data["transitions"] = tuple(
                tuple(float(x) for x in row) for row in channel["P"]
            )
            if "initial" in channel:
                data["initial"] = channel["initial"]
            if "p_miss" in channel:
                data["p_miss"] = float(channel["p_miss"])
        if "policies" in data and not isinstance(data["policies"], (list, tuple)):
            raise ConfigError("policies must be a list of names")
        if "policies" in data:
            data["policies"] = tuple(data["policies"])
        if "states" in data and data["states"] is not None:
            data["states"] = tuple(tuple(int(b) for b in s) for s in data["states"])
        if "transitions" in data and data["transitions"] is not None:
            data["transitions"] = tuple(
                tuple(float(x) for x in row) for row in data["transitions"]
            )
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class EpisodeTrace:
    """Per-PRI record of one seeded episode."""

    policy: str
    initial_state: int
    states: np.ndarray  # realized state index at each PRI
    obs_ids: np.ndarray  # index into channel states, or num_states for all-zeros
    arms: np.ndarray  # catalog index of the transmitted waveform
    n_collisions: np.ndarray
    n_missed: np.ndarray
    losses: np.ndarray
    sinr_db: np.ndarray
    _state_hash: str | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.losses.size)

    @property
    def state_hash(self) -> str:
        """Digest of the realized state sequence, used to enforce regret coupling."""
        if self._state_hash is None:
            payload = np.concatenate(
                ([self.initial_state], self.states)
            ).astype(np.int64)
            self._state_hash = hashlib.sha1(payload.tobytes()).hexdigest()
        return self._state_hash

    @property
    def prev_states(self) -> np.ndarray:
        """State index the channel was in when each decision was made."""
        return np.concatenate(([self.initial_state], self.states[:-1]))

    @property
    def collision_rate(self) -> float:
        return float(np.mean(self.n_collisions > 0))

    @property
    def missed_opp_rate(self) -> float:
        return float(np.mean(self.n_missed > 0))

    @property
    def mean_loss(self) -> float:
        return float(np.mean(self.losses))

    @property
    def mean_sinr_db(self) -> float:
        return float(np.mean(self.sinr_db))


def _trial_rngs(
    seed: int, trial: int
) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    base = seed + trial
    return (
        np.random.default_rng([base, 0]),
        np.random.default_rng([base, 1]),
        np.random.default_rng([base, 2]),
    )


def run_episode(config: ExperimentConfig, policy_name: str, trial: int) -> EpisodeTrace:
    """One seeded episode of one policy; deterministic given (config, trial)."""
    channel_rng, obs_rng, policy_rng = _trial_rngs(config.seed, trial)
    channel = config.build_channel(channel_rng)
    params = config.loss_params()
    params.validate_for(config.d)
    policy = config.make_policy(policy_name, channel)
    catalog = enumerate_waveforms(config.d)
    arm_index = {w: k for k, w in enumerate(catalog)}
    state_tuples = channel.states
    num_states = channel.num_states
    zeros = (0,) * config.d
    zeros_id = dict(zip(state_tuples, range(num_states))).get(zeros, num_states)

    # Outcome lookup tables: scoring is pure, so precompute per (arm, state).
    outcome = [
        [score_pri(w, s, params) for s in state_tuples] for w in catalog
    ]
    nc_tab = [[o.n_collisions for o in row] for row in outcome]
    nmo_tab = [[o.n_missed for o in row] for row in outcome]
    loss_tab = [[o.loss for o in row] for row in outcome]
    sinr_tab = [[o.sinr_db for o in row] for row in outcome]

    n = config.n
    p_miss = config.p_miss
    states_arr = np.empty(n, dtype=np.int32)
    obs_arr = np.empty(n, dtype=np.int32)
    arms_arr = np.empty(n, dtype=np.int32)
    nc_arr = np.empty(n, dtype=np.int32)
    nmo_arr = np.empty(n, dtype=np.int32)
    loss_arr = np.empty(n, dtype=np.float64)
    sinr_arr = np.empty(n, dtype=np.float64)

    initial_state = channel.current
    uses_true_state = policy.uses_true_state
    decide = policy.decide
    decide_from_state = policy.decide_from_state if uses_true_state else None
    update = policy.update
    step = channel.step
    obs_random = obs_rng.random

    for t in range(n):
        if uses_true_state:
            j = step(channel_rng)
            w = decide_from_state(state_tuples[j], policy_rng)
        else:
            w = decide(policy_rng)
            j = step(channel_rng)
        k = arm_index[w]
        loss_t = loss_tab[k][j]
        miss = obs_random() < p_miss
        obs = zeros if miss else state_tuples[j]
        update(obs, loss_t)
        states_arr[t] = j
        obs_arr[t] = zeros_id if miss else j
        arms_arr[t] = k
        nc_arr[t] = nc_tab[k][j]
        nmo_arr[t] = nmo_tab[k][j]
        loss_arr[t] = loss_t
        sinr_arr[t] = sinr_tab[k][j]

    return EpisodeTrace(
        policy=policy.name,
        initial_state=initial_state,
        states=states_arr,
        obs_ids=obs_arr,
        arms=arms_arr,
        n_collisions=nc_arr,
        n_missed=nmo_arr,
        losses=loss_arr,
        sinr_db=sinr_arr,
    )


@dataclass
class AggregateStats:
    """Trial-pooled statistics for one policy under one configuration."""

    policy: str
    n: int
    trials: int
    collision_rate: float
    collision_se: float
    missed_opp_rate: float
    missed_se: float
    mean_loss: float
    loss_se: float
    mean_sinr_db: float
    sinr_se: float
    final_regret: float
    per_trial: dict[str, np.ndarray] = field(default_factory=dict, repr=False)


def _pooled(values: np.ndarray) -> tuple[float, float]:
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(values.size))


def _trial_task(
    config: ExperimentConfig, trial: int, collect_curves: bool
) -> dict[str, dict]:
    """Run one trial of every requested policy plus the coupled genie baseline."""
    genie_trace = run_episode(config, "genie", trial)
    out: dict[str, dict] = {}
    for name in config.policies:
        trace = genie_trace if name == "genie" else run_episode(config, name, trial)
        curve = regret_curve(trace, genie_trace)
        entry = {
            "collision": trace.collision_rate,
            "missed": trace.missed_opp_rate,
            "loss": trace.mean_loss,
            "sinr": trace.mean_sinr_db,
            "regret": curve.final,
        }
        if collect_curves:
            entry["curve"] = curve.values
        out[name] = entry
    return out


def run_trials(
    config: ExperimentConfig, collect_regret_curves: bool = False
) -> dict[str, AggregateStats]:
    """Independent seeded trials for every configured policy.

    A genie episode is always run alongside on the same trial streams; its
    coupled cumulative loss gap populates ``final_regret`` (and, on request,
    the full mean regret curve under key ``"curve"`` of ``per_trial``).
    Trials may execute in parallel; results merge in trial order, so output
    is independent of scheduling.
    """
    config.validate()
    trial_results: list[dict[str, dict]]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            trial_results = list(
                pool.map(
                    _trial_task,
                    [config] * config.trials,
                    range(config.trials),
                    [collect_regret_curves] * config.trials,
                )
            )
    else:
        trial_results = [
            _trial_task(config, t, collect_regret_curves) for t in range(config.trials)
        ]

    stats: dict[str, AggregateStats] = {}
    for name in config.policies:
        per = {
            key: np.array([r[name][key] for r in trial_results])
            for key in ("collision", "missed", "loss", "sinr", "regret")
        }
        collision, collision_se = _pooled(per["collision"])
        missed, missed_se = _pooled(per["missed"])
        mean_loss, loss_se = _pooled(per["loss"])
        sinr, sinr_se = _pooled(per["sinr"])
        entry = AggregateStats(
            policy=name,
            n=config.n,
            trials=config.trials,
            collision_rate=collision,
            collision_se=collision_se,
            missed_opp_rate=missed,
            missed_se=missed_se,
            mean_loss=mean_loss,
            loss_se=loss_se,
            mean_sinr_db=sinr,
            sinr_se=sinr_se,
            final_regret=float(per["regret"].mean()),
            per_trial=per,
        )
        if collect_regret_curves:
            curves = np.stack([r[name]["curve"] for r in trial_results])
            entry.per_trial["curve"] = curves.mean(axis=0)
        stats[name] = entry
    return stats


@dataclass(frozen=True)
class SweepRow:
    """One output row: a policy's aggregates at one grid point."""

    experiment: str
    p12: float
    p21: float
    p_miss: float
    n: int
    trials: int
    policy: str
    collision_rate: float
    collision_se: float
    missed_opp_rate: float
    missed_se: float
    mean_loss: float
    loss_se: float
    mean_sinr_db: float
    sinr_se: float
    final_regret: float

    @classmethod
    def from_stats(
        cls, experiment: str, config: ExperimentConfig, stats: AggregateStats
    ) -> "SweepRow":
        p12, p21 = config.pair_probs()
        return cls(
            experiment=experiment,
            p12=p12,
            p21=p21,
            p_miss=config.p_miss,
            n=config.n,
            trials=config.trials,
            policy=stats.policy,
            collision_rate=stats.collision_rate,
            collision_se=stats.collision_se,
            missed_opp_rate=stats.missed_opp_rate,
            missed_se=stats.missed_se,
            mean_loss=stats.mean_loss,
            loss_se=stats.loss_se,
            mean_sinr_db=stats.mean_sinr_db,
            sinr_se=stats.sinr_se,
            final_regret=stats.final_regret,
        )


def _check_grid(grid: Sequence[float]) -> list[float]:
    values = [float(g) for g in grid]
    if not values:
        raise ConfigError("sweep grid is empty")
    for g in values:
        if not 0.0 <= g <= 1.0:
            raise ConfigError(f"grid value {g} outside [0, 1]")
    return values


def _sweep(
    experiment: str, config: ExperimentConfig, configs: Iterable[ExperimentConfig]
) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for cfg in configs:
        stats = run_trials(cfg)
        rows.extend(
            SweepRow.from_stats(experiment, cfg, stats[name]) for name in cfg.policies
        )
    return rows


def sweep_p12(
    config: ExperimentConfig, grid: Sequence[float], p21: float | None = None
) -> list[SweepRow]:
    """Vary the first state's switching probability, holding p21 fixed."""
    values = _check_grid(grid)
    fixed_p21 = config.p21 if p21 is None else float(p21)
    return _sweep(
        "sweep-p12",
        config,
        (replace(config, p12=g, p21=fixed_p21, transitions=None) for g in values),
    )


def sweep_joint(
    config: ExperimentConfig, grid: Sequence[float], experiment: str = "sweep-joint"
) -> list[SweepRow]:
    """Vary p12 = p21 jointly from nearly static to deterministic swapping."""
    values = _check_grid(grid)
    return _sweep(
        experiment,
        config,
        (replace(config, p12=g, p21=g, transitions=None) for g in values),
    )


def sweep_miss(config: ExperimentConfig, grid: Sequence[float]) -> list[SweepRow]:
    """Vary the sensing-failure probability on a fixed channel."""
    values = _check_grid(grid)
    return _sweep(
        "sweep-miss", config, (replace(config, p_miss=g) for g in values)
    )


def short_horizon(config: ExperimentConfig, grid: Sequence[float]) -> list[SweepRow]:
    """Joint sweep at a drastically reduced horizon (default n=300)."""
    return sweep_joint(config, grid, experiment="short-horizon")


def run_dominance(config: ExperimentConfig, pair: tuple[str, str]) -> dict:
    """Compare two policies' loss distributions and emit a JSON-able report.

    Per-PRI losses pooled over all trials feed the first- and second-order
    predicates; per-trial mean losses give the long-run averages; per-state
    expected losses (grouped by the state the channel was in at decision
    time) feed the statewise check.
    """
    config.validate()
    first, second = pair
    pooled: dict[str, list[np.ndarray]] = {first: [], second: []}
    trial_means: dict[str, list[float]] = {first: [], second: []}
    num_states = len(config.channel_states())
    state_sums = {name: np.zeros(num_states) for name in pair}
    state_counts = {name: np.zeros(num_states) for name in pair}
    for trial in range(config.trials):
        for name in pair:
            trace = run_episode(config, name, trial)
            pooled[name].append(trace.losses)
            trial_means[name].append(trace.mean_loss)
            prev = trace.prev_states
            for s in range(num_states):
                mask = prev == s
                state_sums[name][s] += trace.losses[mask].sum()
                state_counts[name][s] += mask.sum()
    cdfs = {name: empirical_cdf(np.concatenate(pooled[name])) for name in pair}
    by_state = {
        name: list(state_sums[name] / np.maximum(state_counts[name], 1.0))
        for name in pair
    }
    fsd = first_order_dominates(cdfs[first], cdfs[second])
    ssd = second_order_dominates(cdfs[first], cdfs[second])
    return {
        "policy_pair": [first, second],
        "fsd_verdict": fsd.value,
        "ssd_verdict": ssd.value,
        "statewise": statewise_dominates(by_state[first], by_state[second]),
        "lambda_1": float(np.mean(trial_means[first])),
        "lambda_2": float(np.mean(trial_means[second])),
        "n": config.n,
        "trials": config.trials,
    }


def parse_grid(spec: str) -> list[float]:
    """Parse ``start:stop:step`` into an inclusive grid, rounded to 10 places."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad grid {spec!r}") from exc
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    values = []
    k = 0
    while True:
        v = round(start + k * step, 10)
        if v > stop + 1e-12:
            break
        values.append(v)
        k += 1
    return values


def _header_lines(experiment: str, config: ExperimentConfig) -> list[str]:
    cfg = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return [
        f"# experiment={experiment}",
        f"# seed={config.seed}",
        f"# config={cfg}",
    ]


def write_rows_csv(
    rows: Sequence[SweepRow], experiment: str, config: ExperimentConfig
) -> str:
    """Render sweep rows as CSV text with # config header lines."""
    buf = io.StringIO()
    for line in _header_lines(experiment, config):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([getattr(row, c) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_rows_json(
    rows: Sequence[SweepRow], experiment: str, config: ExperimentConfig
) -> str:
    payload = {
        "experiment": experiment,
        "seed": config.seed,
        "config": config.to_dict(),
        "rows": [asdict(r) for r in rows],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_regret_csv(
    curves: dict[str, np.ndarray], experiment: str, config: ExperimentConfig
) -> str:
    """Long-format mean cumulative regret curves: policy, t, cum_regret."""
    buf = io.StringIO()
    for line in _header_lines(experiment, config):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["policy", "t", "cum_regret"])
    for name, curve in curves.items():
        for t, value in enumerate(curve, start=1):
            writer.writerow([name, t, float(value)])
    return buf.getvalue()


def write_trace(
    trace: EpisodeTrace, config: ExperimentConfig, fmt: str = "csv", trial: int = 0
) -> str:
    """Serialize one episode trace; waveforms as start:width (CSV) or 0/1 arrays (JSON)."""
    catalog = enumerate_waveforms(config.d)
    states = config.channel_states()
    zeros = (0,) * config.d

    def obs_bits(obs_id: int) -> tuple[int, ...]:
        return states[obs_id] if obs_id < len(states) else zeros

    if fmt == "json":
        records = [
            {
                "t": t + 1,
                "state": int(trace.states[t]),
                "observation": list(obs_bits(int(trace.obs_ids[t]))),
                "waveform": {
                    "start": catalog[int(trace.arms[t])].start,
                    "width": catalog[int(trace.arms[t])].width,
                    "support": list(catalog[int(trace.arms[t])].support),
                },
                "n_collisions": int(trace.n_collisions[t]),
                "n_missed": int(trace.n_missed[t]),
                "loss": float(trace.losses[t]),
                "sinr_db": float(trace.sinr_db[t]),
            }
            for t in range(trace.n)
        ]
        payload = {
            "policy": trace.policy,
            "trial": trial,
            "config": config.to_dict(),
            "pri": records,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    buf = io.StringIO()
    for line in _header_lines("trace", config):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "policy",
            "trial",
            "t",
            "state",
            "observation",
            "waveform",
            "n_collisions",
            "n_missed",
            "loss",
            "sinr_db",
        ]
    )
    for t in range(trace.n):
        wf = catalog[int(trace.arms[t])]
        writer.writerow(
            [
                trace.policy,
                trial,
                t + 1,
                int(trace.states[t]),
                "".join(str(b) for b in obs_bits(int(trace.obs_ids[t]))),
                wf.label,
                int(trace.n_collisions[t]),
                int(trace.n_missed[t]),
                float(trace.losses[t]),
                float(trace.sinr_db[t]),
            ]
        )
    return buf.getvalue()
