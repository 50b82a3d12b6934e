"""Per-PRI performance metrics: collisions, missed opportunities, loss, SINR.

A collision is any sub-band occupied by both the waveform and the interferer.
A missed opportunity is transmitting narrower than the widest vacant run of
the current state.  The scalar loss is 1 on any collision, otherwise a small
penalty per missed sub-band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .waveforms import Waveform, widest_vacancy_width

__all__ = [
    "LossParams",
    "PriOutcome",
    "collision_count",
    "missed_opportunity_count",
    "loss",
    "sinr_db",
    "score_pri",
]


@dataclass(frozen=True)
class LossParams:
    """Loss and SINR-proxy parameters.

    eta weights missed opportunities against collisions and must satisfy
    0 <= eta <= 1/d so that a collision is always the worst outcome; the
    bound is checked by ``validate_for`` once d is known.  snr0_db anchors
    the SINR proxy: a full-band, collision-free transmission scores exactly
    snr0_db.  inr_db is the per-colliding-sub-band interference-to-noise
    ratio.
    """

    eta: float = 0.1
    snr0_db: float = 10.0
    inr_db: float = 14.0

    def __post_init__(self) -> None:
        if self.eta < 0.0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")

    def validate_for(self, d: int) -> None:
        if self.eta > 1.0 / d + 1e-12:
            raise ValueError(f"eta {self.eta} exceeds 1/d = {1.0 / d} for d={d}")


def _check_dims(w: Waveform, state: Sequence[int]) -> None:
    if w.d != len(state):
        raise ValueError(f"waveform has d={w.d} but state has length {len(state)}")


def collision_count(w: Waveform, state: Sequence[int]) -> int:
    """Number of sub-bands occupied by both the waveform and the interferer."""
    _check_dims(w, state)
    return sum(state[i] for i in range(w.start, w.start + w.width))


def missed_opportunity_count(w: Waveform, state: Sequence[int]) -> int:
    """Vacant sub-bands left unused: max(widest vacancy width - |w|, 0)."""
    _check_dims(w, state)
    return max(widest_vacancy_width(state) - w.width, 0)


def loss(w: Waveform, state: Sequence[int], params: LossParams) -> float:
    """Scalar loss in [0, 1]: 1 on any collision, else eta per missed sub-band."""
    if collision_count(w, state) > 0:
        return 1.0
    return params.eta * missed_opportunity_count(w, state)


def sinr_db(w: Waveform, state: Sequence[int], params: LossParams) -> float:
    """Received SINR proxy in dB.

    Linear model: snr0 * d / (width + inr * n_collisions).  Noise scales with
    the occupied bandwidth; each colliding sub-band adds interference at inr.
    With a full-band collision-free waveform this reduces to snr0_db exactly.
    """
    n_c = collision_count(w, state)
    snr0 = 10.0 ** (params.snr0_db / 10.0)
    inr = 10.0 ** (params.inr_db / 10.0)
    linear = snr0 * w.d / (w.width + inr * n_c)
    return 10.0 * math.log10(linear)


@dataclass(frozen=True)
class PriOutcome:
    """Everything scored against the true state in one PRI."""

    n_collisions: int
    collided: int
    n_missed: int
    missed: int
    loss: float
    sinr_db: float

    def __post_init__(self) -> None:
        assert self.collided == (1 if self.n_collisions > 0 else 0)
        assert self.missed == (1 if self.n_missed > 0 else 0)
        assert 0.0 <= self.loss <= 1.0
        assert self.loss == 1.0 or self.collided == 0


def score_pri(w: Waveform, state: Sequence[int], params: LossParams) -> PriOutcome:
    """Score one transmitted waveform against the realized interference state."""
    n_c = collision_count(w, state)
    n_mo = missed_opportunity_count(w, state)
    return PriOutcome(
        n_collisions=n_c,
        collided=1 if n_c > 0 else 0,
        n_missed=n_mo,
        missed=1 if n_mo > 0 else 0,
        loss=1.0 if n_c > 0 else params.eta * n_mo,
        sinr_db=sinr_db(w, state, params),
    )
