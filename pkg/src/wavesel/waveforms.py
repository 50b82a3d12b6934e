"""Contiguous-sub-band waveform catalog and vacancy geometry.

The shared band is split into ``d`` sub-bands; a waveform is a contiguous run
of them.  For a band of ``d`` sub-bands there are ``d*(d+1)/2`` such runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Waveform",
    "enumerate_waveforms",
    "zero_runs",
    "widest_vacancy",
    "widest_vacancy_width",
]


@dataclass(frozen=True)
class Waveform:
    """A contiguous grouping of sub-bands: occupies [start, start + width)."""

    start: int
    width: int
    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"sub-band count must be positive, got {self.d}")
        if not 1 <= self.width <= self.d:
            raise ValueError(f"width {self.width} outside [1, {self.d}]")
        if not 0 <= self.start <= self.d - self.width:
            raise ValueError(
                f"start {self.start} outside [0, {self.d - self.width}] for width {self.width}"
            )

    @property
    def support(self) -> tuple[int, ...]:
        """0/1 occupancy vector of the transmitted sub-bands."""
        return tuple(
            1 if self.start <= i < self.start + self.width else 0 for i in range(self.d)
        )

    @property
    def label(self) -> str:
        """Compact ``start:width`` form used in traces and CLI names."""
        return f"{self.start}:{self.width}"


def enumerate_waveforms(d: int) -> list[Waveform]:
    """All contiguous waveforms for a d-sub-band channel.

    Ordered by width descending, then start ascending.  This ordering is the
    canonical arm indexing used by the learning policy, so it must not change.

    Args:
        d: number of sub-bands, at least 1.

    Returns:
        List of length d*(d+1)/2.
    """
    if d < 1:
        raise ValueError(f"sub-band count must be positive, got {d}")
    return [
        Waveform(start=s, width=w, d=d)
        for w in range(d, 0, -1)
        for s in range(0, d - w + 1)
    ]


def zero_runs(bits: Sequence[int]) -> list[tuple[int, int]]:
    """Maximal runs of zeros in an occupancy vector, as (start, length) pairs.

    Runs do not wrap: the first and last sub-band are not adjacent.
    """
    runs: list[tuple[int, int]] = []
    start = None
    for i, b in enumerate(bits):
        if b == 0:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - start))
            start = None
    if start is not None:
        runs.append((start, len(bits) - start))
    return runs


def widest_vacancy_width(bits: Sequence[int]) -> int:
    """Length of the longest all-zero run; 0 when fully occupied."""
    runs = zero_runs(bits)
    return max((length for _, length in runs), default=0)


def widest_vacancy(bits: Sequence[int], rng: np.random.Generator) -> Waveform:
    """Waveform covering a maximal-length vacant run of ``bits``.

    Ties between equally long runs are broken uniformly at random.  When no
    sub-band is vacant a width-1 waveform at a uniformly random start is
    returned, because the radar still has to transmit that PRI.

    ``rng`` is consumed only on a tie or on the fully-occupied fallback
    (a single ``integers`` draw), which keeps seeded episodes reproducible.
    """
    d = len(bits)
    runs = zero_runs(bits)
    if not runs:
        return Waveform(start=int(rng.integers(d)), width=1, d=d)
    best = max(length for _, length in runs)
    candidates = [r for r in runs if r[1] == best]
    if len(candidates) == 1:
        start, length = candidates[0]
    else:
        start, length = candidates[int(rng.integers(len(candidates)))]
    return Waveform(start=start, width=length, d=d)
