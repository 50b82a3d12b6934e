"""Collision / missed-opportunity counts, scalar loss, and the SINR proxy."""

import math

import numpy as np
import pytest

from wavesel.metrics import (
    LossParams,
    collision_count,
    loss,
    missed_opportunity_count,
    score_pri,
    sinr_db,
)
from wavesel.waveforms import Waveform, enumerate_waveforms, widest_vacancy

PARAMS = LossParams(eta=0.1, snr0_db=10.0, inr_db=14.0)


def and_popcount(w, s):
    """Oracle: bitwise AND of supports, then popcount."""
    return sum(a & b for a, b in zip(w.support, s))


def longest_zero_substring(bits):
    best = 0
    for i in range(len(bits)):
        run = 0
        for b in bits[i:]:
            if b:
                break
            run += 1
        best = max(best, run)
    return best


def random_pair(rng, d):
    catalog = enumerate_waveforms(d)
    w = catalog[int(rng.integers(len(catalog)))]
    s = tuple(int(b) for b in rng.integers(0, 2, size=d))
    return w, s


class TestCollision:
    def test_full_overlap(self):
        assert collision_count(Waveform(2, 2, 4), (0, 0, 1, 1)) == 2

    def test_disjoint(self):
        assert collision_count(Waveform(0, 2, 4), (0, 0, 1, 1)) == 0

    def test_matches_bitwise_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(10_000):
            d = int(rng.integers(1, 9))
            w, s = random_pair(rng, d)
            assert collision_count(w, s) == and_popcount(w, s)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            collision_count(Waveform(0, 2, 4), (0, 0, 1))


class TestMissedOpportunity:
    def test_widest_used(self):
        assert missed_opportunity_count(Waveform(1, 3, 5), (1, 0, 0, 0, 1)) == 0

    def test_narrow_waveform(self):
        assert missed_opportunity_count(Waveform(1, 1, 5), (1, 0, 0, 0, 1)) == 2

    def test_matches_substring_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(10_000):
            d = int(rng.integers(1, 9))
            w, s = random_pair(rng, d)
            expected = max(longest_zero_substring(s) - w.width, 0)
            assert missed_opportunity_count(w, s) == expected


class TestLoss:
    def test_collision_branch(self):
        # Two colliding sub-bands: loss saturates at 1.
        assert loss(Waveform(2, 2, 4), (0, 0, 1, 1), PARAMS) == 1.0

    def test_missed_branch(self):
        assert loss(Waveform(1, 1, 5), (1, 0, 0, 0, 1), PARAMS) == pytest.approx(0.2)

    def test_widest_vacancy_scores_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            s = tuple(int(b) for b in rng.integers(0, 2, size=6))
            if all(s):
                continue
            w = widest_vacancy(s, rng)
            assert loss(w, s, PARAMS) == 0.0

    def test_monotone_in_occupancy(self):
        # Collisions are monotone in occupancy, and occupying a sub-band the
        # waveform uses can only raise the loss.  (Occupying a sub-band away
        # from the waveform may legitimately lower it, by shrinking the
        # widest vacancy and with it the missed-opportunity count.)
        rng = np.random.default_rng(29)
        for _ in range(2_000):
            d = int(rng.integers(2, 8))
            w, s = random_pair(rng, d)
            vacant = [i for i, b in enumerate(s) if b == 0]
            if not vacant:
                continue
            flip = vacant[int(rng.integers(len(vacant)))]
            denser = tuple(1 if i == flip else b for i, b in enumerate(s))
            assert collision_count(w, denser) >= collision_count(w, s)
            if w.start <= flip < w.start + w.width:
                assert loss(w, denser, PARAMS) >= loss(w, s, PARAMS)
            if collision_count(w, s) > 0:
                assert loss(w, denser, PARAMS) == loss(w, s, PARAMS) == 1.0

    def test_non_collision_bound(self):
        rng = np.random.default_rng(31)
        d = 5
        params = LossParams(eta=1.0 / d)
        for _ in range(2_000):
            w, s = random_pair(rng, d)
            if collision_count(w, s) == 0:
                assert loss(w, s, params) <= params.eta * (d - 1) < 1.0

    def test_eta_bound_enforced(self):
        with pytest.raises(ValueError):
            LossParams(eta=0.5).validate_for(5)
        LossParams(eta=0.2).validate_for(5)


class TestSinr:
    def test_width3_example(self):
        value = sinr_db(Waveform(1, 3, 5), (1, 0, 0, 0, 0), PARAMS)
        assert value == pytest.approx(10 * math.log10(50 / 3), abs=1e-9)
        assert value == pytest.approx(12.2185, abs=1e-3)

    def test_full_band_anchor(self):
        assert sinr_db(Waveform(0, 5, 5), (0, 0, 0, 0, 0), PARAMS) == pytest.approx(10.0)

    def test_single_collision_example(self):
        value = sinr_db(Waveform(0, 1, 5), (1, 0, 0, 0, 0), PARAMS)
        expected = 10 * math.log10(10 * 5 / (1 + 10 ** 1.4))
        assert value == pytest.approx(expected, abs=1e-9)
        assert value == pytest.approx(2.8202, abs=1e-3)

    def test_decreasing_in_collisions_and_width(self):
        s_free = (0, 0, 0, 0, 0)
        widths = [sinr_db(Waveform(0, w, 5), s_free, PARAMS) for w in (1, 2, 3, 4, 5)]
        assert all(a > b for a, b in zip(widths, widths[1:]))
        collides = [
            sinr_db(Waveform(0, 5, 5), tuple(1 if i < k else 0 for i in range(5)), PARAMS)
            for k in range(0, 4)
        ]
        assert all(a > b for a, b in zip(collides, collides[1:]))


class TestScorePri:
    def test_indicator_consistency(self):
        rng = np.random.default_rng(37)
        for _ in range(2_000):
            d = int(rng.integers(1, 9))
            w, s = random_pair(rng, d)
            out = score_pri(w, s, LossParams(eta=1.0 / d))
            assert out.collided == (out.n_collisions > 0)
            assert out.missed == (out.n_missed > 0)
            assert 0.0 <= out.loss <= 1.0
            if out.collided:
                assert out.loss == 1.0
