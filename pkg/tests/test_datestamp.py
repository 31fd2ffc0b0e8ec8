import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rtadf.datestamp import (
    BubbleEpisode,
    default_min_duration,
    episode_coverage,
    episode_mask,
    episodes_to_csv,
    episodes_to_json,
    exceedance_mask,
    peak_episode,
    stamp_episodes,
)
from rtadf.errors import ConfigError
from rtadf.mc_critical import simulate_null
from rtadf.recursive import StatSequence, TestConfig, bsadf_sequence
from rtadf.series import TimeSeries
from rtadf.synth import EvansSpec, gen_evans_bubble, regime_intervals


def _seq(stats, start=0):
    stats = np.asarray(stats, dtype=float)
    return StatSequence(np.arange(start, start + stats.size), stats, "bsadf")


def test_no_crossing():
    assert stamp_episodes(_seq(np.zeros(30)), np.ones(30), 1) == []


def test_single_run():
    stats = np.zeros(40)
    stats[10:20] = 2.0
    stats[14] = 3.0
    (ep,) = stamp_episodes(_seq(stats), np.ones(40), 5)
    assert (ep.origin_index, ep.peak_index, ep.end_index, ep.duration) == (10, 14, 20, 10)
    assert ep.peak_stat == 3.0


def test_offsets_are_observation_indices():
    stats = np.zeros(20)
    stats[3:6] = 2.0
    s = TimeSeries.from_values(np.arange(30.0) + 1, start="2021-01-01")
    (ep,) = stamp_episodes(_seq(stats, start=9), np.ones(20), 1, series=s)
    assert ep.origin_index == 12 and ep.end_index == 15
    assert ep.origin_date == "2021-01-13"
    assert ep.end_date == "2021-01-16"


def test_weak_inequality_and_ties():
    stats = np.array([0.0, 1.0, 2.0, 2.0, 1.0, 0.5])
    (ep,) = stamp_episodes(_seq(stats), np.ones(6), 1)
    assert ep.origin_index == 1  # stat == cv opens the episode
    assert ep.peak_index == 2  # earliest of the tied maxima
    assert ep.end_index == 5


def test_ongoing_episode():
    stats = np.zeros(20)
    stats[15:] = 2.0
    (ep,) = stamp_episodes(_seq(stats), np.ones(20), 2)
    assert ep.end_index is None and ep.ongoing
    assert ep.duration == 5
    assert episode_coverage([ep], 20) == 0.25


def test_min_duration_filter():
    stats = np.zeros(30)
    stats[2:4] = 2.0
    stats[10:16] = 2.0
    eps = stamp_episodes(_seq(stats), np.ones(30), 3)
    assert [e.origin_index for e in eps] == [10]


def test_missing_stats_count_as_below():
    stats = np.array([2.0, 2.0, np.nan, 2.0, 0.0])
    eps = stamp_episodes(_seq(stats), np.ones(5), 1)
    assert [(e.origin_index, e.end_index) for e in eps] == [(0, 2), (3, 4)]


def test_input_validation():
    with pytest.raises(ConfigError):
        stamp_episodes(_seq(np.zeros(5)), np.ones(5), 0)
    with pytest.raises(ConfigError, match="aligned"):
        stamp_episodes(_seq(np.zeros(5)), np.ones(6), 1)


def test_coverage_arithmetic():
    assert episode_coverage([], 100) == 0.0
    full = BubbleEpisode(0, 5, None, 1.0, 100)
    assert episode_coverage([full], 100) == 1.0
    a = BubbleEpisode(0, 1, 10, 1.0, 10)
    b = BubbleEpisode(20, 25, 40, 1.0, 20)
    assert episode_coverage([a, b], 100) == pytest.approx(0.30)
    with pytest.raises(ConfigError, match="overlap"):
        episode_coverage([a, BubbleEpisode(5, 6, 12, 1.0, 7)], 100)


def test_default_min_duration():
    assert default_min_duration(2) == 1
    assert default_min_duration(400) == 5
    assert default_min_duration(3000) == 8


masks = st.lists(st.booleans(), min_size=1, max_size=80)


@given(masks, st.integers(1, 6))
def test_mask_reconstruction(mask, min_dur):
    mask = np.array(mask)
    stats = np.where(mask, 2.0, 0.0)
    seq = _seq(stats, start=7)
    eps = stamp_episodes(seq, np.ones(mask.size), min_dur)
    want = np.zeros_like(mask)
    for a, b in regime_intervals(mask):
        if b - a >= min_dur:
            want[a:b] = True
    np.testing.assert_array_equal(episode_mask(eps, seq.end_indices), want)
    # disjoint, ordered
    for x, y in zip(eps[:-1], eps[1:]):
        assert x.stop < y.origin_index
    for e in eps:
        assert e.origin_index <= e.peak_index
        assert e.end_index is None or e.end_index >= e.peak_index
        assert e.duration >= min_dur


@given(masks, st.integers(1, 6))
def test_restamping_is_idempotent(mask, min_dur):
    stats = np.where(np.array(mask), 2.0, 0.0)
    seq = _seq(stats)
    eps = stamp_episodes(seq, np.ones(len(mask)), min_dur)
    again = stamp_episodes(_seq(episode_mask(eps, seq.end_indices).astype(float)), np.full(len(mask), 0.5), min_dur)
    assert [(e.origin_index, e.end_index, e.duration) for e in again] == [
        (e.origin_index, e.end_index, e.duration) for e in eps
    ]


@given(st.lists(st.floats(-3, 3), min_size=5, max_size=60), st.lists(st.floats(-1, 2), min_size=5, max_size=60))
def test_episode_boundaries_respect_crossing(stats, cv):
    n = min(len(stats), len(cv))
    stats, cv = np.array(stats[:n]), np.array(cv[:n])
    for e in stamp_episodes(_seq(stats), cv, 1):
        assert np.all(stats[e.origin_index : e.stop] >= cv[e.origin_index : e.stop])
        if e.end_index is not None:
            assert stats[e.end_index] < cv[e.end_index]
        if e.origin_index > 0:
            assert stats[e.origin_index - 1] < cv[e.origin_index - 1]


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_higher_level_never_increases_coverage():
    T = 200
    d = simulate_null(T, TestConfig(), replications=500, seed=13, tests=("gsadf",), keep_bsadf=True)
    cv95, cv99 = d.cv_sequence(0.95), d.cv_sequence(0.99)
    for seed in range(10):
        s, _ = gen_evans_bubble(EvansSpec(T=T), seed)
        seq = bsadf_sequence(s)
        c95 = episode_coverage(stamp_episodes(seq, cv95, 1), len(seq))
        c99 = episode_coverage(stamp_episodes(seq, cv99, 1), len(seq))
        assert c99 <= c95
        assert exceedance_mask(seq, cv99).sum() <= exceedance_mask(seq, cv95).sum()


@pytest.mark.slow
def test_evans_episodes_overlap_truth():
    T = 400
    d = simulate_null(T, TestConfig(), replications=1000, seed=17, tests=("gsadf",), keep_bsadf=True)
    cv = d.cv_sequence(0.95)
    hits = 0
    for seed in range(100):
        s, mask = gen_evans_bubble(EvansSpec(T=T), seed)
        eps = stamp_episodes(bsadf_sequence(s), cv, default_min_duration(T))
        truth = regime_intervals(mask)
        hits += any(e.overlaps(a, b) for e in eps for a, b in truth)
    assert hits >= 80


def test_peak_episode():
    a = BubbleEpisode(0, 1, 5, 2.0, 5)
    b = BubbleEpisode(10, 12, 15, 3.0, 5)
    assert peak_episode([a, b]) is b
    assert peak_episode([]) is None


def test_serialisation():
    s = TimeSeries.from_values(np.arange(10.0) + 1, start="2020-05-01")
    stats = np.array([0, 2, 2, 0, 0, 0, 3, 3, 3, 3], dtype=float)
    eps = stamp_episodes(_seq(stats), np.ones(10), 1, series=s)
    doc = json.loads(episodes_to_json(eps))
    assert doc[0]["origin_date"] == "2020-05-02" and doc[0]["end_index"] == 3
    assert doc[1]["end_index"] is None and doc[1]["end_date"] is None
    rows = list(csv.DictReader(io.StringIO(episodes_to_csv(eps))))
    assert rows[1]["end_index"] == "" and rows[1]["duration"] == "4"
    assert float(rows[0]["peak_stat"]) == 2.0
