"""Bubble episodes from a statistic sequence crossing its critical values.

An episode opens at the first index with ``stat >= cv``, peaks at the largest
statistic inside the run (earliest on ties), and terminates at the first later
index with ``stat < cv``. Runs that reach the end of the sample are ongoing
and carry no end index. Missing (degenerate) statistics count as below.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .mc_critical import CvSequence
from .recursive import StatSequence
from .series import TimeSeries


def default_min_duration(T: int) -> int:
    return max(1, int(math.floor(math.log(T))))


@dataclass(frozen=True)
class BubbleEpisode:
    origin_index: int
    peak_index: int
    end_index: int | None
    peak_stat: float
    duration: int
    origin_date: str | None = None
    peak_date: str | None = None
    end_date: str | None = None

    @property
    def ongoing(self) -> bool:
        return self.end_index is None

    @property
    def stop(self) -> int:
        """Exclusive end of the run in observation indices."""
        return self.origin_index + self.duration

    def overlaps(self, start: int, stop: int) -> bool:
        return self.origin_index < stop and start < self.stop

    def to_dict(self) -> dict:
        return {
            "origin_index": self.origin_index,
            "peak_index": self.peak_index,
            "end_index": self.end_index,
            "origin_date": self.origin_date,
            "peak_date": self.peak_date,
            "end_date": self.end_date,
            "peak_stat": self.peak_stat,
            "duration": self.duration,
        }


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    m = np.concatenate([[False], mask, [False]]).astype(np.int8)
    d = np.diff(m)
    return list(zip(np.flatnonzero(d == 1).tolist(), np.flatnonzero(d == -1).tolist()))


def exceedance_mask(stats: StatSequence, cvs: CvSequence | np.ndarray) -> np.ndarray:
    cv = cvs.values if isinstance(cvs, CvSequence) else np.asarray(cvs, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        return np.asarray(stats.stats >= cv) & ~np.isnan(stats.stats) & ~np.isnan(cv)


def stamp_episodes(
    stats: StatSequence,
    cvs: CvSequence | np.ndarray,
    min_duration: int = 1,
    series: TimeSeries | None = None,
) -> list[BubbleEpisode]:
    """Date-stamp episodes; ``series`` (optional) supplies calendar dates.

    Indices in the result are observation indices (``stats.end_indices``
    values), not positions in the sequence.
    """
    if min_duration < 1:
        raise ConfigError(f"min_duration must be at least 1, got {min_duration}")
    if isinstance(cvs, CvSequence):
        if not np.array_equal(cvs.end_indices, stats.end_indices):
            raise ConfigError("statistic and critical-value sequences are not aligned")
    elif np.shape(cvs) != stats.stats.shape:
        raise ConfigError("statistic and critical-value sequences are not aligned")

    ends = stats.end_indices
    if ends.size > 1 and np.any(np.diff(ends) != 1):
        raise ConfigError("end indices must be consecutive")
    mask = exceedance_mask(stats, cvs)

    def _date(i):
        return None if series is None or i is None else str(series.dates[i])

    out = []
    for a, b in _runs(mask):
        if b - a < min_duration:
            continue
        peak = a + int(np.argmax(stats.stats[a:b]))
        end = int(ends[b]) if b < ends.size else None
        out.append(
            BubbleEpisode(
                origin_index=int(ends[a]),
                peak_index=int(ends[peak]),
                end_index=end,
                peak_stat=float(stats.stats[peak]),
                duration=b - a,
                origin_date=_date(int(ends[a])),
                peak_date=_date(int(ends[peak])),
                end_date=_date(end),
            )
        )
    return out


def episode_mask(episodes: Sequence[BubbleEpisode], end_indices: np.ndarray) -> np.ndarray:
    """In-episode indicator over ``end_indices``."""
    mask = np.zeros(end_indices.size, dtype=bool)
    for ep in episodes:
        mask |= (end_indices >= ep.origin_index) & (end_indices < ep.stop)
    return mask


def episode_coverage(episodes: Sequence[BubbleEpisode], T_effective: int) -> float:
    """Share of the effective sample spent inside episodes."""
    if T_effective < 1:
        raise ConfigError("T_effective must be positive")
    eps = sorted(episodes, key=lambda e: e.origin_index)
    for a, b in zip(eps[:-1], eps[1:]):
        if b.origin_index < a.stop:
            raise ConfigError(f"episodes starting at {a.origin_index} and {b.origin_index} overlap")
    total = sum(e.duration for e in eps)
    if total > T_effective:
        raise ConfigError(f"episodes cover {total} observations, more than {T_effective}")
    return total / T_effective


def peak_episode(episodes: Sequence[BubbleEpisode]) -> BubbleEpisode | None:
    """The episode holding the global maximum statistic (earliest on ties)."""
    best = None
    for ep in episodes:
        if best is None or ep.peak_stat > best.peak_stat:
            best = ep
    return best


def episodes_to_json(episodes: Sequence[BubbleEpisode]) -> str:
    return json.dumps([e.to_dict() for e in episodes], indent=2) + "\n"


EPISODE_COLUMNS = (
    "origin_index", "peak_index", "end_index",
    "origin_date", "peak_date", "end_date",
    "peak_stat", "duration",
)


def episodes_to_csv(episodes: Sequence[BubbleEpisode]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EPISODE_COLUMNS)
    for e in episodes:
        d = e.to_dict()
        d["peak_stat"] = format(e.peak_stat, ".17g")
        w.writerow(["" if d[c] is None else d[c] for c in EPISODE_COLUMNS])
    return buf.getvalue()
