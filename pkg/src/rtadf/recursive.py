"""Recursive right-tail ADF tests: full-sample ADF, RADF, SADF, GSADF and BSADF.

All statistics come from :func:`rtadf._kernels.sweep`, so a given window has a
single numerical value across tests and ``adf <= sadf <= gsadf`` holds
exactly, not merely up to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import _kernels
from .adf_core import AdfSpec, select_lag_bic
from .errors import ConfigError, DegenerateWindowError
from .series import TimeSeries

SequenceKind = Literal["forward_adf", "rolling_adf", "bsadf"]


def psy_min_window(T: int) -> int:
    """floor(T * (0.01 + 1.8 / sqrt(T)))."""
    return int(math.floor(T * (0.01 + 1.8 / math.sqrt(T))))


@dataclass(frozen=True)
class TestConfig:
    """Recursive-test parameters.

    ``min_window=None`` selects the rule in :func:`psy_min_window`, clamped
    from below so that the smallest window still supports the regression.
    """

    __test__ = False  # not a pytest class

    adf: AdfSpec = field(default_factory=AdfSpec)
    min_window: int | None = None
    rolling_width: int | None = None

    def __post_init__(self):
        if self.min_window is not None and self.min_window < 1:
            raise ConfigError(f"min_window must be positive, got {self.min_window}")
        if self.rolling_width is not None and self.rolling_width < 1:
            raise ConfigError(f"rolling_width must be positive, got {self.rolling_width}")

    def clamp(self, k: int) -> int:
        return self.adf.min_obs(k)

    def resolve_min_window(self, T: int, k: int | None = None) -> int:
        k = self.adf.lags if k is None else k
        lo = self.clamp(k)
        if self.min_window is None:
            w0 = max(psy_min_window(T), lo)
        else:
            w0 = self.min_window
            if w0 < lo:
                raise ConfigError(
                    f"min_window {w0} below the {lo} observations the regression needs"
                )
        if w0 > T:
            raise ConfigError(f"series of length {T} shorter than the minimum window {w0}")
        return w0

    def resolve_rolling_width(self, T: int, w0: int) -> int:
        if self.rolling_width is None:
            raise ConfigError("RADF needs a rolling width")
        if self.rolling_width < w0:
            raise ConfigError(
                f"rolling width {self.rolling_width} below the minimum window {w0}"
            )
        if self.rolling_width > T:
            raise ConfigError(f"rolling width {self.rolling_width} exceeds series length {T}")
        return self.rolling_width

    def to_dict(self) -> dict:
        return {
            "adf": self.adf.to_dict(),
            "min_window": self.min_window,
            "rolling_width": self.rolling_width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TestConfig":
        return cls(
            adf=AdfSpec(**d["adf"]),
            min_window=d.get("min_window"),
            rolling_width=d.get("rolling_width"),
        )


@dataclass(frozen=True, eq=False)
class StatSequence:
    end_indices: np.ndarray
    stats: np.ndarray
    kind: SequenceKind

    def __post_init__(self):
        if self.end_indices.shape != self.stats.shape:
            raise ValueError("end_indices and stats differ in length")

    def __len__(self) -> int:
        return self.stats.size

    @property
    def missing(self) -> np.ndarray:
        """True where the window was degenerate."""
        return np.isnan(self.stats)

    def sup(self) -> float:
        if np.all(self.missing):
            raise DegenerateWindowError(f"every {self.kind} window is degenerate")
        return float(np.nanmax(self.stats))


def _values(s) -> np.ndarray:
    if isinstance(s, TimeSeries):
        return s.values
    return np.ascontiguousarray(s, dtype=np.float64)


def _lags(y: np.ndarray, cfg: TestConfig) -> int:
    # a BIC policy picks one order on the full sample and holds it fixed across windows
    if cfg.adf.lag_policy == "bic":
        return select_lag_bic(y, cfg.adf.lags, cfg.adf.deterministic)
    return cfg.adf.lags


@dataclass(frozen=True)
class _Resolved:
    y: np.ndarray
    k: int
    w0: int
    trend: bool


def _resolve(s, cfg: TestConfig) -> _Resolved:
    y = _values(s)
    # w0 is clamped at the largest admissible lag order so it never depends on the data
    w0 = cfg.resolve_min_window(y.size)
    k = _lags(y, cfg)
    return _Resolved(y, k, w0, cfg.adf.deterministic == "constant_and_trend")


def _sweep(r: _Resolved, t_lo: int, t_hi: int, width: int = 0, back=False, fwd=False, roll=False):
    return _kernels.sweep(r.y, r.k, r.trend, r.w0, width, t_lo, t_hi, back, fwd, roll)


def adf_full(s, cfg: TestConfig = TestConfig()) -> float:
    r = _resolve(s, cfg)
    T = r.y.size
    _, fwd, _ = _sweep(r, T - 1, T - 1, fwd=True)
    if np.isnan(fwd[0]):
        raise DegenerateWindowError("degenerate window: the full sample")
    return float(fwd[0])


def sadf_sequence(s, cfg: TestConfig = TestConfig()) -> StatSequence:
    r = _resolve(s, cfg)
    T = r.y.size
    _, fwd, _ = _sweep(r, r.w0 - 1, T - 1, fwd=True)
    return StatSequence(np.arange(r.w0 - 1, T), fwd, "forward_adf")


def sadf(s, cfg: TestConfig = TestConfig()) -> tuple[float, StatSequence]:
    seq = sadf_sequence(s, cfg)
    return seq.sup(), seq


def radf_sequence(s, cfg: TestConfig) -> StatSequence:
    r = _resolve(s, cfg)
    T = r.y.size
    width = cfg.resolve_rolling_width(T, r.w0)
    _, _, roll = _sweep(r, width - 1, T - 1, width=width, roll=True)
    return StatSequence(np.arange(width - 1, T), roll, "rolling_adf")


def radf(s, cfg: TestConfig) -> tuple[float, StatSequence]:
    seq = radf_sequence(s, cfg)
    return seq.sup(), seq


def bsadf_sequence(s, cfg: TestConfig = TestConfig()) -> StatSequence:
    """BSADF(t) = sup over starts r1 in [0, t - w0 + 1] of ADF(r1, t)."""
    r = _resolve(s, cfg)
    T = r.y.size
    back, _, _ = _sweep(r, r.w0 - 1, T - 1, back=True)
    return StatSequence(np.arange(r.w0 - 1, T), back, "bsadf")


def gsadf(s, cfg: TestConfig = TestConfig()) -> float:
    return bsadf_sequence(s, cfg).sup()


@dataclass(frozen=True, eq=False)
class AllStatistics:
    adf: float
    sadf: float
    gsadf: float
    radf: float | None
    forward: StatSequence
    bsadf: StatSequence
    rolling: StatSequence | None


def all_statistics(s, cfg: TestConfig = TestConfig()) -> AllStatistics:
    """Every test from one sweep; NaN where a statistic is undefined."""
    r = _resolve(s, cfg)
    T = r.y.size
    width = 0
    if cfg.rolling_width is not None:
        width = cfg.resolve_rolling_width(T, r.w0)
    back, fwd, roll = _sweep(r, r.w0 - 1, T - 1, width=width, back=True, fwd=True, roll=width > 0)
    ends = np.arange(r.w0 - 1, T)
    forward = StatSequence(ends, fwd, "forward_adf")
    bs = StatSequence(ends, back, "bsadf")
    rolling = None
    if width:
        off = width - r.w0
        rolling = StatSequence(ends[off:], roll[off:], "rolling_adf")

    def _sup(a):
        return float(np.nanmax(a)) if np.any(~np.isnan(a)) else float("nan")

    return AllStatistics(
        adf=float(fwd[-1]),
        sadf=_sup(fwd),
        gsadf=_sup(back),
        radf=_sup(rolling.stats) if rolling is not None else None,
        forward=forward,
        bsadf=bs,
        rolling=rolling,
    )
