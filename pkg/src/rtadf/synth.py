"""Synthetic series for size and power studies.

Random draws are consumed in a fixed order so that a seed reproduces the
same path in any implementation that follows it:

* random walk / explosive AR(1): ``T`` standard normals, one per observation
* Evans bubble: per step ``t = 1..T-1`` one standard normal, then one
  uniform on [0, 1) (``theta = uniform < pi``), both always drawn
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError
from .mc_critical import NullSpec, null_values
from .series import TimeSeries


def gen_random_walk(T: int, null: NullSpec = NullSpec(), seed: int = 0) -> TimeSeries:
    y = null_values(T, null, np.random.default_rng(seed))
    return TimeSeries.from_values(y, label=f"rw(seed={seed})")


def explosive_ar1_values(
    T: int,
    rho: float,
    sigma: float,
    burn_regime_start: int,
    seed: int = 0,
    y0: float | None = None,
) -> np.ndarray:
    if T < 2:
        raise ConfigError(f"T must be at least 2, got {T}")
    if not rho > 1:
        raise ConfigError(f"rho must exceed 1, got {rho}")
    if not sigma >= 0:
        raise ConfigError(f"sigma must be non-negative, got {sigma}")
    if not 0 <= burn_regime_start < T:
        raise ConfigError(f"regime start {burn_regime_start} outside [0, {T})")
    e = sigma * np.random.default_rng(seed).standard_normal(T)
    y = np.empty(T)
    y[0] = e[0] if y0 is None else y0
    for t in range(1, T):
        a = rho if t >= burn_regime_start else 1.0
        y[t] = a * y[t - 1] + e[t]
    return y


def gen_explosive_ar1(
    T: int,
    rho: float,
    sigma: float = 1.0,
    burn_regime_start: int = 0,
    seed: int = 0,
    y0: float | None = None,
) -> TimeSeries:
    """Driftless random walk that turns into ``y_t = rho*y_{t-1} + sigma*e_t``
    from ``burn_regime_start`` on. Shares its normals with
    ``gen_random_walk(T, NullSpec(drift_scale=0, innovation_sd=sigma), seed)``.
    """
    y = explosive_ar1_values(T, rho, sigma, burn_regime_start, seed, y0)
    return TimeSeries.from_values(
        y, label=f"ar1(rho={rho:g}, start={burn_regime_start}, seed={seed})"
    )


@dataclass(frozen=True)
class EvansSpec:
    """Periodically collapsing bubble.

    Below ``b_threshold`` the bubble grows at ``1 + r``; above it, it either
    collapses toward ``delta`` (probability ``1 - pi``) or grows at
    ``(1 + r) / pi`` so that the conditional expectation still compounds at
    ``1 + r``. ``tau`` scales the mean-one lognormal shock.
    """

    T: int = 400
    r: float = 0.05
    b_threshold: float = 1.0
    delta: float = 0.5
    pi: float = 0.85
    tau: float = 0.05
    B0: float | None = None

    def __post_init__(self):
        if self.T < 2:
            raise ConfigError(f"T must be at least 2, got {self.T}")
        if not self.r > 0:
            raise ConfigError("r must be positive")
        if not self.b_threshold > 0:
            raise ConfigError("b_threshold must be positive")
        if not 0 < self.delta < self.b_threshold:
            raise ConfigError("delta must lie in (0, b_threshold)")
        if not 0 < self.pi <= 1:
            raise ConfigError("pi must lie in (0, 1]")
        if not self.tau >= 0:
            raise ConfigError("tau must be non-negative")
        if self.B0 is not None and not self.B0 > 0:
            raise ConfigError("B0 must be positive")

    @property
    def start(self) -> float:
        return self.delta if self.B0 is None else self.B0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class EvansPath:
    bubble: np.ndarray
    regime_mask: np.ndarray  # bubble > b_threshold
    collapses: np.ndarray  # True at t where theta_t = 0 struck from above the threshold


def evans_path(spec: EvansSpec, seed: int = 0) -> EvansPath:
    rng = np.random.default_rng(seed)
    T, r, b, delta, pi, tau = spec.T, spec.r, spec.b_threshold, spec.delta, spec.pi, spec.tau
    B = np.empty(T)
    collapses = np.zeros(T, dtype=bool)
    B[0] = spec.start
    for t in range(1, T):
        z = rng.standard_normal()
        theta = rng.random() < pi
        u = np.exp(tau * z - tau * tau / 2.0)
        prev = B[t - 1]
        if prev <= b:
            B[t] = (1.0 + r) * prev * u
        else:
            if not theta:
                collapses[t] = True
            B[t] = (delta + (1.0 + r) / pi * theta * (prev - delta / (1.0 + r))) * u
    return EvansPath(B, B > b, collapses)


def gen_evans_bubble(spec: EvansSpec = EvansSpec(), seed: int = 0) -> tuple[TimeSeries, np.ndarray]:
    path = evans_path(spec, seed)
    s = TimeSeries.from_values(path.bubble, label=f"evans(seed={seed})")
    return s, path.regime_mask


def falling_edges(mask: np.ndarray) -> np.ndarray:
    """Indices ``t`` with ``mask[t-1]`` true and ``mask[t]`` false."""
    mask = np.asarray(mask, dtype=bool)
    return np.flatnonzero(mask[:-1] & ~mask[1:]) + 1


def regime_intervals(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal true runs of ``mask`` as half-open ``(start, stop)`` pairs."""
    m = np.concatenate([[False], np.asarray(mask, dtype=bool), [False]])
    d = np.diff(m.astype(np.int8))
    return list(zip(np.flatnonzero(d == 1).tolist(), np.flatnonzero(d == -1).tolist()))
