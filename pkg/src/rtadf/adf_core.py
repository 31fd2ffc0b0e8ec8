"""OLS and the augmented Dickey-Fuller t-ratio on a single window.

Regression on observations ``y_0..y_{n-1}`` with ``k`` lagged differences::

    dy_t = a [+ g*t] + b*y_{t-1} + sum_{i=1..k} phi_i*dy_{t-i} + e_t,   t = k+1..n-1

The statistic is ``b_hat / se(b_hat)`` with the homoskedastic n-p standard
error. It is the same number for right- and left-tailed testing; only the
rejection region (see :meth:`AdfSpec.reject`) differs.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np

from .errors import ConfigError, DegenerateWindowError
from .series import TimeSeries

# |R_ii| below RANK_TOL * max|R_jj| counts as rank deficient
RANK_TOL = 1e-10
# RSS below RSS_TOL * sum(response**2) counts as a perfect fit
RSS_TOL = 1e-12

Deterministic = Literal["constant", "constant_and_trend"]


@dataclass(frozen=True)
class AdfSpec:
    """Regression specification.

    With ``lag_policy="fixed"`` exactly ``lags`` lagged differences are used;
    with ``lag_policy="bic"``, ``lags`` is the maximum order searched.
    """

    lags: int = 0
    lag_policy: Literal["fixed", "bic"] = "fixed"
    deterministic: Deterministic = "constant"
    tail: Literal["right", "left"] = "right"

    def __post_init__(self):
        if int(self.lags) != self.lags or self.lags < 0:
            raise ConfigError(f"lags must be a non-negative integer, got {self.lags!r}")
        if self.lag_policy not in ("fixed", "bic"):
            raise ConfigError(f"unknown lag policy {self.lag_policy!r}")
        if self.deterministic not in ("constant", "constant_and_trend"):
            raise ConfigError(f"unknown deterministic term {self.deterministic!r}")
        if self.tail not in ("right", "left"):
            raise ConfigError(f"unknown tail {self.tail!r}")

    @property
    def n_deterministic(self) -> int:
        return 1 if self.deterministic == "constant" else 2

    def n_regressors(self, k: int) -> int:
        return self.n_deterministic + 1 + k

    def min_obs(self, k: int) -> int:
        """Smallest window length that leaves n - 1 - k >= p + 2 regression rows."""
        return self.n_regressors(k) + k + 3

    def reject(self, stat: float, cv: float) -> bool:
        return stat > cv if self.tail == "right" else stat < cv

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    residual_variance: float
    n_obs: int
    degenerate: bool
    rss: float = float("nan")


def ols_fit(design, response) -> RegressionResult:
    """Least squares via a QR decomposition of the design.

    Rank-deficient designs come back with ``degenerate=True``, minimum-norm
    coefficients and infinite standard errors. A perfect fit is also flagged
    degenerate: any t-ratio computed from it is meaningless.
    """
    X = np.asarray(design, dtype=np.float64)
    y = np.asarray(response, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"design {X.shape} and response {y.shape} do not conform")
    n, p = X.shape
    if n <= p:
        raise ValueError(f"need more rows than columns, got {n}x{p}")

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.max() == 0.0 or np.any(diag <= RANK_TOL * diag.max()):
        beta = np.linalg.lstsq(X, y, rcond=None)[0]
        resid = y - X @ beta
        rss = float(resid @ resid)
        return RegressionResult(
            beta, np.full(p, np.inf), rss / (n - p), n, True, rss
        )

    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    s2 = rss / (n - p)
    # (X'X)^-1 = R^-1 R^-T
    rinv = np.linalg.solve(r, np.eye(p))
    se = np.sqrt(s2 * np.einsum("ij,ij->i", rinv, rinv))
    degenerate = rss <= RSS_TOL * float(y @ y)
    return RegressionResult(beta, se, s2, n, bool(degenerate), rss)


def _values(window) -> np.ndarray:
    if isinstance(window, TimeSeries):
        return window.values
    y = np.asarray(window, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("window must be one-dimensional")
    return y


def adf_design(y, k: int, deterministic: Deterministic = "constant", rows_from: int | None = None):
    """Build ``(X, dy, level_col)`` for the ADF regression.

    Rows start at original index ``rows_from`` (default ``k + 1``); passing a
    larger value aligns several lag orders on a common sample.
    """
    y = np.asarray(y, dtype=np.float64)
    start = k + 1 if rows_from is None else rows_from
    if start < k + 1:
        raise ValueError("rows_from must leave room for k lagged differences")
    dy = np.diff(y, prepend=np.nan)
    t = np.arange(start, y.size)
    cols = [np.ones(t.size)]
    if deterministic == "constant_and_trend":
        cols.append(t.astype(np.float64))
    level_col = len(cols)
    cols.append(y[t - 1])
    for i in range(1, k + 1):
        cols.append(dy[t - i])
    return np.column_stack(cols), dy[t], level_col


def _check_length(n: int, k: int, spec: AdfSpec) -> None:
    if n < spec.min_obs(k):
        raise ConfigError(
            f"window of {n} observations too short for {spec.n_regressors(k)} regressors "
            f"and {k} lags (need {spec.min_obs(k)})"
        )


def resolve_lags(window, spec: AdfSpec) -> int:
    if spec.lag_policy == "fixed":
        return spec.lags
    return select_lag_bic(window, spec.lags, spec.deterministic)


def adf_regression(window, spec: AdfSpec = AdfSpec()) -> tuple[RegressionResult, int]:
    y = _values(window)
    k = resolve_lags(y, spec)
    _check_length(y.size, k, spec)
    X, dy, level_col = adf_design(y, k, spec.deterministic)
    return ols_fit(X, dy), level_col


def adf_statistic(window, spec: AdfSpec = AdfSpec()) -> float:
    res, j = adf_regression(window, spec)
    if res.degenerate:
        raise DegenerateWindowError("degenerate window: perfect fit or rank-deficient design")
    return float(res.coefficients[j] / res.standard_errors[j])


def bic_values(window, k_max: int, deterministic: Deterministic = "constant") -> np.ndarray:
    """BIC for k = 0..k_max on the common sample implied by ``k_max``.

    Degenerate candidates get ``+inf``.
    """
    y = _values(window)
    spec = AdfSpec(lags=k_max, deterministic=deterministic)
    _check_length(y.size, k_max, spec)
    out = np.empty(k_max + 1)
    for k in range(k_max + 1):
        X, dy, _ = adf_design(y, k, deterministic, rows_from=k_max + 1)
        res = ols_fit(X, dy)
        n, p = X.shape
        if res.degenerate:
            out[k] = np.inf
        else:
            out[k] = n * np.log(res.rss / n) + p * np.log(n)
    return out


def select_lag_bic(window, k_max: int, deterministic: Deterministic = "constant") -> int:
    if k_max < 0:
        raise ConfigError("k_max must be non-negative")
    bic = bic_values(window, k_max, deterministic)
    if not np.any(np.isfinite(bic)):
        raise DegenerateWindowError("every candidate lag order gives a degenerate regression")
    # np.argmin returns the first minimum, so ties go to the smaller k
    return int(np.argmin(bic))
