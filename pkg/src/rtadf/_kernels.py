"""Compiled backward sweep over ADF windows.

For a fixed window end ``t`` the regression rows are added one at a time
going backwards (row ``t``, ``t-1``, ...), so after adding row ``s`` the
accumulated cross moments are exactly those of the window starting at
``r1 = s - k - 1``. Every window statistic in the package is read off this
sweep. Because the accumulation order for a window depends only on its end,
the same window always yields the bit-identical number whichever test asks
for it, and sup-orderings between tests hold exactly.

Levels are shifted by ``y[t]`` and the trend by ``t`` per end; the t-ratio on
the lagged level is invariant to both shifts once a constant is present.
"""
import numpy as np
from numba import njit

from .adf_core import RANK_TOL, RSS_TOL

_PIVOT_TOL = RANK_TOL  # Cholesky pivot relative to the column's own sum of squares


@njit(cache=True)
def _tstat(xtx, xty, yty, n, p, L, z, v):
    # Cholesky of the lower triangle of xtx into L; column 0 is the lagged level
    for i in range(p):
        for j in range(i + 1):
            s = xtx[i, j]
            for m in range(j):
                s -= L[i, m] * L[j, m]
            if i == j:
                if s <= _PIVOT_TOL * xtx[i, i] or s <= 0.0:
                    return np.nan
                L[i, i] = np.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    zz = 0.0
    for i in range(p):
        s = xty[i]
        for m in range(i):
            s -= L[i, m] * z[m]
        z[i] = s / L[i, i]
        zz += z[i] * z[i]
    rss = yty - zz
    if rss <= RSS_TOL * yty:
        return np.nan
    # with v = L^{-1} e_0: b_0 = v.z and [(X'X)^{-1}]_00 = v.v
    vv = 0.0
    b0 = 0.0
    for i in range(p):
        s = 1.0 if i == 0 else 0.0
        for m in range(i):
            s -= L[i, m] * v[m]
        v[i] = s / L[i, i]
        vv += v[i] * v[i]
        b0 += v[i] * z[i]
    s2 = rss / (n - p)
    return b0 / np.sqrt(s2 * vv)


@njit(cache=True)
def _tstat2(sxx, sx, n, sxr, sr, srr):
    # _tstat unrolled for columns (lagged level, constant)
    if sxx <= 0.0:
        return np.nan
    l00 = np.sqrt(sxx)
    l10 = sx / l00
    d = n - l10 * l10
    if d <= _PIVOT_TOL * n or d <= 0.0:
        return np.nan
    l11 = np.sqrt(d)
    z0 = sxr / l00
    z1 = (sr - l10 * z0) / l11
    rss = srr - (z0 * z0 + z1 * z1)
    if rss <= RSS_TOL * srr:
        return np.nan
    v0 = 1.0 / l00
    v1 = -l10 * v0 / l11
    b0 = v0 * z0 + v1 * z1
    s2 = rss / (n - 2.0)
    return b0 / np.sqrt(s2 * (v0 * v0 + v1 * v1))


@njit(cache=True)
def _sweep2(y, w0, width, t_lo, t_hi, want_back, want_fwd, want_roll):
    # sweep() for k = 0 with a constant only, on scalar accumulators
    n_out = t_hi - t_lo + 1
    back_sup = np.full(n_out, np.nan)
    fwd = np.full(n_out, np.nan)
    roll = np.full(n_out, np.nan)
    for t in range(t_lo, t_hi + 1):
        c = y[t]
        sxx = 0.0
        sx = 0.0
        sxr = 0.0
        sr = 0.0
        srr = 0.0
        nrow = 0
        s_roll = t - width + 2
        if want_back or want_fwd:
            s_min = 1
        else:
            s_min = max(s_roll, 1)
        best = np.nan
        for s in range(t, s_min - 1, -1):
            xv = y[s - 1] - c
            r = y[s] - y[s - 1]
            sxx += xv * xv
            sx += xv
            sxr += xv * r
            sr += r
            srr += r * r
            nrow += 1
            length = t - s + 2
            if length < w0:
                continue
            is_fwd = want_fwd and s == 1
            is_roll = want_roll and s == s_roll
            if not (want_back or is_fwd or is_roll):
                continue
            if nrow <= 2:
                stat = np.nan
            else:
                stat = _tstat2(sxx, sx, float(nrow), sxr, sr, srr)
            if want_back and stat == stat:
                if best != best or stat > best:
                    best = stat
            if is_fwd:
                fwd[t - t_lo] = stat
            if is_roll:
                roll[t - t_lo] = stat
        back_sup[t - t_lo] = best
    return back_sup, fwd, roll


@njit(cache=True)
def sweep(y, k, trend, w0, width, t_lo, t_hi, want_back, want_fwd, want_roll):
    """ADF statistics for window ends ``t_lo..t_hi`` (inclusive).

    Returns ``(back_sup, fwd, roll)`` arrays indexed by ``t - t_lo``:

    * ``back_sup``: sup over starts ``r1 <= t - w0 + 1`` (the BSADF value)
    * ``fwd``: the window ``[0, t]``
    * ``roll``: the window ``[t - width + 1, t]``

    Degenerate or undefined windows are NaN; a sup over only NaNs is NaN.
    """
    if k == 0 and not trend:
        return _sweep2(y, w0, width, t_lo, t_hi, want_back, want_fwd, want_roll)
    nd = 2 if trend else 1
    p = nd + 1 + k
    n_out = t_hi - t_lo + 1
    back_sup = np.full(n_out, np.nan)
    fwd = np.full(n_out, np.nan)
    roll = np.full(n_out, np.nan)

    dy = np.empty(y.size)
    dy[0] = np.nan
    for i in range(1, y.size):
        dy[i] = y[i] - y[i - 1]

    xtx = np.zeros((p, p))
    xty = np.zeros(p)
    x = np.zeros(p)
    L = np.zeros((p, p))
    z = np.zeros(p)
    v = np.zeros(p)

    for t in range(t_lo, t_hi + 1):
        c = y[t]
        xtx[:, :] = 0.0
        xty[:] = 0.0
        yty = 0.0
        nrow = 0
        s_roll = t - width + k + 2
        if want_back or want_fwd:
            s_min = k + 1
        else:
            s_min = max(s_roll, k + 1)
        best = np.nan
        for s in range(t, s_min - 1, -1):
            x[0] = y[s - 1] - c
            x[1] = 1.0
            if trend:
                x[2] = s - t
            for i in range(k):
                x[nd + 1 + i] = dy[s - 1 - i]
            r = dy[s]
            for i in range(p):
                xi = x[i]
                for j in range(i + 1):
                    xtx[i, j] += xi * x[j]
                xty[i] += xi * r
            yty += r * r
            nrow += 1

            length = t - s + k + 2
            if length < w0:
                continue
            is_fwd = want_fwd and s == k + 1
            is_roll = want_roll and s == s_roll
            if not (want_back or is_fwd or is_roll):
                continue
            if nrow <= p:
                stat = np.nan
            else:
                stat = _tstat(xtx, xty, yty, nrow, p, L, z, v)
            if want_back and stat == stat:
                if best != best or stat > best:
                    best = stat
            if is_fwd:
                fwd[t - t_lo] = stat
            if is_roll:
                roll[t - t_lo] = stat
        back_sup[t - t_lo] = best
    return back_sup, fwd, roll
