"""Bivariate causality measures for real-valued time series.

Two estimators with opposite modeling assumptions:

* Granger causality: linear vector-autoregressive F-test. Does adding
  lags of x to an autoregression of y shrink the residual sum of squares
  more than chance would?
* Compression-complexity causality (CCC): a windowed, compression-based
  measure built on effort-to-compress (ETC), the number of non-sequential
  recursive pair substitution (NSRPS) steps needed to make a symbol
  sequence homogeneous. Does knowing x's past make y's next window easier
  to compress jointly than y's past alone does?

CCC works on symbolized series and can be negative; its magnitude carries
the strength of the association.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy import stats

# ---------------------------------------------------------------------------
# Effort-to-compress (NSRPS)
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _nsrps_steps(seq):  # pragma: no cover - exercised via etc()
    """NSRPS iteration count for a compact int64 symbol sequence.

    Each pass counts adjacent pairs non-overlapping left-to-right, replaces
    every occurrence of the most frequent pair (ties: earliest first
    occurrence) with a fresh symbol, and repeats until the sequence is
    homogeneous or a single symbol. Pair bookkeeping uses flat arrays over
    an alphabet bound of (initial symbols + one fresh symbol per step).
    """
    n = seq.shape[0]
    if n <= 1:
        return 0
    k = 0
    for i in range(n):
        if seq[i] + 1 > k:
            k = seq[i] + 1
    kbound = k + n
    s = seq.copy()
    counts = np.zeros(kbound * kbound, dtype=np.int32)
    firstp = np.zeros(kbound * kbound, dtype=np.int32)
    lastend = np.full(kbound * kbound, -1, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    steps = 0
    while n > 1:
        homogeneous = True
        for i in range(1, n):
            if s[i] != s[0]:
                homogeneous = False
                break
        if homogeneous:
            break
        ntouch = 0
        for i in range(n - 1):
            code = s[i] * kbound + s[i + 1]
            if lastend[code] == -1:
                touched[ntouch] = code
                ntouch += 1
                firstp[code] = i
                counts[code] = 1
                lastend[code] = i + 2
            elif i >= lastend[code]:
                counts[code] += 1
                lastend[code] = i + 2
        best_code = -1
        best_count = 0
        best_first = 0
        for t in range(ntouch):
            c = touched[t]
            if counts[c] > best_count or (
                counts[c] == best_count and firstp[c] < best_first
            ):
                best_code = c
                best_count = counts[c]
                best_first = firstp[c]
        for t in range(ntouch):
            c = touched[t]
            counts[c] = 0
            lastend[c] = -1
        a = best_code // kbound
        b = best_code % kbound
        w = 0
        i = 0
        while i < n:
            if i < n - 1 and s[i] == a and s[i + 1] == b:
                s[w] = k
                i += 2
            else:
                s[w] = s[i]
                i += 1
            w += 1
        n = w
        k += 1
        steps += 1
    return steps


def _compact_symbols(seq) -> np.ndarray:
    arr = np.asarray(seq)
    if arr.size == 0:
        raise ValueError("empty symbol sequence")
    if arr.ndim != 1:
        raise ValueError("symbol sequence must be 1D")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise ValueError("symbols must be integers")
        arr = as_int
    if arr.min() < 0:
        raise ValueError("symbols must be non-negative")
    _, inverse = np.unique(arr, return_inverse=True)
    return np.ascontiguousarray(inverse.astype(np.int64))


def etc(seq) -> int:
    """Effort-to-compress: NSRPS steps until the sequence is homogeneous.

    Invariant under any bijective relabeling of the alphabet; at most
    len(seq) - 1 since every step shortens the sequence.
    """
    return int(_nsrps_steps(_compact_symbols(seq)))


def etc_normalized(seq) -> float:
    """ETC divided by (len - 1); a single symbol has nothing to compress."""
    arr = _compact_symbols(seq)
    if arr.size == 1:
        return 0.0
    return _nsrps_steps(arr) / (arr.size - 1)


def _joint_codes(a, b) -> np.ndarray:
    sa = _compact_symbols(a)
    sb = _compact_symbols(b)
    if sa.size != sb.size:
        raise ValueError(f"length mismatch: {sa.size} vs {sb.size}")
    return sa * (sb.max() + 1) + sb


def etc_joint(a, b) -> int:
    """ETC of the compound sequence z(i) = (a(i), b(i)) over the product alphabet."""
    return etc(_joint_codes(a, b))


def etc_joint_normalized(a, b) -> float:
    return etc_normalized(_joint_codes(a, b))


# ---------------------------------------------------------------------------
# Symbolization and CCC
# ---------------------------------------------------------------------------


def symbolize(series, n_bins: int) -> np.ndarray:
    """Equal-width binning of a series into symbols 0..n_bins-1.

    Bins partition [min, max] of the whole series; the maximum lands in
    the top bin. A constant series has no usable range and is rejected.
    """
    if n_bins < 2:
        raise ValueError("need at least 2 bins")
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        raise ValueError("empty series")
    lo = x.min()
    hi = x.max()
    if not hi > lo:
        raise ValueError("constant series cannot be symbolized (zero range)")
    idx = np.floor((x - lo) / (hi - lo) * n_bins).astype(np.int64)
    return np.minimum(idx, n_bins - 1)


@dataclass(frozen=True)
class CccConfig:
    """Windowing and binning for the CCC estimator.

    past_len L: samples of history per window; step w: stride between
    windows; future_len delta: samples whose complexity increment is
    measured; n_bins B: symbol alphabet size.
    """

    past_len: int = 100
    step: int = 15
    future_len: int = 50
    n_bins: int = 4

    def __post_init__(self):
        if self.past_len < 1 or self.step < 1 or self.future_len < 1:
            raise ValueError("window parameters must be >= 1")
        if self.n_bins < 2:
            raise ValueError("need at least 2 bins")


def ccc(x, y, config: CccConfig) -> float:
    """Compression-complexity causality of x on y (direction x -> y).

    Both series are symbolized over their own global range. For each
    window, the increase in compression complexity when y's future block
    is appended to y's own past is compared with the increase when the
    same block is instead appended to x's past (an intervention swapping
    the history that generated it); the mean difference over windows is
    returned. Both increments live on the same alphabet, so the measure
    is centered at zero for independent series. It may take either sign;
    the magnitude carries the strength of the association.
    """
    xv = np.asarray(x, dtype=float).ravel()
    yv = np.asarray(y, dtype=float).ravel()
    if xv.size != yv.size:
        raise ValueError(f"length mismatch: {xv.size} vs {yv.size}")
    n = yv.size
    L, w, delta = config.past_len, config.step, config.future_len
    if n < L + delta:
        raise ValueError(
            f"series of length {n} too short for past {L} + future {delta}"
        )
    sx = symbolize(xv, config.n_bins)
    sy = symbolize(yv, config.n_bins)
    terms = []
    for t in range(L, n - delta + 1, w):
        y_past = sy[t - L : t]
        x_past = sx[t - L : t]
        dy = sy[t : t + delta]
        cc_self = etc_normalized(np.concatenate((y_past, dy))) - etc_normalized(
            y_past
        )
        cc_cross = etc_normalized(np.concatenate((x_past, dy))) - etc_normalized(
            x_past
        )
        terms.append(cc_self - cc_cross)
    return float(np.mean(terms))


# ---------------------------------------------------------------------------
# Granger causality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GcConfig:
    max_order: int = 30
    alpha: float = 0.05

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


@dataclass
class GrangerResult:
    f_stat: float
    p_value: float
    log_ratio: float  # ln(RSS_restricted / RSS_full)
    order: int
    n_obs: int

    def significant(self, alpha: float) -> bool:
        return self.p_value < alpha


def _lag_columns(v: np.ndarray, order: int, start: int) -> np.ndarray:
    n = v.size
    return np.column_stack([v[start - j : n - j] for j in range(1, order + 1)])


def _ols_rss(design: np.ndarray, target: np.ndarray) -> tuple[float, int]:
    beta, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ beta
    return float(resid @ resid), int(rank)


def granger_f_statistic(x, y, config: GcConfig = GcConfig()) -> GrangerResult:
    """Granger F-test for the direction x -> y.

    The autoregression order is chosen by AIC on y's own-lag model over
    1..max_order (evaluated on a common sample so candidate fits are
    comparable); selecting on y alone keeps the choice independent of x,
    so the F-test stays calibrated under the null. The restricted model
    regresses y(t) on an intercept and its own p lags; the full model
    adds p lags of x. F compares the restricted/full residual sums of
    squares with (p, T - 2p - 1) degrees of freedom; ln(RSS_r / RSS_f)
    is reported alongside.
    """
    xv = np.asarray(x, dtype=float).ravel()
    yv = np.asarray(y, dtype=float).ravel()
    if xv.size != yv.size:
        raise ValueError(f"length mismatch: {xv.size} vs {yv.size}")
    n = yv.size
    if n <= 2 * config.max_order + 2:
        raise ValueError(
            f"series of length {n} too short for max_order {config.max_order}"
        )
    # F needs T - 2p - 1 > 0; cap candidate orders accordingly.
    p_cap = min(config.max_order, (n - 2) // 3)
    if p_cap < 1:
        raise ValueError("series too short for any usable order")

    sel_start = p_cap
    t_sel = n - sel_start
    target_sel = yv[sel_start:]
    intercept = np.ones((t_sel, 1))
    best_order = 0
    best_aic = np.inf
    for p in range(1, p_cap + 1):
        design = np.hstack((intercept, _lag_columns(yv, p, sel_start)))
        rss, _ = _ols_rss(design, target_sel)
        aic = t_sel * np.log(max(rss, 1e-300) / t_sel) + 2.0 * (p + 1)
        if aic < best_aic:
            best_aic = aic
            best_order = p
    p = best_order

    start = p
    t_eff = n - p
    target = yv[start:]
    ones = np.ones((t_eff, 1))
    design_r = np.hstack((ones, _lag_columns(yv, p, start)))
    design_f = np.hstack((design_r, _lag_columns(xv, p, start)))
    rss_f, rank_f = _ols_rss(design_f, target)
    if rank_f < design_f.shape[1]:
        raise np.linalg.LinAlgError(
            "rank-deficient full regression (collinear series?)"
        )
    rss_r, rank_r = _ols_rss(design_r, target)
    if rank_r < design_r.shape[1]:
        raise np.linalg.LinAlgError("rank-deficient restricted regression")

    df_den = t_eff - 2 * p - 1
    if rss_f <= 0.0:
        f_stat = 0.0 if rss_r <= 0.0 else np.inf
        log_ratio = 0.0 if rss_r <= 0.0 else np.inf
    else:
        f_stat = ((rss_r - rss_f) / p) / (rss_f / df_den)
        log_ratio = float(np.log(rss_r / rss_f))
    p_value = float(stats.f.sf(f_stat, p, df_den))
    return GrangerResult(float(f_stat), p_value, float(log_ratio), p, t_eff)


# ---------------------------------------------------------------------------
# Aggregation over trials
# ---------------------------------------------------------------------------


@dataclass
class CausalityReport:
    """Per-trial values of one directional statistic plus their aggregate."""

    direction: str
    values: np.ndarray
    mean: float
    std: float

    @classmethod
    def from_values(cls, direction: str, values) -> "CausalityReport":
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            raise ValueError("no trial values to aggregate")
        return cls(direction, v, float(v.mean()), float(v.std(ddof=1)) if v.size > 1 else 0.0)

    @property
    def n_trials(self) -> int:
        return self.values.size
