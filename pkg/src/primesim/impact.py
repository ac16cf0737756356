"""Market-impact measurement pipeline.

Runs identically on real trade dumps and simulator output: resample trades
and quotes into fixed windows, normalize price moves by trailing volatility
and net volumes by trailing weighted volume, then estimate

* the concave initial-impact exponent (one-parameter power fit with a
  closed-form scale, searched by golden section),
* the transient-impact decay kernel (no-intercept OLS of normalized price
  change on lagged normalized signed volume),
* the order-sign autocorrelation and its power-law decay.

All functions are pure; rerunning on the same inputs is bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .tradeio import QuoteRecord, TradeRecord

WINDOW_NS = 5_000_000_000            # 5 s resample windows
HORIZON_NS = 3_600_000_000_000       # 1 h trailing normalization horizon
DELTA_RANGE = (0.1, 1.5)
MAX_LAG = 100


@dataclass(frozen=True)
class Window:
    """One resample interval: net signed volume against mid-price change."""

    t: int              # window index from the session start
    start_ns: int
    open_mid2x: int
    close_mid2x: int
    q_net: int          # buy volume minus sell volume
    gross: int          # total traded volume

    @property
    def dp(self) -> float:
        """Mid change over the window in ticks (may be half-integral)."""
        return (self.close_mid2x - self.open_mid2x) / 2.0


@dataclass(frozen=True)
class AdjustedSample:
    t: int
    q: float            # net volume over trailing weighted volume
    y: float            # mid change over trailing volatility
    prev_sign: int      # sign of the previous window's net volume


@dataclass(frozen=True)
class DeltaFit:
    delta: float
    k: float
    sse: float
    n: int


@dataclass(frozen=True)
class DecayKernel:
    beta: np.ndarray        # impact coefficients for lags 0..K
    cumulative: np.ndarray  # partial sums of beta
    stderr: np.ndarray      # OLS standard errors per coefficient
    n_rows: int
    cond: float


@dataclass(frozen=True)
class PowerLawFit:
    c: float
    alpha: float
    r2: float
    n: int


@dataclass(frozen=True)
class BucketStats:
    """Per-quantile-bucket means; buckets partition the sample by q order."""

    lo: np.ndarray
    hi: np.ndarray
    mean_q: np.ndarray
    mean_y: np.ndarray
    count: np.ndarray


def signed_power(q: np.ndarray, delta: float) -> np.ndarray:
    """sgn(q) * |q|**delta, the odd power transform used throughout."""
    return np.sign(q) * np.abs(q) ** delta


# ---------------------------------------------------------------- resampling


def resample(
    trades: list[TradeRecord],
    quotes: list[QuoteRecord],
    window_ns: int = WINDOW_NS,
) -> list[Window]:
    """Cut the session into contiguous windows of net volume and mid change.

    Mids carry forward through quiet windows. Leading windows with no defined
    mid yet are dropped; after the first two-sided quote the mid is always
    defined by carry-forward.
    """
    if window_ns <= 0:
        raise ValueError("window length must be positive")
    if not quotes:
        raise ValueError("no quotes; cannot form mid prices")
    mid_times, mid_values = [], []
    for q in quotes:
        if q.bid is not None and q.ask is not None:
            mid_times.append(q.ts)
            mid_values.append(q.bid + q.ask)
    mid_times = np.asarray(mid_times, dtype=np.int64)
    mid_values = np.asarray(mid_values, dtype=np.int64)
    if mid_times.size and not np.all(np.diff(mid_times) >= 0):
        raise ValueError("quotes must be time-sorted")

    trade_ts = np.asarray([t.ts for t in trades], dtype=np.int64)
    if trade_ts.size and not np.all(np.diff(trade_ts) >= 0):
        raise ValueError("trades must be time-sorted")
    signed = np.asarray([t.sign * t.qty for t in trades], dtype=np.int64)
    gross = np.asarray([t.qty for t in trades], dtype=np.int64)

    t0 = int(quotes[0].ts) if not trade_ts.size else min(int(quotes[0].ts), int(trade_ts[0]))
    t1 = int(quotes[-1].ts) if not trade_ts.size else max(int(quotes[-1].ts), int(trade_ts[-1]))
    n_windows = (t1 - t0) // window_ns
    if n_windows < 1:
        raise ValueError("session shorter than one window")

    bounds = t0 + np.arange(n_windows + 1, dtype=np.int64) * window_ns
    mid_idx = np.searchsorted(mid_times, bounds, side="right") - 1
    cut = np.searchsorted(trade_ts, bounds, side="left")
    sums = np.concatenate([[0], np.cumsum(signed)])
    gsums = np.concatenate([[0], np.cumsum(gross)])

    windows = []
    for k in range(n_windows):
        if mid_idx[k] < 0 or mid_idx[k + 1] < 0:
            continue  # no mid defined yet
        windows.append(Window(
            t=k,
            start_ns=int(bounds[k]),
            open_mid2x=int(mid_values[mid_idx[k]]),
            close_mid2x=int(mid_values[mid_idx[k + 1]]),
            q_net=int(sums[cut[k + 1]] - sums[cut[k]]),
            gross=int(gsums[cut[k + 1]] - gsums[cut[k]]),
        ))
    return windows


def _horizon_windows(windows: list[Window], horizon_ns: int) -> int:
    if len(windows) > 1:
        window_ns = windows[1].start_ns - windows[0].start_ns
        assert windows[1].t - windows[0].t == 1, "windows must be contiguous"
    else:
        window_ns = WINDOW_NS
    return max(1, horizon_ns // window_ns)


def rolling_volatility(
    windows: list[Window], horizon_ns: int = HORIZON_NS, min_periods: int = 2,
) -> np.ndarray:
    """Trailing sample std of per-window mid change, excluding the current window.

    Entries with fewer than min_periods (>= 2) trailing windows are NaN.
    """
    h = _horizon_windows(windows, horizon_ns)
    min_periods = max(2, min_periods)
    dp = np.asarray([w.dp for w in windows])
    sigma = np.full(len(windows), np.nan)
    for i in range(len(windows)):
        lo = max(0, i - h)
        if i - lo >= min_periods:
            sigma[i] = np.std(dp[lo:i], ddof=1)
    return sigma


def weighted_volume(
    windows: list[Window], horizon_ns: int = HORIZON_NS, min_periods: int = 1,
) -> np.ndarray:
    """Trailing linearly weighted mean of gross volume, newest window heaviest.

    Excludes the current window; all-zero history yields NaN (unusable).
    """
    h = _horizon_windows(windows, horizon_ns)
    min_periods = max(1, min_periods)
    gross = np.asarray([w.gross for w in windows], dtype=float)
    vol = np.full(len(windows), np.nan)
    for i in range(len(windows)):
        lo = max(0, i - h)
        n = i - lo
        if n < min_periods:
            continue
        w = np.arange(1, n + 1, dtype=float)
        v = float(np.dot(w, gross[lo:i]) / w.sum())
        if v > 0:
            vol[i] = v
    return vol


def adjust(
    windows: list[Window], sigma: np.ndarray, volume: np.ndarray,
) -> tuple[list[AdjustedSample], int]:
    """Normalize windows into (q, y) samples; returns (samples, skipped count)."""
    if not len(windows) == len(sigma) == len(volume):
        raise ValueError("windows, sigma, and volume must align")
    samples = []
    skipped = 0
    for i, w in enumerate(windows):
        s, v = sigma[i], volume[i]
        if not (np.isfinite(s) and s > 0 and np.isfinite(v) and v > 0):
            skipped += 1
            continue
        prev_sign = int(np.sign(windows[i - 1].q_net)) if i > 0 else 0
        samples.append(AdjustedSample(t=w.t, q=w.q_net / v, y=w.dp / s, prev_sign=prev_sign))
    return samples, skipped


# ------------------------------------------------------------------- fitting


def fit_delta(
    samples: list[AdjustedSample],
    delta_range: tuple[float, float] = DELTA_RANGE,
    tol: float = 1e-4,
) -> DeltaFit:
    """Golden-section search for the impact exponent.

    For each candidate delta the scale k is the closed-form least-squares
    solution of y ~ k * sgn(q)|q|**delta through the origin; the outer search
    minimizes the SSE over delta (assumed unimodal on the search interval).
    """
    if len(samples) < 100:
        raise ValueError(f"need at least 100 samples to fit delta, got {len(samples)}")
    q = np.asarray([s.q for s in samples])
    y = np.asarray([s.y for s in samples])
    if np.all(q == 0):
        raise ValueError("all net volumes are zero; delta is unidentifiable")

    def sse_at(delta: float) -> tuple[float, float]:
        x = signed_power(q, delta)
        sxx = float(np.dot(x, x))
        k = float(np.dot(x, y)) / sxx
        r = y - k * x
        return float(np.dot(r, r)), k

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = delta_range
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, _ = sse_at(c)
    fd, _ = sse_at(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc, _ = sse_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd, _ = sse_at(d)
    delta = (a + b) / 2.0
    sse, k = sse_at(delta)
    return DeltaFit(delta=delta, k=k, sse=sse, n=len(samples))


def _bucket_chunks(n: int, n_buckets: int) -> list[np.ndarray]:
    order_positions = np.arange(n)
    return np.array_split(order_positions, n_buckets)


def bucket_means(
    samples: list[AdjustedSample], n_buckets: int = 20, delta: float | None = None,
) -> BucketStats:
    """Quantile-bucket samples by q and report per-bucket mean (q, y).

    With delta supplied the abscissa is sgn(q)|q|**delta (bucket membership is
    unchanged because the transform is monotone). Ties are broken by stable
    sample order; bucket counts differ by at most one.
    """
    if len(samples) < n_buckets:
        raise ValueError(f"need >= {n_buckets} samples, got {len(samples)}")
    q = np.asarray([s.q for s in samples])
    y = np.asarray([s.y for s in samples])
    key = q if delta is None else signed_power(q, delta)
    order = np.argsort(q, kind="stable")
    chunks = _bucket_chunks(len(samples), n_buckets)
    lo, hi, mq, my, cnt = [], [], [], [], []
    for chunk in chunks:
        idx = order[chunk]
        lo.append(key[idx[0]])
        hi.append(key[idx[-1]])
        mq.append(float(np.mean(key[idx])))
        my.append(float(np.mean(y[idx])))
        cnt.append(len(idx))
    return BucketStats(lo=np.asarray(lo), hi=np.asarray(hi), mean_q=np.asarray(mq),
                       mean_y=np.asarray(my), count=np.asarray(cnt))


def split_by_previous_sign(
    samples: list[AdjustedSample], n_buckets: int = 20, delta: float | None = None,
) -> tuple[BucketStats, BucketStats]:
    """Bucket means conditioned on the previous window's net-volume sign.

    Both groups share one set of bucket edges computed over the combined
    (nonzero previous sign) sample; returns (after-net-buy, after-net-sell).
    Buckets empty for a group carry NaN means and zero count.
    """
    kept = [s for s in samples if s.prev_sign != 0]
    if not any(s.prev_sign > 0 for s in kept) or not any(s.prev_sign < 0 for s in kept):
        raise ValueError("need samples after both net-buy and net-sell windows")
    if len(kept) < n_buckets:
        raise ValueError(f"need >= {n_buckets} usable samples, got {len(kept)}")
    q = np.asarray([s.q for s in kept])
    y = np.asarray([s.y for s in kept])
    prev = np.asarray([s.prev_sign for s in kept])
    key = q if delta is None else signed_power(q, delta)
    order = np.argsort(q, kind="stable")
    chunks = _bucket_chunks(len(kept), n_buckets)

    def group(sign: int) -> BucketStats:
        lo, hi, mq, my, cnt = [], [], [], [], []
        for chunk in chunks:
            idx = order[chunk]
            lo.append(key[idx[0]])
            hi.append(key[idx[-1]])
            members = idx[prev[idx] == sign]
            if members.size:
                mq.append(float(np.mean(key[members])))
                my.append(float(np.mean(y[members])))
            else:
                mq.append(math.nan)
                my.append(math.nan)
            cnt.append(int(members.size))
        return BucketStats(lo=np.asarray(lo), hi=np.asarray(hi), mean_q=np.asarray(mq),
                           mean_y=np.asarray(my), count=np.asarray(cnt))

    return group(1), group(-1)


def decay_regression(
    samples: list[AdjustedSample], delta: float, max_lag: int = MAX_LAG,
) -> DecayKernel:
    """No-intercept OLS of y_t on sgn(q)|q|**delta at lags 0..max_lag.

    Rows are the sample times whose full lag window is usable; requires at
    least 9 * max_lag such rows (ten lag horizons of consecutive samples).
    Solved by normal equations with a condition-number guard.
    """
    by_t = {s.t: s for s in samples}
    if not by_t:
        raise ValueError("no usable samples")
    t_min = min(by_t)
    t_max = max(by_t)
    span = t_max - t_min + 1
    present = np.zeros(span, dtype=bool)
    x_all = np.zeros(span)
    y_all = np.zeros(span)
    for s in samples:
        i = s.t - t_min
        present[i] = True
        x_all[i] = math.copysign(abs(s.q) ** delta, s.q)
        y_all[i] = s.y

    run = 0
    rows = []
    for i in range(span):
        run = run + 1 if present[i] else 0
        if run >= max_lag + 1:
            rows.append(i)
    n_rows = len(rows)
    if n_rows < 9 * max_lag:
        raise ValueError(
            f"need >= {9 * max_lag} usable consecutive rows for K={max_lag}, got {n_rows}")

    rows = np.asarray(rows)
    lags = np.arange(max_lag + 1)
    design = x_all[rows[:, None] - lags[None, :]]
    target = y_all[rows]
    gram = design.T @ design
    cond = float(np.linalg.cond(gram))
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericalError(f"decay regression design is rank-deficient (cond={cond:.3g})")
    gram_inv = np.linalg.inv(gram)
    beta = gram_inv @ (design.T @ target)
    resid = target - design @ beta
    dof = max(1, n_rows - (max_lag + 1))
    sigma2 = float(np.dot(resid, resid)) / dof
    stderr = np.sqrt(sigma2 * np.diag(gram_inv))
    return DecayKernel(beta=beta, cumulative=np.cumsum(beta), stderr=stderr,
                       n_rows=n_rows, cond=cond)


def order_sign_acf(signs: np.ndarray, max_lag: int = MAX_LAG) -> np.ndarray:
    """Sample autocorrelation of a +/-1 sign stream at lags 1..max_lag.

    Biased (divide-by-N) estimator on the mean-removed series, which keeps the
    autocorrelation sequence positive semidefinite.
    """
    s = np.asarray(signs, dtype=float)
    if s.size < 10 * max_lag:
        raise ValueError(f"need >= {10 * max_lag} signs for max_lag={max_lag}, got {s.size}")
    if not np.all(np.isin(s, (-1.0, 1.0))):
        raise ValueError("signs must be -1 or +1")
    z = s - s.mean()
    denom = float(np.dot(z, z))
    if denom == 0.0:
        raise ValueError("constant sign stream has no autocorrelation")
    return np.asarray([float(np.dot(z[:-lag], z[lag:])) / denom
                       for lag in range(1, max_lag + 1)])


def fit_power_law(values: np.ndarray, lags: np.ndarray | None = None) -> PowerLawFit:
    """Fit C * lag**(-alpha) to the positive entries of a lag-indexed series."""
    v = np.asarray(values, dtype=float)
    if lags is None:
        lags = np.arange(1, v.size + 1)
    mask = v > 0
    if int(mask.sum()) < 5:
        raise NumericalError(
            f"need >= 5 positive values for a power-law fit, got {int(mask.sum())}")
    lx = np.log(np.asarray(lags, dtype=float)[mask])
    ly = np.log(v[mask])
    lx_c = lx - lx.mean()
    slope = float(np.dot(lx_c, ly - ly.mean()) / np.dot(lx_c, lx_c))
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PowerLawFit(c=math.exp(intercept), alpha=-slope, r2=r2, n=int(mask.sum()))
