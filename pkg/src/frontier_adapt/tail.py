"""Tail estimation for the one-sided error distribution.

The errors are nonpositive with survival behavior near zero governed by a
sharpness index alpha and a logarithmic correction exponent b.  Both are
estimated from the top order statistics of local windows, using a negative
Hill estimator for 1/alpha that is invariant to adding a constant to the
responses, and a companion estimator for b.  Per-bandwidth estimates are
stabilized by nested comparison selectors that stop as soon as successive
estimates drift more than a shrinking threshold apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindow, DomainError, InvalidConfig
from .local_poly import Sample, window_indices

INV_ALPHA_CAP = 10.0  # selected 1/alpha capped here (alpha >= 0.1), counted
_TIE_JITTER = 1e-12   # relative to the window range


@dataclass(frozen=True)
class TailEstimate:
    """Selected tail parameters at a point.

    inv_alpha is 1/alpha after capping; k_alpha and k_b are the selected
    bandwidth indices for the two estimators; m_used is the order-statistic
    count at k_alpha.  Invariants: inv_alpha in (0, INV_ALPHA_CAP],
    0 <= k_b <= k_alpha <= K.
    """

    inv_alpha: float
    b_hat: float
    k_alpha: int
    k_b: int
    m_used: int


@dataclass(frozen=True)
class TailFunction:
    """Plug-in tail quantile function A(y) = -(log y)^b_hat * y^(-inv_alpha)."""

    inv_alpha: float
    b_hat: float


def _bump(counters, key, by=1):
    if counters is not None:
        counters[key] = counters.get(key, 0) + by


def _order_desc(window_ys, counters=None):
    """Descending order statistics with deterministic tie breaking.

    Tied values are pushed apart by a jitter of _TIE_JITTER * range * rank so
    downstream log-gap formulas stay finite; the number of tied pairs is
    counted.  Raises DegenerateWindow when every value is identical.
    """
    w = np.sort(np.asarray(window_ys, dtype=float))[::-1]
    if w.size == 0:
        raise DegenerateWindow("empty window")
    ties = int(np.count_nonzero(np.diff(w) == 0.0))
    if ties:
        rng = w[0] - w[-1]
        if rng <= 0.0:
            raise DegenerateWindow("all window values identical")
        _bump(counters, "ties_jittered", ties)
        w = w - (_TIE_JITTER * rng) * np.arange(w.size)
    return w


def neg_hill_inv_alpha(window_ys, m: int, counters=None) -> float:
    """Negative Hill estimate of 1/alpha from the top m order statistics.

    With Y_(1) >= ... >= Y_(nbar) the window order statistics,

        1/alpha = (1/m) * sum_{i=2}^{m-1} log(|Y_(m) - Y_(1)| / |Y_(i) - Y_(1)|).

    Exactly invariant to adding a constant to, or rescaling, the window.
    """
    w = _order_desc(window_ys, counters)
    if not 3 <= m <= w.size:
        raise InvalidConfig(f"m={m} outside [3, {w.size}]")
    top = w[0]
    span = top - w[m - 1]
    gaps = top - w[1 : m - 1]
    if span <= 0.0 or np.any(gaps <= 0.0):
        raise DegenerateWindow("zero gap between top order statistics")
    return float(np.sum(np.log(span / gaps)) / m)


def estimate_b(window_ys, m: int, inv_alpha: float, n_bar: int | None = None,
               counters=None) -> float:
    """Estimate the log-correction exponent b given 1/alpha.

    b_hat = (1/(m loglog nbar)) * sum_{i=2}^{m-1}
            log(|Y_(i) - Y_(1)| / ((nbar/i)^(-inv_alpha) - nbar^(-inv_alpha))),

    with magnitudes inside the log (the numerator and denominator carry
    opposite signs in the raw display).  nbar defaults to the window size.
    """
    w = _order_desc(window_ys, counters)
    if n_bar is None:
        n_bar = w.size
    if n_bar < 3:
        raise InvalidConfig("n_bar must be >= 3 for loglog scaling")
    if not 3 <= m <= w.size:
        raise InvalidConfig(f"m={m} outside [3, {w.size}]")
    if inv_alpha <= 0.0:
        raise InvalidConfig("inv_alpha must be positive")
    top = w[0]
    i = np.arange(2, m)
    num = top - w[i - 1]
    if np.any(num <= 0.0):
        raise DegenerateWindow("zero gap between top order statistics")
    den = (n_bar / i) ** (-inv_alpha) - float(n_bar) ** (-inv_alpha)
    return float(np.sum(np.log(num / den)) / (m * math.log(math.log(n_bar))))


def tail_m(n_bar: int, m_exponent: float) -> int:
    """Order-statistic count m = max(3, round(2 * nbar^m_exponent)), clamped to nbar."""
    return int(min(n_bar, max(3, round(2.0 * n_bar**m_exponent))))


def per_k_inv_alphas(sample: Sample, x: float, grid, m_exponent: float,
                     counters=None):
    """Per-bandwidth (1/alpha, m, window) for k = 0..K; NaN where degenerate."""
    K = grid.K
    invs = np.full(K + 1, np.nan)
    ms = np.zeros(K + 1, dtype=int)
    windows = []
    for k in range(K + 1):
        idx = window_indices(sample.n, x, grid.bandwidths[k])
        w = sample.ys[idx]
        windows.append(w)
        if w.size < 3:
            _bump(counters, "tail_k_skipped")
            continue
        ms[k] = tail_m(w.size, m_exponent)
        try:
            invs[k] = neg_hill_inv_alpha(w, ms[k], counters)
        except DegenerateWindow:
            _bump(counters, "tail_k_skipped")
    return invs, ms, windows


def _first_violation(values, K, threshold_at):
    """First k in 0..K-1 with |values[k+1] - values[l]| > threshold_at(k) for
    some l <= k; K if none.  NaN entries never trigger a violation."""
    for k in range(K):
        nxt = values[k + 1]
        if np.isnan(nxt):
            continue
        thr = threshold_at(k)
        for l in range(k + 1):
            if not np.isnan(values[l]) and abs(nxt - values[l]) > thr:
                return k
    return K


def select_k_alpha(sample: Sample, x: float, grid, m_exponent: float,
                   counters=None):
    """Nested selector for the 1/alpha bandwidth index.

    k_alpha = first k in 0..K-1 where the next estimate drifts from some
    earlier one by more than rho^(-k) / log(n); K when no drift is seen.
    Returns (k_alpha, inv_alpha at k_alpha), uncapped.
    """
    invs, _, _ = per_k_inv_alphas(sample, x, grid, m_exponent, counters)
    return _select_alpha_index(invs, grid, counters)


def _select_alpha_index(invs, grid, counters=None):
    if np.all(np.isnan(invs)):
        raise DegenerateWindow("no usable window for tail estimation")
    logn = math.log(grid.n)
    k_alpha = _first_violation(invs, grid.K, lambda k: grid.rho**(-k) / logn)
    inv = invs[k_alpha]
    if np.isnan(inv):
        # prefer the nearest valid larger window, then smaller
        valid = np.flatnonzero(~np.isnan(invs))
        above = valid[valid > k_alpha]
        inv = invs[above[0]] if above.size else invs[valid[-1]]
        _bump(counters, "selected_estimate_missing")
    return int(k_alpha), float(inv)


def select_k_b(sample: Sample, x: float, grid, k_alpha: int, inv_alphas,
               m_exponent: float, counters=None):
    """Nested selector for the b bandwidth index, capped at k_alpha.

    Mirrors select_k_alpha with threshold rho^(-k) / loglog(n) and per-k b
    estimates built from the matching per-k 1/alpha values; scans
    k = 0..k_alpha-1 and defaults to k_alpha when nothing drifts.
    Returns (k_b, b_hat at k_b).
    """
    inv_alphas = np.asarray(inv_alphas, dtype=float)
    bs = np.full(k_alpha + 1, np.nan)
    for k in range(k_alpha + 1):
        idx = window_indices(sample.n, x, grid.bandwidths[k])
        w = sample.ys[idx]
        if w.size < 3 or np.isnan(inv_alphas[k]):
            continue
        m = tail_m(w.size, m_exponent)
        if m < 3:
            continue
        try:
            bs[k] = estimate_b(w, m, inv_alphas[k], w.size, counters)
        except DegenerateWindow:
            _bump(counters, "tail_k_skipped")
    if np.all(np.isnan(bs)):
        raise DegenerateWindow("no usable window for the b estimator")
    loglogn = math.log(math.log(grid.n))
    k_b = _first_violation(bs, k_alpha, lambda k: grid.rho**(-k) / loglogn)
    b = bs[k_b]
    if np.isnan(b):
        valid = np.flatnonzero(~np.isnan(bs))
        above = valid[valid > k_b]
        b = bs[above[0]] if above.size else bs[valid[-1]]
        _bump(counters, "selected_estimate_missing")
    return int(k_b), float(b)


def estimate_tail_at(sample: Sample, x: float, grid, m_exponent: float,
                     counters=None) -> TailEstimate:
    """Full tail-parameter estimation at a point over the bandwidth grid."""
    invs, ms, _ = per_k_inv_alphas(sample, x, grid, m_exponent, counters)
    k_alpha, inv_alpha = _select_alpha_index(invs, grid, counters)
    k_b, b_hat = select_k_b(sample, x, grid, k_alpha, invs, m_exponent, counters)
    if inv_alpha > INV_ALPHA_CAP:
        _bump(counters, "inv_alpha_capped")
        inv_alpha = INV_ALPHA_CAP
    return TailEstimate(
        inv_alpha=float(inv_alpha),
        b_hat=float(b_hat),
        k_alpha=k_alpha,
        k_b=k_b,
        m_used=int(ms[k_alpha]),
    )


def a_hat(tf, y):
    """Plug-in tail function A(y) = -(log y)^b * y^(-inv_alpha), y >= e."""
    y = np.asarray(y, dtype=float)
    if np.any(y < math.e * (1.0 - 1e-12)):
        raise DomainError("a_hat needs y >= e")
    val = -(np.log(y) ** tf.b_hat) * y ** (-tf.inv_alpha)
    return float(val) if val.ndim == 0 else val
