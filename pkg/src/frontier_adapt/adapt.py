"""Adaptive bandwidth selection for the envelope estimator.

A geometric bandwidth grid h_k = h_0 * rho^k is scanned by a Lepski-type
rule: the selected index is the first k at which the estimate with the next
bandwidth drifts away from some earlier estimate by more than the sum of
their critical values.  Critical values are plugged in from the estimated
tail parameters, either pointwise through the tail function A, or globally
for empirical L_q losses through the integral transform iu_n.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DegenerateWindow, DomainError, InvalidConfig, NumericalBreakdown, WindowTooSmall
from .local_poly import Sample, estimate_at, window_indices
from .tail import TailFunction, a_hat, estimate_tail_at

# Calibrated defaults for the critical-value constants.  The theory only
# proves such constants exist; these values come from the pilot study in
# scripts/calibrate_defaults.py and both stay exposed in the config.
DEFAULT_C_BETA = 0.3
DEFAULT_J_BETA = 1


@dataclass
class EstimatorConfig:
    """Tuning knobs for the adaptive pipeline.

    q = None selects pointwise (sup-style) selection; a real q >= 1 selects
    empirical L_q selection with a single global bandwidth index.
    j_beta = None resolves to DEFAULT_J_BETA.
    """

    beta_star: int = 2
    h0_exponent: float = 0.4
    rho: float = 2.0
    m_exponent: float = 2.0 / 3.0
    c_beta: float = DEFAULT_C_BETA
    j_beta: int | None = None
    q: float | None = None
    quadrature_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.beta_star, (int, np.integer)) or self.beta_star < 0:
            raise InvalidConfig("beta_star must be an integer >= 0")
        if not 0.0 < self.h0_exponent < 1.0:
            raise InvalidConfig("h0_exponent must lie in (0, 1)")
        if not self.rho > 1.0:
            raise InvalidConfig("rho must exceed 1")
        if not 0.0 < self.m_exponent < 1.0:
            raise InvalidConfig("m_exponent must lie in (0, 1)")
        if not self.c_beta > 0.0:
            raise InvalidConfig("c_beta must be positive")
        if self.j_beta is not None and (
            not isinstance(self.j_beta, (int, np.integer)) or self.j_beta < 1
        ):
            raise InvalidConfig("j_beta must be an integer >= 1")
        if self.q is not None and not self.q >= 1.0:
            raise InvalidConfig("q must be >= 1 (or None for pointwise)")
        if not self.quadrature_tol > 0.0:
            raise InvalidConfig("quadrature_tol must be positive")

    @property
    def j_beta_effective(self) -> int:
        return DEFAULT_J_BETA if self.j_beta is None else int(self.j_beta)


@dataclass(frozen=True)
class BandwidthGrid:
    """Geometric grid h_k = h0 * rho^k for k = 0..K+1 on a size-n design."""

    n: int
    h0: float
    rho: float
    K: int
    bandwidths: np.ndarray


def build_grid(n: int, h0_exponent: float, rho: float) -> BandwidthGrid:
    """Grid with h0 = n^(h0_exponent - 1) and K = floor(log_rho n^(1 - h0_exponent))."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidConfig("n must be an integer >= 2")
    if not 0.0 < h0_exponent < 1.0:
        raise InvalidConfig("h0_exponent must lie in (0, 1)")
    if not rho > 1.0:
        raise InvalidConfig("rho must exceed 1")
    h0 = float(n) ** (h0_exponent - 1.0)
    # the 1e-9 nudge keeps exact powers (e.g. rho = n^(1-h0_exponent)) from
    # flooring one step low on last-ulp noise
    K = int(math.floor((1.0 - h0_exponent) * math.log(n) / math.log(rho) + 1e-9))
    K = max(K, 0)
    bandwidths = h0 * float(rho) ** np.arange(K + 2)
    return BandwidthGrid(n=int(n), h0=h0, rho=float(rho), K=K, bandwidths=bandwidths)


@dataclass(frozen=True)
class CriticalValues:
    """Raw and truncated critical values zeta_k, k = 0..K.

    truncated = running minimum of min(raw, 1), so it is nonincreasing, lies
    in [0, 1], and ends at the terminal raw[K] = 0.
    """

    raw: np.ndarray
    truncated: np.ndarray
    kind: str
    q: float | None = None


def _truncate_monotonize(raw) -> np.ndarray:
    return np.minimum.accumulate(np.minimum(raw, 1.0))


def critical_values_pointwise(grid: BandwidthGrid, tail, cfg: EstimatorConfig) -> CriticalValues:
    """zeta_k = 4 c |A(alpha n h_k / (4 J log n))| for k < K, terminal 0.

    Arguments of A below e are clamped to zeta_k = 1 (maximal truncation).
    """
    J = cfg.j_beta_effective
    logn = math.log(grid.n)
    alpha = 1.0 / tail.inv_alpha
    tf = TailFunction(tail.inv_alpha, tail.b_hat)
    raw = np.zeros(grid.K + 1)
    for k in range(grid.K):
        y = alpha * grid.n * grid.bandwidths[k] / (4.0 * J * logn)
        raw[k] = 1.0 if y < math.e else 4.0 * cfg.c_beta * abs(a_hat(tf, y))
    return CriticalValues(raw=raw, truncated=_truncate_monotonize(raw), kind="pointwise")


def iu_n(s: float, q: float, tail, n: int, tol: float = 1e-8) -> float:
    """Integral transform of the plug-in tail function for L_q losses.

    iu_n(s, q) = ( integral_{n^(-2 inv_alpha)}^{min(sqrt n, s/e^2)}
                   d/dy[ (log(s/y))^(q b) (s/y)^(-q inv_alpha) ] e^(-y) dy )^(1/q)

    with the analytic derivative
        (log(s/y))^(q b - 1) (s/y)^(-q inv_alpha) (q inv_alpha log(s/y) - q b) / y.
    The upper clip at s/e^2 keeps log(s/y) >= 2; an empty clipped domain
    raises DomainError (callers treat the corresponding zeta as 1).
    """
    if s <= 0.0:
        raise DomainError("s must be positive")
    if q < 1.0:
        raise InvalidConfig("q must be >= 1")
    inv_a = tail.inv_alpha
    b = tail.b_hat
    lo = float(n) ** (-2.0 * inv_a)
    hi = min(math.sqrt(n), s / math.e**2)
    if not hi > lo:
        raise DomainError(f"empty integration domain for s={s!r}")
    qa = q * inv_a
    qb = q * b

    def deriv_weighted(y):
        u = math.log(s / y)
        return u ** (qb - 1.0) * (s / y) ** (-qa) * (qa * u - qb) / y * math.exp(-y)

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(deriv_weighted, lo, hi, epsabs=tol, epsrel=1e-11, limit=200)
    return math.copysign(abs(val) ** (1.0 / q), val)


def critical_values_lq(grid: BandwidthGrid, tail, q: float, cfg: EstimatorConfig) -> CriticalValues:
    """zeta_k = sqrt(5) c |iu_n(n h_k / (6 J), q)| for k < K, terminal 0."""
    J = cfg.j_beta_effective
    raw = np.zeros(grid.K + 1)
    for k in range(grid.K):
        s = grid.n * grid.bandwidths[k] / (6.0 * J)
        try:
            raw[k] = math.sqrt(5.0) * cfg.c_beta * abs(
                iu_n(s, q, tail, grid.n, cfg.quadrature_tol)
            )
        except DomainError:
            raw[k] = 1.0
    return CriticalValues(raw=raw, truncated=_truncate_monotonize(raw), kind="lq", q=q)


def _fallback_cvs(K: int, kind: str, q=None) -> CriticalValues:
    """Fully truncated critical values for points with degenerate tails."""
    raw = np.ones(K + 1)
    raw[K] = 0.0
    return CriticalValues(raw=raw, truncated=_truncate_monotonize(raw), kind=kind, q=q)


def lepski_select(estimates, cvs: CriticalValues, q: float | None = None) -> int:
    """First k in 0..K-1 with ||f_{k+1} - f_l|| > zeta_l + zeta_{k+1} for some
    l <= k (truncated zetas); K when no such drift occurs.

    estimates is indexed by k: scalars for pointwise selection (q = None), or
    per-k curves for empirical L_q selection, where the norm averages
    |difference|^q over the points where both curves are defined.
    """
    est = np.asarray(estimates, dtype=float)
    zt = cvs.truncated
    K = zt.size - 1
    if est.shape[0] != K + 1:
        raise ValueError("estimates must cover k = 0..K")
    if q is None:
        if est.ndim != 1:
            raise ValueError("pointwise selection expects one value per k")

        def dist(a, b):
            return abs(a - b)

    else:

        def dist(a, b):
            mask = np.isfinite(a) & np.isfinite(b)
            if not mask.any():
                return np.nan
            return float(np.mean(np.abs(a[mask] - b[mask]) ** q) ** (1.0 / q))

    for k in range(K):
        for l in range(k + 1):
            d = dist(est[k + 1], est[l])
            if np.isfinite(d) and d > zt[l] + zt[k + 1]:
                return k
    return K


@dataclass
class Diagnostics:
    """Selection trace for one adaptive_estimate call.

    Pointwise mode carries per-point arrays (k_alpha = -1 and alpha_hat = NaN
    mark points whose tail estimation was degenerate); L_q mode carries the
    single global selection.
    """

    mode: str
    points: np.ndarray
    k_hat: object
    alpha_hat: object
    b_hat: object
    k_alpha: object
    k_b: object
    zeta_raw: np.ndarray
    zeta_truncated: np.ndarray
    zeta_at_k_hat: object
    window_sizes: np.ndarray
    grid: BandwidthGrid
    counters: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def _bump(counters, key, by=1):
    counters[key] = counters.get(key, 0) + by


def _estimate_with_fallback(sample, xp, h, beta_star, counters):
    """Envelope estimate with the degree lowered to fit small windows."""
    nw = window_indices(sample.n, xp, h).size
    if nw < 2:
        _bump(counters, "window_too_small")
        return np.nan
    degree = min(beta_star, nw - 2)
    if degree < beta_star:
        _bump(counters, "degree_lowered")
    try:
        return estimate_at(sample, xp, h, degree)
    except WindowTooSmall:
        _bump(counters, "window_too_small")
        return np.nan
    except NumericalBreakdown:
        _bump(counters, "lp_failures")
        return np.nan


def _point_selection(sample, cfg, grid, xp, counters):
    try:
        te = estimate_tail_at(sample, xp, grid, cfg.m_exponent, counters)
    except DegenerateWindow:
        te = None
        _bump(counters, "tail_degenerate_points")
    cvs = (
        critical_values_pointwise(grid, te, cfg)
        if te is not None
        else _fallback_cvs(grid.K, "pointwise")
    )
    ests = np.array(
        [
            _estimate_with_fallback(sample, xp, grid.bandwidths[k], cfg.beta_star, counters)
            for k in range(grid.K + 1)
        ]
    )
    k_hat = lepski_select(ests, cvs)
    value = ests[k_hat]
    if np.isnan(value):
        valid = np.flatnonzero(np.isfinite(ests[: k_hat + 1]))
        if valid.size:
            value = ests[valid[-1]]
            _bump(counters, "selected_estimate_missing")
    sizes = np.array(
        [window_indices(sample.n, xp, grid.bandwidths[k]).size for k in range(grid.K + 1)]
    )
    return value, k_hat, te, cvs, sizes


def adaptive_estimate(sample: Sample, cfg: EstimatorConfig, x=None, grid=None):
    """Fully data-driven envelope estimate.

    Exactly one of x (single point) or grid (array of points) must be given.
    With cfg.q = None the bandwidth index is selected pointwise at each
    requested point; with cfg.q >= 1 a single index is selected from the
    empirical L_q distances between per-bandwidth curves over the design
    points, with tail parameters estimated once at x = 1/2.

    Returns (values, Diagnostics); failed points are NaN, never fatal.
    """
    if (x is None) == (grid is None):
        raise InvalidConfig("pass exactly one of x= or grid=")
    bgrid = build_grid(sample.n, cfg.h0_exponent, cfg.rho)
    counters: dict = {}
    warn: list = []
    if cfg.h0_exponent >= 0.5:
        warn.append(
            "h0_exponent >= 0.5: smallest windows may be too thin for stable tail estimation"
        )
    pts = np.atleast_1d(np.asarray(grid if x is None else [x], dtype=float))

    if cfg.q is None:
        values = np.full(pts.size, np.nan)
        K = bgrid.K
        k_hats = np.zeros(pts.size, dtype=int)
        alphas = np.full(pts.size, np.nan)
        bhats = np.full(pts.size, np.nan)
        kas = np.full(pts.size, -1, dtype=int)
        kbs = np.full(pts.size, -1, dtype=int)
        zraw = np.zeros((pts.size, K + 1))
        ztr = np.zeros((pts.size, K + 1))
        zsel = np.full(pts.size, np.nan)
        sizes = np.zeros((pts.size, K + 1), dtype=int)
        for i, xp in enumerate(pts):
            value, k_hat, te, cvs, sz = _point_selection(sample, cfg, bgrid, xp, counters)
            values[i] = value
            k_hats[i] = k_hat
            if te is not None:
                alphas[i] = 1.0 / te.inv_alpha
                bhats[i] = te.b_hat
                kas[i] = te.k_alpha
                kbs[i] = te.k_b
            zraw[i] = cvs.raw
            ztr[i] = cvs.truncated
            zsel[i] = cvs.truncated[k_hat]
            sizes[i] = sz
        diag = Diagnostics(
            mode="pointwise",
            points=pts,
            k_hat=k_hats,
            alpha_hat=alphas,
            b_hat=bhats,
            k_alpha=kas,
            k_b=kbs,
            zeta_raw=zraw,
            zeta_truncated=ztr,
            zeta_at_k_hat=zsel,
            window_sizes=sizes,
            grid=bgrid,
            counters=counters,
            warnings=warn,
        )
        return (float(values[0]) if x is not None else values), diag

    # empirical L_q mode: one global bandwidth index
    try:
        te = estimate_tail_at(sample, 0.5, bgrid, cfg.m_exponent, counters)
    except DegenerateWindow:
        te = None
        _bump(counters, "tail_degenerate_points")
    cvs = (
        critical_values_lq(bgrid, te, cfg.q, cfg)
        if te is not None
        else _fallback_cvs(bgrid.K, "lq", cfg.q)
    )
    design = sample.xs()
    curves = np.full((bgrid.K + 1, sample.n), np.nan)
    for k in range(bgrid.K + 1):
        h = bgrid.bandwidths[k]
        for j, xd in enumerate(design):
            curves[k, j] = _estimate_with_fallback(sample, xd, h, cfg.beta_star, counters)
    k_hat = lepski_select(curves, cvs, q=cfg.q)

    if x is None and pts.size == design.size and np.allclose(pts, design, atol=1e-12):
        values = curves[k_hat].copy()
    else:
        h = bgrid.bandwidths[k_hat]
        values = np.array(
            [_estimate_with_fallback(sample, xp, h, cfg.beta_star, counters) for xp in pts]
        )
    sizes = np.array(
        [window_indices(sample.n, 0.5, bgrid.bandwidths[k]).size for k in range(bgrid.K + 1)]
    )
    diag = Diagnostics(
        mode="lq",
        points=pts,
        k_hat=int(k_hat),
        alpha_hat=(1.0 / te.inv_alpha) if te is not None else np.nan,
        b_hat=te.b_hat if te is not None else np.nan,
        k_alpha=te.k_alpha if te is not None else -1,
        k_b=te.k_b if te is not None else -1,
        zeta_raw=cvs.raw,
        zeta_truncated=cvs.truncated,
        zeta_at_k_hat=float(cvs.truncated[k_hat]),
        window_sizes=sizes,
        grid=bgrid,
        counters=counters,
        warnings=warn,
    )
    return (float(values[0]) if x is not None else values), diag
