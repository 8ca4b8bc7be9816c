"""Positions of the oscillation dips of ``a1_tilde``.

A velocity ``v`` is a dip of order ``T`` when ``a1_tilde(x, t) - a1_tilde(x - 2T, t)``
is ``o(t^-1/2)`` for every ``x = vt + o(t^1/2)``. The closed form is

    v = sin(pi k / T) / sqrt(mu^2 + sin^2(pi k / T)),   |k| < T/2,

which is the group velocity ``d omega / dp`` at momentum ``p = pi k / (T eps)``.
The numerical side checks a window of half-width ``c sqrt(t)`` around ``vt``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .analysis import SIGN_MARGIN, _phase_arcsines
from .core import DomainError, Params, WaveRow, exact_row, rows_at, wave_row
from .reports import csv_text, fmt

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class DipScanConfig:
    """Window used to stand in for "every sequence ``x_t = vt + o(t^1/2)``"."""

    window_constant: float = 1.0
    width_exponent: float = 0.5
    depth_exponent: float = -0.5

    def __post_init__(self):
        if self.window_constant <= 0:
            raise DomainError("window constant must be positive")
        if (self.width_exponent, self.depth_exponent) != (0.5, -0.5):
            raise DomainError("the dip positions are only known for width 1/2 and depth -1/2")

    def half_width(self, t: int) -> float:
        return self.window_constant * t**self.width_exponent


def _check_params(params: Params):
    if params.m <= 0 or params.mu > 1:
        raise DomainError(f"dips need m > 0 and eps <= 1/m (m*eps = {params.mu})")


def dip_indices(T: int) -> list[int]:
    """Integers ``k`` with ``-T/2 < k < T/2``."""
    if T < 1:
        raise DomainError(f"dip order must be >= 1, got {T}")
    top = (T - 1) // 2
    return list(range(-top, top + 1))


def dip_velocity(k: int, T: int, params: Params) -> float:
    s = math.sin(math.pi * k / T)
    return s / math.sqrt(params.mu**2 + s * s)


def dip_positions(T: int, params: Params = Params()) -> list[float]:
    """All dips of order ``T``, ascending."""
    _check_params(params)
    return [dip_velocity(k, T, params) for k in dip_indices(T)]


def omega(p: float, params: Params = Params()) -> float:
    """Dispersion ``(1/eps) arccos(cos(p eps) / sqrt(1 + m^2 eps^2))``."""
    eps = params.eps
    return math.acos(math.cos(p * eps) / math.sqrt(1 + params.mu**2)) / eps


def group_velocity(p: float, params: Params = Params()) -> float:
    """``d omega / dp`` in closed form: ``sin(p eps) / sqrt(m^2 eps^2 + sin^2(p eps))``."""
    s = math.sin(p * params.eps)
    denom = math.sqrt(params.mu**2 + s * s)
    if denom == 0:
        raise DomainError("group velocity is undefined for m = 0 at p eps in pi Z")
    return s / denom


def nearest_admissible_x(v: float, t: int) -> int:
    """Lattice ``x`` nearest to ``vt`` with ``x + t`` odd; ties go toward zero."""
    y = v * t
    n = int(math.copysign(math.ceil(abs(y) - 0.5), y))
    if (n + t) % 2:
        return n
    lo, hi = n - 1, n + 1
    dlo, dhi = abs(y - lo), abs(y - hi)
    if dlo == dhi:
        return lo if abs(lo) < abs(hi) else hi
    return lo if dlo < dhi else hi


def circle_distance(a: float, b: float, period: float) -> float:
    """Distance from ``b - a`` to the nearest multiple of ``period``."""
    r = math.remainder(b - a, period)
    return abs(r)


@dataclass(frozen=True)
class PhaseDiagnostics:
    delta_minus: float  # in [0, 2 pi)
    delta_plus: float  # in [0, 2 pi)
    gamma: float


def phase_diagnostics(x: int, t: int, T: int, params: Params = Params()) -> PhaseDiagnostics:
    """Phase difference and sum of the main term at ``x`` and ``x - 2T`` (lattice units)."""
    _check_params(params)
    mu = params.mu
    xp = x - 2 * T
    if t <= 0 or not max(abs(x), abs(xp)) * math.sqrt(1 + mu * mu) < t:
        raise DomainError(f"x={x} and x-2T={xp} must lie strictly inside the peaks at t={t}")
    s1, s2 = _phase_arcsines(np.array([x / t, xp / t]), mu)
    # termwise differences avoid subtracting two phases of size ~t
    dm = t * (s1[0] - s1[1]) - (x * s2[0] - xp * s2[1])
    dp = t * (s1[0] + s1[1]) - (x * s2[0] + xp * s2[1]) + math.pi / 2
    dm, dp = float(dm) % TWO_PI, float(dp) % TWO_PI
    gamma = min(circle_distance(0.0, dm, TWO_PI), circle_distance(math.pi, dp, TWO_PI))
    return PhaseDiagnostics(dm, dp, gamma)


def delta_minus_limit(v: float, T: int, params: Params = Params()) -> float:
    """``-2T arcsin(mu v / sqrt(1 - v^2))`` reduced to ``[0, 2 pi)``."""
    return (-2 * T * math.asin(params.mu * v / math.sqrt(1 - v * v))) % TWO_PI


def _difference_profile(row: WaveRow, T: int) -> np.ndarray:
    """``|a1(x) - a1(x - 2T)|`` over the row; index ``j`` of row ``t+1`` is ``x = -(t+1) + 2j``."""
    re = np.asarray(row.re)
    d = np.abs(re).copy()  # x - 2T below the row: a1 = 0 there
    d[T:] = np.abs(re[T:] - re[:-T])
    return d


def _window_max(profile: np.ndarray, t: int, v: float, half: float) -> float:
    lo, hi = v * t - half, v * t + half
    # x = -(t+1) + 2j  =>  j = (x + t + 1) / 2
    jl = max(math.ceil((lo + t + 1) / 2), 0)
    jh = min(math.floor((hi + t + 1) / 2), len(profile) - 1)
    if jh < jl:
        raise DomainError(f"window around v={v} holds no lattice point at t={t}")
    return float(profile[jl : jh + 1].max())


def dip_metric(v: float, T: int, t: int, params: Params = Params(), config: DipScanConfig = DipScanConfig(),
               row: WaveRow | None = None) -> float:
    """``sqrt(t) max |a1(x, t) - a1(x - 2T, t)|`` over ``|x - vt| <= c sqrt(t)``."""
    if not abs(v) < params.peak:
        raise DomainError(f"|v| must be below {params.peak}")
    if row is None:
        row = wave_row(t + 1, params)
    elif row.t != t + 1:
        raise DomainError(f"row at t={row.t} cannot serve time {t}")
    profile = _difference_profile(row, T)
    return math.sqrt(t) * _window_max(profile, t, v, config.half_width(t))


@dataclass(frozen=True, eq=False)
class DipScan:
    T: int
    t: int
    mu: float
    vs: np.ndarray = field(repr=False)
    metric: np.ndarray = field(repr=False)

    def local_minima(self, prominence: float = 0.1) -> np.ndarray:
        """Velocities of local minima deeper than ``prominence`` times the median metric."""
        idx, _ = find_peaks(-self.metric, prominence=prominence * float(np.median(self.metric)))
        return self.vs[idx]

    def to_csv(self) -> str:
        return csv_text(("v", "metric"), ((fmt(v), fmt(m)) for v, m in zip(self.vs, self.metric)))


def scan_velocities(params: Params, resolution: int, margin: float = 0.0) -> np.ndarray:
    """``resolution`` evenly spaced velocities strictly inside ``(-peak + margin, peak - margin)``."""
    top = params.peak - margin
    return np.linspace(-top, top, resolution + 2)[1:-1]


def dip_scan(T: int, t: int, params: Params = Params(), resolution: int = 2001,
             config: DipScanConfig = DipScanConfig(), row: WaveRow | None = None,
             threads: int = 1) -> DipScan:
    """Sample ``dip_metric`` across the open velocity interval.

    Samples whose window would cross a peak are dropped. ``threads`` only
    splits the work; the output is identical for any value.
    """
    _check_params(params)
    if row is None:
        row = wave_row(t + 1, params)
    profile = _difference_profile(row, T)
    half = config.half_width(t)
    vs = scan_velocities(params, resolution)
    vs = vs[np.abs(vs) * t + half < params.peak * t]
    chunks = np.array_split(vs, max(1, threads))

    def work(chunk):
        return [_window_max(profile, t, float(v), half) for v in chunk]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    metric = math.sqrt(t) * np.array([m for part in parts for m in part])
    return DipScan(T, t, params.mu, vs, metric)


def dip_metric_trend(v: float, T: int, ts, params: Params = Params(),
                     config: DipScanConfig = DipScanConfig()) -> list[float]:
    """``dip_metric`` at several times from one sweep."""
    ts = sorted(ts)
    return [dip_metric(v, T, row.t - 1, params, config, row=row) for row in rows_at([t + 1 for t in ts], params)]


# ---------------------------------------------------------------------------
# Sharpness of the side bound

@dataclass(frozen=True)
class Witness:
    x: int
    t: int
    value: float
    sign_found: int
    sign_expected: int
    exact_numerator: int | None = None  # 2^(t/2) a1_tilde(x, t), when confirmed exactly

    @property
    def confirmed(self) -> bool | None:
        if self.exact_numerator is None:
            return None
        n = self.exact_numerator
        return n != 0 and ((n > 0) - (n < 0)) != self.sign_expected

    def to_dict(self) -> dict:
        return {"x": self.x, "t": self.t, "value": self.value, "sign_found": self.sign_found,
                "sign_expected": self.sign_expected, "confirmed_exact": self.confirmed,
                "exact_numerator": None if self.exact_numerator is None else str(self.exact_numerator)}


def find_sign_counterexample(v0: float, params: Params = Params(), t_max: int = 100_000,
                             margin: float = SIGN_MARGIN, confirm: bool = True) -> Witness | None:
    """First ``(x, t)`` with ``x + t`` odd, ``v0 <= x/t < peak`` and the side sign law broken.

    Rows are scanned in increasing ``t``; within a row the smallest ``x`` wins.
    Signs closer to zero than ``margin`` are skipped. For ``m eps = 1`` the
    witness is re-evaluated with the exact engine when ``confirm`` is set.
    Returns ``None`` if nothing is found up to ``t_max``.
    """
    _check_params(params)
    mu, peak = params.mu, params.peak
    if not v0 < peak:
        raise DomainError(f"v0 must be below {peak}")
    for row in rows_at(range(2, t_max + 2), params):
        t = row.t - 1
        j0 = max(math.ceil((v0 * t + t + 1) / 2), 0)
        if j0 > t + 1:
            continue
        xs = np.arange(-(t + 1) + 2 * j0, t + 2, 2)
        vals = row.re[j0:]
        inside = xs * xs * (1 + mu * mu) < t * t if mu != 1 else 2 * xs * xs < t * t
        inside &= xs >= v0 * t
        if not inside.any():
            continue
        xs, vals = xs[inside], vals[inside]
        expected = np.where(((t - xs - 1) // 2) % 2 == 0, 1, -1)
        bad = (np.sign(vals) != expected) & (np.abs(vals) > margin)
        if bad.any():
            i = int(np.argmax(bad))
            x = int(xs[i])
            numerator = exact_row(t + 1).scaled_real(x) if confirm and mu == 1 else None
            return Witness(x, t, float(vals[i]), int(np.sign(vals[i])), int(expected[i]), numerator)
    return None
