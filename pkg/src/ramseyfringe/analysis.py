"""Fringe metrology: zeros, widths, periodicity and contour grids.

Curves are callables ``f(delta)``. They are always called once with an
array for the coarse pre-scan (so batched engines stay fast) and with
scalars during refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from . import analytic
from .errors import HalfMaxNotBracketed, NoZeroFound

__all__ = [
    "FringeScan",
    "FringeMetrics",
    "golden_section_min",
    "find_first_zero",
    "half_max_points",
    "fwhm",
    "fringe_metrics",
    "grid_axis",
    "contour_grid",
    "periodicity_check",
]

ZERO_THRESHOLD = 1e-12
INV_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class FringeScan:
    """Sampled fringe curve ``values[i] = P12 at detunings[i]``."""

    detunings: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if d.shape != v.shape or d.ndim != 1:
            raise ValueError("detunings and values must be 1D arrays of equal length")
        if np.any(np.diff(d) <= 0):
            raise ValueError("detunings must be strictly increasing")
        if np.any((v < 0) | (v > 1)):
            raise ValueError("values must lie in [0, 1]")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_curve(cls, curve: Callable, detunings, metadata: Optional[dict] = None) -> "FringeScan":
        d = np.asarray(detunings, dtype=float)
        return cls(d, np.asarray(curve(d), dtype=float), dict(metadata or {}))


@dataclass(frozen=True)
class FringeMetrics:
    """Central-fringe summary; zeros are ``None`` when the curve has none (pedestal)."""

    first_zero_pos: Optional[float]
    first_zero_neg: Optional[float]
    fwhm: float
    peak_value: float


def golden_section_min(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Minimizer of a unimodal ``f`` on ``[a, b]`` to interval width ``tol``."""
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _scan(curve: Callable, lo: float, hi: float, n: int):
    xs = lo + (hi - lo) * (np.arange(n + 1) / n)
    return xs, np.asarray(curve(xs), dtype=float)


def find_first_zero(curve: Callable, search_max: float, tol: float = 1e-10, *, signed: Callable | None = None,
                    n_scan: int = 2000, threshold: float = ZERO_THRESHOLD) -> float:
    """Smallest positive detuning where a non-negative curve vanishes.

    ``cos^2``-type curves touch zero without changing sign, so the default
    path locates successive local minima of a uniform pre-scan on
    ``(0, search_max]`` and refines each by golden-section search until one
    falls below ``threshold``. If ``signed`` is given (a function whose sign
    changes exactly at the curve's zeros, such as the bare cosine factor) its
    first sign change is bisected instead.

    Raises
    ------
    NoZeroFound
        If no zero is found up to ``search_max``.
    """
    if signed is not None:
        xs, s = _scan(signed, 0.0, search_max, n_scan)
        for i in range(1, len(xs)):
            if s[i] == 0:
                return float(xs[i])
            if s[i - 1] * s[i] < 0:
                return float(brentq(signed, xs[i - 1], xs[i], xtol=tol, rtol=4 * np.finfo(float).eps))
        raise NoZeroFound(f"signed factor keeps its sign on (0, {search_max:g}]")

    xs, v = _scan(curve, 0.0, search_max, n_scan)
    if not v[0] > 0:
        raise ValueError("curve must be positive at delta = 0")
    scalar = lambda x: float(curve(x))  # noqa: E731
    for i in range(1, len(xs)):
        if v[i] == 0.0:
            return float(xs[i])
        right = v[i + 1] if i + 1 < len(xs) else math.inf
        if v[i] <= v[i - 1] and v[i] <= right:
            hi = xs[i + 1] if i + 1 < len(xs) else xs[i]
            x = golden_section_min(scalar, xs[i - 1], hi, tol)
            if scalar(x) < threshold:
                return x
    raise NoZeroFound(f"no value below {threshold:g} on (0, {search_max:g}]")


def half_max_points(curve: Callable, search_max: float, tol: float = 1e-12, n_scan: int = 2000,
                    center: float = 0.0) -> tuple[float, float]:
    """Detunings left and right of ``center`` where the curve drops to half its central value."""
    peak = float(curve(center))
    half = 0.5 * peak
    g = lambda x: float(curve(x)) - half  # noqa: E731
    out = []
    for sign in (-1.0, 1.0):
        xs, v = _scan(curve, center, center + sign * search_max, n_scan)
        below = np.flatnonzero(v < half)
        if peak <= 0 or below.size == 0:
            raise HalfMaxNotBracketed(f"curve stays above half maximum within {search_max:g} of {center:g}")
        i = below[0]
        a, b = sorted((xs[i - 1], xs[i]))
        out.append(brentq(g, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))
    return out[0], out[1]


def fwhm(curve: Callable, search_max: float, tol: float = 1e-12, n_scan: int = 2000) -> float:
    """Full width at half maximum of the peak at ``delta = 0``."""
    left, right = half_max_points(curve, search_max, tol, n_scan)
    return right - left


def fringe_metrics(curve: Callable, search_max: float, n_scan: int = 2000) -> FringeMetrics:
    """Peak value, FWHM and first zeros on both sides of the central fringe."""
    def zero(f):
        try:
            return find_first_zero(f, search_max, n_scan=n_scan)
        except NoZeroFound:
            return None

    pos = zero(curve)
    neg = zero(lambda x: curve(-np.asarray(x)))
    return FringeMetrics(
        first_zero_pos=pos,
        first_zero_neg=None if neg is None else -neg,
        fwhm=fwhm(curve, search_max, n_scan=n_scan),
        peak_value=float(curve(0.0)),
    )


def grid_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` equispaced points on ``[lo, hi]``.

    Built as ``lo + (hi - lo) * (i / (n - 1))`` so that the grid with
    ``2n - 1`` points contains this one bit-exactly.
    """
    if n < 1:
        raise ValueError("need at least one grid point")
    if n == 1:
        return np.array([float(lo)])
    return lo + (hi - lo) * (np.arange(n) / (n - 1))


def contour_grid(delta_range, t0_range, resolution, engine="analytic", **engine_params) -> np.ndarray:
    """``P12`` on a ``(t0, delta)`` grid; rows are entrance times, columns detunings.

    Parameters
    ----------
    delta_range, t0_range : (float, float)
        Closed ranges.
    resolution : int or (int, int)
        Points along delta and t0.
    engine : {"analytic", "numeric", "ensemble"} or fitted model
        Anything with ``predict`` on ``(delta, t0)`` rows. For the ensemble
        engine the second axis is the cloud-centre entrance time.
    """
    from .estimators import EnsembleFringeModel, RamseyFringeModel

    n_d, n_t = (resolution, resolution) if np.isscalar(resolution) else resolution
    deltas = grid_axis(*delta_range, n_d)
    t0s = grid_axis(*t0_range, n_t)
    if isinstance(engine, str):
        if engine == "ensemble":
            model = EnsembleFringeModel(**engine_params).fit()
        else:
            model = RamseyFringeModel(engine=engine, **engine_params).fit()
    else:
        model = engine
    T, D = np.meshgrid(t0s, deltas, indexing="ij")
    X = np.column_stack([D.ravel(), T.ravel()])
    return np.asarray(model.predict(X)).reshape(n_t, n_d)


def periodicity_check(delta: float, rabi: float = math.pi / 2, tau: float = 1.0, gap: float = 5.0, *,
                      detuning1: float | None = None, n_periods: int = 3, n_samples: int = 601,
                      shift: float | None = None) -> tuple[float, float]:
    """Entrance-time period of ``P12(detuning1, delta)`` and the residual under that shift.

    ``detuning1`` defaults to ``-delta``. Returns ``(period, residual)`` where
    the residual is ``max |P(t0) - P(t0 + period)|`` over ``n_periods``
    periods. Equal detunings have no period (``inf``); the residual is then
    measured at ``shift`` (default 1).
    """
    d1 = -delta if detuning1 is None else detuning1
    period = analytic.t0_period(d1, delta)
    step = shift if shift is not None else (1.0 if math.isinf(period) else period)
    span = n_periods * (1.0 if math.isinf(period) else period)
    t0 = span * (np.arange(n_samples) / (n_samples - 1))
    p = analytic.p12_general(d1, delta, rabi, tau, gap, t0)
    p_shift = analytic.p12_general(d1, delta, rabi, tau, gap, t0 + step)
    return period, float(np.max(np.abs(p - p_shift)))
