"""Pulse envelopes: instantaneous Rabi frequency versus time.

An envelope only stores the *local* shape of a pulse. Placing the second
pulse at ``t0 + tau + T`` is the job of the sequencing code.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "Mesa",
    "SinFourth",
    "Tabulated",
    "EnvelopeKind",
    "MESA",
    "SIN_FOURTH",
    "envelope_value",
    "pulse_area",
    "area_normalized_peak",
    "load_tabulated_csv",
    "envelope_from_dict",
]


@dataclass(frozen=True)
class Mesa:
    """Rectangular (top-hat) envelope."""

    kind: str = field(default="mesa", init=False)

    def to_dict(self) -> dict:
        return {"kind": "mesa"}


@dataclass(frozen=True)
class SinFourth:
    """``sin^4(pi s / tau)`` envelope on ``0 <= s <= tau``."""

    kind: str = field(default="sin4", init=False)

    def to_dict(self) -> dict:
        return {"kind": "sin4"}


@dataclass(frozen=True)
class Tabulated:
    """Sampled envelope, linearly interpolated.

    The samples are stretched onto the pulse window, so only the shape of
    ``times`` matters. The instantaneous Rabi frequency is
    ``peak * value``: with ``peak=1`` the tabulated values are used as-is.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]
    kind: str = field(default="tabulated", init=False)

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if len(times) != len(values) or len(times) < 2:
            raise ValueError("tabulated envelope needs >= 2 (time, value) pairs")
        if not all(b > a for a, b in zip(times, times[1:])):
            raise ValueError("tabulated times must be strictly increasing")
        if any(v < 0 for v in values):
            raise ValueError("tabulated values must be non-negative")
        if values[0] != 0.0 or values[-1] != 0.0:
            raise ValueError("tabulated envelope must start and end at 0")

    @property
    def span(self) -> float:
        return self.times[-1] - self.times[0]

    def to_dict(self) -> dict:
        return {"kind": "tabulated", "times": list(self.times), "values": list(self.values)}


EnvelopeKind = Union[Mesa, SinFourth, Tabulated]

MESA = Mesa()
SIN_FOURTH = SinFourth()


def envelope_from_dict(d: dict | str) -> EnvelopeKind:
    if isinstance(d, str):
        d = {"kind": d}
    kind = d.get("kind")
    if kind == "mesa":
        return MESA
    if kind in ("sin4", "sin_fourth", "sinfourth"):
        return SIN_FOURTH
    if kind == "tabulated":
        if "path" in d:
            return load_tabulated_csv(d["path"])
        return Tabulated(tuple(d["times"]), tuple(d["values"]))
    raise ValueError(f"unknown envelope kind {kind!r}")


def _shape(kind: EnvelopeKind, s, duration: float):
    """Relative envelope (0..1 for analytic kinds) at local time ``s``.

    Zero outside ``[0, duration]``; window edges are included.
    """
    s = np.asarray(s, dtype=float)
    inside = (s >= 0.0) & (s <= duration)
    if isinstance(kind, Mesa):
        out = np.where(inside, 1.0, 0.0)
    elif isinstance(kind, SinFourth):
        out = np.where(inside, np.sin(np.pi * s / duration) ** 4, 0.0)
    elif isinstance(kind, Tabulated):
        # samples are stretched onto the pulse window
        scaled = np.asarray(kind.times) - kind.times[0]
        scaled = scaled * (duration / kind.span)
        out = np.where(inside, np.interp(s, scaled, kind.values, left=0.0, right=0.0), 0.0)
    else:
        raise TypeError(f"not an envelope: {kind!r}")
    return out


def envelope_value(kind: EnvelopeKind, t, t_start: float, duration: float, peak: float):
    """Instantaneous Rabi frequency of a pulse starting at ``t_start``.

    Parameters
    ----------
    kind : EnvelopeKind
        Local pulse shape.
    t : float or array_like
        Absolute time(s).
    t_start : float
        Start of the pulse window.
    duration : float
        Pulse length ``tau``; must be positive.
    peak : float
        Peak Rabi frequency (rad/time).

    Returns
    -------
    float or ndarray
        ``peak * shape(t - t_start)``, zero outside ``[t_start, t_start + tau]``.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise ValueError("envelope queried at non-finite time")
    out = peak * _shape(kind, t_arr - t_start, duration)
    return float(out) if out.ndim == 0 else out


def pulse_area(kind: EnvelopeKind, duration: float, peak: float) -> float:
    """Integral of the Rabi frequency over the pulse (rotation angle on resonance)."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    if isinstance(kind, Mesa):
        return peak * duration
    if isinstance(kind, SinFourth):
        return 0.375 * peak * duration
    if isinstance(kind, Tabulated):
        scale = duration / kind.span
        return peak * scale * float(np.trapezoid(kind.values, kind.times))
    raise TypeError(f"not an envelope: {kind!r}")


def area_normalized_peak(kind: EnvelopeKind, duration: float, area: float = math.pi / 2) -> float:
    """Peak Rabi frequency giving the requested pulse area.

    This is an optional convenience; the reference sin^4 runs keep
    ``peak = pi/2`` and therefore have area ``3 pi / 16``.
    """
    unit = pulse_area(kind, duration, 1.0)
    if unit <= 0:
        raise ValueError("envelope has zero area")
    return area / unit


def load_tabulated_csv(path: str | Path) -> Tabulated:
    """Read a two-column ``time,rabi`` CSV into a :class:`Tabulated` shape.

    Lines starting with ``#`` and a non-numeric header row are skipped.
    Values are kept as given; use ``peak=1`` on the pulse to apply them
    unscaled.
    """
    times, values = [], []
    header_seen = False
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                t, v = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if times or header_seen:
                    raise ValueError(f"{path}: bad row {row!r}") from None
                header_seen = True
                continue
            times.append(t)
            values.append(v)
    return Tabulated(tuple(times), tuple(values))
