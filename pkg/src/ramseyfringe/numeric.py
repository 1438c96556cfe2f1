"""Fixed-step RK4 propagation of the internal two-level problem.

Solves ``i dU/dt = (H(t)/hbar) U`` with ``U(t0) = 1`` in one of three
interaction pictures:

* ``I1`` (atom-adapted): zero diagonal, couplings ``exp(+-i Delta_j t)``.
  The field-free gap contributes the identity and is skipped.
* ``I2`` / ``I3`` (adapted to field 1 / field 2): constant ``-Delta_ref``
  on ``|2><2|`` and couplings ``exp(+-i (Delta_j - Delta_ref) t)``. The gap
  is integrated explicitly.

Oscillating phases are always evaluated at *absolute* time ``t``, not
pulse-local time. The entrance-time effect lives entirely in that choice.

Integration is split at every pulse edge so that no step straddles an
envelope discontinuity. Batches of sequences sharing the same time layout
(durations, gap, envelope shapes) are propagated together as arrays.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .core import Propagator2, SequenceConfig
from .errors import DefectExceeded, StepInvalid
from .pulses import _shape, envelope_value

__all__ = [
    "PictureTag",
    "IntegratorParams",
    "hamiltonian_matrix",
    "propagate",
    "propagate_many",
    "p12_numeric",
    "p12_numeric_many",
    "check_step",
]


class PictureTag(enum.Enum):
    I1 = "i1"
    I2 = "i2"
    I3 = "i3"

    @classmethod
    def parse(cls, value) -> "PictureTag":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class IntegratorParams:
    step: float = 1e-3
    max_defect: float = 1e-9

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be > 0")
        if not self.max_defect > 0:
            raise ValueError("max_defect must be > 0")


def _reference_detuning(picture: PictureTag, seq: SequenceConfig) -> float:
    if picture is PictureTag.I1:
        return 0.0
    if picture is PictureTag.I2:
        return seq.pulse1.detuning
    return seq.pulse2.detuning


def hamiltonian_matrix(picture, seq: SequenceConfig, t: float) -> np.ndarray:
    """``H(t) / hbar`` (rad/time) for the internal problem in ``picture``.

    Field phases ``phi_j`` ride on the couplings as
    ``|1><2| exp(i (Delta_j - Delta_ref) t + i phi_j)``.
    """
    picture = PictureTag.parse(picture)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    ref = _reference_detuning(picture, seq)
    starts = (seq.entrance_time, seq.pulse2_start)
    coupling = 0j
    for pulse, start in zip((seq.pulse1, seq.pulse2), starts):
        omega = envelope_value(pulse.envelope, t, start, pulse.duration, pulse.rabi_peak)
        if omega:
            coupling += 0.5 * omega * np.exp(1j * ((pulse.detuning - ref) * t + pulse.phase))
    return np.array([[0.0, coupling], [np.conj(coupling), -ref]], dtype=complex)


def check_step(seq: SequenceConfig, step: float) -> None:
    """Raise :class:`StepInvalid` unless ``step`` resolves the fastest time scale.

    Required: ``step <= min(2 pi / Omega'_max, 2 pi / |Delta1 - Delta2|, tau) / 50``,
    with vanishing rates dropped from the minimum.
    """
    scales = [seq.pulse1.duration, seq.pulse2.duration]
    eff = max(seq.pulse1.effective_rabi, seq.pulse2.effective_rabi)
    if eff > 0:
        scales.append(2 * math.pi / eff)
    diff = abs(seq.pulse1.detuning - seq.pulse2.detuning)
    if diff > 0:
        scales.append(2 * math.pi / diff)
    limit = min(scales) / 50
    if step > limit:
        raise StepInvalid(f"step {step:g} exceeds resolution limit {limit:g}")


def _layout_key(seq: SequenceConfig):
    return (seq.pulse1.duration, seq.pulse2.duration, seq.gap, seq.pulse1.envelope, seq.pulse2.envelope)


def _segments(picture: PictureTag, seq: SequenceConfig):
    """Local-time segments ``(start, end, active pulse index or None)``."""
    tau1, tau2, gap = seq.pulse1.duration, seq.pulse2.duration, seq.gap
    segs = [(0.0, tau1, 0)]
    if gap > 0 and picture is not PictureTag.I1:
        segs.append((tau1, tau1 + gap, None))
    segs.append((tau1 + gap, tau1 + gap + tau2, 1))
    return segs


@njit(cache=True)
def _coupling(env, rate, t, phase):
    if env == 0.0:
        return 0j
    return env * cmath.exp(1j * (rate * t + phase))


@njit(cache=True)
def _rk4_segment(u, shape, peak, rate, phase, t0, h22, a, h, n_steps):
    """Advance ``u`` (rows ``u11, u12, u21, u22``) in place over one segment.

    ``shape`` holds the envelope at local times ``a + j h / 2``,
    ``j = 0 .. 2 n_steps``; the coupling is
    ``peak shape exp(i (rate t + phase)) / 2`` at absolute ``t = t0 + s``.
    """
    half = 0.5 * h
    for k in range(u.shape[1]):
        v11, v12, v21, v22 = u[0, k], u[1, k], u[2, k], u[3, k]
        g = h22[k]
        amp = 0.5 * peak[k]
        c2 = _coupling(amp * shape[0], rate[k], t0[k] + a, phase[k])
        for i in range(n_steps):
            c0 = c2
            c1 = _coupling(amp * shape[2 * i + 1], rate[k], t0[k] + (a + (2 * i + 1) * half), phase[k])
            c2 = _coupling(amp * shape[2 * i + 2], rate[k], t0[k] + (a + (2 * i + 2) * half), phase[k])
            # k1
            a11 = -1j * (c0 * v21)
            a12 = -1j * (c0 * v22)
            a21 = -1j * (c0.conjugate() * v11 + g * v21)
            a22 = -1j * (c0.conjugate() * v12 + g * v22)
            # k2
            w11, w12, w21, w22 = v11 + 0.5 * h * a11, v12 + 0.5 * h * a12, v21 + 0.5 * h * a21, v22 + 0.5 * h * a22
            b11 = -1j * (c1 * w21)
            b12 = -1j * (c1 * w22)
            b21 = -1j * (c1.conjugate() * w11 + g * w21)
            b22 = -1j * (c1.conjugate() * w12 + g * w22)
            # k3
            w11, w12, w21, w22 = v11 + 0.5 * h * b11, v12 + 0.5 * h * b12, v21 + 0.5 * h * b21, v22 + 0.5 * h * b22
            d11 = -1j * (c1 * w21)
            d12 = -1j * (c1 * w22)
            d21 = -1j * (c1.conjugate() * w11 + g * w21)
            d22 = -1j * (c1.conjugate() * w12 + g * w22)
            # k4
            w11, w12, w21, w22 = v11 + h * d11, v12 + h * d12, v21 + h * d21, v22 + h * d22
            e11 = -1j * (c2 * w21)
            e12 = -1j * (c2 * w22)
            e21 = -1j * (c2.conjugate() * w11 + g * w21)
            e22 = -1j * (c2.conjugate() * w12 + g * w22)
            v11 = v11 + (h / 6) * (a11 + 2 * b11 + 2 * d11 + e11)
            v12 = v12 + (h / 6) * (a12 + 2 * b12 + 2 * d12 + e12)
            v21 = v21 + (h / 6) * (a21 + 2 * b21 + 2 * d21 + e21)
            v22 = v22 + (h / 6) * (a22 + 2 * b22 + 2 * d22 + e22)
        u[0, k], u[1, k], u[2, k], u[3, k] = v11, v12, v21, v22


def _propagate_group(picture: PictureTag, seqs: Sequence[SequenceConfig], step: float):
    """RK4 over a batch sharing one time layout; returns ``(N, 2, 2)`` array."""
    first = seqs[0]
    n = len(seqs)
    t0 = np.array([s.entrance_time for s in seqs], dtype=float)
    ref = np.array([_reference_detuning(picture, s) for s in seqs], dtype=float)
    zeros = np.zeros(n)
    pulses = []
    for key, start in (("pulse1", 0.0), ("pulse2", first.pulse1.duration + first.gap)):
        p0 = getattr(first, key)
        pulses.append(dict(
            kind=p0.envelope,
            duration=p0.duration,
            start=start,
            peak=np.array([getattr(s, key).rabi_peak for s in seqs], dtype=float),
            rate=np.array([getattr(s, key).detuning for s in seqs], dtype=float) - ref,
            phase=np.array([getattr(s, key).phase for s in seqs], dtype=float),
        ))
    u = np.zeros((4, n), dtype=complex)
    u[0] = u[3] = 1.0

    for a, b, active in _segments(picture, first):
        n_steps = max(1, math.ceil((b - a) / step - 1e-9))
        h = (b - a) / n_steps
        if active is None:
            shape = np.zeros(2 * n_steps + 1)
            peak, rate, phase = zeros, zeros, zeros
        else:
            p = pulses[active]
            # clipped against rounding at the window edges
            local = np.clip(a + np.arange(2 * n_steps + 1) * (0.5 * h) - p["start"], 0.0, p["duration"])
            shape = np.asarray(_shape(p["kind"], local, p["duration"]), dtype=float)
            peak, rate, phase = p["peak"], p["rate"], p["phase"]
        _rk4_segment(u, shape, peak, rate, phase, t0, -ref, a, h, n_steps)

    out = np.empty((n, 2, 2), dtype=complex)
    out[:, 0, 0], out[:, 0, 1], out[:, 1, 0], out[:, 1, 1] = u
    return out


def _defects(us: np.ndarray) -> np.ndarray:
    gram = np.conj(np.swapaxes(us, 1, 2)) @ us
    return np.max(np.abs(gram - np.eye(2)), axis=(1, 2))


def propagate_many(picture, seqs: Sequence[SequenceConfig], params: IntegratorParams = IntegratorParams()):
    """Propagate many sequences; returns ``(U (N, 2, 2), defects (N,))``.

    Results are independent of the order and grouping of ``seqs``: each
    sequence follows exactly the arithmetic of a single-sequence run.
    """
    picture = PictureTag.parse(picture)
    seqs = list(seqs)
    for s in seqs:
        check_step(s, params.step)
    us = np.empty((len(seqs), 2, 2), dtype=complex)
    groups: dict = {}
    for i, s in enumerate(seqs):
        groups.setdefault(_layout_key(s), []).append(i)
    for idx in groups.values():
        us[idx] = _propagate_group(picture, [seqs[i] for i in idx], params.step)
    defects = _defects(us) if len(seqs) else np.zeros(0)
    bad = np.flatnonzero(defects > params.max_defect)
    if bad.size:
        raise DefectExceeded(
            f"unitarity defect {defects[bad].max():.3g} > {params.max_defect:g} "
            f"for {bad.size} sequence(s); reduce the step"
        )
    return us, defects


def propagate(picture, seq: SequenceConfig, params: IntegratorParams = IntegratorParams()):
    """Evolution operator over the whole sequence and its unitarity defect.

    No renormalization is applied.

    Raises
    ------
    StepInvalid
        If ``params.step`` is too coarse for the sequence.
    DefectExceeded
        If the final defect exceeds ``params.max_defect``.
    """
    us, defects = propagate_many(picture, [seq], params)
    return Propagator2.from_matrix(us[0]), float(defects[0])


def _excitation(us: np.ndarray, defects: np.ndarray) -> np.ndarray:
    p = np.abs(us[:, 1, 0]) ** 2
    # only rounding overshoot is clamped
    over = (p > 1) & (p - 1 <= defects)
    return np.where(over, 1.0, p)


def p12_numeric_many(picture, seqs: Sequence[SequenceConfig], params: IntegratorParams = IntegratorParams()) -> np.ndarray:
    us, defects = propagate_many(picture, seqs, params)
    return _excitation(us, defects)


def p12_numeric(picture, seq: SequenceConfig, params: IntegratorParams = IntegratorParams()) -> float:
    """Excitation probability ``|<2|U|1>|^2`` from numerical propagation."""
    return float(p12_numeric_many(picture, [seq], params)[0])
