"""Closed-form propagators and excitation probabilities for mesa pulses.

Every probability function is vectorized over its numeric arguments with
the usual numpy broadcasting rules and returns a float for scalar input.
The removable singularity at ``Omega = Delta = 0`` (effective Rabi
frequency zero) is resolved by continuity: such pulses act as identity and
the probability is 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Complex2State, Propagator2, PulseConfig, SequenceConfig
from .pulses import Mesa

__all__ = [
    "OppositeDetuningParams",
    "effective_rabi",
    "mesa_propagator",
    "two_pulse_state",
    "p12_general",
    "p12_equal",
    "p12_opposite",
    "p12_opposite_phases",
    "central_zero_estimate",
    "exact_central_zero",
    "t0_period",
]

HALF_PI = math.pi / 2


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _ratio(num, den):
    """``num / den`` with 0 wherever ``den == 0`` (num vanishes there too)."""
    num, den = np.broadcast_arrays(np.asarray(num, dtype=float), np.asarray(den, dtype=float))
    return np.divide(num, den, out=np.zeros(num.shape), where=den != 0)


def effective_rabi(rabi, detuning):
    """Generalized Rabi frequency ``sqrt(Omega^2 + Delta^2)``."""
    return _out(np.hypot(rabi, detuning))


@dataclass(frozen=True)
class OppositeDetuningParams:
    """Arguments of ``P12(-Delta, Delta)``."""

    detuning: float
    rabi: float = HALF_PI
    tau: float = 1.0
    gap: float = 5.0
    entrance: float = 0.0

    def __post_init__(self):
        if not np.all(np.asarray(self.tau) > 0):
            raise ValueError("tau must be > 0")
        if not np.all(np.asarray(self.rabi) >= 0):
            raise ValueError("rabi must be >= 0")


def mesa_propagator(pulse: PulseConfig, t_start: float, t_end: float) -> Propagator2:
    """Exact interaction-picture propagator across (part of) a mesa pulse.

    The off-diagonal phases ``exp(+-i Delta (t_end + t_start) / 2)`` are in
    absolute time, which is where the entrance-time dependence comes from.
    A nonzero field phase ``phi`` multiplies ``u12`` by ``exp(i phi)`` and
    ``u21`` by ``exp(-i phi)``.
    """
    if not isinstance(pulse.envelope, Mesa):
        raise ValueError(f"closed-form propagator needs a mesa envelope, got {pulse.envelope.kind!r}")
    if t_end < t_start:
        raise ValueError("t_end must be >= t_start")
    omega, delta = pulse.rabi_peak, pulse.detuning
    eff = math.hypot(omega, delta)
    dt = t_end - t_start
    half = 0.5 * eff * dt
    cos_h = math.cos(half)
    # sin(eff*dt/2)/eff, finite as eff -> 0
    sin_over = 0.5 * dt * float(np.sinc(half / math.pi))
    diag_phase = np.exp(0.5j * delta * dt)
    off_phase = np.exp(0.5j * delta * (t_end + t_start) + 1j * pulse.phase)
    u11 = diag_phase * (cos_h - 1j * delta * sin_over)
    u22 = np.conj(diag_phase) * (cos_h + 1j * delta * sin_over)
    u12 = -1j * omega * sin_over * off_phase
    u21 = -1j * omega * sin_over * np.conj(off_phase)
    return Propagator2(complex(u11), complex(u12), complex(u21), complex(u22))


def two_pulse_state(seq: SequenceConfig) -> Complex2State:
    """Final internal state for a ground-state atom after both mesa pulses.

    Between the pulses the propagator in the atom-adapted picture is the
    identity, so no gap factor appears.
    """
    t0 = seq.entrance_time
    u1 = mesa_propagator(seq.pulse1, t0, t0 + seq.pulse1.duration)
    u2 = mesa_propagator(seq.pulse2, seq.pulse2_start, seq.end_time)
    return (u2 @ u1).apply(Complex2State.ground())


def p12_general(d1, d2, rabi=HALF_PI, tau=1.0, gap=5.0, entrance=0.0):
    """Excitation probability for pulse detunings ``d1`` and ``d2``.

    Direct evaluation of the two-path amplitude, not via matrix products.

    Parameters
    ----------
    d1, d2 : float or array_like
        Detunings of the first and second field (rad/time).
    rabi : float or array_like
        Rabi frequency of both mesa pulses.
    tau : float or array_like
        Pulse duration.
    gap : float or array_like
        Free flight time between the pulses.
    entrance : float or array_like
        Entrance time ``t0`` into the first field.

    Returns
    -------
    float or ndarray
        ``P12`` in ``[0, 1]``.
    """
    d1, d2 = np.asarray(d1, dtype=float), np.asarray(d2, dtype=float)
    eff1, eff2 = np.hypot(rabi, d1), np.hypot(rabi, d2)
    s1, c1 = np.sin(eff1 * tau / 2), np.cos(eff1 * tau / 2)
    s2, c2 = np.sin(eff2 * tau / 2), np.cos(eff2 * tau / 2)
    phase = 0.5 * (d1 - d2) * (entrance + tau) - 0.5 * d2 * gap
    first = np.exp(1j * phase) * s2 * (c1 - 1j * _ratio(d1, eff1) * s1) * _ratio(rabi, eff2)
    second = np.exp(-1j * phase) * s1 * (c2 + 1j * _ratio(d2, eff2) * s2) * _ratio(rabi, eff1)
    return _out(np.abs(first + second) ** 2)


def p12_equal(d, rabi=HALF_PI, tau=1.0, gap=5.0):
    """Standard Ramsey probability for equal detunings (no ``t0`` dependence)."""
    d = np.asarray(d, dtype=float)
    eff = np.hypot(rabi, d)
    s, c = np.sin(eff * tau / 2), np.cos(eff * tau / 2)
    bracket = c * np.cos(d * gap / 2) - _ratio(d, eff) * s * np.sin(d * gap / 2)
    return _out(4 * _ratio(rabi, eff) ** 2 * s**2 * bracket**2)


def _opposite(d, rabi, tau, cos_arg):
    d = np.asarray(d, dtype=float)
    eff = np.hypot(rabi, d)
    s, c = np.sin(eff * tau / 2), np.cos(eff * tau / 2)
    return 4 * _ratio(rabi, eff) ** 2 * s**2 * np.cos(cos_arg) ** 2 * (c**2 + _ratio(d, eff) ** 2 * s**2)


def p12_opposite(delta, rabi=HALF_PI, tau=1.0, gap=5.0, entrance=0.0):
    """``P12(-Delta, Delta)``: detunings of equal modulus and opposite sign.

    ``delta`` may be an :class:`OppositeDetuningParams`, in which case the
    remaining arguments are taken from it.
    """
    if isinstance(delta, OppositeDetuningParams):
        p = delta
        delta, rabi, tau, gap, entrance = p.detuning, p.rabi, p.tau, p.gap, p.entrance
    delta = np.asarray(delta, dtype=float)
    return _out(_opposite(delta, rabi, tau, delta * (entrance + tau + gap / 2)))


def p12_opposite_phases(d, rabi=HALF_PI, tau=1.0, gap=5.0, phi1=0.0, phi2=0.0):
    """``P12(-Delta, Delta)`` for entrance at ``t = 0`` and field phases ``phi1``, ``phi2``.

    Note the phase difference enters the cosine at full weight here, so a
    difference of ``Delta * t0`` reproduces :func:`p12_opposite` at entrance
    ``t0``. Propagating the phased Hamiltonian directly gives half that weight
    (see ``numeric.hamiltonian_matrix``).
    """
    d = np.asarray(d, dtype=float)
    return _out(_opposite(d, rabi, tau, d * (tau + gap / 2) + phi2 - phi1))


def central_zero_estimate(tau, gap, entrance=0.0):
    """Small-detuning estimate ``2 / (T + 2 (t0 + tau))`` of the first fringe zero.

    Assumes pi/2 pulses. The exact zero of the cosine factor is larger by
    ``pi / 2``; see :func:`exact_central_zero`.
    """
    return _out(2.0 / (np.asarray(gap, dtype=float) + 2 * (np.asarray(entrance) + tau)))


def exact_central_zero(tau, gap, entrance=0.0):
    """Smallest positive zero of the ``cos^2`` factor: ``pi / (T + 2 (t0 + tau))``."""
    return _out(math.pi / (np.asarray(gap, dtype=float) + 2 * (np.asarray(entrance) + tau)))


def t0_period(d1: float, d2: float) -> float:
    """Entrance-time period ``2 pi / |d1 - d2|``; ``inf`` for equal detunings."""
    diff = abs(d1 - d2)
    return math.inf if diff == 0 else 2 * math.pi / diff
