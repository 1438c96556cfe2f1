"""Shared value types, 2x2 complex algebra and configuration checks.

All frequencies are angular (rad/time). In the atom-adapted interaction
picture only the detunings ``Delta_j = omega_j - omega_21`` enter, so the
absolute field and transition frequencies are not stored anywhere.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .pulses import MESA, EnvelopeKind, envelope_from_dict

logger = logging.getLogger(__name__)

__all__ = [
    "Complex2State",
    "Propagator2",
    "PhysicalConstants",
    "PulseConfig",
    "SequenceConfig",
    "mat_mul",
    "unitarity_defect",
    "validate_semiclassical",
]


@dataclass(frozen=True)
class Complex2State:
    """Internal state ``c1 |1> + c2 |2>``."""

    c1: complex
    c2: complex

    @classmethod
    def ground(cls) -> "Complex2State":
        return cls(1.0 + 0j, 0j)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.c1) ** 2 + abs(self.c2) ** 2)

    @property
    def excited_population(self) -> float:
        return abs(self.c2) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2], dtype=complex)


@dataclass(frozen=True)
class Propagator2:
    """2x2 complex evolution operator, stored entry-wise."""

    u11: complex
    u12: complex
    u21: complex
    u22: complex

    @classmethod
    def identity(cls) -> "Propagator2":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @classmethod
    def from_matrix(cls, m) -> "Propagator2":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.u11, self.u12], [self.u21, self.u22]], dtype=complex)

    def adjoint(self) -> "Propagator2":
        c = complex.conjugate
        return Propagator2(c(self.u11), c(self.u21), c(self.u12), c(self.u22))

    def apply(self, state: Complex2State) -> Complex2State:
        return Complex2State(
            self.u11 * state.c1 + self.u12 * state.c2,
            self.u21 * state.c1 + self.u22 * state.c2,
        )

    def __matmul__(self, other: "Propagator2") -> "Propagator2":
        return mat_mul(self, other)


def mat_mul(a: Propagator2, b: Propagator2) -> Propagator2:
    """Matrix product ``a @ b``."""
    return Propagator2(
        a.u11 * b.u11 + a.u12 * b.u21,
        a.u11 * b.u12 + a.u12 * b.u22,
        a.u21 * b.u11 + a.u22 * b.u21,
        a.u21 * b.u12 + a.u22 * b.u22,
    )


def unitarity_defect(u) -> float:
    """Max-norm of ``u^dagger u - 1``.

    Accepts a :class:`Propagator2` or anything convertible to a 2x2 array.
    """
    m = u.matrix if isinstance(u, Propagator2) else np.asarray(u, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(2))))


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be strictly positive")

    def to_dict(self) -> dict:
        return {"hbar": self.hbar, "mass": self.mass}

    @classmethod
    def from_dict(cls, d: dict) -> "PhysicalConstants":
        return cls(**d)


@dataclass(frozen=True)
class PulseConfig:
    """One field pulse.

    Parameters
    ----------
    rabi_peak : float
        Peak Rabi frequency (rad/time), >= 0.
    detuning : float
        Field detuning from the atomic transition (rad/time).
    duration : float
        Pulse length, > 0.
    phase : float
        Field phase at ``t = 0`` (rad).
    envelope : EnvelopeKind
        Local pulse shape.
    """

    rabi_peak: float = math.pi / 2
    detuning: float = 0.0
    duration: float = 1.0
    phase: float = 0.0
    envelope: EnvelopeKind = MESA

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"pulse duration must be > 0, got {self.duration}")
        if not self.rabi_peak >= 0:
            raise ValueError(f"rabi_peak must be >= 0, got {self.rabi_peak}")

    @property
    def effective_rabi(self) -> float:
        return math.hypot(self.rabi_peak, self.detuning)

    def to_dict(self) -> dict:
        return {
            "rabi_peak": self.rabi_peak,
            "detuning": self.detuning,
            "duration": self.duration,
            "phase": self.phase,
            "envelope": self.envelope.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PulseConfig":
        d = dict(d)
        if "envelope" in d:
            d["envelope"] = envelope_from_dict(d["envelope"])
        return cls(**d)


@dataclass(frozen=True)
class SequenceConfig:
    """Two pulses separated by a field-free gap, entered at ``entrance_time``.

    Pulse 1 occupies ``[t0, t0 + tau1]`` and pulse 2
    ``[t0 + tau1 + T, t0 + tau1 + T + tau2]`` in absolute time; the fields
    are mutually in phase at ``t = 0``.
    """

    entrance_time: float = 0.0
    pulse1: PulseConfig = field(default_factory=PulseConfig)
    pulse2: PulseConfig = field(default_factory=PulseConfig)
    gap: float = 5.0
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if not self.gap >= 0:
            raise ValueError(f"gap must be >= 0, got {self.gap}")

    @classmethod
    def two_detuning(
        cls,
        d1: float,
        d2: float,
        *,
        rabi: float = math.pi / 2,
        tau: float = 1.0,
        gap: float = 5.0,
        entrance_time: float = 0.0,
        envelope: EnvelopeKind = MESA,
        phi1: float = 0.0,
        phi2: float = 0.0,
    ) -> "SequenceConfig":
        """Equal-duration, equal-strength pulses with detunings ``d1``, ``d2``."""
        return cls(
            entrance_time=entrance_time,
            pulse1=PulseConfig(rabi, d1, tau, phi1, envelope),
            pulse2=PulseConfig(rabi, d2, tau, phi2, envelope),
            gap=gap,
        )

    @classmethod
    def opposite(cls, delta: float, **kwargs) -> "SequenceConfig":
        """Detunings ``(-delta, +delta)``."""
        return cls.two_detuning(-delta, delta, **kwargs)

    @property
    def pulse2_start(self) -> float:
        return self.entrance_time + self.pulse1.duration + self.gap

    @property
    def end_time(self) -> float:
        return self.pulse2_start + self.pulse2.duration

    def with_entrance(self, t0: float) -> "SequenceConfig":
        return replace(self, entrance_time=t0)

    def to_dict(self) -> dict:
        return {
            "entrance_time": self.entrance_time,
            "pulse1": self.pulse1.to_dict(),
            "pulse2": self.pulse2.to_dict(),
            "gap": self.gap,
            "constants": self.constants.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SequenceConfig":
        d = dict(d)
        for key in ("pulse1", "pulse2"):
            if key in d:
                d[key] = PulseConfig.from_dict(d[key])
        if "constants" in d:
            d["constants"] = PhysicalConstants.from_dict(d["constants"])
        return cls(**d)


def validate_semiclassical(seq: SequenceConfig, velocity: float, threshold: float = 10.0) -> list[str]:
    """Check that the kinetic energy dominates the coupling and detuning energies.

    Returns a list of human-readable warnings (empty when all ratios
    ``E / (hbar * rate)`` reach ``threshold``). Nothing is raised; each
    warning is also logged.
    """
    if not velocity > 0:
        raise ValueError("velocity must be positive")
    hbar, m = seq.constants.hbar, seq.constants.mass
    energy = 0.5 * m * velocity**2
    checks = []
    for name, p in (("pulse1", seq.pulse1), ("pulse2", seq.pulse2)):
        checks.append((f"{name} Rabi frequency", p.rabi_peak))
        checks.append((f"{name} detuning", abs(p.detuning)))
    warnings = []
    for label, rate in checks:
        scale = hbar * rate
        if scale > 0 and energy < threshold * scale:
            msg = (
                f"kinetic energy {energy:.6g} is not >> hbar*{label} = {scale:.6g} "
                f"(ratio {energy / scale:.3g} < {threshold:g}); semiclassical treatment questionable"
            )
            logger.warning(msg)
            warnings.append(msg)
    return warnings
