"""Phase-space averaging of ``P12(-Delta, Delta)`` over a Gaussian atom cloud.

Each classical trajectory with wavenumber ``k`` and initial offset ``x``
has velocity ``v = hbar k / m``, pulse time ``l / v``, gap time ``L / v``
and entrance time ``t0c + x / v``. Two routes are provided:

* :func:`averaged_p12_quadrature` integrates the Wigner function times the
  monochromatic probability on a 2D Gauss-Legendre grid (the oracle);
* :func:`averaged_p12_closed` uses the x-integral done analytically, which
  turns the ``cos^2`` entrance-time factor into a Gaussian damping of its
  oscillating half, leaving a 1D integral over the momentum marginal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .analytic import p12_opposite
from .core import PhysicalConstants
from .errors import DomainError

__all__ = [
    "PhaseSpaceGaussian",
    "SpatialConfig",
    "marginal_g",
    "wigner",
    "averaged_p12_quadrature",
    "averaged_p12_closed",
    "gauss_legendre_panels",
]

WINDOW = 8.0  # half-width of the integration windows in standard deviations


@dataclass(frozen=True)
class PhaseSpaceGaussian:
    """Minimum-uncertainty packet: ``dx * dk = 1/2``.

    Prefer :meth:`from_dk` / :meth:`from_dx`, which derive the conjugate
    spread.
    """

    k_mean: float
    dk: float
    dx: float
    t0_center: float = 0.0

    def __post_init__(self):
        if not (self.dk > 0 and self.dx > 0):
            raise ValueError("spreads must be positive")
        if abs(self.dx * self.dk - 0.5) > 1e-12:
            raise ValueError(f"dx * dk = {self.dx * self.dk!r}, expected 1/2")
        if self.k_mean < WINDOW * self.dk:
            raise DomainError(f"k_mean {self.k_mean} < {WINDOW:g} * dk: packet reaches k <= 0")

    @classmethod
    def from_dk(cls, k_mean: float, dk: float, t0_center: float = 0.0) -> "PhaseSpaceGaussian":
        return cls(k_mean, dk, 0.5 / dk, t0_center)

    @classmethod
    def from_dx(cls, k_mean: float, dx: float, t0_center: float = 0.0) -> "PhaseSpaceGaussian":
        return cls(k_mean, 0.5 / dx, dx, t0_center)

    def k_window(self) -> tuple[float, float]:
        return self.k_mean - WINDOW * self.dk, self.k_mean + WINDOW * self.dk

    def to_dict(self) -> dict:
        return {"k_mean": self.k_mean, "dk": self.dk, "dx": self.dx, "t0_center": self.t0_center}

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseSpaceGaussian":
        d = dict(d)
        if "dx" not in d:
            return cls.from_dk(**d)
        if "dk" not in d:
            return cls.from_dx(**d)
        return cls(**d)


@dataclass(frozen=True)
class SpatialConfig:
    """Field geometry: two fields of length ``l`` separated by ``L``."""

    field_length: float = 1.0
    gap_length: float = 5.0
    rabi: float = math.pi / 2
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if not self.field_length > 0:
            raise ValueError("field_length must be > 0")
        if not self.gap_length >= 0:
            raise ValueError("gap_length must be >= 0")
        if not self.rabi >= 0:
            raise ValueError("rabi must be >= 0")

    @classmethod
    def pi_half_for(cls, k_mean: float, field_length: float = 1.0, gap_length: float = 5.0,
                    constants: PhysicalConstants = PhysicalConstants()) -> "SpatialConfig":
        """Geometry whose Rabi frequency makes a pi/2 pulse at the mean velocity."""
        v = constants.hbar * k_mean / constants.mass
        return cls(field_length, gap_length, math.pi * v / (2 * field_length), constants)

    def velocity(self, k):
        return self.constants.hbar * np.asarray(k, dtype=float) / self.constants.mass

    def to_dict(self) -> dict:
        return {
            "field_length": self.field_length,
            "gap_length": self.gap_length,
            "rabi": self.rabi,
            "constants": self.constants.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpatialConfig":
        d = dict(d)
        if "constants" in d:
            d["constants"] = PhysicalConstants.from_dict(d["constants"])
        return cls(**d)


@lru_cache(maxsize=32)
def _legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_panels(a: float, b: float, n_points: int = 256, order: int = 32):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``.

    ``n_points`` must be a multiple of ``order``; the interval is cut into
    ``n_points // order`` equal panels.
    """
    if n_points % order:
        raise ValueError("n_points must be a multiple of order")
    panels = n_points // order
    x, w = _legendre(order)
    edges = a + (b - a) * (np.arange(panels + 1) / panels)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def marginal_g(dist: PhaseSpaceGaussian, k):
    """Momentum marginal ``g(k)``: normalized Gaussian, mean ``k_mean``, spread ``dk``."""
    k = np.asarray(k, dtype=float)
    out = np.exp(-0.5 * ((k - dist.k_mean) / dist.dk) ** 2) / (math.sqrt(2 * math.pi) * dist.dk)
    return float(out) if out.ndim == 0 else out


def wigner(dist: PhaseSpaceGaussian, x, k):
    """Phase-space density with its x-Gaussian centred at 0."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    return (
        np.exp(-0.5 * ((k - dist.k_mean) / dist.dk) ** 2 - 0.5 * (x / dist.dx) ** 2)
        / (2 * math.pi * dist.dx * dist.dk)
    )


def _check_domain(dist: PhaseSpaceGaussian):
    lo, _ = dist.k_window()
    if lo <= 0:
        raise DomainError(f"k window reaches {lo:g} <= 0")


def averaged_p12_quadrature(delta, dist: PhaseSpaceGaussian, space: SpatialConfig, n_points: int = 256,
                            order: int = 32) -> float:
    """2D tensor-product quadrature of ``W(x, k) P12(-Delta, Delta)``.

    Windows are ``|x| <= 8 dx`` and ``|k - k_mean| <= 8 dk``.
    """
    _check_domain(dist)
    ks, wk = gauss_legendre_panels(*dist.k_window(), n_points, order)
    xs, wx = gauss_legendre_panels(-WINDOW * dist.dx, WINDOW * dist.dx, n_points, order)
    v = space.velocity(ks)[None, :]
    x = xs[:, None]
    p = p12_opposite(
        float(delta),
        space.rabi,
        space.field_length / v,
        space.gap_length / v,
        dist.t0_center + x / v,
    )
    weights = wx[:, None] * wk[None, :] * wigner(dist, x, ks[None, :])
    return float(np.sum(weights * p))


def averaged_p12_closed(delta, dist: PhaseSpaceGaussian, space: SpatialConfig, n_points: int = 256,
                        order: int = 32) -> float:
    """1D momentum integral with the entrance-time spread integrated out.

    For fixed ``k`` the x-average of ``cos^2[Delta (t0 + tau + T/2)]`` is
    ``(1 + exp(-2 m^2 Delta^2 dx^2 / (hbar^2 k^2)) cos[2 Delta (tau + T/2 + t0c)]) / 2``.
    """
    _check_domain(dist)
    d = float(delta)
    hbar, m = space.constants.hbar, space.constants.mass
    ks, wk = gauss_legendre_panels(*dist.k_window(), n_points, order)
    omega = space.rabi
    eff = math.hypot(omega, d)
    if eff == 0:
        return 0.0
    l, L = space.field_length, space.gap_length
    arg = m * eff * l / (2 * hbar * ks)
    s2, c2 = np.sin(arg) ** 2, np.cos(arg) ** 2
    damping = np.exp(-2 * m**2 * d**2 * dist.dx**2 / hbar**2 / ks**2)
    phase = 2 * d * (m * l / (hbar * ks) + m * L / (2 * hbar * ks)) + 2 * d * dist.t0_center
    integrand = marginal_g(dist, ks) * s2 * (1 + damping * np.cos(phase)) * (c2 + (d / eff) ** 2 * s2)
    return float(2 * omega**2 / eff**2 * np.sum(wk * integrand))
