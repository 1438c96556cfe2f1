"""Ramsey interferometry with independently detuned and phased fields.

Closed-form and numerically propagated excitation probabilities for a
two-level atom crossing two separated oscillating fields, phase-space
ensemble averages, and fringe-width metrology.
"""
__version__ = "0.1.0"

from .analytic import (
    OppositeDetuningParams,
    central_zero_estimate,
    effective_rabi,
    exact_central_zero,
    mesa_propagator,
    p12_equal,
    p12_general,
    p12_opposite,
    p12_opposite_phases,
    two_pulse_state,
)
from .core import (
    Complex2State,
    PhysicalConstants,
    Propagator2,
    PulseConfig,
    SequenceConfig,
    mat_mul,
    unitarity_defect,
    validate_semiclassical,
)
from .ensemble import PhaseSpaceGaussian, SpatialConfig, averaged_p12_closed, averaged_p12_quadrature, marginal_g
from .errors import DefectExceeded, DomainError, HalfMaxNotBracketed, NoZeroFound, RamseyError, StepInvalid
from .estimators import EnsembleFringeModel, RamseyFringeModel
from .numeric import IntegratorParams, PictureTag, hamiltonian_matrix, p12_numeric, propagate
from .pulses import MESA, SIN_FOURTH, Mesa, SinFourth, Tabulated, envelope_value, pulse_area
