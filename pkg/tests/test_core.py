import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramseyfringe.core import (
    Complex2State,
    PhysicalConstants,
    Propagator2,
    PulseConfig,
    SequenceConfig,
    mat_mul,
    unitarity_defect,
    validate_semiclassical,
)
from ramseyfringe.pulses import SIN_FOURTH, Tabulated


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return Propagator2.from_matrix(q * (np.diag(r) / np.abs(np.diag(r))))


def test_identity_product():
    u = Propagator2(1 + 2j, 3j, -1, 0.5)
    assert mat_mul(Propagator2.identity(), u) == u
    assert mat_mul(u, Propagator2.identity()) == u


def test_product_hand_expanded():
    a = Propagator2(1, 2j, 3, 4)
    b = Propagator2(0, 1, 1j, 2)
    # row 1: [1*0 + 2j*1j, 1*1 + 2j*2], row 2: [3*0 + 4*1j, 3*1 + 4*2]
    assert mat_mul(a, b) == Propagator2(-2, 1 + 4j, 4j, 11)


def test_unitary_times_adjoint(rng):
    u = random_unitary(rng)
    prod = mat_mul(u, u.adjoint()).matrix
    assert np.max(np.abs(prod - np.eye(2))) < 1e-12


def test_associativity(rng):
    a, b, c = (random_unitary(rng) for _ in range(3))
    lhs = mat_mul(mat_mul(a, b), c).matrix
    rhs = mat_mul(a, mat_mul(b, c)).matrix
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    assert np.max(np.abs(lhs - a.matrix @ b.matrix @ c.matrix)) < 1e-12


@pytest.mark.parametrize(
    "u, expected",
    [
        (Propagator2.identity(), 0.0),
        (Propagator2(cmath.exp(0.7j), 0, 0, cmath.exp(-0.7j)), 0.0),
        (Propagator2(2, 0, 0, 1), 3.0),
    ],
)
def test_unitarity_defect(u, expected):
    assert unitarity_defect(u) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_product_of_unitaries_stays_unitary(seed):
    rng = np.random.default_rng(seed)
    a, b = random_unitary(rng), random_unitary(rng)
    assert unitarity_defect(a @ b) < 1e-10


def test_state_apply_and_norm():
    u = Propagator2(0, 1, 1, 0)
    s = u.apply(Complex2State.ground())
    assert s == Complex2State(0, 1)
    assert s.norm == 1.0
    assert s.excited_population == 1.0


def test_validate_semiclassical_fast_atom():
    seq = SequenceConfig.opposite(0.3)
    assert validate_semiclassical(seq, velocity=10.0) == []


def test_validate_semiclassical_slow_atom():
    seq = SequenceConfig.opposite(0.3)
    warnings = validate_semiclassical(seq, velocity=1.0)
    # E = 0.5 < 10 * pi/2 for both pulses; detuning 0.3: 0.5 < 3 as well
    assert len(warnings) == 4
    assert any("Rabi" in w for w in warnings)


def test_validate_semiclassical_no_coupling():
    seq = SequenceConfig.opposite(0.0, rabi=0.0)
    assert validate_semiclassical(seq, velocity=0.01) == []


def test_validate_semiclassical_threshold_configurable():
    seq = SequenceConfig.opposite(0.3)
    assert validate_semiclassical(seq, velocity=3.0, threshold=1.0) == []
    assert validate_semiclassical(seq, velocity=3.0, threshold=10.0)


def test_validate_semiclassical_rejects_nonpositive_velocity():
    with pytest.raises(ValueError):
        validate_semiclassical(SequenceConfig(), velocity=0.0)


@pytest.mark.parametrize("kwargs", [dict(duration=0.0), dict(duration=-1.0), dict(rabi_peak=-0.1)])
def test_pulse_invariants(kwargs):
    with pytest.raises(ValueError):
        PulseConfig(**kwargs)


def test_sequence_and_constants_invariants():
    with pytest.raises(ValueError):
        SequenceConfig(gap=-1.0)
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=0.0)
    assert PhysicalConstants() == PhysicalConstants(1.0, 1.0)


def test_sequence_layout():
    seq = SequenceConfig.opposite(0.5, tau=1.0, gap=5.0, entrance_time=2.0)
    assert seq.pulse1.detuning == -0.5 and seq.pulse2.detuning == 0.5
    assert seq.pulse2_start == 8.0
    assert seq.end_time == 9.0


@pytest.mark.parametrize(
    "seq",
    [
        SequenceConfig(),
        SequenceConfig.two_detuning(-0.1, 0.7, rabi=0.3, tau=2.5, gap=0.0, entrance_time=1e-7, phi1=0.1,
                                    phi2=math.pi / 3),
        SequenceConfig.opposite(1 / 3, envelope=SIN_FOURTH),
        SequenceConfig.opposite(0.2, envelope=Tabulated((0, 0.5, 1), (0, 1, 0))),
    ],
)
def test_config_round_trip_bit_exact(seq):
    text = json.dumps(seq.to_dict())
    back = SequenceConfig.from_dict(json.loads(text))
    assert back == seq
    assert json.dumps(back.to_dict()) == text
