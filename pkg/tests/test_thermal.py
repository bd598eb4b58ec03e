import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qflucts import qsim
from qflucts.thermal import (PurificationPair, QubitSpec, UndefinedTemperatureError,
                             build_purification, gibbs_populations, level_energies,
                             measured_beta, nominal_beta_omega, purification_angle)


def purified(bw):
    psi = qsim.zero_state(2)
    for g in build_purification(PurificationPair(0, 1, QubitSpec.from_beta_omega(bw))):
        psi = qsim.apply_gate(psi, g)
    return psi


def system_populations(bw):
    psi = purified(bw)
    rho = np.outer(psi, psi.conj())
    probs = qsim.channel_probabilities([qsim.measure(0)], rho)
    return probs[(0,)], probs[(1,)]


def test_spec_validation():
    with pytest.raises(ValueError):
        QubitSpec(0.0, 1.0)
    with pytest.raises(ValueError):
        QubitSpec(1.0, math.inf)
    assert QubitSpec(2.0, -0.5).beta_omega == -1.0


def test_pair_needs_distinct_qubits():
    with pytest.raises(ValueError):
        PurificationPair(0, 0, QubitSpec(1, 1))


def test_energies_put_ground_level_on_one():
    e0, e1 = level_energies(2.0)
    assert (e0, e1) == (1.0, -1.0)
    p0, p1 = gibbs_populations(3.0)
    assert p1 > p0


@pytest.mark.parametrize("bw, angle", [(0.0, math.pi / 2), (2 * math.log(math.tan(0.7)), 1.4)])
def test_purification_angle(bw, angle):
    assert purification_angle(QubitSpec.from_beta_omega(bw)) == pytest.approx(angle, abs=1e-12)


def test_purification_angle_ground_limit():
    assert purification_angle(QubitSpec.from_beta_omega(60.0)) == pytest.approx(math.pi, abs=1e-12)


@given(st.floats(-8, 8))
def test_nominal_inverts_angle(bw):
    assert nominal_beta_omega(purification_angle(QubitSpec.from_beta_omega(bw))) == \
        pytest.approx(bw, abs=1e-9)


def test_purified_state_infinite_temperature():
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(purified(0.0), [s, 0, 0, s], atol=1e-12)


def test_purified_state_ground_limit():
    psi = qsim.zero_state(2)
    angle = math.pi - 1e-9
    psi = qsim.apply_gate(psi, qsim.ry(angle, 1))
    psi = qsim.apply_gate(psi, qsim.cnot(1, 0))
    assert abs(psi[3]) == pytest.approx(1, abs=1e-9)


def test_purified_amplitudes_are_real_and_thermal():
    bw = 1.2
    z = 2 * math.cosh(bw / 2)
    expected = np.array([math.exp(-bw / 4), 0, 0, math.exp(bw / 4)]) / math.sqrt(z)
    np.testing.assert_allclose(purified(bw), expected, atol=1e-12)


def test_populations_at_unit_beta_omega():
    p0, p1 = system_populations(1.0)
    z = 2 * math.cosh(0.5)
    assert p0 == pytest.approx(math.exp(-0.5) / z, abs=1e-12)
    assert p1 == pytest.approx(math.exp(0.5) / z, abs=1e-12)


def test_measured_beta_examples():
    assert measured_beta(0.5, 0.5, 3.0) == 0.0
    e = math.e
    assert measured_beta(1 / (1 + e), e / (1 + e), 1.0) == pytest.approx(1.0, abs=1e-12)
    p0, p1 = gibbs_populations(1.3)
    assert measured_beta(p0, p1, 1.0) == pytest.approx(1.3, abs=1e-12)


def test_measured_beta_errors():
    with pytest.raises(UndefinedTemperatureError):
        measured_beta(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        measured_beta(0.4, 0.5, 1.0)


@given(st.floats(-5, 5))
def test_round_trip_through_circuit(bw):
    p0, p1 = system_populations(bw)
    assert measured_beta(p0, p1, 1.0) == pytest.approx(bw, abs=1e-10)


def test_ancilla_projection_fixes_system():
    psi = purified(0.8)
    rho = np.outer(psi, psi.conj())
    probs = qsim.channel_probabilities([qsim.measure(1, labels=("a",)),
                                        qsim.measure(0, labels=("s",))], rho)
    assert probs[(0, 1)] == 0.0 and probs[(1, 0)] == 0.0
