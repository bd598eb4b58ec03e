import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qflucts import qsim, tpm
from qflucts.noise import (NoiseConfig, apply_noise_channel, heating_kraus, noisy_rotation,
                           rotation_fidelity_curve)
from qflucts.thermal import QubitSpec, gibbs_state, measured_beta


def test_config_validation():
    for bad in ({"heating": 1.0}, {"heating": -0.1}, {"readout_flip": 0.2},
                {"over_rotation": 1.5}, {"rotation_jitter": -1}):
        with pytest.raises(ValueError):
            NoiseConfig(**bad)
    with pytest.raises(ValueError):
        NoiseConfig.from_mapping({"damping": 0.1})
    assert NoiseConfig().is_noiseless
    assert not NoiseConfig(heating=0.01).is_noiseless


@given(st.floats(0, 0.999))
def test_heating_kraus_complete(gamma):
    total = sum(k.conj().T @ k for k in heating_kraus(gamma))
    assert np.abs(total - np.eye(2)).max() < 1e-10


def test_zero_heating_is_identity():
    rho = gibbs_state(QubitSpec(1.0, 0.7))
    np.testing.assert_allclose(apply_noise_channel(rho, NoiseConfig(), 0), rho)


def test_full_pump_reaches_upper_level():
    rho = np.diag([0, 1]).astype(complex)
    out = apply_noise_channel(rho, NoiseConfig(heating=1 - 1e-9), 0)
    np.testing.assert_allclose(out, np.diag([1, 0]), atol=1e-8)


def test_heating_lowers_measured_beta():
    rho = gibbs_state(QubitSpec(1.0, 1.0))
    out = apply_noise_channel(rho, NoiseConfig(heating=0.05), 0)
    assert abs(np.trace(out) - 1) < 1e-10
    assert measured_beta(out[0, 0].real, out[1, 1].real, 1.0) < 1.0


def test_jitter_channel_is_trace_preserving():
    ch = noisy_rotation(qsim.ry(2.0, 0), NoiseConfig(rotation_jitter=0.2))
    total = sum(k.conj().T @ k for k in ch.kraus)
    assert np.abs(total - np.eye(2)).max() < 1e-10


def test_noisy_rotation_passes_other_gates():
    g = qsim.h(0)
    assert noisy_rotation(g, NoiseConfig(over_rotation=0.1)) is g


def test_rotation_curve_noiseless():
    noisy, ideal = rotation_fidelity_curve([0.0, math.pi / 2], shots=None)
    assert noisy[0] == pytest.approx(1.0)
    shots = 8192
    noisy, _ = rotation_fidelity_curve([0.0, math.pi / 2], shots=shots, seed=1)
    assert noisy[0] == 1.0
    assert abs(noisy[1]) < 3 / math.sqrt(shots)


def test_rotation_curve_rejects_bad_angles():
    with pytest.raises(ValueError):
        rotation_fidelity_curve([7.0])


def test_pure_over_rotation_shifts_curve():
    cfg = NoiseConfig(over_rotation=0.02)
    noisy, _ = rotation_fidelity_curve([math.pi], cfg)
    assert noisy[0] == pytest.approx(math.cos(1.02 * math.pi), abs=1e-12)


def test_jitter_makes_pi_deviation_dominate():
    cfg = NoiseConfig(over_rotation=0.02, rotation_jitter=0.1)
    noisy, ideal = rotation_fidelity_curve([math.pi / 4, math.pi], cfg)
    dev = np.abs(noisy - ideal)
    assert dev[1] > dev[0]


def _jarzynski(bw, cfg, seed=0):
    return tpm.ExperimentDef("jarzynski", "aatpm", (QubitSpec.from_beta_omega(bw),),
                             4096, seed, cfg)


def test_noise_off_is_bit_identical():
    a = tpm.run_experiment(_jarzynski(1.0, None))
    b = tpm.run_experiment(_jarzynski(1.0, NoiseConfig()))
    assert a.counts == b.counts
    c1 = tpm.build_experiment_circuit(_jarzynski(1.0, NoiseConfig()))
    c2 = tpm.build_experiment_circuit(_jarzynski(1.0, None))
    assert len(c1) == len(c2)


def test_heating_deviation_grows_with_beta_exact():
    cfg = NoiseConfig(heating=0.05)
    values = []
    for bw in (0.5, 1.0, 1.5, 2.0):
        d = _jarzynski(bw, cfg)
        values.append(tpm.fr_estimate(d, tpm.exact_distribution(d)).value)
    assert all(v < 1 for v in values)
    assert all(np.diff(values) < 0)
    # closed form for a heated Hadamard drive: 1 - gamma tanh(bw/2)
    np.testing.assert_allclose(values, [1 - 0.05 * math.tanh(b / 2) for b in (0.5, 1.0, 1.5, 2.0)],
                               atol=1e-12)


def test_heating_deviation_grows_with_beta_sampled():
    cfg = NoiseConfig(heating=0.05)
    values = [tpm.repeat_for_error(_jarzynski(bw, cfg), 25).value
              for bw in (0.5, 1.0, 1.5, 2.0)]
    assert all(v < 1 for v in values)
    # adjacent gaps are ~6e-3 to 9e-3; the standard error of each mean is ~2e-3
    assert values[0] > values[-1]


def test_readout_flip_in_both_backends():
    cfg = NoiseConfig(readout_flip=0.05)
    d = _jarzynski(1.0, cfg)
    exact = tpm.exact_distribution(d)
    sampled = tpm.run_experiment(tpm.ExperimentDef("jarzynski", "aatpm", d.specs, 50_000, 3, cfg))
    for key, p in exact.probs.items():
        assert abs(sampled.probs[key] - p) < 5 / math.sqrt(50_000)
