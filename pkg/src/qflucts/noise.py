"""Imperfection channels: heating, rotation-angle errors and readout flips.

Heating pumps a qubit toward ``|0>``, the upper level under the package's
energy convention, so the heat it injects is positive.  Rotation errors
rescale every R_X/R_Y angle by ``1 + over_rotation`` and, when
``rotation_jitter`` is set, add a Gaussian relative error that differs from
shot to shot.  The jitter is represented as a random-unitary channel on a
Gauss-Hermite grid, which both backends handle exactly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Mapping, Sequence

import numpy as np

from . import qsim
from .qsim import Channel, CircuitOp, Gate


@dataclass(frozen=True)
class NoiseConfig:
    heating: float = 0.0
    over_rotation: float = 0.0
    rotation_jitter: float = 0.0
    readout_flip: float = 0.0
    quadrature_nodes: int = 16

    def __post_init__(self):
        if not 0.0 <= self.heating < 1.0:
            raise ValueError(f"heating must be in [0, 1), got {self.heating}")
        if not 0.0 <= self.readout_flip <= 0.1:
            raise ValueError(f"readout_flip must be in [0, 0.1], got {self.readout_flip}")
        if self.rotation_jitter < 0:
            raise ValueError("rotation_jitter must be non-negative")
        if not -1.0 < self.over_rotation < 1.0:
            raise ValueError("over_rotation must be a relative error in (-1, 1)")
        if self.quadrature_nodes < 2:
            raise ValueError("quadrature_nodes must be >= 2")

    @classmethod
    def from_mapping(cls, data: Mapping) -> "NoiseConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown noise fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def is_noiseless(self) -> bool:
        return (self.heating == 0 and self.over_rotation == 0
                and self.rotation_jitter == 0 and self.readout_flip == 0)


def heating_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude damping from ``|1>`` into ``|0>`` with probability ``gamma``."""
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return k0, k1


def heating_channel(gamma: float, q: int) -> Channel:
    return Channel(heating_kraus(gamma), (q,), "heat")


def apply_noise_channel(rho: np.ndarray, cfg: NoiseConfig, site: int) -> np.ndarray:
    """Apply the configured heating to qubit ``site`` of a density matrix."""
    if cfg.heating == 0:
        return np.array(rho, dtype=complex)
    return qsim.apply_channel(rho, heating_channel(cfg.heating, site))


def heating_after(op: CircuitOp, cfg: NoiseConfig | None) -> list[Channel]:
    """Heating channels to insert after a drive operation, one per target."""
    if cfg is None or cfg.heating == 0:
        return []
    return [heating_channel(cfg.heating, q) for q in op.targets]


def _jitter_grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.hermite_e.hermegauss(n)
    return nodes, weights / weights.sum()


def noisy_rotation(gate: Gate, cfg: NoiseConfig | None) -> CircuitOp:
    """Replace an R_X/R_Y gate by its miscalibrated version; other gates pass through."""
    if cfg is None or gate.angle is None or (cfg.over_rotation == 0 and cfg.rotation_jitter == 0):
        return gate
    q = gate.targets[0]
    mean = gate.angle * (1 + cfg.over_rotation)
    if cfg.rotation_jitter == 0:
        return qsim.rotation(gate.axis, mean, q)
    nodes, weights = _jitter_grid(cfg.quadrature_nodes)
    make = qsim.rx_matrix if gate.axis == "x" else qsim.ry_matrix
    kraus = tuple(np.sqrt(w) * make(mean + cfg.rotation_jitter * gate.angle * z)
                  for z, w in zip(nodes, weights))
    return Channel(kraus, (q,), f"{gate.name}~")


def readout(cfg: NoiseConfig | None) -> float:
    return 0.0 if cfg is None else cfg.readout_flip


def rotation_circuit(angle: float, cfg: NoiseConfig | None = None) -> list[CircuitOp]:
    """R_Y(angle) on ``|0>`` followed by a recorded z readout."""
    return [noisy_rotation(qsim.ry(angle, 0), cfg),
            qsim.measure(0, labels=("q0",), readout_flip=readout(cfg))]


def rotation_fidelity_curve(angles: Sequence[float], cfg: NoiseConfig | None = None,
                            shots: int | None = None,
                            seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """<sigma_z> after R_Y(angle) on ``|0>``, with the ideal ``cos(angle)`` alongside.

    ``shots=None`` evaluates the noisy expectation exactly.
    """
    noisy = []
    for i, a in enumerate(angles):
        if not 0 <= a <= 2 * np.pi + 1e-12:
            raise ValueError(f"angle {a} outside [0, 2pi]")
        circuit = rotation_circuit(a, cfg)
        if shots is None:
            probs = qsim.channel_probabilities(circuit, qsim.zero_density(1))
            noisy.append(probs[(0,)] - probs[(1,)])
        else:
            bits = qsim.sample_shots(circuit, qsim.zero_state(1), shots,
                                     np.random.default_rng([seed, i]))
            noisy.append(1.0 - 2.0 * bits[:, 0].mean())
    return np.array(noisy), np.cos(np.asarray(angles, dtype=float))
