"""Gibbs states of a qubit prepared by purification with an ancilla.

Energy convention used throughout the package: with ``H = (omega/2) sigma_z``
the state ``|0>`` has energy ``+omega/2`` and ``|1>`` has ``-omega/2``, so
``|1>`` is the ground level and a cold qubit sits mostly in ``|1>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qsim import CircuitOp, cnot, ry


class UndefinedTemperatureError(ValueError):
    """Populations of a pure state do not define a finite temperature."""


@dataclass(frozen=True)
class QubitSpec:
    """Level spacing ``omega`` (hbar = 1) and inverse temperature ``beta``.

    ``beta`` may be negative (population inversion).
    """

    omega: float
    beta: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")

    @classmethod
    def from_beta_omega(cls, beta_omega: float, omega: float = 1.0) -> "QubitSpec":
        return cls(omega=omega, beta=beta_omega / omega)

    @property
    def beta_omega(self) -> float:
        return self.beta * self.omega


@dataclass(frozen=True)
class PurificationPair:
    system: int
    ancilla: int
    spec: QubitSpec

    def __post_init__(self):
        if self.system == self.ancilla:
            raise ValueError("system and ancilla must be different qubits")


def level_energies(omega: float) -> np.ndarray:
    """Energies of ``|0>`` and ``|1>``."""
    return np.array([omega / 2, -omega / 2])


def gibbs_populations(beta_omega: float) -> np.ndarray:
    """``(p0, p1)`` of the Gibbs state at rescaled inverse temperature ``beta*omega``."""
    # logistic form stays finite for large |beta_omega|
    p0 = 1.0 / (1.0 + math.exp(beta_omega)) if beta_omega < 700 else 0.0
    return np.array([p0, 1.0 - p0])


def gibbs_state(spec: QubitSpec) -> np.ndarray:
    return np.diag(gibbs_populations(spec.beta_omega)).astype(complex)


def purification_angle(spec: QubitSpec) -> float:
    """Ancilla rotation angle, ``2 arctan(exp(beta*omega/2))``, in (0, pi)."""
    return 2.0 * math.atan(math.exp(spec.beta_omega / 2))


def nominal_beta_omega(angle: float) -> float:
    """Invert :func:`purification_angle`: ``2 ln tan(angle/2)``."""
    return 2.0 * math.log(math.tan(angle / 2))


def build_purification(pair: PurificationPair) -> list[CircuitOp]:
    """R_Y on the ancilla then CNOT onto the system.

    From ``|00>`` this gives ``(e^{-bw/4}|0>_s|0>_a + e^{bw/4}|1>_s|1>_a)/sqrt(2cosh(bw/2))``
    with real amplitudes; the reduced system state is Gibbs.
    """
    return [
        ry(purification_angle(pair.spec), pair.ancilla),
        cnot(pair.ancilla, pair.system),
    ]


def measured_beta(p0: float, p1: float, omega: float) -> float:
    """Inverse temperature read off populations: ``ln(p1/p0) / omega``."""
    if p0 <= 0 or p1 <= 0:
        raise UndefinedTemperatureError(
            f"populations ({p0}, {p1}) describe a pure state; temperature undefined"
        )
    if abs(p0 + p1 - 1) > 1e-9:
        raise ValueError(f"populations must sum to 1, got {p0 + p1}")
    return math.log(p1 / p0) / omega
