"""Closed-form reference results and the engine mode classifier.

Arguments named ``b``, ``b1``, ``b2`` are rescaled inverse temperatures
``beta * omega``.  Two-qubit probability grids are indexed like
:data:`qflucts.tpm.SIGNS`, i.e. ``grid[SIGNS.index(a), SIGNS.index(b)]``
is the probability of ``dE_1 = a omega_1`` and ``dE_2 = b omega_2``.
"""
from __future__ import annotations

import math
import warnings
from enum import Enum
from typing import Sequence

import numpy as np

from .thermal import gibbs_populations

HEAT_LEAK_VALIDITY = 0.3


def hadamard_work_statistics(b: float) -> tuple[float, float, float]:
    """``(P+, P-, P0)`` for a thermal qubit driven by a Hadamard gate."""
    p0, p1 = gibbs_populations(b)
    return p1 / 2, p0 / 2, 0.5


def intermediate_pmn(n_steps: int) -> tuple[float, float]:
    """``(p_{0|0}, p_{0|1})`` for ``n_steps`` rotations R_Y(pi/N) split by sigma_x measurements.

    The remaining entries follow by symmetry: ``p_{1|1} = p_{0|0}``,
    ``p_{1|0} = p_{0|1}``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps == 1:
        return 0.0, 1.0
    n = n_steps
    c = math.cos(math.pi / n)
    stay = 0.5 * (1 - c ** (n - 2) + c**n)
    flip = (math.sin(math.pi / (2 * n)) ** 2
            * (1 + c ** (n - 2) * math.sin(math.pi / n) ** 2) / (1 - c))
    return stay, flip


def intermediate_matrix(n_steps: int) -> np.ndarray:
    """:func:`intermediate_pmn` as ``p[m, n]``."""
    stay, flip = intermediate_pmn(n_steps)
    return np.array([[stay, flip], [flip, stay]])


def chain_pmn(n_steps: int, unitary: np.ndarray, observable: np.ndarray) -> np.ndarray:
    """Transition matrix ``p[m, n]`` for ``U (measure A U)^(N-1)`` between z eigenstates.

    Built as a product of the elementary matrices ``|<a'|U|a>|^2`` between the
    computational basis and the eigenbasis of ``observable``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    u = np.asarray(unitary, dtype=complex)
    _, basis = np.linalg.eigh(np.asarray(observable, dtype=complex))
    if n_steps == 1:
        return np.abs(u) ** 2
    into_a = np.abs(basis.conj().T @ u) ** 2
    within_a = np.abs(basis.conj().T @ u @ basis) ** 2
    out_of_a = np.abs(u @ basis) ** 2
    m = into_a
    for _ in range(n_steps - 2):
        m = within_a @ m
    return out_of_a @ m


def single_qubit_joint(b: float, pmn: np.ndarray) -> dict[tuple[int, int], float]:
    """``Q[(m, n)] = p_{m|n} p_n`` for a thermal initial state."""
    pn = gibbs_populations(b)
    return {(m, n): float(pmn[m, n] * pn[n]) for m in (0, 1) for n in (0, 1)}


def work_statistics(b: float, pmn: np.ndarray) -> tuple[float, float, float]:
    """``(P+, P-, P0)`` from a transition matrix ``p[m, n]``."""
    q = single_qubit_joint(b, pmn)
    return q[(0, 1)], q[(1, 0)], q[(0, 0)] + q[(1, 1)]


def _partition(b: float) -> float:
    return 2 * math.cosh(b / 2)


def swap_joint_probabilities(b1: float, b2: float) -> np.ndarray:
    """Energy-change grid of the SWAP engine.

    ``P00 = 2cosh((b1+b2)/2)/Z1Z2``, ``P-+ = e^{-(b1-b2)/2}/Z1Z2``,
    ``P+- = e^{(b1-b2)/2}/Z1Z2``; every other entry vanishes.
    """
    z = _partition(b1) * _partition(b2)
    grid = np.zeros((3, 3))
    grid[1, 1] = 2 * math.cosh((b1 + b2) / 2) / z
    grid[2, 0] = math.exp(-(b1 - b2) / 2) / z
    grid[0, 2] = math.exp((b1 - b2) / 2) / z
    return grid


def qmc_joint_probabilities(b1: float, b2: float) -> np.ndarray:
    """Energy-change grid of the singlet-triplet measurement engine.

    From ``|01>`` or ``|10>`` the measurement followed by a z readout swaps
    the qubits with probability 1/2, while ``|00>`` and ``|11>`` are left
    alone, so the exchange entries are half the SWAP ones.
    """
    grid = swap_joint_probabilities(b1, b2)
    grid[2, 0] /= 2
    grid[0, 2] /= 2
    grid[1, 1] = 1 - grid[2, 0] - grid[0, 2]
    return grid


def _fermi(b: float) -> float:
    return gibbs_populations(b)[0]


def swap_energetics(b1: float, b2: float, omega1: float,
                    omega2: float) -> tuple[float, float, float]:
    """``(<dE1>, <dE2>, <W>)`` of the ideal SWAP engine."""
    d = _fermi(b2) - _fermi(b1)
    return d * omega1, -d * omega2, d * (omega1 - omega2)


def qmc_energetics(b1: float, b2: float, omega1: float,
                   omega2: float) -> tuple[float, float, float]:
    """Half of :func:`swap_energetics`, componentwise."""
    return tuple(0.5 * v for v in swap_energetics(b1, b2, omega1, omega2))


def multivariate_fr_value(grid: np.ndarray, b1: float, b2: float) -> float:
    """``sum P_ab exp(-a b1 - b b2)`` with ``a, b`` in (+1, 0, -1)."""
    signs = np.array([1, 0, -1])
    weights = np.exp(-signs[:, None] * b1 - signs[None, :] * b2)
    return float((grid * weights).sum())


def jarzynski_value(p_plus: float, p_minus: float, p_zero: float, b: float) -> float:
    return p_plus * math.exp(-b) + p_minus * math.exp(b) + p_zero


class Mode(str, Enum):
    REFRIGERATOR = "R"
    HEAT_ENGINE = "E"
    THERMAL_ACCELERATOR = "A"
    HEATER = "H"
    UNDETERMINED = "U"


def classify_mode(dE1: float, dE2: float, work: float, beta1: float, beta2: float,
                  err_dE1: float = 0.0, err_dE2: float = 0.0,
                  err_work: float = 0.0) -> Mode:
    """Operating mode from the signs of the mean energy changes and the work.

    The hot qubit is the one with the smaller ``beta``.  A quantity within
    its error bar of zero (``|x| <= err``) leaves the mode undetermined, as
    do equal temperatures and sign patterns no engine can realise.
    """
    if beta1 == beta2:
        return Mode.UNDETERMINED
    if any(abs(v) <= e for v, e in ((dE1, err_dE1), (dE2, err_dE2), (work, err_work))):
        return Mode.UNDETERMINED
    if beta1 < beta2:
        hot, cold = dE1, dE2
    else:
        hot, cold = dE2, dE1
    if cold > 0 and hot > 0:
        return Mode.HEATER
    if cold > 0 and hot < 0:
        return Mode.HEAT_ENGINE if work < 0 else Mode.THERMAL_ACCELERATOR
    if cold < 0 and hot > 0 and work > 0:
        return Mode.REFRIGERATOR
    return Mode.UNDETERMINED


def theoretical_phase_diagram(omega1: float, omega2: float, b1_grid: Sequence[float],
                              b2_grid: Sequence[float]) -> np.ndarray:
    """Ideal SWAP-engine modes; entry ``[i, j]`` is for ``(b1_grid[i], b2_grid[j])``."""
    out = np.empty((len(b1_grid), len(b2_grid)), dtype=object)
    for i, b1 in enumerate(b1_grid):
        for j, b2 in enumerate(b2_grid):
            dE1, dE2, w = swap_energetics(b1, b2, omega1, omega2)
            out[i, j] = classify_mode(dE1, dE2, w, b1 / omega1, b2 / omega2)
    return out


def heat_leak_expansion(beta: float, mean_q: float, work: Sequence[float],
                        heat: Sequence[float], weights: Sequence[float] | None = None) -> float:
    """First-order prediction ``1 - beta <Q exp(-beta W)>`` of ``<exp(-beta dE)>``.

    ``work`` and ``heat`` are paired per-realisation samples, optionally
    weighted.  A warning is issued when ``|beta * mean_q|`` exceeds the
    expansion's validity range.
    """
    if abs(beta * mean_q) >= HEAT_LEAK_VALIDITY:
        warnings.warn(f"|beta <Q>| = {abs(beta * mean_q):.3f} is outside the "
                      f"small-heat regime (< {HEAT_LEAK_VALIDITY})", RuntimeWarning,
                      stacklevel=2)
    w = np.asarray(work, dtype=float)
    q = np.asarray(heat, dtype=float)
    if w.shape != q.shape:
        raise ValueError("work and heat samples must be paired")
    return 1.0 - beta * float(np.average(q * np.exp(-beta * w), weights=weights))
