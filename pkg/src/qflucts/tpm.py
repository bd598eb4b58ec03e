"""Two-point-measurement experiments and their estimators.

Four experiments are supported, each under the standard two-point
measurement (a recorded system measurement before the drive) or the
ancilla-assisted variant (the initial energy is read from the purifying
ancilla at the end):

* ``JARZYNSKI``    one qubit driven by a Hadamard gate;
* ``INTERMEDIATE`` one qubit driven by ``N`` rotations R_Y(pi/N) separated by
                   ``N-1`` discarded sigma_x measurements;
* ``SWAP``         two qubits exchanged by a SWAP gate;
* ``QMC``          two qubits measured (outcome discarded) in the
                   singlet-triplet basis.

Register layout: single-qubit experiments use system q0 and ancilla q1;
engines use ancilla q0, systems q1 and q2, ancilla q3.

Joint distributions are keyed ``(m_1, ..., n_1, ...)``: final system bits
first, initial bits second.  With ``E(|0>) = +omega/2`` a transition from
``n = 1`` to ``m = 0`` is an energy change of ``+omega``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import noise as noise_mod
from . import qsim
from .noise import NoiseConfig
from .qsim import CircuitOp
from .thermal import (PurificationPair, QubitSpec, build_purification, level_energies,
                      measured_beta)

SIGNS = (1, 0, -1)
SIGN_NAMES = {1: "p", 0: "0", -1: "m"}


class Kind(str, Enum):
    JARZYNSKI = "jarzynski"
    INTERMEDIATE = "intermediate"
    SWAP = "swap"
    QMC = "qmc"

    @property
    def n_systems(self) -> int:
        return 2 if self in (Kind.SWAP, Kind.QMC) else 1


class Protocol(str, Enum):
    TPM = "tpm"
    AATPM = "aatpm"


SINGLE_LAYOUT = {"system": (0,), "ancilla": (1,)}
ENGINE_LAYOUT = {"system": (1, 2), "ancilla": (0, 3)}


def derive_seed(seed: int, *path: int) -> int:
    """A 64-bit seed derived deterministically from ``seed`` and ``path``."""
    return int(np.random.SeedSequence([seed, *path]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentDef:
    kind: Kind
    protocol: Protocol
    specs: tuple[QubitSpec, ...]
    shots: int = 8192
    seed: int = 0
    noise: NoiseConfig | None = None
    n_steps: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        object.__setattr__(self, "specs", tuple(self.specs))
        if len(self.specs) != self.kind.n_systems:
            raise ValueError(
                f"{self.kind.value} needs {self.kind.n_systems} qubit spec(s), got {len(self.specs)}"
            )
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.n_steps != 1 and self.kind is not Kind.INTERMEDIATE:
            raise ValueError("n_steps only applies to the intermediate-measurement experiment")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def layout(self) -> dict[str, tuple[int, ...]]:
        return ENGINE_LAYOUT if self.kind.n_systems == 2 else SINGLE_LAYOUT

    @property
    def n_qubits(self) -> int:
        return 2 * self.kind.n_systems

    @property
    def omegas(self) -> tuple[float, ...]:
        return tuple(s.omega for s in self.specs)


def _final_label(i: int) -> str:
    return f"system-{i + 1}"


def _initial_label(i: int, protocol: Protocol) -> str:
    return f"ancilla-{i + 1}" if protocol is Protocol.AATPM else f"system-{i + 1}-initial"


MID_LABEL = "system-1-mid"


def _drive(definition: ExperimentDef, mid_readout: bool = False) -> list[CircuitOp]:
    cfg = definition.noise
    sys_q = definition.layout["system"]
    ops: list[CircuitOp] = []

    def add(op):
        ops.append(noise_mod.noisy_rotation(op, cfg) if isinstance(op, qsim.Gate) else op)
        if mid_readout:
            ops.append(qsim.measure(sys_q[0], labels=(MID_LABEL,)))
        ops.extend(noise_mod.heating_after(op, cfg))

    if definition.kind is Kind.JARZYNSKI:
        add(qsim.h(sys_q[0]))
    elif definition.kind is Kind.INTERMEDIATE:
        step = math.pi / definition.n_steps
        add(qsim.ry(step, sys_q[0]))
        for _ in range(definition.n_steps - 1):
            ops.append(qsim.measure_x(sys_q[0], record=False))
            add(qsim.ry(step, sys_q[0]))
    elif definition.kind is Kind.SWAP:
        add(qsim.swap(*sys_q))
    else:
        add(qsim.measure_singlet_triplet(*sys_q, record=False))
    return ops


def build_experiment_circuit(definition: ExperimentDef, ancilla_before_drive: bool = False,
                             mid_readout: bool = False) -> list[CircuitOp]:
    """Circuit for one run of ``definition`` on the zero state.

    ``ancilla_before_drive`` moves the AATPM ancilla readout ahead of the
    drive; the recorded statistics are unaffected.  ``mid_readout`` adds a
    recorded energy measurement between the Hadamard drive and the heating
    that follows it (Jarzynski experiment only).
    """
    if mid_readout and definition.kind is not Kind.JARZYNSKI:
        raise ValueError("a mid-drive readout is only defined for the Hadamard drive")
    cfg = definition.noise
    flip = noise_mod.readout(cfg)
    sys_q, anc_q = definition.layout["system"], definition.layout["ancilla"]
    ops: list[CircuitOp] = []
    for s, a, spec in zip(sys_q, anc_q, definition.specs):
        for op in build_purification(PurificationPair(s, a, spec)):
            ops.append(noise_mod.noisy_rotation(op, cfg))

    aatpm = definition.protocol is Protocol.AATPM
    initial = [qsim.measure(q, labels=(_initial_label(i, definition.protocol),), readout_flip=flip)
               for i, q in enumerate(anc_q if aatpm else sys_q)]
    if not aatpm or ancilla_before_drive:
        ops.extend(initial)
    ops.extend(_drive(definition, mid_readout))
    ops.extend(qsim.measure(q, labels=(_final_label(i),), readout_flip=flip)
               for i, q in enumerate(sys_q))
    if aatpm and not ancilla_before_drive:
        ops.extend(initial)
    return ops


def _key_order(definition: ExperimentDef) -> list[str]:
    k = definition.kind.n_systems
    return ([_final_label(i) for i in range(k)]
            + [_initial_label(i, definition.protocol) for i in range(k)])


@dataclass
class JointDistribution:
    """Probabilities of ``(final bits..., initial bits...)``.

    ``shots is None`` marks an exact distribution with no sampling error.
    """

    probs: dict[tuple[int, ...], float]
    n_systems: int
    shots: int | None = None
    counts: dict[tuple[int, ...], int] | None = None

    @classmethod
    def from_counts(cls, counts: dict[tuple[int, ...], int], n_systems: int) -> "JointDistribution":
        full = {key: 0 for key in itertools.product((0, 1), repeat=2 * n_systems)}
        for key, c in counts.items():
            full[tuple(key)] += int(c)
        shots = sum(full.values())
        return cls({k: c / shots for k, c in full.items()}, n_systems, shots, full)

    @classmethod
    def exact(cls, probs: dict[tuple[int, ...], float], n_systems: int) -> "JointDistribution":
        full = {key: 0.0 for key in itertools.product((0, 1), repeat=2 * n_systems)}
        for key, p in probs.items():
            full[tuple(key)] += p
        return cls(full, n_systems)

    def merge(self, other: "JointDistribution") -> "JointDistribution":
        if self.counts is None or other.counts is None:
            raise ValueError("only sampled distributions can be merged")
        if self.n_systems != other.n_systems:
            raise ValueError("cannot merge distributions over different registers")
        merged = {k: self.counts[k] + other.counts[k] for k in self.counts}
        return JointDistribution.from_counts(merged, self.n_systems)

    def entry_error(self, n_entries: int = 1) -> float:
        """Statistical error of a sum of ``n_entries`` elementary probabilities."""
        return 0.0 if self.shots is None else n_entries / math.sqrt(self.shots)

    def _marginal(self, pos: int) -> np.ndarray:
        p = np.zeros(2)
        for key, v in self.probs.items():
            p[key[pos]] += v
        return p

    def final_populations(self, i: int = 0) -> np.ndarray:
        return self._marginal(i)

    def initial_populations(self, i: int = 0) -> np.ndarray:
        return self._marginal(self.n_systems + i)

    def conditional(self) -> np.ndarray:
        """``p[m, n]`` = probability of final ``m`` given initial ``n`` (one system)."""
        if self.n_systems != 1:
            raise ValueError("conditional probabilities are defined for one system")
        q = np.array([[self.probs[(m, n)] for n in (0, 1)] for m in (0, 1)])
        with np.errstate(invalid="ignore", divide="ignore"):
            return q / q.sum(axis=0, keepdims=True)


def _to_joint(definition: ExperimentDef, labels: list[str], table: dict,
              sampled: bool) -> JointDistribution:
    order = [labels.index(lab) for lab in _key_order(definition)]
    remapped: dict[tuple[int, ...], float] = {}
    for bits, v in table.items():
        key = tuple(bits[j] for j in order)
        remapped[key] = remapped.get(key, 0) + v
    n = definition.kind.n_systems
    if sampled:
        return JointDistribution.from_counts(remapped, n)
    return JointDistribution.exact(remapped, n)


def run_experiment(definition: ExperimentDef) -> JointDistribution:
    """Shot-sampled joint distribution, deterministic in ``definition.seed``."""
    circuit = build_experiment_circuit(definition)
    bits = qsim.sample_shots(circuit, qsim.zero_state(definition.n_qubits), definition.shots,
                             np.random.default_rng(definition.seed))
    return _to_joint(definition, qsim.record_labels(circuit), qsim.tally(bits), True)


def exact_distribution(definition: ExperimentDef,
                       ancilla_before_drive: bool = False) -> JointDistribution:
    """Joint distribution from the density-matrix backend (no sampling)."""
    circuit = build_experiment_circuit(definition, ancilla_before_drive)
    probs = qsim.channel_probabilities(circuit, qsim.zero_density(definition.n_qubits))
    return _to_joint(definition, qsim.record_labels(circuit), probs, False)


@dataclass
class EnergyChangeDistribution:
    """Probabilities of energy changes ``a_i * omega_i``, ``a_i`` in (+1, 0, -1).

    ``probs`` and ``errors`` are indexed by ``SIGNS.index(a)`` along each axis:
    shape ``(3,)`` for one system, ``(3, 3)`` for two.
    """

    omegas: tuple[float, ...]
    probs: np.ndarray
    errors: np.ndarray
    shots: int | None = None

    @property
    def n_systems(self) -> int:
        return len(self.omegas)

    def p(self, *signs: int) -> float:
        return float(self.probs[tuple(SIGNS.index(s) for s in signs)])

    def support(self) -> list[tuple[tuple[float, ...], float, float]]:
        """``(energy changes, probability, error)`` for every grid point."""
        out = []
        for combo in itertools.product(SIGNS, repeat=self.n_systems):
            idx = tuple(SIGNS.index(s) for s in combo)
            de = tuple(s * w for s, w in zip(combo, self.omegas))
            out.append((de, float(self.probs[idx]), float(self.errors[idx])))
        return out


def energy_change_distribution(jd: JointDistribution,
                               omegas: Sequence[float]) -> EnergyChangeDistribution:
    k = jd.n_systems
    if len(omegas) != k:
        raise ValueError(f"need {k} level spacing(s), got {len(omegas)}")
    probs = np.zeros((3,) * k)
    n_entries = np.zeros((3,) * k, dtype=int)
    for key, p in jd.probs.items():
        final, initial = key[:k], key[k:]
        idx = tuple(SIGNS.index(n - m) for m, n in zip(final, initial))
        probs[idx] += p
        n_entries[idx] += 1
    errors = n_entries * jd.entry_error()
    return EnergyChangeDistribution(tuple(float(w) for w in omegas), probs, errors, jd.shots)


@dataclass(frozen=True)
class FrEstimate:
    value: float
    std_error: float
    repetitions: int = 1


def _exponential_average(ecd: EnergyChangeDistribution, betas: Sequence[float]) -> FrEstimate:
    vals, ps = [], []
    for de, p, _ in ecd.support():
        vals.append(math.exp(-sum(b * e for b, e in zip(betas, de))))
        ps.append(p)
    vals, ps = np.array(vals), np.array(ps)
    mean = float(ps @ vals)
    if not ecd.shots:
        return FrEstimate(mean, 0.0)
    var = max(float(ps @ vals**2) - mean**2, 0.0)
    return FrEstimate(mean, math.sqrt(var / ecd.shots))


def jarzynski_estimator(ecd: EnergyChangeDistribution, beta_m: float) -> FrEstimate:
    """``<exp(-beta_m W)>`` over a one-qubit energy-change distribution.

    For the drives implemented here the free-energy change vanishes, so the
    target value is 1.  Sampled distributions also carry the standard error
    of the mean (sampling only; the error of ``beta_m`` is not propagated).
    """
    if ecd.n_systems != 1:
        raise ValueError("jarzynski_estimator needs a one-qubit distribution")
    return _exponential_average(ecd, (beta_m,))


def multivariate_fr_estimator(ecd: EnergyChangeDistribution, beta_m1: float,
                              beta_m2: float) -> FrEstimate:
    """``<exp(-beta_1 dE_1 - beta_2 dE_2)>`` over a two-qubit distribution."""
    if ecd.n_systems != 2:
        raise ValueError("multivariate_fr_estimator needs a two-qubit distribution")
    return _exponential_average(ecd, (beta_m1, beta_m2))


def measured_betas(jd: JointDistribution, omegas: Sequence[float]) -> tuple[float, ...]:
    """Inverse temperatures read off the initial-readout populations."""
    return tuple(measured_beta(*jd.initial_populations(i), w) for i, w in enumerate(omegas))


@dataclass(frozen=True)
class EngineEnergetics:
    dE1: float
    dE2: float
    work: float
    err_dE1: float
    err_dE2: float
    err_work: float


def engine_energetics(jd: JointDistribution, omegas: Sequence[float]) -> EngineEnergetics:
    """Mean energy changes from population differences.

    ``<dE_i>/omega_i = [(p0_final - p1_final) - (p0_initial - p1_initial)] / 2``.
    Errors follow ``2 omega_i / sqrt(N)`` and ``2 (omega_1 + omega_2) / sqrt(N)``.
    """
    if jd.n_systems != 2:
        raise ValueError("engine_energetics needs a two-qubit distribution")
    de = []
    for i, w in enumerate(omegas):
        fin, ini = jd.final_populations(i), jd.initial_populations(i)
        de.append(w * ((fin[0] - fin[1]) - (ini[0] - ini[1])) / 2)
    scale = 0.0 if jd.shots is None else 2 / math.sqrt(jd.shots)
    w1, w2 = omegas
    return EngineEnergetics(de[0], de[1], de[0] + de[1],
                            scale * w1, scale * w2, scale * (w1 + w2))


def fr_estimate(definition: ExperimentDef, jd: JointDistribution) -> FrEstimate:
    """The fluctuation-relation average of ``jd`` at its measured temperatures."""
    ecd = energy_change_distribution(jd, definition.omegas)
    betas = measured_betas(jd, definition.omegas)
    return _exponential_average(ecd, betas)


DEFAULT_REPETITIONS = 225


def repeat_for_error(definition: ExperimentDef, k: int = DEFAULT_REPETITIONS,
                     estimator: Callable[[JointDistribution], float] | None = None) -> FrEstimate:
    """Mean and sample standard deviation of ``estimator`` over ``k`` independent runs.

    Run ``r`` uses the seed ``derive_seed(definition.seed, r)``.  The default
    estimator is the fluctuation-relation average at measured temperatures.
    """
    if k < 2:
        raise ValueError("k must be >= 2 to estimate a spread")
    if estimator is None:
        estimator = lambda jd: fr_estimate(definition, jd).value  # noqa: E731
    values = np.array([
        estimator(run_experiment(replace(definition, seed=derive_seed(definition.seed, r))))
        for r in range(k)
    ])
    return FrEstimate(float(values.mean()), float(values.std(ddof=1)), k)


@dataclass
class HeatWorkSamples:
    """Per-realisation work and heat of a heated Hadamard drive.

    Work is the energy change across the gate, heat the change across the
    heating that follows.  ``weights`` are probabilities for exact
    enumerations and ``None`` for shot samples.
    """

    work: np.ndarray
    heat: np.ndarray
    weights: np.ndarray | None
    beta_m: float

    @property
    def mean_heat(self) -> float:
        return float(np.average(self.heat, weights=self.weights))

    def exponential_average(self) -> float:
        """``<exp(-beta_m (W + Q))>`` over the same realisations."""
        return float(np.average(np.exp(-self.beta_m * (self.work + self.heat)),
                                weights=self.weights))


def heat_work_samples(definition: ExperimentDef, exact: bool = False) -> HeatWorkSamples:
    """Three-point readout (initial, after the gate, final) of the Jarzynski experiment.

    Heating only acts on populations, so the extra readout leaves the
    (initial, final) statistics unchanged.
    """
    circuit = build_experiment_circuit(definition, mid_readout=True)
    labels = qsim.record_labels(circuit)
    cols = [labels.index(lab) for lab in
            (_initial_label(0, definition.protocol), MID_LABEL, _final_label(0))]
    energies = level_energies(definition.omegas[0])
    if exact:
        probs = qsim.channel_probabilities(circuit, qsim.zero_density(definition.n_qubits))
        probs = {k: p for k, p in probs.items() if p > 0}
        keys = np.array(list(probs))
        weights = np.array(list(probs.values()))
    else:
        keys = qsim.sample_shots(circuit, qsim.zero_state(definition.n_qubits),
                                 definition.shots, np.random.default_rng(definition.seed))
        weights = None
    e_init, e_mid, e_fin = (energies[keys[:, c]] for c in cols)
    p_init = np.array([np.average(keys[:, cols[0]] == b, weights=weights) for b in (0, 1)])
    beta_m = measured_beta(p_init[0], p_init[1], definition.omegas[0])
    return HeatWorkSamples(e_mid - e_init, e_fin - e_mid, weights, beta_m)
