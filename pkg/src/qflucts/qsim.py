"""Few-qubit circuit simulation with two interchangeable backends.

The statevector backend samples shots, collapsing the state at every
mid-circuit measurement.  The density-matrix backend composes the same
operations as exact channels and returns the probability of every string of
recorded bits.

Qubit 0 is the least-significant bit of a basis-state index: for two qubits
the amplitude of ``|q1 q0>`` lives at index ``2*q1 + q0``.  Gate matrices on
several qubits list their targets most-significant first, so ``cnot(c, t)``
carries the textbook matrix with the control as the high bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 8
UNITARY_ATOL = 1e-10
BRANCH_NORM_MIN = 1e-14


class CircuitError(ValueError):
    """Malformed gate, measurement or circuit."""


class NumericalDegeneracyError(RuntimeError):
    """A measurement branch with (numerically) zero norm was selected."""


def _check_unitary(matrix: np.ndarray, what: str) -> None:
    ident = np.eye(matrix.shape[0])
    if not np.allclose(matrix.conj().T @ matrix, ident, atol=UNITARY_ATOL, rtol=0):
        raise CircuitError(f"{what} is not unitary")


def _check_targets(targets: tuple[int, ...], k: int, what: str) -> None:
    if len(targets) != k:
        raise CircuitError(f"{what} acts on {k} qubit(s) but got targets {targets}")
    if len(set(targets)) != len(targets):
        raise CircuitError(f"{what} targets must be distinct, got {targets}")
    if any(q < 0 for q in targets):
        raise CircuitError(f"{what} has a negative target in {targets}")


def _n_local(matrix: np.ndarray, what: str) -> int:
    d = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[1] != d or d not in (2, 4):
        raise CircuitError(f"{what} must be 2x2 or 4x4, got shape {matrix.shape}")
    return d.bit_length() - 1


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary on one or two qubits.

    ``angle`` and ``axis`` are kept for single-qubit rotations so that noise
    models can rebuild the gate with a perturbed angle.
    """

    matrix: np.ndarray
    targets: tuple[int, ...]
    name: str = "U"
    angle: float | None = None
    axis: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        k = _n_local(m, f"gate {self.name}")
        _check_targets(self.targets, k, f"gate {self.name}")
        _check_unitary(m, f"gate {self.name}")

    @property
    def dagger(self) -> "Gate":
        return Gate(self.matrix.conj().T, self.targets, self.name + "^dag")


@dataclass(frozen=True, eq=False)
class Measurement:
    """Projective measurement of ``targets``, optionally in a rotated basis.

    The measured projectors are ``V^dag P_k V`` where ``P_k`` are the
    computational-basis projectors and ``V = basis_change``.  Unrecorded
    measurements still collapse (shot backend) or dephase (density backend).
    ``readout_flip`` is the probability that each recorded bit is reported
    flipped; it never affects the post-measurement state.
    """

    targets: tuple[int, ...]
    basis_change: np.ndarray | None = None
    record: bool = True
    labels: tuple[str, ...] | None = None
    readout_flip: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        if not self.targets:
            raise CircuitError("measurement needs at least one target")
        _check_targets(self.targets, len(self.targets), "measurement")
        if self.basis_change is not None:
            v = np.asarray(self.basis_change, dtype=complex)
            object.__setattr__(self, "basis_change", v)
            if _n_local(v, "basis change") != len(self.targets):
                raise CircuitError("basis change must act on exactly the measured targets")
            _check_unitary(v, "basis change")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"q{q}" for q in self.targets))
        elif len(self.labels) != len(self.targets):
            raise CircuitError("one label per measured target is required")
        if not 0.0 <= self.readout_flip <= 0.5:
            raise CircuitError(f"readout flip probability {self.readout_flip} outside [0, 0.5]")


@dataclass(frozen=True, eq=False)
class Channel:
    """A completely positive trace-preserving map given by Kraus operators.

    In the statevector backend one Kraus branch is sampled per shot (quantum
    trajectory), so the state stays pure.
    """

    kraus: tuple[np.ndarray, ...]
    targets: tuple[int, ...]
    name: str = "channel"

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        if not ks:
            raise CircuitError("channel needs at least one Kraus operator")
        k = _n_local(ks[0], f"channel {self.name}")
        if any(op.shape != ks[0].shape for op in ks):
            raise CircuitError("Kraus operators must share one shape")
        _check_targets(self.targets, k, f"channel {self.name}")
        total = sum(op.conj().T @ op for op in ks)
        if not np.allclose(total, np.eye(2**k), atol=UNITARY_ATOL, rtol=0):
            raise CircuitError(f"channel {self.name} is not trace preserving")


CircuitOp = Union[Gate, Measurement, Channel]


# --- standard gates -------------------------------------------------------

I2 = np.eye(2, dtype=complex)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MATRIX = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=complex)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
_S = 1 / np.sqrt(2)
# rows are <psi_k|, so V maps psi_k onto the k-th computational state
SINGLET_TRIPLET_CHANGE = np.array(
    [[1, 0, 0, 0], [0, _S, _S, 0], [0, _S, -_S, 0], [0, 0, 0, 1]], dtype=complex
)


def ry_matrix(angle: float) -> np.ndarray:
    """exp(-i angle sigma_y / 2)."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx_matrix(angle: float) -> np.ndarray:
    """exp(-i angle sigma_x / 2)."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def x(q: int) -> Gate:
    return Gate(X_MATRIX, (q,), "X")


def h(q: int) -> Gate:
    return Gate(H_MATRIX, (q,), "H")


def ry(angle: float, q: int) -> Gate:
    return Gate(ry_matrix(angle), (q,), "RY", angle=float(angle), axis="y")


def rx(angle: float, q: int) -> Gate:
    return Gate(rx_matrix(angle), (q,), "RX", angle=float(angle), axis="x")


def rotation(axis: str, angle: float, q: int) -> Gate:
    return {"x": rx, "y": ry}[axis](angle, q)


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT_MATRIX, (control, target), "CNOT")


def swap(a: int, b: int) -> Gate:
    return Gate(SWAP_MATRIX, (a, b), "SWAP")


def measure(*targets: int, labels: Sequence[str] | None = None, record: bool = True,
            readout_flip: float = 0.0) -> Measurement:
    """Computational-basis (sigma_z) measurement."""
    return Measurement(tuple(targets), None, record,
                       tuple(labels) if labels is not None else None, readout_flip)


def measure_x(q: int, record: bool = False, label: str | None = None) -> Measurement:
    """sigma_x measurement: a z measurement sandwiched between Hadamards."""
    return Measurement((q,), H_MATRIX, record, (label,) if label else None)


def measure_singlet_triplet(a: int, b: int, record: bool = False) -> Measurement:
    """Measurement in {|00>, (|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2, |11>}."""
    return Measurement((a, b), SINGLET_TRIPLET_CHANGE, record)


# --- states ---------------------------------------------------------------

def n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise CircuitError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise CircuitError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return n


def zero_state(n: int) -> np.ndarray:
    if not 1 <= n <= MAX_QUBITS:
        raise CircuitError(f"register size must be in [1, {MAX_QUBITS}], got {n}")
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def zero_density(n: int) -> np.ndarray:
    psi = zero_state(n)
    return np.outer(psi, psi.conj())


def basis_state(bits: Sequence[int]) -> np.ndarray:
    """Product state with ``bits[q]`` on qubit ``q``."""
    psi = zero_state(len(bits))
    psi[0] = 0.0
    psi[sum(b << q for q, b in enumerate(bits))] = 1.0
    return psi


def is_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> bool:
    rho = np.asarray(rho)
    if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -1e-8)


def _bit_masks(n: int, targets: Sequence[int]) -> np.ndarray:
    """Integer outcome (targets ordered most-significant first) of every basis index."""
    idx = np.arange(2**n)
    out = np.zeros(2**n, dtype=np.int64)
    for q in targets:
        out = (out << 1) | ((idx >> q) & 1)
    return out


def _apply(psi: np.ndarray, matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Apply ``matrix`` to ``targets`` along the last axis of ``psi``."""
    lead = psi.shape[:-1]
    off = len(lead)
    k = len(targets)
    t = psi.reshape(lead + (2,) * n)
    axes = [off + n - 1 - q for q in targets]
    front = list(range(off, off + k))
    t = np.moveaxis(t, axes, front)
    shape = t.shape
    t = np.matmul(matrix, t.reshape(lead + (2**k, -1))).reshape(shape)
    return np.moveaxis(t, front, axes).reshape(psi.shape)


def _check_fits(op: CircuitOp, n: int) -> None:
    if max(op.targets) >= n:
        raise CircuitError(f"target {max(op.targets)} out of range for {n} qubits")


def validate_circuit(circuit: Sequence[CircuitOp], n: int) -> None:
    seen = set()
    for op in circuit:
        if not isinstance(op, (Gate, Measurement, Channel)):
            raise CircuitError(f"unknown circuit operation {op!r}")
        _check_fits(op, n)
        if isinstance(op, Measurement) and op.record:
            for label in op.labels:
                if label in seen:
                    raise CircuitError(f"duplicate record label {label!r}")
                seen.add(label)


def record_labels(circuit: Sequence[CircuitOp]) -> list[str]:
    """Labels of all recorded bits, in circuit order."""
    return [lab for op in circuit if isinstance(op, Measurement) and op.record for lab in op.labels]


# --- statevector backend --------------------------------------------------

def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    n = n_qubits_of(state.shape[-1])
    _check_fits(gate, n)
    return _apply(state, gate.matrix, gate.targets, n)


def _collapse(state: np.ndarray, keep: np.ndarray) -> np.ndarray:
    out = np.where(keep, state, 0)
    norm = np.linalg.norm(out)
    if norm < BRANCH_NORM_MIN:
        raise NumericalDegeneracyError(f"selected branch has norm {norm:.3e}")
    return out / norm


def measure_z(state: np.ndarray, target: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Sample a computational-basis outcome of ``target`` and collapse."""
    n = n_qubits_of(state.size)
    if not 0 <= target < n:
        raise CircuitError(f"target {target} out of range for {n} qubits")
    ones = ((np.arange(state.size) >> target) & 1).astype(bool)
    probs = np.abs(state) ** 2
    p1 = probs[ones].sum() / probs.sum()
    bit = int(rng.random() < p1)
    return bit, _collapse(state, ones if bit else ~ones)


def measure_in_basis(state: np.ndarray, m: Measurement,
                     rng: np.random.Generator) -> tuple[tuple[int, ...], np.ndarray]:
    """Apply V, measure the targets in z, apply V^dag.  Returns the true outcome."""
    n = n_qubits_of(state.size)
    _check_fits(m, n)
    if m.basis_change is not None:
        state = _apply(state, m.basis_change, m.targets, n)
    bits = []
    for q in m.targets:
        b, state = measure_z(state, q, rng)
        bits.append(b)
    if m.basis_change is not None:
        state = _apply(state, m.basis_change.conj().T, m.targets, n)
    return tuple(bits), state


def _apply_channel_shot(state: np.ndarray, ch: Channel, n: int,
                        rng: np.random.Generator) -> np.ndarray:
    branches = [_apply(state, k, ch.targets, n) for k in ch.kraus]
    weights = np.array([np.vdot(b, b).real for b in branches])
    k = int(np.searchsorted(np.cumsum(weights / weights.sum()), rng.random(), side="right"))
    k = min(k, len(branches) - 1)
    norm = np.sqrt(weights[k])
    if norm < BRANCH_NORM_MIN:
        raise NumericalDegeneracyError(f"selected Kraus branch has norm {norm:.3e}")
    return branches[k] / norm


def run_shot(circuit: Sequence[CircuitOp], initial: np.ndarray,
             rng: np.random.Generator) -> dict[str, int]:
    """Execute the circuit once; return recorded bits keyed by label, in circuit order."""
    n = n_qubits_of(initial.size)
    validate_circuit(circuit, n)
    state = np.asarray(initial, dtype=complex)
    record: dict[str, int] = {}
    for op in circuit:
        if isinstance(op, Gate):
            state = _apply(state, op.matrix, op.targets, n)
        elif isinstance(op, Channel):
            state = _apply_channel_shot(state, op, n, rng)
        else:
            bits, state = measure_in_basis(state, op, rng)
            if op.record:
                for label, b in zip(op.labels, bits):
                    if op.readout_flip and rng.random() < op.readout_flip:
                        b ^= 1
                    record[label] = b
    return record


def shot_rng(seed: int, index: int) -> np.random.Generator:
    """The independent stream of shot ``index`` under master ``seed``."""
    return np.random.default_rng([seed, index])


def run_shots(circuit: Sequence[CircuitOp], initial: np.ndarray, shots: int,
              seed: int) -> np.ndarray:
    """Shot-by-shot execution, one derived RNG stream per shot.

    Slow but straightforward; :func:`sample_shots` is the vectorised path.
    Returns a ``(shots, n_recorded)`` array of bits.
    """
    labels = record_labels(circuit)
    out = np.zeros((shots, len(labels)), dtype=np.uint8)
    for i in range(shots):
        rec = run_shot(circuit, initial, shot_rng(seed, i))
        out[i] = [rec[lab] for lab in labels]
    return out


def sample_shots(circuit: Sequence[CircuitOp], initial: np.ndarray, shots: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Run ``shots`` trajectories at once on a ``(shots, 2**n)`` amplitude block.

    Same semantics as :func:`run_shot`; the whole batch draws from ``rng``.
    Returns a ``(shots, n_recorded)`` uint8 array ordered like
    :func:`record_labels`.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = n_qubits_of(initial.size)
    validate_circuit(circuit, n)
    dim = 2**n
    idx = np.arange(dim)
    state = np.broadcast_to(np.asarray(initial, dtype=complex), (shots, dim)).copy()
    columns = []
    for op in circuit:
        if isinstance(op, Gate):
            state = _apply(state, op.matrix, op.targets, n)
        elif isinstance(op, Channel):
            branches = np.stack([_apply(state, k, op.targets, n) for k in op.kraus])
            weights = np.einsum("kbi,kbi->kb", branches.conj(), branches).real
            cum = np.cumsum(weights / weights.sum(axis=0), axis=0)
            pick = (rng.random(shots)[None, :] >= cum).sum(axis=0)
            pick = np.minimum(pick, len(op.kraus) - 1)
            rows = np.arange(shots)
            norms = np.sqrt(weights[pick, rows])
            if norms.min() < BRANCH_NORM_MIN:
                raise NumericalDegeneracyError("selected Kraus branch has zero norm")
            state = branches[pick, rows] / norms[:, None]
        else:
            if op.basis_change is not None:
                state = _apply(state, op.basis_change, op.targets, n)
            for q, label in zip(op.targets, op.labels):
                ones = ((idx >> q) & 1).astype(bool)
                probs = np.abs(state) ** 2
                p1 = probs[:, ones].sum(axis=1) / probs.sum(axis=1)
                bits = rng.random(shots) < p1
                keep = ones[None, :] == bits[:, None]
                state = np.where(keep, state, 0)
                norms = np.linalg.norm(state, axis=1)
                if norms.min() < BRANCH_NORM_MIN:
                    raise NumericalDegeneracyError("selected measurement branch has zero norm")
                state /= norms[:, None]
                if op.record:
                    if op.readout_flip:
                        bits = bits ^ (rng.random(shots) < op.readout_flip)
                    columns.append(bits.astype(np.uint8))
            if op.basis_change is not None:
                state = _apply(state, op.basis_change.conj().T, op.targets, n)
    if not columns:
        return np.zeros((shots, 0), dtype=np.uint8)
    return np.stack(columns, axis=1)


def tally(bits: np.ndarray) -> dict[tuple[int, ...], int]:
    """Count identical rows of a shot array."""
    if bits.shape[1] == 0:
        return {(): bits.shape[0]}
    rows, counts = np.unique(bits, axis=0, return_counts=True)
    return {tuple(int(b) for b in r): int(c) for r, c in zip(rows, counts)}


# --- density-matrix backend -----------------------------------------------

def conjugate(rho: np.ndarray, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """M rho M^dag with M acting on ``targets``."""
    n = n_qubits_of(rho.shape[0])
    left = _apply(rho.T, matrix, targets, n).T
    return _apply(left.conj(), matrix, targets, n).conj()


def apply_channel(rho: np.ndarray, ch: Channel) -> np.ndarray:
    return sum(conjugate(rho, k, ch.targets) for k in ch.kraus)


def _measurement_branches(rho: np.ndarray, m: Measurement, n: int) -> list[np.ndarray]:
    """Unnormalised post-measurement states, indexed by the true outcome integer."""
    if m.basis_change is not None:
        rho = conjugate(rho, m.basis_change, m.targets)
    outcome = _bit_masks(n, m.targets)
    branches = []
    for k in range(2 ** len(m.targets)):
        keep = outcome == k
        b = rho * np.outer(keep, keep)
        if m.basis_change is not None:
            b = conjugate(b, m.basis_change.conj().T, m.targets)
        branches.append(b)
    return branches


def _flip_probability(true: int, reported: int, k: int, p: float) -> float:
    flips = bin(true ^ reported).count("1")
    return p**flips * (1 - p) ** (k - flips)


def channel_branches(circuit: Sequence[CircuitOp],
                     initial: np.ndarray) -> dict[tuple[int, ...], np.ndarray]:
    """Unnormalised states conditioned on every recorded-bit string.

    The trace of each branch is the probability of its record.
    """
    rho = np.asarray(initial, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    validate_circuit(circuit, n)
    branches: dict[tuple[int, ...], np.ndarray] = {(): rho}
    for op in circuit:
        if isinstance(op, Gate):
            branches = {key: conjugate(r, op.matrix, op.targets) for key, r in branches.items()}
        elif isinstance(op, Channel):
            branches = {key: apply_channel(r, op) for key, r in branches.items()}
        elif not op.record:
            branches = {key: sum(_measurement_branches(r, op, n)) for key, r in branches.items()}
        else:
            k = len(op.targets)
            new = {}
            for key, r in branches.items():
                parts = _measurement_branches(r, op, n)
                for reported in range(2**k):
                    if op.readout_flip:
                        acc = sum(_flip_probability(t, reported, k, op.readout_flip) * parts[t]
                                  for t in range(2**k))
                    else:
                        acc = parts[reported]
                    bits = tuple((reported >> (k - 1 - j)) & 1 for j in range(k))
                    new[key + bits] = acc
            branches = new
    return branches


def channel_probabilities(circuit: Sequence[CircuitOp],
                          initial: np.ndarray) -> dict[tuple[int, ...], float]:
    """Exact probability of every recorded-bit string (keys ordered like record_labels)."""
    return {key: float(np.trace(r).real) for key, r in channel_branches(circuit, initial).items()}


def evolve_density(circuit: Sequence[CircuitOp], initial: np.ndarray) -> np.ndarray:
    """Final state averaged over all measurement records."""
    return sum(channel_branches(circuit, initial).values())
