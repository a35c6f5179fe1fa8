"""Pure-state circuit simulator with stochastic gate noise and readout noise.

Noise is modeled as a depolarizing Pauli twirl: after each gate, with
probability p1 (one-qubit) or p2 (two-qubit), a uniformly random
non-identity Pauli is inserted on the gate's targets. A single call to
:func:`run_circuit` produces one stochastic trajectory; ensemble
statistics come from sampling many trajectories
(:func:`sample_circuit_counts`), which is the hot path and is backed by
the kernels in :mod:`cvqe._kernels`.

Conventions used throughout the package:
  * qubit 0 is the leftmost character of every outcome bitstring, i.e.
    the most significant bit of the state index;
  * rotation gates are exp(-i * angle * P / 2) for P in {X, Y, Z};
  * all randomness flows through ``numpy.random.default_rng`` seeded
    explicitly, so identical seeds give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, sin, sqrt

import numpy as np

from . import _kernels

_SQ2 = 1.0 / sqrt(2.0)

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_FIXED_1Q = {
    "X": _PAULI["X"],
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
}


def _rot(axis: str, angle: float) -> np.ndarray:
    c, s = cos(angle / 2.0), sin(angle / 2.0)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == "Y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)


def _controlled(u: np.ndarray) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    return m


GATE_KINDS = (
    "X", "H", "RX", "RY", "RZ",
    "CNOT", "CZ", "CRX", "CRY", "CRZ", "CH", "CSWAP",
)
_PARAMETRIC = ("RX", "RY", "RZ", "CRX", "CRY", "CRZ")


@dataclass(frozen=True)
class Gate:
    """One gate application. For controlled gates the first target is the control."""

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets = 3 if self.kind == "CSWAP" else (1 if self.kind in ("X", "H", "RX", "RY", "RZ") else 2)
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} targets, got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.targets}")
        if (self.angle is None) == (self.kind in _PARAMETRIC):
            raise ValueError(f"angle mismatch for {self.kind}")

    def matrix(self) -> np.ndarray:
        if self.kind in _FIXED_1Q:
            return _FIXED_1Q[self.kind].copy()
        if self.kind in ("RX", "RY", "RZ"):
            return _rot(self.kind[-1], self.angle)
        if self.kind == "CNOT":
            return _controlled(_PAULI["X"])
        if self.kind == "CZ":
            return _controlled(_PAULI["Z"])
        if self.kind in ("CRX", "CRY", "CRZ"):
            return _controlled(_rot(self.kind[-1], self.angle))
        if self.kind == "CH":
            return _controlled(_FIXED_1Q["H"])
        # CSWAP: swap targets[1], targets[2] when targets[0] is 1
        m = np.eye(8, dtype=complex)
        m[[5, 6]] = m[[6, 5]]
        return m


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        for g in self.gates:
            if any(t < 0 or t >= self.num_qubits for t in g.targets):
                raise IndexError(f"gate {g} targets outside 0..{self.num_qubits - 1}")

    def add(self, kind: str, *targets: int, angle: float | None = None) -> "Circuit":
        g = Gate(kind, tuple(targets), angle)
        if any(t < 0 or t >= self.num_qubits for t in g.targets):
            raise IndexError(f"gate {g} targets outside 0..{self.num_qubits - 1}")
        self.gates.append(g)
        return self


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError("amplitude length must be 2**num_qubits")

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing insertion probabilities plus per-qubit readout flips.

    ``readout`` is a (p_flip_0to1, p_flip_1to0) pair applied to every
    measured qubit, or None for ideal readout.
    """

    p1: float = 0.0
    p2: float = 0.0
    readout: tuple[float, float] | None = None

    def __post_init__(self):
        probs = [self.p1, self.p2] + (list(self.readout) if self.readout else [])
        if any(p < 0.0 or p > 1.0 for p in probs):
            raise ValueError("noise probabilities must lie in [0, 1]")

    def is_trivial_gate_noise(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0


@dataclass
class ShotCounts:
    counts: dict[str, int]
    total_shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total_shots:
            raise ValueError("counts must sum to total_shots")

    def frequencies(self) -> dict[str, float]:
        return {k: v / self.total_shots for k, v in self.counts.items()}


def bitstring(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def _apply_matrix(amps: np.ndarray, mat: np.ndarray, targets: tuple[int, ...], nq: int) -> np.ndarray:
    k = len(targets)
    psi = amps.reshape([2] * nq)
    psi = np.moveaxis(psi, targets, range(k))
    tail = psi.shape[k:]
    psi = mat @ psi.reshape(1 << k, -1)
    psi = np.moveaxis(psi.reshape([2] * k + list(tail)), range(k), targets)
    return psi.reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    if any(t < 0 or t >= state.num_qubits for t in gate.targets):
        raise IndexError(f"gate target outside 0..{state.num_qubits - 1}")
    amps = _apply_matrix(state.amplitudes, gate.matrix(), gate.targets, state.num_qubits)
    return StateVector(state.num_qubits, amps)


def _insert_random_pauli(amps: np.ndarray, targets: tuple[int, ...], nq: int, rng) -> np.ndarray:
    if len(targets) == 1:
        code = int(rng.integers(1, 4))
        paulis = (code,)
    else:
        code = int(rng.integers(1, 16))
        paulis = (code // 4, code % 4)
    names = "IXYZ"
    for p, t in zip(paulis, targets):
        if p:
            amps = _apply_matrix(amps, _PAULI[names[p]], (t,), nq)
    return amps


def run_circuit(
    state: StateVector,
    circuit: Circuit,
    noise: NoiseModel | None = None,
    rng_seed: int = 0,
) -> StateVector:
    """Apply the circuit; with noise, sample one Pauli-insertion trajectory."""
    if circuit.num_qubits != state.num_qubits:
        raise ValueError(
            f"circuit has {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )
    rng = np.random.default_rng(rng_seed)
    amps = state.amplitudes.copy()
    nq = state.num_qubits
    noisy = noise is not None and not noise.is_trivial_gate_noise()
    for gate in circuit.gates:
        amps = _apply_matrix(amps, gate.matrix(), gate.targets, nq)
        if noisy:
            p = noise.p1 if len(gate.targets) == 1 else noise.p2
            if p > 0.0 and rng.random() < p:
                # uniform over non-identity Paulis on the gate's targets
                amps = _insert_random_pauli(amps, gate.targets[:2] if len(gate.targets) > 2 else gate.targets, nq, rng)
    return StateVector(nq, amps)


def _normalized_probs(amps: np.ndarray) -> np.ndarray:
    p = np.abs(amps) ** 2
    return p / p.sum()


def _apply_readout_flips(outcomes: np.ndarray, nq: int, readout, rng) -> np.ndarray:
    pairs = _readout_pairs(readout, nq)
    shots = outcomes.shape[0]
    shifts = np.arange(nq - 1, -1, -1)
    bits = (outcomes[:, None] >> shifts[None, :]) & 1
    u = rng.random((shots, nq))
    p01 = pairs[:, 0][None, :]
    p10 = pairs[:, 1][None, :]
    flip = np.where(bits == 0, u < p01, u < p10)
    bits = bits ^ flip
    return (bits << shifts[None, :]).sum(axis=1)


def _readout_pairs(readout, nq: int) -> np.ndarray:
    arr = np.asarray(readout, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (nq, 1))
    if arr.shape != (nq, 2):
        raise ValueError("readout must be one (p01, p10) pair or one per qubit")
    return arr


def _counts_from_outcomes(outcomes: np.ndarray, nq: int, shots: int) -> ShotCounts:
    vals, cnt = np.unique(outcomes, return_counts=True)
    return ShotCounts({bitstring(int(v), nq): int(c) for v, c in zip(vals, cnt)}, shots)


def sample_counts(
    state: StateVector,
    shots: int,
    readout=None,
    rng_seed: int = 0,
) -> ShotCounts:
    """Draw computational-basis shots from |amplitude|^2, then flip readout bits."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng_seed)
    nq = state.num_qubits
    probs = _normalized_probs(state.amplitudes)
    if readout is None:
        counts = rng.multinomial(shots, probs)
        return ShotCounts(
            {bitstring(i, nq): int(c) for i, c in enumerate(counts) if c > 0}, shots
        )
    outcomes = rng.choice(probs.size, size=shots, p=probs)
    outcomes = _apply_readout_flips(outcomes, nq, readout, rng)
    return _counts_from_outcomes(outcomes, nq, shots)


def _encode_circuit(circuit: Circuit):
    n_gates = len(circuit.gates)
    mats = np.zeros((n_gates, 4, 4), dtype=complex)
    arity = np.zeros(n_gates, dtype=np.int8)
    t0s = np.zeros(n_gates, dtype=np.int64)
    t1s = np.zeros(n_gates, dtype=np.int64)
    for g, gate in enumerate(circuit.gates):
        if len(gate.targets) > 2:
            raise ValueError("trajectory sampling supports 1- and 2-qubit gates only")
        m = gate.matrix()
        arity[g] = len(gate.targets)
        t0s[g] = gate.targets[0]
        t1s[g] = gate.targets[1] if arity[g] == 2 else -1
        mats[g, : m.shape[0], : m.shape[1]] = m
    return mats, arity, t0s, t1s


def sample_circuit_counts(
    circuit: Circuit,
    shots: int,
    noise: NoiseModel | None,
    rng_seed: int = 0,
) -> ShotCounts:
    """Sample shots of the circuit run from |0...0>, one noise trajectory per shot.

    Shots whose sampled error pattern is empty share the cached noiseless
    state; the rest are re-simulated individually by the trajectory kernel.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng_seed)
    nq = circuit.num_qubits
    state0 = run_circuit(StateVector.zero(nq), circuit)
    probs0 = _normalized_probs(state0.amplitudes)
    readout = noise.readout if noise is not None else None

    if noise is None or noise.is_trivial_gate_noise() or not circuit.gates:
        if readout is None:
            return sample_counts(state0, shots, rng_seed=rng_seed)
        outcomes = rng.choice(probs0.size, size=shots, p=probs0)
        outcomes = _apply_readout_flips(outcomes, nq, readout, rng)
        return _counts_from_outcomes(outcomes, nq, shots)

    mats, arity, t0s, t1s = _encode_circuit(circuit)
    p_gate = np.where(arity == 1, noise.p1, noise.p2)
    err = rng.random((shots, len(circuit.gates))) < p_gate[None, :]
    err_rows = np.nonzero(err.any(axis=1))[0]
    n_err = err_rows.size

    outcomes = np.empty(shots, dtype=np.int64)
    if n_err:
        codes = np.zeros((n_err, len(circuit.gates)), dtype=np.int8)
        flagged = err[err_rows]
        hi = np.where(arity == 1, 4, 16)
        for g in range(len(circuit.gates)):
            idx = np.nonzero(flagged[:, g])[0]
            if idx.size:
                codes[idx, g] = rng.integers(1, hi[g], size=idx.size)
        u_out = rng.random(n_err)
        outcomes[err_rows] = _kernels.run_error_trajectories(
            mats, arity, t0s, t1s, nq, codes, u_out
        )
    clean_rows = np.nonzero(~err.any(axis=1))[0]
    if clean_rows.size:
        outcomes[clean_rows] = rng.choice(probs0.size, size=clean_rows.size, p=probs0)
    if readout is not None:
        outcomes = _apply_readout_flips(outcomes, nq, readout, rng)
    return _counts_from_outcomes(outcomes, nq, shots)


def expectation(state: StateVector, observable) -> float:
    """Exact <psi|O|psi> for a dense matrix or a list of (coeff, pauli string)."""
    dim = state.amplitudes.size
    if isinstance(observable, (list, tuple)):
        from .jw import PauliHamiltonian

        observable = PauliHamiltonian(state.num_qubits, list(observable)).dense()
    elif hasattr(observable, "dense"):
        observable = observable.dense()
    obs = np.asarray(observable, dtype=complex)
    if obs.shape != (dim, dim):
        raise ValueError(f"observable shape {obs.shape} does not match dim {dim}")
    if not np.allclose(obs, obs.conj().T, atol=1e-10):
        raise ValueError("observable is not Hermitian")
    val = np.vdot(state.amplitudes, obs @ state.amplitudes)
    if abs(val.imag) > 1e-12:
        raise ValueError(f"expectation has imaginary residue {val.imag}")
    return float(val.real)


def derive_seed(master_seed: int, *task_index: int) -> int:
    """Mix a master seed with task indices into an independent substream seed."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, task_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
