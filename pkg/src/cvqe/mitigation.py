"""Readout-error calibration/inversion and occupation-number postselection.

The calibration matrix N~ is built column by column: prepare each
computational basis state (X gates, run through the same noise model as
the data circuits), measure, and record the observed frequency column.
Assuming N~ p = p~, the ideal distribution is recovered by solving the
linear system on the measured distribution, clipping negative entries to
zero and renormalizing. Full joint 2^q calibration is used since q <= 4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import Circuit, NoiseModel, ShotCounts, StateVector, bitstring, sample_circuit_counts

CONDITION_LIMIT = 1e8


class MitigationError(Exception):
    """Raised when a calibration matrix is too ill-conditioned to invert."""


@dataclass
class ReadoutCalibration:
    q: int
    matrix: np.ndarray  # column s = observed distribution when preparing |s>
    shots_per_state: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        d = 1 << self.q
        if self.matrix.shape != (d, d):
            raise ValueError("calibration matrix must be 2^q x 2^q")
        if (self.matrix < 0).any() or not np.allclose(self.matrix.sum(axis=0), 1.0, atol=1e-12):
            raise ValueError("columns must be distributions")


def calibrate_readout(sampler, q: int, shots_per_state: int, rng_seed: int = 0) -> ReadoutCalibration:
    """Build the empirical confusion matrix from a basis-state sampler.

    ``sampler(basis_index, shots, rng_seed) -> ShotCounts``.
    """
    if shots_per_state < 1:
        raise ValueError("shots_per_state must be >= 1")
    d = 1 << q
    m = np.zeros((d, d))
    for s in range(d):
        counts = sampler(s, shots_per_state, rng_seed + s)
        col = np.zeros(d)
        for b, c in counts.counts.items():
            col[int(b, 2)] += c
        m[:, s] = col / counts.total_shots
    return ReadoutCalibration(q, m, shots_per_state)


def simulator_sampler(noise: NoiseModel | None, q: int):
    """Basis-state sampler backed by the simulator: X-gate prep, noisy readout."""

    def sampler(basis_index: int, shots: int, rng_seed: int) -> ShotCounts:
        circ = Circuit(q)
        for qubit in range(q):
            if basis_index & (1 << (q - 1 - qubit)):
                circ.add("X", qubit)
        return sample_circuit_counts(circ, shots, noise, rng_seed)

    return sampler


def _counts_vector(counts, q: int) -> np.ndarray:
    d = 1 << q
    v = np.zeros(d)
    items = counts.counts.items() if isinstance(counts, ShotCounts) else counts.items()
    for b, c in items:
        if len(b) != q:
            raise ValueError(f"outcome {b!r} does not have {q} bits")
        v[int(b, 2)] += c
    total = v.sum()
    if total <= 0:
        raise ValueError("empty counts")
    return v / total


def apply_readout_correction(counts, cal: ReadoutCalibration) -> np.ndarray:
    """Solve N~ p = p~ and return the clipped, renormalized distribution p."""
    p_obs = _counts_vector(counts, cal.q)
    if np.linalg.cond(cal.matrix) > CONDITION_LIMIT:
        raise MitigationError("calibration matrix is ill-conditioned; use raw counts")
    p = np.linalg.solve(cal.matrix, p_obs)
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if s <= 0:
        raise MitigationError("correction produced an empty distribution")
    return p / s


def probs_to_dict(probs: np.ndarray, q: int) -> dict[str, float]:
    return {bitstring(i, q): float(p) for i, p in enumerate(probs) if p > 0}


@dataclass(frozen=True)
class OccupationFilter:
    spin_up_qubits: tuple[int, ...]
    spin_down_qubits: tuple[int, ...]
    n_up: int
    n_down: int

    def __post_init__(self):
        if set(self.spin_up_qubits) & set(self.spin_down_qubits):
            raise ValueError("spin index sets must be disjoint")

    def keeps(self, outcome: str) -> bool:
        up = sum(outcome[q] == "1" for q in self.spin_up_qubits)
        down = sum(outcome[q] == "1" for q in self.spin_down_qubits)
        return up == self.n_up and down == self.n_down


def postselect_occupation(counts: ShotCounts, filt: OccupationFilter) -> tuple[ShotCounts, int]:
    """Keep outcomes with the required per-spin occupation; count the rest."""
    needed = max(list(filt.spin_up_qubits) + list(filt.spin_down_qubits)) + 1
    kept = {}
    discarded = 0
    for b, c in counts.counts.items():
        if len(b) < needed:
            raise ValueError(f"outcome {b!r} shorter than filter index range")
        if filt.keeps(b):
            kept[b] = c
        else:
            discarded += c
    return ShotCounts(kept, counts.total_shots - discarded), discarded


def save_calibration(path, cal: ReadoutCalibration):
    header = f"# q={cal.q} shots_per_state={cal.shots_per_state}\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(header)
        for row in cal.matrix:
            fh.write(" ".join(f"{x:.12g}" for x in row) + "\n")


def load_calibration(path) -> ReadoutCalibration:
    with open(path) as fh:
        header = fh.readline()
        fields = dict(kv.split("=") for kv in header.lstrip("# ").split())
        rows = [[float(x) for x in line.split()] for line in fh if line.strip()]
    return ReadoutCalibration(int(fields["q"]), np.array(rows), int(fields["shots_per_state"]))
