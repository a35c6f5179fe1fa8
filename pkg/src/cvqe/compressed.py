"""The compressed one-particle-per-spin encoding.

The (1 up, 1 down) occupation sector of an n-site Hubbard instance lives
on two registers of p = ceil(log2 n) qubits, basis |i>|j> with i the
spin-up site and j the spin-down site (site k maps to register value
k-1). The restricted Hamiltonian is

    H^C = -t (hop (x) I + I (x) hop) + U * sum_k |kk><kk|
          + diag(w) (x) I + I (x) diag(w)

where ``hop`` is the single-spin hopping operator projected onto the
weight-1 Jordan-Wigner basis states. The projection is computed
explicitly from the Pauli terms rather than transcribed from a closed
formula, so it stays oracle-checkable against :mod:`cvqe.jw`.

Also here: the analytic 2x1 ground state, matching decompositions of the
interaction graph, the ancilla subspace-Hadamard measurement of a
matching block, and the shot-based compressed energy estimator built
from those pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jw
from .lattice import HubbardSpec
from .sim import StateVector, bitstring


@dataclass
class EnergyEstimate:
    """Energy estimate with its measured components.

    value = -t * hopping_component + U * onsite_component + weight_component.
    ``onsite_component`` is the estimated probability mass on doubly
    occupied configurations (summed over sites); ``hopping_component``
    aggregates the matching-block and diagonal hopping estimates.
    """

    value: float
    onsite_component: float
    hopping_component: float
    weight_component: float = 0.0
    shots_used: int = 0
    corrected: bool = False
    reliable: bool = True


def register_width(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def compressed_hopping_matrix(spec: HubbardSpec, ordering=None) -> np.ndarray:
    """Project the single-spin JW hopping operator onto span{|e_1>,...,|e_n>}."""
    n = spec.n
    h = jw.hopping_single_spin(n, spec.edges, ordering).dense()
    if ordering is None:
        pos = list(range(n))
    else:
        pos = list(ordering)
    # |e_k> has a single 1 at qubit position pos[k-1]
    idx = np.array([1 << (n - 1 - pos[k]) for k in range(n)])
    return np.real_if_close(h[np.ix_(idx, idx)]).astype(float)


@dataclass
class CompressedHamiltonian:
    n: int
    hop: np.ndarray
    t: float
    U: float
    weights: tuple[float, ...] = field(default=())

    def __post_init__(self):
        self.hop = np.asarray(self.hop, dtype=float)
        if self.hop.shape != (self.n, self.n) or not np.allclose(self.hop, self.hop.T):
            raise ValueError("hop must be a symmetric n x n matrix")
        if not self.weights:
            self.weights = (0.0,) * self.n

    def matrix(self) -> np.ndarray:
        """The n^2-dimensional two-register operator."""
        n = self.n
        eye = np.eye(n)
        h = -self.t * (np.kron(self.hop, eye) + np.kron(eye, self.hop))
        for k in range(n):
            h[k * n + k, k * n + k] += self.U
        w = np.diag(self.weights)
        h += np.kron(w, eye) + np.kron(eye, w)
        return h

    def embedded(self) -> np.ndarray:
        """The same operator embedded on two p-qubit registers (dim 4^p)."""
        p = register_width(self.n)
        d = 1 << p
        out = np.zeros((d * d, d * d))
        m = self.matrix()
        idx = np.array([i * d + j for i in range(self.n) for j in range(self.n)])
        out[np.ix_(idx, idx)] = m
        return out


def compressed_hamiltonian(spec: HubbardSpec, ordering=None) -> CompressedHamiltonian:
    return CompressedHamiltonian(
        spec.n, compressed_hopping_matrix(spec, ordering), spec.t, spec.U, spec.site_weights
    )


@dataclass(frozen=True)
class GroundState2x1:
    """Closed-form ground state data of the 2x1 compressed Hamiltonian."""

    U: float
    t: float
    alpha: float
    beta: float
    normalization: float
    energy: float
    double_occupancy: float

    def state_vector(self) -> StateVector:
        a = self.alpha / (self.normalization * math.sqrt(2.0))
        b = self.beta / (self.normalization * math.sqrt(2.0))
        return StateVector(2, np.array([a, b, b, a], dtype=complex))


def analytic_ground_2x1(U: float, t: float) -> GroundState2x1:
    """Analytic 2x1 solution; beta's published form assumes t=1, so scale U by t."""
    if t <= 0:
        raise ValueError("t must be positive")
    u = U / t
    alpha = 4.0
    beta = u + math.sqrt(u * u + 16.0)
    norm = math.sqrt(alpha * alpha + beta * beta)
    energy = U / 2.0 - math.sqrt(U * U / 4.0 + 4.0 * t * t)
    return GroundState2x1(U, t, alpha, beta, norm, energy, 8.0 / (norm * norm))


def matching_decomposition(edges) -> list[frozenset[tuple[int, int]]]:
    """Partition the edge set into matchings by greedy edge coloring."""
    colors: list[set[tuple[int, int]]] = []
    used: list[set[int]] = []
    for e in sorted((min(i, j), max(i, j)) for i, j in edges):
        for c, verts in enumerate(used):
            if e[0] not in verts and e[1] not in verts:
                colors[c].add(e)
                verts.update(e)
                break
        else:
            colors.append({e})
            used.append(set(e))
    return [frozenset(m) for m in colors]


def _partner_map(matching, n: int) -> np.ndarray:
    m = np.arange(n)
    for i, j in matching:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"matching edge ({i},{j}) outside 1..{n}")
        m[i - 1] = j - 1
        m[j - 1] = i - 1
    return m


def matching_branch_operators(matching, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear maps from a p-qubit register to the (register, partner) pair,
    conditioned on the ancilla measuring 0 (B0, accepted) or 1 (B1).

    For a matched pair i < j the accepted map sends |i> to
    (|i,j> + |j,i>)/2 and |j> to (|i... see module docstring); unmatched
    values pass through as |v,v>/sqrt(2) in both branches.
    """
    p = register_width(n)
    d = 1 << p
    partner = _partner_map(matching, n)
    b0 = np.zeros((d * d, d), dtype=float)
    b1 = np.zeros((d * d, d), dtype=float)
    for v in range(n):
        w = int(partner[v])
        if w == v:
            b0[v * d + v, v] = 1.0 / math.sqrt(2.0)
            b1[v * d + v, v] = 1.0 / math.sqrt(2.0)
        else:
            sign = -1.0 if w < v else 1.0
            b0[v * d + w, v] = 0.5
            b0[w * d + v, v] = 0.5 * sign
            b1[v * d + w, v] = 0.5
            b1[w * d + v, v] = -0.5 * sign
    return b0, b1


def _check_support(amps: np.ndarray, n: int, d: int):
    bad = np.abs(amps.reshape(d)[n:]) if d > n else np.empty(0)
    if bad.size and bad.max() > 1e-12:
        raise ValueError(f"state has support outside register values 0..{n - 1}")


def subspace_hadamard_branches(
    state: StateVector, matching, n: int
) -> tuple[np.ndarray, np.ndarray, float]:
    """Both post-measurement branches over (register, partner) plus P(accept)."""
    p = register_width(n)
    d = 1 << p
    if state.num_qubits != p:
        raise ValueError(f"expected a {p}-qubit register for n={n}")
    _check_support(state.amplitudes, n, d)
    b0, b1 = matching_branch_operators(matching, n)
    v0 = b0 @ state.amplitudes
    v1 = b1 @ state.amplitudes
    return v0, v1, float(np.vdot(v0, v0).real)


def subspace_hadamard(
    state: StateVector, matching, n: int, rng_seed: int = 0
) -> tuple[StateVector, bool]:
    """Ancilla-mediated subspace Hadamard on one register; returns the
    normalized two-register residual state and whether the ancilla read 0."""
    v0, v1, p_acc = subspace_hadamard_branches(state, matching, n)
    rng = np.random.default_rng(rng_seed)
    accepted = bool(rng.random() < p_acc)
    branch = v0 if accepted else v1
    branch = branch / np.linalg.norm(branch)
    p = register_width(n)
    return StateVector(2 * p, branch.astype(complex)), accepted


def matching_eigenvalue(v: int, w: int) -> int:
    """Post-transform outcome (register, partner) -> H_M eigenvalue."""
    if v > w:
        return 1
    if v < w:
        return -1
    return 0


def matching_evolution(matching, n: int, angle: float) -> np.ndarray:
    """exp(-i * angle/2 * H_M) on the n-dimensional register space.

    H_M^2 equals the projector P_M onto matched values, so the
    exponential closes: I + (cos(angle/2) - 1) P_M - i sin(angle/2) H_M.
    The half angle keeps this consistent with the RX(angle) gate used by
    the 2x1 circuits.
    """
    h = np.zeros((n, n))
    pm = np.zeros((n, n))
    for i, j in matching:
        h[i - 1, j - 1] = h[j - 1, i - 1] = 1.0
        pm[i - 1, i - 1] = pm[j - 1, j - 1] = 1.0
    half = angle / 2.0
    return np.eye(n) + (math.cos(half) - 1.0) * pm - 1j * math.sin(half) * h


def _sample_joint(probs: np.ndarray, shots: int, rng) -> np.ndarray:
    p = probs / probs.sum()
    return rng.choice(p.size, size=shots, p=p)


def estimate_compressed_energy(
    state: StateVector,
    spec: HubbardSpec,
    shots: int,
    rng_seed: int = 0,
    calibration=None,
) -> EnergyEstimate:
    """Shot-based compressed energy of a two-register state.

    Shots are split equally over the measurement settings: one
    computational-basis setting (onsite equality test, hopping diagonal,
    site weights) and one subspace-Hadamard setting per matching per
    register. Rejected ancilla outcomes are discarded, so roughly half
    the hopping-setting shots contribute.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = spec.n
    p = register_width(n)
    d = 1 << p
    if state.num_qubits != 2 * p:
        raise ValueError(f"expected a {2 * p}-qubit two-register state")
    amps = state.amplitudes.reshape(d, d)
    for r in range(d):
        for which in (amps[r, :], amps[:, r]):
            if r >= n and np.abs(which).max() > 1e-12:
                raise ValueError(f"state has support outside register values 0..{n - 1}")

    rng = np.random.default_rng(rng_seed)
    matchings = matching_decomposition(spec.edges)
    n_settings = 1 + 2 * len(matchings)
    per_setting = max(shots // n_settings, 1)
    hop = compressed_hopping_matrix(spec)
    hop_diag = hop.diagonal()
    weights = np.asarray(spec.site_weights)

    # computational-basis setting
    joint = np.abs(amps) ** 2
    outcomes = _sample_joint(joint.reshape(-1), per_setting, rng)
    if calibration is not None:
        from .mitigation import apply_readout_correction
        from .sim import ShotCounts

        vals, cnt = np.unique(outcomes, return_counts=True)
        counts = ShotCounts(
            {bitstring(int(v), 2 * p): int(c) for v, c in zip(vals, cnt)}, per_setting
        )
        probs = apply_readout_correction(counts, calibration)
        weight_per_outcome = probs
        outcome_vals = np.arange(probs.size)
        corrected = True
    else:
        outcome_vals, cnt = np.unique(outcomes, return_counts=True)
        weight_per_outcome = cnt / per_setting
        corrected = False
    r1 = np.minimum(outcome_vals // d, n - 1)
    r2 = np.minimum(outcome_vals % d, n - 1)
    onsite = float(np.sum(weight_per_outcome * (r1 == r2)))
    diag_part = float(np.sum(weight_per_outcome * (hop_diag[r1] + hop_diag[r2])))
    weight_part = float(np.sum(weight_per_outcome * (weights[r1] + weights[r2])))

    # one subspace-Hadamard setting per matching per register
    hop_off = 0.0
    reliable = True
    total_used = per_setting
    for matching in matchings:
        b0, _ = matching_branch_operators(matching, n)
        for reg in (0, 1):
            a = amps if reg == 0 else amps.T
            t0 = b0 @ a  # (pair, spectator)
            probs = (np.abs(t0) ** 2).reshape(-1)
            p_rej = max(1.0 - probs.sum(), 0.0)
            full = np.concatenate([probs, [p_rej]])
            draws = _sample_joint(full, per_setting, rng)
            total_used += per_setting
            acc = draws[draws < probs.size]
            if acc.size == 0:
                reliable = False
                continue
            pair = acc // d  # spectator index is acc % d
            vals = np.array([matching_eigenvalue(v, w) for v, w in zip(pair // d, pair % d)])
            hop_off += float(vals.mean())

    hopping = hop_off + diag_part
    value = -spec.t * hopping + spec.U * onsite + weight_part
    return EnergyEstimate(
        value=value,
        onsite_component=onsite,
        hopping_component=hopping,
        weight_component=weight_part,
        shots_used=total_used,
        corrected=corrected,
        reliable=reliable,
    )
