"""Hamiltonian-variational ansatz for the 2x1 lattice and its energy estimators.

One ansatz layer produces e^{i theta H_hop} e^{i phi H_os} |Psi_ini> in
two interchangeable representations:

  * compressed (2 qubits): RY(pi/2) pair preparing |+>|+> (the hopping
    ground state), a CNOT-RZ(-phi)-CNOT block giving the onsite phase
    e^{i phi} on equal registers, RX(theta) on each qubit;
  * uncompressed (4 qubits, modes 1up 2up 1down 2down on qubits 0..3):
    X + Givens block preparing the one-particle hopping ground state per
    spin, controlled-RZ(phi) onsite blocks, CNOT-CRX(theta)-CNOT hopping
    blocks.

Gate signs are calibrated so the noiseless 2x1 landscape at U=2, t=1 has
its minimum at (phi, theta) = (0.46365, pi/4) with energy -1.23607.

Energy is measured in two settings: computational basis (onsite) and the
hopping basis reached by Hadamards (compressed) or CNOT-CH-CNOT blocks
(uncompressed). For compressed instances with more than two sites the
exact landscape is evaluated with the matching-evolution operators from
:mod:`cvqe.compressed` instead of gate circuits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jw, mitigation
from .compressed import (
    EnergyEstimate,
    compressed_hamiltonian,
    compressed_hopping_matrix,
    matching_decomposition,
    matching_evolution,
    register_width,
)
from .lattice import HubbardSpec
from .sim import (
    Circuit,
    NoiseModel,
    ShotCounts,
    StateVector,
    derive_seed,
    expectation,
    run_circuit,
    sample_circuit_counts,
)

REPRESENTATIONS = ("compressed", "uncompressed")

# uncompressed qubit layout: (1up, 2up, 1down, 2down) -> qubits (0, 1, 2, 3)
_SPIN_PAIRS = ((0, 1), (2, 3))
_SITE_PAIRS = ((0, 2), (1, 3))
UNCOMPRESSED_FILTER = mitigation.OccupationFilter((0, 1), (2, 3), 1, 1)


@dataclass(frozen=True)
class AnsatzParams:
    phi: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.theta)):
            raise ValueError("parameters must be finite")


def _as_params(params) -> AnsatzParams:
    if isinstance(params, AnsatzParams):
        return params
    phi, theta = params
    return AnsatzParams(float(phi), float(theta))


def _check_representation(representation: str):
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unsupported representation {representation!r}")


def initial_state_circuit(representation: str) -> Circuit:
    """Prepare the U=0 (hopping) ground state in the (1,1) sector."""
    _check_representation(representation)
    if representation == "compressed":
        c = Circuit(2)
        c.add("RY", 0, angle=math.pi / 2)
        c.add("RY", 1, angle=math.pi / 2)
        return c
    c = Circuit(4)
    for a, b in _SPIN_PAIRS:
        c.add("X", a)
    for a, b in _SPIN_PAIRS:
        # Givens block: |10> -> (|01> + |10>)/sqrt(2)
        c.add("CNOT", a, b)
        c.add("CRY", b, a, angle=-math.pi / 2)
        c.add("CNOT", a, b)
    return c


def ansatz_circuit(params, representation: str) -> Circuit:
    params = _as_params(params)
    c = initial_state_circuit(representation)
    if representation == "compressed":
        # e^{i phi} phase on equal registers (ZZ = +1), global phase dropped
        c.add("CNOT", 0, 1)
        c.add("RZ", 1, angle=-params.phi)
        c.add("CNOT", 0, 1)
        c.add("RX", 0, angle=params.theta)
        c.add("RX", 1, angle=params.theta)
        return c
    for up, down in _SITE_PAIRS:
        c.add("CRZ", up, down, angle=params.phi)
    for a, b in _SPIN_PAIRS:
        c.add("CNOT", a, b)
        c.add("CRX", b, a, angle=params.theta)
        c.add("CNOT", a, b)
    return c


def measurement_suffix(kind: str, representation: str) -> Circuit:
    _check_representation(representation)
    if kind not in ("onsite", "hopping"):
        raise ValueError(f"unknown measurement kind {kind!r}")
    nq = 2 if representation == "compressed" else 4
    c = Circuit(nq)
    if kind == "onsite":
        return c
    if representation == "compressed":
        c.add("H", 0)
        c.add("H", 1)
        return c
    for a, b in _SPIN_PAIRS:
        c.add("CNOT", a, b)
        c.add("CH", b, a)
        c.add("CNOT", a, b)
    return c


def measurement_circuit(params, representation: str, kind: str) -> Circuit:
    c = ansatz_circuit(params, representation)
    for g in measurement_suffix(kind, representation).gates:
        c.gates.append(g)
    return c


def _outcome_weights(counts) -> dict[str, float]:
    """Normalize ShotCounts or an outcome->weight dict to probabilities."""
    if isinstance(counts, ShotCounts):
        if counts.total_shots == 0:
            raise ValueError("empty counts")
        return counts.frequencies()
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("empty counts")
    return {k: v / total for k, v in counts.items()}


# outcome -> hopping eigenvalue for one uncompressed spin pair after the suffix
_PAIR_TABLE = {"00": 0.0, "01": 1.0, "10": -1.0, "11": 0.0}


def energy_from_counts(onsite_counts, hopping_counts, spec: HubbardSpec, representation: str) -> EnergyEstimate:
    """Combine the two measurement settings into an energy estimate."""
    _check_representation(representation)
    ow = _outcome_weights(onsite_counts)
    hw = _outcome_weights(hopping_counts)
    shots = 0
    for c in (onsite_counts, hopping_counts):
        if isinstance(c, ShotCounts):
            shots += c.total_shots
    if representation == "compressed":
        onsite = sum(w for b, w in ow.items() if b[0] == b[1])
        hop = sum(w * ((1.0 if b[0] == "0" else -1.0) + (1.0 if b[1] == "0" else -1.0)) for b, w in hw.items())
    else:
        onsite = sum(w * sum(1.0 for up, dn in _SITE_PAIRS if b[up] == "1" and b[dn] == "1") for b, w in ow.items())
        hop = sum(w * sum(_PAIR_TABLE[b[a] + b[bq]] for a, bq in _SPIN_PAIRS) for b, w in hw.items())
    value = -spec.t * hop + spec.U * onsite
    return EnergyEstimate(
        value=value,
        onsite_component=onsite,
        hopping_component=hop,
        shots_used=shots,
    )


def double_occupancy_from_counts(onsite_counts, n: int, representation: str) -> float:
    """(1/n) sum_k P(site k doubly occupied), from computational-basis counts."""
    _check_representation(representation)
    ow = _outcome_weights(onsite_counts)
    if representation == "compressed":
        frac = sum(w for b, w in ow.items() if b[: len(b) // 2] == b[len(b) // 2 :])
        return frac / n
    frac = sum(w * sum(1.0 for up, dn in _SITE_PAIRS if b[up] == "1" and b[dn] == "1") for b, w in ow.items())
    return frac / n


def _compressed_state_matrix(params: AnsatzParams, spec: HubbardSpec) -> np.ndarray:
    """Exact compressed ansatz state for any n, as a (2^p, 2^p) register matrix."""
    n = spec.n
    p = register_width(n)
    d = 1 << p
    hop = compressed_hopping_matrix(spec)
    single = -spec.t * hop + np.diag(spec.site_weights)
    _, g = jw.ground_state_dense(single.astype(complex))
    gd = np.zeros(d, dtype=complex)
    gd[:n] = g
    a = np.outer(gd, gd)
    for k in range(n):
        a[k, k] *= np.exp(1j * params.phi)
    for matching in matching_decomposition(spec.edges):
        ev = np.zeros((d, d), dtype=complex)
        ev[:n, :n] = matching_evolution(matching, n, params.theta)
        for k in range(n, d):
            ev[k, k] = 1.0
        a = ev @ a @ ev.T
    return a


def exact_ansatz_state(params, spec: HubbardSpec, representation: str) -> StateVector:
    params = _as_params(params)
    _check_representation(representation)
    if representation == "uncompressed":
        if spec.n != 2:
            raise ValueError("uncompressed circuits are implemented for the 2x1 lattice only")
        return run_circuit(StateVector.zero(4), ansatz_circuit(params, representation))
    if spec.n == 2:
        return run_circuit(StateVector.zero(2), ansatz_circuit(params, representation))
    a = _compressed_state_matrix(params, spec)
    p = register_width(spec.n)
    return StateVector(2 * p, a.reshape(-1))


def exact_landscape(params, spec: HubbardSpec, representation: str) -> float:
    """Noiseless exact ansatz energy; the sweep and VQE oracle."""
    state = exact_ansatz_state(params, spec, representation)
    if representation == "uncompressed":
        return expectation(state, jw.jordan_wigner_hamiltonian(spec).dense())
    return expectation(state, compressed_hamiltonian(spec).embedded())


@dataclass
class MeasuredEnergy:
    raw: EnergyEstimate
    corrected: EnergyEstimate | None
    double_occupancy_raw: float
    double_occupancy_corrected: float | None
    discarded_shots: int = 0
    reliable: bool = True

    def best_value(self) -> float:
        return self.corrected.value if self.corrected is not None else self.raw.value


def measure_energy(
    params,
    spec: HubbardSpec,
    representation: str,
    shots: int,
    noise: NoiseModel | None = None,
    rng_seed: int = 0,
    calibration: mitigation.ReadoutCalibration | None = None,
    postselect: bool = False,
    correction_order: str = "postselect_first",
) -> MeasuredEnergy:
    """Shot-based energy at the given parameters: sample both settings,
    optionally postselect on occupation (uncompressed) and invert readout."""
    params = _as_params(params)
    _check_representation(representation)
    if spec.n != 2:
        raise ValueError("shot-based measurement circuits cover the 2x1 lattice only")
    if correction_order not in ("postselect_first", "correct_first"):
        raise ValueError(f"unknown correction order {correction_order!r}")
    nq = 2 if representation == "compressed" else 4
    setting_counts = {}
    for idx, kind in enumerate(("onsite", "hopping")):
        circ = measurement_circuit(params, representation, kind)
        setting_counts[kind] = sample_circuit_counts(
            circ, shots, noise, derive_seed(rng_seed, idx)
        )

    discarded = 0
    reliable = True
    raw_inputs = dict(setting_counts)
    if postselect and representation == "uncompressed":
        for kind in raw_inputs:
            kept, disc = mitigation.postselect_occupation(raw_inputs[kind], UNCOMPRESSED_FILTER)
            discarded += disc
            if kept.total_shots == 0:
                reliable = False
            else:
                raw_inputs[kind] = kept

    raw = energy_from_counts(raw_inputs["onsite"], raw_inputs["hopping"], spec, representation)
    raw.reliable = reliable
    docc_raw = double_occupancy_from_counts(raw_inputs["onsite"], spec.n, representation)

    corrected = None
    docc_corr = None
    if calibration is not None:
        base = raw_inputs if correction_order == "postselect_first" else setting_counts
        corr_weights = {}
        for kind in base:
            probs = mitigation.apply_readout_correction(base[kind], calibration)
            w = mitigation.probs_to_dict(probs, nq)
            if correction_order == "correct_first" and postselect and representation == "uncompressed":
                w = _filter_weights(w)
            corr_weights[kind] = w
        corrected = energy_from_counts(corr_weights["onsite"], corr_weights["hopping"], spec, representation)
        corrected.corrected = True
        corrected.reliable = reliable
        corrected.shots_used = raw.shots_used
        docc_corr = double_occupancy_from_counts(corr_weights["onsite"], spec.n, representation)

    return MeasuredEnergy(raw, corrected, docc_raw, docc_corr, discarded, reliable)


def _filter_weights(weights: dict[str, float]) -> dict[str, float]:
    f = UNCOMPRESSED_FILTER
    kept = {
        b: w
        for b, w in weights.items()
        if sum(b[q] == "1" for q in f.spin_up_qubits) == f.n_up
        and sum(b[q] == "1" for q in f.spin_down_qubits) == f.n_down
    }
    return kept if kept else weights


@dataclass
class FinalEvaluation:
    energy: MeasuredEnergy
    params: AnsatzParams
    calibration: mitigation.ReadoutCalibration | None

    @property
    def energy_raw(self) -> float:
        return self.energy.raw.value

    @property
    def energy_corrected(self) -> float:
        return self.energy.best_value()

    @property
    def docc_raw(self) -> float:
        return self.energy.double_occupancy_raw

    @property
    def docc_corrected(self) -> float:
        e = self.energy
        return e.double_occupancy_corrected if e.double_occupancy_corrected is not None else e.double_occupancy_raw


def final_evaluation(
    params,
    spec: HubbardSpec,
    representation: str,
    shots: int = 10_000,
    noise: NoiseModel | None = None,
    readout_correction: bool = True,
    postselect: bool = False,
    rng_seed: int = 0,
    calibration_shots: int = 10_000,
) -> FinalEvaluation:
    """Precise final measurement with a freshly sampled readout calibration."""
    params = _as_params(params)
    nq = 2 if representation == "compressed" else 4
    cal = None
    if readout_correction:
        sampler = mitigation.simulator_sampler(noise, nq)
        cal = mitigation.calibrate_readout(
            sampler, nq, calibration_shots, derive_seed(rng_seed, 1000)
        )
    measured = measure_energy(
        params,
        spec,
        representation,
        shots,
        noise=noise,
        rng_seed=derive_seed(rng_seed, 1001),
        calibration=cal,
        postselect=postselect,
    )
    return FinalEvaluation(measured, params, cal)
