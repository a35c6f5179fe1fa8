"""VQE orchestration: wires the sampled-energy objective into SPSA,
tracks circuit-evaluation counts, and takes the final precise data point.

Circuit-evaluation accounting counts each (parameter point x measurement
setting x shot) during optimization as one evaluation: the standard
175-iteration schedule reports exactly 7e6, the three-stage schedule
2.3e6. The final 10^4-shot measurement (with a freshly sampled readout
calibration) is reported separately.

When readout correction is active, the in-loop objective uses corrected
energies with the calibration sampled once at the start; the final
evaluation recalibrates.
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import mitigation
from .ansatz import FinalEvaluation, final_evaluation, measure_energy
from .lattice import HubbardSpec
from .sim import NoiseModel, derive_seed
from .spsa import SPSAConfig, VQETrace, IterationRecord, spsa_minimize

START_PARAMS = (1.0, 1.0)


@dataclass(frozen=True)
class MitigationOptions:
    readout: bool = False
    postselect: bool = False

    @classmethod
    def from_name(cls, name: str) -> "MitigationOptions":
        table = {
            "none": cls(False, False),
            "readout": cls(True, False),
            "postselect": cls(False, True),
            "both": cls(True, True),
        }
        if name not in table:
            raise ValueError(f"unknown mitigation mode {name!r}")
        return table[name]


@dataclass
class VQERunResult:
    trace: VQETrace
    final: FinalEvaluation
    circuit_evaluations: int

    @property
    def final_params(self):
        return self.trace.final_params


def run_vqe(
    spec: HubbardSpec,
    representation: str,
    config: SPSAConfig,
    noise: NoiseModel | None = None,
    mitigate: MitigationOptions = MitigationOptions(),
    master_seed: int = 0,
    start=START_PARAMS,
    final_shots: int = 10_000,
    calibration_shots: int = 10_000,
) -> VQERunResult:
    nq = 2 if representation == "compressed" else 4
    calibration = None
    if mitigate.readout:
        sampler = mitigation.simulator_sampler(noise, nq)
        calibration = mitigation.calibrate_readout(
            sampler, nq, calibration_shots, derive_seed(master_seed, 7)
        )

    evaluations = 0

    def objective(params, shots, seed):
        nonlocal evaluations
        measured = measure_energy(
            params,
            spec,
            representation,
            shots,
            noise=noise,
            rng_seed=seed,
            calibration=calibration,
            postselect=mitigate.postselect,
        )
        evaluations += 2 * shots  # two measurement settings per energy evaluation
        value = measured.best_value() if mitigate.readout else measured.raw.value
        corrected = measured.corrected.value if measured.corrected is not None else None
        return value, measured.raw.value, corrected

    trace = spsa_minimize(objective, np.array(start, dtype=float), config, derive_seed(master_seed, 8))
    final = final_evaluation(
        tuple(trace.final_params),
        spec,
        representation,
        shots=final_shots,
        noise=noise,
        readout_correction=mitigate.readout,
        postselect=mitigate.postselect,
        rng_seed=derive_seed(master_seed, 9),
        calibration_shots=calibration_shots,
    )
    trace.records.append(
        IterationRecord(
            iteration=config.total_iterations,
            phi=float(trace.final_params[0]),
            theta=float(trace.final_params[1]),
            energy_raw=final.energy_raw,
            energy_corrected=final.energy_corrected if mitigate.readout else None,
            shots=final_shots,
        )
    )
    return VQERunResult(trace, final, evaluations)


def run_pool(tasks, workers: int = 1):
    """Run callables and return results in task order; each task must carry
    its own derived seed so parallel and serial execution agree."""
    if workers <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]
