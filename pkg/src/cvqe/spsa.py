"""Simultaneous-perturbation stochastic approximation (SPSA).

The iteration follows the standard gain schedule
a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma with the classic
exponents (0.602, 0.101). Schedules are expressed as stages of
(iterations, shots per energy evaluation, gradient estimates per
iteration): a single 175-iteration stage at 10^4 shots, or the
three-stage coarse/intermediate/fine variant whose last stage averages
two gradient estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sim import derive_seed


@dataclass(frozen=True)
class Stage:
    iterations: int
    shots: int
    grad_estimates: int = 1

    def __post_init__(self):
        if self.iterations < 1 or self.shots < 1 or self.grad_estimates < 1:
            raise ValueError("stage fields must be >= 1")


@dataclass
class SPSAConfig:
    stages: tuple[Stage, ...]
    a: float = 0.15
    c: float = 0.2
    A: float | None = None  # default: 10% of total iterations
    alpha_exp: float = 0.602
    gamma_exp: float = 0.101

    def __post_init__(self):
        self.stages = tuple(
            s if isinstance(s, Stage) else Stage(*s) for s in self.stages
        )
        if not self.stages:
            raise ValueError("need at least one stage")

    @property
    def total_iterations(self) -> int:
        return sum(s.iterations for s in self.stages)

    @property
    def stability(self) -> float:
        return 0.1 * self.total_iterations if self.A is None else self.A


def standard_schedule(iterations: int = 175, shots: int = 10_000) -> SPSAConfig:
    return SPSAConfig((Stage(iterations, shots),))


def three_stage_schedule() -> SPSAConfig:
    return SPSAConfig((Stage(250, 100), Stage(50, 1000), Stage(25, 10_000, 2)))


def named_schedule(name: str) -> SPSAConfig:
    if name == "standard":
        return standard_schedule()
    if name == "three-stage":
        return three_stage_schedule()
    raise ValueError(f"unknown SPSA schedule {name!r}")


@dataclass
class IterationRecord:
    iteration: int
    phi: float
    theta: float
    energy_raw: float
    energy_corrected: float | None
    shots: int


@dataclass
class VQETrace:
    records: list[IterationRecord] = field(default_factory=list)
    final_params: np.ndarray | None = None


def _call(objective, params, shots, seed):
    res = objective(params, shots, seed)
    if isinstance(res, tuple):
        return res  # (value, raw, corrected)
    return res, res, None


def spsa_minimize(objective, x0, config: SPSAConfig, rng_seed: int = 0) -> VQETrace:
    """Minimize objective(params, shots, seed); deterministic given the seed.

    The objective may return a float or (value, raw, corrected); the raw
    and corrected averages of each iteration's perturbed evaluations go
    into the trace.
    """
    rng = np.random.default_rng(derive_seed(rng_seed, 0))
    params = np.array(x0, dtype=float)
    if params.ndim != 1:
        raise ValueError("x0 must be a flat parameter vector")
    trace = VQETrace()
    big_a = config.stability
    k = 0
    eval_idx = 0
    for stage in config.stages:
        for _ in range(stage.iterations):
            a_k = config.a / (k + 1 + big_a) ** config.alpha_exp
            c_k = config.c / (k + 1) ** config.gamma_exp
            grad = np.zeros_like(params)
            raws = []
            corrs = []
            for _ in range(stage.grad_estimates):
                delta = rng.integers(0, 2, size=params.size) * 2.0 - 1.0
                try:
                    fp, raw_p, corr_p = _call(
                        objective, params + c_k * delta, stage.shots,
                        derive_seed(rng_seed, 1, eval_idx),
                    )
                    fm, raw_m, corr_m = _call(
                        objective, params - c_k * delta, stage.shots,
                        derive_seed(rng_seed, 1, eval_idx + 1),
                    )
                except Exception as exc:
                    raise RuntimeError(f"objective failed at iteration {k}") from exc
                eval_idx += 2
                grad += (fp - fm) / (2.0 * c_k) * delta
                raws.extend([raw_p, raw_m])
                corrs.extend([corr_p, corr_m])
            grad /= stage.grad_estimates
            params = params - a_k * grad
            corr_vals = [c for c in corrs if c is not None]
            trace.records.append(
                IterationRecord(
                    iteration=k,
                    phi=float(params[0]),
                    theta=float(params[1]) if params.size > 1 else 0.0,
                    energy_raw=float(np.mean(raws)),
                    energy_corrected=float(np.mean(corr_vals)) if corr_vals else None,
                    shots=stage.shots,
                )
            )
            k += 1
    trace.final_params = params
    return trace
