import numpy as np
import pytest

from cvqe.spsa import (
    SPSAConfig,
    Stage,
    named_schedule,
    spsa_minimize,
    standard_schedule,
    three_stage_schedule,
)


def quadratic(params, shots, seed):
    rng = np.random.default_rng(seed)
    x = np.asarray(params)
    noise = rng.normal(scale=1.0 / np.sqrt(shots))
    return float(np.sum((x - np.array([0.3, -0.7])) ** 2) + noise)


def test_schedule_accounting():
    std = standard_schedule()
    assert std.total_iterations == 175
    assert sum(2 * s.iterations * s.grad_estimates * s.shots for s in std.stages) == 3_500_000
    three = three_stage_schedule()
    assert three.total_iterations == 325
    assert sum(2 * s.iterations * s.grad_estimates * s.shots for s in three.stages) == 1_150_000


def test_named_schedule_lookup():
    assert named_schedule("standard").stages == standard_schedule().stages
    assert named_schedule("three-stage").stages == three_stage_schedule().stages
    with pytest.raises(ValueError):
        named_schedule("adam")


def test_gain_sequence_values():
    cfg = SPSAConfig((Stage(100, 10),), a=0.15, c=0.2)
    assert cfg.stability == pytest.approx(10.0)
    # k = 0: a_0 = a / (1 + A)^0.602, c_0 = c
    a0 = 0.15 / (1 + 10.0) ** 0.602
    assert a0 == pytest.approx(0.15 / 11.0**0.602, abs=1e-12)
    assert cfg.c / (0 + 1) ** cfg.gamma_exp == pytest.approx(0.2)


def test_converges_on_quadratic():
    cfg = SPSAConfig((Stage(200, 400),), a=0.4, c=0.2)
    trace = spsa_minimize(quadratic, (1.0, 1.0), cfg, rng_seed=1)
    np.testing.assert_allclose(trace.final_params, [0.3, -0.7], atol=0.1)
    assert len(trace.records) == 200


def test_deterministic_given_seed():
    cfg = SPSAConfig((Stage(30, 100),))
    t1 = spsa_minimize(quadratic, (1.0, 1.0), cfg, rng_seed=7)
    t2 = spsa_minimize(quadratic, (1.0, 1.0), cfg, rng_seed=7)
    np.testing.assert_array_equal(t1.final_params, t2.final_params)
    assert [r.energy_raw for r in t1.records] == [r.energy_raw for r in t2.records]
    t3 = spsa_minimize(quadratic, (1.0, 1.0), cfg, rng_seed=8)
    assert not np.array_equal(t1.final_params, t3.final_params)


def test_tuple_objective_fills_corrected():
    def obj(params, shots, seed):
        v = quadratic(params, shots, seed)
        return v, v + 1.0, v - 1.0

    cfg = SPSAConfig((Stage(5, 100),))
    trace = spsa_minimize(obj, (0.0, 0.0), cfg, rng_seed=2)
    for rec in trace.records:
        assert rec.energy_corrected == pytest.approx(rec.energy_raw - 2.0)


def test_objective_failure_is_wrapped():
    def bad(params, shots, seed):
        raise FloatingPointError("boom")

    cfg = SPSAConfig((Stage(3, 10),))
    with pytest.raises(RuntimeError, match="iteration 0"):
        spsa_minimize(bad, (0.0, 0.0), cfg, rng_seed=0)


def test_stage_validation():
    with pytest.raises(ValueError):
        Stage(0, 10)
    with pytest.raises(ValueError):
        SPSAConfig(())
