"""End-to-end acceptance checks.

Each test prints a single PASS/FAIL line (visible with pytest -s or on
failure) so the whole gate can be read off the log at a glance.
"""

import math
import statistics
import subprocess
import sys

import numpy as np
import pytest

from cvqe.ansatz import exact_landscape, measure_energy
from cvqe.compressed import (
    analytic_ground_2x1,
    compressed_hamiltonian,
    matching_decomposition,
    matching_eigenvalue,
    register_width,
    subspace_hadamard_branches,
)
from cvqe.jw import dense_hamiltonian, ground_state_dense, jordan_wigner_hamiltonian, sector_restrict
from cvqe.lattice import preset
from cvqe.mitigation import ReadoutCalibration, apply_readout_correction
from cvqe.runner import MitigationOptions, run_vqe
from cvqe.sim import NoiseModel, ShotCounts, StateVector
from cvqe.spsa import named_schedule

E_2X1_U2 = -1.2360679775
OPT = (0.46365, math.pi / 4.0)
DEFAULT_NOISE = NoiseModel(p1=0.001, p2=0.04, readout=(0.02, 0.05))


def report(name: str, ok: bool, detail: str = ""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    assert ok, f"{name}: {detail}"


def test_01_analytic_oracle():
    worst = 0.0
    for k in range(41):
        u = round(0.1 * k, 10)
        spec = preset("2x1", t=1.0, U=u)
        energy, _ = ground_state_dense(compressed_hamiltonian(spec).matrix().astype(complex))
        closed = u / 2.0 - math.sqrt(u * u / 4.0 + 4.0)
        worst = max(worst, abs(energy - closed))
    at_u2 = analytic_ground_2x1(2.0, 1.0).energy
    ok = worst < 1e-10 and abs(at_u2 - (-1.23607)) < 5e-5
    report("analytic-oracle", ok, f"max|dense-closed|={worst:.2e} E(U=2)={at_u2:.6f}")


def test_02_encoding_equivalence():
    worst = 0.0
    for name in ("2x1", "line:3", "line:4", "grid:2x2"):
        for u in (0.0, 2.0, 4.0):
            spec = preset(name, t=1.0, U=u)
            comp = np.linalg.eigvalsh(compressed_hamiltonian(spec).matrix())
            sec = sector_restrict(
                dense_hamiltonian(jordan_wigner_hamiltonian(spec)), 1, 1, spec.n
            )
            ref = np.linalg.eigvalsh(sec.matrix)
            worst = max(worst, float(np.max(np.abs(comp - ref))))
    ok = worst < 1e-9
    report("encoding-equivalence", ok, f"max spectral gap={worst:.2e}")


def test_03_landscape_calibration():
    spec = preset("2x1", t=1.0, U=2.0)
    at_origin = exact_landscape((0.0, 0.0), spec, "compressed")
    at_opt = exact_landscape(OPT, spec, "compressed")
    grid = [round(0.1 * k, 10) for k in range(11)]
    values = {
        (p, t): exact_landscape((p, t), spec, "compressed") for p in grid for t in grid
    }
    argmin = min(values, key=values.get)
    brute = min(values.values())
    ok = (
        abs(at_origin - (-1.0)) < 1e-9
        and abs(at_opt - (-1.23607)) < 1e-5
        and values[argmin] == brute
        and argmin == (0.5, 0.8)
    )
    report(
        "landscape-calibration", ok,
        f"E(0,0)={at_origin:.9f} E(opt)={at_opt:.6f} argmin={argmin}",
    )


def _final_landscape_energies(schedule, seeds, noise=None, rep="compressed",
                              mitigate="none"):
    spec = preset("2x1", t=1.0, U=2.0)
    out = []
    for seed in seeds:
        res = run_vqe(
            spec, rep, schedule, noise, MitigationOptions.from_name(mitigate),
            master_seed=seed,
        )
        out.append((res, exact_landscape(res.final_params, spec, rep)))
    return out


def test_04_noiseless_vqe_convergence():
    details = []
    ok = True
    for name in ("standard", "three-stage"):
        runs = _final_landscape_energies(named_schedule(name), (0, 1, 2))
        med = statistics.median(e for _, e in runs)
        ok = ok and abs(med - (-1.23607)) < 0.05
        details.append(f"{name}: median={med:.5f}")
    report("noiseless-vqe", ok, "; ".join(details))


def test_05_shot_accounting():
    spec = preset("2x1", t=1.0, U=2.0)
    counts = {}
    for name, expected in (("standard", 7_000_000), ("three-stage", 2_300_000)):
        res = run_vqe(
            spec, "compressed", named_schedule(name), None,
            MitigationOptions.from_name("none"), master_seed=0,
        )
        counts[name] = res.circuit_evaluations
    ok = counts["standard"] == 7_000_000 and counts["three-stage"] == 2_300_000
    report("shot-accounting", ok, str(counts))


def test_06_noisy_path_properties():
    seeds = range(10)
    comp = _final_landscape_energies(
        named_schedule("standard"), seeds, noise=DEFAULT_NOISE, mitigate="readout"
    )
    unc = _final_landscape_energies(
        named_schedule("standard"), seeds, noise=DEFAULT_NOISE,
        rep="uncompressed", mitigate="both",
    )
    err = lambda v: abs(v - E_2X1_U2)
    corr_err = statistics.median(err(r.final.energy_corrected) for r, _ in comp)
    raw_err = statistics.median(err(r.final.energy_raw) for r, _ in comp)
    unc_err = statistics.median(err(r.final.energy_corrected) for r, _ in unc)
    ok = corr_err < raw_err and corr_err < unc_err
    report(
        "noisy-path", ok,
        f"compressed corrected={corr_err:.4f} raw={raw_err:.4f} uncompressed={unc_err:.4f}",
    )


def test_07_u_sweep():
    schedule = named_schedule("standard")
    mit = MitigationOptions.from_name("none")
    e_errs, d_errs = [], []
    for k in range(1, 41):
        u = round(0.1 * k, 10)
        spec = preset("2x1", t=1.0, U=u)
        exact = analytic_ground_2x1(u, 1.0)
        es, ds = [], []
        for seed in range(5):
            res = run_vqe(spec, "compressed", schedule, None, mit, master_seed=seed)
            es.append(abs(res.final.energy_raw - exact.energy))
            ds.append(abs(res.final.docc_raw - exact.double_occupancy))
        e_errs.append(statistics.median(es))
        d_errs.append(statistics.median(ds))
    e_med = statistics.median(e_errs)
    d_med = statistics.median(d_errs)
    ok = e_med <= 6.5e-2 and d_med <= 5.7e-3
    report("u-sweep", ok, f"median energy err={e_med:.4f} docc err={d_med:.5f}")


def test_08_subspace_hadamard():
    rng = np.random.default_rng(99)
    worst = 0.0
    for n in (2, 3, 4):
        spec = preset("2x1" if n == 2 else f"line:{n}", t=1.0, U=2.0)
        p = register_width(n)
        d = 1 << p
        for matching in matching_decomposition(spec.edges):
            for _ in range(50):
                x = rng.normal(size=d) + 1j * rng.normal(size=d)
                x[n:] = 0.0
                st = StateVector(p, x / np.linalg.norm(x))
                _, _, p_acc = subspace_hadamard_branches(st, matching, n)
                worst = max(worst, abs(p_acc - 0.5))
    # shot-based estimate vs exact on a random 2-site state
    shots = 100_000
    x = rng.normal(size=2) + 1j * rng.normal(size=2)
    st = StateVector(1, x / np.linalg.norm(x))
    (matching,) = matching_decomposition(((1, 2),))
    v0, _, p_acc = subspace_hadamard_branches(st, matching, 2)
    probs = np.abs(v0) ** 2
    signs = np.array([matching_eigenvalue(i // 2, i % 2) for i in range(4)], float)
    exact = float(probs @ signs) / p_acc
    draws = rng.choice(4, size=shots, p=probs / probs.sum())
    accepted = signs[draws]
    est = accepted.mean() / p_acc * probs.sum()
    sigma = accepted.std(ddof=1) / math.sqrt(shots) / p_acc
    ok = worst < 1e-12 and abs(est - exact) < 5 * sigma
    report("subspace-hadamard", ok, f"max|p-1/2|={worst:.2e} |est-exact|={abs(est - exact):.4f} 5sig={5*sigma:.4f}")


def test_09_mitigation():
    # exact roundtrips for q <= 4
    rng = np.random.default_rng(2)
    worst = 0.0
    for q in (1, 2, 3, 4):
        dim = 1 << q
        m = np.eye(dim) * 0.9 + rng.uniform(0.0, 0.1 / dim, size=(dim, dim))
        m /= m.sum(axis=0, keepdims=True)
        cal = ReadoutCalibration(q, m, shots_per_state=1)
        p_true = rng.dirichlet(np.ones(dim))
        shots = 10**12
        observed = m @ p_true
        sc = ShotCounts(
            {format(i, f"0{q}b"): round(v * shots) for i, v in enumerate(observed)},
            sum(round(v * shots) for v in observed),
        )
        worst = max(worst, float(np.max(np.abs(apply_readout_correction(sc, cal) - p_true))))
    # worked 2x2 example
    cal = ReadoutCalibration(1, np.array([[0.9, 0.2], [0.1, 0.8]]), 1)
    rec = apply_readout_correction(ShotCounts({"0": 62, "1": 38}, 100), cal)
    example_ok = np.allclose(rec, [0.6, 0.4], atol=1e-12)
    # noiseless postselection discards nothing
    spec = preset("2x1", t=1.0, U=2.0)
    discarded = 0
    prng = np.random.default_rng(5)
    for _ in range(100):
        params = prng.uniform(0.0, 1.0, size=2)
        m = measure_energy(
            params, spec, "uncompressed", 500, None,
            rng_seed=int(prng.integers(1 << 30)), postselect=True,
        )
        discarded += m.discarded_shots
    ok = worst <= 1e-10 and example_ok and discarded == 0
    report("mitigation", ok, f"roundtrip={worst:.2e} example={example_ok} discarded={discarded}")


def test_10_determinism(tmp_path):
    cases = [
        ["exact", "--u-range", "0:4:1"],
        ["sweep", "--shots", "100", "--seeds", "1", "--noise", "default"],
        ["vqe", "--stages", "5:100", "--seeds", "3", "--noise", "default", "--mitigate", "readout"],
        ["usweep", "--u-range", "1:3:1", "--seeds", "0", "--stages", "5:100"],
        ["calibrate", "--noise", "default", "--calibration-shots", "500", "--seeds", "5"],
    ]
    ok = True
    for case in cases:
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{case[0]}_{tag}"
            proc = subprocess.run(
                [sys.executable, "-m", "cvqe.cli", *case, "--out", str(out)],
                capture_output=True, text=True,
            )
            assert proc.returncode == 0, proc.stderr
            blob = b"".join(
                sorted(f.read_bytes() for f in out.iterdir())
            ) + proc.stdout.encode()
            outs.append(blob)
        same = outs[0] == outs[1]
        ok = ok and same
        if not same:
            print(f"  mismatch in {case[0]}")
    report("determinism", ok, f"{len(cases)} commands byte-identical twice")
