"""Command-line driver for the compressed-VQE experiments.

Subcommands: exact | sweep | vqe | usweep | calibrate. Every command is
deterministic given its seeds and writes CSV (header row, LF endings)
plus JSON summaries into --out. Config files are flat "key = value"
documents mirroring the flag names; explicit flags win.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import exact_landscape, measure_energy
from .compressed import analytic_ground_2x1, compressed_hamiltonian
from .jw import ground_state_dense
from .lattice import HubbardSpec, load_edge_list, preset
from .mitigation import calibrate_readout, save_calibration, simulator_sampler
from .runner import MitigationOptions, run_pool, run_vqe
from .sim import NoiseModel, derive_seed
from .spsa import SPSAConfig, Stage, named_schedule

DEFAULT_NOISE = NoiseModel(p1=0.001, p2=0.04, readout=(0.02, 0.05))

_CONFIG_KEYS = {
    "lattice", "edges", "t", "u", "u_range", "rep", "noise", "spsa", "stages",
    "seeds", "shots", "mitigate", "out", "workers", "calibration_shots",
}


class ConfigError(Exception):
    pass


def _parse_noise(spec: str) -> NoiseModel | None:
    if spec == "none":
        return None
    if spec == "default":
        return DEFAULT_NOISE
    try:
        vals = {}
        with open(spec) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                vals[key.strip()] = float(val)
        return NoiseModel(
            p1=vals.get("p1", 0.0),
            p2=vals.get("p2", 0.0),
            readout=(vals.get("readout_0to1", 0.0), vals.get("readout_1to0", 0.0)),
        )
    except OSError as exc:
        raise ConfigError(f"cannot read noise profile {spec!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad noise profile {spec!r}: {exc}") from exc


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad --seeds value {text!r}") from exc


def _parse_stages(text: str) -> SPSAConfig:
    try:
        stages = []
        for part in text.split(","):
            it, shots, *rest = (int(x) for x in part.split(":"))
            stages.append(Stage(it, shots, rest[0] if rest else 1))
        return SPSAConfig(tuple(stages))
    except ValueError as exc:
        raise ConfigError(f"bad --stages value {text!r}") from exc


def _parse_u_range(text: str) -> list[float]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad --u-range value {text!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigError(f"bad --u-range value {text!r}")
    out = []
    k = 0
    while True:
        u = start + k * step
        if u > stop + 1e-9:
            break
        out.append(round(u, 10))
        k += 1
    return out


def _make_spec(args, U: float) -> HubbardSpec:
    if args.edges:
        return load_edge_list(args.edges, t=args.t, U=U)
    try:
        return preset(args.lattice, t=args.t, U=U)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _schedule(args) -> SPSAConfig:
    if args.stages:
        return _parse_stages(args.stages)
    try:
        return named_schedule(args.spsa)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and not np.isfinite(x)):
        return "nan"
    return f"{x:.8g}"


def _write_csv(path: Path, header: list[str], rows: list[list]):
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, type(None))) else v for v in row])


def _exact_pair(spec: HubbardSpec) -> tuple[float, float]:
    """Exact ground energy and double occupancy of the compressed instance."""
    ch = compressed_hamiltonian(spec)
    energy, vec = ground_state_dense(ch.matrix().astype(complex))
    n = spec.n
    docc = float(sum(abs(vec[k * n + k]) ** 2 for k in range(n))) / n
    return energy, docc


def cmd_exact(args) -> int:
    us = _parse_u_range(args.u_range) if args.u_range else [args.u]
    rows = []
    for u in us:
        spec = _make_spec(args, u)
        energy, docc = _exact_pair(spec)
        rows.append([u, args.t, energy, docc])
        if spec.n == 2 and len(spec.edges) == 1:
            g = analytic_ground_2x1(u, args.t)
            print(
                f"U={_fmt(u)} t={_fmt(args.t)}: energy={_fmt(g.energy)} "
                f"docc={_fmt(g.double_occupancy)} alpha={_fmt(g.alpha)} "
                f"beta={_fmt(g.beta)} norm={_fmt(g.normalization)}"
            )
        else:
            print(f"U={_fmt(u)} t={_fmt(args.t)}: energy={_fmt(energy)} docc={_fmt(docc)}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "exact.csv", ["U", "t", "energy_exact", "docc_exact"], rows)
    return 0


def cmd_sweep(args) -> int:
    spec = _make_spec(args, args.u)
    noise = _parse_noise(args.noise)
    seeds = _parse_seeds(args.seeds)
    master = seeds[0]
    mit = MitigationOptions.from_name(args.mitigate)
    nq = 2 if args.rep == "compressed" else 4
    sampler = simulator_sampler(noise, nq)
    cal = calibrate_readout(sampler, nq, args.calibration_shots, derive_seed(master, 4))
    grid = [round(0.1 * k, 10) for k in range(11)]

    def cell(i, j):
        phi, theta = grid[i], grid[j]
        measured = measure_energy(
            (phi, theta), spec, args.rep, args.shots, noise,
            rng_seed=derive_seed(master, i, j), calibration=cal,
            postselect=mit.postselect,
        )
        return [
            phi, theta,
            exact_landscape((phi, theta), spec, args.rep),
            measured.raw.value,
            measured.corrected.value,
        ]

    tasks = [(lambda i=i, j=j: cell(i, j)) for i in range(11) for j in range(11)]
    rows = run_pool(tasks, args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "sweep.csv",
        ["phi", "theta", "energy_exact", "energy_raw", "energy_corrected"],
        rows,
    )
    best = min(rows, key=lambda r: r[2])
    print(f"exact landscape argmin: phi={_fmt(best[0])} theta={_fmt(best[1])} energy={_fmt(best[2])}")
    return 0


def _median_envelope(values: list[float]) -> dict:
    return {
        "median": statistics.median(values),
        "min": min(values),
        "max": max(values),
    }


def cmd_vqe(args) -> int:
    spec = _make_spec(args, args.u)
    noise = _parse_noise(args.noise)
    seeds = _parse_seeds(args.seeds)
    mit = MitigationOptions.from_name(args.mitigate)
    schedule = _schedule(args)

    def one_run(seed):
        return run_vqe(
            spec, args.rep, schedule, noise, mit, master_seed=seed,
            final_shots=args.shots, calibration_shots=args.calibration_shots,
        )

    results = []
    errors = []
    for seed in seeds:
        try:
            results.append((seed, one_run(seed)))
        except Exception as exc:  # keep other runs going
            errors.append({"seed": seed, "error": str(exc)})
            print(f"run with seed {seed} failed: {exc}", file=sys.stderr)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for run_idx, (seed, res) in enumerate(results):
        for rec in res.trace.records:
            rows.append([run_idx, rec.iteration, rec.phi, rec.theta, rec.energy_raw, rec.energy_corrected])
    _write_csv(out / "vqe_trace.csv", ["run", "iteration", "phi", "theta", "energy_raw", "energy_corrected"], rows)

    finals = []
    for run_idx, (seed, res) in enumerate(results):
        finals.append(
            {
                "run": run_idx,
                "seed": seed,
                "phi": float(res.final_params[0]),
                "theta": float(res.final_params[1]),
                "energy_raw": res.final.energy_raw,
                "energy_corrected": res.final.energy_corrected,
                "docc_raw": res.final.docc_raw,
                "docc_corrected": res.final.docc_corrected,
                "circuit_evaluations": res.circuit_evaluations,
            }
        )
    summary = {
        "lattice": args.lattice,
        "U": args.u,
        "t": args.t,
        "representation": args.rep,
        "mitigate": args.mitigate,
        "runs": finals,
        "failed_runs": errors,
        "circuit_evaluations_per_run": finals[0]["circuit_evaluations"] if finals else 0,
        "total_circuit_evaluations": sum(f["circuit_evaluations"] for f in finals),
    }
    if finals:
        summary["final_energy_corrected"] = _median_envelope([f["energy_corrected"] for f in finals])
        summary["final_energy_raw"] = _median_envelope([f["energy_raw"] for f in finals])
    with open(out / "vqe_summary.json", "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if finals:
        med = summary["final_energy_corrected"]["median"]
        print(f"median final energy (corrected): {_fmt(med)} over {len(finals)} runs")
    return 0 if results else 3


def cmd_usweep(args) -> int:
    noise = _parse_noise(args.noise)
    seeds = _parse_seeds(args.seeds)
    mit = MitigationOptions.from_name(args.mitigate)
    schedule = _schedule(args)
    us = _parse_u_range(args.u_range) if args.u_range else [args.u]

    rows = []
    agg_rows = []
    for u in us:
        spec = _make_spec(args, u)
        energy_exact, docc_exact = _exact_pair(spec)

        def one_run(seed, spec=spec):
            return run_vqe(
                spec, args.rep, schedule, noise, mit, master_seed=seed,
                final_shots=args.shots, calibration_shots=args.calibration_shots,
            )

        tasks = [(lambda s=seed: one_run(s)) for seed in seeds]
        try:
            results = run_pool(tasks, args.workers)
        except Exception as exc:
            print(f"U={u}: all runs failed: {exc}", file=sys.stderr)
            for run_idx in range(len(seeds)):
                rows.append([u, run_idx, None, None, None, None, energy_exact, docc_exact])
            continue
        e_corr, d_corr = [], []
        for run_idx, res in enumerate(results):
            rows.append([
                u, run_idx,
                res.final.energy_raw, res.final.energy_corrected,
                res.final.docc_raw, res.final.docc_corrected,
                energy_exact, docc_exact,
            ])
            e_corr.append(res.final.energy_corrected)
            d_corr.append(res.final.docc_corrected)
        agg_rows.append([
            u,
            statistics.median(e_corr), min(e_corr), max(e_corr),
            statistics.median(d_corr), min(d_corr), max(d_corr),
            energy_exact, docc_exact,
        ])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "usweep.csv",
        ["U", "run", "energy_raw", "energy_corrected", "docc_raw", "docc_corrected", "energy_exact", "docc_exact"],
        rows,
    )
    _write_csv(
        out / "usweep_aggregate.csv",
        ["U", "energy_median", "energy_min", "energy_max", "docc_median", "docc_min", "docc_max", "energy_exact", "docc_exact"],
        agg_rows,
    )
    return 0


def cmd_calibrate(args) -> int:
    noise = _parse_noise(args.noise)
    seeds = _parse_seeds(args.seeds)
    nq = 2 if args.rep == "compressed" else 4
    sampler = simulator_sampler(noise, nq)
    cal = calibrate_readout(sampler, nq, args.calibration_shots, derive_seed(seeds[0], 4))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_calibration(out / "calibration.txt", cal)
    print(f"calibration matrix ({1 << nq}x{1 << nq}) written to calibration.txt")
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", default=None, help="flat key=value config file; flags win")
    p.add_argument("--lattice", default="2x1", help='preset: "2x1", "line:n", "grid:WxH"')
    p.add_argument("--edges", default=None, help="edge-list file overriding --lattice")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--u", type=float, default=2.0)
    p.add_argument("--u-range", dest="u_range", default=None, help="start:stop:step")
    p.add_argument("--rep", choices=("compressed", "uncompressed"), default="compressed")
    p.add_argument("--noise", default="none", help='"none", "default", or a profile path')
    p.add_argument("--spsa", choices=("standard", "three-stage"), default="standard")
    p.add_argument("--stages", default=None, help='explicit stages "iters:shots[:grads],..."')
    p.add_argument("--seeds", default="0,1,2", help="comma-separated run seeds")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--calibration-shots", dest="calibration_shots", type=int, default=10_000)
    p.add_argument("--mitigate", choices=("none", "readout", "postselect", "both"), default="none")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="out")


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser, argv: list[str]):
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            entries = {}
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, val = line.partition("=")
                if not sep:
                    raise ConfigError(f"malformed config line {line!r}")
                entries[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    explicit = {a.lstrip("-").split("=")[0].replace("-", "_") for a in argv if a.startswith("--")}
    for key, val in entries.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if key in explicit or not hasattr(args, key):
            continue
        current = getattr(args, key)
        if isinstance(current, int) and not isinstance(current, bool):
            val = int(val)
        elif isinstance(current, float):
            val = float(val)
        setattr(args, key, val)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvqe", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("exact", cmd_exact),
        ("sweep", cmd_sweep),
        ("vqe", cmd_vqe),
        ("usweep", cmd_usweep),
        ("calibrate", cmd_calibrate),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, parser, argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
