"""Compare the numba trajectory kernel against the pure-numpy fallback.

Run twice, once per backend (the flag is read at import time):

    CVQE_NUMBA=1 python benchmarks/bench_kernels.py
    CVQE_NUMBA=0 python benchmarks/bench_kernels.py
"""

import os
import time

import numpy as np

from cvqe.ansatz import measurement_circuit
from cvqe.sim import NoiseModel, sample_circuit_counts


def bench(label, circuit, shots, noise, repeats=5):
    # warm-up triggers JIT compilation on the numba path
    sample_circuit_counts(circuit, 100, noise, rng_seed=0)
    best = float("inf")
    for r in range(repeats):
        t0 = time.perf_counter()
        sample_circuit_counts(circuit, shots, noise, rng_seed=r)
        best = min(best, time.perf_counter() - t0)
    rate = shots / best
    print(f"{label:38s} {shots:>8d} shots  {best * 1e3:8.1f} ms  {rate / 1e6:6.2f} Mshot/s")


def main():
    backend = "numba" if os.environ.get("CVQE_NUMBA", "1") != "0" else "numpy fallback"
    print(f"backend: {backend}")
    noise = NoiseModel(p1=0.001, p2=0.04, readout=(0.02, 0.05))
    heavy = NoiseModel(p1=0.05, p2=0.2, readout=(0.02, 0.05))
    comp = measurement_circuit((0.4636, 0.7854), "compressed", "hopping")
    unc = measurement_circuit((0.4636, 0.7854), "uncompressed", "hopping")
    for label, circ in (("compressed hopping (2q)", comp), ("uncompressed hopping (4q)", unc)):
        bench(f"{label}, default noise", circ, 100_000, noise)
        bench(f"{label}, heavy noise", circ, 100_000, heavy)


if __name__ == "__main__":
    main()
