"""Benchmark: compiled integrator core vs the numpy fallback.

Times one Lindblad right-hand-side evaluation and a short adaptive
integration for growing register sizes, on the all-to-all XXZ system used
throughout the test suite.

    python benchmarks/bench_kernels.py [--max-qubits 6] [--t-end 0.5]
"""

import argparse
import time

import numpy as np

from qsync.kernels import have_fast_backend
from qsync.liouville import Liouvillian, evolve
from qsync.model import ghz_state, xxz_spec


def timeit(fn, min_time=0.4):
    fn()  # warm up
    n, t0 = 0, time.perf_counter()
    while time.perf_counter() - t0 < min_time:
        fn()
        n += 1
    return (time.perf_counter() - t0) / n


def bench(n_qubits, t_end):
    rng = np.random.default_rng(n_qubits)
    gains = rng.uniform(0.2, 2.0, n_qubits)
    damps = rng.uniform(0.2, 2.0, n_qubits)
    spec = xxz_spec([0.0] * n_qubits, gains, damps, 4.0, 1.0)
    liouv = Liouvillian.from_spec(spec)
    d = spec.dim
    rho = np.ascontiguousarray(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    rho0 = ghz_state(n_qubits)

    row = {"n": n_qubits, "d": d}
    row["rhs_python_us"] = timeit(lambda: liouv._dense.apply(rho)) * 1e6
    if liouv._fast is not None:
        row["rhs_fast_us"] = timeit(lambda: liouv._fast.apply(rho)) * 1e6

    ref = Liouvillian.from_spec(spec)
    ref._fast = None
    t0 = time.perf_counter()
    evolve(ref, rho0, t_end, [t_end], compute_eigs=False)
    row["evolve_python_s"] = time.perf_counter() - t0
    if liouv._fast is not None:
        t0 = time.perf_counter()
        evolve(liouv, rho0, t_end, [t_end], compute_eigs=False)
        row["evolve_fast_s"] = time.perf_counter() - t0
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-qubits", type=int, default=6)
    parser.add_argument("--t-end", type=float, default=0.5)
    args = parser.parse_args()

    if not have_fast_backend():
        print("note: compiled backend unavailable; timing the fallback only\n")

    header = f"{'N':>2} {'dim':>4} {'rhs py (us)':>12} {'rhs fast (us)':>14} " \
             f"{'speedup':>8} {'evolve py (s)':>14} {'evolve fast (s)':>16} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in range(2, args.max_qubits + 1):
        row = bench(n, args.t_end)
        rhs_fast = row.get("rhs_fast_us")
        ev_fast = row.get("evolve_fast_s")
        print(
            f"{row['n']:>2} {row['d']:>4} {row['rhs_python_us']:>12.1f} "
            f"{rhs_fast if rhs_fast is not None else float('nan'):>14.1f} "
            f"{(row['rhs_python_us'] / rhs_fast) if rhs_fast else float('nan'):>8.1f} "
            f"{row['evolve_python_s']:>14.3f} "
            f"{ev_fast if ev_fast is not None else float('nan'):>16.3f} "
            f"{(row['evolve_python_s'] / ev_fast) if ev_fast else float('nan'):>8.1f}"
        )


if __name__ == "__main__":
    main()
