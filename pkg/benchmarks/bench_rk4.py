"""Compare the compiled and pure-Python RK4 kernels on the bundled systems.

    python benchmarks/bench_rk4.py [--steps N] [--repeat R]
"""

import argparse
import time

import numpy as np

from nambu import _kernels, fixtures
from nambu.brackets import hamiltonian_vector_field
from nambu.dynamics import FlowProblem, integrate_rk4


def problems(steps):
    n3 = fixtures.load("n3")
    o = n3.observables
    field = hamiltonian_vector_field(n3.tensors["EPS"], [o["H"], o["C"]])
    yield "n3 oscillator", FlowProblem(field, [1.0, 0.0, 1.0], 1e-3, steps * 1e-3,
                                       {"H": o["H"], "C": o["C"]})
    n6 = fixtures.load("n6")
    o = n6.observables
    field = hamiltonian_vector_field(n6.matrices["J"], [o["H"]])
    yield "n6 coupled", FlowProblem(field, [0.1, 0, 0.01, 0.1, 0, 0.01], 1e-3, steps * 1e-3,
                                    {"H": o["H"], "C1": o["C1"], "C2": o["C2"]})


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = sorted(_kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernel not built; timing the Python backend only")
    print(f"{'system':<16}{'backend':<10}{'seconds':>10}{'steps/s':>14}")
    for label, prob in problems(args.steps):
        results = {}
        for b in backends:
            secs, traj = best_of(lambda: integrate_rk4(prob, backend=b), args.repeat)
            results[b] = (secs, traj)
            print(f"{label:<16}{b:<10}{secs:>10.3f}{prob.nsteps / secs:>14.0f}")
        if len(results) == 2:
            (tp, a), (tc, b) = results["python"], results["cython"]
            diff = float(np.max(np.abs(a.states - b.states)))
            print(f"{'':<16}speedup {tp / tc:.1f}x, max state difference {diff:.1e}")


if __name__ == "__main__":
    main()
