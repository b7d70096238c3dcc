"""Time the numba kernels against the numpy fallback and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 200] [--nodes 256]

Prints one CSV row per (kernel, backend) with the best time per call in
microseconds, the speedup of numba over numpy, and the largest relative
difference between the two backends' results.
"""
import argparse
import csv
import sys
import time

import numpy as np

from semisum import _kernels as K
from semisum.potentials import PotentialSpec, turning_points
from semisum.wkb import _gauss_theta

CASES = [
    ("poschl_teller D=10", PotentialSpec("poschl_teller", {"D": 10.0}), -3.0),
    ("harmonic w=1", PotentialSpec("harmonic", {"w": 1.0}), 20.5),
    ("quartic a=1 b=-4", PotentialSpec("quartic", {"a": 1.0, "b": -4.0}), 1.0),
]
SELECTORS = {"momentum": K.MOMENTUM, "inverse_momentum": K.INVERSE_MOMENTUM,
             "curvature": K.CURVATURE}


def best_time(fn, repeat):
    fn()  # warm-up (triggers numba compilation once)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--nodes", type=int, default=256)
    args = ap.parse_args(argv)
    nodes, weights = _gauss_theta(args.nodes)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["kernel", "case", "numpy_us", "numba_us", "speedup", "max_rel_diff"])
    original = K.get_backend()
    try:
        for label, spec, eps in CASES:
            tp = turning_points(spec, eps)
            for name, what in SELECTORS.items():
                times, values = {}, {}
                for backend in ("numpy", "numba"):
                    K.set_backend(backend)

                    def call():
                        return sum(K.theta_quadrature(spec.code, spec.param_array, eps,
                                                      iv.lo, iv.hi, True, True,
                                                      nodes, weights, what)
                                   for iv in tp.intervals)

                    times[backend] = best_time(call, args.repeat)
                    values[backend] = call()
                diff = abs(values["numba"] - values["numpy"]) / max(abs(values["numpy"]), 1e-300)
                writer.writerow([f"theta_quadrature/{name}", label,
                                 f"{times['numpy'] * 1e6:.2f}", f"{times['numba'] * 1e6:.2f}",
                                 f"{times['numpy'] / times['numba']:.1f}", f"{diff:.1e}"])
            x = np.linspace(-3.0, 3.0, 100_000)
            times, values = {}, {}
            for backend in ("numpy", "numba"):
                K.set_backend(backend)
                times[backend] = best_time(
                    lambda: K.potential_value(spec.code, spec.param_array, x), args.repeat // 10 + 1)
                values[backend] = K.potential_value(spec.code, spec.param_array, x)
            diff = float(np.max(np.abs(values["numba"] - values["numpy"])
                                / np.maximum(np.abs(values["numpy"]), 1e-300)))
            writer.writerow(["potential_value/1e5", label, f"{times['numpy'] * 1e6:.2f}",
                             f"{times['numba'] * 1e6:.2f}",
                             f"{times['numpy'] / times['numba']:.1f}", f"{diff:.1e}"])
    finally:
        K.set_backend(original)
    return 0


if __name__ == "__main__":
    sys.exit(main())
