"""Timing comparison of the two speed-kernel backends.

The Cython extension and the NumPy reference implement the same right-hand
side; this script times single kernel evaluations of each on identical
perturbed profiles and reports the per-call cost and ratio.  The flow
stepper spends essentially all of its time in this call (four evaluations
per RK4 step), so the ratio here is the whole-run ratio.

Usage: python benchmarks/bench_step.py [--nodes 64 256 1024] [--reps 2000]
"""

import argparse
import math
import time

import numpy as np

from sphereflow._kernels import _ref

try:
    from sphereflow._kernels import _speed
except ImportError:
    _speed = None

from sphereflow.flow import _spec_codes
from sphereflow.sphere_geom import cosine_profile
from sphereflow.symfunc import CurvatureSpec

SPECS = [
    CurvatureSpec("mean", 2),
    CurvatureSpec("root_k", 2, k=2),
    CurvatureSpec("power_mean", 2, r=0.5),
    CurvatureSpec("quotient", 3, k=2, l=1),
]


def time_call(backend, field, spec, reps):
    u = field.u
    fam, k, l, r = _spec_codes(spec)
    out = np.empty_like(u)
    if field.chart == "axisym":
        th = field.thetas
        cot = np.zeros_like(u)
        cot[1:-1] = np.cos(th[1:-1]) / np.sin(th[1:-1])
        args = (u, cot, field.n, field.spacing, fam, k, l, r, spec.p, 1, out)
        call = backend.axisym_speed
    else:
        args = (u, field.spacing, fam, k, l, r, spec.p, 1, out)
        call = backend.circle_speed
    call(*args)  # warm up, and fail fast on a degenerate profile
    t0 = time.perf_counter()
    for _ in range(reps):
        call(*args)
    return (time.perf_counter() - t0) / reps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--reps", type=int, default=2000)
    args = ap.parse_args()

    if _speed is None:
        print("compiled backend not available; timing the reference only")
    print(f"{'spec':<22}{'nodes':>7}{'ref us':>12}{'compiled us':>14}{'ratio':>8}")
    for spec in SPECS:
        label = spec.family + (f"({spec.k},{spec.l})" if spec.family == "quotient" else "")
        for nodes in args.nodes:
            field = cosine_profile("axisym", spec.n, nodes, 0.8, {2: 0.05})
            t_ref = time_call(_ref, field, spec, max(args.reps // 10, 1))
            row = f"{label:<22}{nodes:>7}{t_ref * 1e6:>12.2f}"
            if _speed is not None:
                t_c = time_call(_speed, field, spec, args.reps)
                row += f"{t_c * 1e6:>14.2f}{t_ref / t_c:>8.1f}"
            print(row)


if __name__ == "__main__":
    main()
