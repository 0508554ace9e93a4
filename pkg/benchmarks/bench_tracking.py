"""Compare the compiled and pure-Python root-tracking kernels.

Two workloads: raw ``track_path`` calls on random sextic fibres along a circle,
and full ``monodromy_transitive`` runs on random cubic and quartic curves.  Both
kernels must return the same permutations; the timing ratio is printed.

    python3 benchmarks/bench_tracking.py [--curves 30] [--repeat 3]
"""

import argparse
import cmath
import math
import random
import time

import numpy as np

from hitchin_kit import spectral, tracking
from hitchin_kit.exactalg import Poly


def random_curve(rng, n):
    coeffs = [Poly([rng.randint(-3, 3) for _ in range(rng.randint(1, 3))]) for _ in range(n - 1)]
    coeffs.append(Poly([rng.randint(-3, 3) or 1, rng.randint(-3, 3), rng.choice([-1, 1])]))
    return spectral.SpectralCurve.from_coeffs(coeffs)


def kernel_workload(rng, count):
    jobs = []
    for _ in range(count):
        table = np.array([[complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)]
                          for _ in range(6)])
        path = [3.0 * cmath.exp(2j * math.pi * s / 2000) for s in range(2001)]
        roots = np.roots(np.concatenate([[1.0], [np.polyval(row[::-1], path[0]) for row in table]]))
        jobs.append((table, path, list(roots)))
    return jobs


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--curves", type=int, default=30)
    ap.add_argument("--paths", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if tracking.c_track_path is None:
        print("compiled kernel not built; only the Python kernel is available")
        return 1
    rng = random.Random(args.seed)
    jobs = kernel_workload(rng, args.paths)
    curves = [random_curve(rng, rng.choice([3, 4])) for _ in range(args.curves)]

    rows = []
    results = {}
    for name, kernel in (("cython", tracking.c_track_path), ("python", tracking.py_track_path)):
        t_kernel, tracked = best_of(lambda: [kernel(t, p, r) for t, p, r in jobs], args.repeat)
        saved = tracking.track_path
        tracking.track_path = kernel
        try:
            t_mono, reports = best_of(lambda: [spectral.monodromy_transitive(c) for c in curves],
                                      args.repeat)
        finally:
            tracking.track_path = saved
        results[name] = (tracked, reports)
        rows.append((name, t_kernel, t_mono))

    (ck, cm), (pk, pm) = results["cython"], results["python"]
    same_status = all(a[1] == b[1] for a, b in zip(ck, pk))
    max_dev = max((max(abs(x - y) for x, y in zip(a[0], b[0])) for a, b in zip(ck, pk)
                   if a[0] is not None and b[0] is not None), default=0.0)
    same_perms = all(a.permutations == b.permutations and a.status == b.status for a, b in zip(cm, pm))

    print(f"{'kernel':<8} {'track_path x' + str(args.paths):>16} {'monodromy x' + str(args.curves):>16}")
    for name, tk, tm in rows:
        print(f"{name:<8} {tk:>15.4f}s {tm:>15.4f}s")
    print(f"speed-up  {rows[1][1] / rows[0][1]:>15.1f}x {rows[1][2] / rows[0][2]:>15.1f}x")
    print(f"agreement: statuses {same_status}, max root deviation {max_dev:.2e}, permutations {same_perms}")
    return 0 if same_status and same_perms else 1


if __name__ == "__main__":
    raise SystemExit(main())
