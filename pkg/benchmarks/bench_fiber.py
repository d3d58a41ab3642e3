"""Compare the compiled and numpy fiber-integral kernels.

    python3 benchmarks/bench_fiber.py [--points 20000] [--repeat 3]

Both kernels get identical field arrays (the non-flat shipped instance on
the z-chart); the script reports the best wall time of each and the largest
disagreement between their outputs.
"""
import argparse
import time

import numpy as np

from arithchern.hermitian import _kernel
from arithchern.hermitian.transgression import FAMILIES, _field_arrays, fiber_nodes
from arithchern.verify import fixture_path, load_instance

try:
    from arithchern.hermitian import _fiber_ext
except ImportError:
    _fiber_ext = None


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n-s", type=int, default=64)
    args = ap.parse_args()

    seq = load_instance(fixture_path("nonflat-o1-o2.json")).sequence()
    rng = np.random.default_rng(0)
    r = np.sqrt(rng.uniform(0, 1, args.points))
    pts = r * np.exp(2j * np.pi * rng.uniform(0, 1, args.points))
    fields = _field_arrays(seq.family_fields("z"), pts, "analytic", 1e-3, True)
    nodes = fiber_nodes(FAMILIES["linear"], args.n_s)

    t_py, (a1, a2, _) = best_of(lambda: _kernel.fiber_integrals(fields, nodes, True), args.repeat)
    print(f"numpy   {t_py:8.3f} s  ({args.points} points x {args.n_s} nodes x 2 charts)")
    if _fiber_ext is None:
        print("cython  not built (pip install -e . compiles it when Cython is present)")
        return
    t_cy, (b1, b2, _) = best_of(lambda: _fiber_ext.fiber_integrals(fields, nodes, True),
                                args.repeat)
    diff = max(np.max(np.abs(a1 - b1)), np.max(np.abs(a2 - b2)))
    scale = max(np.max(np.abs(a1)), np.max(np.abs(a2)))
    print(f"cython  {t_cy:8.3f} s")
    print(f"speedup {t_py / t_cy:8.2f}x   max |numpy - cython| = {diff:.2e} (scale {scale:.2e})")


if __name__ == "__main__":
    main()
