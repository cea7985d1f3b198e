"""Time the compiled kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py --n 400 --repeat 3
"""
import argparse
import time

import numpy as np

from tqc import _kernels, _pykernels
from tqc.conformal.zipper import zipper_fit
from tqc.generators import CurveSpec, generate


def star(n, seed=0):
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    r = 1 + 0.3 * np.sin(5 * th) + 0.05 * rng.normal(size=n)
    return th, np.column_stack([r * np.cos(th), r * np.sin(th)])


def best_time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return min(out)


def cases(n):
    th, pts = star(n)
    m = zipper_fit(generate(CurveSpec("ellipse", 256)))
    stages = (m.z0, m.z1, m.inv_b, m.c, m.scale, m.inv_zeta)
    rng = np.random.default_rng(1)
    w = 1j * np.exp(rng.uniform(-3, 3, 4 * n)) * np.exp(1j * rng.uniform(0.1, 3.0, 4 * n))
    return {
        "prefix_diameters": lambda k: k.prefix_diameters(pts),
        "range_diameter_table": lambda k: k.range_diameter_table(pts),
        "weak_qs_scan": lambda k: _kernels.weak_qs_scan(th, pts, 0.5, 0, threads=1, backend=k),
        "zipper_inverse": lambda k: _kernels.zipper_inverse(w, *stages, threads=1, backend=k),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300, help="curve samples")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        from tqc import _ckernels
    except ImportError:
        _ckernels = None
    print(f"n={args.n} repeat={args.repeat} active backend={_kernels.BACKEND}")
    print(f"{'kernel':<22}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, fn in cases(args.n).items():
        py = best_time(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<22}{py:>12.4f}{'-':>12}{'-':>10}")
            continue
        cy = best_time(lambda: fn(_ckernels), args.repeat)
        print(f"{name:<22}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
