"""Time the distance-bracket kernel on both backends.

    python3 benchmarks/bench_kernels.py --points 20000 --repeat 5

The numba timing excludes the first (compiling) call.  Both backends must
return the same brackets up to rounding; the script checks that too.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from cantor_uniform import _kernels
from cantor_uniform.sequence import OMEGA0, validate_spec
from cantor_uniform.tree import level_arrays

SPECS = {
    "omega0": OMEGA0,
    "interleave": validate_spec({"prefix": [], "tail": {"pattern": [
        {"kind": "fixed", "q": "1/3"},
        {"kind": "decay", "num": 1, "den_slope": 1, "den_offset": 0}]}}),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    print(f"{'spec':<12}{'queries':<8}{'backend':<8}{'seconds':>10}{'per query (us)':>16}")
    for name, spec in SPECS.items():
        lengths, offsets = level_arrays(spec)
        for mix in ("spread", "near"):
            xs, ys = queries(mix, lengths, offsets, args.points, args.seed)
            compare(name, mix, xs, ys, lengths, offsets, args)
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or CANTOR_UNIFORM_NUMBA=0): numpy only")


def queries(mix, lengths, offsets, n, seed):
    rng = np.random.default_rng(seed)
    if mix == "spread":
        xs = rng.uniform(-1.0, 2.0, n)
        # heights over many scales so queries stop at different depths
        ys = np.sign(rng.uniform(-1, 1, n)) * 10.0 ** rng.uniform(-8, 0, n)
        return xs, ys
    # points of the set (random paths) lifted by about 1e-7: long descents
    bits = rng.integers(0, 2, size=(n, 40))
    xs = bits @ offsets[1:41]
    ys = 10.0 ** rng.uniform(-8, -6, n)
    return xs, ys


def compare(name, mix, xs, ys, lengths, offsets, args):
    results = {}
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    for backend in backends:
        run = lambda: _kernels.dist_brackets(xs, ys, lengths, offsets, tol=args.tol,
                                             backend=backend)
        results[backend] = run()  # warm-up / compile
        t = best_of(run, args.repeat)
        print(f"{name:<12}{mix:<8}{backend:<8}{t:>10.4f}{1e6 * t / len(xs):>16.2f}")
    if len(results) == 2:
        lo_a, hi_a = results["numpy"][:2]
        lo_b, hi_b = results["numba"][:2]
        gap = max(np.max(np.abs(lo_a - lo_b)), np.max(np.abs(hi_a - hi_b)))
        print(f"{'':<20}max backend disagreement {gap:.3g}")


if __name__ == "__main__":
    main()
