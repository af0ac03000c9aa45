"""Time the numba kernels against their plain Python / numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--steps 100000]

The compiled path is only available when numba is importable and
NEUROCASCADE_NO_NUMBA is unset; otherwise only the fallback rows print.
"""
import argparse
import time

import numpy as np

from neurocascade import kernels
from neurocascade._jit import NUMBA_ENABLED
from neurocascade.compiler import NeuronChoice, compile_cascade
from neurocascade.patterns import random_prices, ttop_cascade


def best_of(fn, repeat):
    fn()  # warm-up, also triggers compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def rnc_args(steps, seed):
    spec = ttop_cascade(4)
    rnc = compile_cascade(spec, NeuronChoice("tanh", 2.0))
    rng = np.random.default_rng(seed)
    word = []
    while len(word) < steps:
        word.extend(random_prices(rng, 4, max_len=40).letters())
    letters = np.asarray([spec.alphabet.index(s) for s in word[:steps]], dtype=np.int64)
    p = rnc.packed()
    return (p["codes"], p["orders"], p["ws"], rnc.initial, p["st_lo"], p["st_hi"], p["st_count"],
            p["in_lo"], p["in_hi"], p["in_count"], p["cayley"], p["read_ptr"], p["reads"],
            p["strides"], p["letter_stride"], p["tab_ptr"], p["tables"], letters)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--grid", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    vs = rng.uniform(-0.5, 0.5, args.steps)
    xs = np.linspace(-1.0, 1.0, args.grid)
    gv = np.linspace(-0.5, 0.5, args.grid)
    run = rnc_args(min(args.steps, 20_000), args.seed)

    cases = [
        ("iterate (tanh, %d steps)" % args.steps,
         lambda: kernels.iterate(1, 1, 2.0, -1.0, vs),
         lambda: kernels.iterate.py_func(1, 1, 2.0, -1.0, vs)),
        ("rnc_run (TTOP N=4, %d steps)" % len(run[-1]),
         lambda: kernels.rnc_run(*run),
         lambda: kernels.rnc_run.py_func(*run)),
        ("grid_violation (%dx%d)" % (args.grid, args.grid),
         lambda: kernels.grid_violation_loop(1, 1, 2.0, xs, gv, -1.0, 1.0, 1e-12),
         lambda: kernels.grid_violation_numpy(1, 1, 2.0, xs, gv, -1.0, 1.0, 1e-12)),
    ]
    print(f"numba enabled: {NUMBA_ENABLED}")
    print(f"{'kernel':36s} {'compiled':>12s} {'fallback':>12s} {'speedup':>9s}")
    for name, fast, slow in cases:
        t_slow = best_of(slow, max(1, args.repeat // 2))
        if NUMBA_ENABLED:
            t_fast = best_of(fast, args.repeat)
            print(f"{name:36s} {t_fast * 1e3:10.2f}ms {t_slow * 1e3:10.2f}ms {t_slow / t_fast:8.1f}x")
        else:
            print(f"{name:36s} {'n/a':>12s} {t_slow * 1e3:10.2f}ms {'':>9s}")


if __name__ == "__main__":
    main()
