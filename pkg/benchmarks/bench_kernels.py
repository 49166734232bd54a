"""Compare the compiled and pure-Python kernels.

Usage::

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]

Times the logistic-triad simulator, SOM training (``--steps`` outer steps
with K=20 on a 40x20 grid) and the global-winner readout, and checks that
both backends agree.
"""

import argparse
import time

import numpy as np

from hiddendriver import _backend
from hiddendriver.asom import TrainingSchedule, init_grid, train, winners
from hiddendriver.dynamics import LogisticTriadParams, logistic_triad_simulate
from hiddendriver.embedding import delay_embed


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=2000, help="outer training steps")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    try:
        _backend.get_kernels("cython")
        backends = ["cython", "python"]
    except ImportError:
        print("compiled extension not built; timing the Python kernels only")
        backends = ["python"]

    params = LogisticTriadParams.demo()
    sim = logistic_triad_simulate(params, (0.4, 0.2, 0.3), 20000, seed=1)
    X = delay_embed(sim.x[:10000], 3)
    Y = delay_embed(sim.y[:10000], 3)
    Y_test = delay_embed(sim.y[10000:], 3)
    schedule = TrainingSchedule(N=args.steps)
    grid0 = init_grid(40, 20, 3, seed=2)

    results = {}
    print(f"{'task':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    tasks = {
        "simulate (21000 steps)": lambda b: logistic_triad_simulate(
            params, (0.4, 0.2, 0.3), 20000, seed=1, backend=b).y,
        f"train (N={args.steps}, K=20)": lambda b: train(grid0, X, Y, schedule, seed=3, backend=b)[0].centers,
        "readout (9998 queries)": lambda b: winners(grid0, Y_test, backend=b),
    }
    for name, task in tasks.items():
        row = {}
        for b in backends:
            row[b], results[(name, b)] = best_of(lambda: task(b), args.repeat)
        line = f"{name:<28}" + "".join(f"{row[b]:>11.4f}s" for b in backends)
        if len(backends) == 2:
            line += f"{row['python'] / row['cython']:>9.1f}x"
        print(line)

    if len(backends) == 2:
        for name in tasks:
            a, b = results[(name, "cython")], results[(name, "python")]
            print(f"max |cython - python| for {name}: {np.max(np.abs(a - b)):.3g}")


if __name__ == "__main__":
    main()
