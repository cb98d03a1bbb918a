"""Benchmark the compiled simulation kernel against the pure-Python engine.

Both engines consume the random stream identically, so besides timing we
also verify the outputs are bit-for-bit equal.

Usage: python benchmarks/bench_simulate.py [--trials 2000] [--seed 1]
"""

import argparse
import time

import numpy as np

from levelbound import (ProblemSpec, SimulationConfig, available_engines,
                        run_trials)

# (function, n, generation cap): capped so even the deceptive basin, whose
# true escape time dwarfs any benchmark budget, finishes promptly
CASES = (
    ("onemax", 30, None),
    ("onemax", 100, None),
    ("twomax1", 20, None),
    ("deceptive", 12, 20000),
)


def bench(function, n, cap, trials, seed):
    spec = ProblemSpec(function, n)
    rows = {}
    for engine in available_engines():
        cfg = SimulationConfig(spec, _deepest(spec), trials, seed,
                               max_generations=cap, engine=engine)
        t0 = time.perf_counter()
        res = run_trials(cfg)
        rows[engine] = (time.perf_counter() - t0, res)
    return rows


def _deepest(spec):
    from levelbound import build_partition
    return build_partition(spec).K


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    engines = available_engines()
    print(f"engines available: {', '.join(engines)}")
    if "compiled" not in engines:
        print("compiled kernel not built; timing the python engine only")

    print(f"{'case':24} " + " ".join(f"{e:>12}" for e in engines) + "   speedup")
    for function, n, cap in CASES:
        rows = bench(function, n, cap, args.trials, args.seed)
        if len(rows) == 2:
            same = np.array_equal(rows["compiled"][1].hitting,
                                  rows["python"][1].hitting)
            assert same, "engines diverged; this is a bug"
            speedup = rows["python"][0] / rows["compiled"][0]
            extra = f"{speedup:9.1f}x"
        else:
            extra = ""
        times = " ".join(f"{rows[e][0]:11.3f}s" for e in engines)
        mean = next(iter(rows.values()))[1].mean
        print(f"{function:>10} n={n:<10} {times} {extra}   (mean {mean:9.1f})")


if __name__ == "__main__":
    main()
