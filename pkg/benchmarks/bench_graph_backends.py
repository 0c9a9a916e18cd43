"""Times the graph-register kernels on every available backend.

Two workloads:

* branch  - the branch-growth inner loop (fuse / measure / reseed),
  the hot path for threshold sweeps.
* clifford - a churn of vertex ops, CZs and Pauli measurements on a
  mid-sized register, exercising local complementation heavily.

Run from the repository root:

    python3 benchmarks/bench_graph_backends.py --steps 10000 --trials 20
"""

import argparse
import time

import numpy as np

from spinweave.graph.backends import available_backends
from spinweave.graph.register import GraphRegister
from spinweave.growth import simulate_branch_growth


def bench_branch(backend, p, steps, trials, seed):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    ens = simulate_branch_growth(p, steps, trials, rng, backend=backend)
    elapsed = time.perf_counter() - start
    return elapsed, ens.mean_drift


def bench_clifford(backend, vertices, ops, seed):
    rng = np.random.default_rng(seed)
    reg = GraphRegister(backend=backend)
    live = [reg.new_vertex() for _ in range(vertices)]
    start = time.perf_counter()
    for _ in range(ops):
        roll = rng.random()
        if roll < 0.35:
            reg.apply_clifford(live[rng.integers(len(live))],
                               int(rng.integers(24)))
        elif roll < 0.80 or len(live) <= 3:
            a, b = rng.choice(len(live), size=2, replace=False)
            reg.add_cz(live[int(a)], live[int(b)])
        else:
            v = live[rng.integers(len(live))]
            reg.measure_pauli(v, "XYZ"[rng.integers(3)], rng=rng)
            live.remove(v)
            live.append(reg.new_vertex())
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--steps", type=int, default=10_000)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--vertices", type=int, default=200)
    parser.add_argument("--ops", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    backends = sorted(available_backends())
    print(f"backends: {', '.join(backends)}")
    print(f"\nbranch growth: p={args.p} steps={args.steps} "
          f"trials={args.trials}")
    branch_times = {}
    for name in backends:
        elapsed, drift = bench_branch(name, args.p, args.steps,
                                      args.trials, args.seed)
        branch_times[name] = elapsed
        print(f"  {name:10s} {elapsed:8.3f} s  "
              f"({elapsed / args.trials * 1e3:7.2f} ms/trial)  "
              f"drift {drift:+.4f}")

    print(f"\nclifford churn: vertices={args.vertices} ops={args.ops}")
    clifford_times = {}
    for name in backends:
        elapsed = bench_clifford(name, args.vertices, args.ops, args.seed)
        clifford_times[name] = elapsed
        print(f"  {name:10s} {elapsed:8.3f} s  "
              f"({elapsed / args.ops * 1e6:7.2f} us/op)")

    if {"pure", "compiled"} <= set(backends):
        for label, times in (("branch", branch_times),
                             ("clifford", clifford_times)):
            ratio = times["pure"] / times["compiled"]
            print(f"\n{label}: compiled is {ratio:.1f}x the pure backend")


if __name__ == "__main__":
    main()
