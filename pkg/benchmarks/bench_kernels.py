"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the hot graph kernels on synthetic preferential-attachment corpora at a
few sizes and prints per-kernel timings for both backends. The numba column
excludes JIT compilation (one warm-up call per kernel).

    python3 benchmarks/bench_kernels.py [--nodes 500 1000 2000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

from graphswap.graph import _kernels_numba as nb
from graphswap.graph import _kernels_numpy as pnp
from graphswap.graph.build import build_graph
from graphswap.graph.synth import synth_corpus
from graphswap.inventory import extract_builtin

KERNELS = {
    "connected_components": lambda impl, g: impl.connected_components(g.indptr, g.indices),
    "closeness_sums": lambda impl, g: impl.closeness_sums(g.indptr, g.indices),
    "betweenness": lambda impl, g: impl.betweenness(g.indptr, g.indices),
    "power_iteration": lambda impl, g: impl.power_iteration(
        g.indptr, g.indices, g.weights, 1e-9, 100_000
    ),
}


def build(nodes: int):
    fx = synth_corpus(nodes=nodes, attachment=2, seed=0, n_chains=0)
    inv = extract_builtin(fx.corpus, gazetteer=fx.gazetteer)
    return build_graph(fx.corpus, inv)


def time_call(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, nargs="+", default=[500, 1000, 2000])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"{'graph':>12} {'kernel':>22} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for nodes in args.nodes:
        g = build(nodes)
        label = f"{g.n}n/{g.n_edges}e"
        for name, call in KERNELS.items():
            call(nb, g)  # warm-up: trigger JIT before timing
            t_nb = time_call(lambda: call(nb, g), args.repeat)
            t_np = time_call(lambda: call(pnp, g), args.repeat)
            speedup = t_np / t_nb if t_nb > 0 else float("inf")
            print(
                f"{label:>12} {name:>22} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms "
                f"{speedup:>7.1f}x"
            )


if __name__ == "__main__":
    main()
