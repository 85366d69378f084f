"""Backend parity: the numba kernels and the numpy fallback must agree."""
import random

import numpy as np
import pytest

from graphswap.graph import _kernels_numba as nb
from graphswap.graph import _kernels_numpy as pnp
from graphswap.graph import kernels

from oracles import graph_from_adj, random_adj


def csr_cases(count=25, seed=14):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randrange(2, 40)
        adj = random_adj(n, rng.uniform(0.05, 0.6), rng)
        g = graph_from_adj(adj)
        yield g


def test_backend_chosen():
    assert kernels.BACKEND in ("numba", "numpy")


def test_components_parity():
    for g in csr_cases():
        a = nb.connected_components(g.indptr, g.indices)
        b = pnp.connected_components(g.indptr, g.indices)
        assert np.array_equal(a, b)


def test_closeness_sums_parity():
    for g in csr_cases(seed=15):
        sa, ca = nb.closeness_sums(g.indptr, g.indices)
        sb, cb = pnp.closeness_sums(g.indptr, g.indices)
        assert np.array_equal(sa, sb)
        assert np.array_equal(ca, cb)


def test_betweenness_parity():
    for g in csr_cases(seed=16):
        a = nb.betweenness(g.indptr, g.indices)
        b = pnp.betweenness(g.indptr, g.indices)
        assert np.allclose(a, b, atol=1e-12)


def test_power_iteration_parity():
    for g in csr_cases(seed=17):
        if g.n_edges == 0:
            continue
        la, _, _, ra, ca = nb.power_iteration(g.indptr, g.indices, g.weights, 1e-10, 100000)
        lb, _, _, rb, cb = pnp.power_iteration(g.indptr, g.indices, g.weights, 1e-10, 100000)
        assert ca and cb
        assert la == pytest.approx(lb, abs=1e-8)


def test_within_k_hops_parity_and_truth():
    rng = random.Random(18)
    for _ in range(20):
        n = rng.randrange(3, 25)
        adj = random_adj(n, rng.uniform(0.1, 0.5), rng)
        g = graph_from_adj(adj)
        from oracles import floyd_warshall

        dist = floyd_warshall(adj)
        for _ in range(10):
            s, t = rng.randrange(n), rng.randrange(n)
            k = rng.randrange(1, 5)
            expected = dist[s, t] <= k
            assert nb.within_k_hops(g.indptr, g.indices, s, t, k) == expected
            assert pnp.within_k_hops(g.indptr, g.indices, s, t, k) == expected


def test_numpy_backend_env_flag():
    import subprocess
    import sys

    code = (
        "import os; os.environ['GRAPHSWAP_BACKEND']='numpy';"
        "from graphswap.graph import kernels; print(kernels.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "numpy"
