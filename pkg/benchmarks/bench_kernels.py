"""Compare the compiled and pure-Python kernels on a synthetic dependency network.

    python benchmarks/bench_kernels.py --nodes 200000 --edges 1000000 --sources 100
"""

import argparse
import time

import numpy as np

from licensegraph import _pykernels
from licensegraph.graph import _csr

try:
    from licensegraph import _kernels
except ImportError:
    _kernels = None


def synthetic(n, m, seed):
    # preferential attachment towards low ids: a few packages are depended on heavily
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, m)
    dst = np.minimum((rng.pareto(1.2, m) * 50).astype(np.int64), n - 1)
    pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
    return pairs[:, 0].copy(), pairs[:, 1].copy()


def timed(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=200_000)
    parser.add_argument("--edges", type=int, default=1_000_000)
    parser.add_argument("--sources", type=int, default=50)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    src, dst = synthetic(args.nodes, args.edges, args.seed)
    forward = _csr(args.nodes, src, dst)
    reverse = _csr(args.nodes, dst, src)
    rng = np.random.default_rng(args.seed + 1)
    sources = rng.choice(np.unique(dst), size=min(args.sources, len(np.unique(dst))), replace=False)
    print(f"graph: {args.nodes} nodes, {len(src)} logical edges, {len(sources)} reach sources")

    backends = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    results = {}
    for name, mod in backends:
        t_reach, reach = timed(mod.reverse_reach, *reverse, sources, repeat=args.repeat)
        t_pr, pr = timed(mod.pagerank, *forward, 0.85, 100, 1e-9, repeat=args.repeat)
        results[name] = (t_reach, t_pr, reach, pr)
        print(f"{name:>7}: reverse_reach {t_reach:8.3f} s   pagerank {t_pr:8.3f} s ({pr[1]} iterations)")

    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        assert np.array_equal(py[2][0], cy[2][0]) and np.array_equal(py[2][1], cy[2][1])
        assert np.allclose(py[3][0], cy[3][0], atol=1e-12)
        print(f"speed-up: reverse_reach x{py[0] / cy[0]:.1f}, pagerank x{py[1] / cy[1]:.1f} (results identical)")
    else:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
