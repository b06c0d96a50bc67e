"""Compare the numba and numpy paths of the hot kernels.

    python benchmarks/bench_kernels.py [--points 200000] [--repeat 5]

Each kernel is called once before timing so JIT compilation is excluded.
Both implementations are also checked for agreement on the same inputs.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from cinfty import _kernels as K
from cinfty.parser import parse
from cinfty.points import grid
from cinfty.program import compile_expr
from cinfty.weil import weil_make


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_eval(n_points, repeat):
    e = parse("exp(-(x0^2 + x1^2)) * sin(3*x0) + atan(x0*x1) + invexp(x0) * x1^-2 + sqrt(x1^2 + 1)", 2)
    prog = compile_expr(e)
    X = np.random.default_rng(0).uniform(-2, 2, size=(n_points, 2))
    args = (prog.ops, prog.args, prog.consts, X, prog.depth)
    a = K.eval_program_numba(*args)
    b = K.eval_program_numpy(*args)
    assert np.allclose(a, b, equal_nan=True, rtol=1e-13, atol=1e-15)
    return (best_of(lambda: K.eval_program_numba(*args), repeat),
            best_of(lambda: K.eval_program_numpy(*args), repeat))


def bench_cluster(n_points, repeat):
    rng = np.random.default_rng(1)
    centres = grid([(-2, 2), (-2, 2)], 0.25)
    X = centres[rng.integers(0, len(centres), n_points)] + rng.normal(scale=1e-8, size=(n_points, 2))
    X = X[np.lexsort(X.T[::-1])]
    assert np.array_equal(K.greedy_cluster_numba(X, 1e-6), K.greedy_cluster_numpy(X, 1e-6))
    return (best_of(lambda: K.greedy_cluster_numba(X, 1e-6), repeat),
            best_of(lambda: K.greedy_cluster_numpy(X, 1e-6), repeat))


def bench_weil(n_products, repeat):
    W = weil_make(3, 6)
    ti, tj, tk = W._table
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=W.dimension), rng.normal(size=W.dimension)
    assert np.allclose(K.truncated_mul_numba(a, b, ti, tj, tk, W.dimension),
                       K.truncated_mul_numpy(a, b, ti, tj, tk, W.dimension))

    def run(fn):
        return lambda: [fn(a, b, ti, tj, tk, W.dimension) for _ in range(n_products)]

    return (best_of(run(K.truncated_mul_numba), repeat),
            best_of(run(K.truncated_mul_numpy), repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rows = [
        (f"eval_program ({args.points} points)", bench_eval(args.points, args.repeat)),
        (f"greedy_cluster ({args.points // 20} points)", bench_cluster(args.points // 20, args.repeat)),
        (f"truncated_mul (2000 products, dim {weil_make(3, 6).dimension})", bench_weil(2000, args.repeat)),
    ]
    print(f"{'kernel':42s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for name, (tn, tp) in rows:
        print(f"{name:42s} {tn:11.4f} {tp:11.4f} {tp / tn:8.1f}x")


if __name__ == "__main__":
    main()
