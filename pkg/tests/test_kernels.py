import math
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from cinfty import _kernels as K
from cinfty.expr import DomainError, evaluate
from cinfty.parser import parse
from cinfty.program import JacobianProgram, compile_expr
from cinfty.weil import weil_make

from oracles import random_smooth

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def _program_args(text, n, X):
    p = compile_expr(parse(text, n))
    return p.ops, p.args, p.consts, np.ascontiguousarray(X), p.depth


def test_program_matches_tree_evaluation():
    rng = random.Random(3)
    X = np.random.default_rng(3).uniform(-1.5, 1.5, size=(40, 3))
    for _ in range(40):
        text, _ = random_smooth(rng, 3, 3)
        e = parse(text, 3)
        got = compile_expr(e)(X)
        ref = np.array([evaluate(e, x) for x in X])
        assert np.allclose(got, ref, rtol=1e-13, atol=1e-14)


def test_program_nan_outside_domain():
    e = parse("log(x0) + sqrt(x1) + x0^-1")
    X = np.array([[1.0, 1.0], [0.0, 1.0], [1.0, -1.0], [-2.0, 4.0]])
    got = compile_expr(e)(X)
    assert got[0] == pytest.approx(2.0)
    assert np.isnan(got[1:]).all()
    for x in X[1:]:
        with pytest.raises(DomainError):
            evaluate(e, x)


def test_flat_zero_product_is_finite():
    # invexp(x) * x^-4 extends smoothly by 0 across x <= 0
    e = parse("invexp(x0) * x0^-4")
    got = compile_expr(e)(np.array([[-1.0], [0.0], [0.5]]))
    assert got[0] == 0.0 and got[1] == 0.0
    assert got[2] == pytest.approx(math.exp(-2) * 16)


def test_jacobian_program_shapes():
    jp = JacobianProgram([parse("x0^2 + x1^2 - 1"), parse("x1")], 2)
    r, J = jp(np.array([[1.0, 0.0], [0.0, 2.0]]))
    assert r.shape == (2, 2) and J.shape == (2, 2, 2)
    assert np.array_equal(J[0], [[2.0, 0.0], [0.0, 1.0]])
    assert np.array_equal(r[1], [3.0, 2.0])


@needs_numba
def test_eval_backends_agree():
    X = np.random.default_rng(7).uniform(-2, 2, size=(500, 2))
    args = _program_args("exp(-(x0^2 + x1^2)) * sin(3*x0) + atan(x0*x1) + log(x0) + invexp(x1)",
                         2, X)
    a, b = K.eval_program_numba(*args), K.eval_program_numpy(*args)
    assert np.allclose(a, b, rtol=1e-14, atol=0, equal_nan=True)
    assert np.array_equal(np.isnan(a), X[:, 0] <= 0)


@needs_numba
def test_cluster_backends_agree():
    rng = np.random.default_rng(11)
    centres = rng.uniform(-1, 1, size=(30, 2))
    X = centres[rng.integers(0, 30, 400)] + rng.normal(scale=1e-8, size=(400, 2))
    X = X[np.lexsort(X.T[::-1])]
    a, b = K.greedy_cluster_numba(X, 1e-6), K.greedy_cluster_numpy(X, 1e-6)
    assert np.array_equal(a, b)
    assert a.sum() == len(np.unique(np.round(centres, 6), axis=0))


@needs_numba
def test_truncated_mul_backends_agree():
    W = weil_make(2, 5)
    ti, tj, tk = W._table
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=W.dimension), rng.normal(size=W.dimension)
    assert np.allclose(K.truncated_mul_numba(a, b, ti, tj, tk, W.dimension),
                       K.truncated_mul_numpy(a, b, ti, tj, tk, W.dimension), rtol=1e-14)


def test_cluster_keeps_first_of_each_group():
    X = np.array([[0.0, 0.0], [0.0, 5e-7], [1.0, 0.0], [1.0, 2e-6]])
    assert K.greedy_cluster(X, 1e-6).tolist() == [True, False, True, True]


def test_environment_flag_forces_numpy():
    env = dict(os.environ, CINFTY_DISABLE_NUMBA="1")
    code = ("import cinfty, numpy as np\n"
            "from cinfty.parser import parse\n"
            "from cinfty.points import find_r_points\n"
            "from cinfty.cring import make_ring\n"
            "r = make_ring(2, ['x0^2 + x1^2 - 1', 'x1'])\n"
            "pts = find_r_points(r, [(-2, 2), (-2, 2)], 0.1, 20, 1e-12)\n"
            "print(cinfty.backend(), [tuple(round(v, 12) for v in p.coordinates) for p in pts])\n")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.strip()
    assert out == "numpy [(-1.0, 0.0), (1.0, 0.0)]"
