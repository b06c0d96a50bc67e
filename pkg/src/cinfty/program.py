"""Compile SmoothExpr trees to flat postfix programs for batch evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as K
from .expr import (Apply, Const, IntPower, Product, SmoothExpr, Sum, Var,
                   differentiate)


@dataclass(frozen=True)
class Program:
    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    depth: int

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("expected a 2-d array of points")
        if X.shape[0] == 0:
            return np.empty(0)
        return K.eval_program(self.ops, self.args, self.consts, X, self.depth)


def compile_expr(e: SmoothExpr) -> Program:
    ops: list[int] = []
    args: list[int] = []
    consts: list[float] = []
    const_index: dict = {}
    depth = [0, 0]  # current, max

    def push(op, a, delta):
        ops.append(op)
        args.append(a)
        depth[0] += delta
        depth[1] = max(depth[1], depth[0])

    def emit(node):
        if isinstance(node, Const):
            v = float(node.value)
            if v not in const_index:
                const_index[v] = len(consts)
                consts.append(v)
            push(K.OP_CONST, const_index[v], 1)
        elif isinstance(node, Var):
            push(K.OP_VAR, node.index, 1)
        elif isinstance(node, Sum):
            for t in node.terms:
                emit(t)
            push(K.OP_ADD, len(node.terms), 1 - len(node.terms))
        elif isinstance(node, Product):
            items = node.fused
            for f, k in items:
                emit(f)
                if k is not None:
                    push(K.OP_INVEXP_POW, k, 0)
            push(K.OP_MUL, len(items), 1 - len(items))
        elif isinstance(node, IntPower):
            emit(node.base)
            push(K.OP_POW, node.exponent, 0)
        elif isinstance(node, Apply):
            emit(node.arg)
            push(K.PRIMITIVE_OPS[node.name], 0, 0)
        else:
            raise TypeError(f"not a SmoothExpr: {node!r}")

    emit(e)
    return Program(np.asarray(ops, dtype=np.int64), np.asarray(args, dtype=np.int64),
                   np.asarray(consts if consts else [0.0], dtype=np.float64), depth[1])


class VectorProgram:
    """Batch evaluator for a list of expressions; returns shape (npts, len(exprs))."""

    def __init__(self, exprs: Sequence[SmoothExpr]):
        self.exprs = tuple(exprs)
        self.programs = [compile_expr(e) for e in self.exprs]

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], len(self.programs)))
        for j, p in enumerate(self.programs):
            out[:, j] = p(X) if X.shape[0] else 0.0
        return out


class JacobianProgram:
    """Batch residuals and Jacobians of a relation vector in ``n`` variables."""

    def __init__(self, exprs: Sequence[SmoothExpr], n: int):
        self.n = n
        self.values = VectorProgram(exprs)
        self.partials = VectorProgram([differentiate(e, j) for e in exprs for j in range(n)])
        self.m = len(self.values.exprs)

    def __call__(self, X: np.ndarray):
        r = self.values(X)
        J = self.partials(X).reshape(X.shape[0], self.m, self.n)
        return r, J
