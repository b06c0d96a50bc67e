"""Hot numeric kernels with a numba path and a pure-numpy path.

Set ``CINFTY_DISABLE_NUMBA=1`` (or run without numba installed) to force
the numpy implementations.  Both paths are always importable so the
benchmark and the agreement tests can call them side by side.

Kernels:

* ``eval_program``   stack-machine evaluation of a compiled expression
                     over a batch of points (NaN outside the domain)
* ``greedy_cluster`` keep-first clustering of lexicographically sorted points
* ``truncated_mul``  product in a truncated (Weil) algebra from a
                     precomputed multiplication table
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("CINFTY_DISABLE_NUMBA", "") not in ("1", "true", "yes")

# opcodes
OP_CONST, OP_VAR, OP_ADD, OP_MUL, OP_POW = 0, 1, 2, 3, 4
OP_EXP, OP_LOG, OP_SIN, OP_COS, OP_ATAN, OP_SQRT, OP_INVEXP = 5, 6, 7, 8, 9, 10, 11
OP_INVEXP_POW = 12

PRIMITIVE_OPS = {"exp": OP_EXP, "log": OP_LOG, "sin": OP_SIN, "cos": OP_COS,
                 "atan": OP_ATAN, "sqrt": OP_SQRT, "invexp": OP_INVEXP}


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# --- expression programs -----------------------------------------------------

def _eval_program_loop(ops, args, consts, X, depth):
    npts = X.shape[0]
    out = np.empty(npts)
    stack = np.empty(max(depth, 1))
    for p in range(npts):
        sp = 0
        for k in range(ops.shape[0]):
            op = ops[k]
            a = args[k]
            if op == OP_CONST:
                stack[sp] = consts[a]
                sp += 1
            elif op == OP_VAR:
                stack[sp] = X[p, a]
                sp += 1
            elif op == OP_ADD:
                s = 0.0
                for j in range(sp - a, sp):
                    s += stack[j]
                sp -= a
                stack[sp] = s
                sp += 1
            elif op == OP_MUL:
                r = 1.0
                for j in range(sp - a, sp):
                    r *= stack[j]
                sp -= a
                stack[sp] = r
                sp += 1
            else:
                u = stack[sp - 1]
                if op == OP_POW:
                    if a < 0 and u == 0.0:
                        v = np.nan
                    else:
                        v = u ** a
                elif op == OP_EXP:
                    v = np.exp(u)
                elif op == OP_LOG:
                    v = np.log(u) if u > 0.0 else np.nan
                elif op == OP_SIN:
                    v = np.sin(u)
                elif op == OP_COS:
                    v = np.cos(u)
                elif op == OP_ATAN:
                    v = np.arctan(u)
                elif op == OP_SQRT:
                    v = np.sqrt(u) if u >= 0.0 else np.nan
                elif op == OP_INVEXP:
                    v = np.exp(-1.0 / u) if u > 0.0 else 0.0
                else:  # OP_INVEXP_POW
                    v = np.exp(-1.0 / u) * u ** a if u > 0.0 else 0.0
                    if np.isnan(u):
                        v = np.nan
                stack[sp - 1] = v
        out[p] = stack[0]
    return out


eval_program_numba = _njit(_eval_program_loop)


def eval_program_numpy(ops, args, consts, X, depth):
    npts = X.shape[0]
    stack: list[np.ndarray] = []
    with np.errstate(all="ignore"):
        for op, a in zip(ops.tolist(), args.tolist()):
            if op == OP_CONST:
                stack.append(np.full(npts, consts[a]))
            elif op == OP_VAR:
                stack.append(X[:, a].astype(float))
            elif op == OP_ADD:
                operands = stack[len(stack) - a:]
                del stack[len(stack) - a:]
                s = np.zeros(npts)
                for t in operands:
                    s = s + t
                stack.append(s)
            elif op == OP_MUL:
                operands = stack[len(stack) - a:]
                del stack[len(stack) - a:]
                r = np.ones(npts)
                for t in operands:
                    r = r * t
                stack.append(r)
            else:
                u = stack.pop()
                if op == OP_POW:
                    if a < 0:
                        v = np.where(u == 0.0, np.nan,
                                     np.power(np.where(u == 0.0, 1.0, u), float(a)))
                    else:
                        v = np.power(u, float(a))
                elif op == OP_EXP:
                    v = np.exp(u)
                elif op == OP_LOG:
                    v = np.where(u > 0, np.log(np.where(u > 0, u, 1.0)), np.nan)
                elif op == OP_SIN:
                    v = np.sin(u)
                elif op == OP_COS:
                    v = np.cos(u)
                elif op == OP_ATAN:
                    v = np.arctan(u)
                elif op == OP_SQRT:
                    v = np.where(u >= 0, np.sqrt(np.where(u >= 0, u, 0.0)), np.nan)
                elif op == OP_INVEXP:
                    safe = np.where(u > 0, u, 1.0)
                    v = np.where(u > 0, np.exp(-1.0 / safe), 0.0)
                    v = np.where(np.isnan(u), np.nan, v)
                else:
                    safe = np.where(u > 0, u, 1.0)
                    v = np.where(u > 0, np.exp(-1.0 / safe) * safe ** float(a), 0.0)
                    v = np.where(np.isnan(u), np.nan, v)
                stack.append(v)
    return stack[0] if stack else np.zeros(npts)


def eval_program(ops, args, consts, X, depth):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if USE_NUMBA:
        return eval_program_numba(ops, args, consts, X, depth)
    return eval_program_numpy(ops, args, consts, X, depth)


# --- clustering ----------------------------------------------------------------

def _greedy_cluster_loop(points, radius):
    n = points.shape[0]
    keep = np.zeros(n, dtype=np.bool_)
    reps = np.empty(n, dtype=np.int64)
    nrep = 0
    r2 = radius * radius
    for i in range(n):
        found = False
        for k in range(nrep):
            j = reps[k]
            d = 0.0
            for c in range(points.shape[1]):
                t = points[i, c] - points[j, c]
                d += t * t
            if d <= r2:
                found = True
                break
        if not found:
            keep[i] = True
            reps[nrep] = i
            nrep += 1
    return keep


greedy_cluster_numba = _njit(_greedy_cluster_loop)


def greedy_cluster_numpy(points, radius):
    n = points.shape[0]
    keep = np.zeros(n, dtype=bool)
    reps = np.empty((0, points.shape[1]))
    for i in range(n):
        if reps.shape[0]:
            d = ((reps - points[i]) ** 2).sum(axis=1)
            if (d <= radius * radius).any():
                continue
        keep[i] = True
        reps = np.vstack([reps, points[i:i + 1]])
    return keep


def greedy_cluster(points, radius):
    """Mask of points kept when each point joins the first earlier representative
    within ``radius`` (Euclidean).  Input order decides tie-breaking."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if USE_NUMBA:
        return greedy_cluster_numba(points, float(radius))
    return greedy_cluster_numpy(points, float(radius))


# --- truncated multiplication -----------------------------------------------------

def _truncated_mul_loop(a, b, ti, tj, tk, dim):
    out = np.zeros(dim)
    for t in range(ti.shape[0]):
        out[tk[t]] += a[ti[t]] * b[tj[t]]
    return out


truncated_mul_numba = _njit(_truncated_mul_loop)


def truncated_mul_numpy(a, b, ti, tj, tk, dim):
    out = np.zeros(dim)
    np.add.at(out, tk, a[ti] * b[tj])
    return out


def truncated_mul(a, b, ti, tj, tk, dim):
    if USE_NUMBA:
        return truncated_mul_numba(a, b, ti, tj, tk, dim)
    return truncated_mul_numpy(a, b, ti, tj, tk, dim)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
