"""Weil algebras R[x_1..x_k] / (monomials of degree >= N, extra zero monomials).

The C-infinity structure is forced: Phi_f acts by the truncated Taylor
series of f around the augmentation point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .expr import SmoothExpr, differentiate, evaluate
from .poly import monomials


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _grlex_key(m):
    return (sum(m), tuple(-e for e in m))


@dataclass(frozen=True)
class WeilAlgebra:
    k: int
    order: int
    extra_zero_monomials: frozenset = field(default=frozenset())

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order N must be at least 1")
        for m in self.extra_zero_monomials:
            if len(m) != self.k:
                raise ValueError(f"monomial {m} has wrong length for k={self.k}")
        gens = frozenset(tuple(m) for m in self.extra_zero_monomials)
        saturated = frozenset(
            m for m in self._all_below_order() if any(_divides(g, m) for g in gens))
        object.__setattr__(self, "extra_zero_monomials", saturated)

    def _all_below_order(self):
        return [m for m in iproduct(range(self.order), repeat=self.k) if sum(m) < self.order]

    @cached_property
    def basis(self) -> tuple:
        """Surviving monomials in graded-lex order (x0 > x1 > ...)."""
        out = [m for m in self._all_below_order() if m not in self.extra_zero_monomials]
        return tuple(sorted(out, key=_grlex_key))

    @cached_property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @cached_property
    def _table(self):
        ti, tj, tk = [], [], []
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                c = tuple(x + y for x, y in zip(a, b))
                kk = self.index.get(c)
                if kk is not None:
                    ti.append(i)
                    tj.append(j)
                    tk.append(kk)
        return (np.asarray(ti, dtype=np.int64), np.asarray(tj, dtype=np.int64),
                np.asarray(tk, dtype=np.int64))

    # element constructors
    def element(self, coefficients: Mapping[tuple, float]) -> "WeilElement":
        vec = np.zeros(self.dimension)
        for m, c in coefficients.items():
            m = tuple(m)
            if len(m) != self.k:
                raise ValueError(f"monomial {m} has wrong length")
            i = self.index.get(m)
            if i is not None:
                vec[i] += float(c)
        return WeilElement(self, vec)

    def constant(self, c: float) -> "WeilElement":
        return self.element({(0,) * self.k: c})

    def one(self) -> "WeilElement":
        return self.constant(1.0)

    def zero(self) -> "WeilElement":
        return WeilElement(self, np.zeros(self.dimension))

    def generator(self, i: int) -> "WeilElement":
        m = tuple(1 if j == i else 0 for j in range(self.k))
        return self.element({m: 1.0})


def weil_make(k: int, order: int, extra_zero_monomials: Iterable = ()) -> WeilAlgebra:
    return WeilAlgebra(k, order, frozenset(tuple(m) for m in extra_zero_monomials))


def dual_numbers() -> WeilAlgebra:
    return weil_make(1, 2)


class WeilElement:
    __slots__ = ("owner", "vec")

    def __init__(self, owner: WeilAlgebra, vec: np.ndarray):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (owner.dimension,):
            raise ValueError("coefficient vector does not match the algebra dimension")
        vec.setflags(write=False)
        self.owner = owner
        self.vec = vec

    @property
    def coefficients(self) -> dict:
        return {m: float(c) for m, c in zip(self.owner.basis, self.vec) if c != 0}

    def coeff(self, m: Sequence[int]) -> float:
        i = self.owner.index.get(tuple(m))
        return 0.0 if i is None else float(self.vec[i])

    @property
    def augmentation(self) -> float:
        return float(self.vec[0])

    def nilpotent_part(self) -> "WeilElement":
        v = self.vec.copy()
        v[0] = 0.0
        return WeilElement(self.owner, v)

    def _check(self, other):
        if not isinstance(other, WeilElement):
            return self.owner.constant(float(other))
        if other.owner != self.owner:
            raise ValueError("elements of different Weil algebras")
        return other

    def __add__(self, other):
        other = self._check(other)
        return WeilElement(self.owner, self.vec + other.vec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return WeilElement(self.owner, self.vec - other.vec)

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return WeilElement(self.owner, -self.vec)

    def scale(self, c: float) -> "WeilElement":
        return WeilElement(self.owner, float(c) * self.vec)

    def __mul__(self, other):
        if not isinstance(other, WeilElement):
            return self.scale(other)
        other = self._check(other)
        ti, tj, tk = self.owner._table
        return WeilElement(self.owner, K.truncated_mul(self.vec, other.vec, ti, tj, tk,
                                                       self.owner.dimension))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers need weil_phi")
        out = self.owner.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return (isinstance(other, WeilElement) and other.owner == self.owner
                and np.array_equal(self.vec, other.vec))

    def is_zero(self) -> bool:
        return not self.vec.any()

    def __repr__(self):
        terms = ", ".join(f"{m}: {c!r}" for m, c in self.coefficients.items())
        return f"WeilElement({{{terms}}})"


def weil_phi(f: SmoothExpr, args: Sequence[WeilElement]) -> WeilElement:
    """Phi_f(args) = sum over |a| < N of d^a f(aug) / a! * nil^a, truncated."""
    if not args:
        raise ValueError("weil_phi needs at least one argument to fix the algebra")
    W = args[0].owner
    if any(a.owner != W for a in args):
        raise ValueError("arguments belong to different Weil algebras")
    m = len(args)
    if f.max_var >= m:
        raise ValueError(f"f uses x{f.max_var} but only {m} arguments were given")
    aug = [a.augmentation for a in args]
    nil = [a.nilpotent_part() for a in args]

    derivs = {(0,) * m: f}
    monos = {(0,) * m: W.one()}
    total = W.one().scale(evaluate(f, aug))
    for degree in range(1, W.order):
        for beta in monomials(m, degree):
            j = _last_nonzero(beta)
            alpha = beta[:j] + (beta[j] - 1,) + beta[j + 1:]
            if alpha not in monos:
                continue
            prod = monos[alpha] * nil[j]
            if prod.is_zero():
                continue
            d = differentiate(derivs[alpha], j)
            derivs[beta] = d
            monos[beta] = prod
            total = total + prod.scale(evaluate(d, aug) / _multi_factorial(beta))
    return total


def _last_nonzero(m):
    return max(i for i, e in enumerate(m) if e)


def _multi_factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def weil_presentation(W: WeilAlgebra):
    """W as a presentation C(R^k) / (minimal zero monomials)."""
    from .cring import make_ring
    from .expr import Var, mul, power

    zero = set(W.extra_zero_monomials)
    zero |= {m for m in iproduct(range(W.order + 1), repeat=W.k) if sum(m) == W.order}
    minimal = sorted((m for m in zero
                      if not any(o != m and _divides(o, m) for o in zero)), key=_grlex_key)
    rels = [mul(*(power(Var(i), e) for i, e in enumerate(m) if e)) for m in minimal]
    return make_ring(W.k, rels)
