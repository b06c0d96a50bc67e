"""Exact polynomial expansion and the Hadamard split.

Two representations live here:

* ``expand`` works on arbitrary expressions, treating primitive
  applications and negative powers of sums as opaque atoms.
* ``Poly`` dictionaries map exponent tuples to Fractions and are used
  wherever an expression must be genuinely polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, Sequence, Tuple

from .expr import (ONE, ZERO, Apply, Const, IntPower, Product, SmoothExpr, Sum,
                   Var, add, mul, power)


class NotPolynomial(ValueError):
    pass


Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Fraction]


# --- general expansion -----------------------------------------------------

def _mono_mul(a, b):
    d = dict(a)
    for atom, k in b:
        d[atom] = d.get(atom, 0) + k
    return tuple(sorted(((t, k) for t, k in d.items() if k != 0),
                        key=lambda tk: tk[0].sort_key))


def _emul(p, q):
    out = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            m = _mono_mul(ma, mb)
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def _expand(e, memo):
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Const):
        out = {(): e.value} if e.value != 0 else {}
    elif isinstance(e, Var):
        out = {((e, 1),): Fraction(1)}
    elif isinstance(e, Sum):
        out = {}
        for t in e.terms:
            for m, c in _expand(t, memo).items():
                out[m] = out.get(m, 0) + c
        out = {m: c for m, c in out.items() if c != 0}
    elif isinstance(e, Product):
        out = {(): Fraction(1)}
        for f in e.factors:
            out = _emul(out, _expand(f, memo))
    elif isinstance(e, IntPower):
        base = _expand(e.base, memo)
        if e.exponent > 0:
            out = {(): Fraction(1)}
            for _ in range(e.exponent):
                out = _emul(out, base)
        elif not base:
            out = {((e, 1),): Fraction(1)}
        elif len(base) == 1:
            (m, c), = base.items()
            out = {tuple((t, k * e.exponent) for t, k in m): c ** e.exponent}
        else:
            atom = _from_expanded(base)
            out = {((atom, e.exponent),): Fraction(1)} if not isinstance(atom, Const) \
                else {(): atom.value ** e.exponent}
    elif isinstance(e, Apply):
        out = {((Apply(e.name, _from_expanded(_expand(e.arg, memo))), 1),): Fraction(1)}
    else:
        raise TypeError(f"not a SmoothExpr: {e!r}")
    memo[e] = out
    return out


def _from_expanded(p) -> SmoothExpr:
    terms = [mul(Const(c), *(power(t, k) for t, k in m)) for m, c in p.items()]
    return add(*terms) if terms else ZERO


def expand(e: SmoothExpr) -> SmoothExpr:
    """Distribute products over sums and expand positive integer powers."""
    return _from_expanded(_expand(e, {}))


# --- dense-ish polynomial dictionaries --------------------------------------

def to_poly(e: SmoothExpr, nvars: int) -> Poly:
    """Exact coefficient dictionary of a polynomial expression."""
    out: Poly = {}
    for m, c in _expand(e, {}).items():
        exps = [0] * nvars
        for atom, k in m:
            if not isinstance(atom, Var) or k < 0:
                raise NotPolynomial(f"{e.printed} is not a polynomial")
            if atom.index >= nvars:
                raise ValueError(f"x{atom.index} out of range for {nvars} variables")
            exps[atom.index] = k
        out[tuple(exps)] = c
    return out


def from_poly(p: Poly) -> SmoothExpr:
    terms = []
    for m, c in p.items():
        if c == 0:
            continue
        terms.append(mul(Const(c), *(power(Var(i), k) for i, k in enumerate(m) if k)))
    return add(*terms) if terms else ZERO


def poly_add(p: Poly, q: Poly, scale=Fraction(1)) -> Poly:
    out = dict(p)
    for m, c in q.items():
        out[m] = out.get(m, 0) + scale * c
    return {m: c for m, c in out.items() if c != 0}


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            m = tuple(a + b for a, b in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def poly_degree(p: Poly) -> int:
    return max((sum(m) for m in p), default=-1)


def monomials(nvars: int, degree: int):
    """Exponent tuples of total degree exactly ``degree``, graded-lex descending."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = [m for m in iproduct(range(degree + 1), repeat=nvars) if sum(m) == degree]
    out.sort(reverse=True)
    return out


def _rename(p: Poly, mapping: Sequence[int], nvars: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        e = [0] * nvars
        for i, k in enumerate(m):
            e[mapping[i]] += k
        e = tuple(e)
        out[e] = out.get(e, 0) + c
    return out


def hadamard_split(f: SmoothExpr, n: int) -> list[SmoothExpr]:
    """Polynomials g_i with f(y) - f(x) = sum_i (y_i - x_i) g_i(x, y).

    ``x`` is x0..x{n-1} and ``y`` is x{n}..x{2n-1}.  Term ``i`` telescopes
    f(x_1..x_{i-1}, y_i, ..., y_n) - f(x_1..x_i, y_{i+1}, ..., y_n) and is
    divided exactly by (y_i - x_i).
    """
    p = to_poly(f, n)
    out = []
    for i in range(n):
        upper = [j if j < i else n + j for j in range(n)]
        lower = [j if j <= i else n + j for j in range(n)]
        diff = poly_add(_rename(p, upper, 2 * n), _rename(p, lower, 2 * n), Fraction(-1))
        out.append(from_poly(_divide_linear(diff, n + i, i, 2 * n)))
    return out


def _divide_linear(p: Poly, y: int, x: int, nvars: int) -> Poly:
    """Exact quotient of ``p`` by ``(x_y - x_x)``; the remainder must vanish."""
    by_deg: dict[int, Poly] = {}
    for m, c in p.items():
        k = m[y]
        rest = m[:y] + (0,) + m[y + 1:]
        by_deg.setdefault(k, {})[rest] = c
    if not by_deg:
        return {}
    top = max(by_deg)
    xmono = {tuple(1 if j == x else 0 for j in range(nvars)): Fraction(1)}
    quotient: Poly = {}
    q: Poly = {}
    for k in range(top, 0, -1):
        q = poly_add(by_deg.get(k, {}), poly_mul(xmono, q))
        ymono = tuple((k - 1) if j == y else 0 for j in range(nvars))
        quotient = poly_add(quotient, poly_mul({ymono: Fraction(1)}, q))
    remainder = poly_add(by_deg.get(0, {}), poly_mul(xmono, q))
    if remainder:
        raise ArithmeticError("telescoping difference is not divisible by (y - x)")
    return quotient


def is_zero_after_expansion(e: SmoothExpr) -> bool:
    return expand(e) == ZERO


__all__ = ["NotPolynomial", "expand", "to_poly", "from_poly", "poly_add", "poly_mul",
           "poly_degree", "monomials", "hadamard_split", "is_zero_after_expansion", "ONE"]
