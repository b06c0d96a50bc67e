"""Symbolic smooth expressions over a fixed primitive library.

Expressions are immutable trees.  Every public constructor returns the
canonical form, so structural equality (``==``) is the equality used for
golden tests; semantic equality is left to sampled evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence


class DomainError(ValueError):
    """A primitive or negative power was evaluated outside its domain."""


PRIMITIVES = ("atan", "cos", "exp", "invexp", "log", "sin", "sqrt")

_KIND_RANK = {"Const": 0, "Var": 1, "IntPower": 2, "Apply": 3, "Product": 4, "Sum": 5}


class SmoothExpr:
    __slots__ = ()

    # -- arithmetic sugar; all results are canonical ------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer exponents are supported")
        return power(self, n)

    def __str__(self):
        return self.printed

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    @cached_property
    def sort_key(self):
        kind = type(self).__name__
        if isinstance(self, Const):
            return (0, self.value)
        if isinstance(self, Var):
            return (1, self.index)
        if isinstance(self, Apply):
            return (3, self.name, self.printed)
        return (_KIND_RANK[kind], self.printed)

    @cached_property
    def variables(self) -> frozenset:
        if isinstance(self, Var):
            return frozenset((self.index,))
        if isinstance(self, Const):
            return frozenset()
        out = frozenset()
        for child in self.children():
            out |= child.variables
        return out

    def children(self) -> tuple:
        return ()

    @property
    def max_var(self) -> int:
        """Largest variable index used, or -1 for closed expressions."""
        return max(self.variables, default=-1)


@dataclass(frozen=True, eq=True, repr=False)
class Const(SmoothExpr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @cached_property
    def printed(self) -> str:
        v = self.value
        if v.denominator == 1 and v >= 0:
            return str(v.numerator)
        return f"({v.numerator}/{v.denominator})" if v.denominator != 1 else f"({v.numerator})"

    def __repr__(self):
        return f"Const({self.value})"

    def __hash__(self):
        return hash(("C", self.value))


@dataclass(frozen=True, eq=True, repr=False)
class Var(SmoothExpr):
    index: int

    @cached_property
    def printed(self) -> str:
        return f"x{self.index}"

    def __repr__(self):
        return f"Var({self.index})"

    def __hash__(self):
        return hash(("V", self.index))


@dataclass(frozen=True, eq=False, repr=False)
class _Node(SmoothExpr):
    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((type(self).__name__,) + self._fields())

    def __repr__(self):
        return f"{type(self).__name__}{self._fields()!r}"


@dataclass(frozen=True, eq=False, repr=False)
class Sum(_Node):
    terms: tuple

    def _fields(self):
        return (self.terms,)

    def children(self):
        return self.terms

    @cached_property
    def printed(self) -> str:
        return "(" + " + ".join(t.printed for t in self.terms) + ")"


@dataclass(frozen=True, eq=False, repr=False)
class Product(_Node):
    factors: tuple

    def _fields(self):
        return (self.factors,)

    def children(self):
        return self.factors

    @cached_property
    def printed(self) -> str:
        return "(" + " * ".join(f.printed for f in self.factors) + ")"

    @cached_property
    def fused(self) -> tuple:
        """Factors with ``invexp(u) * u^k`` (k < 0) pairs fused.

        ``invexp`` vanishes to infinite order at ``u <= 0``, so the product
        extends smoothly by zero there even though ``u^k`` alone does not.
        Entries are ``(factor, None)`` or ``(u, k)``.
        """
        neg_powers = {f.base: f for f in self.factors
                      if isinstance(f, IntPower) and f.exponent < 0}
        used = set()
        out = []
        for f in self.factors:
            if isinstance(f, Apply) and f.name == "invexp" and f.arg in neg_powers \
                    and f.arg not in used:
                used.add(f.arg)
                out.append((f.arg, neg_powers[f.arg].exponent))
        for f in self.factors:
            if isinstance(f, IntPower) and f.base in used and f.exponent < 0:
                continue
            if isinstance(f, Apply) and f.name == "invexp" and f.arg in used:
                continue
            out.append((f, None))
        return tuple(out)


@dataclass(frozen=True, eq=False, repr=False)
class IntPower(_Node):
    base: SmoothExpr
    exponent: int

    def _fields(self):
        return (self.base, self.exponent)

    def children(self):
        return (self.base,)

    @cached_property
    def printed(self) -> str:
        return f"({self.base.printed} ^ {self.exponent})"


@dataclass(frozen=True, eq=False, repr=False)
class Apply(_Node):
    name: str
    arg: SmoothExpr

    def __post_init__(self):
        if self.name not in PRIMITIVES:
            raise ValueError(f"unknown primitive {self.name!r}")

    def _fields(self):
        return (self.name, self.arg)

    def children(self):
        return (self.arg,)

    @cached_property
    def printed(self) -> str:
        return f"{self.name}({self.arg.printed})"


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def as_expr(x) -> SmoothExpr:
    if isinstance(x, SmoothExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    if isinstance(x, float):
        return Const(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to SmoothExpr")


def var(i: int) -> Var:
    return Var(i)


def const(v) -> Const:
    return Const(Fraction(v))


# --- canonicalizing constructors -------------------------------------------

def _split_coefficient(term: SmoothExpr):
    if isinstance(term, Const):
        return term.value, None
    if isinstance(term, Product) and isinstance(term.factors[0], Const):
        rest = term.factors[1:]
        return term.factors[0].value, rest[0] if len(rest) == 1 else Product(rest)
    return Fraction(1), term


def _scale(c: Fraction, rest: SmoothExpr) -> SmoothExpr:
    if c == 1:
        return rest
    if isinstance(rest, Product):
        return Product((Const(c),) + rest.factors)
    return Product((Const(c), rest))


def add(*terms: SmoothExpr) -> SmoothExpr:
    """Canonical sum: flatten, collect like terms, drop zeros, sort."""
    constant = Fraction(0)
    coeffs: dict = {}
    stack = list(terms)
    flat = []
    while stack:
        t = stack.pop(0)
        if isinstance(t, Sum):
            stack[0:0] = list(t.terms)
        else:
            flat.append(t)
    for t in flat:
        c, rest = _split_coefficient(t)
        if rest is None:
            constant += c
        else:
            coeffs[rest] = coeffs.get(rest, Fraction(0)) + c
    out = [_scale(c, rest) for rest, c in coeffs.items() if c != 0]
    if constant != 0:
        out.append(Const(constant))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=lambda e: e.sort_key)
    return Sum(tuple(out))


def mul(*factors: SmoothExpr) -> SmoothExpr:
    """Canonical product: flatten, fold constants, merge powers, sort."""
    coef = Fraction(1)
    exps: dict = {}
    stack = list(factors)
    while stack:
        f = stack.pop()
        if isinstance(f, Product):
            stack.extend(f.factors)
        elif isinstance(f, Const):
            coef *= f.value
        elif isinstance(f, IntPower) and not isinstance(f.base, Const):
            exps[f.base] = exps.get(f.base, 0) + f.exponent
        else:
            exps[f] = exps.get(f, 0) + 1
    if coef == 0:
        return ZERO
    out = []
    for b, n in exps.items():
        p = power(b, n)
        if isinstance(p, Const):
            coef *= p.value
        elif isinstance(p, Product):
            # only reachable through an unfoldable constant power like 0^-1
            out.extend(p.factors)
        else:
            out.append(p)
    if coef == 0:
        return ZERO
    if not out:
        return Const(coef)
    out.sort(key=lambda e: e.sort_key)
    if coef != 1:
        out.insert(0, Const(coef))
    if len(out) == 1:
        return out[0]
    return Product(tuple(out))


def power(base: SmoothExpr, n: int) -> SmoothExpr:
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0 and n < 0:
            return IntPower(base, n)
        return Const(base.value ** n)
    if isinstance(base, IntPower) and not isinstance(base.base, Const):
        return power(base.base, base.exponent * n)
    if isinstance(base, Product):
        return mul(*(power(f, n) for f in base.factors))
    return IntPower(base, n)


def neg(e: SmoothExpr) -> SmoothExpr:
    return mul(Const(Fraction(-1)), e)


def sub(a: SmoothExpr, b: SmoothExpr) -> SmoothExpr:
    return add(a, neg(b))


def apply(name: str, arg: SmoothExpr) -> SmoothExpr:
    return Apply(name, arg)


def exp(e):
    return Apply("exp", as_expr(e))


def log(e):
    return Apply("log", as_expr(e))


def sin(e):
    return Apply("sin", as_expr(e))


def cos(e):
    return Apply("cos", as_expr(e))


def atan(e):
    return Apply("atan", as_expr(e))


def sqrt(e):
    return Apply("sqrt", as_expr(e))


def invexp(e):
    return Apply("invexp", as_expr(e))


def simplify(e: SmoothExpr) -> SmoothExpr:
    """Rebuild ``e`` bottom-up through the canonical constructors."""
    return _rebuild(e, {}, None)


def _rebuild(e, memo, leaf):
    hit = memo.get(id(e))
    if hit is not None:
        return hit[1]
    if isinstance(e, Var):
        out = leaf(e) if leaf is not None else e
    elif isinstance(e, Const):
        out = e
    elif isinstance(e, Sum):
        out = add(*(_rebuild(t, memo, leaf) for t in e.terms))
    elif isinstance(e, Product):
        out = mul(*(_rebuild(f, memo, leaf) for f in e.factors))
    elif isinstance(e, IntPower):
        out = power(_rebuild(e.base, memo, leaf), e.exponent)
    elif isinstance(e, Apply):
        out = Apply(e.name, _rebuild(e.arg, memo, leaf))
    else:
        raise TypeError(f"not a SmoothExpr: {e!r}")
    memo[id(e)] = (e, out)
    return out


def substitute(f: SmoothExpr, args: Sequence[SmoothExpr]) -> SmoothExpr:
    """Replace ``Var(i)`` by ``args[i]`` and canonicalize."""
    args = [as_expr(a) for a in args]
    if f.max_var >= len(args):
        raise ValueError(
            f"arity mismatch: expression uses x{f.max_var} but {len(args)} arguments given")
    return _rebuild(f, {}, lambda v: args[v.index])


def shift(e: SmoothExpr, offset: int) -> SmoothExpr:
    """Renumber every variable ``xi`` to ``x(i + offset)``."""
    if offset == 0 or not e.variables:
        return e
    return _rebuild(e, {}, lambda v: Var(v.index + offset))


# --- derivatives -------------------------------------------------------------

def _d_atan(u):
    return power(add(ONE, power(u, 2)), -1)


def _d_sqrt(u):
    return mul(Const(Fraction(1, 2)), power(Apply("sqrt", u), -1))


def _d_invexp(u):
    return mul(Apply("invexp", u), power(u, -2))


DERIVATIVE_RULES: dict[str, Callable[[SmoothExpr], SmoothExpr]] = {
    "exp": lambda u: Apply("exp", u),
    "log": lambda u: power(u, -1),
    "sin": lambda u: Apply("cos", u),
    "cos": lambda u: neg(Apply("sin", u)),
    "atan": _d_atan,
    "sqrt": _d_sqrt,
    "invexp": _d_invexp,
}


def differentiate(e: SmoothExpr, i: int) -> SmoothExpr:
    """Exact partial derivative with respect to ``x{i}``."""
    if i < 0:
        raise ValueError("variable index must be non-negative")
    return _diff(e, i, {})


def _diff(e, i, memo):
    if i not in e.variables:
        return ZERO
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Var):
        out = ONE
    elif isinstance(e, Sum):
        out = add(*(_diff(t, i, memo) for t in e.terms))
    elif isinstance(e, Product):
        fs = e.factors
        parts = []
        for k, f in enumerate(fs):
            df = _diff(f, i, memo)
            if df != ZERO:
                parts.append(mul(*fs[:k], df, *fs[k + 1:]))
        out = add(*parts)
    elif isinstance(e, IntPower):
        out = mul(Const(Fraction(e.exponent)), power(e.base, e.exponent - 1),
                  _diff(e.base, i, memo))
    elif isinstance(e, Apply):
        out = mul(DERIVATIVE_RULES[e.name](e.arg), _diff(e.arg, i, memo))
    else:
        raise TypeError(f"not a SmoothExpr: {e!r}")
    memo[e] = out
    return out


def gradient(e: SmoothExpr, n: int) -> list[SmoothExpr]:
    return [differentiate(e, i) for i in range(n)]


# --- numeric evaluation ------------------------------------------------------

def _invexp(u: float) -> float:
    return math.exp(-1.0 / u) if u > 0 else 0.0


def _checked(name: str, u: float) -> float:
    if name == "log":
        if not u > 0:
            raise DomainError(f"log of non-positive value {u!r}")
        return math.log(u)
    if name == "sqrt":
        if not u >= 0:
            raise DomainError(f"sqrt of negative value {u!r}")
        return math.sqrt(u)
    if name == "exp":
        try:
            return math.exp(u)
        except OverflowError:
            return math.inf
    if name == "invexp":
        return _invexp(u)
    return _SCALAR_FUNCS[name](u)


_SCALAR_FUNCS = {"sin": math.sin, "cos": math.cos, "atan": math.atan}


def _ipow(b: float, n: int) -> float:
    if n < 0 and b == 0:
        raise DomainError("negative power of zero")
    try:
        return b ** n
    except OverflowError:
        return math.inf


def evaluate(e: SmoothExpr, point: Sequence[float]) -> float:
    """Evaluate in binary64; raises DomainError outside the domain."""
    if e.max_var >= len(point):
        raise ValueError(f"point has length {len(point)} but x{e.max_var} is used")
    return _eval(e, [float(v) for v in point])


def _eval(e, p):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        return p[e.index]
    if isinstance(e, Sum):
        s = 0.0
        for t in e.terms:
            s += _eval(t, p)
        return s
    if isinstance(e, Product):
        r = 1.0
        for f, k in e.fused:
            if k is None:
                r *= _eval(f, p)
            else:
                u = _eval(f, p)
                r *= _invexp(u) * _ipow(u, k) if u > 0 else 0.0
        return r
    if isinstance(e, IntPower):
        return _ipow(_eval(e.base, p), e.exponent)
    if isinstance(e, Apply):
        return _checked(e.name, _eval(e.arg, p))
    raise TypeError(f"not a SmoothExpr: {e!r}")


def fd_gradient_check(e: SmoothExpr, point: Sequence[float], h: float = 1e-5) -> float:
    """Max over variables of |central difference - exact| / (1 + |exact|)."""
    p = [float(v) for v in point]
    worst = 0.0
    for i in range(len(p)):
        if i not in e.variables:
            continue
        hi, lo = list(p), list(p)
        hi[i] += h
        lo[i] -= h
        fd = (evaluate(e, hi) - evaluate(e, lo)) / (2 * h)
        exact = evaluate(differentiate(e, i), p)
        worst = max(worst, abs(fd - exact) / (1 + abs(exact)))
    return worst


def walk(e: SmoothExpr) -> Iterable[SmoothExpr]:
    """Pre-order traversal."""
    yield e
    for c in e.children():
        yield from walk(c)


def is_polynomial(e: SmoothExpr) -> bool:
    return all(not isinstance(n, Apply) and not (isinstance(n, IntPower) and n.exponent < 0)
               for n in walk(e))
