"""Finite linear group actions on presentations and quotient-stack data.

Actions are linear on generators with rational matrices, so invariant
theory stays exact.  Everything that touches R-points (stabilizers,
orbits, groupoid axioms, cocycles) is a sampled numerical check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cmodule import ModulePresentation, cotangent, cotangent_morphism
from .cring import Provenance, RingMorphism, RingPresentation, free_ring, make_ring
from .expr import Const, SmoothExpr, Var, add, evaluate, mul, simplify, substitute
from .geom import SmoothMap, fibre_product
from .linalg import cokernel_basis, in_span_q, nullspace_q, solve_q
from .parser import parse
from .points import (CLUSTER_RADIUS, CheckReport, RPoint, SearchParams, morphism_check,
                     spread)
from .poly import NotPolynomial, from_poly, monomials, poly_add, poly_mul, to_poly


# --- groups -----------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table (``table[a][b] = a*b``)."""
    table: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        t = tuple(tuple(int(x) for x in row) for row in self.table)
        n = len(t)
        if n == 0:
            raise ValueError("a group has at least one element")
        if any(len(row) != n for row in t) or any(not 0 <= x < n for row in t for x in row):
            raise ValueError("multiplication table must be square with entries in range")
        ids = [e for e in range(n) if all(t[e][g] == g and t[g][e] == g for g in range(n))]
        if not ids:
            raise ValueError("table has no identity element")
        e = ids[0]
        for a in range(n):
            if not any(t[a][b] == e for b in range(n)):
                raise ValueError(f"element {a} has no inverse")
            for b in range(n):
                for c in range(n):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        raise ValueError(f"table is not associative at ({a}, {b}, {c})")
        object.__setattr__(self, "table", t)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        n = self.order
        return next(e for e in range(n) if all(self.table[e][g] == g for g in range(n)))

    @property
    def inverse(self) -> tuple:
        e = self.identity
        return tuple(next(b for b in range(self.order) if self.table[a][b] == e)
                     for a in range(self.order))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def is_subgroup(self, elems) -> bool:
        s = set(elems)
        inv = self.inverse
        return self.identity in s and all(self.table[a][b] in s for a in s for b in s) \
            and all(inv[a] in s for a in s)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z{n}")


def trivial_group() -> FiniteGroup:
    return cyclic(1)


def direct_product(A: FiniteGroup, B: FiniteGroup) -> FiniteGroup:
    """Element (a, b) has index a * |B| + b."""
    nb = B.order
    n = A.order * nb
    table = tuple(tuple(A.table[x // nb][y // nb] * nb + B.table[x % nb][y % nb]
                        for y in range(n)) for x in range(n))
    return FiniteGroup(table, f"{A.name}x{B.name}")


def check_homomorphism(rho: Sequence[int], F: FiniteGroup, H: FiniteGroup) -> bool:
    return len(rho) == F.order and all(
        rho[F.table[a][b]] == H.table[rho[a]][rho[b]]
        for a in range(F.order) for b in range(F.order))


# --- linear actions ---------------------------------------------------------------

def _frac_matrix(M, n) -> tuple:
    rows = tuple(tuple(Fraction(x) for x in row) for row in M)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"action matrices must be {n}x{n}")
    return rows


def _matmul_q(A, B):
    n = len(A)
    return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(n)), Fraction(0))
                       for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class LinearAction:
    """gamma acts on points by p -> M_gamma p; on functions by f -> f o M_gamma."""
    group: FiniteGroup
    arity: int
    matrices: tuple

    def __post_init__(self):
        mats = tuple(_frac_matrix(M, self.arity) for M in self.matrices)
        if len(mats) != self.group.order:
            raise ValueError("need one matrix per group element")
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(self.arity))
                      for i in range(self.arity))
        if mats[self.group.identity] != ident:
            raise ValueError("the identity element must act by the identity matrix")
        for a in range(self.group.order):
            for b in range(self.group.order):
                if mats[self.group.table[a][b]] != _matmul_q(mats[a], mats[b]):
                    raise ValueError(f"not a representation: M[{a}*{b}] != M[{a}] M[{b}]")
        object.__setattr__(self, "matrices", mats)

    def float_matrix(self, g: int) -> np.ndarray:
        return np.array(self.matrices[g], dtype=float).reshape(self.arity, self.arity)

    def act(self, g: int, p: Sequence[float]) -> np.ndarray:
        return self.float_matrix(g) @ np.asarray(p, dtype=float).reshape(self.arity)

    def images(self, g: int) -> tuple:
        """The coordinate functions (M_g x)_i."""
        return tuple(add(*(mul(Const(c), Var(j)) for j, c in enumerate(row) if c))
                     for row in self.matrices[g])

    def compose_with(self, f: SmoothExpr, g: int) -> SmoothExpr:
        return substitute(f, self.images(g))


def linear_action(group: FiniteGroup, matrices: Sequence) -> LinearAction:
    arity = len(matrices[0]) if matrices else 0
    return LinearAction(group, arity, tuple(matrices))


def sign_action() -> LinearAction:
    """Z2 acting on R by x -> -x."""
    return linear_action(cyclic(2), [[[1]], [[-1]]])


def swap_action() -> LinearAction:
    return linear_action(cyclic(2), [[[1, 0], [0, 1]], [[0, 1], [1, 0]]])


def reflection_action() -> LinearAction:
    """Z2 acting on R^2 by (x0, x1) -> (x0, -x1)."""
    return linear_action(cyclic(2), [[[1, 0], [0, 1]], [[1, 0], [0, -1]]])


def rotation4_action() -> LinearAction:
    """Z4 acting on R^2 by quarter turns."""
    r = ((0, -1), (1, 0))
    mats = [((1, 0), (0, 1))]
    for _ in range(3):
        mats.append(_matmul_q(_frac_matrix(r, 2), _frac_matrix(mats[-1], 2)))
    return linear_action(cyclic(4), mats)


def trivial_action(group: FiniteGroup, arity: int) -> LinearAction:
    ident = [[int(i == j) for j in range(arity)] for i in range(arity)]
    return LinearAction(group, arity, tuple(ident for _ in range(group.order)))


def action_morphism(action: LinearAction, ring: RingPresentation, g: int) -> RingMorphism:
    """gamma^* : U -> U, x_i -> (M_gamma x)_i."""
    return RingMorphism(ring, ring, action.images(g))


# --- quotient stacks ------------------------------------------------------------

@dataclass(frozen=True)
class QuotientStackDesc:
    ring: RingPresentation
    action: LinearAction
    status: CheckReport = field(compare=False)

    @property
    def group(self) -> FiniteGroup:
        return self.action.group


def quotient_stack(ring: RingPresentation, action: LinearAction,
                   search: SearchParams = SearchParams(), n_points: Optional[int] = 20,
                   tol: float = 1e-9) -> QuotientStackDesc:
    """Record whether every relation composed with every gamma vanishes on sampled points."""
    if action.arity != ring.arity:
        raise ValueError(f"action arity {action.arity} differs from ring arity {ring.arity}")
    worst, checked, verdict, witness = 0.0, 0, "pass", None
    for g in range(action.group.order):
        if not ring.relations:
            break
        phi = action_morphism(action, ring, g)
        rep = morphism_check(phi, n_points, search, tol)
        checked = max(checked, rep.checked)
        if rep.verdict == "fail":
            verdict, witness = "fail", rep.witness
        elif rep.verdict == "inconclusive" and verdict == "pass":
            verdict = "inconclusive"
        if rep.max_residual == rep.max_residual:
            worst = max(worst, rep.max_residual)
    return QuotientStackDesc(ring, action, CheckReport(verdict, checked, worst, tol, witness))


def _require_pass(desc: QuotientStackDesc):
    if desc.status.verdict == "fail":
        raise ValueError("relations are not stable under the group action "
                         f"(residual {desc.status.max_residual:.3g})")


# --- invariant theory -----------------------------------------------------------

def _reynolds_poly(f: SmoothExpr, action: LinearAction) -> dict:
    n = action.arity
    total: dict = {}
    for g in range(action.group.order):
        total = poly_add(total, to_poly(action.compose_with(f, g), n))
    scale = Fraction(1, action.group.order)
    return {m: c * scale for m, c in total.items() if c}


def reynolds(f, action: LinearAction) -> SmoothExpr:
    """(1/|G|) sum_gamma f o gamma; expanded exactly when f is a polynomial."""
    if isinstance(f, str):
        f = parse(f, action.arity)
    try:
        return from_poly(_reynolds_poly(f, action))
    except NotPolynomial:
        parts = [action.compose_with(f, g) for g in range(action.group.order)]
        return simplify(mul(Const(Fraction(1, action.group.order)), add(*parts)))


def _vector(p: dict, basis: Sequence[tuple]) -> list:
    return [Fraction(p.get(m, 0)) for m in basis]


def _weighted(weights: Sequence[int], total: int) -> list:
    """Exponent tuples e with sum e_i * weights_i == total, descending."""
    out = []

    def rec(i, left, acc):
        if i == len(weights):
            if left == 0:
                out.append(tuple(acc))
            return
        for k in range(left // weights[i], -1, -1):
            rec(i + 1, left - k * weights[i], acc + [k])

    if weights:
        rec(0, total, [])
    elif total == 0:
        out.append(())
    return out


def _poly_power_product(polys: Sequence[dict], exps: Sequence[int], n: int) -> dict:
    out = {(0,) * n: Fraction(1)}
    for p, k in zip(polys, exps):
        for _ in range(k):
            out = poly_mul(out, p)
    return out


def _normalize(p: dict, basis) -> dict:
    lead = next(p[m] for m in basis if p.get(m))
    return {m: c / lead for m, c in p.items()}


def _invariant_polys(action: LinearAction, degree_bound: int) -> list[dict]:
    n = action.arity
    kept: list[dict] = []
    for d in range(1, degree_bound + 1):
        basis = monomials(n, d)
        if not basis:
            continue
        weights = [sum(next(iter(p))) for p in kept]
        span = [_vector(_poly_power_product(kept, e, n), basis) for e in _weighted(weights, d)]
        for m in basis:
            x = from_poly({m: Fraction(1)})
            r = _reynolds_poly(x, action)
            if not r:
                continue
            v = _vector(r, basis)
            if in_span_q(span, v):
                continue
            span.append(v)
            kept.append(_normalize(r, basis))
    return kept


def invariant_generators(action: LinearAction, degree_bound: Optional[int] = None) -> list[SmoothExpr]:
    """Homogeneous polynomial invariants generating the invariants up to ``degree_bound``.

    Degree by degree, the Reynolds image of each monomial is kept only when it
    is not in the span of products of generators kept so far.
    """
    bound = action.group.order if degree_bound is None else degree_bound
    if bound < 1:
        raise ValueError("degree_bound must be at least 1")
    polys = _invariant_polys(action, bound)
    exprs = [from_poly(p) for p in polys]
    return sorted(exprs, key=lambda e: (_degree(e, action.arity), e.printed))


def _degree(e: SmoothExpr, n: int) -> int:
    return max(sum(m) for m in to_poly(e, n))


@dataclass(frozen=True)
class CoarseModuli:
    ring: RingPresentation
    generators: tuple        # p_i as expressions over the original generators
    annotations: tuple       # relations that could not be rewritten
    degree_bound: int

    def image(self, point: Sequence[float]) -> tuple:
        return tuple(float(evaluate(p, point)) for p in self.generators)


def coarse_moduli(desc: QuotientStackDesc, degree_bound: Optional[int] = None) -> CoarseModuli:
    """Invariant generators, bounded-degree syzygies and rewritten relations."""
    _require_pass(desc)
    action = desc.action
    n = action.arity
    bound = action.group.order if degree_bound is None else degree_bound
    gens = invariant_generators(action, bound) if n else []
    polys = [to_poly(p, n) for p in gens]
    weights = [_degree(p, n) for p in gens]
    l = len(gens)

    def products(d):
        monos = _weighted(weights, d)
        return monos, [_poly_power_product(polys, e, n) for e in monos]

    rels: list[SmoothExpr] = []
    syzygies: list[tuple] = []                 # (weight, {y-exponent: coefficient})
    for D in range(1, 2 * bound + 1):
        ymonos, prods = products(D)
        if len(ymonos) < 2:
            continue
        xbasis = monomials(n, D)
        rows = [[Fraction(p.get(m, 0)) for p in prods] for m in xbasis]
        null = nullspace_q(rows, len(ymonos))
        span = []
        for w, s in syzygies:
            for e in _weighted(weights, D - w):
                shifted = {tuple(a + b for a, b in zip(k, e)): c for k, c in s.items()}
                span.append(_vector(shifted, ymonos))
        for v in null:
            if in_span_q(span, v):
                continue
            span.append(v)
            s = _normalize({m: c for m, c in zip(ymonos, v) if c}, ymonos)
            syzygies.append((D, s))
            rels.append(from_poly(s))

    annotations = []
    for r in desc.ring.relations:
        try:
            avg = _reynolds_poly(r, action)
        except NotPolynomial:
            annotations.append(r)
            continue
        if not avg:
            annotations.append(r)
            continue
        rewritten: dict = {}
        for d in sorted({sum(m) for m in avg}):
            part = {m: c for m, c in avg.items() if sum(m) == d}
            if d == 0:
                rewritten[(0,) * l] = part[(0,) * n]
                continue
            ymonos, prods = products(d)
            xbasis = monomials(n, d)
            sol = solve_q([_vector(p, xbasis) for p in prods], _vector(part, xbasis)) \
                if ymonos else None
            if sol is None:
                rewritten = None
                break
            for m, c in zip(ymonos, sol):
                if c:
                    rewritten[m] = rewritten.get(m, 0) + c
        if rewritten is None:
            annotations.append(r)
        elif rewritten:
            rels.append(from_poly(rewritten))
    unique = list(dict.fromkeys(simplify(r) for r in rels))
    ring = make_ring(l, unique, Provenance.INVARIANTS)
    return CoarseModuli(ring, tuple(gens), tuple(annotations), bound)


# --- points ---------------------------------------------------------------------

def _coords(p) -> np.ndarray:
    return np.asarray(p.coordinates if isinstance(p, RPoint) else p, dtype=float)


def stabilizer(desc: QuotientStackDesc, p, tol: float = CLUSTER_RADIUS) -> tuple:
    x = _coords(p)
    out = tuple(g for g in range(desc.group.order)
                if np.abs(desc.action.act(g, x) - x).max(initial=0.0) <= tol)
    assert desc.group.is_subgroup(out), "stabilizer is not a subgroup"
    return out


def orbit_space(desc: QuotientStackDesc, points: Sequence, tol: float = CLUSTER_RADIUS) -> list[tuple]:
    """Partition ``points`` into orbits; each orbit is sorted, orbits sorted by representative."""
    X = [_coords(p) for p in points]
    parent = list(range(len(X)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, x in enumerate(X):
        for g in range(desc.group.order):
            y = desc.action.act(g, x)
            for j, z in enumerate(X):
                if np.abs(y - z).max(initial=0.0) <= tol:
                    a, b = find(i), find(j)
                    if a != b:
                        parent[max(a, b)] = min(a, b)
    classes: dict = {}
    for i, x in enumerate(X):
        classes.setdefault(find(i), []).append(tuple(float(v) + 0.0 for v in x))
    orbits = [tuple(sorted(c)) for c in classes.values()]
    return sorted(orbits)


# --- action groupoid ------------------------------------------------------------

@dataclass(frozen=True)
class GroupoidDesc:
    """V = G x U as |G| tagged copies of U; elements are (tag, point) pairs."""
    desc: QuotientStackDesc

    @property
    def objects(self) -> RingPresentation:
        return self.desc.ring

    @property
    def tags(self) -> tuple:
        return tuple(range(self.desc.group.order))

    def s(self, v):
        return v[1]

    def t(self, v):
        return self.desc.action.act(v[0], v[1])

    def u(self, x):
        return (self.desc.group.identity, np.asarray(x, dtype=float))

    def i(self, v):
        return (self.desc.group.inverse[v[0]], self.t(v))

    def m(self, v1, v2):
        """(delta, gamma u) o (gamma, u) = (delta gamma, u); requires s(v1) = t(v2)."""
        return (self.desc.group.mul(v1[0], v2[0]), v2[1])

    def source_morphism(self, tag: int) -> RingMorphism:
        return RingMorphism(self.objects, self.objects, tuple(Var(j) for j in range(self.objects.arity)))

    def target_morphism(self, tag: int) -> RingMorphism:
        return action_morphism(self.desc.action, self.objects, tag)


def groupoid_from_action(desc: QuotientStackDesc) -> GroupoidDesc:
    _require_pass(desc)
    return GroupoidDesc(desc)


GROUPOID_IDENTITIES = ("s.u=id", "t.u=id", "s.i=t", "t.i=s", "s.m=s.pi2", "t.m=t.pi1",
                       "m.(i,id)=u.s", "m.(id,i)=u.t", "assoc", "unit")


@dataclass(frozen=True)
class GroupoidReport:
    residuals: dict
    checked: int
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _pdist(a, b) -> float:
    return float(np.abs(np.asarray(a, float) - np.asarray(b, float)).max(initial=0.0))


def _vdist(v, w) -> float:
    return _pdist(v[1], w[1]) if v[0] == w[0] else float("inf")


def groupoid_check(gd: GroupoidDesc, points: Sequence, tol: float = 1e-12) -> GroupoidReport:
    """Evaluate every groupoid identity on all tags over the sampled objects."""
    res = dict.fromkeys(GROUPOID_IDENTITIES, 0.0)

    def bump(key, value):
        res[key] = max(res[key], value)

    def compose(v1, v2):
        gap = _pdist(gd.s(v1), gd.t(v2))
        if gap > tol:
            raise ValueError(f"composability violated by {gap:.3g}")
        return gd.m(v1, v2)

    tags = gd.tags
    for p in points:
        x = _coords(p)
        bump("s.u=id", _pdist(gd.s(gd.u(x)), x))
        bump("t.u=id", _pdist(gd.t(gd.u(x)), x))
        for g in tags:
            v = (g, x)
            bump("s.i=t", _pdist(gd.s(gd.i(v)), gd.t(v)))
            bump("t.i=s", _pdist(gd.t(gd.i(v)), gd.s(v)))
            bump("m.(i,id)=u.s", _vdist(compose(gd.i(v), v), gd.u(gd.s(v))))
            bump("m.(id,i)=u.t", _vdist(compose(v, gd.i(v)), gd.u(gd.t(v))))
            bump("unit", max(_vdist(compose(v, gd.u(gd.s(v))), v),
                             _vdist(compose(gd.u(gd.t(v)), v), v)))
            for d in tags:
                w = (d, gd.t(v))
                vw = compose(w, v)
                bump("s.m=s.pi2", _pdist(gd.s(vw), gd.s(v)))
                bump("t.m=t.pi1", _pdist(gd.t(vw), gd.t(w)))
                for e in tags:
                    z = (e, gd.t(w))
                    bump("assoc", _vdist(compose(compose(z, w), v), compose(z, compose(w, v))))
    return GroupoidReport(res, len(points), tol)


# --- stack fibre products ----------------------------------------------------------

@dataclass(frozen=True)
class EquivariantMap:
    """A SmoothMap X -> Z together with actions on X, Z and a homomorphism rho."""
    map: SmoothMap
    source_action: LinearAction
    target_action: LinearAction
    rho: tuple


def equivariance_residual(f: EquivariantMap, points: Sequence) -> float:
    """max |f(gamma x) - rho(gamma) f(x)| over sampled x and all gamma."""
    if not check_homomorphism(f.rho, f.source_action.group, f.target_action.group):
        raise ValueError("rho is not a group homomorphism")
    worst = 0.0
    for p in points:
        x = _coords(p)
        fx = f.map(x)
        for g in range(f.source_action.group.order):
            lhs = f.map(f.source_action.act(g, x))
            rhs = f.target_action.act(f.rho[g], fx)
            worst = max(worst, _pdist(lhs, rhs))
    return worst


@dataclass(frozen=True)
class StackFibreProduct:
    components: tuple        # (eta, FibreProduct) per element of H
    group: FiniteGroup       # F x G
    g: EquivariantMap
    h: EquivariantMap

    def tag_action(self, fk: int, eta: int) -> int:
        """(f, k) . eta = rho(f) eta sigma(k)^-1."""
        H = self.g.target_action.group
        nG = self.h.source_action.group.order
        f, k = divmod(fk, nG)
        return H.mul(H.mul(self.g.rho[f], eta), H.inverse[self.h.rho[k]])

    def act(self, fk: int, eta: int, point: Sequence[float]):
        nG = self.h.source_action.group.order
        f, k = divmod(fk, nG)
        m = self.g.map.source.arity
        x = self.g.source_action.act(f, point[:m])
        y = self.h.source_action.act(k, point[m:])
        return self.tag_action(fk, eta), np.concatenate([x, y])

    def points(self, search: SearchParams = SearchParams()) -> list[tuple]:
        out = []
        for eta, fp in self.components:
            out.extend((eta, p) for p in fp.manifold.points(search))
        return out


def stack_fibre_product(g: EquivariantMap, h: EquivariantMap,
                        search: SearchParams = SearchParams(), n_points: Optional[int] = 20,
                        tol: float = 1e-9) -> StackFibreProduct:
    """[X/F] x_[Z/H] [Y/G] = [W/(F x G)] with W the union over eta of X x_{g, Z, eta h} Y."""
    if g.target_action != h.target_action or g.map.target != h.map.target:
        raise ValueError("maps must share the target quotient [Z/H]")
    for f in (g, h):
        pts = spread(f.map.source.points(search), n_points)
        r = equivariance_residual(f, pts)
        if r > tol:
            raise ValueError(f"map is not equivariant (residual {r:.3g})")
    H = g.target_action.group
    Z = g.map.target
    comps = []
    for eta in range(H.order):
        M = g.target_action.images(eta)
        twisted = SmoothMap(h.map.source, Z,
                            tuple(substitute(e, h.map.components) for e in M))
        comps.append((eta, fibre_product(g.map, twisted)))
    group = direct_product(g.source_action.group, h.source_action.group)
    return StackFibreProduct(tuple(comps), group, g, h)


# --- equivariant modules ----------------------------------------------------------

@dataclass(frozen=True)
class EquivariantModule:
    """A module with lifts Phi_gamma(p) : E_p -> E_{gamma p} as square generator matrices."""
    base: ModulePresentation
    action: LinearAction
    lifts: tuple

    def __post_init__(self):
        n, k = self.base.n_gens, self.base.ring.arity
        if self.action.arity != k:
            raise ValueError("action arity differs from the module's ring")
        if len(self.lifts) != self.action.group.order:
            raise ValueError("need one lift per group element")
        lifts = []
        for L in self.lifts:
            rows = tuple(tuple(simplify(parse(e, k) if isinstance(e, str) else
                                        Const(e) if isinstance(e, (int, Fraction)) else e)
                               for e in row) for row in L)
            if len(rows) != n or any(len(r) != n for r in rows):
                raise ValueError(f"lifts must be {n}x{n}")
            lifts.append(rows)
        object.__setattr__(self, "lifts", tuple(lifts))

    def lift_at(self, g: int, x: Sequence[float]) -> np.ndarray:
        n = self.base.n_gens
        out = np.empty((n, n))
        for i, row in enumerate(self.lifts[g]):
            for j, e in enumerate(row):
                out[i, j] = evaluate(e, x)
        return out


@dataclass(frozen=True)
class CocycleReport:
    passed: bool
    checked: int
    max_residual: float
    tol: float
    witness: Optional[tuple] = None


def equivariant_module_check(E: EquivariantModule, points: Sequence, tol: float = 1e-10) -> CocycleReport:
    """Phi_{gamma delta}(p) = Phi_gamma(delta p) Phi_delta(p) on fibers, every pair, every point."""
    G = E.action.group
    n = E.base.n_gens
    worst, witness = 0.0, None

    def Q(x):
        return cokernel_basis(E.base.evaluate(x), n)

    pts = list(points)
    for p in pts:
        x = _coords(p)
        Qx = Q(x)
        for d in range(G.order):
            dx = E.action.act(d, x)
            Qd = Q(dx)
            right = Qd @ (Qd.T @ E.lift_at(d, x) @ Qx)
            for g in range(G.order):
                gdx = E.action.act(g, dx)
                Qgd = Q(gdx)
                lhs = Qgd.T @ E.lift_at(G.mul(g, d), x) @ Qx
                rhs = Qgd.T @ E.lift_at(g, dx) @ right
                r = float(np.abs(lhs - rhs).max(initial=0.0))
                if r > worst:
                    worst, witness = r, (g, d, tuple(float(v) for v in x))
    passed = bool(pts) and worst <= tol
    return CocycleReport(passed, len(pts), worst, tol, None if passed else witness)


def equivariant_cotangent(desc: QuotientStackDesc) -> EquivariantModule:
    """Omega_U with Phi_gamma the cotangent morphism of gamma^-1, i.e. M_{gamma^-1}^T."""
    _require_pass(desc)
    U = desc.ring
    inv = desc.group.inverse
    lifts = tuple(cotangent_morphism(action_morphism(desc.action, U, inv[g])).matrix
                  for g in range(desc.group.order))
    return EquivariantModule(cotangent(U), desc.action, lifts)


def point_representation(group: FiniteGroup, matrices: Sequence) -> EquivariantModule:
    """A module over [*/G]: a vector space with one matrix per group element."""
    from .cmodule import free_module
    pt = free_ring(0)
    dim = len(matrices[0])
    return EquivariantModule(free_module(pt, dim), trivial_action(group, 0), tuple(matrices))
