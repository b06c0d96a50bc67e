"""Embedded manifolds, smooth maps and fibre products as ring pushouts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cring import (PushoutResult, RingMorphism, RingPresentation, free_ring,
                    localize, make_ring, pushout)
from .expr import Var, differentiate, evaluate, simplify
from .linalg import kernel_basis, numeric_rank
from .parser import parse
from .points import RPoint, SearchParams, relation_residual


@dataclass(frozen=True)
class ManifoldPresentation:
    ring: RingPresentation
    dim: int
    name: str = field(default="", compare=False)

    @property
    def arity(self) -> int:
        return self.ring.arity

    def jacobian(self, x: Sequence[float]) -> np.ndarray:
        rels = self.ring.relations
        J = np.empty((len(rels), self.arity))
        for i, f in enumerate(rels):
            for j in range(self.arity):
                J[i, j] = evaluate(differentiate(f, j), x)
        return J

    def tangent_basis(self, x: Sequence[float]) -> np.ndarray:
        """Columns spanning the numeric kernel of the relation Jacobian at x."""
        return kernel_basis(self.jacobian(x))

    def points(self, search: SearchParams = SearchParams()) -> list[RPoint]:
        return search.search(self.ring)


@dataclass(frozen=True)
class SmoothMap:
    source: ManifoldPresentation
    target: ManifoldPresentation
    components: tuple

    def __post_init__(self):
        comps = tuple(simplify(parse(c, self.source.arity) if isinstance(c, str) else c)
                      for c in self.components)
        if len(comps) != self.target.arity:
            raise ValueError(f"need {self.target.arity} components, got {len(comps)}")
        for c in comps:
            if c.max_var >= self.source.arity:
                raise ValueError(f"component {c.printed} uses variables outside the source")
        object.__setattr__(self, "components", comps)

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return np.array([evaluate(c, x) for c in self.components], dtype=float)

    def jacobian(self, x: Sequence[float]) -> np.ndarray:
        J = np.empty((self.target.arity, self.source.arity))
        for i, c in enumerate(self.components):
            for j in range(self.source.arity):
                J[i, j] = evaluate(differentiate(c, j), x)
        return J


# --- catalogue --------------------------------------------------------------------

def euclidean(n: int) -> ManifoldPresentation:
    return ManifoldPresentation(free_ring(n), n, f"euclidean({n})")


def sphere(n: int) -> ManifoldPresentation:
    rel = " + ".join(f"x{i}^2" for i in range(n + 1)) + " - 1"
    return ManifoldPresentation(make_ring(n + 1, [rel]), n, f"sphere({n})")


def circle() -> ManifoldPresentation:
    return ManifoldPresentation(sphere(1).ring, 1, "circle")


def torus2() -> ManifoldPresentation:
    ring = make_ring(4, ["x0^2 + x1^2 - 1", "x2^2 + x3^2 - 1"])
    return ManifoldPresentation(ring, 2, "torus2")


def open_subset(n: int, f) -> ManifoldPresentation:
    """{f != 0} in R^n through its characteristic-function ring."""
    R = free_ring(n)
    L, _ = localize(R, R.element(f))
    return ManifoldPresentation(L, n, f"open_subset({n}, {L.relations[-1].printed})")


def point() -> ManifoldPresentation:
    return ManifoldPresentation(free_ring(0), 0, "point")


def from_ring(ring: RingPresentation, dim: int, name: str = "") -> ManifoldPresentation:
    return ManifoldPresentation(ring, dim, name)


STDLIB = {"euclidean": euclidean, "sphere": sphere, "circle": circle, "torus2": torus2,
          "open_subset": open_subset, "point": point}


def stdlib(name: str, *params) -> ManifoldPresentation:
    try:
        factory = STDLIB[name]
    except KeyError:
        raise ValueError(f"unknown manifold {name!r}; known: {', '.join(sorted(STDLIB))}") from None
    return factory(*params)


# --- maps and checks ------------------------------------------------------------

def smooth_map(source: ManifoldPresentation, target: ManifoldPresentation,
               components: Sequence) -> SmoothMap:
    return SmoothMap(source, target, tuple(components))


def identity_map(M: ManifoldPresentation) -> SmoothMap:
    return SmoothMap(M, M, tuple(Var(i) for i in range(M.arity)))


def ring_morphism_of_map(h: SmoothMap) -> RingMorphism:
    """h^* : C(target) -> C(source), c |-> c o h."""
    return RingMorphism(h.target.ring, h.source.ring, h.components)


@dataclass(frozen=True)
class RegularityReport:
    checked: int
    ranks: tuple
    expected: int

    @property
    def passed(self) -> bool:
        return self.checked > 0 and all(r == self.expected for r in self.ranks)


def regularity_check(M: ManifoldPresentation, points: Sequence[RPoint]) -> RegularityReport:
    """Relation Jacobian rank equals arity - dim at each point."""
    ranks = tuple(numeric_rank(M.jacobian(p.coordinates)) if M.ring.relations else 0
                  for p in points)
    return RegularityReport(len(ranks), ranks, M.arity - M.dim)


def map_check(h: SmoothMap, points: Sequence[RPoint], tol: float = 1e-9) -> float:
    """Largest target-relation residual over images of source points."""
    worst = 0.0
    for p in points:
        worst = max(worst, relation_residual(h.target.ring, h(p.coordinates)))
    return worst


@dataclass(frozen=True)
class TransverseReport:
    is_common: bool
    spans: bool
    gap: float
    rank: int
    target_dim: int


def transverse_check(g: SmoothMap, h: SmoothMap, x: RPoint, y: RPoint,
                     tol: float = 1e-9) -> TransverseReport:
    """Do g and h meet at (x, y), and do dg(T_x X) + dh(T_y Y) span T_z Z?"""
    if g.target != h.target:
        raise ValueError("maps have different targets")
    xc, yc = x.coordinates, y.coordinates
    gz, hz = g(xc), h(yc)
    gap = float(np.abs(gz - hz).max(initial=0.0))
    Z = g.target
    TX = g.source.tangent_basis(xc)
    TY = h.source.tangent_basis(yc)
    TZ = Z.tangent_basis(gz)
    span = np.hstack([g.jacobian(xc) @ TX, h.jacobian(yc) @ TY])
    # measure inside T_z Z so that numeric noise normal to Z is ignored
    rank = numeric_rank(TZ.T @ span) if span.size else 0
    dim_z = TZ.shape[1]
    return TransverseReport(gap <= tol, rank == dim_z, gap, rank, dim_z)


@dataclass(frozen=True)
class FibreProduct:
    manifold: ManifoldPresentation
    first: SmoothMap          # W -> X
    second: SmoothMap         # W -> Y
    pushout: PushoutResult
    g: SmoothMap
    h: SmoothMap


def fibre_product(g: SmoothMap, h: SmoothMap, name: str = "") -> FibreProduct:
    """X x_Z Y with ring the pushout of g^* and h^*; transversality is not checked."""
    if g.target != h.target:
        raise ValueError("maps have different targets")
    X, Y, Z = g.source, h.source, g.target
    po = pushout(ring_morphism_of_map(g), ring_morphism_of_map(h))
    W = ManifoldPresentation(po.ring, X.dim + Y.dim - Z.dim,
                             name or f"({X.name} x_{Z.name} {Y.name})")
    m = X.arity
    first = SmoothMap(W, X, tuple(Var(i) for i in range(m)))
    second = SmoothMap(W, Y, tuple(Var(m + i) for i in range(Y.arity)))
    return FibreProduct(W, first, second, po, g, h)


def cotangent_sequence(fp: FibreProduct):
    """The pushout cotangent sequence of a fibre product (two module maps over W)."""
    from .cmodule import pushout_cotangent_sequence
    return pushout_cotangent_sequence(ring_morphism_of_map(fp.g), ring_morphism_of_map(fp.h),
                                      fp.pushout)


def matched_pairs(g: SmoothMap, h: SmoothMap, xs: Sequence[RPoint], ys: Sequence[RPoint],
                  tol: float = 1e-6) -> list[tuple]:
    """Brute-force pairs (x, y) with |g(x) - h(y)| <= tol."""
    gx = [g(x.coordinates) for x in xs]
    hy = [h(y.coordinates) for y in ys]
    out = []
    for x, a in zip(xs, gx):
        for y, b in zip(ys, hy):
            if np.abs(a - b).max(initial=0.0) <= tol:
                out.append(tuple(x.coordinates) + tuple(y.coordinates))
    return out
