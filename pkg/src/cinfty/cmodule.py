"""Finitely presented modules over presented rings and cotangent modules.

A module is coker(A : C^r -> C^g) with A a g x r matrix of ring elements.
Exactness is certified only pointwise: every matrix is evaluated at an
R-point, cokernels get orthonormal bases, and induced maps between fibers
are compared by numeric rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cring import RingElement, RingMorphism, RingPresentation
from .expr import (ONE, ZERO, add, differentiate, evaluate, mul, neg, simplify,
                   substitute)
from .linalg import cokernel_basis, numeric_rank
from .points import RPoint

COMPLEX_TOL = 1e-8


def _matrix(rows) -> tuple:
    return tuple(tuple(simplify(e) for e in row) for row in rows)


@dataclass(frozen=True)
class ModulePresentation:
    ring: RingPresentation
    n_gens: int
    n_rels: int
    matrix: tuple            # n_gens rows of n_rels SmoothExprs
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.matrix) != self.n_gens or any(len(r) != self.n_rels for r in self.matrix):
            raise ValueError("presentation matrix has the wrong shape")
        for row in self.matrix:
            for e in row:
                if e.max_var >= self.ring.arity:
                    raise ValueError(f"entry {e.printed} is not an element of the ring")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(self.n_gens)))

    def entry(self, i: int, j: int) -> RingElement:
        return RingElement(self.ring, self.matrix[i][j])

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.matrix)

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        return _eval_matrix(self.matrix, self.n_gens, self.n_rels, point)

    def canonical(self) -> str:
        lines = [f"module over {self.ring.canonical()}",
                 f"gens {self.n_gens} : " + " , ".join(self.labels)]
        for j in range(self.n_rels):
            lines.append(f"rel {j} : [ " + " , ".join(e.printed for e in self.column(j)) + " ]")
        return "\n".join(lines)


@dataclass(frozen=True)
class ModuleMorphism:
    source: ModulePresentation
    target: ModulePresentation
    matrix: tuple            # target.n_gens rows of source.n_gens SmoothExprs
    status: object = field(default="unverified", compare=False)

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise ValueError("module morphism between modules over different rings")
        if len(self.matrix) != self.target.n_gens or \
                any(len(r) != self.source.n_gens for r in self.matrix):
            raise ValueError("morphism matrix has the wrong shape")

    @property
    def ring(self) -> RingPresentation:
        return self.source.ring

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        return _eval_matrix(self.matrix, self.target.n_gens, self.source.n_gens, point)

    def canonical(self) -> str:
        return "\n".join("[ " + " , ".join(e.printed for e in row) + " ]" for row in self.matrix)


def _eval_matrix(rows, g, r, point) -> np.ndarray:
    out = np.empty((g, r))
    for i, row in enumerate(rows):
        for j, e in enumerate(row):
            out[i, j] = evaluate(e, point)
    return out


# --- constructors ---------------------------------------------------------------

def module(ring: RingPresentation, columns: Sequence[Sequence], n_gens: int,
           labels: Sequence[str] = ()) -> ModulePresentation:
    """Module from relation columns (each of length ``n_gens``)."""
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(n_gens)]
    return ModulePresentation(ring, n_gens, len(columns), _matrix(rows), tuple(labels))


def free_module(ring: RingPresentation, rank: int) -> ModulePresentation:
    if rank < 0:
        raise ValueError("rank must be non-negative")
    return ModulePresentation(ring, rank, 0, tuple(() for _ in range(rank)))


def cotangent(ring: RingPresentation) -> ModulePresentation:
    """Generators dx_j, one relation column (d f / d x_j)_j per ring relation."""
    n = ring.arity
    rows = [[differentiate(f, j) for f in ring.relations] for j in range(n)]
    return ModulePresentation(ring, n, len(ring.relations), _matrix(rows),
                              tuple(f"d{name}" for name in ring.names))


def _push_rows(rows, phi: RingMorphism):
    ims = phi.image_exprs
    return _matrix([[substitute(e, ims) for e in row] for row in rows])


def pushforward(M: ModulePresentation, phi: RingMorphism) -> ModulePresentation:
    """M tensor_C D along phi : C -> D (entries pushed through phi)."""
    if M.ring != phi.source:
        raise ValueError("module ring differs from the morphism source")
    return ModulePresentation(phi.target, M.n_gens, M.n_rels, _push_rows(M.matrix, phi), M.labels)


def pushforward_morphism(f: ModuleMorphism, phi: RingMorphism) -> ModuleMorphism:
    return ModuleMorphism(pushforward(f.source, phi), pushforward(f.target, phi),
                          _push_rows(f.matrix, phi))


def cotangent_morphism(phi: RingMorphism) -> ModuleMorphism:
    """(Omega_phi)_* : pushforward(cotangent(C), phi) -> cotangent(D).

    Entry (j, i) is d(phi(x_i)) / d y_j, so dx_i maps to sum_j (...) dy_j.
    """
    C, D = phi.source, phi.target
    rows = [[differentiate(im, j) for im in phi.image_exprs] for j in range(D.arity)]
    return ModuleMorphism(pushforward(cotangent(C), phi), cotangent(D), _matrix(rows))


def direct_sum(*modules: ModulePresentation) -> ModulePresentation:
    ring = modules[0].ring
    if any(M.ring != ring for M in modules):
        raise ValueError("direct sum of modules over different rings")
    g = sum(M.n_gens for M in modules)
    r = sum(M.n_rels for M in modules)
    rows = [[ZERO] * r for _ in range(g)]
    gi = rj = 0
    for M in modules:
        for i in range(M.n_gens):
            for j in range(M.n_rels):
                rows[gi + i][rj + j] = M.matrix[i][j]
        gi += M.n_gens
        rj += M.n_rels
    labels = tuple(l for M in modules for l in M.labels)
    return ModulePresentation(ring, g, r, _matrix(rows), labels)


def compose_morphisms(g: ModuleMorphism, f: ModuleMorphism) -> ModuleMorphism:
    """g o f by symbolic matrix product."""
    if f.target != g.source:
        raise ValueError("module morphisms are not composable")
    rows = [[add(*(mul(g.matrix[i][k], f.matrix[k][j]) for k in range(f.target.n_gens)))
             for j in range(f.source.n_gens)] for i in range(g.target.n_gens)]
    return ModuleMorphism(f.source, g.target, _matrix(rows))


def identity_morphism(M: ModulePresentation) -> ModuleMorphism:
    rows = [[ONE if i == j else ZERO for j in range(M.n_gens)] for i in range(M.n_gens)]
    return ModuleMorphism(M, M, _matrix(rows))


def zero_module(ring: RingPresentation) -> ModulePresentation:
    return free_module(ring, 0)


# --- fibers ---------------------------------------------------------------------

@dataclass(frozen=True)
class Fiber:
    matrix: np.ndarray
    fiber_rank: int


def _coords(p) -> tuple:
    return p.coordinates if isinstance(p, RPoint) else tuple(p)


def fiber_at_point(M: ModulePresentation, p: RPoint) -> Fiber:
    if isinstance(p, RPoint) and p.owner != M.ring:
        raise ValueError("point belongs to a different ring")
    A = M.evaluate(_coords(p))
    return Fiber(A, M.n_gens - numeric_rank(A))


def fiber_map(f: ModuleMorphism, p) -> np.ndarray:
    """Induced linear map between the fibers of source and target at ``p``,
    in orthonormal cokernel coordinates."""
    x = _coords(p)
    Qs = cokernel_basis(f.source.evaluate(x), f.source.n_gens)
    Qt = cokernel_basis(f.target.evaluate(x), f.target.n_gens)
    return Qt.T @ f.evaluate(x) @ Qs


def well_defined_residual(f: ModuleMorphism, p) -> float:
    """max |Q_target^T B A_source|: zero iff relations map into relations at p."""
    x = _coords(p)
    Qt = cokernel_basis(f.target.evaluate(x), f.target.n_gens)
    M = Qt.T @ f.evaluate(x) @ f.source.evaluate(x)
    return float(np.abs(M).max(initial=0.0))


@dataclass(frozen=True)
class SequenceReport:
    point: tuple
    is_complex: bool
    exact_at_middle: bool
    exact_at: tuple          # one flag per checked position
    fiber_dims: tuple
    map_ranks: tuple
    complex_residual: float

    @property
    def exact(self) -> bool:
        return self.is_complex and self.exact_at_middle


def sequence_check(morphisms: Sequence[ModuleMorphism], points: Sequence, tol: float = COMPLEX_TOL,
                   left_zero: bool = False, right_zero: bool = False) -> list[SequenceReport]:
    """Pointwise complex/exactness certificate for M0 -> M1 -> ... -> Mk.

    Exactness is tested at every interior module; ``left_zero`` adds the
    position 0 -> M0 (injectivity) and ``right_zero`` adds Mk -> 0
    (surjectivity).
    """
    morphisms = list(morphisms)
    if not morphisms:
        raise ValueError("empty chain")
    for a, b in zip(morphisms, morphisms[1:]):
        if a.target != b.source:
            raise ValueError("chain is not composable")
    reports = []
    for p in points:
        maps = [fiber_map(f, p) for f in morphisms]
        dims = [maps[0].shape[1]] + [F.shape[0] for F in maps]
        ranks = [numeric_rank(F) for F in maps]
        resid = 0.0
        for F, G in zip(maps, maps[1:]):
            resid = max(resid, float(np.abs(G @ F).max(initial=0.0)))
        flags = []
        if left_zero:
            flags.append(ranks[0] == dims[0])
        for i in range(1, len(maps)):
            flags.append(dims[i] - ranks[i] == ranks[i - 1])
        if right_zero:
            flags.append(ranks[-1] == dims[-1])
        reports.append(SequenceReport(_coords(p), resid <= tol, all(flags), tuple(flags),
                                      tuple(dims), tuple(ranks), resid))
    return reports


def pushout_cotangent_sequence(phi: RingMorphism, psi: RingMorphism, pushout_data):
    """The two maps Omega_C (x) F -> (Omega_D (x) F) + (Omega_E (x) F) -> Omega_F.

    The first map is ((Omega_phi)_*, -(Omega_psi)_*); the sign on the second
    block is what makes the composite vanish.
    """
    F, gamma, delta = pushout_data
    if gamma.source != phi.target or delta.source != psi.target or \
            gamma.target != F or delta.target != F or phi.source != psi.source:
        raise ValueError("inconsistent pushout data")
    a_part = pushforward_morphism(cotangent_morphism(phi), gamma)
    b_part = pushforward_morphism(cotangent_morphism(psi), delta)
    M0 = a_part.source
    M1 = direct_sum(a_part.target, b_part.target)
    first_rows = [list(r) for r in a_part.matrix] + [[neg(e) for e in r] for r in b_part.matrix]
    first = ModuleMorphism(M0, M1, _matrix(first_rows))
    c_part = cotangent_morphism(gamma)
    d_part = cotangent_morphism(delta)
    second_rows = [list(rc) + list(rd) for rc, rd in zip(c_part.matrix, d_part.matrix)]
    second = ModuleMorphism(M1, cotangent(F), _matrix(second_rows))
    return first, second
