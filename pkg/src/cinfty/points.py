"""R-points of presentations: admission, numerical search and sampled checks.

Everything here is a necessary-condition test.  Ideal membership in a
finitely generated C-infinity ideal is not decidable, so element equality
and morphism well-definedness are only ever certified at found R-points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .cring import RingElement, RingMorphism, RingPresentation
from .expr import DomainError, evaluate, substitute
from .program import JacobianProgram

ACCEPT_TOL = 1e-9
NEWTON_TOL = 1e-12
CLUSTER_RADIUS = 1e-6


@dataclass(frozen=True)
class RPoint:
    owner: RingPresentation
    coordinates: tuple
    residual: float

    def __post_init__(self):
        if len(self.coordinates) != self.owner.arity:
            raise ValueError("coordinate count differs from ring arity")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coordinates, dtype=float)


def relation_residual(ring: RingPresentation, p: Sequence[float]) -> float:
    """max |relation(p)|; 0 for a free ring.  Raises DomainError."""
    return max((abs(evaluate(r, p)) for r in ring.relations), default=0.0)


def r_point_status(ring: RingPresentation, p: Sequence[float], tol: float = ACCEPT_TOL):
    """Return ``(RPoint or None, reason)`` with reason in {"ok", "residual", "domain"}."""
    if len(p) != ring.arity:
        raise ValueError(f"point has {len(p)} coordinates, ring arity is {ring.arity}")
    try:
        res = relation_residual(ring, p)
    except DomainError:
        return None, "domain"
    if not res <= tol:
        return None, "residual"
    return RPoint(ring, tuple(float(v) for v in p), res), "ok"


def is_r_point(ring: RingPresentation, p: Sequence[float], tol: float = ACCEPT_TOL) -> Optional[RPoint]:
    return r_point_status(ring, p, tol)[0]


def eval_element(c: RingElement, p: RPoint) -> float:
    if c.owner != p.owner:
        raise ValueError("element and point belong to different rings")
    return evaluate(c.ambient, p.coordinates)


# --- search ---------------------------------------------------------------------

def grid(box: Sequence[tuple], step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("grid_step must be positive")
    axes = []
    for lo, hi in box:
        if hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        axes.append(lo + step * np.arange(count))
    if not axes:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _gauss_newton(jac: JacobianProgram, X: np.ndarray, iters: int, tol: float) -> np.ndarray:
    X = X.copy()
    active = np.ones(X.shape[0], dtype=bool)
    for _ in range(iters):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        r, J = jac(X[idx])
        finite = np.isfinite(r).all(axis=1) & np.isfinite(J).all(axis=(1, 2))
        done = finite & (np.abs(r).max(axis=1, initial=0.0) <= tol * 1e-3)
        active[idx[~finite]] = False
        active[idx[done]] = False
        step_idx = finite & ~done
        if not step_idx.any():
            continue
        Js, rs = J[step_idx], r[step_idx]
        delta = np.einsum("pij,pj->pi", np.linalg.pinv(Js), rs)
        X[idx[step_idx]] -= delta
        bad = ~np.isfinite(X[idx[step_idx]]).all(axis=1)
        active[idx[step_idx][bad]] = False
    return X


def find_r_points(ring: RingPresentation, box: Sequence[tuple], grid_step: float,
                  newton_iters: int = 20, newton_tol: float = NEWTON_TOL,
                  cluster_radius: float = CLUSTER_RADIUS, seed: int = 0,
                  max_samples: Optional[int] = None) -> list[RPoint]:
    """Grid scan, batched Gauss-Newton refinement, clustering, lexicographic sort.

    Points that leave ``box`` during refinement are discarded.  ``seed`` only
    matters when ``max_samples`` caps the number of grid starts.
    """
    box = [(float(lo), float(hi)) for lo, hi in box]
    if len(box) != ring.arity:
        raise ValueError(f"box has {len(box)} intervals, ring arity is {ring.arity}")
    X = grid(box, grid_step)
    if max_samples is not None and X.shape[0] > max_samples:
        pick = np.random.default_rng(seed).choice(X.shape[0], max_samples, replace=False)
        X = X[np.sort(pick)]
    if ring.relations:
        jac = JacobianProgram(ring.relations, ring.arity)
        if ring.arity:
            X = _gauss_newton(jac, X, newton_iters, newton_tol)
        r, _ = jac(X)
        with np.errstate(invalid="ignore"):
            res = np.abs(r).max(axis=1, initial=0.0)
        ok = np.isfinite(res) & (res <= newton_tol)
    else:
        res = np.zeros(X.shape[0])
        ok = np.ones(X.shape[0], dtype=bool)
    if box:
        lo = np.array([b[0] for b in box]) - 1e-9
        hi = np.array([b[1] for b in box]) + 1e-9
        ok &= ((X >= lo) & (X <= hi)).all(axis=1)
    X, res = X[ok], res[ok]
    if X.shape[0] == 0:
        return []
    X = X + 0.0  # normalise -0.0
    order = np.lexsort(X.T[::-1]) if X.shape[1] else np.arange(X.shape[0])
    X, res = X[order], res[order]
    keep = K.greedy_cluster(X, cluster_radius) if X.shape[1] else np.arange(X.shape[0]) == 0
    return [RPoint(ring, tuple(float(v) for v in x), float(q)) for x, q in zip(X[keep], res[keep])]


@dataclass(frozen=True)
class SearchParams:
    """Point-search settings shared by the sampled checks.

    ``box`` defaults to the cube [-half_width, half_width]^arity.
    """
    half_width: float = 2.0
    step: float = 0.5
    newton_iters: int = 60
    newton_tol: float = NEWTON_TOL
    cluster_radius: float = CLUSTER_RADIUS
    seed: int = 0
    box: Optional[tuple] = None
    max_samples: Optional[int] = None

    def box_for(self, arity: int):
        if self.box is not None:
            return self.box
        return tuple((-self.half_width, self.half_width) for _ in range(arity))

    def search(self, ring: RingPresentation) -> list[RPoint]:
        return find_r_points(ring, self.box_for(ring.arity), self.step, self.newton_iters,
                             self.newton_tol, self.cluster_radius, self.seed, self.max_samples)


def spread(points: Sequence, k: Optional[int]) -> list:
    """Up to ``k`` items spread evenly across ``points`` (order preserved)."""
    points = list(points)
    if k is None or len(points) <= k:
        return points
    idx = np.unique(np.round(np.linspace(0, len(points) - 1, k)).astype(int))
    return [points[i] for i in idx]


@dataclass(frozen=True)
class CheckReport:
    verdict: str            # "pass" | "fail" | "inconclusive"
    checked: int
    max_residual: float
    tol: float
    witness: Optional[tuple] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def morphism_check(phi: RingMorphism, n_points: Optional[int] = None,
                   search: SearchParams = SearchParams(), tol: float = ACCEPT_TOL) -> CheckReport:
    """Evaluate every source relation at the images of target R-points."""
    rels = [substitute(r, phi.image_exprs) for r in phi.source.relations]
    if not rels:
        return CheckReport("pass", 0, 0.0, tol)
    pts = spread(search.search(phi.target), n_points)
    if not pts:
        return CheckReport("inconclusive", 0, float("nan"), tol)
    worst, witness = 0.0, None
    for p in pts:
        try:
            v = max(abs(evaluate(r, p.coordinates)) for r in rels)
        except DomainError:
            v = float("inf")
        if v > worst:
            worst, witness = v, p.coordinates
    verdict = "pass" if worst <= tol else "fail"
    return CheckReport(verdict, len(pts), worst, tol, witness if verdict == "fail" else None)


@dataclass(frozen=True)
class EqualityVerdict:
    kind: str               # "indistinguishable" | "distinct" | "inconclusive"
    checked: int
    witness: Optional[RPoint] = None
    difference: float = 0.0


def element_equal(a: RingElement, b: RingElement, search: SearchParams = SearchParams(),
                  tol: float = ACCEPT_TOL, points: Optional[Sequence[RPoint]] = None) -> EqualityVerdict:
    """Compare ``a - b`` with zero at R-points of the common owner."""
    if a.owner != b.owner:
        raise ValueError("elements have different owners")
    pts = list(points) if points is not None else search.search(a.owner)
    if not pts:
        return EqualityVerdict("inconclusive", 0)
    d = (a - b).ambient
    for i, p in enumerate(pts):
        try:
            v = abs(evaluate(d, p.coordinates))
        except DomainError:
            continue
        if v > tol:
            return EqualityVerdict("distinct", i + 1, p, v)
    return EqualityVerdict("indistinguishable", len(pts))
