"""Finitely presented C-infinity rings C(R^n)/I, their elements and morphisms."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

from .expr import (ONE, SmoothExpr, Var, add, as_expr, mul, neg, shift,
                   simplify, sub, substitute)
from .parser import parse


class Provenance(enum.Enum):
    FREE_EUCLIDEAN = "FreeEuclidean"
    QUOTIENT = "Quotient"
    PUSHOUT = "Pushout"
    LOCALIZATION = "Localization"
    CHARACTERISTIC_FUNCTION = "CharacteristicFunction"
    INVARIANTS = "Invariants"


@dataclass(frozen=True)
class RingPresentation:
    """C(R^arity) modulo the ideal generated by ``relations``.

    ``fair`` is an unverified annotation set by constructors whose output is
    known to be fair (finitely generated ideals are); nothing checks it.
    """
    arity: int
    relations: tuple = ()
    names: tuple = field(default=(), compare=False)
    provenance: Provenance = field(default=Provenance.QUOTIENT, compare=False)
    fair: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be non-negative")
        for r in self.relations:
            if r.max_var >= self.arity:
                raise ValueError(
                    f"relation {r.printed} uses x{r.max_var} but the ring has arity {self.arity}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(self.arity)))
        elif len(self.names) != self.arity:
            raise ValueError("one generator name per generator")

    @property
    def is_free(self) -> bool:
        return not self.relations

    def generator(self, i: int) -> "RingElement":
        return RingElement(self, Var(i))

    def element(self, e) -> "RingElement":
        if isinstance(e, str):
            e = parse(e, self.arity)
        return RingElement(self, simplify(as_expr(e)))

    def canonical(self) -> str:
        rels = " , ".join(r.printed for r in self.relations)
        return f"gens {self.arity} ; rels {rels} ;" if rels else f"gens {self.arity} ; rels ;"

    def __str__(self):
        return self.canonical()


@dataclass(frozen=True)
class RingElement:
    owner: RingPresentation
    ambient: SmoothExpr

    def __post_init__(self):
        if self.ambient.max_var >= self.owner.arity:
            raise ValueError(
                f"element {self.ambient.printed} uses x{self.ambient.max_var} "
                f"outside arity {self.owner.arity}")

    def _lift(self, other):
        if isinstance(other, RingElement):
            if other.owner != self.owner:
                raise ValueError("elements of different rings")
            return other.ambient
        return as_expr(other)

    def __add__(self, other):
        return RingElement(self.owner, add(self.ambient, self._lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.owner, sub(self.ambient, self._lift(other)))

    def __rsub__(self, other):
        return RingElement(self.owner, sub(self._lift(other), self.ambient))

    def __mul__(self, other):
        return RingElement(self.owner, mul(self.ambient, self._lift(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.owner, neg(self.ambient))

    def __str__(self):
        return self.ambient.printed


@dataclass(frozen=True)
class RingMorphism:
    """Morphism source -> target given by the images of source generators.

    Whether source relations land in the target ideal is not structural;
    ``status`` records the outcome of the last numeric check, if any.
    """
    source: RingPresentation
    target: RingPresentation
    images: tuple
    status: object = field(default="unverified", compare=False)

    def __post_init__(self):
        if len(self.images) != self.source.arity:
            raise ValueError(
                f"need {self.source.arity} generator images, got {len(self.images)}")
        fixed = []
        for im in self.images:
            if isinstance(im, RingElement):
                if im.owner != self.target:
                    raise ValueError("image does not belong to the target ring")
                fixed.append(im)
            else:
                fixed.append(RingElement(self.target, simplify(as_expr(im))))
        object.__setattr__(self, "images", tuple(fixed))

    @property
    def image_exprs(self) -> tuple:
        return tuple(im.ambient for im in self.images)

    def __call__(self, c: RingElement) -> RingElement:
        if c.owner != self.source:
            raise ValueError("element is not in the source ring")
        return RingElement(self.target, substitute(c.ambient, self.image_exprs))

    def apply_expr(self, e: SmoothExpr) -> SmoothExpr:
        return substitute(e, self.image_exprs)

    def with_status(self, status) -> "RingMorphism":
        return replace(self, status=status)

    def canonical(self) -> str:
        return " , ".join(e.printed for e in self.image_exprs)


class PushoutResult(NamedTuple):
    ring: RingPresentation
    left: RingMorphism
    right: RingMorphism


# --- constructors ------------------------------------------------------------

def _as_relation(r, n):
    if isinstance(r, str):
        return parse(r, n)
    return simplify(as_expr(r))


def make_ring(n: int, relations: Sequence = (), provenance: Provenance | None = None,
              names: Sequence[str] = ()) -> RingPresentation:
    rels = tuple(_as_relation(r, n) for r in relations)
    if provenance is None:
        provenance = Provenance.QUOTIENT if rels else Provenance.FREE_EUCLIDEAN
    return RingPresentation(n, rels, tuple(names), provenance)


def free_ring(n: int) -> RingPresentation:
    """C(R^n), the free C-infinity ring on n generators."""
    return make_ring(n)


REALS = free_ring(0)


def phi_apply(f: SmoothExpr, elems: Sequence[RingElement]) -> RingElement:
    """The C-infinity operation of ``f`` on elements sharing one owner."""
    if not elems:
        if f.variables:
            raise ValueError("arity mismatch: f uses variables but no elements given")
        raise ValueError("phi_apply needs at least one element to fix the ring")
    owner = elems[0].owner
    if any(e.owner != owner for e in elems):
        raise ValueError("elements have different owners")
    if f.max_var >= len(elems):
        raise ValueError(f"arity mismatch: f uses x{f.max_var}, {len(elems)} elements given")
    return RingElement(owner, simplify(substitute(f, [e.ambient for e in elems])))


def identity(ring: RingPresentation) -> RingMorphism:
    return RingMorphism(ring, ring, tuple(Var(i) for i in range(ring.arity)))


def morphism(source: RingPresentation, target: RingPresentation, images: Sequence) -> RingMorphism:
    images = [parse(im, target.arity) if isinstance(im, str) else im for im in images]
    return RingMorphism(source, target, tuple(images))


def compose(psi: RingMorphism, phi: RingMorphism) -> RingMorphism:
    """``psi o phi`` for phi: A -> B and psi: B -> C."""
    if phi.target != psi.source:
        raise ValueError("cannot compose: phi.target differs from psi.source")
    return RingMorphism(phi.source, psi.target,
                        tuple(psi.apply_expr(e) for e in phi.image_exprs))


def unique_from_reals(ring: RingPresentation) -> RingMorphism:
    """The unique morphism R -> ring (R is initial)."""
    return RingMorphism(REALS, ring, ())


def pushout(phi: RingMorphism, psi: RingMorphism) -> PushoutResult:
    """Pushout of D <-phi- C -psi-> E as C(R^{m+n}) / (J, K, f_i(y) - g_i(z))."""
    if phi.source != psi.source:
        raise ValueError("pushout needs morphisms with a common source")
    D, E = phi.target, psi.target
    m, n = D.arity, E.arity
    rels = list(D.relations)
    rels += [shift(r, m) for r in E.relations]
    for f, g in zip(phi.image_exprs, psi.image_exprs):
        rels.append(sub(f, shift(g, m)))
    F = RingPresentation(m + n, tuple(simplify(r) for r in rels),
                         tuple(D.names) + tuple(E.names), Provenance.PUSHOUT)
    left = RingMorphism(D, F, tuple(Var(i) for i in range(m)))
    right = RingMorphism(E, F, tuple(Var(m + i) for i in range(n)))
    return PushoutResult(F, left, right)


def coproduct(D: RingPresentation, E: RingPresentation) -> PushoutResult:
    """D tensor-infinity E: the pushout over R, so no mixed relations appear."""
    return pushout(unique_from_reals(D), unique_from_reals(E))


def localize(C: RingPresentation, c: RingElement):
    """C[c^-1] by adjoining x_n with relation x_n * c - 1.

    Returns the localized presentation and the inclusion C -> C[c^-1].
    """
    if c.owner != C:
        raise ValueError("element does not belong to the ring")
    n = C.arity
    rel = sub(mul(Var(n), c.ambient), ONE)
    prov = Provenance.CHARACTERISTIC_FUNCTION if C.is_free else Provenance.LOCALIZATION
    L = RingPresentation(n + 1, C.relations + (rel,), tuple(C.names) + (f"x{n}",), prov)
    return L, RingMorphism(C, L, tuple(Var(i) for i in range(n)))
