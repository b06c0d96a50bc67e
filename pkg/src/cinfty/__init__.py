"""Finitely presented C-infinity rings, Weil algebras, cotangent modules,
embedded manifolds and finite quotient stacks, checked numerically at R-points."""

from ._kernels import backend
from .cmodule import (ModuleMorphism, ModulePresentation, cotangent, cotangent_morphism,
                      fiber_at_point, fiber_map, pushout_cotangent_sequence, sequence_check)
from .cring import (RingElement, RingMorphism, RingPresentation, compose, coproduct,
                    free_ring, localize, make_ring, morphism, phi_apply, pushout)
from .expr import (DomainError, SmoothExpr, differentiate, evaluate, fd_gradient_check,
                   simplify, substitute)
from .geom import (ManifoldPresentation, SmoothMap, fibre_product, ring_morphism_of_map,
                   stdlib, transverse_check)
from .parser import ParseError, parse
from .points import SearchParams, element_equal, find_r_points, is_r_point, morphism_check
from .quotient import (FiniteGroup, LinearAction, coarse_moduli, equivariant_cotangent,
                       equivariant_module_check, groupoid_check, groupoid_from_action,
                       invariant_generators, orbit_space, quotient_stack, reynolds,
                       stabilizer, stack_fibre_product)
from .weil import WeilAlgebra, weil_make, weil_phi

__version__ = "0.1.0"

__all__ = [
    "backend", "coarse_moduli", "compose", "coproduct", "cotangent", "cotangent_morphism",
    "differentiate", "DomainError", "element_equal", "equivariant_cotangent",
    "equivariant_module_check", "evaluate", "fd_gradient_check", "fiber_at_point",
    "fiber_map", "fibre_product", "find_r_points", "FiniteGroup", "free_ring",
    "groupoid_check", "groupoid_from_action", "invariant_generators", "is_r_point",
    "LinearAction", "localize", "make_ring", "ManifoldPresentation", "ModuleMorphism",
    "ModulePresentation", "morphism", "morphism_check", "orbit_space", "parse",
    "ParseError", "phi_apply", "pushout", "pushout_cotangent_sequence", "quotient_stack",
    "reynolds", "ring_morphism_of_map", "RingElement", "RingMorphism", "RingPresentation",
    "SearchParams", "sequence_check", "simplify", "SmoothExpr", "SmoothMap", "stabilizer",
    "stack_fibre_product", "stdlib", "substitute", "transverse_check", "weil_make",
    "weil_phi", "WeilAlgebra", "__version__",
]
