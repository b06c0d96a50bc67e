import numpy as np
import pytest

from cinfty.cring import free_ring, identity, make_ring
from cinfty.geom import (ManifoldPresentation, circle, cotangent_sequence, euclidean,
                         fibre_product, from_ring, identity_map, map_check, matched_pairs,
                         open_subset, point, regularity_check, ring_morphism_of_map, smooth_map,
                         sphere, stdlib, torus2, transverse_check)
from cinfty.cmodule import sequence_check
from cinfty.points import SearchParams, is_r_point, morphism_check, spread

from oracles import brute_force_pairs

E2 = euclidean(2)


def _line(name="line"):
    return from_ring(make_ring(2, ["x1"]), 1, name)


def test_catalogue():
    assert euclidean(0).ring == free_ring(0)
    assert sphere(2).ring.canonical() == "gens 3 ; rels ((-1) + (x0 ^ 2) + (x1 ^ 2) + (x2 ^ 2)) ;"
    assert circle().ring == sphere(1).ring and circle().dim == 1
    assert torus2().dim == 2 and torus2().arity == 4
    assert open_subset(1, "x0").ring.canonical() == "gens 2 ; rels ((-1) + (x0 * x1)) ;"
    assert point().arity == 0
    assert stdlib("sphere", 3) == sphere(3)
    with pytest.raises(ValueError):
        stdlib("klein_bottle")


def test_circle_points_lie_on_circle():
    for p in circle().points():
        assert abs(p.coordinates[0] ** 2 + p.coordinates[1] ** 2 - 1) <= 1e-9


@pytest.mark.parametrize("M", [euclidean(2), sphere(1), sphere(2), sphere(3), torus2(),
                               open_subset(2, "x0^2 + x1^2 - 1/4")],
                         ids=lambda M: M.name)
def test_regular_value(M):
    pts = spread(M.points(SearchParams()), 20)
    rep = regularity_check(M, pts)
    assert rep.passed and rep.checked == len(pts) > 0


def test_regularity_fails_at_singular_point():
    cone = from_ring(make_ring(2, ["x0^2 - x1^2"]), 1)
    rep = regularity_check(cone, [is_r_point(cone.ring, (0.0, 0.0))])
    assert not rep.passed


def test_map_validation():
    with pytest.raises(ValueError):
        smooth_map(circle(), E2, ["x0"])
    with pytest.raises(ValueError):
        smooth_map(euclidean(1), E2, ["x0", "x1"])


def test_ring_morphism_of_map():
    assert ring_morphism_of_map(identity_map(circle())) == identity(circle().ring)
    inc = smooth_map(circle(), E2, ["x0", "x1"])
    phi = ring_morphism_of_map(inc)
    assert phi.source == E2.ring and phi.target == circle().ring
    antipode = smooth_map(circle(), circle(), ["-x0", "-x1"])
    assert morphism_check(ring_morphism_of_map(antipode), 20).passed
    assert map_check(antipode, circle().points()) <= 1e-12


def test_transverse_axes():
    xaxis = _line()
    yaxis = from_ring(make_ring(2, ["x0"]), 1)
    g = smooth_map(xaxis, E2, ["x0", "x1"])
    h = smooth_map(yaxis, E2, ["x0", "x1"])
    o1, o2 = is_r_point(xaxis.ring, (0, 0)), is_r_point(yaxis.ring, (0, 0))
    rep = transverse_check(g, h, o1, o2)
    assert rep.is_common and rep.spans


def test_circle_and_line_transverse():
    g = smooth_map(circle(), E2, ["x0", "x1"])
    h = smooth_map(_line(), E2, ["x0", "x1"])
    rep = transverse_check(g, h, is_r_point(circle().ring, (1, 0)), is_r_point(h.source.ring, (1, 0)))
    assert rep.is_common and rep.spans


def test_tangent_circles_not_transverse():
    other = from_ring(make_ring(2, ["(x0 - 2)^2 + x1^2 - 1"]), 1)
    g = smooth_map(circle(), E2, ["x0", "x1"])
    h = smooth_map(other, E2, ["x0", "x1"])
    rep = transverse_check(g, h, is_r_point(circle().ring, (1, 0)), is_r_point(other.ring, (1, 0)))
    assert rep.is_common and not rep.spans and rep.rank == 1


def test_fibre_product_circle_line():
    g = smooth_map(circle(), E2, ["x0", "x1"])
    h = smooth_map(_line(), E2, ["x0", "x1"])
    fp = fibre_product(g, h)
    assert fp.manifold.dim == 0
    pts = [p.coordinates for p in fp.manifold.points(SearchParams())]
    assert np.allclose(pts, [(-1, 0, -1, 0), (1, 0, 1, 0)], atol=1e-12)
    # brute-force pairing on independent samples
    xs = [(np.cos(t), np.sin(t)) for t in np.linspace(0, 2 * np.pi, 721)[:-1]]
    ys = [(t, 0.0) for t in np.linspace(-2, 2, 81)]
    pairs = sorted(brute_force_pairs(xs, ys, lambda x: x, lambda y: y, 1e-9))
    assert np.allclose(pairs, pts, atol=1e-9)
    xpts = spread(circle().points(SearchParams(step=0.1)), None)
    ypts = h.source.points(SearchParams(step=0.1))
    assert np.allclose(sorted(matched_pairs(g, h, xpts, ypts)), pts, atol=1e-9)


def test_fibre_product_diagonal():
    R3 = euclidean(3)
    fp = fibre_product(identity_map(R3), identity_map(R3))
    assert fp.manifold.dim == 3
    for p in spread(fp.manifold.points(SearchParams(step=1.0)), 20):
        assert np.abs(np.subtract(p.coordinates[:3], p.coordinates[3:])).max() <= 1e-9


def test_fibre_product_of_points():
    R = euclidean(1)
    g = smooth_map(point(), R, ["0"])
    fp = fibre_product(g, g)
    assert len(fp.manifold.points()) == 1
    assert fp.first.target == point()


def test_fibre_product_needs_common_target():
    with pytest.raises(ValueError):
        fibre_product(identity_map(circle()), identity_map(E2))


def test_cotangent_sequence_of_transverse_circles():
    other = from_ring(make_ring(2, ["(x0 - 1)^2 + x1^2 - 1"]), 1)
    fp = fibre_product(smooth_map(circle(), E2, ["x0", "x1"]), smooth_map(other, E2, ["x0", "x1"]))
    reps = sequence_check(cotangent_sequence(fp), fp.manifold.points(), left_zero=True,
                          right_zero=True)
    assert len(reps) == 2 and all(r.exact for r in reps)


def test_presentation_equality_ignores_name():
    assert ManifoldPresentation(free_ring(1), 1, "a") == ManifoldPresentation(free_ring(1), 1, "b")
