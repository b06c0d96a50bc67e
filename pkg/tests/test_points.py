import numpy as np
import pytest

from cinfty.cring import free_ring, make_ring
from cinfty.points import (RPoint, SearchParams, eval_element, find_r_points, grid, is_r_point,
                           r_point_status, spread)

from oracles import circle_intersections

CIRCLE = make_ring(2, ["x0^2 + x1^2 - 1"])


def test_is_r_point():
    p = is_r_point(CIRCLE, (1, 0))
    assert p is not None and p.residual == 0.0
    assert is_r_point(CIRCLE, (0, 0)) is None
    assert r_point_status(CIRCLE, (0, 0))[1] == "residual"


def test_domain_error_is_flagged():
    ring = make_ring(1, ["log(x0)"])
    assert r_point_status(ring, (-1.0,)) == (None, "domain")
    assert r_point_status(ring, (1.0,))[1] == "ok"


def test_wrong_length():
    with pytest.raises(ValueError):
        is_r_point(CIRCLE, (1.0,))


def test_eval_element():
    p = is_r_point(CIRCLE, (1, 0))
    assert eval_element(CIRCLE.element("x0"), p) == 1.0
    assert eval_element(CIRCLE.element("exp(x0)"), is_r_point(CIRCLE, (0, 1))) == 1.0
    for q in SearchParams().search(CIRCLE):
        assert abs(eval_element(CIRCLE.element("x0^2 + x1^2"), q) - 1) <= 1e-9


def test_circle_meets_line():
    ring = make_ring(2, ["x0^2 + x1^2 - 1", "x1"])
    pts = find_r_points(ring, [(-2, 2), (-2, 2)], 0.1, 20, 1e-12)
    assert len(pts) == 2
    assert np.allclose([p.coordinates for p in pts], [(-1, 0), (1, 0)], atol=1e-12)


@pytest.mark.parametrize("c", [0.3, 1.0, 1.7])
def test_two_circles(c):
    ring = make_ring(2, ["x0^2 + x1^2 - 1", f"(x0 - {c})^2 + x1^2 - 1"])
    pts = SearchParams().search(ring)
    expected = circle_intersections(c)
    assert len(pts) == 2
    for p, q in zip(pts, expected):
        assert np.allclose(p.coordinates, q, atol=1e-12)


def test_no_real_zeros():
    assert find_r_points(make_ring(1, ["x0^2 + 1"]), [(-2, 2)], 0.1, 20) == []


def test_free_ring_returns_grid():
    pts = find_r_points(free_ring(1), [(0, 1)], 0.5)
    assert [p.coordinates for p in pts] == [(0.0,), (0.5,), (1.0,)]


def test_arity_zero():
    pts = find_r_points(free_ring(0), [], 0.5)
    assert len(pts) == 1 and pts[0].coordinates == ()
    assert find_r_points(make_ring(0, ["1"]), [], 0.5) == []


def test_points_leaving_the_box_are_dropped():
    pts = find_r_points(make_ring(1, ["x0 - 5"]), [(-1, 1)], 0.5)
    assert pts == []


def test_results_are_sorted_and_separated():
    pts = SearchParams(step=0.25).search(CIRCLE)
    coords = [p.coordinates for p in pts]
    assert coords == sorted(coords)
    A = np.array(coords)
    d = np.sqrt(((A[:, None] - A[None]) ** 2).sum(-1)) + np.eye(len(A))
    assert d.min() > 1e-6


def test_max_samples_is_seeded():
    a = SearchParams(step=0.1, max_samples=50, seed=4).search(CIRCLE)
    b = SearchParams(step=0.1, max_samples=50, seed=4).search(CIRCLE)
    assert a == b and len(a) <= 50


def test_grid_validation():
    with pytest.raises(ValueError):
        grid([(0, 1)], 0)
    with pytest.raises(ValueError):
        grid([(1, 0)], 0.5)
    assert grid([(0, 1), (0, 1)], 0.5).shape == (9, 2)


def test_spread():
    assert spread(range(5), None) == [0, 1, 2, 3, 4]
    assert spread(range(10), 3) == [0, 4, 9] or spread(range(10), 3) == [0, 5, 9]
    assert len(spread(range(100), 20)) == 20


def test_rpoint_checks_arity():
    with pytest.raises(ValueError):
        RPoint(CIRCLE, (1.0,), 0.0)
