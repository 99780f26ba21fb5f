import math

import numpy as np
import pytest

import abspec.quadrature as quadrature

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@pytest.mark.parametrize('order', [2, 4, 6])
def test_triangle_rule(order):
    bary, w = quadrature.triangle_rule(order)
    assert bary.shape == (len(w), 3)
    assert w.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(bary.sum(axis=1), 1.0)
    # Mean of x^2 over the reference triangle (0,0),(1,0),(0,1) is 1/6
    x = bary[:, 1]
    assert np.sum(w * x ** 2) == pytest.approx(1.0 / 6.0)


def test_element_quadrature_area(disk_mesh, disk_domain):
    qset = quadrature.element_quadrature(disk_mesh, 4)
    assert qset.integrate(np.ones(len(qset))) == pytest.approx(disk_domain.area,
                                                               rel=1e-12)
    sub = quadrature.element_quadrature(disk_mesh, 4, elements=[0, 1])
    assert set(sub.owners.tolist()) == {0, 1}
    assert len(sub.subset(sub.owners == 0)) == len(sub) // 2


def test_polygon_helpers():
    assert quadrature.polygon_area(SQUARE) == pytest.approx(1.0)
    half = quadrature.clip_halfplane(SQUARE, (1.0, 0.0), 0.5)
    assert quadrature.polygon_area(half) == pytest.approx(0.5)
    assert quadrature.clip_halfplane(SQUARE, (1.0, 0.0), 2.0) is None
    tris = quadrature.fan(SQUARE, apex=(0.5, 0.5))
    assert len(tris) == 4
    tris = quadrature.fan(SQUARE, apex=(1.0, 1.0))
    # An apex on a corner falls back to the plain fan from that corner
    assert len(tris) == 2


def test_clip_disk():
    # Whole polygon inside
    assert quadrature.clip_disk(SQUARE, (0.5, 0.5), 2.0) is SQUARE
    assert quadrature.clip_disk(SQUARE, (5.0, 5.0), 1.0) is None
    circle = quadrature.clip_disk(SQUARE, (0.5, 0.5), 0.25)
    assert quadrature.polygon_area(circle) == pytest.approx(
        math.pi / 16, rel=5e-4)
    quarter = quadrature.clip_disk(SQUARE, (0.0, 0.0), 0.5)
    assert quadrature.polygon_area(quarter) == pytest.approx(
        math.pi / 16, rel=5e-4)


@pytest.mark.parametrize('radius', [0.3, 0.5, 0.8])
def test_region_quadrature_disk_area(disk_mesh, radius):
    qset = quadrature.region_quadrature(disk_mesh, 4, disk=((0.0, 0.0), radius))
    assert qset.weights.sum() == pytest.approx(math.pi * radius ** 2, rel=5e-4)
    assert np.all(np.linalg.norm(qset.points, axis=1) <= radius * (1 + 1e-12))


def test_region_quadrature_cut_and_singular(moved_mesh, moved_pole):
    qset = quadrature.region_quadrature(
        moved_mesh, 4, disk=((0.0, 0.0), 0.5), cut=moved_pole,
        singular=[(0.0, 0.0), moved_pole])
    assert qset.weights.sum() == pytest.approx(math.pi * 0.25, rel=5e-4)
    assert np.min(np.linalg.norm(qset.points, axis=1)) > 0.0
    assert np.min(np.linalg.norm(qset.points - np.array(moved_pole),
                                 axis=1)) > 0.0
    np.testing.assert_allclose(qset.bary.sum(axis=1), 1.0)
    # Every point lies in its owner element
    assert qset.bary.min() > -1e-9


def test_classify_disk(disk_mesh):
    inside, cut = quadrature.classify_disk(disk_mesh, (0.0, 0.0), 0.5)
    assert not np.any(inside & cut)
    dv = np.linalg.norm(disk_mesh.corners[inside], axis=2)
    assert dv.max() <= 0.5
    assert np.all(np.linalg.norm(disk_mesh.corners[cut], axis=2).max(axis=1)
                  > 0.5)


def test_segment_and_singular_elements(moved_mesh, moved_pole):
    crossing = quadrature.segment_elements(moved_mesh, moved_pole)
    assert crossing.any()
    assert not quadrature.segment_elements(moved_mesh, (0.0, 0.0)).any()
    # The pole is a vertex: no element holds it without having it as corner
    assert not quadrature.singular_elements(moved_mesh, moved_pole).any()
    point = moved_mesh.centroids[7]
    assert np.flatnonzero(
        quadrature.singular_elements(moved_mesh, point)).tolist() == [7]


def test_circle_points():
    points, t = quadrature.circle_points((1.0, 2.0), 0.5, 8)
    assert points.shape == (8, 2)
    np.testing.assert_allclose(np.linalg.norm(points - [1.0, 2.0], axis=1), 0.5)
    assert t[2] == pytest.approx(0.5 * math.pi)
