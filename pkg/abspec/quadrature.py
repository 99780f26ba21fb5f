"""Quadrature over mesh regions.

Whole elements use the scikit-fem triangle rules. Elements cut by a
circle are clipped to a convex polygon whose curved side is refined by
intermediate arc points, elements crossed by a segment are split along
its line so that discontinuous integrands are integrated side by side,
and singular points (the origin, the pole) become fan apexes of the
sub-triangles so that Gauss points never sit next to them on an edge.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from skfem.quadrature import get_quadrature
from skfem.refdom import RefTri

from abspec.utils.errors import QuadratureError

# Maximal angle between consecutive points on a clipped arc.
ARC_STEP = 0.03
_EPS = 1e-12


@lru_cache(maxsize=None)
def triangle_rule(order):
    """Barycentric points (n, 3) and weights (n,) summing to one."""
    X, W = get_quadrature(RefTri, order)
    bary = np.stack([1.0 - X[0] - X[1], X[0], X[1]], axis=1)
    return bary, 2.0 * W


@dataclass(frozen=True, eq=False)
class QuadratureSet:
    """Quadrature points with their owner elements.

    Args:
        owners (np.ndarray): Owner element of each point.
        points (np.ndarray): (P, 2) physical coordinates.
        bary (np.ndarray): (P, 3) barycentric coordinates in the owner.
        weights (np.ndarray): Physical weights.
    """
    owners: np.ndarray
    points: np.ndarray
    bary: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        return np.sum(self.weights * values)

    def subset(self, mask):
        return QuadratureSet(self.owners[mask], self.points[mask],
                             self.bary[mask], self.weights[mask])

    @classmethod
    def concat(cls, parts):
        parts = [p for p in parts if p is not None and len(p)]
        if not parts:
            return cls(np.zeros(0, dtype=int), np.zeros((0, 2)),
                       np.zeros((0, 3)), np.zeros(0))
        return cls(np.concatenate([p.owners for p in parts]),
                   np.vstack([p.points for p in parts]),
                   np.vstack([p.bary for p in parts]),
                   np.concatenate([p.weights for p in parts]))


def element_quadrature(mesh, order, elements=None):
    """Standard rule on whole elements (all of them by default)."""
    bary, w = triangle_rule(order)
    if elements is None:
        elements = np.arange(mesh.n_triangles)
    elements = np.asarray(elements, dtype=int)
    corners = mesh.corners[elements]
    points = np.einsum('qi,tij->tqj', bary, corners).reshape(-1, 2)
    weights = (mesh.areas[elements][:, None] * w[None, :]).ravel()
    owners = np.repeat(elements, len(w))
    return QuadratureSet(owners, points, np.tile(bary, (len(elements), 1)),
                         weights)


def subtriangle_quadrature(mesh, owners, triangles, order):
    """Rule on sub-triangles (S, 3, 2) lying inside their owner elements."""
    triangles = np.asarray(triangles, dtype=float).reshape(-1, 3, 2)
    owners = np.asarray(owners, dtype=int)
    if len(triangles) == 0:
        return QuadratureSet.concat([])
    bary, w = triangle_rule(order)
    e1 = triangles[:, 1] - triangles[:, 0]
    e2 = triangles[:, 2] - triangles[:, 0]
    area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    points = np.einsum('qi,tij->tqj', bary, triangles).reshape(-1, 2)
    weights = (area[:, None] * w[None, :]).ravel()
    point_owners = np.repeat(owners, len(w))
    return QuadratureSet(point_owners, points,
                         mesh.barycentric(point_owners, points), weights)


# ---------------------------------------------------------------------------- #
#                               Polygon clipping                               #
# ---------------------------------------------------------------------------- #

def polygon_area(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def clip_halfplane(poly, normal, offset=0.0):
    """Part of a convex polygon where normal . x >= offset (or None)."""
    if poly is None or len(poly) < 3:
        return None
    s = poly @ np.asarray(normal, dtype=float) - offset
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = s[i], s[(i + 1) % n]
        if sp >= 0.0:
            out.append(p)
        if (sp > 0.0 and sq < 0.0) or (sp < 0.0 and sq > 0.0):
            t = sp / (sp - sq)
            out.append(p + t * (q - p))
    if len(out) < 3:
        return None
    out = np.array(out)
    if polygon_area(out) <= _EPS * _EPS:
        return None
    return out


def _arc(center, radius, start, sweep):
    n = max(1, int(math.ceil(sweep / ARC_STEP)))
    t = start + sweep * np.arange(1, n) / n
    return center + radius * np.stack([np.cos(t), np.sin(t)], axis=1)


def clip_disk(poly, center, radius):
    """Intersection of a convex CCW polygon with a disk, arcs refined.

    Returns None when the intersection is empty or negligible.
    """
    center = np.asarray(center, dtype=float)
    rel = poly - center
    inside = np.einsum('ij,ij->i', rel, rel) <= radius * radius
    if np.all(inside):
        return poly
    n = len(poly)
    out = []
    pending_exit = None
    for i in range(n):
        p, q = rel[i], rel[(i + 1) % n]
        if inside[i]:
            out.append(('v', p))
        d = q - p
        a = d @ d
        b = 2.0 * (p @ d)
        c = p @ p - radius * radius
        disc = b * b - 4.0 * a * c
        if a == 0.0 or disc <= 0.0:
            continue
        root = math.sqrt(disc)
        for t, kind in (((-b - root) / (2.0 * a), 'in'),
                        ((-b + root) / (2.0 * a), 'out')):
            if 0.0 < t < 1.0:
                out.append((kind, p + t * d))
    if not out:
        # disk inside the polygon, or disjoint from it
        if _contains(rel, np.zeros(2)):
            n_arc = int(math.ceil(2.0 * math.pi / ARC_STEP))
            t = 2.0 * math.pi * np.arange(n_arc) / n_arc
            return center + radius * np.stack([np.cos(t), np.sin(t)], axis=1)
        return None
    points = []
    for kind, x in out:
        if kind == 'in' and pending_exit is not None:
            points.extend(_arc_between(pending_exit, x, radius))
            pending_exit = None
        points.append(x)
        if kind == 'out':
            pending_exit = x
    if pending_exit is not None:
        # wrap around to the first entry point
        start = next(x for kind, x in out if kind == 'in')
        points.extend(_arc_between(pending_exit, start, radius))
    if len(points) < 3:
        return None
    poly_out = center + np.array(points)
    if polygon_area(poly_out) <= _EPS * _EPS:
        return None
    return poly_out


def _arc_between(x, y, radius):
    t0 = math.atan2(x[1], x[0])
    sweep = (math.atan2(y[1], y[0]) - t0) % (2.0 * math.pi)
    return list(_arc(np.zeros(2), radius, t0, sweep))


def _contains(poly, x, tol=0.0):
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        if (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]) < -tol:
            return False
    return True


def fan(poly, apex=None):
    """Fan triangulation (S, 3, 2) of a convex polygon.

    With an apex (inside or on the boundary) every sub-triangle has it as
    a corner.
    """
    if apex is None:
        tris = [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]
    else:
        apex = np.asarray(apex, dtype=float)
        scale = max(float(np.ptp(poly, axis=0).max()), 1e-300)
        hit = np.flatnonzero(np.linalg.norm(poly - apex, axis=1) <= 1e-12 * scale)
        if len(hit):
            poly = np.roll(poly, -int(hit[0]), axis=0)
            return fan(poly)
        n = len(poly)
        tris = [(apex, poly[i], poly[(i + 1) % n]) for i in range(n)]
    tris = np.array(tris, dtype=float).reshape(-1, 3, 2)
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    ref = max(abs(polygon_area(poly)), 1e-300)
    return tris[area > 1e-13 * ref]


# ---------------------------------------------------------------------------- #
#                             Element classification                           #
# ---------------------------------------------------------------------------- #

def _point_triangle_distance(mesh, x):
    c = mesh.corners
    lam = mesh.barycentric(np.arange(mesh.n_triangles),
                           np.broadcast_to(x, (mesh.n_triangles, 2)))
    inside = np.all(lam >= 0.0, axis=1)
    best = np.full(mesh.n_triangles, np.inf)
    for i in range(3):
        p, q = c[:, i], c[:, (i + 1) % 3]
        d = q - p
        t = np.clip(np.einsum('ij,ij->i', x - p, d)
                    / np.einsum('ij,ij->i', d, d), 0.0, 1.0)
        best = np.minimum(best, np.linalg.norm(p + t[:, None] * d - x, axis=1))
    best[inside] = 0.0
    return best


def classify_disk(mesh, center, radius):
    """Masks (inside, cut) of elements against the disk D_radius(center)."""
    center = np.asarray(center, dtype=float)
    dv = np.linalg.norm(mesh.corners - center, axis=2)
    inside = dv.max(axis=1) <= radius
    touching = _point_triangle_distance(mesh, center) < radius
    return inside, touching & ~inside


def segment_elements(mesh, end):
    """Mask of elements whose interior meets the open segment (0, end)."""
    a = np.asarray(end, dtype=float)
    a2 = float(a @ a)
    if a2 == 0.0:
        return np.zeros(mesh.n_triangles, dtype=bool)
    normal = np.array([-a[1], a[0]])
    c = mesh.corners
    s = c @ normal
    straddle = (s.min(axis=1) < 0.0) & (s.max(axis=1) > 0.0)
    t = (c @ a) / a2
    tmin = np.full(mesh.n_triangles, np.inf)
    tmax = np.full(mesh.n_triangles, -np.inf)
    for i in range(3):
        j = (i + 1) % 3
        si, sj = s[:, i], s[:, j]
        cross = (si * sj < 0.0)
        with np.errstate(divide='ignore', invalid='ignore'):
            u = np.where(cross, si / (si - sj), 0.0)
        tc = t[:, i] + u * (t[:, j] - t[:, i])
        on = cross | (si == 0.0)
        tc = np.where(si == 0.0, t[:, i], tc)
        tmin = np.where(on, np.minimum(tmin, tc), tmin)
        tmax = np.where(on, np.maximum(tmax, tc), tmax)
    return straddle & (tmax > 0.0) & (tmin < 1.0)


def singular_elements(mesh, x):
    """Elements containing x in their closure without having it as vertex."""
    x = np.asarray(x, dtype=float)
    lam = mesh.barycentric(np.arange(mesh.n_triangles),
                           np.broadcast_to(x, (mesh.n_triangles, 2)))
    return (lam.min(axis=1) >= -1e-12) & (lam.max(axis=1) < 1.0 - 1e-12)


def _fan_with_apexes(poly, apexes):
    for apex in apexes:
        if _contains(poly, apex, tol=1e-12 * max(
                float(np.ptp(poly, axis=0).max()), 1e-300) ** 2):
            tris = fan(poly, apex)
            rest = [ap for ap in apexes if ap is not apex]
            if not rest:
                return tris
            return np.concatenate(
                [_fan_with_apexes(t, rest) for t in tris] or
                [np.zeros((0, 3, 2))])
    return fan(poly)


def region_quadrature(mesh, order, disk=None, cut=None, singular=()):
    """Quadrature over mesh ∩ disk with per-side splitting along a cut.

    Args:
        mesh (Mesh): Mesh.
        order (int): Polynomial degree of the triangle rule.
        disk (tuple, optional): (center, radius) restricting the region.
        cut (tuple, optional): End point a of the segment [0, a] across
            which the integrand may jump.
        singular (sequence, optional): Points where the integrand is
            singular; they become corners of sub-triangles.

    Raises:
        QuadratureError: If the clipped region has negative area.

    Returns:
        QuadratureSet: Points and weights.
    """
    n = mesh.n_triangles
    if disk is not None:
        inside, clipped = classify_disk(mesh, disk[0], disk[1])
    else:
        inside, clipped = np.ones(n, dtype=bool), np.zeros(n, dtype=bool)
    special = clipped.copy()
    if cut is not None:
        special |= segment_elements(mesh, cut) & (inside | clipped)
    singular = [np.asarray(s, dtype=float) for s in singular]
    for s in singular:
        special |= singular_elements(mesh, s) & (inside | clipped)

    plain = np.flatnonzero(inside & ~special)
    parts = [element_quadrature(mesh, order, plain)]

    owners, tris = [], []
    normal = None
    if cut is not None and (cut[0] != 0.0 or cut[1] != 0.0):
        normal = np.array([-cut[1], cut[0]], dtype=float)
    for e in np.flatnonzero(special):
        poly = mesh.corners[e]
        if clipped[e]:
            poly = clip_disk(poly, disk[0], disk[1])
            if poly is None:
                continue
        pieces = [poly]
        if normal is not None:
            pieces = [clip_halfplane(poly, normal), clip_halfplane(poly, -normal)]
        for piece in pieces:
            if piece is None:
                continue
            if polygon_area(piece) < 0.0:
                raise QuadratureError('clipped polygon of element %d is not '
                                      'counterclockwise' % e)
            sub = _fan_with_apexes(piece, singular)
            owners.extend([e] * len(sub))
            tris.append(sub)
    if tris:
        parts.append(subtriangle_quadrature(mesh, owners, np.concatenate(tris),
                                            order))
    return QuadratureSet.concat(parts)


def circle_points(center, radius, Q, start_angle=0.0):
    """Equispaced points a + r(cos t_q, sin t_q), t_q = start + 2 pi q/Q."""
    t = start_angle + 2.0 * math.pi * np.arange(Q) / Q
    return np.asarray(center, dtype=float) + radius * np.stack(
        [np.cos(t), np.sin(t)], axis=1), t
