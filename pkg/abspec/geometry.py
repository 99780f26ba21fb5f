"""Planar domains and conforming triangular meshes graded toward a pole.

Meshes are built from rings of points centered at the pole, with radial
and angular spacing following the grading law

    h(d) = h_max * max(d / D, h_min_floor) ** (1 - 1/grading_exponent),

(D is the domain diameter) capped by a geometric factor near the pole,
triangulated with scipy's Delaunay and filtered against the polygonal
boundary. A vertex sits exactly at the pole, so the vanishing condition
can be imposed nodally.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from matplotlib.path import Path
from matplotlib.tri import Triangulation, TrapezoidMapTriFinder
from scipy.spatial import Delaunay
from scipy.spatial.distance import pdist

from abspec.utils.common import LOG_FMT, LOG_LEVEL_NUMERICS, Logger
from abspec.utils.errors import (DegenerateElementError, DomainError,
                                 MeshError, OutOfDomainError,
                                 PoleOutsideDomainError)

logger = Logger().getLogger('ABSPEC_GEOMETRY', LOG_LEVEL_NUMERICS, LOG_FMT)

MESH_FORMAT_HEADER = 'abmesh 1'
# Near the pole the ring spacing never exceeds this fraction of the radius,
# which keeps the innermost layers shape regular.
RING_GROWTH = 0.6
MIN_RING_POINTS = 8
# A pole move smaller than this fraction of its distance to the boundary
# is realized by morphing the stored anchor mesh.
MORPH_FRACTION = 0.25
JITTER = 1e-3
_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


# ---------------------------------------------------------------------------- #
#                                    Domains                                   #
# ---------------------------------------------------------------------------- #

def _segments_intersect(boundary):
    """Return True if two non adjacent edges of a closed polyline cross."""
    p = boundary
    q = np.roll(boundary, -1, axis=0)
    n = len(p)

    def orient(a, b, c):
        return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
                - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))

    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    d1 = orient(p[i], q[i], p[j])
    d2 = orient(p[i], q[i], q[j])
    d3 = orient(p[j], q[j], p[i])
    d4 = orient(p[j], q[j], q[i])
    return bool(np.any((d1 * d2 < 0) & (d3 * d4 < 0)))


def _signed_area(boundary):
    x, y = boundary[:, 0], boundary[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True, eq=False)
class Domain:
    """Simply connected polygonal domain.

    Args:
        boundary (np.ndarray): (n, 2) closed polyline, counterclockwise,
            last vertex not repeated.
        contains_origin (bool): Whether the origin lies strictly inside.
    """
    boundary: np.ndarray
    contains_origin: bool

    @cached_property
    def path(self):
        return Path(np.vstack([self.boundary, self.boundary[:1]]), closed=True)

    @cached_property
    def diameter(self):
        return float(pdist(self.boundary).max())

    @property
    def area(self):
        return _signed_area(self.boundary)

    @cached_property
    def edge_lengths(self):
        return np.linalg.norm(
            np.roll(self.boundary, -1, axis=0) - self.boundary, axis=1)

    def contains(self, points):
        """Boolean mask of points strictly inside the polygon."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        inside = self.path.contains_points(points)
        return inside & (self.distance_to_boundary(points) > 0.0)

    def distance_to_boundary(self, points, chunk=4096):
        """Euclidean distance from each point to the boundary polyline."""
        points = np.asarray(points, dtype=float)
        single = points.ndim == 1
        points = np.atleast_2d(points)
        a = self.boundary
        ab = np.roll(a, -1, axis=0) - a
        ab2 = np.einsum('ij,ij->i', ab, ab)
        out = np.empty(len(points))
        for start in range(0, len(points), chunk):
            pts = points[start:start + chunk]
            ap = pts[:, None, :] - a[None, :, :]
            t = np.clip(np.einsum('pij,ij->pi', ap, ab) / ab2, 0.0, 1.0)
            closest = a[None, :, :] + t[..., None] * ab[None, :, :]
            dist = np.linalg.norm(pts[:, None, :] - closest, axis=2)
            out[start:start + chunk] = dist.min(axis=1)
        return float(out[0]) if single else out


def make_polygon_domain(vertices, rescale_to_disk2=False):
    """Build a Domain from polygon vertices.

    Args:
        vertices (array-like): (n, 2) polygon vertices, either orientation.
        rescale_to_disk2 (bool, optional): Scale about the origin so that
            the closed disk of radius 2 lies strictly inside. Defaults to
            False.

    Raises:
        DomainError: Fewer than 3 vertices, self-intersection, zero area,
            or origin outside when rescaling is requested.

    Returns:
        Domain: The domain.
    """
    boundary = np.array(vertices, dtype=float)
    if boundary.ndim != 2 or boundary.shape[1] != 2 or len(boundary) < 3:
        raise DomainError('a polygon needs at least 3 planar vertices')
    if np.allclose(boundary[0], boundary[-1]):
        boundary = boundary[:-1]
    area = _signed_area(boundary)
    if area == 0.0:
        raise DomainError('polygon has zero area')
    if area < 0.0:
        boundary = boundary[::-1].copy()
    if _segments_intersect(boundary):
        raise DomainError('polygon boundary is self-intersecting')
    domain = Domain(boundary, False)
    inside = bool(domain.contains(np.zeros((1, 2)))[0])
    if rescale_to_disk2:
        if not inside:
            raise DomainError('cannot rescale: origin is not inside')
        dist = domain.distance_to_boundary(np.zeros(2))
        boundary = boundary * (2.0 / dist) * (1.0 + 1e-9)
        domain = Domain(boundary, True)
        logger.info('domain rescaled by %.6g so that D_2 fits inside',
                    2.0 / dist)
        return domain
    return Domain(boundary, inside)


def make_disk_domain(radius, n_boundary):
    """Regular n_boundary-gon inscribed in the circle of given radius.

    Raises:
        DomainError: radius <= 0 or n_boundary < 16.
    """
    if radius <= 0:
        raise DomainError('disk radius must be positive')
    if n_boundary < 16:
        raise DomainError(
            'n_boundary must be >= 16 (got %d): a coarser boundary breaks '
            'the eigenvalue tolerance' % n_boundary)
    t = 2.0 * math.pi * np.arange(n_boundary) / n_boundary
    boundary = radius * np.stack([np.cos(t), np.sin(t)], axis=1)
    return Domain(boundary, True)


def read_polygon_file(path, rescale_to_disk2=False):
    """Read ``x y`` lines (``#`` comments allowed) into a Domain."""
    rows = []
    with open(path, 'r') as file_obj:
        for line in file_obj:
            line = line.split('#', 1)[0].strip()
            if line:
                x, y = line.replace(',', ' ').split()[:2]
                rows.append((float(x), float(y)))
    return make_polygon_domain(rows, rescale_to_disk2=rescale_to_disk2)


# ---------------------------------------------------------------------------- #
#                                     Mesh                                     #
# ---------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming triangulation with a vertex at the pole.

    Args:
        vertices (np.ndarray): (N, 2) coordinates.
        triangles (np.ndarray): (T, 3) counterclockwise vertex indices.
        boundary_vertices (np.ndarray): Boundary vertex indices in
            polyline order.
        pole_vertex (int): Index of the vertex at the pole.
        grading_exponent (float): Grading exponent used to build the mesh.
        h_max (float): Coarse mesh size.
        h_min_floor (float): Relative distance below which sizes stop
            shrinking.
        domain (Domain): Meshed domain (None for imported meshes).
        anchor (tuple): Pole position the point set was generated for.
        anchor_vertices (np.ndarray): Vertex coordinates before any morph.
    """
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_vertices: np.ndarray
    pole_vertex: int
    grading_exponent: float
    h_max: float
    h_min_floor: float = 1e-5
    domain: Domain = None
    anchor: tuple = None
    anchor_vertices: np.ndarray = None

    @property
    def pole(self):
        return (float(self.vertices[self.pole_vertex, 0]),
                float(self.vertices[self.pole_vertex, 1]))

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @cached_property
    def corners(self):
        """(T, 3, 2) vertex coordinates of each triangle."""
        return self.vertices[self.triangles]

    @cached_property
    def signed_areas(self):
        c = self.corners
        e1 = c[:, 1] - c[:, 0]
        e2 = c[:, 2] - c[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def areas(self):
        return np.abs(self.signed_areas)

    @cached_property
    def centroids(self):
        return self.corners.mean(axis=1)

    @cached_property
    def edge_lengths(self):
        c = self.corners
        return np.stack([np.linalg.norm(c[:, 1] - c[:, 2], axis=1),
                         np.linalg.norm(c[:, 2] - c[:, 0], axis=1),
                         np.linalg.norm(c[:, 0] - c[:, 1], axis=1)], axis=1)

    @property
    def diameters(self):
        return self.edge_lengths.max(axis=1)

    @cached_property
    def barycentric_gradients(self):
        """(T, 3, 2) constant gradients of the P1 hat functions."""
        c = self.corners
        B = np.stack([c[:, 1] - c[:, 0], c[:, 2] - c[:, 0]], axis=2)
        Binv = np.linalg.inv(B)
        g1, g2 = Binv[:, 0, :], Binv[:, 1, :]
        return np.stack([-(g1 + g2), g1, g2], axis=1)

    @cached_property
    def boundary_mask(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_vertices] = True
        return mask

    @cached_property
    def pole_elements(self):
        return np.flatnonzero(np.any(self.triangles == self.pole_vertex, axis=1))

    @cached_property
    def triangulation(self):
        return Triangulation(self.vertices[:, 0], self.vertices[:, 1],
                             self.triangles)

    @cached_property
    def trifinder(self):
        return TrapezoidMapTriFinder(self.triangulation)

    def barycentric(self, owners, points):
        """Barycentric coordinates of points inside their owner elements."""
        v0 = self.corners[owners, 0]
        G = self.barycentric_gradients[owners]
        lam = np.einsum('pij,pj->pi', G, points - v0)
        lam[:, 0] += 1.0
        return lam

    def locate(self, points):
        """Owner element of each point, -1 outside the mesh."""
        points = np.asarray(points, dtype=float)
        return np.asarray(self.trifinder(points[:, 0], points[:, 1]),
                          dtype=int)

    def local_diameter(self, points):
        """Diameter of the element containing each point (inf outside)."""
        owners = self.locate(points)
        out = np.full(len(owners), np.inf)
        ok = owners >= 0
        out[ok] = self.diameters[owners[ok]]
        return out


class NodalField(object):
    """Piecewise linear field sampler over a mesh.

        :param mesh: Mesh the nodal values live on.
        :param values: Complex (or real) value at every mesh vertex.
    """

    def __init__(self, mesh, values):
        values = np.asarray(values)
        if values.shape != (mesh.n_vertices,):
            raise ValueError('expected %d nodal values, got shape %s'
                             % (mesh.n_vertices, values.shape))
        self.mesh = mesh
        self.values = values

    def _locate(self, points):
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, 2)
        owners = self.mesh.locate(flat)
        if np.any(owners < 0):
            raise OutOfDomainError(
                '%d evaluation points lie outside the mesh'
                % int(np.sum(owners < 0)))
        return points.shape[:-1], flat, owners

    def at(self, owners, bary):
        """Values from known owners and barycentric coordinates."""
        return np.einsum('pi,pi->p', bary,
                         self.values[self.mesh.triangles[owners]])

    def gradient_at(self, owners):
        """Element gradients (P, 2) of the field on the given elements."""
        return np.einsum('pi,pij->pj', self.values[self.mesh.triangles[owners]],
                         self.mesh.barycentric_gradients[owners])

    def __call__(self, points):
        shape, flat, owners = self._locate(points)
        bary = self.mesh.barycentric(owners, flat)
        return self.at(owners, bary).reshape(shape)

    def gradient(self, points):
        shape, _, owners = self._locate(points)
        return self.gradient_at(owners).reshape(shape + (2,))


# ---------------------------------------------------------------------------- #
#                                 Mesh building                                #
# ---------------------------------------------------------------------------- #

def _grading_size(d, h_max, diameter, grading_exponent, h_min_floor):
    gamma = 1.0 - 1.0 / grading_exponent
    return h_max * np.maximum(np.asarray(d) / diameter, h_min_floor) ** gamma


def _check_pole(domain, pole, h_max):
    pole = np.asarray(pole, dtype=float)
    if not domain.path.contains_point(pole):
        raise PoleOutsideDomainError(
            'pole (%g, %g) is on or outside the boundary' % tuple(pole))
    dist = domain.distance_to_boundary(pole)
    if dist < h_max:
        raise PoleOutsideDomainError(
            'pole too close to boundary: distance %.3g is within one '
            'h_max = %.3g' % (dist, h_max))
    return dist


def _ring_points(pole, h_max, diameter, grading_exponent, h_min_floor,
                 r_far):
    r = float(_grading_size(0.0, h_max, diameter, grading_exponent,
                            h_min_floor))
    rng = np.random.default_rng(20240601)
    points, sizes = [], []
    index = 0
    while r < r_far:
        size = float(_grading_size(r, h_max, diameter, grading_exponent,
                                   h_min_floor))
        n = max(MIN_RING_POINTS, int(math.ceil(2.0 * math.pi * r / size)))
        offset = ((index * _GOLDEN) % 1.0) * 2.0 * math.pi / n
        t = offset + 2.0 * math.pi * np.arange(n) / n
        ring = np.stack([np.cos(t), np.sin(t)], axis=1) * r
        ring += JITTER * size * rng.uniform(-1.0, 1.0, size=ring.shape)
        points.append(pole + ring)
        sizes.append(np.full(n, size))
        step = min(size, RING_GROWTH * r)
        r += step
        index += 1
    return np.vstack(points), np.concatenate(sizes)


def _edge_counts(triangles):
    edges = np.sort(np.vstack([triangles[:, [0, 1]], triangles[:, [1, 2]],
                               triangles[:, [2, 0]]]), axis=1)
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    return unique, counts


def _validate(vertices, triangles, boundary_vertices):
    e1 = vertices[triangles[:, 1]] - vertices[triangles[:, 0]]
    e2 = vertices[triangles[:, 2]] - vertices[triangles[:, 0]]
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    longest = np.maximum.reduce([np.einsum('ij,ij->i', e, e) for e in
                                 (e1, e2, e2 - e1)])
    bad = np.flatnonzero(area <= 1e-10 * longest)
    if len(bad):
        raise DegenerateElementError(int(bad[0]))
    edges, counts = _edge_counts(triangles)
    if np.any(counts > 2):
        raise MeshError('non conforming mesh: an edge has more than 2 triangles')
    outer = {tuple(e) for e in edges[counts == 1]}
    b = boundary_vertices
    expected = {tuple(sorted((int(b[i]), int(b[(i + 1) % len(b)]))))
                for i in range(len(b))}
    if outer != expected:
        raise MeshError(
            'boundary edges do not match the polyline (%d missing, %d extra); '
            'refine the boundary or h_max' % (len(expected - outer),
                                              len(outer - expected)))


def mesh_domain(domain, pole, h_max, grading_exponent, h_min_floor=1e-5):
    """Mesh a domain with a vertex exactly at the pole.

    Args:
        domain (Domain): Polygonal domain.
        pole (tuple): Pole position, strictly inside.
        h_max (float): Coarse mesh size.
        grading_exponent (float): 1 gives a uniform mesh; larger values
            refine toward the pole.
        h_min_floor (float, optional): Relative distance floor of the
            grading law. Defaults to 1e-5.

    Raises:
        PoleOutsideDomainError: Pole on, outside or within h_max of the
            boundary.
        DegenerateElementError: Zero-area triangle (carries its id).
        MeshError: Boundary edges missing from the triangulation.

    Returns:
        Mesh: The mesh.
    """
    if h_max <= 0 or grading_exponent < 1:
        raise MeshError('need h_max > 0 and grading_exponent >= 1')
    pole = np.array(pole, dtype=float)
    _check_pole(domain, pole, h_max)
    diameter = domain.diameter
    boundary = domain.boundary
    r_far = float(np.max(np.linalg.norm(boundary - pole, axis=1)))

    ring, sizes = _ring_points(pole, h_max, diameter, grading_exponent,
                               h_min_floor, r_far)
    clearance = 0.5 * np.maximum(sizes, domain.edge_lengths.max())
    keep = domain.path.contains_points(ring)
    keep[keep] &= domain.distance_to_boundary(ring[keep]) >= clearance[keep]
    interior = ring[keep]

    points = np.vstack([pole[None, :], interior, boundary])
    n_inner = 1 + len(interior)
    tri = Delaunay(points)
    simplices = np.asarray(tri.simplices, dtype=int)
    centroids = points[simplices].mean(axis=1)
    simplices = simplices[domain.path.contains_points(centroids)]

    e1 = points[simplices[:, 1]] - points[simplices[:, 0]]
    e2 = points[simplices[:, 2]] - points[simplices[:, 0]]
    flip = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]

    used = np.zeros(len(points), dtype=bool)
    used[simplices.ravel()] = True
    if not used[0]:
        raise MeshError('the pole vertex was dropped by the triangulation')
    boundary_ids = np.arange(n_inner, len(points))
    if not np.all(used[boundary_ids]):
        raise MeshError('some boundary vertices are not in the triangulation')
    new_index = np.cumsum(used) - 1
    vertices = points[used]
    triangles = new_index[simplices]
    boundary_vertices = new_index[boundary_ids]
    _validate(vertices, triangles, boundary_vertices)

    logger.debug('meshed domain: %d vertices, %d triangles, pole (%g, %g)',
                 len(vertices), len(triangles), pole[0], pole[1])
    return Mesh(vertices=vertices, triangles=triangles,
                boundary_vertices=boundary_vertices, pole_vertex=0,
                grading_exponent=float(grading_exponent), h_max=float(h_max),
                h_min_floor=float(h_min_floor), domain=domain,
                anchor=(float(pole[0]), float(pole[1])),
                anchor_vertices=vertices)


def _morph_weight(s, inner, outer):
    t = np.clip((s - inner) / (outer - inner), 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


def remesh_for_pole(mesh, new_pole):
    """Mesh for a new pole with the same domain, h_max and grading.

    Small moves morph the anchor mesh smoothly (topology kept, vertices
    farther than 3/4 of the anchor's boundary distance untouched); larger
    moves regenerate the mesh around the new pole. Deterministic in its
    inputs.

    Raises:
        MeshError: Imported mesh without domain, or as mesh_domain.
    """
    if mesh.domain is None:
        raise MeshError('cannot remesh a mesh without its domain')
    new_pole = np.array(new_pole, dtype=float)
    _check_pole(mesh.domain, new_pole, mesh.h_max)
    anchor = np.asarray(mesh.anchor, dtype=float)
    delta = new_pole - anchor
    dist_b = mesh.domain.distance_to_boundary(anchor)
    if np.linalg.norm(delta) > MORPH_FRACTION * dist_b:
        return mesh_domain(mesh.domain, new_pole, mesh.h_max,
                           mesh.grading_exponent, mesh.h_min_floor)

    base = mesh.anchor_vertices
    s = np.linalg.norm(base - anchor, axis=1)
    weight = _morph_weight(s, 0.25 * dist_b, 0.75 * dist_b)
    vertices = base + weight[:, None] * delta[None, :]
    vertices[mesh.pole_vertex] = new_pole
    _validate(vertices, mesh.triangles, mesh.boundary_vertices)
    return Mesh(vertices=vertices, triangles=mesh.triangles,
                boundary_vertices=mesh.boundary_vertices,
                pole_vertex=mesh.pole_vertex,
                grading_exponent=mesh.grading_exponent, h_max=mesh.h_max,
                h_min_floor=mesh.h_min_floor, domain=mesh.domain,
                anchor=mesh.anchor, anchor_vertices=base)


def mesh_quality(mesh):
    """Inradius over diameter of every element (equilateral: 0.2887)."""
    perimeter = mesh.edge_lengths.sum(axis=1)
    inradius = 2.0 * mesh.areas / perimeter
    return inradius / mesh.diameters


def grading_bound(mesh):
    """Per-element ratio diam(T) / (2 h(d)) of the grading law; <= 1 holds."""
    d = np.linalg.norm(mesh.centroids - np.asarray(mesh.pole), axis=1)
    diameter = mesh.domain.diameter if mesh.domain is not None else float(
        pdist(mesh.vertices[mesh.boundary_vertices]).max())
    law = _grading_size(d, mesh.h_max, diameter, mesh.grading_exponent,
                        mesh.h_min_floor)
    return mesh.diameters / (2.0 * law)


# ---------------------------------------------------------------------------- #
#                                  Mesh files                                  #
# ---------------------------------------------------------------------------- #

def write_mesh(mesh, path):
    """Write the ``abmesh 1`` text format (17 significant digits)."""
    with open(path, 'w', newline='\n') as file_obj:
        file_obj.write(MESH_FORMAT_HEADER + '\n')
        file_obj.write('# h_max %.17g\n' % mesh.h_max)
        file_obj.write('# grading_exponent %.17g\n' % mesh.grading_exponent)
        file_obj.write('# h_min_floor %.17g\n' % mesh.h_min_floor)
        for x, y in mesh.vertices:
            file_obj.write('v %.17g %.17g\n' % (x, y))
        for i, j, k in mesh.triangles:
            file_obj.write('t %d %d %d\n' % (i, j, k))
        for i in mesh.boundary_vertices:
            file_obj.write('b %d\n' % i)
        file_obj.write('p %d\n' % mesh.pole_vertex)
    return path


def read_mesh(path):
    """Read an ``abmesh 1`` file back into a Mesh (with its domain)."""
    meta = {'h_max': None, 'grading_exponent': 1.0, 'h_min_floor': 1e-5}
    vertices, triangles, boundary, pole = [], [], [], None
    with open(path, 'r') as file_obj:
        header = file_obj.readline().strip()
        if header != MESH_FORMAT_HEADER:
            raise MeshError('not an abmesh 1 file: %r' % header)
        for line in file_obj:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == '#':
                if len(parts) == 3 and parts[1] in meta:
                    meta[parts[1]] = float(parts[2])
                continue
            tag = parts[0]
            if tag == 'v':
                vertices.append((float(parts[1]), float(parts[2])))
            elif tag == 't':
                triangles.append((int(parts[1]), int(parts[2]), int(parts[3])))
            elif tag == 'b':
                boundary.append(int(parts[1]))
            elif tag == 'p':
                pole = int(parts[1])
            else:
                raise MeshError('unknown abmesh record %r' % tag)
    if pole is None:
        raise MeshError('abmesh file has no pole record')
    vertices = np.array(vertices, dtype=float)
    triangles = np.array(triangles, dtype=int)
    boundary = np.array(boundary, dtype=int)
    _validate(vertices, triangles, boundary)
    domain = Domain(vertices[boundary], False)
    domain = Domain(domain.boundary, bool(domain.contains(np.zeros((1, 2)))[0]))
    h_max = meta['h_max']
    if h_max is None:
        h_max = float(np.max(np.linalg.norm(
            vertices[triangles[:, 1]] - vertices[triangles[:, 0]], axis=1)))
    pole_xy = (float(vertices[pole, 0]), float(vertices[pole, 1]))
    return Mesh(vertices=vertices, triangles=triangles,
                boundary_vertices=boundary, pole_vertex=pole,
                grading_exponent=meta['grading_exponent'], h_max=h_max,
                h_min_floor=meta['h_min_floor'], domain=domain,
                anchor=pole_xy, anchor_vertices=vertices)
