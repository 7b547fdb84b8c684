"""Triangulations of the unit square: uniform and Shishkin-graded tensor meshes,
facet connectivity, and a plain-text exchange format."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import MeshError

BOUNDARY_TOL = 1e-14


class Vertex(NamedTuple):
    x: float
    y: float
    boundary_flag: bool


class Triangle(NamedTuple):
    vertex_ids: tuple
    facet_ids: tuple


class Facet(NamedTuple):
    vertex_ids: tuple
    normal: np.ndarray
    length: float
    adjacent_elements: tuple
    boundary_flag: bool


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class Mesh:
    """Conforming triangle mesh with derived facet data.

    Facets are numbered in lexicographic order of their sorted vertex pairs.
    ``triangle_facets[t, i]`` is the facet opposite local vertex ``i``.
    Every facet has a single global normal obtained by rotating the direction
    ``facets[f, 0] -> facets[f, 1]`` by +90 degrees.
    """

    def __init__(self, vertices, triangles):
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if len(triangles) == 0:
            raise MeshError("mesh has no triangles")
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise MeshError("triangle references a vertex index out of range")
        repeated = ((triangles[:, 0] == triangles[:, 1])
                    | (triangles[:, 1] == triangles[:, 2])
                    | (triangles[:, 0] == triangles[:, 2]))
        if repeated.any():
            t = int(np.argmax(repeated))
            raise MeshError(f"triangle {t} repeats a vertex index", element=t)

        p = vertices[triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        if (areas <= 0).any():
            t = int(np.argmax(areas <= 0))
            raise MeshError(f"triangle {t} has non-positive signed area", element=t)

        # local facet i joins local vertices (i+1, i+2)
        local = np.array([[1, 2], [2, 0], [0, 1]])
        pairs = np.sort(triangles[:, local], axis=2).reshape(-1, 2)
        facets, inverse, counts = np.unique(pairs, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)
        if (counts > 2).any():
            f = int(np.argmax(counts > 2))
            t = int(np.argmax(inverse == f)) // 3
            raise MeshError(f"facet {tuple(facets[f].tolist())} is shared by more than two triangles",
                            element=t)

        n_t = len(triangles)
        tri_facets = inverse.reshape(n_t, 3)
        owners = np.repeat(np.arange(n_t), 3)
        order = np.argsort(inverse, kind="stable")
        facet_elements = np.full((len(facets), 2), -1, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        facet_elements[:, 0] = owners[order[starts]]
        two = counts == 2
        facet_elements[two, 1] = owners[order[starts[two] + 1]]

        direction = vertices[facets[:, 1]] - vertices[facets[:, 0]]
        lengths = np.hypot(direction[:, 0], direction[:, 1])
        normals = np.column_stack([-direction[:, 1], direction[:, 0]]) / lengths[:, None]

        edge_len = lengths[tri_facets]
        perimeter = edge_len.sum(axis=1)
        longest = edge_len.max(axis=1)

        self.vertices = _frozen(vertices)
        self.triangles = _frozen(triangles)
        self.facets = _frozen(facets)
        self.triangle_facets = _frozen(tri_facets)
        self.facet_elements = _frozen(facet_elements)
        self.facet_normals = _frozen(normals)
        self.facet_lengths = _frozen(lengths)
        self.facet_boundary = _frozen(~two)
        self.areas = _frozen(areas)
        x, y = vertices[:, 0], vertices[:, 1]
        self.vertex_boundary = _frozen(
            (np.abs(x) <= BOUNDARY_TOL) | (np.abs(x - 1) <= BOUNDARY_TOL)
            | (np.abs(y) <= BOUNDARY_TOL) | (np.abs(y - 1) <= BOUNDARY_TOL))
        self.element_aspect_ratios = _frozen(longest * perimeter / (4.0 * areas))
        self.h_max = float(longest.max())
        self.aspect_ratio = float(self.element_aspect_ratios.max())

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_facets(self):
        return len(self.facets)

    def vertex(self, i) -> Vertex:
        x, y = self.vertices[i]
        return Vertex(float(x), float(y), bool(self.vertex_boundary[i]))

    def triangle(self, t) -> Triangle:
        return Triangle(tuple(int(v) for v in self.triangles[t]),
                        tuple(int(f) for f in self.triangle_facets[t]))

    def facet(self, f) -> Facet:
        adj = tuple(int(e) for e in self.facet_elements[f] if e >= 0)
        return Facet(tuple(int(v) for v in self.facets[f]), self.facet_normals[f].copy(),
                     float(self.facet_lengths[f]), adj, bool(self.facet_boundary[f]))

    def element_points(self, t=None):
        """Vertex coordinates of every triangle, shape ``(n_triangles, 3, 2)``."""
        if t is None:
            return self.vertices[self.triangles]
        return self.vertices[self.triangles[t]]

    def barycentric_gradients(self):
        """Constant gradients of the three barycentric coordinates, ``(n_t, 3, 2)``."""
        p = self.element_points()
        # grad lambda_i is the edge p_{i+1} -> p_{i+2} rotated by +90 degrees, over 2|T|
        e = np.roll(p, -2, axis=1) - np.roll(p, -1, axis=1)
        g = np.stack([-e[..., 1], e[..., 0]], axis=-1)
        return g / (2.0 * self.areas[:, None, None])

    def facet_orientation(self):
        """``sign[t, i] = n_F . n_outward`` for facet i of triangle t (+1 or -1)."""
        p = self.element_points()
        centroid = p.mean(axis=1)
        f = self.triangle_facets
        mid = 0.5 * (self.vertices[self.facets[f, 0]] + self.vertices[self.facets[f, 1]])
        outward = mid - centroid[:, None, :]
        s = np.einsum("tid,tid->ti", outward, self.facet_normals[f])
        return np.where(s > 0, 1.0, -1.0)

    def check_conforming(self):
        """Raise :class:`MeshError` if a vertex lies inside a boundary facet (hanging node)."""
        bnd = np.flatnonzero(self.facet_boundary)
        a = self.vertices[self.facets[bnd, 0]]
        b = self.vertices[self.facets[bnd, 1]]
        d = b - a
        L2 = np.einsum("fd,fd->f", d, d)
        for k in range(0, len(bnd), 256):
            sl = slice(k, k + 256)
            rel = self.vertices[None, :, :] - a[sl, None, :]
            s = np.einsum("fvd,fd->fv", rel, d[sl]) / L2[sl, None]
            cross = rel[..., 0] * d[sl, None, 1] - rel[..., 1] * d[sl, None, 0]
            dist = np.abs(cross) / np.sqrt(L2[sl, None])
            tol = 1e-12 * np.sqrt(L2[sl, None])
            hit = (s > 1e-12) & (s < 1 - 1e-12) & (dist < tol)
            if hit.any():
                fi, vi = np.argwhere(hit)[0]
                f = bnd[k + fi]
                raise MeshError(f"hanging vertex {vi} on facet {tuple(self.facets[f].tolist())}",
                                element=int(self.facet_elements[f, 0]))

    @property
    def boundary_vertex_ids(self):
        """Endpoints of boundary facets (topological boundary)."""
        return np.unique(self.facets[self.facet_boundary])

    def total_area(self):
        return float(self.areas.sum())

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return (np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.triangles, other.triangles))

    def __repr__(self):
        return (f"Mesh(vertices={self.n_vertices}, triangles={self.n_triangles}, "
                f"facets={self.n_facets}, h_max={self.h_max:.4g}, "
                f"aspect_ratio={self.aspect_ratio:.4g})")


def tensor_mesh(xs, ys) -> Mesh:
    """Tensor grid on the coordinate lines ``xs`` x ``ys``, every cell cut by
    its lower-left to upper-right diagonal."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    nx, ny = len(xs) - 1, len(ys) - 1
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    v00 = idx[:-1, :-1].ravel()
    v10 = idx[:-1, 1:].ravel()
    v11 = idx[1:, 1:].ravel()
    v01 = idx[1:, :-1].ravel()
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)
    return Mesh(vertices, triangles)


def build_uniform_mesh(n: int) -> Mesh:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    grid = np.arange(n + 1) / n
    return tensor_mesh(grid, grid)


def shishkin_levels(n: int, tau: float) -> np.ndarray:
    half = n // 2
    j = np.arange(half + 1)
    fine = tau * (2 * j / n)
    coarse = tau + (1.0 - tau) * (2 * j[1:] / n)
    levels = np.concatenate([fine, coarse])
    levels[-1] = 1.0
    return levels


def build_shishkin_mesh(nx: int, ny: int, tau: float) -> Mesh:
    """Uniform in x; in y, ``ny/2`` intervals on ``[0, tau]`` and ``ny/2`` on ``[tau, 1]``."""
    if int(nx) != nx or nx < 2:
        raise ValueError(f"nx must be an integer >= 2, got {nx!r}")
    if int(ny) != ny or ny < 2 or int(ny) % 2:
        raise ValueError(f"ny must be a positive even integer, got {ny!r}")
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau!r}")
    xs = np.arange(int(nx) + 1) / int(nx)
    return tensor_mesh(xs, shishkin_levels(int(ny), float(tau)))


def shishkin_transition(epsilon: float) -> float:
    """Layer width at which ``tanh(y / sqrt(epsilon))`` reaches 0.99, capped at 1/2."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    return min(0.5 * math.sqrt(epsilon) * math.log(199.0), 0.5)


def export_mesh(mesh: Mesh) -> str:
    lines = [f"vertices {mesh.n_vertices} / triangles {mesh.n_triangles}"]
    lines += [f"{x!r} {y!r}" for x, y in mesh.vertices.tolist()]
    lines += [f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    return "\n".join(lines) + "\n"


def _parse_header(line, lineno):
    tokens = line.replace("/", " ").split()
    if len(tokens) != 4 or tokens[0] != "vertices" or tokens[2] != "triangles":
        raise MeshError("expected header 'vertices N / triangles M'", lineno)
    try:
        n, m = int(tokens[1]), int(tokens[3])
    except ValueError:
        raise MeshError("vertex and triangle counts must be integers", lineno) from None
    if n < 3 or m < 1:
        raise MeshError("need at least 3 vertices and 1 triangle", lineno)
    return n, m


def import_mesh(text: str) -> Mesh:
    """Parse the plain-text format written by :func:`export_mesh`.

    Blank lines and ``#`` comments are skipped. Errors carry the 1-based line
    number of the offending record.
    """
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            records.append((lineno, line))
    if not records:
        raise MeshError("empty mesh description", 1)
    n, m = _parse_header(records[0][1], records[0][0])
    body = records[1:]
    if len(body) != n + m:
        last = body[-1][0] if body else records[0][0]
        raise MeshError(f"expected {n} vertex and {m} triangle lines, found {len(body)} records", last)

    vertices = np.empty((n, 2))
    for k, (lineno, line) in enumerate(body[:n]):
        parts = line.split()
        try:
            if len(parts) != 2:
                raise ValueError
            vertices[k] = [float(parts[0]), float(parts[1])]
        except ValueError:
            raise MeshError(f"malformed vertex line {line!r}", lineno) from None
        if not np.isfinite(vertices[k]).all():
            raise MeshError("non-finite vertex coordinate", lineno)

    triangles = np.empty((m, 3), dtype=np.int64)
    for k, (lineno, line) in enumerate(body[n:]):
        parts = line.split()
        try:
            if len(parts) != 3:
                raise ValueError
            tri = [int(s) for s in parts]
        except ValueError:
            raise MeshError(f"malformed triangle line {line!r}", lineno) from None
        if min(tri) < 0 or max(tri) >= n:
            raise MeshError("vertex index out of range", lineno)
        if len(set(tri)) < 3:
            raise MeshError("triangle repeats a vertex index", lineno)
        p = vertices[tri]
        area = 0.5 * ((p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1])
                      - (p[1, 1] - p[0, 1]) * (p[2, 0] - p[0, 0]))
        if area <= 0:
            raise MeshError("triangle has non-positive area (must be counterclockwise)", lineno)
        triangles[k] = tri

    try:
        mesh = Mesh(vertices, triangles)
        mesh.check_conforming()
    except MeshError as exc:
        if exc.line is None and exc.element is not None:
            raise MeshError(exc.message, body[n + exc.element][0]) from None
        raise
    return mesh
