"""Bernardi-Raugel velocity space and piecewise-constant pressure space.

Velocity DOFs are numbered as ``2 v`` / ``2 v + 1`` for the x / y component at
vertex ``v``, followed by one DOF per facet (``2 n_vertices + f``) that
multiplies the facet bubble ``lambda_a lambda_b n_F``.  Local ordering on a
triangle is ``(v0x, v0y, v1x, v1y, v2x, v2y, b0, b1, b2)`` where bubble ``i``
lives on the facet opposite local vertex ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fields import FieldFunction
from .mesh import Mesh
from .quadrature import gauss_segment

N_LOCAL = 9
# local vertex pairs spanning the facet opposite local vertex i
FACET_VERTICES = np.array([[1, 2], [2, 0], [0, 1]])
# 5 points integrate facet data exactly up to degree 9
FACET_POINTS = 5
FLUX_TOL = 1e-14
FLUX_MAX_DEPTH = 40
FLUX_MAX_SEGMENTS = 100_000


class VelocitySpace:
    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.n_vertex_dofs = 2 * mesh.n_vertices
        self.n_bubble_dofs = mesh.n_facets
        self.total_dofs = self.n_vertex_dofs + self.n_bubble_dofs

        tri = mesh.triangles
        dofs = np.empty((mesh.n_triangles, N_LOCAL), dtype=np.int64)
        dofs[:, 0:6:2] = 2 * tri
        dofs[:, 1:6:2] = 2 * tri + 1
        dofs[:, 6:] = self.n_vertex_dofs + mesh.triangle_facets
        dofs.setflags(write=False)
        self.local_dofs = dofs

        bv = mesh.boundary_vertex_ids
        bf = np.flatnonzero(mesh.facet_boundary)
        dirichlet = np.concatenate([2 * bv, 2 * bv + 1, self.n_vertex_dofs + bf])
        dirichlet.sort()
        dirichlet.setflags(write=False)
        self.dirichlet_dofs = dirichlet
        free = np.ones(self.total_dofs, dtype=bool)
        free[dirichlet] = False
        self.free_dofs = np.flatnonzero(free)
        self.free_dofs.setflags(write=False)

    @cached_property
    def bary_grads(self):
        return self.mesh.barycentric_gradients()

    @cached_property
    def local_normals(self):
        """Global normals of the three local facets, ``(n_t, 3, 2)``."""
        return self.mesh.facet_normals[self.mesh.triangle_facets]

    def tabulate(self, bary, elements=None):
        """Basis values ``(n_t, n_q, 9, 2)`` and gradients ``(n_t, n_q, 9, 2, 2)``
        at barycentric points ``bary`` of shape ``(n_q, 3)``."""
        bary = np.atleast_2d(np.asarray(bary, dtype=float))
        grads = self.bary_grads
        normals = self.local_normals
        if elements is not None:
            grads = grads[elements]
            normals = normals[elements]
        n_t, n_q = len(grads), len(bary)

        values = np.zeros((n_t, n_q, N_LOCAL, 2))
        gradients = np.zeros((n_t, n_q, N_LOCAL, 2, 2))
        for i in range(3):
            for c in range(2):
                values[:, :, 2 * i + c, c] = bary[None, :, i]
                gradients[:, :, 2 * i + c, c, :] = grads[:, None, i, :]

        a, b = FACET_VERTICES[:, 0], FACET_VERTICES[:, 1]
        bubble = bary[:, a] * bary[:, b]  # (n_q, 3)
        values[:, :, 6:, :] = bubble[None, :, :, None] * normals[:, None, :, :]
        # grad(la lb) = la grad lb + lb grad la
        dbubble = (bary[None, :, a, None] * grads[:, None, b, :]
                   + bary[None, :, b, None] * grads[:, None, a, :])  # (n_t, n_q, 3, 2)
        gradients[:, :, 6:, :, :] = normals[:, None, :, :, None] * dbubble[:, :, :, None, :]
        return values, gradients

    def facet_flux_columns(self):
        """``(n_t, 3, 9)``: row ``i`` holds ``int_{F_i} phi_j . n_{F_i} ds`` for the
        local basis, exact (the traces are at most quadratic)."""
        mesh = self.mesh
        n_t = mesh.n_triangles
        lengths = mesh.facet_lengths[mesh.triangle_facets]
        normals = self.local_normals
        out = np.zeros((n_t, 3, N_LOCAL))
        for i in range(3):
            a, b = FACET_VERTICES[i]
            for c in range(2):
                out[:, i, 2 * a + c] = 0.5 * lengths[:, i] * normals[:, i, c]
                out[:, i, 2 * b + c] = 0.5 * lengths[:, i] * normals[:, i, c]
            out[:, i, 6 + i] = lengths[:, i] / 6.0
        return out

    def function(self, coefficients=None) -> "FemFunction":
        if coefficients is None:
            coefficients = np.zeros(self.total_dofs)
        return FemFunction(self, np.asarray(coefficients, dtype=float))


class PressureSpace:
    """Piecewise constants, one DOF per triangle."""

    def __init__(self, mesh: Mesh, zero_mean: bool = True):
        self.mesh = mesh
        self.zero_mean = zero_mean
        self.total_dofs = mesh.n_triangles

    @property
    def mass_diagonal(self):
        return self.mesh.areas

    def mean(self, coefficients):
        return float(self.mesh.areas @ coefficients) / self.mesh.total_area()

    def function(self, coefficients=None) -> "FemFunction":
        if coefficients is None:
            coefficients = np.zeros(self.total_dofs)
        return FemFunction(self, np.asarray(coefficients, dtype=float))


@dataclass
class FemFunction:
    space: object
    coefficients: np.ndarray

    def __post_init__(self):
        if len(self.coefficients) != self.space.total_dofs:
            raise ValueError(f"expected {self.space.total_dofs} coefficients, "
                             f"got {len(self.coefficients)}")

    @property
    def kind(self):
        return "velocity" if isinstance(self.space, VelocitySpace) else "pressure"

    def local_coefficients(self):
        if self.kind == "velocity":
            return self.coefficients[self.space.local_dofs]
        return self.coefficients[:, None]

    def evaluate(self, bary):
        """Values at barycentric points on every element: ``(n_t, n_q, 2)`` for
        velocities, ``(n_t, n_q)`` for pressures."""
        bary = np.atleast_2d(bary)
        if self.kind == "pressure":
            return np.broadcast_to(self.coefficients[:, None], (len(self.coefficients), len(bary)))
        values, _ = self.space.tabulate(bary)
        return np.einsum("tqjc,tj->tqc", values, self.local_coefficients())

    def evaluate_gradient(self, bary):
        """Gradients ``(n_t, n_q, 2, 2)`` of a velocity function."""
        _, grads = self.space.tabulate(np.atleast_2d(bary))
        return np.einsum("tqjab,tj->tqab", grads, self.local_coefficients())

    def __add__(self, other):
        return FemFunction(self.space, self.coefficients + other.coefficients)

    def __sub__(self, other):
        return FemFunction(self.space, self.coefficients - other.coefficients)

    def __mul__(self, s):
        return FemFunction(self.space, s * self.coefficients)

    __rmul__ = __mul__


def eval_velocity_basis(space: VelocitySpace, element: int, point):
    """The nine local basis functions of ``element`` at one barycentric point.

    Returns ``values`` of shape ``(9, 2)`` and physical ``gradients`` of shape
    ``(9, 2, 2)``.
    """
    values, grads = space.tabulate(np.asarray(point, dtype=float)[None, :], elements=[element])
    return values[0, 0], grads[0, 0]


def _segment_flux(v, a, b, n, s, w):
    pts = a[:, None, :] + s[None, :, None] * (b - a)[:, None, :]
    vals = v.at(pts)
    flux = (np.einsum("fqc,fc->fq", vals, n) @ w) * np.linalg.norm(b - a, axis=1)
    return flux, np.linalg.norm(vals, axis=2).max(axis=1)


def facet_normal_flux(mesh: Mesh, v: FieldFunction, facets=None):
    """``int_F v . n_F ds`` for the requested facets.

    Each facet is integrated with a 5-point Gauss rule (exact to degree 9)
    and bisected until the rule agrees with its two-panel version, so steep
    data on long facets is still integrated to near machine precision.
    """
    if facets is None:
        facets = np.arange(mesh.n_facets)
    facets = np.asarray(facets)
    s, w = gauss_segment(FACET_POINTS)
    total = np.zeros(len(facets))
    owner = np.arange(len(facets))
    a = mesh.vertices[mesh.facets[facets, 0]]
    b = mesh.vertices[mesh.facets[facets, 1]]
    n = mesh.facet_normals[facets]
    for depth in range(FLUX_MAX_DEPTH + 1):
        m = 0.5 * (a + b)
        whole, vmax = _segment_flux(v, a, b, n, s, w)
        left, _ = _segment_flux(v, a, m, n, s, w)
        right, _ = _segment_flux(v, m, b, n, s, w)
        halves = left + right
        scale = np.abs(halves) + np.linalg.norm(b - a, axis=1) * vmax
        done = np.abs(halves - whole) <= FLUX_TOL * scale
        if depth == FLUX_MAX_DEPTH or (~done).sum() > FLUX_MAX_SEGMENTS:
            done[:] = True
        np.add.at(total, owner[done], halves[done])
        keep = ~done
        if not keep.any():
            break
        a, m, b, n, owner = a[keep], m[keep], b[keep], n[keep], owner[keep]
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        n, owner = np.concatenate([n, n]), np.concatenate([owner, owner])
    return total


def _bubble_coefficients(mesh: Mesh, v: FieldFunction, vertex_values, facets):
    flux = facet_normal_flux(mesh, v, facets)
    n = mesh.facet_normals[facets]
    ell = mesh.facet_lengths[facets]
    ends = vertex_values[mesh.facets[facets, 0]] + vertex_values[mesh.facets[facets, 1]]
    linear_flux = 0.5 * ell * np.einsum("fc,fc->f", ends, n)
    return (flux - linear_flux) / (ell / 6.0)


def interpolate_br(space: VelocitySpace, v: FieldFunction) -> FemFunction:
    """Nodal values at vertices plus bubble coefficients matching the normal
    flux ``int_F v . n_F`` on every facet."""
    mesh = space.mesh
    vertex_values = v.at(mesh.vertices)
    coeffs = np.empty(space.total_dofs)
    coeffs[:space.n_vertex_dofs] = vertex_values.reshape(-1)
    coeffs[space.n_vertex_dofs:] = _bubble_coefficients(
        mesh, v, vertex_values, np.arange(mesh.n_facets))
    return FemFunction(space, coeffs)


@dataclass(frozen=True)
class DirichletConstraint:
    dofs: np.ndarray
    values: np.ndarray

    def to_dict(self):
        return dict(zip(self.dofs.tolist(), self.values.tolist()))


def apply_dirichlet(space: VelocitySpace, g: FieldFunction) -> DirichletConstraint:
    """Values of the constrained DOFs for boundary data ``g``: the
    :func:`interpolate_br` rule restricted to boundary vertices and facets."""
    mesh = space.mesh
    values = np.zeros(space.total_dofs)
    bv = mesh.boundary_vertex_ids
    vertex_values = np.zeros((mesh.n_vertices, 2))
    vertex_values[bv] = g.at(mesh.vertices[bv])
    values[2 * bv] = vertex_values[bv, 0]
    values[2 * bv + 1] = vertex_values[bv, 1]
    bf = np.flatnonzero(mesh.facet_boundary)
    if len(bf):
        values[space.n_vertex_dofs + bf] = _bubble_coefficients(mesh, g, vertex_values, bf)
    dofs = space.dirichlet_dofs
    return DirichletConstraint(dofs, values[dofs])
