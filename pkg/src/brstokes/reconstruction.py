"""Elementwise RT0 / BDM1 interpolation of Bernardi-Raugel velocities.

The interpolants are built on the physical triangle: the local H(div) space is
spanned by monomials in the scaled coordinates ``xi = (x - x_c) / h_T``,
``eta = (y - y_c) / h_T`` and the coefficients solve the facet-moment system

* RT0:  ``(1/|F|) int_F w . n_F      = (1/|F|) int_F v . n_F``   (3 equations)
* BDM1: ``(1/|F|) int_F w . n_F l_a  = (1/|F|) int_F v . n_F l_a`` for both
  endpoint hat functions ``l_a`` of each facet (6 equations)

with the global facet normals, so neighbouring elements agree on the normal
trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateElementError
from .fe_space import FACET_VERTICES, N_LOCAL, VelocitySpace
from .quadrature import gauss_segment

COND_LIMIT = 1e12
# three Gauss points: exact for the cubic integrands (quadratic trace x linear weight)
MOMENT_POINTS = 3


class ReconstructionVariant(str, enum.Enum):
    IDENTITY = "identity"
    RT0 = "rt0"
    BDM1 = "bdm1"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"br": cls.IDENTITY, "id": cls.IDENTITY, "br-rt": cls.RT0,
                   "br-bdm": cls.BDM1, "rt": cls.RT0, "bdm": cls.BDM1}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        return cls(key)

    @property
    def label(self):
        return {"identity": "BR", "rt0": "BR-RT", "bdm1": "BR-BDM"}[self.value]

    @property
    def n_coefficients(self):
        return {"identity": N_LOCAL, "rt0": 3, "bdm1": 6}[self.value]


@dataclass(frozen=True)
class LocalHdivField:
    """A reconstructed field on one element.

    ``coefficients`` refer to the scaled monomial basis of the element (see
    :meth:`Reconstruction.monomials`); for the identity variant they are the
    nine Bernardi-Raugel coefficients themselves.
    """

    element: int
    variant: ReconstructionVariant
    coefficients: np.ndarray


class Reconstruction:
    """Cached local reconstruction matrices for one velocity space and variant."""

    def __init__(self, space: VelocitySpace, variant="bdm1"):
        self.space = space
        self.variant = ReconstructionVariant.parse(variant)
        mesh = space.mesh
        p = mesh.element_points()
        self.centroids = p.mean(axis=1)
        self.scales = mesh.facet_lengths[mesh.triangle_facets].max(axis=1)

    @property
    def mesh(self):
        return self.space.mesh

    def monomials(self, points, elements=None):
        """Values ``(n_t, n_q, 2, k)`` of the local H(div) basis at physical
        ``points`` of shape ``(n_t, n_q, 2)``."""
        c = self.centroids if elements is None else self.centroids[elements]
        h = self.scales if elements is None else self.scales[elements]
        rel = (points - c[:, None, :]) / h[:, None, None]
        xi, eta = rel[..., 0], rel[..., 1]
        one, zero = np.ones_like(xi), np.zeros_like(xi)
        if self.variant is ReconstructionVariant.RT0:
            cols = [(one, zero), (zero, one), (xi, eta)]
        else:
            cols = [(one, zero), (zero, one), (xi, zero), (eta, zero), (zero, xi), (zero, eta)]
        return np.stack([np.stack(c, axis=-1) for c in cols], axis=-1)

    def monomial_divergence(self, elements=None):
        h = self.scales if elements is None else self.scales[elements]
        if self.variant is ReconstructionVariant.RT0:
            d = np.array([0.0, 0.0, 2.0])
        else:
            d = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 1.0])
        return d[None, :] / h[:, None]

    def _facet_samples(self):
        """Barycentric points ``(3, n_g, 3)``, 1D weights and endpoint hats on
        each local facet."""
        s, w = gauss_segment(MOMENT_POINTS)
        bary = np.zeros((3, len(s), 3))
        hats = np.zeros((3, len(s), 2))
        for i in range(3):
            a, b = FACET_VERTICES[i]
            bary[i, :, a] = 1.0 - s
            bary[i, :, b] = s
            hats[i, :, 0] = 1.0 - s
            hats[i, :, 1] = s
        return bary, w, hats

    def local_matrices(self, elements=None):
        """``(n, k, 9)`` maps from local BR coefficients to H(div) coefficients."""
        mesh = self.mesh
        ids = np.arange(mesh.n_triangles) if elements is None else np.atleast_1d(elements)
        n_t = len(ids)
        if self.variant is ReconstructionVariant.IDENTITY:
            return np.broadcast_to(np.eye(N_LOCAL), (n_t, N_LOCAL, N_LOCAL))
        bary, w, hats = self._facet_samples()
        n_g = len(w)
        flat = bary.reshape(-1, 3)
        phys = np.einsum("qi,tid->tqd", flat, mesh.element_points()[ids])
        br_vals, _ = self.space.tabulate(flat, elements=ids)  # (n_t, 3 n_g, 9, 2)
        mono = self.monomials(phys, elements=ids)  # (n_t, 3 n_g, 2, k)
        normals = self.space.local_normals[ids]

        br_vals = br_vals.reshape(n_t, 3, n_g, N_LOCAL, 2)
        mono = mono.reshape(n_t, 3, n_g, 2, -1)
        br_flux = np.einsum("tfgjc,tfc->tfgj", br_vals, normals)
        mono_flux = np.einsum("tfgcm,tfc->tfgm", mono, normals)
        if self.variant is ReconstructionVariant.RT0:
            rhs = np.einsum("tfgj,g->tfj", br_flux, w)
            lhs = np.einsum("tfgm,g->tfm", mono_flux, w)
        else:
            rhs = np.einsum("tfgj,g,gk->tfkj", br_flux, w, hats[0]).reshape(n_t, 6, N_LOCAL)
            lhs = np.einsum("tfgm,g,gk->tfkm", mono_flux, w, hats[0]).reshape(n_t, 6, -1)
        cond = np.linalg.cond(lhs)
        bad = ~(cond < COND_LIMIT)
        if bad.any():
            k = int(np.argmax(bad))
            raise DegenerateElementError(int(ids[k]), float(cond[k]))
        return np.linalg.solve(lhs, rhs)

    @cached_property
    def matrices(self):
        out = self.local_matrices()
        if out.flags.writeable:
            out.setflags(write=False)
        return out

    def reconstruct(self, local_coefficients):
        """H(div) coefficients ``(n_t, k)`` for BR local coefficients ``(n_t, 9)``."""
        return np.einsum("tkj,tj->tk", self.matrices, local_coefficients)

    def interpolate(self, element, v) -> LocalHdivField:
        v = np.asarray(v, dtype=float)
        if v.shape != (N_LOCAL,):
            raise ValueError("expected 9 local Bernardi-Raugel coefficients")
        cached = self.__dict__.get("matrices")
        R = cached[element] if cached is not None else self.local_matrices([element])[0]
        return LocalHdivField(int(element), self.variant, R @ v)

    def divergence(self, field: LocalHdivField) -> float:
        t = field.element
        if self.variant is ReconstructionVariant.IDENTITY:
            # mean divergence of the BR function
            flux = self.space.facet_flux_columns()[t]
            signs = self.mesh.facet_orientation()[t]
            return float(signs @ flux @ field.coefficients / self.mesh.areas[t])
        return float(self.monomial_divergence([t])[0] @ field.coefficients)

    def evaluate(self, field: LocalHdivField, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        t = field.element
        if self.variant is ReconstructionVariant.IDENTITY:
            bary = to_barycentric(self.mesh.element_points(t), points)
            values, _ = self.space.tabulate(bary, elements=[t])
            return np.einsum("qjc,j->qc", values[0], field.coefficients)
        mono = self.monomials(points[None], elements=[t])[0]
        return mono @ field.coefficients

    def basis_values(self, bary):
        """Values ``(n_t, n_q, 9, 2)`` of the reconstructed local basis at
        barycentric points."""
        if self.variant is ReconstructionVariant.IDENTITY:
            values, _ = self.space.tabulate(bary)
            return values
        phys = np.einsum("qi,tid->tqd", np.atleast_2d(bary), self.mesh.element_points())
        mono = self.monomials(phys)
        return np.einsum("tqcm,tmj->tqjc", mono, self.matrices)


def to_barycentric(element_points, points):
    """Barycentric coordinates ``(n, 3)`` of physical ``points`` in a triangle."""
    p0, p1, p2 = element_points
    T = np.column_stack([p1 - p0, p2 - p0])
    st = np.linalg.solve(T, (np.atleast_2d(points) - p0).T).T
    return np.column_stack([1.0 - st.sum(axis=1), st])


def rt0_interpolate(space, element, v) -> LocalHdivField:
    return Reconstruction(space, "rt0").interpolate(element, v)


def bdm1_interpolate(space, element, v) -> LocalHdivField:
    return Reconstruction(space, "bdm1").interpolate(element, v)


def reconstruct_divergence(space, field: LocalHdivField) -> float:
    return Reconstruction(space, field.variant).divergence(field)


def eval_reconstructed(space, field: LocalHdivField, points):
    return Reconstruction(space, field.variant).evaluate(field, points)
