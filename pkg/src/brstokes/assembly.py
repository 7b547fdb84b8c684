"""Assembly of the Bernardi-Raugel Stokes saddle-point system.

The discrete problem is

    nu a_h(u_h, v_h) + b_h(v_h, p_h) + b_h(u_h, q_h) = (f, I_h v_h)

with ``a_h(u, v) = (grad u, grad v)`` and ``b_h(v, q) = -(div v, q)``; ``I_h``
is the identity (standard method) or the RT0/BDM1 reconstruction applied to
the test functions of the load only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .fe_space import N_LOCAL, DirichletConstraint, PressureSpace, VelocitySpace, apply_dirichlet
from .fields import FieldFunction
from .mesh import Mesh
from .quadrature import quadrature
from .reconstruction import Reconstruction, ReconstructionVariant

DEFAULT_RHS_DEGREE = 6


def _csr(rows, cols, vals, shape):
    m = sp.coo_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=shape).tocsr()
    m.sum_duplicates()
    m.sort_indices()
    return m


def local_stiffness(space: VelocitySpace):
    """Unscaled element matrices ``(n_t, 9, 9)`` of ``(grad phi_j, grad phi_i)_T``."""
    rule = quadrature(2)
    _, grads = space.tabulate(rule.points)
    w = rule.weights[None, :] * space.mesh.areas[:, None]
    return np.einsum("tq,tqiab,tqjab->tij", w, grads, grads)


def assemble_stiffness(space: VelocitySpace, nu: float = 1.0):
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu!r}")
    K = nu * local_stiffness(space)
    dofs = space.local_dofs
    rows = np.repeat(dofs[:, :, None], N_LOCAL, axis=2)
    cols = np.repeat(dofs[:, None, :], N_LOCAL, axis=1)
    return _csr(rows, cols, K, (space.total_dofs, space.total_dofs))


def local_divergence(space: VelocitySpace):
    """``(n_t, 9)``: ``-int_T div phi_j`` (divergences are linear, so the
    centroid value times the area is exact)."""
    rule = quadrature(1)
    _, grads = space.tabulate(rule.points)
    div = np.trace(grads[:, 0], axis1=2, axis2=3)
    return -div * space.mesh.areas[:, None]


def assemble_divergence(space: VelocitySpace, pressure_space: PressureSpace):
    D = local_divergence(space)
    rows = np.repeat(np.arange(space.mesh.n_triangles)[:, None], N_LOCAL, axis=1)
    return _csr(rows, space.local_dofs, D, (pressure_space.total_dofs, space.total_dofs))


def assemble_rhs(space: VelocitySpace, f: FieldFunction, variant="identity",
                 quad_degree: int = DEFAULT_RHS_DEGREE, reconstruction=None):
    """Load vector ``rhs[i] = sum_T int_T f . (I_h phi_i)``."""
    variant = ReconstructionVariant.parse(variant)
    if quad_degree < 4:
        raise ValueError("load quadrature degree must be at least 4")
    rule = quadrature(quad_degree)
    if reconstruction is None or reconstruction.variant is not variant:
        reconstruction = Reconstruction(space, variant)
    test = reconstruction.basis_values(rule.points)  # (n_t, n_q, 9, 2)
    pts = rule.physical_points(space.mesh.element_points())
    fv = f.at(pts)
    w = rule.weights[None, :] * space.mesh.areas[:, None]
    local = np.einsum("tq,tqc,tqjc->tj", w, fv, test)
    return np.bincount(space.local_dofs.ravel(), weights=local.ravel(), minlength=space.total_dofs)


@dataclass
class SaddleSystem:
    """Assembled blocks on the full velocity space plus the boundary data.

    ``reduced()`` eliminates the constrained DOFs and borders the system with
    the zero-mean row ``c = areas``.
    """

    space: VelocitySpace
    pressure_space: PressureSpace
    A: sp.csr_matrix
    B: sp.csr_matrix
    rhs_u: np.ndarray
    dirichlet: DirichletConstraint
    nu: float
    variant: ReconstructionVariant
    c: np.ndarray = field(init=False)

    def __post_init__(self):
        self.c = np.asarray(self.pressure_space.mesh.areas, dtype=float)

    @property
    def n_free(self):
        return len(self.space.free_dofs)

    @property
    def n_p(self):
        return self.pressure_space.total_dofs

    @property
    def dimension(self):
        return self.n_free + self.n_p + 1

    def lifted_values(self):
        g = np.zeros(self.space.total_dofs)
        g[self.dirichlet.dofs] = self.dirichlet.values
        return g

    def reduced(self):
        """Bordered matrix ``K`` and right-hand side ``b`` in the unknowns
        ``(u_free, p, multiplier)``.

        K = [[A_II, B_I^T, 0], [B_I, 0, c], [0, c^T, 0]]
        """
        free = self.space.free_dofs
        g = self.lifted_values()
        A_II = self.A[free][:, free]
        B_I = self.B[:, free]
        b_u = self.rhs_u[free] - self.A[free] @ g
        b_p = -(self.B @ g)
        c = sp.csr_matrix(self.c.reshape(-1, 1))
        K = sp.bmat([[A_II, B_I.T, None],
                     [B_I, None, c],
                     [None, c.T, None]], format="csr")
        K.sort_indices()
        b = np.concatenate([b_u, b_p, [0.0]])
        return K, b

    def split(self, x):
        """Full velocity coefficients, pressure coefficients and multiplier from a
        reduced solution vector."""
        free = self.space.free_dofs
        u = self.lifted_values()
        u[free] = x[:len(free)]
        p = x[len(free):len(free) + self.n_p]
        return u, p, float(x[-1])


def build_system(mesh: Mesh, nu: float, f: FieldFunction, variant="identity",
                 g: FieldFunction = None, quad_degree: int = DEFAULT_RHS_DEGREE) -> SaddleSystem:
    if mesh is None or mesh.n_triangles == 0:
        raise ValueError("cannot build a system on an empty mesh")
    variant = ReconstructionVariant.parse(variant)
    space = VelocitySpace(mesh)
    pspace = PressureSpace(mesh)
    A = assemble_stiffness(space, nu)
    B = assemble_divergence(space, pspace)
    rhs = assemble_rhs(space, f, variant, quad_degree)
    if g is None:
        dirichlet = DirichletConstraint(space.dirichlet_dofs, np.zeros(len(space.dirichlet_dofs)))
    else:
        dirichlet = apply_dirichlet(space, g)
    return SaddleSystem(space, pspace, A, B, rhs, dirichlet, float(nu), variant)


def dump_coo(matrix, out):
    """Write ``row col value`` lines (0-based) to a path or text stream."""
    m = sp.coo_matrix(matrix)
    lines = "".join(f"{i} {j} {v!r}\n" for i, j, v in zip(m.row.tolist(), m.col.tolist(), m.data.tolist()))
    if hasattr(out, "write"):
        out.write(lines)
    else:
        with open(out, "w") as fh:
            fh.write(lines)
