"""Broken H1 seminorm, L2 norms, the piecewise-constant L2 projection and
relative error reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fe_space import FemFunction, PressureSpace
from .fields import FieldFunction
from .quadrature import quadrature

ERROR_DEGREE = 8


def _mesh_of(*terms, mesh=None):
    for t in terms:
        if isinstance(t, FemFunction):
            return t.space.mesh
    if mesh is None:
        raise ValueError("a mesh is required when no finite element function is given")
    return mesh


def _degree(terms, degree):
    if degree is not None:
        return degree
    return ERROR_DEGREE if any(isinstance(t, FieldFunction) for t in terms) else 4


def _values(term, rule, mesh):
    if isinstance(term, FemFunction):
        return term.evaluate(rule.points)
    return term.at(rule.physical_points(mesh.element_points()))


def _gradients(term, rule, mesh):
    if isinstance(term, FemFunction):
        if term.kind != "velocity":
            raise ValueError("pressure functions have no H1 seminorm")
        return term.evaluate_gradient(rule.points)
    if term.gradient is None:
        raise ValueError("field has no analytic gradient")
    return term.grad_at(rule.physical_points(mesh.element_points()))


def elementwise_h1_squared(v, mesh=None, subtract=None, degree=None):
    terms = [t for t in (v, subtract) if t is not None]
    mesh = _mesh_of(*terms, mesh=mesh)
    rule = quadrature(_degree(terms, degree))
    g = _gradients(v, rule, mesh)
    if subtract is not None:
        g = g - _gradients(subtract, rule, mesh)
    sq = (g ** 2).reshape(g.shape[0], g.shape[1], -1).sum(axis=-1)
    return mesh.areas * (sq @ rule.weights)


def broken_h1_seminorm(v, mesh=None, subtract=None, degree=None) -> float:
    """``sqrt(sum_T ||grad(v - subtract)||_{0,T}^2)``.

    ``v`` and ``subtract`` may be velocity :class:`FemFunction` objects or
    vector :class:`FieldFunction` objects with an analytic gradient.
    """
    return float(np.sqrt(elementwise_h1_squared(v, mesh, subtract, degree).sum()))


def elementwise_l2_squared(q, mesh=None, subtract=None, degree=None):
    terms = [t for t in (q, subtract) if t is not None]
    mesh = _mesh_of(*terms, mesh=mesh)
    rule = quadrature(_degree(terms, degree))
    val = np.asarray(_values(q, rule, mesh), dtype=float)
    if subtract is not None:
        val = val - _values(subtract, rule, mesh)
    sq = val ** 2
    if sq.ndim == 3:
        sq = sq.sum(axis=-1)
    return mesh.areas * (sq @ rule.weights)


def l2_norm(q, mesh=None, subtract=None, degree=None) -> float:
    return float(np.sqrt(elementwise_l2_squared(q, mesh, subtract, degree).sum()))


def project_p0(q: FieldFunction, mesh, degree: int = ERROR_DEGREE) -> FemFunction:
    """Elementwise means of a scalar field."""
    rule = quadrature(degree)
    vals = q.at(rule.physical_points(mesh.element_points()))
    return PressureSpace(mesh).function(vals @ rule.weights)


@dataclass
class ErrorReport:
    h_max: float
    n_dofs: int
    err_u_1h: float
    err_p_0: float
    err_u_1h_rel: float
    err_p_0_rel: float


def error_report(solution, u: FieldFunction, p: FieldFunction, u_norm: float, p_norm: float,
                 degree: int = ERROR_DEGREE) -> ErrorReport:
    """Absolute and relative errors of a discrete solution. ``u_norm`` and
    ``p_norm`` are the exact-solution norms used as denominators."""
    eu = broken_h1_seminorm(solution.u, subtract=u, degree=degree)
    ep = l2_norm(solution.p, subtract=p, degree=degree)
    mesh = solution.u.space.mesh
    n_dofs = solution.u.space.total_dofs + solution.p.space.total_dofs
    return ErrorReport(mesh.h_max, n_dofs, eu, ep, eu / u_norm, ep / p_norm)
