"""Direct solution of the bordered saddle-point system."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SingularSystemError
from .fe_space import FemFunction

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000
PIVOT_TOL = 1e-14
REFINEMENT_STEPS = 2


@dataclass
class Solution:
    u: FemFunction
    p: FemFunction
    residual_norm: float
    multiplier: float


def _dense_factor(K):
    Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
    with warnings.catch_warnings():
        # exact zero pivots are reported below with their location
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(Kd, check_finite=True)
    diag = np.abs(np.diag(lu))
    scale = max(diag.max(initial=0.0), np.abs(Kd).max(initial=0.0))
    small = diag <= PIVOT_TOL * scale
    if small.any():
        k = int(np.argmax(small))
        raise SingularSystemError(k, f"|pivot| = {diag[k]:.3e} (matrix scale {scale:.3e})")
    return lambda r: sla.lu_solve((lu, piv), r)


def _sparse_factor(K):
    K = sp.csc_matrix(K)
    try:
        lu = spla.splu(K, permc_spec="COLAMD")
    except RuntimeError as exc:
        raise SingularSystemError(-1, str(exc)) from None
    diag = np.abs(lu.U.diagonal())
    scale = max(diag.max(initial=0.0), abs(K).max())
    small = diag <= PIVOT_TOL * scale
    if small.any():
        k = int(np.argmax(small))
        raise SingularSystemError(int(lu.perm_c[k]), f"|pivot| = {diag[k]:.3e} (matrix scale {scale:.3e})")
    return lu.solve


def relative_residual(K, x, b):
    r = np.linalg.norm(K @ x - b)
    nb = np.linalg.norm(b)
    return float(r / nb) if nb > 0 else float(r)


def solve_linear(K, b, dense_limit: int = DENSE_LIMIT):
    """Solve ``K x = b`` by LU with partial pivoting (dense below
    ``dense_limit`` unknowns, SuperLU with a COLAMD ordering above) followed by
    a few steps of iterative refinement. Returns ``(x, relative_residual)``."""
    b = np.asarray(b, dtype=float)
    n = len(b)
    factor = _dense_factor(K) if n < dense_limit else _sparse_factor(K)
    x = factor(b)
    for _ in range(REFINEMENT_STEPS):
        r = b - K @ x
        if not np.linalg.norm(r) > 0:
            break
        x = x + factor(r)
    if not np.isfinite(x).all():
        raise SingularSystemError(-1, "non-finite solution")
    return x, relative_residual(K, x, b)


def solve(system) -> Solution:
    K, b = system.reduced()
    x, res = solve_linear(K, b)
    log.debug("solved system of size %d, relative residual %.2e", len(b), res)
    u, p, mult = system.split(x)
    return Solution(system.space.function(u), system.pressure_space.function(p), res, mult)
