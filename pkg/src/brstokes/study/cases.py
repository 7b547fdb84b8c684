"""Manufactured Stokes solutions.

Each case carries hand-written vectorized fields and, separately, sympy
expressions of ``u`` and ``p``. On construction the numeric load is checked
against ``-nu lap(u) + grad(p)`` differentiated symbolically, and the
pressure mean against adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import sympy
from scipy import integrate

from ..fields import FieldFunction

RESIDUAL_TOL = 1e-9
MEAN_TOL = 1e-8
SECH_CLAMP = 350.0

X, Y = sympy.symbols("x y", real=True)


def sech2(t):
    """``sech(t)**2`` without overflow; exactly 0 for ``|t| > 350``."""
    t = np.abs(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    ok = t <= SECH_CLAMP
    out[ok] = (2.0 / (np.exp(t[ok]) + np.exp(-t[ok]))) ** 2
    return out


def log_cosh(t):
    t = abs(t)
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)


def layer_constant(epsilon):
    """Mean of ``tanh(y / sqrt(epsilon))`` over the unit square."""
    s = math.sqrt(epsilon)
    return s * log_cosh(1.0 / s)


@dataclass
class ManufacturedCase:
    name: str
    nu: float
    u: FieldFunction
    p: FieldFunction
    f: FieldFunction
    symbolic_u: tuple
    symbolic_p: object
    description: str = ""
    epsilon: Optional[float] = None
    extra_points: list = field(default_factory=list)
    seed: int = 20240

    def __post_init__(self):
        self.verify()

    @property
    def g(self):
        return self.u

    @property
    def has_layer(self):
        return self.epsilon is not None

    def residual(self, x, y):
        """``-nu lap(u) + grad(p) - f`` with numeric ``f`` and symbolic derivatives
        of ``u`` and ``p``; returns ``(residual, reference)`` arrays ``(n, 2)``."""
        u1, u2 = self.symbolic_u
        lap = [sympy.diff(c, X, 2) + sympy.diff(c, Y, 2) for c in (u1, u2)]
        gp = [sympy.diff(self.symbolic_p, X), sympy.diff(self.symbolic_p, Y)]
        exprs = [-self.nu * lap[k] + gp[k] for k in range(2)]
        fn = sympy.lambdify((X, Y), exprs, "numpy")
        ref = np.column_stack([np.broadcast_to(v, x.shape) for v in fn(x, y)]).astype(float)
        return self.f(x, y) - ref, ref

    def sample_points(self, n=100):
        rng = np.random.default_rng(self.seed)
        pts = rng.random((n, 2))
        if self.epsilon is not None:
            # concentrate half of the samples inside the layer
            pts[::2, 1] *= 5 * math.sqrt(self.epsilon)
        if self.extra_points:
            pts = np.vstack([pts, np.asarray(self.extra_points, dtype=float)])
        return pts

    def verify(self):
        pts = self.sample_points()
        x, y = pts[:, 0], pts[:, 1]
        res, ref = self.residual(x, y)
        scale = max(np.abs(ref).max(), np.abs(self.f(x, y)).max(), 1e-300)
        err = np.abs(res).max()
        if not err <= RESIDUAL_TOL * scale:
            raise ValueError(f"{self.name}: PDE residual {err:.3e} exceeds {RESIDUAL_TOL:g} x {scale:.3e}")

        u_exprs = sympy.lambdify((X, Y), list(self.symbolic_u), "numpy")
        grad_exprs = sympy.lambdify(
            (X, Y), [[sympy.diff(c, v) for v in (X, Y)] for c in self.symbolic_u], "numpy")
        u_ref = np.column_stack([np.broadcast_to(v, x.shape) for v in u_exprs(x, y)])
        g_ref = np.array([[np.broadcast_to(v, x.shape) for v in row] for row in grad_exprs(x, y)],
                         dtype=float)
        g_ref = np.moveaxis(g_ref, -1, 0)
        if np.abs(self.u(x, y) - u_ref).max() > RESIDUAL_TOL * max(1.0, np.abs(u_ref).max()):
            raise ValueError(f"{self.name}: velocity does not match its symbolic form")
        if np.abs(self.u.grad(x, y) - g_ref).max() > RESIDUAL_TOL * max(1.0, np.abs(g_ref).max()):
            raise ValueError(f"{self.name}: velocity gradient does not match its symbolic form")

        mean = self.pressure_mean()
        if not abs(mean) <= MEAN_TOL:
            raise ValueError(f"{self.name}: pressure mean {mean:.3e} is not zero")

    def pressure_mean(self):
        breaks = None
        if self.epsilon is not None:
            s = math.sqrt(self.epsilon)
            breaks = [k * s for k in (1, 3, 10, 30) if k * s < 1]

        def inner(x):
            return integrate.quad(lambda y: float(self.p(np.array(x), np.array(y))), 0.0, 1.0,
                                  points=breaks, limit=200, epsabs=1e-13, epsrel=1e-13)[0]

        return integrate.quad(inner, 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-12)[0]


def boundary_layer_case(epsilon: float, nu: float) -> ManufacturedCase:
    """``u = (tanh(y/sqrt(eps)), 0)``, ``p = tanh(y/sqrt(eps)) - C(eps)``."""
    if not epsilon > 0 or not nu > 0:
        raise ValueError("epsilon and nu must be positive")
    s = math.sqrt(epsilon)
    C = layer_constant(epsilon)

    def u(x, y):
        out = np.zeros(np.shape(y) + (2,))
        out[..., 0] = np.tanh(y / s)
        return out

    def grad_u(x, y):
        out = np.zeros(np.shape(y) + (2, 2))
        out[..., 0, 1] = sech2(y / s) / s
        return out

    def p(x, y):
        return np.tanh(y / s) - C + 0.0 * x

    def f(x, y):
        t = y / s
        sh = sech2(t)
        out = np.empty(np.shape(y) + (2,))
        out[..., 0] = (2.0 * nu / epsilon) * np.tanh(t) * sh
        out[..., 1] = sh / s
        return out

    p_sym = sympy.tanh(Y / sympy.sqrt(sympy.Float(epsilon, 30))) - C
    u_sym = (sympy.tanh(Y / sympy.sqrt(sympy.Float(epsilon, 30))), sympy.Integer(0))
    return ManufacturedCase(
        name="boundary-layer", nu=nu,
        u=FieldFunction(u, grad_u), p=FieldFunction(p, vector=False), f=FieldFunction(f),
        symbolic_u=u_sym, symbolic_p=p_sym,
        description=f"tanh boundary layer at y=0, epsilon={epsilon:g}, nu={nu:g}",
        epsilon=epsilon,
        extra_points=[[0.3, 0.0], [0.3, s], [0.3, 0.5], [0.3, 1.0]],
    )


def gradient_case(nu: float) -> ManufacturedCase:
    """Zero velocity driven by the pure gradient load ``grad(x^3 + y^3)``."""
    if not nu > 0:
        raise ValueError("nu must be positive")

    def u(x, y):
        return np.zeros(np.shape(x) + (2,))

    def grad_u(x, y):
        return np.zeros(np.shape(x) + (2, 2))

    def p(x, y):
        return x ** 3 + y ** 3 - 0.5

    def f(x, y):
        return np.stack([3.0 * x ** 2, 3.0 * y ** 2], axis=-1)

    return ManufacturedCase(
        name="gradient", nu=nu,
        u=FieldFunction(u, grad_u), p=FieldFunction(p, vector=False), f=FieldFunction(f),
        symbolic_u=(sympy.Integer(0), sympy.Integer(0)),
        symbolic_p=X ** 3 + Y ** 3 - sympy.Rational(1, 2),
        description=f"u = 0, p = x^3 + y^3 - 1/2, nu={nu:g}",
    )


def _bump(t):
    """``t^2 (1-t)^2`` and its first three derivatives."""
    return (t ** 2 * (1 - t) ** 2,
            2 * t * (1 - t) * (1 - 2 * t),
            2 - 12 * t + 12 * t ** 2,
            -12 + 24 * t)


def smooth_case(nu: float = 1.0) -> ManufacturedCase:
    """Divergence-free ``u = curl(x^2(1-x)^2 y^2(1-y)^2)`` with ``p = x - 1/2``."""
    if not nu > 0:
        raise ValueError("nu must be positive")

    def u(x, y):
        a, da, _, _ = _bump(x)
        b, db, _, _ = _bump(y)
        return np.stack([a * db, -da * b], axis=-1)

    def grad_u(x, y):
        a, da, d2a, _ = _bump(x)
        b, db, d2b, _ = _bump(y)
        out = np.empty(np.shape(x) + (2, 2))
        out[..., 0, 0] = da * db
        out[..., 0, 1] = a * d2b
        out[..., 1, 0] = -d2a * b
        out[..., 1, 1] = -da * db
        return out

    def p(x, y):
        return x - 0.5 + 0.0 * y

    def f(x, y):
        a, da, d2a, d3a = _bump(x)
        b, db, d2b, d3b = _bump(y)
        lap1 = d2a * db + a * d3b
        lap2 = -(d3a * b + da * d2b)
        return np.stack([-nu * lap1 + 1.0, -nu * lap2], axis=-1)

    psi = X ** 2 * (1 - X) ** 2 * Y ** 2 * (1 - Y) ** 2
    return ManufacturedCase(
        name="smooth", nu=nu,
        u=FieldFunction(u, grad_u), p=FieldFunction(p, vector=False), f=FieldFunction(f),
        symbolic_u=(sympy.diff(psi, Y), -sympy.diff(psi, X)),
        symbolic_p=X - sympy.Rational(1, 2),
        description=f"u = curl(x^2(1-x)^2 y^2(1-y)^2), p = x - 1/2, nu={nu:g}",
    )


CASES = {"boundary-layer": boundary_layer_case, "smooth": smooth_case, "gradient": gradient_case}
