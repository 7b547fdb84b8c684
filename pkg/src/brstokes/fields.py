"""Analytic scalar and vector fields evaluated on coordinate arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class FieldFunction:
    """A vectorized field ``value(x, y)``.

    For vector fields ``value`` returns shape ``x.shape + (2,)`` and
    ``gradient`` returns ``x.shape + (2, 2)`` with ``[..., a, b] = d v_a / d x_b``.
    For scalar fields ``value`` returns ``x.shape`` and ``gradient``
    ``x.shape + (2,)``.
    """

    value: Callable
    gradient: Optional[Callable] = None
    vector: bool = True

    def __call__(self, x, y):
        return self.value(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def grad(self, x, y):
        if self.gradient is None:
            raise ValueError("field has no analytic gradient")
        return self.gradient(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def at(self, points):
        points = np.asarray(points, dtype=float)
        return self(points[..., 0], points[..., 1])

    def grad_at(self, points):
        points = np.asarray(points, dtype=float)
        return self.grad(points[..., 0], points[..., 1])

    def __neg__(self):
        g = None if self.gradient is None else (lambda x, y: -self.gradient(x, y))
        return FieldFunction(lambda x, y: -self.value(x, y), g, self.vector)

    def scaled(self, s):
        g = None if self.gradient is None else (lambda x, y: s * self.gradient(x, y))
        return FieldFunction(lambda x, y: s * self.value(x, y), g, self.vector)


def constant_vector(c1, c2) -> FieldFunction:
    def value(x, y):
        out = np.empty(np.shape(x) + (2,))
        out[..., 0] = c1
        out[..., 1] = c2
        return out

    return FieldFunction(value, lambda x, y: np.zeros(np.shape(x) + (2, 2)))


def linear_vector(a, b, c, d, e, f) -> FieldFunction:
    """``(a + b x + c y, d + e x + f y)``."""

    def value(x, y):
        return np.stack([a + b * x + c * y, d + e * x + f * y], axis=-1)

    def gradient(x, y):
        out = np.empty(np.shape(x) + (2, 2))
        out[..., 0, 0], out[..., 0, 1] = b, c
        out[..., 1, 0], out[..., 1, 1] = e, f
        return out

    return FieldFunction(value, gradient)


def zero_vector() -> FieldFunction:
    return constant_vector(0.0, 0.0)


def scalar(value, gradient=None) -> FieldFunction:
    return FieldFunction(value, gradient, vector=False)
