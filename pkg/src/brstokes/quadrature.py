"""Quadrature on triangles (barycentric, area-normalized) and on segments."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._triangle_rules import RULES

MAX_DEGREE = 12


@dataclass(frozen=True)
class QuadratureRule:
    """Rule on a triangle: ``sum(weights * f(points))`` is the mean of ``f``."""

    points: np.ndarray  # (n, 3) barycentric
    weights: np.ndarray  # (n,), sums to 1
    degree: int

    def __len__(self):
        return len(self.weights)

    def physical_points(self, element_points):
        """Map to physical coordinates; ``element_points`` is ``(..., 3, 2)``."""
        return np.einsum("qi,...id->...qd", self.points, element_points)


def _expand(orbits):
    pts, wts = [], []
    for kind, w, *c in orbits:
        if kind == "s3":
            block = [(1 / 3, 1 / 3, 1 / 3)]
        elif kind == "s21":
            a = c[0]
            b = 1.0 - 2.0 * a
            block = [(a, a, b), (a, b, a), (b, a, a)]
        else:
            a, b = c
            r = 1.0 - a - b
            block = [(a, b, r), (a, r, b), (b, a, r), (b, r, a), (r, a, b), (r, b, a)]
        pts += block
        wts += [w] * len(block)
    pts = np.array(pts)
    wts = np.array(wts)
    return pts, wts / wts.sum()


@lru_cache(maxsize=None)
def quadrature(degree: int) -> QuadratureRule:
    """Smallest tabulated symmetric rule with positive weights and interior
    points that is exact for polynomials of total degree ``degree``.

    Degrees 3, 7 and 11 have no such tabulated rule of their own; the next
    higher one is returned and its ``degree`` attribute says so.
    """
    if int(degree) != degree or not 1 <= degree <= MAX_DEGREE:
        raise ValueError(f"quadrature degree must be an integer in [1, {MAX_DEGREE}], got {degree!r}")
    exact = min(d for d in RULES if d >= degree)
    pts, wts = _expand(RULES[exact])
    pts.setflags(write=False)
    wts.setflags(write=False)
    return QuadratureRule(pts, wts, exact)


@lru_cache(maxsize=None)
def gauss_segment(n_points: int):
    """Gauss-Legendre rule on [0, 1]; weights sum to 1. Exact to degree 2n-1."""
    x, w = np.polynomial.legendre.leggauss(n_points)
    s = 0.5 * (x + 1.0)
    w = 0.5 * w
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def segment_points_for_degree(degree: int) -> int:
    return max(1, (degree + 2) // 2)
