"""Flat backend: the Euclidean plane with the Z^2 translation lattice.

The quotient is the unit-square torus.  Zero hyperbolicity (with explicit
witness triangles), polynomial orbit growth, zero entropy, and flat strips
of parallel geodesics: the negative controls for every hyperbolicity and
expansivity probe.
"""

import math

import numpy as np


def dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def torus_dist(p, q):
    dx = abs(p[0] - q[0]) % 1.0
    dy = abs(p[1] - q[1]) % 1.0
    return math.hypot(min(dx, 1.0 - dx), min(dy, 1.0 - dy))


class Line:
    """Unit-speed straight line t -> base + t * (cos theta, sin theta)."""

    __slots__ = ("base", "theta")

    def __init__(self, base, theta):
        self.base = (float(base[0]), float(base[1]))
        self.theta = float(theta)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        x = self.base[0] + t * math.cos(self.theta)
        y = self.base[1] + t * math.sin(self.theta)
        if x.ndim == 0:
            return (float(x), float(y))
        return np.stack([x, y], axis=-1)


def segment(p, q):
    theta = math.atan2(q[1] - p[1], q[0] - p[0])
    return Line(p, theta)


def lattice_ball(radius):
    """All lattice vectors v in Z^2 with |v| <= radius."""
    r = int(math.floor(radius))
    out = []
    for i in range(-r, r + 1):
        for j in range(-r, r + 1):
            if i * i + j * j <= radius * radius:
                out.append((i, j))
    return out


def orbit_counts(r_grid):
    """card {v in Z^2 : |v| <= R} for each R; quadratic growth."""
    return [len(lattice_ball(r)) for r in r_grid]


def witness_triangle(radius):
    """Equilateral triangle whose slim-triangle defect grows linearly with
    the side length: the flat plane is not Gromov hyperbolic.

    Returns (vertices, defect): defect = distance from a side midpoint to
    the other two sides = side * sqrt(3)/4.
    """
    s = float(radius)
    a = (0.0, 0.0)
    b = (s, 0.0)
    c = (s / 2.0, s * math.sqrt(3.0) / 2.0)
    defect = s * math.sqrt(3.0) / 4.0
    return (a, b, c), defect
