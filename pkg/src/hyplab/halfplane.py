"""Upper half-plane geometry (curvature -1).

Points are complex numbers with positive imaginary part; boundary points
are reals or math.inf.  Geodesics are vertical lines and semicircles
orthogonal to the real axis, handled through their endpoints at infinity
and a unit-speed parameterization.  Most functions accept numpy arrays of
complex points and vectorize.
"""

import math

import numpy as np

INF = math.inf

EPS_PT = 1e-9


def dist(p, q):
    """Hyperbolic distance, cosh d = 1 + |p-q|^2 / (2 Im p Im q)."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    arg = 1.0 + np.abs(p - q) ** 2 / (2.0 * p.imag * q.imag)
    out = np.arccosh(np.maximum(arg, 1.0))
    return float(out) if out.ndim == 0 else out


def mobius_apply(m, z):
    """Apply a real Mobius matrix (a, b, c, d) to complex z (or inf)."""
    a, b, c, d = m
    if np.isscalar(z) or getattr(z, "ndim", 1) == 0:
        z = complex(z) if z != INF else INF
        if z == INF:
            return a / c if c != 0 else INF
        den = c * z + d
        if den == 0:
            return INF
        return (a * z + b) / den
    z = np.asarray(z, dtype=complex)
    return (a * z + b) / (c * z + d)


def mobius_apply_boundary(m, x):
    """Apply a Mobius matrix to a boundary point (real or inf)."""
    a, b, c, d = m
    if x == INF:
        return a / c if c != 0 else INF
    den = c * x + d
    if den == 0:
        return INF
    return (a * x + b) / den


def mobius_compose(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def mobius_inverse(m):
    a, b, c, d = m
    det = a * d - b * c
    return (d / det, -b / det, -c / det, a / det)


def mobius_to_infinity(xi):
    """A determinant-one real Mobius matrix sending boundary point xi to inf."""
    if xi == INF:
        return (1.0, 0.0, 0.0, 1.0)
    # z -> -1 / (z - xi)
    return (0.0, -1.0, 1.0, -float(xi))


def geodesic_endpoints(p, q):
    """Ideal endpoints (u, v) of the geodesic through interior points p, q,
    ordered so that travel p -> q heads toward v."""
    p, q = complex(p), complex(q)
    if abs(p.real - q.real) < EPS_PT * max(1.0, abs(p), abs(q)):
        x = 0.5 * (p.real + q.real)
        return (x, INF) if q.imag > p.imag else (INF, x)
    c = (abs(q) ** 2 - abs(p) ** 2) / (2.0 * (q.real - p.real))
    r = abs(p - c)
    u, v = c - r, c + r
    # p -> q moves toward the endpoint on q's side
    return (v, u) if q.real < p.real else (u, v)


def forward_endpoint(z, theta):
    """Ideal endpoint of the geodesic from interior point z with initial
    Euclidean tangent direction theta."""
    z = complex(z)
    c_ = math.cos(theta)
    if abs(c_) < 1e-15:
        return INF if math.sin(theta) > 0 else z.real
    c = z.real + z.imag * math.tan(theta)
    r = z.imag / abs(c_)
    return c + r if c_ > 0 else c - r


def direction_to(p, q):
    """Initial Euclidean tangent angle at p of the geodesic from p to q."""
    p, q = complex(p), complex(q)
    u, v = geodesic_endpoints(p, q)
    return direction_toward(p, v)


def direction_toward(p, xi):
    """Initial tangent angle at p of the geodesic ray toward boundary xi."""
    p = complex(p)
    if xi == INF:
        return 0.5 * math.pi
    if abs(xi - p.real) < EPS_PT:
        return -0.5 * math.pi
    # circle center c, radius r with endpoint xi; other endpoint mirror of xi
    c = 0.5 * (xi + (p.real ** 2 + p.imag ** 2 - xi * p.real) / (p.real - xi))
    # derive: |p - c| = |xi - c|
    phi = math.atan2(p.imag, p.real - c)
    # moving toward xi = c + r means phi decreasing; tangent = dz/d(-phi)
    if xi > c:
        return phi - 0.5 * math.pi
    return phi + 0.5 * math.pi


class Geodesic:
    """Unit-speed geodesic in the half-plane, given by its ideal endpoints
    (u toward -inf-time, v toward +inf-time) and an anchor point at t=0.

    Internally parameterized through the standard chart sending the
    geodesic to the positive imaginary axis; `sign` flips when v is the
    smaller endpoint.  point(t) accepts scalars or arrays.
    """

    __slots__ = ("u", "v", "sign", "sigma0", "vertical", "x0")

    def __init__(self, u, v, anchor):
        if u == v:
            raise ValueError("coincident ideal endpoints")
        self.u, self.v = u, v
        self.vertical = u == INF or v == INF
        anchor = complex(anchor)
        if self.vertical:
            self.x0 = u if v == INF else v
            self.sign = 1.0 if v == INF else -1.0
            self.sigma0 = math.log(anchor.imag)
        else:
            self.x0 = None
            self.sign = 1.0 if v > u else -1.0
            self.sigma0 = math.log(self._chart(anchor))
        if abs(self._anchor_defect(anchor)) > 1e-6:
            raise ValueError("anchor does not lie on the geodesic")

    def _chart(self, z):
        """|w| for w = (z - lo)/(hi - z); log of it is the axis parameter."""
        lo, hi = min(self.u, self.v), max(self.u, self.v)
        return abs((z - lo) / (hi - z))

    def _anchor_defect(self, z):
        if self.vertical:
            return z.real - self.x0
        lo, hi = min(self.u, self.v), max(self.u, self.v)
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return abs(z - c) - r

    def point(self, t):
        t = np.asarray(t, dtype=float)
        sigma = self.sigma0 + self.sign * t
        if self.vertical:
            out = self.x0 + 1j * np.exp(sigma)
        else:
            lo, hi = min(self.u, self.v), max(self.u, self.v)
            w = 1j * np.exp(sigma)
            out = (hi * w + lo) / (w + 1.0)
        out = np.asarray(out)
        return complex(out) if out.ndim == 0 else out

    def time_of(self, z):
        """Parameter t of the foot of z on the geodesic (exact if z on it)."""
        z = complex(z)
        if self.vertical:
            sigma = math.log(z.imag)
        else:
            sigma = math.log(self._chart(z))
        return self.sign * (sigma - self.sigma0)

    def __repr__(self):
        return f"Geodesic(u={self.u}, v={self.v})"


def segment(p, q):
    """Unit-speed geodesic with point(0)=p, point(d(p,q))=q."""
    u, v = geodesic_endpoints(p, q)
    return Geodesic(u, v, p)


def ray(p, xi):
    """Unit-speed ray with point(0)=p heading to boundary point xi."""
    p = complex(p)
    if xi == INF:
        return Geodesic(p.real, INF, p)
    if abs(xi - p.real) < EPS_PT:
        return Geodesic(INF, xi, p)
    c = 0.5 * (xi + (p.real ** 2 + p.imag ** 2 - xi * p.real) / (p.real - xi))
    r = abs(xi - c)
    other = c - r if xi > c else c + r
    return Geodesic(other, xi, p)


def line(xi, eta):
    """Unit-speed line from xi (t=-inf) to eta (t=+inf), origin at the
    point closest to i (vertical case: at height max(1,...) = |scale|)."""
    if xi == eta:
        raise ValueError("coincident boundary points")
    if xi == INF or eta == INF:
        x = eta if xi == INF else xi
        anchor = x + 1j
    else:
        c, r = 0.5 * (xi + eta), 0.5 * abs(eta - xi)
        anchor = c + 1j * r
    return Geodesic(xi, eta, anchor)


def busemann(q, p, xi):
    """b_p(q, xi) = lim_t d(q, c(t)) - t along the ray from p to xi.

    Closed form: conjugate xi to infinity, then b = ln Im(p') - ln Im(q').
    """
    m = mobius_to_infinity(xi)
    pp = mobius_apply(m, complex(p))
    qq = mobius_apply(m, complex(q))
    return math.log(pp.imag) - math.log(qq.imag)


def busemann_numeric(q, p, xi, horizon=30.0):
    """Oracle route: evaluate d(q, ray(t)) - t at large t, with the
    convergence gap between the last two probes reported."""
    r = ray(complex(p), xi)
    t1, t2 = horizon - 1.0, horizon
    v1 = dist(q, r.point(t1)) - t1
    v2 = dist(q, r.point(t2)) - t2
    return v2, abs(v2 - v1)


def gromov_beta(p, xi, eta):
    """beta_p(xi, eta) = -(b_p(q, xi) + b_p(q, eta)) for q on the line."""
    q = line(xi, eta).point(0.0)
    return -(busemann(q, p, xi) + busemann(q, p, eta))


def visual_half_angle(ball_radius, distance_to_center):
    """Half-angle subtended by a ball of hyperbolic radius rho seen from
    hyperbolic distance D: sin(theta) = sinh(rho) / sinh(D)."""
    s = math.sinh(ball_radius) / math.sinh(distance_to_center)
    if s >= 1.0:
        raise ValueError("viewpoint inside or on the ball")
    return math.asin(s)


def shadow_arc(x, p, rho):
    """Boundary interval (pair of ideal endpoints, counterclockwise from
    the first) of the shadow of B(p, rho) seen from x."""
    x, p = complex(x), complex(p)
    d = dist(x, p)
    if d <= rho:
        raise ValueError("viewpoint inside the ball")
    theta = visual_half_angle(rho, d)
    t0 = direction_to(x, p)
    return (forward_endpoint(x, t0 - theta), forward_endpoint(x, t0 + theta))


def shadow_arc_from_boundary(xi, x, rho):
    """Endpoints of pr_xi(B(x, rho)): geodesics emanating from boundary
    point xi through the ball.  Conjugate xi to infinity, where those
    geodesics are the vertical lines through the Euclidean disk."""
    m = mobius_to_infinity(xi)
    z = mobius_apply(m, complex(x))
    # hyperbolic ball -> Euclidean disk, center (x0, y0 cosh rho), radius y0 sinh rho
    lo = z.real - z.imag * math.sinh(rho)
    hi = z.real + z.imag * math.sinh(rho)
    mi = mobius_inverse(m)
    return (mobius_apply_boundary(mi, lo), mobius_apply_boundary(mi, hi))


def point_at(p, theta, r):
    """Point at hyperbolic distance r from p in tangent direction theta."""
    g = ray(complex(p), forward_endpoint(p, theta))
    return g.point(float(r))


def random_points(rng, n, radius, center=1j):
    """n points uniform w.r.t. hyperbolic area in B(center, radius)."""
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    r = np.arccosh(1.0 + rng.uniform(0.0, 1.0, size=n) * (math.cosh(radius) - 1.0))
    # rotate the vertical ray about i, then translate i -> center
    half = 0.5 * (theta - 0.5 * math.pi)
    z = 1j * np.exp(r)
    ca, sa = np.cos(half), np.sin(half)
    z = (ca * z + sa) / (-sa * z + ca)
    c = complex(center)
    return c.real + c.imag * z


def geodesic_sample(p, q, n):
    """n points evenly spaced (in arclength) along each segment p[i]->q[i].

    p, q: complex arrays of shape (m,).  Returns an (m, n) complex array.
    Vectorized over segments; vertical and circular cases handled by mask.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    m = p.shape[0]
    d = dist(p, q)
    frac = np.linspace(0.0, 1.0, n)
    out = np.empty((m, n), dtype=complex)

    scale = np.maximum(1.0, np.maximum(np.abs(p), np.abs(q)))
    vert = np.abs(p.real - q.real) < 1e-12 * scale
    if vert.any():
        pv, qv = p[vert], q[vert]
        s = np.log(pv.imag)[:, None] * (1 - frac) + np.log(qv.imag)[:, None] * frac
        out[vert] = pv.real[:, None] + 1j * np.exp(s)
    circ = ~vert
    if circ.any():
        pc, qc = p[circ], q[circ]
        c = (np.abs(qc) ** 2 - np.abs(pc) ** 2) / (2.0 * (qc.real - pc.real))
        r = np.abs(pc - c)
        u, v = c - r, c + r
        wp = (pc - u) / (v - pc)
        wq = (qc - u) / (v - qc)
        s = np.log(np.abs(wp))[:, None] * (1 - frac) + np.log(np.abs(wq))[:, None] * frac
        w = 1j * np.exp(s)
        out[circ] = (v[:, None] * w + u[:, None]) / (w + 1.0)
    return out


def dist_to_segment(z, p, q):
    """Distance from points z (shape (m, n)) to the geodesic segments
    p[i] -> q[i] (shape (m,)): closed-form foot-of-perpendicular distance,
    clamped to the nearer endpoint when the foot falls outside."""
    z = np.asarray(z, dtype=complex)
    p = np.asarray(p, dtype=complex)[:, None]
    q = np.asarray(q, dtype=complex)[:, None]
    scale = np.maximum(1.0, np.maximum(np.abs(p), np.abs(q)))
    vert = np.abs(p.real - q.real) < 1e-12 * scale

    # chart coordinate w: purely imaginary on the geodesic, sigma = log|w|
    with np.errstate(divide="ignore", invalid="ignore"):
        cc = (np.abs(q) ** 2 - np.abs(p) ** 2) / (2.0 * (q.real - p.real))
        r = np.abs(p - cc)
        lo, hi = cc - r, cc + r
        w = (z - lo) / (hi - z)
        wp = (p - lo) / (hi - p)
        wq = (q - lo) / (hi - q)
        # vertical fallback chart: w = z - x0 (|w|/Im w is the same invariant)
        x0 = p.real
        w = np.where(vert, z - x0, w)
        wp = np.where(vert, p - x0, wp)
        wq = np.where(vert, q - x0, wq)

    coshd = np.abs(w) / w.imag
    d_line = np.arccosh(np.maximum(coshd, 1.0))
    sig = np.log(np.abs(w))
    sp = np.log(np.abs(wp))
    sq = np.log(np.abs(wq))
    slo, shi = np.minimum(sp, sq), np.maximum(sp, sq)
    inside = (sig >= slo) & (sig <= shi)
    d_ends = np.minimum(dist(z, p), dist(z, q))
    return np.where(inside, d_line, d_ends)


def triangle_thinness(a, b, c, samples_per_side=24):
    """Slim-triangle defect of the triangles (a[i], b[i], c[i]): the max
    over sides of the max over sampled points on the side of the distance
    to the union of the other two sides.  Side points are sampled; the
    distance to each opposite side is exact."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    n = samples_per_side
    defect = np.zeros(a.shape[0])
    for (s1, s2), (o1, o2), (o3, o4) in (((a, b), (b, c), (c, a)),
                                         ((b, c), (c, a), (a, b)),
                                         ((c, a), (a, b), (b, c))):
        pts = geodesic_sample(s1, s2, n)
        dmin = np.minimum(dist_to_segment(pts, o1, o2),
                          dist_to_segment(pts, o3, o4))
        defect = np.maximum(defect, dmin.max(axis=1))
    return defect


def estimate_delta_mc(sample_count, radius, seed, samples_per_side=24,
                      batch=4096):
    """Monte-Carlo maximum slim-triangle defect over random triangles in
    B(i, radius).  Deterministic given the seed."""
    rng = np.random.default_rng(seed)
    best = 0.0
    left = int(sample_count)
    while left > 0:
        m = min(batch, left)
        pts = random_points(rng, 3 * m, radius)
        defect = triangle_thinness(pts[:m], pts[m:2 * m], pts[2 * m:],
                                   samples_per_side)
        best = max(best, float(defect.max()))
        left -= m
    return best
