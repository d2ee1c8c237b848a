"""Patterson-Sullivan measures and their quantitative checks.

Truncated Poincare series with tail bounds, the atomic orbital measures,
extrapolation of boundary-cell masses toward the critical exponent,
conformal-density and shadow-lemma checks, the pair measure on the double
boundary with its invariance test, closed-geodesic equidistribution, and
the two flow-measure validators (forward-cone mass and separated sets).
"""

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import flat, halfplane, modular, words
from .geometry import FLAT, PLANE, TREE, BackendMismatch

PAIR_WEIGHT_CAP = 1e6  # e^{h beta} above this: diagonal band, excluded


# ---------------------------------------------------------------------------
# boundary partitions

@dataclass(frozen=True)
class BoundaryPartition:
    """Finite partition of the boundary at infinity into disjoint cells.

    Tree cells are cylinders below reduced prefixes of a fixed depth.
    Plane cells are arcs of the visual circle at `base`, stored as angle
    intervals; the angle coordinate is the initial direction at `base` of
    the ray toward the boundary point.
    """

    backend: str
    cells: tuple
    base: object = None
    rank: int = 2

    def __len__(self):
        return len(self.cells)

    def representative(self, i):
        """A concrete boundary point inside cell i."""
        if self.backend == TREE:
            w = self.cells[i]
            cont = _forward_letter(w, self.rank)
            return words.BoundaryWord(cont, prefix=w)
        lo, hi = self.cells[i]
        return halfplane.forward_endpoint(self.base, 0.5 * (lo + hi))

    def locate_boundary(self, xi):
        """Index of the cell containing a boundary point."""
        if self.backend == TREE:
            depth = len(self.cells[0])
            return self.cells.index(xi.word(depth))
        return self.locate_angle(
            halfplane.direction_toward(complex(self.base), xi))

    def locate_angle(self, theta):
        n = len(self.cells)
        lo0 = self.cells[0][0]
        return int(math.floor(((theta - lo0) % (2.0 * math.pi))
                              / (2.0 * math.pi / n))) % n


def _forward_letter(w, rank):
    """First alphabet letter extending w without cancellation."""
    for c in words.letters(rank):
        if not w or c != words.inv_letter(w[-1]):
            return c
    raise AssertionError("rank >= 1 always leaves a forward letter")


def tree_partition(depth, rank=2):
    """All boundary cylinders of a fixed prefix depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cells = tuple(sorted(w for w in words.ball_words(depth, rank)
                         if len(w) == depth))
    return BoundaryPartition(TREE, cells, base="", rank=rank)


def plane_partition(n_arcs, base=1j):
    """Uniform visual arcs at `base`: n equal angle sectors."""
    if n_arcs < 2:
        raise ValueError("need at least 2 arcs")
    step = 2.0 * math.pi / n_arcs
    cells = tuple((-math.pi + i * step, -math.pi + (i + 1) * step)
                  for i in range(n_arcs))
    return BoundaryPartition(PLANE, cells, base=complex(base))


# ---------------------------------------------------------------------------
# atomic orbital measures

@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many weighted atoms at orbit points, with the truncation
    tail of the defining series bounded explicitly."""

    backend: str
    atoms: tuple  # ((point, weight), ...)
    total_mass: float
    tail_bound: float
    params: tuple  # ((name, value), ...)

    def __post_init__(self):
        if any(w < 0 for _, w in self.atoms):
            raise ValueError("atom weights must be nonnegative")
        p = dict(self.params)
        if "s" in p and "d_px" in p:
            lo = math.exp(-p["s"] * p["d_px"]) - self.tail_bound
            hi = math.exp(p["s"] * p["d_px"]) + self.tail_bound
            if not (lo - 1e-9 <= self.total_mass <= hi + 1e-9):
                raise ValueError("total mass outside the conformal-weight "
                                 f"bounds [{lo}, {hi}]")


def tree_series_closed_form(s, rank=2):
    """Exact value of the tree Poincare series: (1+x)/(1-(2k-1)x)."""
    x = math.exp(-s)
    q = (2 * rank - 1) * x
    if q >= 1.0:
        raise ValueError("series diverges at and below the growth exponent")
    return (1.0 + x) / (1.0 - q)


def poincare_series(backend, s, p=None, q=None, cap=30.0, rank=2):
    """Truncated Poincare series sum_gamma e^{-s d(p, gamma q)}.

    Returns (partial sum over the enumerated ball, tail bound).  Tree and
    flat tails are exact geometric/polynomial sums; the plane tail uses
    the measured upper growth constant C2 e^{R} of the orbit counts.
    """
    if backend == TREE:
        h = math.log(2 * rank - 1)
        if s <= h:
            raise ValueError(f"series diverges for s <= log({2 * rank - 1})")
        # homogeneous: d(p, gamma q) sweeps each vertex distance once
        x = math.exp(-s)
        n = int(math.floor(cap + 1e-9))
        ratio = (2 * rank - 1) * x
        partial = 1.0 + sum(2 * rank * (2 * rank - 1) ** (m - 1) * x ** m
                            for m in range(1, n + 1))
        tail = (2 * rank * (2 * rank - 1) ** n * x ** (n + 1)
                / (1.0 - ratio))
        return partial, tail
    if backend == PLANE:
        if s <= 1.0:
            raise ValueError("series diverges for s <= 1 (modular group)")
        p = 2j if p is None else complex(p)
        q = p if q is None else complex(q)
        atoms = _plane_atoms(p, q, cap)
        d = atoms.d
        partial = float(np.exp(-s * d).sum()) + atoms.base_atom
        # measured upper growth constant over the outer half of the ball
        c2 = _measured_c2(d, cap)
        tail = c2 * math.exp(-(s - 1.0) * cap) / (1.0 - math.exp(-(s - 1.0)))
        return partial, tail
    if backend == FLAT:
        if s <= 0:
            raise ValueError("series diverges for s <= 0")
        n = int(math.floor(cap + 1e-9))
        pts = flat.lattice_ball(cap)
        partial = sum(math.exp(-s * math.hypot(a, b)) for a, b in pts)
        # crude quadratic-growth tail: card sphere(m) <= 8m for m >= 1
        tail = sum(8 * (m + 1) * math.exp(-s * m) for m in range(n, n + 200))
        tail += 8 * (n + 201) * math.exp(-s * (n + 200)) / (1 - math.exp(-s))
        return partial, tail
    raise BackendMismatch(f"unknown backend {backend!r}")


def _apply_many(mats, z):
    a, b, c, d = mats[:, 0], mats[:, 1], mats[:, 2], mats[:, 3]
    return (a * z + b) / (c * z + d)


def _measured_c2(dists, cap):
    grid = np.arange(max(1.0, cap / 2.0), cap + 0.5, 1.0)
    counts = np.searchsorted(np.sort(dists), grid + 1e-12)
    return float(max(counts * np.exp(-grid)))


def ps_measure(backend, p, s, cap, x=None, rank=2):
    """The orbital measure nu_{p,x,s}: atoms e^{-s d(p, gamma x)} at the
    orbit points gamma x, normalized by the Poincare series at x."""
    if backend == TREE:
        p = p or ""
        x = p if x is None else x
        norm = tree_series_closed_form(s, rank)
        atoms = []
        for u in words.ball_words(int(cap), rank):
            v = words.mul(p, u)  # orbit point at distance |u| from p
            atoms.append((v, math.exp(-s * len(u)) / norm))
        _, tail_num = poincare_series(TREE, s, cap=cap, rank=rank)
        total = sum(w for _, w in atoms)
        return AtomicMeasure(TREE, tuple(atoms), total, tail_num / norm,
                             (("s", s), ("cap", cap), ("d_px", 0.0 if x == p
                                                       else float(words.distance(p, x)))))
    if backend == PLANE:
        p = complex(p)
        x = p if x is None else complex(x)
        npart, ntail = poincare_series(PLANE, s, p=x, q=x, cap=cap)
        ball = modular.modular_ball(p, cap, q=x)
        mats = np.asarray(ball.elements, dtype=float)
        z = _apply_many(mats, x)
        d = halfplane.dist(p, z)
        w = np.exp(-s * d) / npart
        _, num_tail = poincare_series(PLANE, s, p=p, q=x, cap=cap)
        total = float(w.sum())
        tail = num_tail / npart + total * ntail / npart
        atoms = tuple(zip(z.tolist(), w.tolist()))
        return AtomicMeasure(PLANE, atoms, total, tail,
                             (("s", s), ("cap", cap),
                              ("d_px", float(halfplane.dist(p, x)))))
    raise BackendMismatch(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# boundary-cell masses and the limit s -> h

def _tree_cell_masses(p, s, partition, cap):
    """Normalized nu_{p,x,s} masses of the cylinder cells, base p = root.

    Per-cell geometric sums in closed form (over the full orbit when
    cap=None): a cylinder of depth m holds (2k-1)^{n-m} orbit points at
    distance n, so its unnormalized mass is sum_n q^{n-m} x^n.
    """
    if p not in ("", None):
        raise BackendMismatch("tree finite-s cell masses are rooted at the "
                              "identity vertex")
    rank = partition.rank
    x = math.exp(-s)
    q = (2 * rank - 1) * x
    if q >= 1.0:
        raise ValueError("s at or below the growth exponent")
    norm = tree_series_closed_form(s, rank)
    out = []
    for w in partition.cells:
        m = len(w)
        if cap is None:
            cell = x ** m / (1.0 - q)
        else:
            n = int(cap) - m + 1
            cell = x ** m * (1.0 - q ** n) / (1.0 - q)
        out.append(cell / norm)
    return np.array(out)


def _ray_endpoints(p, z):
    """Boundary endpoint of the ray from p through each z (vectorized)."""
    p = complex(p)
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=float)
    vert = np.abs(z.real - p.real) < 1e-13
    up = z.imag >= p.imag
    out[vert & up] = math.inf
    out[vert & ~up] = p.real
    nz = ~vert
    zr, zi = z.real[nz], z.imag[nz]
    c = (zr * zr + zi * zi - abs(p) ** 2) / (2.0 * (zr - p.real))
    r = np.abs(p - c)
    out[nz] = np.where(zr > p.real, c + r, c - r)
    return out


def _angles_toward(base, xi):
    """Vectorized initial direction at `base` toward boundary points xi."""
    base = complex(base)
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape, dtype=float)
    isinf = np.isinf(xi)
    out[isinf] = 0.5 * math.pi
    fin = ~isinf
    x = xi[fin]
    same = np.abs(x - base.real) < 1e-13
    c = 0.5 * (x + (abs(base) ** 2 - x * base.real)
               / np.where(same, 1.0, base.real - x))
    phi = np.arctan2(base.imag, base.real - c)
    th = np.where(x > c, phi - 0.5 * math.pi, phi + 0.5 * math.pi)
    th = np.where(same, -0.5 * math.pi, th)
    out[fin] = np.mod(th + math.pi, 2.0 * math.pi) - math.pi
    return out


class _PlaneAtoms:
    """Cached orbit atoms around a base point: positions, distances and
    boundary directions, reused across the s grid."""

    def __init__(self, p, x, cap):
        self.p, self.x, self.cap = complex(p), complex(x), float(cap)
        ball = modular.modular_ball(self.p, cap, q=self.x)
        mats = np.asarray(ball.elements, dtype=float)
        z = _apply_many(mats, self.x)
        keep = np.abs(z - self.p) > 1e-12  # drop the atom at p itself
        self.z = z[keep]
        self.d = halfplane.dist(self.p, self.z)
        self.xi = _ray_endpoints(self.p, self.z)
        self.base_atom = int((~keep).sum())

    def cell_masses(self, s, partition, norm, floor=0.0):
        sel = self.d >= floor
        th = _angles_toward(partition.base, self.xi[sel])
        idx = np.array([partition.locate_angle(t) for t in th])
        w = np.exp(-s * self.d[sel])
        w /= w.sum() if norm is None else norm
        return np.bincount(idx, weights=w, minlength=len(partition))

    def interval_masses(self, s, intervals, partition, norm, floor=0.0):
        """Masses of arbitrary circular angle intervals (lo, hi) ccw.

        Atoms closer than `floor` are dropped; with norm=None the
        remaining weights are self-normalized, which estimates the limit
        measure without contamination from heavy near atoms.
        """
        sel = self.d >= floor
        th = np.mod(_angles_toward(partition.base, self.xi[sel]),
                    2.0 * math.pi)
        w = np.exp(-s * self.d[sel])
        w /= w.sum() if norm is None else norm
        order = np.argsort(th)
        th_s, w_s = th[order], np.concatenate(([0.0], np.cumsum(w[order])))
        out = []
        for lo, hi in intervals:
            lo, hi = lo % (2.0 * math.pi), hi % (2.0 * math.pi)
            if lo <= hi:
                a, b = np.searchsorted(th_s, [lo, hi])
                out.append(w_s[b] - w_s[a])
            else:
                a = np.searchsorted(th_s, lo)
                b = np.searchsorted(th_s, hi)
                out.append((w_s[-1] - w_s[a]) + w_s[b])
        return np.array(out)


_ATOM_CACHE = {}


def _plane_atoms(p, x, cap):
    key = (complex(p), complex(x), round(float(cap), 9))
    if key not in _ATOM_CACHE:
        _ATOM_CACHE[key] = _PlaneAtoms(p, x, cap)
    return _ATOM_CACHE[key]


DEFAULT_PAIR_CAP = 14.0


def _annulus_limit_masses(p, partition, intervals=None, s_grid=None,
                          cap=None):
    """Extrapolated limit masses from the outer atom annulus only.

    Heavy atoms near p carry no limit mass (the diverging normalizer
    kills every bounded region as s -> h) but dominate small cells at
    finite cap; dropping the inner half of the ball removes that bias.
    """
    s_grid = DEFAULT_S_GRID_PLANE if s_grid is None else s_grid
    cap = DEFAULT_PAIR_CAP if cap is None else float(cap)
    atoms = _plane_atoms(complex(p), complex(p), cap)
    floor = 0.5 * cap
    rows = []
    for s in s_grid:
        if intervals is None:
            rows.append(atoms.cell_masses(s, partition, None, floor))
        else:
            rows.append(atoms.interval_masses(s, intervals, partition,
                                              None, floor))
    masses, err, _ = extrapolate_to_h(rows, s_grid, 1.0)
    return masses, err


def cell_masses(backend, p, s, partition, cap=None, x=None, rank=2):
    """Cell masses of nu_{p,x,s} pushed to the boundary partition."""
    if backend == TREE:
        return _tree_cell_masses(p, s, partition, cap)
    if backend == PLANE:
        p = complex(p)
        x = p if x is None else complex(x)
        cap = 12.0 if cap is None else cap
        norm, _ = poincare_series(PLANE, s, p=x, q=x, cap=cap)
        return _plane_atoms(p, x, cap).cell_masses(s, partition, norm)
    raise BackendMismatch(f"unknown backend {backend!r}")


def extrapolate_to_h(values_by_s, s_grid, h):
    """Richardson extrapolation of cell masses along a geometric s grid.

    s_grid must decrease toward h with (s-h) in a fixed ratio; assuming
    first-order behavior m(s) = m(h) + c (s-h) + O((s-h)^2), successive
    pairs give extrapolants whose last difference is the error estimate.
    Returns (extrapolated array, error estimate, cauchy flag).
    """
    eps = np.array([s - h for s in s_grid])
    if not (np.all(eps > 0) and np.all(np.diff(eps) < 0)):
        raise ValueError("s grid must decrease strictly toward h")
    rows = [np.asarray(v, dtype=float) for v in values_by_s]
    extr = []
    for j in range(len(rows) - 1):
        r = eps[j + 1] / eps[j]
        extr.append((rows[j + 1] - r * rows[j]) / (1.0 - r))
    if len(extr) == 1:
        return extr[0], float(np.max(np.abs(extr[0] - rows[-1]))), True
    diffs = [float(np.max(np.abs(a - b))) for a, b in zip(extr, extr[1:])]
    cauchy = all(b <= a * 1.5 + 1e-15 for a, b in zip(diffs, diffs[1:]))
    return extr[-1], diffs[-1], cauchy


DEFAULT_S_GRID_TREE = tuple(math.log(3) + e for e in (0.4, 0.2, 0.1, 0.05))
DEFAULT_S_GRID_PLANE = (1.8, 1.4, 1.2, 1.1)


def limit_cell_masses(backend, p, partition, s_grid=None, cap=None, x=None):
    """Extrapolated s -> h boundary masses on all partition cells."""
    if backend == TREE:
        s_grid = DEFAULT_S_GRID_TREE if s_grid is None else s_grid
        h = math.log(2 * partition.rank - 1)
    elif backend == PLANE:
        s_grid = DEFAULT_S_GRID_PLANE if s_grid is None else s_grid
        h = 1.0
    else:
        raise BackendMismatch(f"unknown backend {backend!r}")
    rows = [cell_masses(backend, p, s, partition, cap=cap, x=x)
            for s in s_grid]
    return extrapolate_to_h(rows, s_grid, h)


def ps_limit_cylinder(backend, p, cell, s_grid=None, rank=2):
    """Extrapolated limit mass of one tree cylinder cell."""
    part = tree_partition(len(cell), rank)
    masses, err, ok = limit_cell_masses(backend, p, part, s_grid=s_grid)
    if not ok:
        raise RuntimeError("extrapolation not Cauchy")
    return masses[part.cells.index(cell)], err


# ---------------------------------------------------------------------------
# conformal density check

def conformal_check(backend, p, q, partition, s_grid=None, cap=None, x=None,
                    rank=2):
    """Max over cells of |log(nu_q/nu_p) + h b_p(q, xi_cell)|.

    Tree route is exact (rational masses, integer Busemann cocycle);
    plane route uses extrapolated arc masses and the closed-form Busemann
    function at each arc's representative direction.
    """
    if backend == TREE:
        worst = 0.0
        for i, w in enumerate(partition.cells):
            nu_p = words.visual_measure(p, w, rank)
            nu_q = words.visual_measure(q, w, rank)
            xi = partition.representative(i)
            b = words.tree_busemann(q, p, xi, rank)
            # exact check: nu_q/nu_p must equal (2k-1)^{-b}
            if nu_q / nu_p == Fraction(2 * rank - 1) ** (-b):
                continue
            defect = abs(math.log(float(nu_q / nu_p))
                         + math.log(2 * rank - 1) * b)
            worst = max(worst, defect)
        return worst
    if backend == PLANE:
        p, q = complex(p), complex(q)
        s_grid = DEFAULT_S_GRID_PLANE if s_grid is None else s_grid
        cap = 12.0 if cap is None else float(cap)
        x = p if x is None else complex(x)
        h = 1.0
        atoms = _plane_atoms(p, x, cap)
        dq = halfplane.dist(q, atoms.z)
        th = _angles_toward(partition.base, atoms.xi)
        idx = np.array([partition.locate_angle(t) for t in th])
        # Only the outer annulus of atoms carries the limit measure: as
        # s -> h the diverging normalizer kills the relative weight of
        # every bounded region, and on far atoms d(q,y) - d(p,y) has
        # already converged to the Busemann cocycle.
        far = atoms.d >= 0.5 * cap
        svals = np.asarray(s_grid, dtype=float)
        worst = 0.0
        skipped = 0
        for i in range(len(partition)):
            sel = far & (idx == i)
            if not sel.any():
                skipped += 1
                continue
            dpi, dqi = atoms.d[sel], dq[sel]
            ratio = np.array([np.exp(-s * dqi).sum() / np.exp(-s * dpi).sum()
                              for s in svals])
            # first-order fit of the log ratio in (s - h), read off at h
            coef = np.polyfit(svals - h, np.log(ratio), 1)
            b = halfplane.busemann(q, p, partition.representative(i))
            worst = max(worst, abs(coef[1] + h * b))
        if skipped:
            warnings.warn(f"{skipped} zero-mass cells excluded")
        return worst
    raise BackendMismatch(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# shadows and the shadow lemma

def shadow(backend, x, p, rho, rank=2):
    """The shadow pr_x B(p, rho): boundary points whose ray from x meets
    the ball around p.

    Tree route (rho < 1, so the ball is the single vertex p) returns an
    exact cylinder description: ("cyl", w) is the set of boundary words
    with prefix w, ("co-cyl", w) its complement.  Plane route returns
    ("arc", (lo, hi)) with the closed-form visual arc endpoints.
    """
    if backend == TREE:
        if not 0 < rho < 1:
            raise ValueError("tree route needs 0 < rho < 1 (vertex ball)")
        if x == p:
            raise ValueError("viewpoint inside the ball")
        path = words.geodesic_vertices(x, p)
        if len(p) > len(path[-2]):
            # the ray continues away from x into the subtree below p
            return ("cyl", p)
        # p is above x: rays through p are those leaving the subtree at n,
        # the neighbor of p on the path toward x
        return ("co-cyl", path[-2])
    if backend == PLANE:
        x, p = complex(x), complex(p)
        lo, hi = halfplane.shadow_arc(x, p, rho)
        return ("arc", (lo, hi))
    raise BackendMismatch(f"unknown backend {backend!r}")


def shadow_contains(backend, desc, xi, depth_hint=12):
    """Membership of a boundary point in a shadow description."""
    kind, data = desc
    if kind == "cyl":
        return xi.word(len(data)) == data
    if kind == "co-cyl":
        return xi.word(len(data)) != data
    if kind != "arc":
        raise ValueError(f"unknown shadow description {kind!r}")
    lo, hi = data
    # arc from lo to hi counterclockwise on the boundary circle
    th = _angles_toward(1j, np.array([lo, hi, xi]))
    a, b, t = np.mod(th - th[0], 2.0 * math.pi)
    return t <= b


def shadow_mass_bounds(backend, p, x, rho, partition=None, s_grid=None,
                       cap=None, rank=2):
    """(nu_p(shadow of B(x, rho)), ratio to e^{-h d(p,x)})."""
    if backend == TREE:
        desc = shadow(TREE, p, x, rho, rank)  # shadow of B(x,.) seen from p
        if desc[0] != "cyl":
            raise ValueError("mass bound route expects a proper shadow")
        mass = words.visual_measure(p, desc[1], rank)
        d = words.distance(p, x)
        ratio = float(mass) * float(2 * rank - 1) ** d
        return float(mass), ratio
    if backend == PLANE:
        p, x = complex(p), complex(x)
        lo, hi = halfplane.shadow_arc(p, x, rho)
        base_part = partition or plane_partition(256)
        th = _angles_toward(base_part.base,
                            np.array([lo, hi], dtype=float))
        interval = (th[0], th[1])
        s_grid = DEFAULT_S_GRID_PLANE if s_grid is None else s_grid
        cap = 12.0 if cap is None else cap
        rows = []
        for s in s_grid:
            norm, _ = poincare_series(PLANE, s, p=p, q=p, cap=cap)
            rows.append(_plane_atoms(p, p, cap)
                        .interval_masses(s, [interval], base_part, norm))
        mass, _, _ = extrapolate_to_h(rows, s_grid, 1.0)
        d = halfplane.dist(p, x)
        return float(mass[0]), float(mass[0] * math.exp(d))
    raise BackendMismatch(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# the pair measure on the double boundary

@dataclass(frozen=True)
class PairMeasure:
    """Weights e^{h beta_p(xi_i, xi_j)} nu(cell_i) nu(cell_j) on distinct
    cell pairs, with a reported excluded diagonal band."""

    backend: str
    base: object
    partition: BoundaryPartition
    weights: dict = field(compare=False)
    excluded: frozenset
    h: float

    def weight(self, i, j):
        if i == j:
            raise ValueError("diagonal pairs carry no pair-measure weight")
        return self.weights[(min(i, j), max(i, j))]


def pair_measure(backend, p, partition, masses=None, h=None, rank=2):
    """Build the pair measure from cell masses at representatives."""
    if backend == TREE:
        h = math.log(2 * rank - 1)
        if masses is None:
            masses = [words.visual_measure(p or "", w, rank)
                      for w in partition.cells]
        weights, excluded = {}, set()
        for i in range(len(partition)):
            for j in range(i + 1, len(partition)):
                lcp = words.common_prefix_len(partition.cells[i],
                                              partition.cells[j])
                factor = Fraction(2 * rank - 1) ** (2 * lcp)
                if float(factor) > PAIR_WEIGHT_CAP:
                    excluded.add((i, j))
                    continue
                weights[(i, j)] = factor * masses[i] * masses[j]
        return PairMeasure(TREE, p or "", partition, weights,
                           frozenset(excluded), h)
    if backend == PLANE:
        h = 1.0 if h is None else h
        p = complex(p)
        if masses is None:
            masses, _ = _annulus_limit_masses(p, partition)
        weights, excluded = {}, set()
        reps = [partition.representative(i) for i in range(len(partition))]
        for i in range(len(partition)):
            for j in range(i + 1, len(partition)):
                beta = halfplane.gromov_beta(p, reps[i], reps[j])
                factor = math.exp(h * beta)
                if factor > PAIR_WEIGHT_CAP:
                    excluded.add((i, j))
                    continue
                weights[(i, j)] = factor * masses[i] * masses[j]
        return PairMeasure(PLANE, p, partition, weights,
                           frozenset(excluded), h)
    raise BackendMismatch(f"unknown backend {backend!r}")


def cylinder_pushforward(g, w, rank=2):
    """Disjoint cylinders covering g . cyl(w), exactly.

    Cancellation at the g|w junction leaves a single cylinder unless w is
    absorbed entirely, in which case the image splits over the admissible
    continuation letters.
    """
    if not w:
        raise ValueError("cylinder prefix must be nonempty")
    n = len(w)
    if len(g) >= n and g[-n:] == words.inverse(w):
        stem = g[:-n]
        out = []
        for c in words.letters(rank):
            if c == words.inv_letter(w[-1]):
                continue
            out.extend(cylinder_pushforward(stem, c, rank) if stem
                       else [c])
        return out
    return [words.mul(g, w)]


def _exact_pair_mass(cells_a, cells_b, rank):
    """Exact pair-measure mass of (union of cylinders) x (union)."""
    total = Fraction(0)
    for a in cells_a:
        for b in cells_b:
            lcp = words.common_prefix_len(a, b)
            total += (Fraction(2 * rank - 1) ** (2 * lcp)
                      * words.cylinder_measure(a, rank)
                      * words.cylinder_measure(b, rank))
    return total


def pair_invariance_check(pm, gamma, s_grid=None, cap=None):
    """Max defect of mu-bar(gamma A x gamma B) against mu-bar(A x B).

    Tree route is exact rational arithmetic over the cylinder pushforward
    (defect must be identically zero); plane route re-bins the atomic
    masses over the Mobius image arcs and reports the max relative defect.
    """
    part = pm.partition
    if pm.backend == TREE:
        rank = part.rank
        worst = Fraction(0)
        for (i, j) in pm.weights:
            lhs = _exact_pair_mass([part.cells[i]], [part.cells[j]], rank)
            rhs = _exact_pair_mass(cylinder_pushforward(gamma,
                                                        part.cells[i], rank),
                                   cylinder_pushforward(gamma,
                                                        part.cells[j], rank),
                                   rank)
            worst = max(worst, abs(rhs - lhs))
        return float(worst)
    # plane: gamma is an integer matrix acting by Mobius maps.  The
    # image cell mass is computed by pushing the measure instead of the
    # set: nu_p(gamma A) = nu_{gamma^-1 p}(A) exactly, and the latter is
    # measured on the same atoms as nu_p(A), so the per-cell log ratio
    # is free of binning and truncation bias common to both.
    p = complex(pm.base)
    n = len(part)
    h = pm.h
    s_grid = DEFAULT_S_GRID_PLANE if s_grid is None else s_grid
    cap = DEFAULT_PAIR_CAP if cap is None else float(cap)
    atoms = _plane_atoms(p, p, cap)
    far = atoms.d >= 0.5 * cap
    q = modular.apply(modular.mat_inv(gamma), p)
    dq = halfplane.dist(q, atoms.z[far])
    dp = atoms.d[far]
    th = _angles_toward(part.base, atoms.xi[far])
    idx = np.array([part.locate_angle(t) for t in th])
    svals = np.asarray(s_grid, dtype=float)
    rows = []
    for s in svals:
        num = np.bincount(idx, weights=np.exp(-s * dq), minlength=n)
        den = np.bincount(idx, weights=np.exp(-s * dp), minlength=n)
        rows.append(np.log(num) - np.log(den))
    # first-order fit in (s - h) of each cell's log mass ratio
    rows = np.array(rows)
    usable = np.all(np.isfinite(rows), axis=0)
    if not usable.all():
        warnings.warn(f"{int((~usable).sum())} zero-mass cells excluded")
        rows[:, ~usable] = 0.0
    coef = np.polyfit(svals - h, rows, 1)
    log_ratio = coef[1]
    reps = [part.representative(i) for i in range(n)]
    greps = [halfplane.mobius_apply_boundary(gamma, r) for r in reps]
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in pm.excluded or not (usable[i] and usable[j]):
                continue
            beta = halfplane.gromov_beta(p, reps[i], reps[j])
            if math.exp(h * beta) > PAIR_WEIGHT_CAP:
                continue
            dlog = (h * (halfplane.gromov_beta(p, greps[i], greps[j])
                         - beta) + log_ratio[i] + log_ratio[j])
            worst = max(worst, abs(math.exp(dlog) - 1.0))
    return worst


# ---------------------------------------------------------------------------
# closed-geodesic equidistribution on the modular surface

# y levels cutting the fundamental domain into four regions of equal
# hyperbolic area pi/12 (area above height Y is 1/Y for Y >= 1)
_Y_CUTS = (4.0 / math.pi, 6.0 / math.pi, 12.0 / math.pi)


def _cell_index(z, theta, n_theta=4):
    ybin = np.digitize(z.imag, _Y_CUTS)
    tbin = np.minimum((theta / (2.0 * math.pi / n_theta)).astype(int),
                      n_theta - 1)
    return ybin * n_theta + tbin


def liouville_cell_masses(n_theta=4):
    """Reference masses of the 16 position x direction cells.

    Liouville measure is the product of the normalized hyperbolic area
    and the uniform angle; the y cuts are chosen so each of the 4 x 4
    cells carries exactly 1/16.  Verified here by quadrature on the area
    factor rather than asserted.
    """
    area = []
    xs = np.linspace(-0.5, 0.5, 4001)[:-1] + 1.0 / 8000
    floor = np.sqrt(1.0 - xs ** 2)
    cuts = (0.0,) + _Y_CUTS + (np.inf,)
    for lo, hi in zip(cuts, cuts[1:]):
        ylo = np.maximum(floor, lo)
        yhi = np.full_like(xs, hi)
        col = np.clip(1.0 / ylo - (0.0 if np.isinf(hi) else 1.0 / yhi),
                      0.0, None)
        area.append(col.mean())
    area = np.array(area)
    area /= area.sum()
    return np.repeat(area, n_theta) / n_theta


def equidistribution_test(census, T, n_theta=4, samples_per_unit=40):
    """Cell masses of the closed-geodesic measure mu_T against Liouville.

    mu_T averages arc length over all primitive classes of length <= T,
    normalized to a probability measure; each geodesic is sampled
    uniformly along one period, folded into the fundamental domain with
    its tangent direction, and binned into 16 position x direction cells.

    Returns (mu_masses, liouville_masses, per-cell gaps).
    """
    if census.backend != PLANE:
        raise BackendMismatch("equidistribution runs on the modular census")
    hist = np.zeros(4 * n_theta)
    total = 0.0
    for length, word in census.entries:
        if length > T + 1e-12:
            continue
        m = modular._word_matrix(word)
        geo, ell = modular.closed_geodesic_path(m)
        k = max(32, int(math.ceil(ell * samples_per_unit)))
        t0 = geo.time_of(_axis_anchor(geo))
        ts = t0 + (np.arange(k) + 0.5) * (ell / k)
        z = geo.point(ts)
        theta = _tangent_angles(z, geo.v)
        zf, tf = modular.fold_points(z, theta)
        idx = _cell_index(zf, tf, n_theta)
        hist += np.bincount(idx, minlength=4 * n_theta) * (ell / k)
        total += ell
    mu = hist / total
    ref = liouville_cell_masses(n_theta)
    return mu, ref, mu - ref


def _axis_anchor(geo):
    if geo.vertical:
        return complex(geo.x0, 1.0)
    c = 0.5 * (geo.u + geo.v)
    r = 0.5 * abs(geo.v - geo.u)
    return complex(c, r)


def _tangent_angles(z, fwd):
    """Tangent direction angles at points z of the geodesic toward the
    boundary point fwd (vectorized form of direction_toward)."""
    th = _angles_toward_points(z, fwd)
    return np.mod(th, 2.0 * math.pi)


def _angles_toward_points(z, xi):
    z = np.asarray(z, dtype=complex)
    if math.isinf(xi):
        return np.full(z.shape, 0.5 * math.pi)
    same = np.abs(xi - z.real) < 1e-13
    c = 0.5 * (xi + (np.abs(z) ** 2 - xi * z.real)
               / np.where(same, 1.0, z.real - xi))
    phi = np.arctan2(z.imag, z.real - c)
    th = np.where(xi > c, phi - 0.5 * math.pi, phi + 0.5 * math.pi)
    return np.where(same, -0.5 * math.pi, th)


# ---------------------------------------------------------------------------
# flow-measure validators (forward-cone mass and separated sets)

def validate_D_mass(p, x, r_prime, r, rank=2):
    """Exact flow mass of D(x, R', R) on the tree, with the c' candidate.

    D is the set of unit tangent vectors based in B(p, R') whose forward
    geodesic enters B(x, R).  The mass disintegrates over cylinder pairs:
    backward ends branch off the [p, x] segment at depth j (pair-measure
    factor (2k-1)^{2j}), forward ends fill the cylinder below x, and the
    time spent in B(p, R') along such a line is exactly 2(R' - j).

    Returns (mass, c' = mass * e^{h d(p,x)}).
    """
    if p not in ("", None):
        raise BackendMismatch("exact route is rooted at the identity")
    n = words.distance("", x)
    if n <= r:
        raise ValueError("need d(p, x) > R")
    if r_prime >= n:
        raise ValueError("exact route needs R' < d(p, x)")
    if r >= 1:
        raise ValueError("exact route needs R < 1 (vertex-ball target)")
    q = 2 * rank - 1
    nu_x = words.cylinder_measure(x, rank)
    mass = Fraction(0)
    for j in range(int(math.floor(r_prime)) + 1):
        u = x[:j]
        branch = Fraction(0)
        for c in words.letters(rank):
            if c == x[j]:
                continue  # the axis direction itself
            if u and c == words.inv_letter(u[-1]):
                continue  # not a reduced continuation
            branch += words.cylinder_measure(u + c, rank)
        leb = 2 * (Fraction(r_prime) - j)
        mass += branch * nu_x * Fraction(q) ** (2 * j) * leb
    c_prime = mass * Fraction(q) ** n
    return mass, c_prime


def _extended_path(u, x, horizon, rank=2):
    """Vertices along the line through u and x, continued past x."""
    path = words.geodesic_vertices(u, x)
    while len(path) < horizon + 1:
        path.append(path[-1] + _forward_letter(path[-1], rank))
    return path


def _sampled_ball_words(radius, budget, rank, seed=7):
    """Deterministic sample of reduced words of length <= radius."""
    rng = np.random.default_rng(seed)
    lets = words.letters(rank)
    out = {""}
    while len(out) < budget:
        m = int(rng.integers(0, radius + 1))
        w = ""
        for _ in range(m):
            choices = [c for c in lets
                       if not w or c != words.inv_letter(w[-1])]
            w += choices[int(rng.integers(0, len(choices)))]
        out.add(w)
    return sorted(out)


def validate_separated_bound(x, n, rho, r_prime, r, rank=2,
                             sample_budget=4000, seed=7):
    """Cardinality of a maximal (d_n, 2 r0)-separated subset of D(x,R',R).

    r0 = 4 delta + 3 rho with delta = 0 on the tree.  The domain is one
    flow line per base vertex in B(identity, R'), each aimed at x;
    separation is measured in the exact d_n metric and the subset is
    grown greedily in deterministic order.  Small balls are exhausted;
    larger ones are sampled within the budget, in which case the result
    is only a lower bound and flagged as such.

    Returns (cardinality, "exhaustive" | "sampled-lower-bound").
    """
    if words.distance("", x) < n + r + r_prime:
        raise ValueError("need d(x, p) >= n + R + R'")
    r0 = 3 * rho
    horizon = n + int(math.ceil(r_prime)) + 2
    radius = int(math.floor(r_prime))
    if words.ball_count(radius, rank) <= sample_budget:
        bases = sorted(words.ball_words(radius, rank))
        method = "exhaustive"
    else:
        bases = _sampled_ball_words(radius, sample_budget, rank, seed)
        method = "sampled-lower-bound"
    lines = [_extended_path(u, x, horizon + len(x), rank) for u in bases]
    kept = []
    for path in lines:
        ok = True
        for other in kept:
            dn = max(words.distance(path[t], other[t])
                     for t in range(n + 1))
            if dn < 2 * r0:
                ok = False
                break
        if ok:
            kept.append(path)
    return len(kept), method
