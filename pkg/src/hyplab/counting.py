"""Orbit-growth and closed-geodesic statistics.

Censuses of orbit points in balls, volume-entropy fits with the two-sided
growth constants, primitive closed-geodesic counts on the exact backends,
and the Margulis-law ratio P(t)*h*t / e^{h t}.
"""

import bisect
import math
from dataclasses import dataclass, field

from . import flat, halfplane, modular, words
from .geometry import FLAT, PLANE, TREE, BackendMismatch


@dataclass(frozen=True)
class OrbitCensus:
    """Counts of {gamma : d(x, gamma x) <= R} on an increasing R grid."""

    backend: str
    base: object
    entries: tuple  # ((R, count), ...)
    complete: tuple  # per-entry completeness flags

    def __post_init__(self):
        rs = [r for r, _ in self.entries]
        cs = [c for _, c in self.entries]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("R grid must be strictly increasing")
        if any(b < a for a, b in zip(cs, cs[1:])):
            raise ValueError("counts must be nondecreasing in R")
        if len(self.complete) != len(self.entries):
            raise ValueError("one completeness flag per entry")

    @property
    def radii(self):
        return [r for r, _ in self.entries]

    @property
    def counts(self):
        return [c for _, c in self.entries]


@dataclass(frozen=True)
class EntropyEstimate:
    """Fitted growth exponent with the measured two-sided constants."""

    h: float
    window: tuple
    residual: float
    C1: float
    C2: float

    def __post_init__(self):
        if self.C1 > self.C2 + 1e-12:
            raise ValueError("C1 must not exceed C2")


@dataclass(frozen=True)
class GeodesicCensus:
    """Primitive closed-geodesic lengths sorted increasingly.

    P(t) is the right-continuous counting function of the length list.
    """

    backend: str
    entries: tuple  # ((length, label), ...) sorted by length
    h: float
    complete: bool = True
    note: str = ""
    _lengths: tuple = field(init=False, repr=False)

    def __post_init__(self):
        ls = tuple(l for l, _ in self.entries)
        if any(b < a for a, b in zip(ls, ls[1:])):
            raise ValueError("entries must be sorted by length")
        object.__setattr__(self, "_lengths", ls)

    def count(self, t):
        """P(t) = number of classes of length <= t."""
        return bisect.bisect_right(self._lengths, t + 1e-12)

    @property
    def lengths(self):
        return list(self._lengths)

    @property
    def max_length(self):
        return self._lengths[-1] if self._lengths else 0.0


def orbit_count(backend, base, r_grid, rank=2, group=None):
    """Census of card{gamma : d(x, gamma x) <= R} over an R grid.

    Tree and flat counts are exact closed-form/lattice enumerations; the
    hyperbolic-plane route uses the certified integer-matrix ball of the
    modular group (or the pruned word ball for a custom group).
    """
    r_grid = [float(r) for r in r_grid]
    if backend == TREE:
        entries = tuple((r, words.ball_count(int(math.floor(r + 1e-9)), rank))
                        for r in r_grid)
        return OrbitCensus(TREE, base, entries, (True,) * len(entries))
    if backend == FLAT:
        entries = tuple((r, len(flat.lattice_ball(r))) for r in r_grid)
        return OrbitCensus(FLAT, base, entries, (True,) * len(entries))
    if backend == PLANE:
        p = complex(base)
        entries = []
        flags = []
        for r in r_grid:
            if group is None or group.exact:
                ball = modular.modular_ball(p, r)
            else:
                ball = modular.word_ball(group, p, r)
            entries.append((r, len(ball.elements)))
            flags.append(ball.complete)
        return OrbitCensus(PLANE, base, tuple(entries), tuple(flags))
    raise BackendMismatch(f"unknown backend {backend!r}")


def fit_entropy(census, window=None):
    """Least-squares growth exponent of log(count) against R.

    By default the fit discards the lower half of the grid: the growth law
    is asymptotic and small radii pollute the slope.  C1 and C2 are the
    extreme values of count * e^{-hR} over the window.
    """
    pts = [(r, c) for (r, c) in census.entries if c > 0]
    if window is None:
        lo = pts[len(pts) // 2][0] if len(pts) >= 8 else pts[0][0]
        window = (lo, pts[-1][0])
    sel = [(r, c) for r, c in pts if window[0] <= r <= window[1]]
    if len(sel) < 4:
        raise ValueError("need at least 4 census points in the fit window")
    rs = [r for r, _ in sel]
    ys = [math.log(c) for _, c in sel]
    n = len(sel)
    rbar = sum(rs) / n
    ybar = sum(ys) / n
    sxx = sum((r - rbar) ** 2 for r in rs)
    if sxx == 0:
        raise ValueError("degenerate fit window")
    h = sum((r - rbar) * (y - ybar) for r, y in zip(rs, ys)) / sxx
    a = ybar - h * rbar
    resid = math.sqrt(sum((y - (a + h * r)) ** 2
                          for r, y in zip(rs, ys)) / n)
    ratios = [c * math.exp(-h * r) for r, c in sel]
    return EntropyEstimate(h=h, window=tuple(window), residual=resid,
                           C1=min(ratios), C2=max(ratios))


def geodesic_census(backend, T, rank=2):
    """All primitive closed-geodesic classes of length <= T.

    Tree classes are necklaces (oriented cyclic reduced words up to
    rotation); modular classes come from the exact R/L-word enumeration.
    Both routes are complete.
    """
    if backend == TREE:
        entries = sorted((float(len(w)), w)
                         for w in words.necklaces(int(T), rank,
                                                  primitive_only=True))
        return GeodesicCensus(TREE, tuple(entries), h=math.log(2 * rank - 1))
    if backend == PLANE:
        classes = modular.enumerate_conj_classes(T)
        entries = sorted((c.length, c.word) for c in classes if c.primitive)
        return GeodesicCensus(PLANE, tuple(entries), h=1.0)
    if backend == FLAT:
        raise BackendMismatch("flat backend has no closed-geodesic census "
                              "(no hyperbolic elements)")
    raise BackendMismatch(f"unknown backend {backend!r}")


def margulis_ratio(census, h, t):
    """P(t) * h * t / e^{h t}, the Margulis-law normalization."""
    if h <= 0:
        raise ValueError("need h > 0")
    if t > census.max_length and not census.complete:
        raise ValueError("t beyond census completeness")
    return census.count(t) * h * t / math.exp(h * t)


def margulis_table(census, h, t_grid):
    """Trend table of (t, P(t), ratio) rows; never asserts convergence."""
    return [(t, census.count(t), margulis_ratio(census, h, t))
            for t in t_grid]


def _matrix_root_test(m, k):
    """Integer k-th root of a hyperbolic matrix in PSL(2, Z), if any.

    Cayley-Hamilton gives m0^k = U_{k-1}(s) m0 - U_{k-2}(s) I where s is
    the trace of m0 and U_j the trace-recurrence coefficients, so a root
    exists iff (m + U_{k-2} I) / U_{k-1} is integral with determinant 1.
    """
    t = modular.trace(m)
    for s in range(3, t + 1):
        u_prev, u = 0, 1  # U_{-1}, U_0
        for _ in range(k - 1):
            u_prev, u = u, s * u - u_prev
        # trace of the k-th power of a trace-s matrix
        t_prev, t_cur = 2, s
        for _ in range(k - 1):
            t_prev, t_cur = t_cur, s * t_cur - t_prev
        if t_cur != t:
            continue
        a, b, c, d = m
        num = (a + u_prev, b, c, d + u_prev)
        if all(x % u == 0 for x in num):
            root = tuple(x // u for x in num)
            if modular.det(root) == 1 and modular.mat_pow(root, k) == m:
                return root
    return None


def primitive_test(element):
    """Whether the element is not a proper power of another element.

    Accepts a tree word (string) or an integer matrix 4-tuple.  Both
    routes are exact.
    """
    if isinstance(element, str):
        w, _ = words.cyclic_reduce(element)
        if not w:
            raise ValueError("identity element has no primitivity class")
        return words.is_primitive(w)
    m = modular.normalize(tuple(int(x) for x in element))
    length, kind = modular.translation_length(m)
    if kind != "hyperbolic":
        raise ValueError(f"{kind} element has no primitivity class")
    t = modular.trace(m)
    k = 2
    while 2 * math.cosh(math.acosh(t / 2.0) / k) >= 3 - 1e-9:
        if _matrix_root_test(m, k) is not None:
            return False
        k += 1
    return True
