"""Fuchsian groups on the upper half-plane.

The modular group PSL(2, Z) is built in with exact integer arithmetic:
its orbit balls are enumerated directly at the matrix level (complete,
with certificate) and its primitive hyperbolic conjugacy classes are the
rotation-canonical cyclic words in R = [[1,1],[0,1]], L = [[1,0],[1,1]].
Arbitrary float generator sets are supported with breadth-first word
enumeration and heuristic dedup, and are flagged as such.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import halfplane

R_MAT = (1, 1, 0, 1)
L_MAT = (1, 0, 1, 1)
IDENT = (1, 0, 0, 1)

EPS_ID = 1e-9


def normalize(m):
    """Canonical representative modulo sign: first nonzero entry positive."""
    for x in m:
        if x != 0:
            return m if x > 0 else tuple(-v for v in m)
    raise ValueError("zero matrix")


def det(m):
    a, b, c, d = m
    return a * d - b * c


def mat_mul(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def mat_inv(m):
    a, b, c, d = m
    return (d, -b, -c, a)  # valid for det 1


def mat_pow(m, n):
    out = IDENT
    for _ in range(n):
        out = mat_mul(out, m)
    return out


def trace(m):
    return m[0] + m[3]


def apply(m, z):
    """Mobius action on the upper half-plane (complex z or arrays)."""
    return halfplane.mobius_apply(m, z)


PARABOLIC, ELLIPTIC, HYPERBOLIC = "parabolic", "elliptic", "hyperbolic"


def classify(m, eps=EPS_ID):
    t = abs(trace(m))
    if t > 2 + eps:
        return HYPERBOLIC
    if t >= 2 - eps:
        return PARABOLIC
    return ELLIPTIC


def translation_length(m, eps=EPS_ID):
    """inf_x d(x, m x): 2 arccosh(|tr|/2) for hyperbolic m, else 0.

    Returns (length, kind).
    """
    if normalize(m) == IDENT:
        raise ValueError("identity has no translation length")
    kind = classify(m, eps)
    if kind != HYPERBOLIC:
        return 0.0, kind
    return 2.0 * math.acosh(abs(trace(m)) / 2.0), kind


@dataclass(frozen=True)
class FuchsianGroup:
    generators: tuple  # matrices, inverses added automatically
    exact: bool = False  # integer matrix arithmetic throughout
    dedup_tol: float = EPS_ID
    name: str = "custom"

    @staticmethod
    def modular():
        return FuchsianGroup(generators=(R_MAT, L_MAT), exact=True,
                             name="modular")

    def symmetric_generators(self):
        gens = []
        for g in self.generators:
            gens.append(normalize(g))
            gens.append(normalize(mat_inv(g)))
        out = []
        for g in gens:
            if not any(_mat_close(g, h, self.dedup_tol) for h in out):
                out.append(g)
        return out


def _mat_close(m1, m2, tol):
    return max(abs(x - y) for x, y in zip(m1, m2)) <= tol


@dataclass
class BallResult:
    elements: list  # matrices gamma with d(p, gamma p) <= R
    radius: float
    base: complex
    complete: bool
    certificate: str
    word_cap: int = 0


def modular_ball(p, R, q=None, slack=1e-9):
    """All gamma in PSL(2, Z) with d(p, gamma q) <= R.  Exact-complete.

    q defaults to p.  Enumerates matrices directly: for each coprime
    (c, d) with |c q + d| bounded, the displacement along the solution
    family (a0 + t c, b0 + t d, c, d) is quadratic in t, so the
    admissible t form an interval solved in closed form.
    """
    p = complex(p)
    q = p if q is None else complex(q)
    yp, yq = p.imag, q.imag
    # |p - gamma q|^2 |c q + d|^2 = |p (c q + d) - (a q + b)|^2 <= nmax
    nmax = (math.cosh(R) - 1.0) * 2.0 * yp * yq
    # y_p / Im(gamma q) <= e^R  ->  |c q + d|^2 <= e^R yq / yp
    bmax = math.sqrt(math.exp(R) * yq / yp)
    cmax = int(math.floor(bmax / yq)) + 1
    out = []
    for c in range(0, cmax + 1):
        if c == 0:
            d_candidates = [1]
        else:
            dmid = -c * q.real
            dr = bmax + 1.0
            d_candidates = range(int(math.ceil(dmid - dr)),
                                 int(math.floor(dmid + dr)) + 1)
        for d in d_candidates:
            if c == 0 and d != 1:
                continue
            if math.gcd(c, d) != 1:
                continue
            g, xg, yg = _ext_gcd(c, d)
            if g < 0:
                g, xg, yg = -g, -xg, -yg
            # xg*c + yg*d = 1  ->  a0 = yg, b0 = -xg gives a0 d - b0 c = 1
            a0, b0 = yg, -xg
            beta = c * q + d
            alpha = (a0 * q + b0) - p * beta
            # |alpha + t beta|^2 <= nmax
            A = abs(beta) ** 2
            B = 2.0 * (alpha * beta.conjugate()).real
            C = abs(alpha) ** 2 - nmax
            disc = B * B - 4.0 * A * C
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            tlo = int(math.ceil((-B - sq) / (2.0 * A) - slack))
            thi = int(math.floor((-B + sq) / (2.0 * A) + slack))
            for t in range(tlo, thi + 1):
                m = (a0 + t * c, b0 + t * d, c, d)
                disp = halfplane.dist(p, apply(m, q))
                if disp <= R + slack:
                    out.append(normalize(m))
    out = sorted(set(out))
    # c = 0 rows give gamma = translations; their negatives are the same
    # element of PSL(2, Z), so d = 1 alone covers them.
    return BallResult(out, R, p, complete=True,
                      certificate="exact integer matrix enumeration")


def _ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def word_ball(group, p, R, Lmax=None, buffer=4.0, slack=1e-9):
    """Breadth-first enumeration of group elements by word length, keeping
    those with displacement <= R.

    The search is pruned at displacement R + buffer: a word is extended only
    while it stays that close to the base point.  This is a heuristic route
    (a large enough buffer recovers the full ball because word geodesics
    fellow-travel the hyperbolic ones); completeness is claimed only when
    the pruned frontier exhausts itself below the word cap.
    """
    p = complex(p)
    gens = group.symmetric_generators()
    tol = group.dedup_tol
    seen = {_key(IDENT, tol)}
    frontier = [IDENT]
    hits = [IDENT]
    exhausted = False
    length = 0
    while Lmax is None or length < Lmax:
        length += 1
        nxt = []
        for w in frontier:
            for g in gens:
                m = normalize(mat_mul(w, g))
                k = _key(m, tol)
                if k in seen:
                    continue
                seen.add(k)
                disp = halfplane.dist(p, apply(m, p))
                if disp > R + buffer:
                    continue
                nxt.append(m)
                if disp <= R + slack:
                    hits.append(m)
        frontier = nxt
        if not frontier:
            exhausted = True
            break
    cert = (f"displacement-pruned BFS, buffer={buffer}, word cap L={Lmax}, "
            f"frontier {'exhausted' if exhausted else 'truncated'}")
    return BallResult(sorted(set(hits)), R, p, complete=exhausted,
                      certificate=cert, word_cap=Lmax)


def _key(m, tol):
    return tuple(round(x / tol) for x in m)


def _lower_envelope(envelope):
    pts = sorted(envelope.items())
    if len(pts) < 3:
        return 0.0, 0.0
    kappa = min((pts[i + 1][1] - pts[i][1])
                for i in range(1, len(pts) - 1)) if len(pts) > 2 else 0.0
    kappa = max(kappa, 0.0)
    kappa0 = max(kappa * n - d for n, d in pts)
    return kappa, kappa0


@dataclass(frozen=True)
class ConjClass:
    word: str            # rotation-canonical word in R, L
    matrix: tuple        # integer product matrix
    trace: int
    length: float        # 2*arccosh(trace/2)
    primitive: bool = True

    def __repr__(self):
        return f"ConjClass({self.word}, tr={self.trace}, l={self.length:.4f})"


def _word_matrix(w):
    m = IDENT
    for ch in w:
        m = mat_mul(m, R_MAT if ch == "R" else L_MAT)
    return m


def _canonical_rotation(w):
    return min(w[i:] + w[:i] for i in range(len(w)))


def _is_primitive_word(w):
    n = len(w)
    return not any(n % d == 0 and w[:d] * (n // d) == w for d in range(1, n))


def enumerate_conj_classes(T, include_imprimitive=False):
    """Primitive hyperbolic conjugacy classes of PSL(2, Z) with translation
    length <= T, as canonical cyclic words in R and L (both letters
    present).  Oriented: a class and its inverse are counted separately
    unless they coincide.

    Complete: the trace of an R/L word never decreases when a letter is
    appended, so the depth-first search with trace cutoff 2*cosh(T/2)
    visits every admissible word.
    """
    trmax = 2.0 * math.cosh(T / 2.0)
    out = []
    seen = set()
    # DFS over words starting with R; a canonical rotation of a word with
    # both letters present always has a rotation starting with R.
    stack = [("R", R_MAT)]
    while stack:
        w, m = stack.pop()
        if len(w) >= 2 and "L" in w:
            if trace(m) <= trmax:
                cw = _canonical_rotation(w)
                if cw not in seen:
                    seen.add(cw)
                    cm = _word_matrix(cw)
                    prim = _is_primitive_word(cw)
                    if prim or include_imprimitive:
                        out.append(ConjClass(
                            cw, cm, trace(cm),
                            2.0 * math.acosh(trace(cm) / 2.0), prim))
        if len(w) < trmax:
            for ch, g in (("R", R_MAT), ("L", L_MAT)):
                m2 = mat_mul(m, g)
                # appending a letter never decreases the trace, so this
                # cutoff discards no admissible extension
                if trace(m2) <= trmax:
                    stack.append((w + ch, m2))
    out.sort(key=lambda c: (c.length, c.word))
    return out


def fixed_points(m):
    """(repelling, attracting) boundary fixed points of a hyperbolic m."""
    a, b, c, d = m
    t = a + d
    if abs(t) <= 2:
        raise ValueError("matrix is not hyperbolic")
    if c == 0:
        # fixed points b/(d-a) and inf
        x = b / (d - a)
        return (x, math.inf) if abs(a) > abs(d) else (math.inf, x)
    sq = math.sqrt(t * t - 4.0)
    x1 = (a - d - sq) / (2.0 * c)
    x2 = (a - d + sq) / (2.0 * c)
    # attracting fixed point: |derivative| = 1/(c x + d)^2 < 1
    if abs(c * x1 + d) > 1.0:
        return x2, x1
    return x1, x2


def axis(m):
    """Unit-speed axis of a hyperbolic matrix, oriented so that
    m . point(t) = point(t + l) with l the translation length."""
    rep, att = fixed_points(m)
    if rep == math.inf or att == math.inf:
        x = rep if att == math.inf else att
        anchor = x + 1j
    else:
        c0, r0 = 0.5 * (rep + att), 0.5 * abs(att - rep)
        anchor = c0 + 1j * r0
    return halfplane.Geodesic(rep, att, anchor)


def closed_geodesic_path(cls):
    """Axis and period of a conjugacy class (matrix route for any backend
    representative)."""
    m = cls.matrix if isinstance(cls, ConjClass) else cls
    length, kind = translation_length(m)
    if kind != HYPERBOLIC:
        raise ValueError(f"{kind} element has no closed geodesic")
    return axis(m), length


# ---------------------------------------------------------------------------
# modular surface: fundamental domain folding

FUND_DOMAIN_TOL = 1e-12


def fold_points(z, theta, max_iter=200):
    """Fold points of the upper half-plane (with tangent angles) into the
    standard fundamental domain |Re z| <= 1/2, |z| >= 1 of PSL(2, Z).

    Vectorized; angles are transported by the derivative of the applied
    Mobius maps.  Returns (z_folded, theta_folded in [0, 2*pi)).
    """
    scalar = np.ndim(z) == 0 and np.ndim(theta) == 0
    z = np.atleast_1d(np.array(z, dtype=complex))
    theta = np.atleast_1d(np.array(theta, dtype=float))
    for _ in range(max_iter):
        shift = np.round(z.real)
        z = z - shift
        inside = np.abs(z) >= 1.0 - FUND_DOMAIN_TOL
        if inside.all() and (np.abs(shift) == 0).all():
            break
        flip = ~inside
        if flip.any():
            zf = z[flip]
            theta[flip] = theta[flip] - 2.0 * np.angle(zf)
            z[flip] = -1.0 / zf
    theta = np.mod(theta, 2.0 * math.pi)
    if scalar:
        return complex(z[0]), float(theta[0])
    return z, theta
