"""Free group F_k acting on its Cayley tree.

Everything here is exact: words are python strings over the alphabet
a..z (generators) and A..Z (inverses), distances are integers, boundary
cylinder masses are Fractions.  The tree is 0-hyperbolic, so this module
doubles as the brute-force oracle for the numerical backends.
"""

from fractions import Fraction
from itertools import product

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def letters(rank):
    """Generator letters followed by their inverses, e.g. 'a','b','A','B'."""
    if not 1 <= rank <= 26:
        raise ValueError(f"rank must be in 1..26, got {rank}")
    gens = ALPHABET[:rank]
    return list(gens) + list(gens.upper())


def inv_letter(c):
    return c.lower() if c.isupper() else c.upper()


def inverse(word):
    return "".join(inv_letter(c) for c in reversed(word))


def reduce_word(s, rank=None):
    """Freely reduce a string of letters.  Idempotent."""
    if rank is not None:
        allowed = set(letters(rank))
        for c in s:
            if c not in allowed:
                raise ValueError(f"letter {c!r} not in rank-{rank} alphabet")
    out = []
    for c in s:
        if out and out[-1] == inv_letter(c):
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def is_reduced(s):
    return all(s[i + 1] != inv_letter(s[i]) for i in range(len(s) - 1))


def mul(u, v):
    """Product in the free group (concatenate then cancel)."""
    u = list(u)
    for c in v:
        if u and u[-1] == inv_letter(c):
            u.pop()
        else:
            u.append(c)
    return "".join(u)


def common_prefix_len(u, v):
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n


def distance(u, v):
    """Tree distance d(u, v) = |u| + |v| - 2 lcp(u, v)."""
    return len(u) + len(v) - 2 * common_prefix_len(u, v)


def geodesic_vertices(u, v):
    """The vertices of the unique tree geodesic from u to v, in order."""
    k = common_prefix_len(u, v)
    up = [u[:i] for i in range(len(u), k, -1)]
    down = [v[:i] for i in range(k, len(v) + 1)]
    return up + down


def cyclic_reduce(w):
    """Return (cyclically reduced core, conjugator c) with w = c * core * c^-1.

    |core| is the translation length of w on the tree.  The identity has
    empty core and conjugator.
    """
    conj = []
    while len(w) >= 2 and w[0] == inv_letter(w[-1]):
        conj.append(w[0])
        w = w[1:-1]
    return w, "".join(conj)


def is_cyclically_reduced(w):
    return len(w) < 2 or w[0] != inv_letter(w[-1])


def translation_length(w):
    core, _ = cyclic_reduce(w)
    return len(core)


def canonical_rotation(w):
    """Lexicographically least rotation of a cyclically reduced word."""
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def is_primitive(w):
    """True iff the cyclic word is not a proper power of a shorter block."""
    n = len(w)
    if n == 0:
        return False
    for d in range(1, n):
        if n % d == 0 and w[:d] * (n // d) == w:
            return False
    return True


def ball_words(radius, rank=2, prefix=""):
    """Yield all reduced words of length <= radius extending `prefix`,
    in length-then-lexicographic order.  Deterministic.
    """
    alpha = sorted(letters(rank))
    if prefix and not is_reduced(prefix):
        raise ValueError("prefix must be reduced")
    frontier = [prefix]
    yield prefix
    for _ in range(len(prefix), radius):
        nxt = []
        for w in frontier:
            for c in alpha:
                if not w or w[-1] != inv_letter(c):
                    nxt.append(w + c)
        frontier = nxt
        yield from frontier


def sphere_counts(radius, rank=2):
    """Exact streamed sphere cardinalities [|S_0|, ..., |S_radius|],
    obtained by walking the tree (not from the closed-form formula).
    """
    alpha = letters(rank)
    counts = [1]
    # walk the tree keeping only the last letter of each frontier word;
    # the branching below a vertex depends on nothing else
    frontier = {}
    for c in alpha:
        frontier[c] = frontier.get(c, 0) + 1
    if radius >= 1:
        counts.append(sum(frontier.values()))
    for _ in range(2, radius + 1):
        nxt = dict.fromkeys(alpha, 0)
        for last, m in frontier.items():
            for c in alpha:
                if c != inv_letter(last):
                    nxt[c] += m
        frontier = nxt
        counts.append(sum(frontier.values()))
    return counts


def ball_count(radius, rank=2):
    return sum(sphere_counts(radius, rank))


def cylinder_measure(prefix, rank=2):
    """Visual (= limiting Patterson-Sullivan) measure of the boundary
    cylinder below `prefix`, base point the identity.  Exact rational:
    (1/2k) * (1/(2k-1))^(len-1).
    """
    if not prefix:
        raise ValueError("cylinder prefix must be nonempty")
    if not is_reduced(prefix):
        raise ValueError("cylinder prefix must be reduced")
    k2 = 2 * rank
    return Fraction(1, k2) * Fraction(1, k2 - 1) ** (len(prefix) - 1)


def visual_measure(base, prefix, rank=2):
    """nu_base(cyl(prefix)): visual measure of the cylinder below `prefix`
    (as named from the identity) seen from the vertex `base`.  Exact.

    The cylinder is the boundary of the subtree hanging at `prefix` away
    from the identity.  From a base point outside that subtree the mass is
    (1/2k)(1/(2k-1))^(d-1) with d = d(base, prefix); from inside it is the
    complement of the shadow through the parent edge.
    """
    if not prefix:
        raise ValueError("cylinder prefix must be nonempty")
    k2 = 2 * rank
    q = Fraction(1, k2 - 1)
    if prefix == base[: len(prefix)]:
        # base inside the subtree: complement of the cylinder through the
        # edge prefix -> parent(prefix), seen from base
        d = distance(base, prefix[:-1])
        return 1 - Fraction(1, k2) * q ** (d - 1)
    d = distance(base, prefix)
    return Fraction(1, k2) * q ** (d - 1)


class BoundaryWord:
    """Eventually periodic infinite reduced word: prefix . cycle^inf.

    The concatenations prefix+cycle and cycle+cycle must stay reduced so
    that the infinite word never cancels.
    """

    __slots__ = ("prefix", "cycle")

    def __init__(self, cycle, prefix=""):
        if not cycle:
            raise ValueError("cycle must be nonempty")
        if not (is_reduced(prefix) and is_reduced(cycle)):
            raise ValueError("prefix and cycle must be reduced")
        if not is_reduced(prefix + cycle + cycle):
            raise ValueError("continuation cancels")
        # canonical form: primitive cycle, shortest prefix
        for d in range(1, len(cycle)):
            if len(cycle) % d == 0 and cycle[:d] * (len(cycle) // d) == cycle:
                cycle = cycle[:d]
                break
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1] + cycle[:-1]
        self.prefix = prefix
        self.cycle = cycle

    def word(self, n):
        """First n letters of the infinite word."""
        reps = max(0, (n - len(self.prefix)) // len(self.cycle) + 1)
        return (self.prefix + self.cycle * reps)[:n]

    def __eq__(self, other):
        if not isinstance(other, BoundaryWord):
            return NotImplemented
        n = (len(self.prefix) + len(other.prefix)
             + 2 * len(self.cycle) * len(other.cycle) + 2)
        return self.word(n) == other.word(n)

    def __hash__(self):
        # canonical: roll the prefix forward until the cycle is in least phase
        return hash(self.word(len(self.prefix) + 4 * len(self.cycle)))

    def __repr__(self):
        pre = f"{self.prefix}." if self.prefix else ""
        return f"BoundaryWord({pre}{self.cycle}^inf)"


def tree_busemann(q, p, xi, rank=2):
    """b_p(q, xi) = lim_t d(q, c(t)) - t along the ray c from p to xi.

    Exact: the limit stabilizes once t passes the divergence point.
    Normalization b_p(p, xi) = 0.
    """
    horizon = len(p) + len(q) + len(xi.prefix) + 2 * len(xi.cycle) + 4
    ray = tree_ray_vertices(p, xi, horizon)
    v1 = distance(q, ray[horizon]) - horizon
    v0 = distance(q, ray[horizon - 1]) - (horizon - 1)
    if v0 != v1:
        raise RuntimeError("tree Busemann limit failed to stabilize")
    return v1


def tree_ray_vertices(p, xi, horizon):
    """Vertices of the geodesic ray from p toward xi, times 0..horizon."""
    target = xi.word(len(p) + len(xi.prefix) + 2 * len(xi.cycle) + horizon + 4)
    k = common_prefix_len(p, target)
    verts = [p[:i] for i in range(len(p), k, -1)]
    i = k
    while len(verts) <= horizon + 1:
        verts.append(target[:i])
        i += 1
        if i > len(target):
            target = xi.word(2 * len(target) + 8)
    return verts[: horizon + 1]


def tree_line_vertices(xi, eta, horizon):
    """Vertices c(-horizon..horizon) of the line from xi to eta, indexed so
    that c(0) is the vertex of the line closest to the identity.
    Returns (vertices, offset) with vertices[offset + t] = c(t).
    """
    n = 2 * horizon + len(xi.prefix) + len(eta.prefix) \
        + 2 * len(xi.cycle) + 2 * len(eta.cycle) + 8
    u, v = xi.word(n), eta.word(n)
    k = common_prefix_len(u, v)
    if k >= min(len(u), len(v)):
        raise ValueError("equal boundary points admit no connecting line")
    # the line passes through the vertex u[:k]; backward along u, forward along v
    back = [u[:i] for i in range(k + horizon, k, -1)]
    fwd = [v[:i] for i in range(k, k + horizon + 1)]
    verts = back + fwd  # verts[len(back)] is the junction u[:k] = c(0)
    return verts, len(back)


def necklaces(max_len, rank=2, primitive_only=True):
    """All cyclically reduced cyclic words (canonical least rotation) of
    length <= max_len, i.e. conjugacy classes of F_rank.  Oriented: w and
    w^-1 are distinct unless cyclically equal.
    """
    alpha = sorted(letters(rank))
    out = []
    for n in range(1, max_len + 1):
        seen = set()
        stack = [(c,) for c in alpha]
        while stack:
            w = stack.pop()
            if len(w) == n:
                if w[0] != inv_letter(w[-1]):
                    s = "".join(w)
                    c = canonical_rotation(s)
                    if c not in seen:
                        seen.add(c)
                        if not primitive_only or is_primitive(c):
                            out.append(c)
                continue
            for c in alpha:
                if c != inv_letter(w[-1]):
                    stack.append(w + (c,))
    return sorted(out, key=lambda w: (len(w), w))


def brute_force_translation_length(w, search_radius):
    """min over tree vertices x with |x| <= search_radius of d(x, w x)."""
    best = len(w)
    for x in ball_words(search_radius, rank=_infer_rank(w)):
        best = min(best, len(mul(mul(inverse(x), w), x)))
    return best


def _infer_rank(w):
    hi = max((ALPHABET.index(c.lower()) for c in w), default=0)
    return max(2, hi + 1)
