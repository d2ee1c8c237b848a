"""PSL(2, Z): matrix algebra, orbit balls, and the closed-geodesic census."""

import itertools
import math

import pytest

from hyplab import halfplane, modular


def test_normalize_fixes_projective_sign():
    assert modular.normalize((-1, 0, 0, -1)) == (1, 0, 0, 1)
    assert modular.normalize((-2, -1, -1, -1)) == (2, 1, 1, 1)


def test_mat_inverse_and_power():
    m = (2, 1, 1, 1)
    assert modular.mat_mul(m, modular.mat_inv(m)) == modular.IDENT
    assert modular.mat_pow(m, 3) == modular.mat_mul(m, modular.mat_mul(m, m))
    assert modular.mat_pow(m, 0) == modular.IDENT


def test_classification_by_trace():
    assert modular.classify((1, 1, 0, 1)) == "parabolic"
    assert modular.classify((0, -1, 1, 0)) == "elliptic"
    assert modular.classify((2, 1, 1, 1)) == "hyperbolic"
    # trace-2 convention: the identity sits in the parabolic bucket
    assert modular.classify(modular.IDENT) == "parabolic"


def test_translation_length_closed_form():
    m = (2, 1, 1, 1)  # trace 3
    length, kind = modular.translation_length(m)
    assert kind == "hyperbolic"
    assert length == pytest.approx(2.0 * math.acosh(1.5))


def test_translation_length_equals_axis_displacement():
    m = (5, 2, 2, 1)
    length, _ = modular.translation_length(m)
    z = modular.axis(m).point(0.7)
    assert halfplane.dist(z, modular.apply(m, z)) == pytest.approx(length)


def test_fixed_points_are_fixed():
    m = (2, 1, 1, 1)
    for x in modular.fixed_points(m):
        y = modular.apply(m, complex(x, 1e-12)).real
        assert y == pytest.approx(x, abs=1e-6)


def test_modular_ball_brute_force_word_crosscheck():
    # independent route: BFS over generator words with a safety buffer
    p = 2j
    for R in (2.0, 4.0, 6.0):
        direct = modular.modular_ball(p, R)
        bfs = modular.word_ball(modular.FuchsianGroup.modular(), p, R)
        assert direct.complete and bfs.complete
        assert (sorted(modular.normalize(m) for m in direct.elements)
                == sorted(modular.normalize(m) for m in bfs.elements))


def test_modular_ball_nested_and_displacements_within_radius():
    p = 1j
    small = {modular.normalize(m)
             for m in modular.modular_ball(p, 3.0).elements}
    big = {modular.normalize(m)
           for m in modular.modular_ball(p, 5.0).elements}
    assert small <= big
    for m in big:
        assert halfplane.dist(p, modular.apply(m, p)) <= 5.0 + 1e-6


def _brute_census(T):
    """Conjugacy classes via direct R/L-word enumeration with rotation
    dedup, written independently of the library enumeration."""
    bound = 2.0 * math.cosh(T / 2.0)
    classes = {}
    n = 2
    while True:
        min_trace = None
        for word in itertools.product("RL", repeat=n):
            if len(set(word)) < 2:
                continue  # pure powers of R or L are parabolic-conjugate
            rots = {word[i:] + word[:i] for i in range(n)}
            if len(rots) < n:
                continue  # imprimitive
            key = min(rots)
            m = modular.IDENT
            for c in word:
                m = modular.mat_mul(m, modular.R_MAT if c == "R"
                                    else modular.L_MAT)
            t = modular.trace(m)
            min_trace = t if min_trace is None else min(min_trace, t)
            if t <= bound + 1e-9:
                classes[key] = 2.0 * math.acosh(t / 2.0)
        if min_trace is not None and min_trace > bound:
            break
        n += 1
    return sorted(classes.values())


def test_census_matches_brute_force_at_small_T():
    census = modular.enumerate_conj_classes(4.0)
    got = sorted(c.length for c in census if c.primitive)
    want = _brute_census(4.0)
    assert len(got) == len(want)
    for a, b in zip(got, want):
        assert a == pytest.approx(b, abs=1e-9)


def test_census_lengths_match_traces():
    for c in modular.enumerate_conj_classes(6.0):
        m = modular.IDENT
        for ch in c.word:
            m = modular.mat_mul(m, modular.R_MAT if ch == "R"
                                else modular.L_MAT)
        t = modular.trace(m)
        assert c.length == pytest.approx(2.0 * math.acosh(t / 2.0), abs=1e-12)


def test_shortest_class_is_the_commutator_of_the_cusp_generators():
    census = modular.enumerate_conj_classes(3.0)
    lengths = sorted(c.length for c in census)
    # trace 3 (word RL) gives the systole 2 arccosh(3/2)
    assert lengths[0] == pytest.approx(2.0 * math.acosh(1.5))


def test_fold_points_lands_in_fundamental_domain():
    for z in (7.3 + 0.2j, -4.1 + 0.05j, 0.49 + 0.6j):
        w, _ = modular.fold_points(z, 0.3)
        assert -0.5 - 1e-9 <= w.real <= 0.5 + 1e-9
        assert abs(w) >= 1.0 - 1e-9
