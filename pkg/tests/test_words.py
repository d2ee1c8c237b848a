"""Free-group word algebra against small brute-force enumerations."""

import itertools
import math
from fractions import Fraction

import pytest

from hyplab import words


def test_reduce_cancels_adjacent_inverses():
    assert words.reduce_word("aA") == ""
    assert words.reduce_word("abBA") == ""
    assert words.reduce_word("abBc", rank=3) == "ac"
    assert words.reduce_word("aabB") == "aa"


def test_mul_group_laws():
    sample = ["", "a", "ab", "aB", "bA", "abA", "BBa"]
    for u, v, w in itertools.product(sample, repeat=3):
        assert words.mul(words.mul(u, v), w) == words.mul(u, words.mul(v, w))
    for u in sample:
        assert words.mul(u, words.inverse(u)) == ""
        assert words.mul(u, "") == u


def test_distance_is_a_metric_on_a_small_ball():
    ball = sorted(words.ball_words(3))
    for u in ball:
        assert words.distance(u, u) == 0
    for u, v in itertools.combinations(ball, 2):
        d = words.distance(u, v)
        assert d == words.distance(v, u) > 0
    for u, v, w in itertools.islice(
            itertools.product(ball, repeat=3), 5000):
        assert (words.distance(u, w)
                <= words.distance(u, v) + words.distance(v, w))


def test_ball_count_closed_form():
    for rank in (2, 3):
        q = 2 * rank - 1
        for r in range(0, 8):
            expected = 1 + sum(2 * rank * q ** (m - 1)
                               for m in range(1, r + 1))
            assert words.ball_count(r, rank) == expected
            assert len(list(words.ball_words(r, rank))) == expected


def test_geodesic_vertices_walk_unit_steps():
    for u, v in [("ab", "aB"), ("", "abab"), ("bA", "ba"), ("a", "a")]:
        path = words.geodesic_vertices(u, v)
        assert path[0] == u and path[-1] == v
        assert len(path) == words.distance(u, v) + 1
        for x, y in zip(path, path[1:]):
            assert words.distance(x, y) == 1


def test_translation_length_matches_brute_force():
    for w in ["ab", "aab", "abAB", "aBa", "bb", "aBAbb"]:
        assert (words.translation_length(w)
                == words.brute_force_translation_length(w, 4))


def test_translation_length_of_conjugates_is_invariant():
    for g in ["a", "Ba", "abA"]:
        for w in ["ab", "abb", "aBaB"]:
            conj = words.mul(words.mul(g, w), words.inverse(g))
            assert (words.translation_length(conj)
                    == words.translation_length(w))


def _brute_necklaces(max_len, primitive_only=True):
    """Rotation classes of cyclically reduced words, by direct filtering."""
    lets = "abAB"
    out = set()
    for n in range(1, max_len + 1):
        for tup in itertools.product(lets, repeat=n):
            w = "".join(tup)
            if not words.is_reduced(w):
                continue
            if n > 1 and w[0] == words.inv_letter(w[-1]):
                continue
            rots = {w[i:] + w[:i] for i in range(n)}
            if primitive_only and len(rots) < n:
                continue
            out.add(min(rots))
    return out


def test_necklaces_match_brute_force():
    got = {words.canonical_rotation(w) for w in words.necklaces(5)}
    assert got == _brute_necklaces(5)


def test_cylinder_measures_are_exact_and_additive():
    assert words.cylinder_measure("a") == Fraction(1, 4)
    assert words.cylinder_measure("ab") == Fraction(1, 12)
    children = [words.cylinder_measure("a" + c) for c in "abB"]
    assert sum(children) == words.cylinder_measure("a")
    total = sum(words.cylinder_measure(c) for c in "abAB")
    assert total == 1


def test_visual_measure_conformal_scaling():
    # moving the base point one step toward the cylinder triples the mass
    assert (words.visual_measure("a", "ab")
            == 3 * words.visual_measure("", "ab"))
    assert (words.visual_measure("A", "ab")
            == Fraction(1, 3) * words.visual_measure("", "ab"))


def test_tree_busemann_on_rays():
    xi = words.BoundaryWord("a")
    # moving toward xi decreases the Busemann value by the step count
    assert words.tree_busemann("aa", "", xi) == -2
    assert words.tree_busemann("b", "", xi) == 1
    assert words.tree_busemann("", "", xi) == 0


def test_boundary_word_expansion():
    xi = words.BoundaryWord("ab", prefix="B")
    w = xi.word(5)
    assert w.startswith("Bab")
    assert words.is_reduced(w)
    assert words.BoundaryWord("ab") == words.BoundaryWord("ab")
    assert words.BoundaryWord("ab") != words.BoundaryWord("ba")


def test_primitive_detection():
    assert words.is_primitive("ab")
    assert not words.is_primitive("abab")
    assert words.is_primitive("aab")
    assert not words.is_primitive("aaa")


def test_sphere_counts_sum_to_ball():
    counts = words.sphere_counts(6)
    assert sum(counts) == words.ball_count(6)
    assert counts[0] == 1 and counts[1] == 4
    for m in range(2, 7):
        assert counts[m] == 3 * counts[m - 1]
