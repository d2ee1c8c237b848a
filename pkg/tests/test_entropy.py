"""Dynamical metrics, spanning counts, and expansivity probes."""

import math

import numpy as np
import pytest

from hyplab import entropy
from hyplab.geometry import FLAT, PLANE, TREE


def test_dyn_metric_symmetric_and_monotone_in_k():
    sample = entropy.tree_flow_sample(4)
    v, w = sample[0], sample[7]
    d1 = entropy.dyn_metric(v, w, 1)
    d3 = entropy.dyn_metric(v, w, 3)
    assert d3 >= d1 >= 0
    assert entropy.dyn_metric(w, v, 3) == d3


def test_tree_spanning_count_exact_branching():
    sample = entropy.tree_flow_sample(6)
    for n in range(1, 6):
        rep = sample and entropy.spanning_count(sample, n, 0.5)
        assert rep.method == "exact-symbolic"
        assert rep.lower == rep.upper == 4 * 3 ** (n - 1)


def test_spanning_report_sandwich():
    sample = entropy.flat_flow_sample(n_dirs=90, n_pos=2)
    rep = entropy.spanning_count(sample, 8, 0.5)
    assert rep.lower <= rep.upper
    assert rep.lower >= 1


def test_flat_spanning_counts_grow_linearly():
    sample = entropy.flat_flow_sample(n_dirs=360, n_pos=2)
    counts = [entropy.spanning_count(sample, n, 0.5).upper
              for n in (10, 20, 40)]
    assert counts[0] <= counts[1] <= counts[2]
    # sub-exponential: the log-slope over n = 10..40 stays tiny
    slope = math.log(counts[2] / counts[0]) / 30.0
    assert slope < 0.05


def test_estimate_htop_tree_is_log3():
    est = entropy.estimate_htop(TREE)
    assert est.h == pytest.approx(math.log(3), abs=1e-9)
    assert est.gap <= 0.1 * math.log(3)


def test_estimate_htop_tree_rank3_is_log5():
    est = entropy.estimate_htop(TREE, n_grid=range(1, 5), rank=3,
                                sample=entropy.tree_flow_sample(4, rank=3))
    assert est.h == pytest.approx(math.log(5), abs=1e-9)


def test_z_set_probe_tree_certificate():
    v = entropy.tree_flow_sample(6)[0]
    rep = entropy.z_set_probe(v, 0.4)
    assert rep.classification == "EXPANSIVE-AT-SCALE"
    assert "integer" in rep.certificate
    rep = entropy.z_set_probe(v, 1.5)
    assert rep.classification == "UNKNOWN"


def test_z_set_probe_flat_witness_stays_close():
    v = entropy.flat_flow_sample(n_dirs=4, n_pos=1)[0]
    rep = entropy.z_set_probe(v, 0.4)
    assert rep.classification == "NON-EXPANSIVE-WITNESS"
    w = rep.witness
    for t in (-5.0, 0.0, 5.0):
        assert entropy._base_dist(FLAT, v.point(t), w.point(t)) <= 0.4


def test_z_set_probe_plane_inconclusive():
    v = entropy.plane_flow_sample(n_dirs=4, n_pos=1)[0]
    rep = entropy.z_set_probe(v, 0.3, horizon=10, sample_budget=50)
    assert rep.classification == "UNKNOWN"
    assert "witness" in rep.detail


def test_endpoint_fiber_probe_counts():
    n, _ = entropy.endpoint_fiber_probe(TREE, "a", "b")
    assert n == 1
    n, _ = entropy.endpoint_fiber_probe(PLANE, -1.3, 0.7)
    assert n == 1
    n, wits = entropy.endpoint_fiber_probe(FLAT, 0.3, 0.3 + math.pi)
    assert n >= 2
    a, b = wits[0], wits[1]
    assert a.theta == b.theta
    assert not np.array_equal(a.pos, b.pos)


def test_flow_point_shift_moves_along_the_orbit():
    v = entropy.tree_flow_sample(5)[0]
    w = v.shift(2)
    assert w.point(0) == v.point(2)


def test_rejects_unreduced_windows():
    with pytest.raises(ValueError):
        entropy.FlowPoint(TREE, "", "aA", "b")
    with pytest.raises(ValueError):
        entropy.FlowPoint(TREE, "", "ab", "a")  # backtracks at time 0
