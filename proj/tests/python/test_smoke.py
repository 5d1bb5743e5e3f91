import math

import pytest

import kakeyakit as kk


def test_canonical_direction():
    assert kk.canonicalize_direction([0.0, -2.0]) == [0.0, 1.0]
    x, y = kk.canonicalize_direction([3.0, 4.0])
    assert math.isclose(x, 0.6) and math.isclose(y, 0.8)
    with pytest.raises(ValueError):
        kk.canonicalize_direction([0.0, 0.0])


def test_axis_segment_cells():
    cells = kk.rasterize_segments([([0.5, 0.0], [1.0, 0.0], 1.0)], 0.25)
    assert cells == [[k, 0] for k in range(5)]


def test_ball_dimension():
    counts = []
    for j in range(3, 11):
        delta = 2.0**-j
        counts.append((delta, len(kk.ball_cells(2, 0.5, delta))))
    est = kk.box_dimensions(counts)
    assert abs(est["lower"] - 2) <= 0.05
    assert abs(est["upper"] - 2) <= 0.05


def test_figure_sides():
    assert kk.figure_sides() == [(4, 1), (2, 1), (1, 1), (1, 4)]


def test_fan64_endpoints():
    ends = kk.fan64_endpoints()
    assert len(ends) == 64
    for lo, hi in ends:
        assert math.isclose(math.dist(lo, hi), 1.0, rel_tol=1e-12)


def test_hausdorff_and_packing():
    assert kk.hausdorff([[0.0, 0.0]], [[3.0, 4.0]]) == 5.0
    count, _ = kk.packing_count([[0.2 * k, 0.0] for k in range(6)], 0.2)
    assert count == 2


def test_lbd_pipeline():
    rows = kk.lbd_experiment(512, [1 / 16, 1 / 32], 7)
    assert all(r["covered"] and r["uncovered"] == 0 for r in rows)
    assert all(r["exponent"] >= 0.9 for r in rows)


def test_quantize_bound():
    for eps in (0.1, 0.5, 2.0):
        assert kk.quantize_distance(64, eps, 3) < eps


def test_difference_sets():
    ap = [[k] for k in range(10)]
    assert kk.difference_count(ap, 32, 1) == 19
    assert kk.trivial_bound(1, 8, 2) == 1
    c = [[0, 0], [1, 2], [3, 1]]
    assert kk.translated_union_count(c, [[0, 0]], 4, 2) == 3
    assert kk.salem_probe(8, 2, 2, 5, 1)["best_ratio"] == 0.75


def test_zoom_profile():
    gap, rows = kk.zoom_profile(2, 16, 10.0, [10, 100, 1000], 1 / 32, 5)
    assert gap > 0
    assert all(dist <= bound for _, dist, bound in rows)


def test_cli_exit_codes(tmp_path):
    assert kk.run_cli(["figure1", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "figure1.csv").exists()
    assert kk.run_cli(["lbd", "--deltas", "0.3"]) == 2
