import json
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distinct_angles.census import census_bruteforce
from distinct_angles.configurations import (
    PointSet, SpiralConfig, best_shell, collinear_nd, concyclic_nd, config_from_dict,
    config_to_dict, f_alpha, f_alpha_index_shift, generic_projection, grid,
    lattice_collinear_any, lattice_general_position_report, random_frame, regular_ngon,
    shell_mean_bound, spiral_config)
from distinct_angles.errors import (DimensionMismatch, IndexOutOfRange, InvalidInput,
                                    InvalidParameter, RetriesExhausted, TooLarge)
from distinct_angles.geometry import (RationalPoint2, angle_tolerance, angles_of_triple, context,
                                      general_position_report)


# --- spiral ---------------------------------------------------------------

def test_spiral_radii_and_angles():
    cfg = spiral_config(3, "0.1")
    ctx = context(128)
    for j, p in enumerate(cfg.points, start=1):
        assert abs(ctx.hypot(p.x, p.y) - ctx.exp(ctx.mpf(j) / 10)) < 1e-35
        assert abs(ctx.atan2(p.y, p.x) - ctx.mpf(j) / 10) < 1e-35
    first = cfg.point(1)
    b = ctx.mpf("0.1")
    assert abs(first.x - ctx.exp(b) * ctx.cos(b)) < 1e-37


def test_spiral_defaults_and_errors():
    cfg = spiral_config(20)
    assert cfg.beta == context(128).mpf(1) / 20
    assert spiral_config(5, "1/5").beta == cfg.beta * 4
    with pytest.raises(InvalidParameter):
        spiral_config(2, "0.1")
    with pytest.raises(InvalidParameter):
        spiral_config(5, 0)
    with pytest.raises(InvalidParameter):
        spiral_config(5, "-0.1")
    with pytest.raises(IndexOutOfRange):
        cfg.point(0)


@pytest.mark.parametrize("n, beta", [(5, "0.1"), (12, "1/12"), (30, "0.1")])
def test_spiral_points_distinct_increasing_radii(n, beta):
    cfg = spiral_config(n, beta)
    radii = [p.x ** 2 + p.y ** 2 for p in cfg.points]
    assert all(a < b for a, b in zip(radii, radii[1:]))


def test_spiral_general_position_n10():
    rep = general_position_report(spiral_config(10, "0.1").points, "numeric", 1e-12)
    assert rep.ok


def test_f_alpha_maps_spiral_points_onto_each_other():
    cfg = spiral_config(10, "0.1")
    for j in range(1, 8):
        img = f_alpha(cfg.point(j), 3 * cfg.beta)
        target = cfg.point(j + 3)
        assert abs(img.x - target.x) < 1e-30 and abs(img.y - target.y) < 1e-30


def test_f_alpha_index_shift_examples():
    cfg = spiral_config(6, "0.1")
    assert f_alpha_index_shift(cfg, (1, 2, 3), 0) == tuple(cfg.point(j) for j in (1, 2, 3))
    assert f_alpha_index_shift(cfg, (2, 3, 5), -1) == tuple(cfg.point(j) for j in (1, 2, 4))
    with pytest.raises(IndexOutOfRange):
        f_alpha_index_shift(cfg, (2, 3, 5), 2)


SPIRAL_20 = spiral_config(20, "0.1")


@given(st.lists(st.integers(1, 20), min_size=3, max_size=3, unique=True), st.integers(-19, 19))
@settings(max_examples=80, deadline=None)
def test_f_alpha_shift_preserves_angles(triple, k):
    triple = sorted(triple)
    if not (1 <= triple[0] + k and triple[2] + k <= 20):
        return
    before = angles_of_triple(*(SPIRAL_20.point(j) for j in triple))
    after = angles_of_triple(*f_alpha_index_shift(SPIRAL_20, triple, k))
    for a, b in zip(before, after):
        assert abs(a.radians - b.radians) <= 10 * angle_tolerance(128)


# --- lattice --------------------------------------------------------------

def test_grid_examples():
    assert grid(1, 1).points == ((0,), (1,))
    assert grid(1, 2).points == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert len(grid(2, 2).points) == 9
    with pytest.raises(TooLarge):
        grid(9, 7)
    with pytest.raises(TooLarge):
        grid(2, 3, cap=26)


def test_best_shell_examples():
    s = best_shell(1, 2)
    assert s.shell_sizes == (1, 2, 1)
    assert s.level == 1 and s.size == 2
    assert s.mean_bound == Fraction(4, 3)
    s = best_shell(1, 1)
    assert (s.level, s.size, s.mean_bound) == (0, 1, 1)


def test_best_shell_2_2_collinear_free():
    s = best_shell(2, 2)
    assert not any(collinear_nd(*t) for t in combinations(s.points, 3))


@pytest.mark.parametrize("r, d", [(r, d) for r in range(0, 6) for d in range(1, 4)]
                         + [(1, 6), (2, 5), (3, 4), (1, 10)])
def test_shell_level_and_size_bound(r, d):
    s = best_shell(r, d)
    assert all(sum(c * c for c in a) == s.level for a in s.points)
    assert s.size >= shell_mean_bound(r, d)
    assert sum(s.shell_sizes) == (r + 1) ** d
    assert s.size == max(s.shell_sizes)
    assert s.level == s.shell_sizes.index(s.size)  # ties go to the smallest level
    if (r + 1) ** d <= 2000:
        assert lattice_collinear_any(s.points) is None


def test_collinear_and_concyclic_nd():
    assert collinear_nd((0, 0, 0), (1, 1, 1), (3, 3, 3))
    assert not collinear_nd((0, 0, 0), (1, 1, 1), (3, 3, 2))
    with pytest.raises(DimensionMismatch):
        collinear_nd((0, 0), (1, 1, 1), (3, 3, 2))
    # four points of a circle in the plane x + y + z = 3
    assert concyclic_nd((0, 1, 2), (0, 2, 1), (1, 0, 2), (2, 1, 0))
    assert not concyclic_nd((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert not concyclic_nd((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 1))
    # planar case agrees with the in-circle determinant
    assert concyclic_nd((0, 0), (2, 0), (0, 2), (2, 2))
    assert not concyclic_nd((0, 0), (1, 0), (0, 1), (5, 5))


def test_shell_2_3_report():
    rep = lattice_general_position_report(best_shell(2, 3).points)
    assert rep.ok_collinearity
    assert not rep.ok_concyclicity  # all six points share a plane section of the sphere
    assert rep.concyclic_count == 15


def test_lattice_collinear_any_finds_grid_lines():
    assert lattice_collinear_any(grid(2, 2).points) == (0, 1, 2)
    assert lattice_collinear_any(grid(1, 3).points) is None


# --- projection -------------------------------------------------------------

def test_frame_orthonormal():
    for seed in range(5):
        f = random_frame(4, seed, precision_bits=128)
        assert f.orthonormality_error() < angle_tolerance(128)


def test_frame_reproducible():
    a = random_frame(5, 11)
    b = random_frame(5, 11)
    assert a == b
    assert random_frame(5, 12) != a


def test_projection_preserves_difference_distances():
    pts = grid(2, 3).points
    img, frame = generic_projection(pts, seed=4)
    ctx = context(128)
    index = {p: i for i, p in enumerate(pts)}
    checked = 0
    for (i1, p1), (i2, p2) in combinations(enumerate(pts), 2):
        for i3, p3 in enumerate(pts[:6]):
            p4 = tuple(c3 - (c1 - c2) for c1, c2, c3 in zip(p1, p2, p3))
            if p4 not in index or i3 == i1:
                continue
            q1, q2, q3, q4 = img[i1], img[i2], img[i3], img[index[p4]]
            d12 = ctx.hypot(q1.x - q2.x, q1.y - q2.y)
            d34 = ctx.hypot(q3.x - q4.x, q3.y - q4.y)
            assert abs(d12 - d34) / d12 < 1e-12
            checked += 1
    assert checked > 100


def test_projection_keeps_collinear_collinear():
    pts = [(0, 0, 0), (1, 1, 1), (2, 2, 2), (0, 1, 3)]
    img, _ = generic_projection(pts, seed=2)
    rep = general_position_report(img, "numeric")
    assert rep.collinear_witness == (0, 1, 2)
    assert rep.min_collinearity_margin < 1e-30


def test_projection_of_shell_is_general():
    img, frame = generic_projection(best_shell(2, 3).points, seed=1)
    assert frame.seed == 1
    assert general_position_report(img, "numeric", 1e-12).ok


def test_projection_errors():
    with pytest.raises(InvalidParameter):
        generic_projection([(0, 0), (1, 1)], seed=0)
    with pytest.raises(InvalidInput):
        generic_projection([(0, 0, 0), (0, 0, 0)], seed=0)
    with pytest.raises(RetriesExhausted) as err:
        # a margin this large rejects every frame
        generic_projection(best_shell(2, 3).points, seed=0, max_retries=3, margin=0.9)
    assert err.value.attempts == 3 and err.value.witness is not None


# --- n-gon ------------------------------------------------------------------

@pytest.mark.parametrize("n, expected", [(3, 1), (4, 2), (8, 6)])
def test_ngon_census(n, expected):
    assert census_bruteforce(regular_ngon(n)).distinct_count == expected


def test_ngon_invalid():
    with pytest.raises(InvalidParameter):
        regular_ngon(2)


# --- serialization ----------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: spiral_config(7, "0.1"),
    lambda: spiral_config(5, None, 256),
    lambda: grid(2, 2),
    lambda: best_shell(2, 3),
    lambda: PointSet("ngon", tuple(regular_ngon(5)), {"n": 5}),
    lambda: PointSet("points", (RationalPoint2(Fraction(1, 3), 2), RationalPoint2(0, -1))),
])
def test_config_round_trip(make):
    cfg = make()
    doc = json.loads(json.dumps(config_to_dict(cfg)))
    back = config_from_dict(doc)
    assert tuple(back.points) == tuple(cfg.points)
    assert back.kind == cfg.kind
    assert config_to_dict(back) == config_to_dict(cfg)


def test_projected_round_trip():
    img, frame = generic_projection(best_shell(2, 3).points, seed=7)
    cfg = PointSet("projected", tuple(img), {"seed": 7}, frame=frame)
    back = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert back.frame == frame
    assert tuple(back.points) == tuple(img)


def test_config_from_dict_errors():
    with pytest.raises(InvalidInput):
        config_from_dict({"kind": "spiral"})
    with pytest.raises(InvalidInput):
        config_from_dict({"kind": "spiral", "parameters": {"n": 4, "beta": "0.1"},
                          "points": [["1", "0"]]})
    with pytest.raises(InvalidInput):
        config_from_dict({"kind": "x", "number_type": "complex", "points": [["1", "0"]]})
