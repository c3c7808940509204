import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import curvemoments as cm

SQRT_HALF = math.sqrt(2) / 2


def test_diagonal_lower_bound_values():
    assert cm.diagonal_lower_bound(2, 2) == 25
    assert cm.diagonal_lower_bound(1, 1) == 3
    assert cm.diagonal_lower_bound(3, 2) == 49
    # equality when only diagonal solutions exist
    c = cm.make_curve((1, 3))
    assert cm.even_moment(c, cm.ones(1), 1).exact_value == 3


def test_major_arc_box_geometry():
    c = cm.make_curve((1, 3))
    box = cm.MajorArcBox(c, 2)
    assert box.half_widths == (1 / 32, 1 / 128)
    assert box.measure == pytest.approx((2 / 32) * (2 / 128))
    corners = box.corners()
    assert len(corners) == 4
    assert (1 / 32, 1 / 128) in corners


@settings(max_examples=30)
@given(
    exps=st.sets(st.integers(min_value=1, max_value=5), min_size=1).map(
        lambda s: tuple(sorted(s))
    ),
    N=st.integers(min_value=1, max_value=6),
)
def test_box_measure_scaling_invariant(exps, N):
    # measure * N^{weight_sum} is constant in N: (4d)^{-d}
    c = cm.make_curve(exps)
    box = cm.MajorArcBox(c, N)
    d = c.dim
    assert box.measure * N ** c.weight_sum == pytest.approx((4 * d) ** (-d), rel=1e-12)


def test_major_arc_min_at_origin_corner():
    c = cm.make_curve((1, 3))
    val = cm.eval_extension(c, cm.ones(2), (0.0, 0.0))
    assert val.real == pytest.approx(5.0)
    corner = cm.eval_extension(c, cm.ones(2), (1 / 32, 1 / 128))
    assert corner.real >= 5 * SQRT_HALF


@pytest.mark.parametrize("exps,N", [((1, 3), 2), ((1, 2, 3), 2), ((1, 4), 3)])
def test_major_arc_min_floor(exps, N):
    c = cm.make_curve(exps)
    got = cm.major_arc_min(c, N, samples=1000, seed=0)
    assert got >= SQRT_HALF * (2 * N + 1)


def test_major_arc_min_deterministic():
    c = cm.make_curve((1, 3))
    assert cm.major_arc_min(c, 2, 500, seed=3) == cm.major_arc_min(c, 2, 500, seed=3)


def test_major_arc_moment_bound_example():
    c = cm.make_curve((1, 3))
    bound = cm.major_arc_moment_bound(c, 2, 4)
    # ((sqrt2/2)*5)^4 * (1/16)(1/64)
    assert bound == pytest.approx((SQRT_HALF * 5) ** 4 / 1024)
    assert bound <= 61.0


def test_major_arc_moment_bound_doubling():
    c = cm.make_curve((1, 3))
    p = 12
    ratio = cm.major_arc_moment_bound(c, 16, p) / cm.major_arc_moment_bound(c, 8, p)
    # pure power law 2^{p - weight_sum} up to the (2N+1)/2N endpoint factor
    assert ratio == pytest.approx(2 ** (p - c.weight_sum), rel=0.2)


def test_k_lower_bound_values():
    c = cm.make_curve((1, 3))
    got = cm.k_lower_bound(c, 2, 4)
    assert got.value == pytest.approx(61 ** 0.25 / math.sqrt(5), rel=1e-12)
    assert got.paper_normalized == pytest.approx(61 ** 0.25 / math.sqrt(2), rel=1e-12)
    assert cm.k_lower_bound(c, 1, 2).value == pytest.approx(1.0)


def test_k_lower_bound_against_theorem_exponent():
    c = cm.make_curve((1, 3))
    got = cm.k_lower_bound(c, 8, 12)
    # the probe floor should be of the same size as N^{(1/2)(1-8/12)}
    reference = 8 ** (1 / 6)
    assert got.value > 1.0
    assert 0.3 < got.value / reference < 3.0


@pytest.mark.parametrize("exps", [(1, 2), (1, 3), (2, 3), (1, 2, 3), (1, 4)])
@pytest.mark.parametrize("N", [1, 2])
@pytest.mark.parametrize("p", [2, 4])
def test_moment_dominates_both_lower_bounds(exps, N, p):
    c = cm.make_curve(exps)
    mom = cm.even_moment(c, cm.ones(N), p // 2)
    assert mom.value >= cm.diagonal_lower_bound(N, p // 2)
    assert mom.value >= cm.major_arc_moment_bound(c, N, p)


def test_sharpness_report_roundup():
    c = cm.make_curve((1, 3))
    rep = cm.sharpness_report(c, 2, 4, samples=200, seed=1)
    assert rep.all_hold
    assert rep.moment == pytest.approx(61.0)
    assert rep.moment_exact
    d = rep.to_dict()
    assert d["diag_lb"] == 25.0
    assert d["k_lower"] == pytest.approx(61 ** 0.25 / math.sqrt(5))


def test_sharpness_p_validation():
    c = cm.make_curve((1, 3))
    with pytest.raises(ValueError):
        cm.k_lower_bound(c, 2, 3)
    with pytest.raises(ValueError):
        cm.major_arc_moment_bound(c, 2, 5)
