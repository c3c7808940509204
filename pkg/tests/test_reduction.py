import math

import pytest

import curvemoments as cm
from curvemoments.errors import EnumerationTooLarge
from oracle_utils import count_moment, shifted_count


def test_complement_shift_counts():
    c13 = cm.make_curve((1, 3))
    shifts = cm.complement_shifts(c13, 1, 1)
    assert len(shifts) == 5  # h_2 in {-2..2}
    assert sorted(s.h[1] for s in shifts) == [-2, -1, 0, 1, 2]
    assert all(s.h[0] == 0 and s.h[2] == 0 for s in shifts)
    assert len(cm.complement_shifts(c13, 2, 2)) == 33
    assert cm.shift_box_count(c13, 2, 2) == 33
    full = cm.make_curve((1, 2, 3))
    only = cm.complement_shifts(full, 5, 3)
    assert len(only) == 1 and only[0].is_zero()


def test_complement_shift_cap():
    c = cm.make_curve((1, 5))
    with pytest.raises(EnumerationTooLarge):
        cm.complement_shifts(c, 8, 3, cap=1000)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("u", [1, 2])
def test_decomposition_exact_zero_residual(N, u):
    c = cm.make_curve((1, 3))
    rep = cm.verify_decomposition(c, cm.ones(N), u)
    assert rep.exact
    assert rep.decomposition_residual == 0.0
    assert rep.decomposition_imag == 0.0
    assert rep.moment.exact_value == count_moment((1, 3), N, u)


def test_decomposition_example_values():
    c = cm.make_curve((1, 3))
    rep = cm.verify_decomposition(c, cm.ones(1), 1)
    assert rep.moment.exact_value == 3
    assert rep.shift_count == 5
    rep2 = cm.verify_decomposition(c, cm.ones(2), 2)
    assert rep2.moment.exact_value == 61
    assert rep2.shift_count == 33
    assert rep2.tight_shift_count <= rep2.shift_count


def test_decomposition_full_curve_is_trivial():
    full = cm.make_curve((1, 2, 3))
    rep = cm.verify_decomposition(full, cm.ones(2), 2)
    assert rep.shift_count == 1
    assert rep.decomposition_residual == 0.0
    assert rep.moment.exact_value == rep.moment_full_zero.exact_value


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_decomposition_exact_random_weights(seed):
    c = cm.make_curve((1, 3))
    rep = cm.verify_decomposition(c, cm.random_gaussian_int(2, seed=seed), 2)
    assert rep.exact and rep.decomposition_residual == 0.0


def test_decomposition_float_weights():
    c = cm.make_curve((1, 3))
    rep = cm.verify_decomposition(c, cm.random_unit(2, seed=5), 2)
    assert not rep.exact
    assert rep.decomposition_residual <= 1e-10 * max(rep.moment.value, 1.0)
    assert rep.decomposition_imag <= 1e-10


def test_dominance_exhaustive():
    c = cm.make_curve((1, 3))
    rep = cm.verify_dominance(c, cm.ones(2), 2)
    assert rep.dominance_checked == 33
    assert rep.dominance_violations == 0
    assert rep.dominance_max_ratio == pytest.approx(1.0)  # h = 0 included


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_dominance_random_weights(seed):
    c = cm.make_curve((1, 3))
    rep = cm.verify_dominance(c, cm.random_unit(2, seed=seed), 2)
    assert rep.dominance_violations == 0
    assert rep.dominance_max_ratio <= 1.0 + 1e-10


def test_dominance_sampled():
    c = cm.make_curve((1, 3))
    rep = cm.verify_dominance(c, cm.ones(3), 2, sample=10, seed=1)
    assert rep.dominance_checked == 11  # sampled shifts plus h = 0
    assert rep.dominance_violations == 0


def test_shift_vanishes_outside_box():
    # first shell beyond |h_2| <= 2uN^2
    c = cm.make_curve((1, 3))
    for N, u in [(1, 1), (2, 1)]:
        bound = 2 * u * N ** 2
        for h2 in (bound + 1, bound + 2, -(bound + 1)):
            assert cm.shifted_moment(c, cm.ones(N), u, (0, h2, 0)) == 0
            assert shifted_count(N, u, 3, (0, h2, 0)) == 0


def test_theorem_bound_check_full_curve():
    full = cm.make_curve((1, 2, 3))
    rep = cm.theorem_bound_check(full, cm.ones(2), 2)
    assert rep.bound_ratio == pytest.approx(1.0)
    assert rep.paper_constant_ok


def test_theorem_bound_check_13():
    c = cm.make_curve((1, 3))
    rep = cm.theorem_bound_check(c, cm.ones(2), 2)
    assert rep.moment.exact_value == 61
    assert rep.moment_full_zero.exact_value == 45
    assert rep.bound_ratio == pytest.approx(61 / 720)
    assert rep.paper_constant_ok and rep.box_bound_ok


def test_theorem_bound_check_14():
    c = cm.make_curve((1, 4))
    rep = cm.theorem_bound_check(c, cm.ones(2), 2)
    # complement {2, 3}: denominator (2u)^2 * N^5 * zero-shift moment
    assert rep.moment.exact_value == 45
    assert rep.moment_full_zero.exact_value == 45
    assert rep.bound_ratio == pytest.approx(1.0 / 512)
    assert rep.paper_constant_ok is not None and rep.box_bound_ok
    ceiling = rep.shift_count / (16 * 32)
    assert rep.bound_ratio <= ceiling * (1 + 1e-12)


def test_report_serialization_keys():
    c = cm.make_curve((1, 3))
    d = cm.verify_decomposition(c, cm.ones(1), 1).to_dict()
    for key in ("lambda", "lambda_zero", "shift_count", "decomposition_residual"):
        assert key in d
