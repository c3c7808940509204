import math

import numpy as np
import pytest

import curvemoments as cm
from curvemoments.errors import GridTooLarge, OddExponentUnsupported


def _objective(curve, values, p, grid):
    return cm.lp_norm(curve, cm.coefficients(values.shape[0] // 2, values), p, grid) ** p


def _fd_gradient(curve, values, p, grid, eps=1e-6):
    out = np.zeros(2 * len(values))
    for i in range(len(values)):
        for part in (0, 1):
            bump = np.zeros(len(values), dtype=complex)
            bump[i] = eps if part == 0 else 1j * eps
            hi = _objective(curve, values + bump, p, grid)
            lo = _objective(curve, values - bump, p, grid)
            out[2 * i + part] = (hi - lo) / (2 * eps)
    return out


def test_gradient_spike_closed_form():
    c = cm.make_curve((1, 3))
    a0 = 0.8 - 0.3j
    spike = cm.coefficients(1, [0, a0, 0])
    grid = cm.nyquist_grid(c, 1, 2)
    g = cm.moment_gradient(c, spike, 4, grid)
    scale = 4 * abs(a0) ** 2
    assert g[2] == pytest.approx(scale * a0.real, rel=1e-10)
    assert g[3] == pytest.approx(scale * a0.imag, rel=1e-10)
    others = np.delete(g, [2, 3])
    assert np.allclose(others, 0.0, atol=1e-12)


def test_gradient_zero_vector():
    c = cm.make_curve((1, 3))
    zeros = cm.coefficients(2, np.zeros(5))
    g = cm.moment_gradient(c, zeros, 4, cm.nyquist_grid(c, 2, 2))
    assert np.allclose(g, 0.0)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_gradient_matches_finite_differences(seed):
    c = cm.make_curve((1, 3))
    a = cm.random_unit(2, seed=seed)
    grid = cm.nyquist_grid(c, 2, 2)
    g = cm.moment_gradient(c, a, 4, grid)
    fd = _fd_gradient(c, a.values.copy(), 4, grid)
    scale = max(np.max(np.abs(fd)), 1e-30)
    assert np.max(np.abs(g - fd)) / scale <= 1e-5


def test_gradient_requires_even_p_and_nyquist_grid():
    c = cm.make_curve((1, 3))
    with pytest.raises(OddExponentUnsupported):
        cm.moment_gradient(c, cm.ones(1), 3, cm.nyquist_grid(c, 1, 2))
    with pytest.raises(GridTooLarge):
        cm.moment_gradient(c, cm.ones(2), 4, cm.TorusGrid((3, 3)))


def test_estimate_parseval_case():
    c = cm.make_curve((1, 3))
    result = cm.estimate_K(c, 1, 2)
    assert abs(result.k_hat - 1.0) <= 1e-9
    assert result.converged


def test_estimate_floor_from_ones_start():
    c = cm.make_curve((1, 3))
    result = cm.estimate_K(c, 2, 4)
    floor = cm.k_lower_bound(c, 2, 4).value
    assert floor == pytest.approx(61 ** 0.25 / math.sqrt(5), rel=1e-12)
    assert result.k_hat >= floor - 1e-12
    assert result.certified_lower >= max(1.0, floor)


def _sphere_grid_oracle():
    """Dense search of ||F||_4 over the real unit sphere at N = 1, curve (1,3).

    Written against the raw exponential-sum formula with its own quadrature
    grid; shares nothing with the estimator implementation.
    """
    n = np.array([-1, 0, 1])
    grid_1d = np.arange(8) / 8.0
    A1, A2 = np.meshgrid(grid_1d, grid_1d, indexing="ij")
    # phases for the curve (n, n^3): n^3 = n on {-1, 0, 1}
    phases = np.exp(2j * np.pi * (A1[..., None] * n + A2[..., None] * n ** 3))
    theta = np.linspace(0, math.pi, 181)
    phi = np.linspace(0, 2 * math.pi, 361)
    best = 0.0
    for t in theta:
        vecs = np.stack(
            [
                math.sin(t) * np.cos(phi),
                math.sin(t) * np.sin(phi),
                np.full_like(phi, math.cos(t)),
            ],
            axis=1,
        )
        F = phases.reshape(-1, 3) @ vecs.T
        vals = np.mean(np.abs(F) ** 4, axis=0)
        best = max(best, float(vals.max()))
    return best ** 0.25


def test_estimate_matches_dense_sphere_search():
    c = cm.make_curve((1, 3))
    oracle = _sphere_grid_oracle()
    result = cm.estimate_K(c, 1, 4)
    assert result.k_hat == pytest.approx(oracle, abs=1e-3)


def test_ascent_monotone_and_unit_sphere():
    c = cm.make_curve((1, 3))
    result = cm.estimate_K(c, 2, 4)
    hist = result.objective_history
    assert all(b >= a - 1e-15 for a, b in zip(hist, hist[1:]))
    assert abs(result.argmax.l2_norm() - 1.0) <= 1e-12


def test_argmax_obeys_log_convexity():
    c = cm.make_curve((1, 3))
    result = cm.estimate_K(c, 2, 4)
    grid = cm.nyquist_grid(c, 2, 4)
    assert cm.log_convexity_check(c, result.argmax, 4, 8, grid).holds


def test_restriction_constant():
    c = cm.make_curve((1, 3))
    assert cm.restriction_constant(c, 1, 2) == pytest.approx(1.0, abs=1e-9)
    r2 = cm.estimate_K(c, 2, 4)
    assert r2.restriction_estimate == pytest.approx(r2.k_hat ** 2, rel=1e-12)
    assert r2.restriction_estimate >= 1.562
    # nesting: richer coefficient space can only raise the constant
    r1 = cm.estimate_K(c, 1, 4)
    assert r2.restriction_estimate >= r1.restriction_estimate - 1e-9


def test_estimate_seed_determinism():
    c = cm.make_curve((1, 3))
    cfg = cm.AscentConfig(seed=12)
    a = cm.estimate_K(c, 2, 4, cfg)
    b = cm.estimate_K(c, 2, 4, cfg)
    assert a.k_hat == b.k_hat
    assert np.array_equal(a.argmax.values, b.argmax.values)


def test_estimate_non_even_p_smoke():
    c = cm.make_curve((1, 3))
    result = cm.estimate_K(c, 1, 3)
    assert result.k_hat >= 1.0 - 1e-9
    # between the even anchors at the same N (p = 3 runs on an
    # approximate grid, so leave a little quadrature margin)
    lo = cm.estimate_K(c, 1, 2).k_hat
    hi = cm.estimate_K(c, 1, 4).k_hat
    assert lo - 1e-4 <= result.k_hat <= hi + 1e-4


def test_estimate_rejects_small_p():
    c = cm.make_curve((1, 3))
    with pytest.raises(ValueError):
        cm.estimate_K(c, 1, 1)


def test_ascent_config_validation():
    with pytest.raises(ValueError):
        cm.AscentConfig(tol=2.0)
    with pytest.raises(ValueError):
        cm.AscentConfig(multistarts=0)
