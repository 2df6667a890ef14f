"""Tests for the discrete fractional calculus layer.

Closed-form targets come from the power-rule formulas; everything else is
checked against the high-precision quadrature oracles in oracles.py or
against refinement behavior.
"""

import numpy as np
import pytest

import oracles
from fracevol.errors import DomainError
from fracevol.fraccalc import (
    SampledFn,
    TimeGrid,
    caputo_derivative,
    power_kernel_weights,
    rl_derivative,
    rl_integral,
    rl_integral_at,
    singular_convolution,
    singular_convolution_all,
    singular_convolution_at,
    rl_integral as _rl,  # noqa: F401  (alias exercised below)
)
from fracevol.constants import CAPUTO_CONST_TOL, QUADRATURE_MATCH_TOL
from fracevol.specfun import gamma, mittag_leffler


def grid_fn(horizon, n, func):
    g = TimeGrid(horizon, n)
    return g, SampledFn(g, func(g.nodes))


# ---------------------------------------------------------------- domain types


def test_grid_validation():
    with pytest.raises(DomainError):
        TimeGrid(0.0, 8)
    with pytest.raises(DomainError):
        TimeGrid(-1.0, 8)
    with pytest.raises(DomainError):
        TimeGrid(1.0, 0)
    g = TimeGrid(2.0, 4)
    assert g.nodes[0] == 0.0
    assert g.nodes[-1] == 2.0
    assert g.delta == 0.5


def test_grid_locate_snaps_to_nodes():
    g = TimeGrid(1.0, 512)
    for i in (0, 1, 255, 512):
        j, theta = g.locate(g.nodes[i])
        assert (j, theta) == (i, 0.0)
    j, theta = g.locate(0.3)
    assert j == 153 and 0.0 < theta < 1.0
    with pytest.raises(DomainError):
        g.locate(1.5)
    with pytest.raises(DomainError):
        g.locate(-0.1)


def test_sampled_fn_validation():
    g = TimeGrid(1.0, 4)
    with pytest.raises(DomainError):
        SampledFn(g, np.zeros(4))
    with pytest.raises(DomainError):
        SampledFn(g, np.array([0.0, 1.0, np.nan, 0.0, 0.0]))
    f = SampledFn(g, np.zeros((5, 3)))
    assert f.values.shape == (5, 3)
    assert not f.node0_extrapolated


def test_order_validation():
    g, f = grid_fn(1.0, 8, lambda t: t)
    for bad in (0.0, -0.5, 1.5, float("nan")):
        with pytest.raises(DomainError):
            rl_integral(bad, f)
    with pytest.raises(DomainError):
        caputo_derivative(1.0, f)  # derivatives stay strictly below 1


# ------------------------------------------------------------ integral, exact


def test_rl_integral_of_zero():
    g, f = grid_fn(1.0, 16, lambda t: 0.0 * t)
    assert np.all(rl_integral(0.5, f).values == 0.0)


def test_rl_integral_constant_closed_form():
    # product quadrature is exact for piecewise linear data
    g, f = grid_fn(1.0, 64, lambda t: np.ones_like(t))
    out = rl_integral(0.5, f).values
    for i, t in enumerate(g.nodes):
        ref = oracles.frac_integral_power(0.5, 0.0, t) if t > 0 else 0.0
        assert out[i] == pytest.approx(ref, abs=1e-13, rel=1e-12)


def test_rl_integral_linear_closed_form():
    g, f = grid_fn(1.0, 64, lambda t: t)
    out = rl_integral(0.75, f).values
    for i, t in enumerate(g.nodes):
        ref = oracles.frac_integral_power(0.75, 1.0, t) if t > 0 else 0.0
        assert out[i] == pytest.approx(ref, abs=1e-13, rel=1e-12)


def test_rl_integral_quadratic_second_order():
    alpha = 0.6
    errs = []
    for n in (64, 128, 256):
        g, f = grid_fn(1.0, n, lambda t: t ** 2)
        out = rl_integral(alpha, f).values
        ref = np.array([oracles.frac_integral_power(alpha, 2.0, t) if t else 0.0
                        for t in g.nodes])
        errs.append(np.max(np.abs(out - ref)))
    assert errs[0] / errs[1] > 3.0
    assert errs[1] / errs[2] > 3.0


def test_rl_integral_at_matches_node_values():
    g, f = grid_fn(1.0, 32, lambda t: np.cos(t))
    nodewise = rl_integral(0.7, f).values
    for i in (1, 7, 32):
        assert rl_integral_at(0.7, f, g.nodes[i]) == pytest.approx(
            nodewise[i], rel=1e-13, abs=1e-15
        )


def test_rl_integral_at_off_grid_exact_for_linear():
    # partial trailing panel must keep piecewise-linear exactness
    alpha = 0.55
    g, f = grid_fn(1.0, 32, lambda t: t)
    for t in (0.3, 0.617, 0.999):
        ref = oracles.frac_integral_power(alpha, 1.0, t)
        assert rl_integral_at(alpha, f, t) == pytest.approx(ref, rel=1e-12)


def test_power_weights_total_mass():
    # weights applied to f = 1 give the zeroth kernel moment t**a / a
    g = TimeGrid(1.0, 17)
    ones = np.ones(18)
    for alpha in (0.4, 0.75, 1.0):
        for t in (g.nodes[5], 0.42, 1.0):
            w = power_kernel_weights(alpha, g, t)
            assert w @ ones == pytest.approx(t ** alpha / alpha, rel=1e-13)


def test_power_weights_zero_time():
    g = TimeGrid(1.0, 8)
    assert np.all(power_kernel_weights(0.5, g, 0.0) == 0.0)


# ----------------------------------------------------------------- derivatives


def test_caputo_annihilates_constants():
    g, f = grid_fn(1.0, 128, lambda t: 7.0 + 0.0 * t)
    out = caputo_derivative(0.3, f)
    assert np.max(np.abs(out.values)) <= CAPUTO_CONST_TOL
    assert out.node0_extrapolated


def test_caputo_linear_power_rule():
    # L1 is exact when the derivative of the data is piecewise constant
    g, f = grid_fn(1.0, 64, lambda t: t)
    out = caputo_derivative(0.5, f).values
    for i, t in enumerate(g.nodes[1:], start=1):
        assert out[i] == pytest.approx(oracles.caputo_power(0.5, 1.0, t), rel=1e-12)


def test_caputo_quadratic_power_rule_converges():
    alpha = 0.75
    errs = []
    for n in (128, 256):
        g, f = grid_fn(1.0, n, lambda t: t ** 2)
        out = caputo_derivative(alpha, f).values
        ref = np.array([oracles.caputo_power(alpha, 2.0, t) if t else 0.0
                        for t in g.nodes])
        errs.append(np.max(np.abs(out[1:] - ref[1:])))
    assert errs[0] < 2e-3
    # L1 order is 2 - alpha
    assert errs[0] / errs[1] > 2.0 ** (2.0 - alpha - 0.25)


def test_caputo_against_defining_integral():
    import mpmath as mp

    alpha = 0.6
    g, f = grid_fn(0.7, 512, lambda t: np.sin(t))
    out = caputo_derivative(alpha, f).values
    ref = oracles.caputo_quadrature(alpha, mp.sin, mp.cos, 0.7)
    assert out[-1] == pytest.approx(ref, abs=5e-4)


def test_caputo_node0_extrapolation_rule():
    g, f = grid_fn(1.0, 16, lambda t: t ** 1.5)
    out = caputo_derivative(0.4, f).values
    assert out[0] == pytest.approx(3 * out[1] - 3 * out[2] + out[3], rel=1e-12)


def test_rl_derivative_of_constant():
    g, f = grid_fn(1.0, 64, lambda t: 3.0 + 0.0 * t)
    out = rl_derivative(0.4, f)
    assert out.node0_extrapolated
    for i, t in enumerate(g.nodes[1:], start=1):
        ref = 3.0 * t ** (-0.4) / gamma(0.6)
        assert out.values[i] == pytest.approx(ref, rel=1e-12)


def test_rl_derivative_matches_caputo_for_zero_start():
    g, f = grid_fn(1.0, 64, lambda t: t)
    rl = rl_derivative(0.5, f).values
    cap = caputo_derivative(0.5, f).values
    assert np.max(np.abs(rl - cap)) < 1e-14
    assert rl[10] == pytest.approx(oracles.caputo_power(0.5, 1.0, g.nodes[10]), rel=1e-12)


def test_fractional_operators_are_linear():
    rng = np.random.default_rng(915)
    g = TimeGrid(1.0, 48)
    a_vals = rng.standard_normal(49)
    b_vals = rng.standard_normal(49)
    fa, fb = SampledFn(g, a_vals), SampledFn(g, b_vals)
    combo = SampledFn(g, 2.5 * a_vals - 1.25 * b_vals)
    for op in (lambda f: rl_integral(0.65, f).values,
               lambda f: caputo_derivative(0.65, f).values,
               lambda f: rl_derivative(0.65, f).values):
        lhs = op(combo)
        rhs = 2.5 * op(fa) - 1.25 * op(fb)
        scale = np.max(np.abs(rhs)) + 1.0
        assert np.max(np.abs(lhs - rhs)) / scale < 1e-12


def test_semigroup_law_on_linear_data():
    alpha, beta = 0.35, 0.45
    errs = []
    for n in (128, 256, 512):
        g, f = grid_fn(1.0, n, lambda t: t)
        twice = rl_integral(alpha, rl_integral(beta, f)).values
        once = rl_integral(alpha + beta, f).values
        errs.append(np.max(np.abs(twice - once)))
    assert errs[0] / errs[1] >= 1.8
    assert errs[1] / errs[2] >= 1.8


def test_caputo_inverts_rl_integral():
    alpha = 0.6
    errs = []
    for n in (128, 256):
        g, f = grid_fn(1.0, n, lambda t: np.sin(2.0 * t))
        rec = caputo_derivative(alpha, rl_integral(alpha, f)).values
        errs.append(np.max(np.abs(rec[1:] - f.values[1:])))
    order = np.log(errs[0] / errs[1]) / np.log(2.0)
    assert order >= 0.9


# ------------------------------------------------------ singular convolutions


def test_singular_convolution_unit_kernel_moment():
    alpha = 0.7
    g, f = grid_fn(1.0, 20, lambda t: np.ones_like(t))
    h = lambda tau: np.ones_like(np.asarray(tau, dtype=float))
    for i in range(21):
        ref = g.nodes[i] ** alpha / alpha
        assert singular_convolution(alpha, h, f, i) == pytest.approx(ref, rel=1e-13, abs=1e-15)


def test_singular_convolution_zero_data():
    g, f = grid_fn(1.0, 12, lambda t: 0.0 * t)
    h = lambda tau: np.exp(-np.asarray(tau))
    assert singular_convolution(0.5, h, f, 12) == 0.0


def test_singular_convolution_ml_kernel_against_series_oracle():
    alpha, lam = 0.75, 4.0
    h = lambda tau: np.array(
        [mittag_leffler(alpha, alpha, -lam * x ** alpha) if x > 0 else 1.0 / gamma(alpha)
         for x in np.atleast_1d(tau)]
    )
    errs = []
    for n in (256, 512):
        g, f = grid_fn(1.0, n, lambda t: np.ones_like(t))
        lag_table = np.array(
            [mittag_leffler(alpha, alpha, -lam * (d * g.delta) ** alpha)
             if d else 1.0 / gamma(alpha) for d in range(n + 1)]
        )
        out = singular_convolution_all(alpha, lag_table, f)
        ref = np.array([oracles.resolvent_kernel_integral(alpha, lam, t) if t else 0.0
                        for t in g.nodes])
        errs.append(np.max(np.abs(out - ref)))
    assert errs[-1] < 5e-4
    assert errs[0] / errs[1] > 2.0 ** (2 * alpha - 0.4)


def test_singular_convolution_all_matches_pointwise():
    alpha = 0.6
    rng = np.random.default_rng(2206)
    g = TimeGrid(1.0, 40)
    f = SampledFn(g, rng.standard_normal(41))
    lags = np.arange(41) * g.delta
    smooth = np.exp(-2.0 * lags)
    batch = singular_convolution_all(alpha, smooth, f)
    h = lambda tau: np.exp(-2.0 * np.asarray(tau, dtype=float))
    for i in (0, 1, 17, 40):
        assert batch[i] == pytest.approx(singular_convolution(alpha, h, f, i), rel=1e-12, abs=1e-14)


def test_singular_convolution_vector_data():
    alpha = 0.8
    g = TimeGrid(1.0, 24)
    vals = np.column_stack([g.nodes, np.ones(25)])
    f = SampledFn(g, vals)
    h = lambda tau: np.ones_like(np.asarray(tau, dtype=float))
    out = singular_convolution(alpha, h, f, 24)
    assert out.shape == (2,)
    assert out[1] == pytest.approx(1.0 ** alpha / alpha, rel=1e-13)


def test_singular_convolution_at_off_grid_linear_data():
    # integral of (t-s)**(a-1) * s from 0 to t has the closed form below
    alpha = 0.65
    g, f = grid_fn(1.0, 64, lambda t: t)
    h = lambda tau: np.ones_like(np.asarray(tau, dtype=float))
    for t in (0.3, 0.55, 0.8131):
        ref = t ** (alpha + 1.0) / (alpha * (alpha + 1.0))
        assert singular_convolution_at(alpha, h, f, t) == pytest.approx(ref, rel=1e-12)


def test_singular_convolution_at_ml_kernel_off_grid():
    alpha, lam = 0.75, 2.0
    g, f = grid_fn(1.0, 512, lambda t: np.ones_like(t))
    h = lambda tau: np.array(
        [mittag_leffler(alpha, alpha, -lam * x ** alpha) if x > 0 else 1.0 / gamma(alpha)
         for x in np.atleast_1d(tau)]
    )
    for t in (0.3, 0.6):
        ref = oracles.resolvent_kernel_integral(alpha, lam, t)
        assert singular_convolution_at(alpha, h, f, t) == pytest.approx(ref, abs=2e-4)


def test_singular_convolution_ties_to_rl_integral():
    alpha = 0.45
    rng = np.random.default_rng(77)
    g = TimeGrid(2.0, 50)
    f = SampledFn(g, rng.standard_normal(51))
    h = lambda tau: np.ones_like(np.asarray(tau, dtype=float))
    ri = rl_integral(alpha, f).values
    for i in (3, 25, 50):
        conv = singular_convolution(alpha, h, f, i)
        assert conv == pytest.approx(gamma(alpha) * ri[i], rel=QUADRATURE_MATCH_TOL, abs=1e-13)


def test_singular_convolution_index_bounds():
    g, f = grid_fn(1.0, 8, lambda t: t)
    h = lambda tau: np.ones_like(np.asarray(tau, dtype=float))
    with pytest.raises(DomainError):
        singular_convolution(0.5, h, f, 9)
    with pytest.raises(DomainError):
        singular_convolution(0.5, h, f, -1)
