import math

import numpy as np
import pytest

from robustins.errors import ConfigError, DomainError, PreconditionError
from robustins.market import AmbiguityBand, MarketParams, TimeGrid
from robustins.montecarlo import (
    BLOCK_PATHS,
    ControlPath,
    SimConfig,
    cara_utility,
    closed_form_value,
    correlated_increments,
    equilibrium_controls,
    piecewise_value_check,
    rng_metadata,
    simulate_terminal_wealth,
    value_and_dominance,
    verify_value_function,
    worst_case_dominance,
)


def _euler_gaussian_oracle(controls, xi, params, band, m0):
    """Mean and variance of Euler terminal wealth; it is Gaussian since controls are deterministic."""
    mean, var = m0, 0.0
    dts = np.diff(controls.times)
    for k, dt in enumerate(dts):
        c = band.rho + xi
        a, b = controls.x[k] * params.eta, controls.y[k] * params.sigma
        g = 1.0 + params.r * dt
        mean = mean * g + (controls.x[k] * controls.theta[k] * params.l + controls.y[k] * params.excess_return) * dt
        var = var * g * g + (a * a + 2 * c * a * b + b * b) * dt
    return mean, var


def test_config_validation():
    for bad in (dict(n_paths=0), dict(dt=0.0), dict(seed=-1), dict(seed=2**64), dict(normal_method="box"),
                dict(threads=0), dict(m0=math.inf)):
        with pytest.raises(ConfigError):
            SimConfig(**bad)


def test_increment_statistics():
    rng = np.random.default_rng(7)
    band = AmbiguityBand(0.3, 0.2)
    for method in ("ziggurat", "inverse_cdf"):
        dw_i, dw_s = correlated_increments(-0.2, band, 0.01, rng, 400_000, method)
        assert np.var(dw_i) == pytest.approx(0.01, rel=0.01)
        assert np.var(dw_s) == pytest.approx(0.01, rel=0.01)
        assert np.corrcoef(dw_i, dw_s)[0, 1] == pytest.approx(0.1, abs=0.005)
        assert abs(np.mean(dw_s)) < 5 * 0.1 / math.sqrt(400_000)


def test_zero_controls_deterministic(bench):
    grid = TimeGrid.uniform(0, 50, 0.5)
    n = len(grid) - 1
    controls = ControlPath(grid.as_array(), np.zeros(n), np.zeros(n), np.full(n, 0.1))
    cfg = SimConfig(n_paths=100, dt=0.5, m0=1.0)
    m_t = simulate_terminal_wealth(controls, 0.0, bench, AmbiguityBand(0.0, 0.1), cfg)
    assert np.all(m_t == m_t[0])
    assert m_t[0] == pytest.approx((1 + bench.r * 0.5) ** 100, rel=1e-12)


def test_constant_investment_mean(bench):
    p = bench.replace(T=5.0)
    grid = TimeGrid.uniform(0, 5, 0.05)
    n = len(grid) - 1
    controls = ControlPath(grid.as_array(), np.zeros(n), np.full(n, 0.4), np.full(n, 0.1))
    cfg = SimConfig(n_paths=50_000, dt=0.05, seed=3)
    m_t = simulate_terminal_wealth(controls, 0.0, p, AmbiguityBand(0.0, 0.1), cfg)
    mean, var = _euler_gaussian_oracle(controls, 0.0, p, AmbiguityBand(0.0, 0.1), 0.0)
    assert abs(np.mean(m_t) - mean) < 4 * math.sqrt(var / cfg.n_paths)
    assert np.var(m_t) == pytest.approx(var, rel=0.03)


def test_determinism_and_threads(bench):
    band = AmbiguityBand(0.0, 0.0)
    p = bench.replace(T=2.0)
    base = SimConfig(n_paths=40_000, dt=0.1, seed=11)
    controls = equilibrium_controls(p, band, base.grid(p))
    a = simulate_terminal_wealth(controls, 0.0, p, band, base)
    b = simulate_terminal_wealth(controls, 0.0, p, band, base)
    c = simulate_terminal_wealth(controls, 0.0, p, band, SimConfig(n_paths=40_000, dt=0.1, seed=11, threads=3))
    assert np.array_equal(a, b) and np.array_equal(a, c)
    d = simulate_terminal_wealth(controls, 0.0, p, band, SimConfig(n_paths=40_000, dt=0.1, seed=12))
    assert not np.array_equal(a, d)


def test_prefix_stability(bench):
    # a full block does not depend on how many paths follow it
    band = AmbiguityBand(0.0, 0.0)
    p = bench.replace(T=1.0)
    small = SimConfig(n_paths=BLOCK_PATHS + 10, dt=0.1, seed=5)
    big = SimConfig(n_paths=2 * BLOCK_PATHS, dt=0.1, seed=5)
    controls = equilibrium_controls(p, band, small.grid(p))
    a = simulate_terminal_wealth(controls, 0.0, p, band, small)
    b = simulate_terminal_wealth(controls, 0.0, p, band, big)
    assert np.array_equal(a[:BLOCK_PATHS], b[:BLOCK_PATHS])


def test_common_paths_with_extra_xis(bench):
    band = AmbiguityBand(0.5, 0.05)
    p = bench.replace(T=2.0)
    cfg = SimConfig(n_paths=3000, dt=0.1, seed=9)
    controls = equilibrium_controls(p, band, cfg.grid(p))
    joint = simulate_terminal_wealth(controls, -0.05, p, band, cfg, extra_xis=[0.05])
    alone = simulate_terminal_wealth(controls, 0.05, p, band, cfg)
    assert joint.shape == (2, 3000) and np.array_equal(joint[1], alone)


def test_xi_outside_band(bench):
    band = AmbiguityBand(0.5, 0.05)
    p = bench.replace(T=1.0)
    cfg = SimConfig(n_paths=10, dt=0.5)
    controls = equilibrium_controls(p, band, cfg.grid(p))
    with pytest.raises(DomainError):
        simulate_terminal_wealth(controls, 0.06, p, band, cfg)
    with pytest.raises(ConfigError):
        simulate_terminal_wealth(controls, 0.0, p, band, SimConfig(n_paths=10, dt=0.25))


def test_single_step(bench):
    p = bench.replace(T=0.5)
    band = AmbiguityBand(0.0, 0.0)
    cfg = SimConfig(n_paths=20_000, dt=0.5, seed=1)
    controls = equilibrium_controls(p, band, cfg.grid(p))
    assert len(controls.x) == 1
    m_t = simulate_terminal_wealth(controls, 0.0, p, band, cfg)
    mean, var = _euler_gaussian_oracle(controls, 0.0, p, band, 0.0)
    assert abs(np.mean(m_t) - mean) < 4 * math.sqrt(var / cfg.n_paths)


def test_exact_discrete_oracle(bench):
    # E[-exp(-g m)/g] for Gaussian m is -exp(-g mean + g^2 var / 2)/g
    band = AmbiguityBand(0.5, 0.05)
    p = bench.replace(T=5.0)
    cfg = SimConfig(n_paths=60_000, dt=0.05, seed=20240601)
    controls = equilibrium_controls(p, band, cfg.grid(p))
    stats = verify_value_function(p, band, cfg)
    mean, var = _euler_gaussian_oracle(controls, -0.05, p, band, 0.0)
    expected = -math.exp(-p.gamma * mean + 0.5 * p.gamma**2 * var) / p.gamma
    assert abs(stats.mean_utility - expected) < 4 * stats.std_error
    # the Euler bias is well below the Monte Carlo error at this step size
    assert abs(expected - stats.v_closed_form) < stats.std_error
    assert abs(stats.z_score) < 4


def test_dominance_small(bench):
    band = AmbiguityBand(0.5, 0.05)
    p = bench.replace(T=5.0)
    cfg = SimConfig(n_paths=20_000, dt=0.05, seed=20240601)
    stats, table = value_and_dominance(p, band, [-0.05, 0.0, 0.05], cfg)
    assert table.xi_star == -0.05 and table.argmin == -0.05
    assert stats.xi == -0.05
    assert [row.xi for row in table.rows] == [-0.05, 0.0, 0.05]
    star = next(row for row in table.rows if row.xi == -0.05)
    assert star.diff_vs_star == 0.0 and star.z_vs_star == 0.0
    others = [row for row in table.rows if row.xi != -0.05]
    assert all(row.z_vs_star > 3 for row in others)
    assert worst_case_dominance(p, band, [-0.05, 0.0, 0.05], cfg).rows == table.rows
    assert table.rng == rng_metadata(cfg)


def test_switching_regime_rejected(bench):
    with pytest.raises(PreconditionError, match="switches"):
        verify_value_function(bench, AmbiguityBand(0.0, 0.36), SimConfig(n_paths=10, dt=0.5))
    with pytest.raises(PreconditionError):
        verify_value_function(bench, AmbiguityBand(-0.98, 0.01), SimConfig(n_paths=10, dt=0.5))


def test_piecewise_check_runs(bench):
    stats = piecewise_value_check(bench, AmbiguityBand(0.0, 0.31), SimConfig(n_paths=2000, dt=0.25, seed=2))
    assert math.isnan(stats.xi) and stats.n_paths == 2000 and abs(stats.z_score) < 5


def test_closed_form_reference(bench):
    assert closed_form_value(bench, AmbiguityBand(0.5, 0.05), 0.0) == pytest.approx(-0.03426615795507896,
                                                                                      rel=1e-10)
    assert cara_utility(0.0, 2.0) == -0.5
