import numpy as np
import pytest

from robustins.errors import DomainError, OracleCoverageError
from robustins.market import AmbiguityBand, profitability_psi
from robustins.saddle import GridSpec, grid_maxmin, hamiltonian_f
from robustins.strategy import StrategyCase, cara_vm_ratio, optimal_control_cara

from conftest import random_band, random_params


def test_objective_examples(bench):
    band = AmbiguityBand(0.0, 0.3)
    assert hamiltonian_f(0.0, 0.0, 0.1, 0.1, 0.0, bench, band) == 0.0
    vals = [hamiltonian_f(0.0, 0.15, xi, 0.1, 0.0, bench, band) for xi in (-0.3, 0.0, 0.3)]
    assert vals[0] == vals[1] == vals[2]
    with pytest.raises(DomainError):
        hamiltonian_f(0.1, 0.1, 0.31, 0.1, 0.0, bench, band)
    with pytest.raises(DomainError):
        hamiltonian_f(-0.1, 0.1, 0.0, 0.1, 0.0, bench, band)


def test_objective_independent_form(bench):
    # direct V_m, V_mm form with an arbitrary positive scale
    band = AmbiguityBand(0.2, 0.1)
    x, y, xi, theta, s = 0.3, -0.2, 0.05, 0.09, 12.0
    q = cara_vm_ratio(s, bench)
    vm = 3.7
    vmm = -vm / q
    direct = vm * (x * theta * bench.l + y * 0.02) + 0.5 * vmm * (
        x * x * 0.0784 + 2 * (0.2 + xi) * x * 0.28 * y * 0.18 + y * y * 0.0324)
    assert hamiltonian_f(x, y, xi, theta, s, bench, band) * vm == pytest.approx(direct, rel=1e-13)


def test_fine_grid_example(bench):
    band = AmbiguityBand(0.0, 0.0)
    res = grid_maxmin(0.106495, 0.0, bench, band, GridSpec(1.0, 1.0, 801, 801, 3))
    assert res.x_hat == pytest.approx(0.3208, abs=2e-3)
    assert res.y_hat == pytest.approx(0.1458, abs=3e-3)


def test_lower_distorted_example(bench):
    res = grid_maxmin(0.103681, 0.0, bench, AmbiguityBand(0.5, 0.05))
    assert res.within_one_step
    assert (res.x_hat, res.y_hat, res.xi_hat) == pytest.approx((0.3388, -0.0913, -0.05), abs=2e-3)


def test_endpoint_min_signs(bench):
    band = AmbiguityBand(0.1, 0.2)
    xis = np.linspace(-0.2, 0.2, 41)
    pos = hamiltonian_f(0.3, 0.2, xis, 0.1, 0.0, bench, band)
    neg = hamiltonian_f(0.3, -0.2, xis, 0.1, 0.0, bench, band)
    assert xis[np.argmin(pos)] == 0.2 and xis[np.argmin(neg)] == -0.2
    assert pos.min() == min(pos[0], pos[-1]) and neg.min() == min(neg[0], neg[-1])


def test_coverage_error(bench):
    band = AmbiguityBand(0.0, 0.0)
    analytic = optimal_control_cara(0.106495, 0.0, bench, band)
    grid = GridSpec(analytic.x / 10, 0.01, 11, 11, 3)
    with pytest.raises(OracleCoverageError):
        grid_maxmin(0.106495, 0.0, bench, band, grid)


def test_grid_includes_boundaries():
    g = GridSpec(1.0, 1.0, 4, 4, 4)
    assert 0.0 in g.x_grid() and 0.0 in g.y_grid()
    xi = g.xi_grid(0.3)
    assert xi[0] == -0.3 and xi[-1] == 0.3 and 0.0 in xi


def _scenario_for_case(rng, case):
    while True:
        params = random_params(rng)
        band = random_band(rng, margin=0.02)
        theta = rng.uniform(0.01, 0.99) * params.alpha * params.eta**2 / params.l
        c = optimal_control_cara(theta, rng.uniform(0, params.T), params, band)
        if c.case is case and not c.near_boundary:
            return params, band, theta


@pytest.mark.parametrize("case", list(StrategyCase))
def test_agreement_per_case(rng, case):
    for _ in range(5):
        params, band, theta = _scenario_for_case(rng, case)
        s = params.t0
        res = grid_maxmin(theta, s, params, band)
        assert res.within_one_step, res
        full = grid_maxmin(theta, s, params, band, xi_mode="full")
        assert full.within_one_step


def test_endpoint_mode_equals_full_when_xy_nonzero(bench):
    band = AmbiguityBand(0.5, 0.05)
    a = grid_maxmin(0.103681, 0.0, bench, band)
    b = grid_maxmin(0.103681, 0.0, bench, band, xi_mode="full")
    assert (a.x_hat, a.y_hat, a.xi_hat, a.f_hat) == (b.x_hat, b.y_hat, b.xi_hat, b.f_hat)


def test_scale_invariance(rng, bench):
    band = AmbiguityBand(0.5, 0.05)
    base = grid_maxmin(0.103681, 0.0, bench, band)
    q = cara_vm_ratio(0.0, bench)
    for scale in rng.uniform(0.1, 10, 3):
        # V_m -> k V_m, V_mm -> k V_mm keeps q and rescales f by k
        res = grid_maxmin(0.103681, 0.0, bench, band, vm_ratio=(scale * q) / scale)
        assert (res.x_hat, res.y_hat, res.xi_hat) == (base.x_hat, base.y_hat, base.xi_hat)


def test_convergence_with_resolution(bench):
    band = AmbiguityBand(0.3, 0.1)
    theta = 0.08
    a = optimal_control_cara(theta, 0.0, bench, band)
    coarse = grid_maxmin(theta, 0.0, bench, band, GridSpec.around(a, 101, 101), refine=False)
    fine = grid_maxmin(theta, 0.0, bench, band, GridSpec.around(a, 801, 801), refine=False)
    assert fine.gap_to_analytic <= coarse.gap_to_analytic
