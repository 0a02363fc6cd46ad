"""Euler-Maruyama simulation of insurer wealth under a fixed correlation distortion.

Paths are split into fixed-size blocks, each drawing from its own Philox
stream keyed by ``(seed, block index)``, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .calibration import normal_quantile_array
from .equilibrium import EquilibriumRegime, classify_regime, equilibrium_arrays, equilibrium_p_integral, switch_times
from .errors import ConfigError, DomainError, PreconditionError
from .market import AmbiguityBand, MarketParams, TimeGrid
from .strategy import ValueFunctionParams, value_function

BLOCK_PATHS = 16384
NORMAL_METHODS = ("ziggurat", "inverse_cdf")


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 10_000
    dt: float = 0.01
    seed: int = 0
    m0: float = 0.0
    normal_method: str = "ziggurat"
    threads: int = 1

    def __post_init__(self):
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise ConfigError(f"n_paths must be a positive integer, got {self.n_paths!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not math.isfinite(self.m0):
            raise ConfigError("m0 must be finite")
        if self.normal_method not in NORMAL_METHODS:
            raise ConfigError(f"normal_method must be one of {NORMAL_METHODS}, got {self.normal_method!r}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError(f"threads must be a positive integer, got {self.threads!r}")

    def grid(self, params: MarketParams) -> TimeGrid:
        return TimeGrid.uniform(params.t0, params.T, self.dt)


def rng_metadata(config: SimConfig) -> dict:
    """Generator settings needed to reproduce a run."""
    return {
        "bit_generator": "Philox",
        "numpy_version": np.__version__,
        "normal_method": config.normal_method,
        "block_paths": BLOCK_PATHS,
        "seed": int(config.seed),
    }


@dataclass(frozen=True)
class ControlPath:
    """Controls held over each Euler step ``[times[k], times[k+1])``."""

    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    xi_star: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.times) - 1
        for name in ("x", "y", "theta"):
            if len(getattr(self, name)) != n:
                raise ConfigError(f"control {name} has {len(getattr(self, name))} entries for {n} steps")


@dataclass(frozen=True)
class PathStats:
    mean_utility: float
    std_error: float
    v_closed_form: float
    z_score: float
    n_paths: int
    xi: float


@dataclass(frozen=True)
class DominanceRow:
    xi: float
    mean_utility: float
    std_error: float
    diff_vs_star: float  # mean of u(xi) - u(xi*) on common paths
    diff_std_error: float
    z_vs_star: float


@dataclass(frozen=True)
class DominanceTable:
    xi_star: float
    rows: tuple
    rng: dict = field(default_factory=dict)

    @property
    def argmin(self) -> float:
        return min(self.rows, key=lambda row: row.mean_utility).xi

    @property
    def min_z(self) -> float:
        return min(row.z_vs_star for row in self.rows)


def _normals(rng: np.random.Generator, shape, method: str) -> np.ndarray:
    if method == "ziggurat":
        return rng.standard_normal(shape)
    u = rng.random(shape)
    u[u == 0.0] = 2.0**-54
    return normal_quantile_array(u)


def _block_rngs(config: SimConfig) -> list:
    sizes = [BLOCK_PATHS] * (config.n_paths // BLOCK_PATHS)
    if config.n_paths % BLOCK_PATHS:
        sizes.append(config.n_paths % BLOCK_PATHS)
    root = np.random.SeedSequence(int(config.seed))
    return [(n, np.random.Generator(np.random.Philox(child))) for n, child in zip(sizes, root.spawn(len(sizes)))]


def correlated_increments(xi: float, band: AmbiguityBand, dt: float, rng: np.random.Generator, size: int = 1,
                          method: str = "ziggurat") -> tuple:
    """``(dW_I, dW_S)`` with variance ``dt`` each and correlation ``rho + xi``."""
    c = band.rho + xi
    if abs(c) > 1.0:
        raise DomainError(f"|rho + xi| = {abs(c)!r} exceeds 1")
    z = _normals(rng, (2, size), method) * math.sqrt(dt)
    return z[0], c * z[0] + math.sqrt(max(0.0, 1.0 - c * c)) * z[1]


def equilibrium_controls(params: MarketParams, band: AmbiguityBand, grid: TimeGrid) -> ControlPath:
    """Closed-form equilibrium controls at the left end of every step."""
    times = grid.as_array()
    eq = equilibrium_arrays(times[:-1], params, band)
    failed = np.isnan(eq["theta"])
    if np.any(failed):
        raise PreconditionError(f"market failure at s={float(times[:-1][failed][0])!r}; no controls to simulate")
    return ControlPath(times=times, x=eq["x"], y=eq["y"], theta=eq["theta"], xi_star=eq["xi"])


def _xi_tracks(xis, n_steps) -> list:
    tracks = []
    for xi in xis:
        arr = np.broadcast_to(np.asarray(xi, dtype=float), (n_steps,))
        tracks.append(arr)
    return tracks


def _simulate_block(n, rng, controls, tracks, params, band, config) -> list:
    dts = np.diff(controls.times)
    sqrt_dts = np.sqrt(dts)
    drift = controls.x * controls.theta * params.l + controls.y * params.excess_return
    loss_vol = controls.x * params.eta * sqrt_dts
    asset_vol = controls.y * params.sigma * sqrt_dts
    m = [np.full(n, float(config.m0)) for _ in tracks]
    buf = np.empty(n)
    for k in range(len(dts)):
        z = _normals(rng, (2, n), config.normal_method)
        for wealth, xi in zip(m, tracks):
            c = band.rho + xi[k]
            # m += (m r + drift) dt + x eta dW_I + y sigma (c dW_I + sqrt(1 - c^2) dZ)
            np.multiply(z[0], loss_vol[k] + c * asset_vol[k], out=buf)
            buf += (math.sqrt(max(0.0, 1.0 - c * c)) * asset_vol[k]) * z[1]
            buf += wealth * (params.r * dts[k])
            buf += drift[k] * dts[k]
            wealth += buf
    return m


def simulate_terminal_wealth(
    controls: ControlPath,
    xi,
    params: MarketParams,
    band: AmbiguityBand,
    config: SimConfig,
    extra_xis: Sequence = (),
) -> np.ndarray:
    """Terminal wealth samples under distortion ``xi`` (scalar or one value per step).

    With ``extra_xis`` the same normals drive every distortion and a 2-D array
    with one row per distortion is returned.
    """
    n_steps = len(controls.times) - 1
    expected = config.grid(params).as_array()
    if len(expected) != len(controls.times) or not np.allclose(expected, controls.times, rtol=0, atol=1e-9):
        raise ConfigError("control path does not cover the simulation grid")
    xis = [xi, *extra_xis]
    tracks = _xi_tracks(xis, n_steps)
    for track in tracks:
        if np.any(np.abs(track) > band.phi + 1e-15):
            raise DomainError(f"|xi| exceeds phi={band.phi!r}")
    blocks = _block_rngs(config)
    run = lambda blk: _simulate_block(blk[0], blk[1], controls, tracks, params, band, config)
    if config.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(blk) for blk in blocks]
    out = np.vstack([np.concatenate([res[i] for res in results]) for i in range(len(xis))])
    return out[0] if not extra_xis else out


def cara_utility(m, gamma: float):
    return -np.exp(-gamma * np.asarray(m)) / gamma


def _require_constant_regime(params: MarketParams, band: AmbiguityBand) -> EquilibriumRegime:
    switches = switch_times(params, band)
    if switches:
        sw = switches[0]
        raise PreconditionError(
            f"regime switches from {sw.before.value} to {sw.after.value} at s={sw.time:.6g}; "
            "value-function verification needs a constant regime"
        )
    regime = classify_regime(params.t0, params, band)
    if regime is EquilibriumRegime.MARKET_FAILURE:
        raise PreconditionError("market failure: no equilibrium controls")
    return regime


def closed_form_value(params: MarketParams, band: AmbiguityBand, m0: float) -> float:
    p_int = equilibrium_p_integral(params.t0, params, band)
    return value_function(ValueFunctionParams(params.t0, m0, p_int), params)


def _stats(u, v, xi) -> PathStats:
    mean = float(np.mean(u))
    se = float(np.std(u, ddof=1) / math.sqrt(len(u))) if len(u) > 1 else math.inf
    z = (mean - v) / se if se > 0 else (0.0 if mean == v else math.copysign(math.inf, mean - v))
    return PathStats(mean, se, v, z, len(u), float(xi))


def verify_value_function(params: MarketParams, band: AmbiguityBand, config: SimConfig) -> PathStats:
    """Monte Carlo estimate of ``E[u(m_T)]`` at the worst-case distortion against the closed form."""
    _require_constant_regime(params, band)
    controls = equilibrium_controls(params, band, config.grid(params))
    xi = float(controls.xi_star[0])
    m_t = simulate_terminal_wealth(controls, xi, params, band, config)
    return _stats(cara_utility(m_t, params.gamma), closed_form_value(params, band, config.m0), xi)


def worst_case_dominance(
    params: MarketParams, band: AmbiguityBand, xi_grid: Sequence[float], config: SimConfig
) -> DominanceTable:
    """Expected utility under each fixed ``xi`` with the optimal controls, on common paths."""
    return value_and_dominance(params, band, xi_grid, config)[1]


def value_and_dominance(
    params: MarketParams, band: AmbiguityBand, xi_grid: Sequence[float], config: SimConfig
) -> tuple:
    """One common-path run giving the value check at ``xi*`` and the dominance table."""
    _require_constant_regime(params, band)
    controls = equilibrium_controls(params, band, config.grid(params))
    xi_star = float(controls.xi_star[0])
    others = [float(xi) for xi in xi_grid if float(xi) != xi_star]
    m_t = np.atleast_2d(simulate_terminal_wealth(controls, xi_star, params, band, config, extra_xis=others))
    u = cara_utility(m_t, params.gamma)
    n = u.shape[1]
    rows = []
    for xi, ui in zip([xi_star, *others], u):
        d = ui - u[0]
        d_mean = float(np.mean(d))
        d_se = float(np.std(d, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        z = d_mean / d_se if d_se > 0 else 0.0
        rows.append(DominanceRow(xi, float(np.mean(ui)), float(np.std(ui, ddof=1) / math.sqrt(n)), d_mean, d_se, z))
    rows.sort(key=lambda row: row.xi)
    stats = _stats(u[0], closed_form_value(params, band, config.m0), xi_star)
    return stats, DominanceTable(xi_star, tuple(rows), rng_metadata(config))


def piecewise_value_check(params: MarketParams, band: AmbiguityBand, config: SimConfig) -> PathStats:
    """Informational run that follows the worst-case distortion across regime switches."""
    controls = equilibrium_controls(params, band, config.grid(params))
    m_t = simulate_terminal_wealth(controls, controls.xi_star, params, band, config)
    return _stats(cara_utility(m_t, params.gamma), closed_form_value(params, band, config.m0), float("nan"))
