"""Brute-force max-min verifier for the robust controls.

The oracle evaluates the inner HJBI objective on a rectangular
``(x, y)`` grid and minimizes over a handful of distortions. It never calls
the closed forms except to size the grid and to report the gap.

With the scale fixed at ``V_m = 1`` and the wealth term dropped, the objective
is::

    f = x theta l + y (mu - r) - (x^2 eta^2 + 2 (rho + xi) x eta y sigma + y^2 sigma^2) / (2 q)

where ``q = -V_m / V_mm``. Both simplifications leave the argmax-min unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, OracleCoverageError
from .market import AmbiguityBand, MarketParams
from .strategy import OptimalControl, cara_vm_ratio, controls_given_ratio

TIE_RTOL = 1e-12
ZOOM_CELLS = 5
ZOOM_POINTS = 201


@dataclass(frozen=True)
class GridSpec:
    x_max: float
    y_abs_max: float
    nx: int = 401
    ny: int = 401
    nxi: int = 21

    def __post_init__(self):
        if not (self.x_max > 0 and self.y_abs_max > 0):
            raise DomainError("grid caps must be positive")
        if min(self.nx, self.ny, self.nxi) < 3:
            raise DomainError("grid counts must be at least 3")

    def x_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.nx)

    def y_grid(self) -> np.ndarray:
        return np.union1d(np.linspace(-self.y_abs_max, self.y_abs_max, self.ny), [0.0])

    def xi_grid(self, phi: float) -> np.ndarray:
        if phi == 0:
            return np.zeros(1)
        return np.union1d(np.linspace(-phi, phi, self.nxi), [0.0])

    def scaled(self, factor: float) -> "GridSpec":
        return GridSpec(self.x_max * factor, self.y_abs_max * factor, self.nx, self.ny, self.nxi)

    @classmethod
    def around(cls, control: OptimalControl, nx: int = 401, ny: int = 401, nxi: int = 21) -> "GridSpec":
        return cls(2.0 * max(control.x, 1.0), 2.0 * max(abs(control.y), 1.0), nx, ny, nxi)


@dataclass(frozen=True)
class SaddleResult:
    x_hat: float
    y_hat: float
    xi_hat: float
    f_hat: float
    gap_to_analytic: float
    gaps: tuple  # per-coordinate (x, y, xi)
    steps: tuple  # grid spacing (x, y, xi)
    analytic: OptimalControl
    coarse_hat: tuple = ()  # first-stage (x, y)
    xi_set: tuple = field(default=())  # grid distortions attaining the worst case

    @property
    def within_one_step(self) -> bool:
        return all(g <= h * (1 + 1e-9) + 1e-15 for g, h in zip(self.gaps, self.steps))


def hamiltonian_f(x, y, xi, theta, s, params: MarketParams, band: AmbiguityBand, vm_ratio: Optional[float] = None):
    """Inner objective with ``V_m = 1``, ``V_mm = -1/vm_ratio`` and no wealth term.

    Broadcasts over array arguments.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi_arr) > band.phi):
        raise DomainError(f"|xi| exceeds phi={band.phi!r}")
    if np.any(np.asarray(x) < 0):
        raise DomainError("x must be non-negative")
    if vm_ratio is None:
        vm_ratio = cara_vm_ratio(s, params)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eta, sigma = params.eta, params.sigma
    gain = x * theta * params.l + y * params.excess_return
    risk = x * x * eta**2 + 2.0 * (band.rho + xi_arr) * x * eta * y * sigma + y * y * sigma**2
    out = gain - risk / (2.0 * vm_ratio)
    return float(out) if out.ndim == 0 else out


def _objective_layers(xs, ys, theta, params, band, q):
    # f(x, y, xi) = base(x, y) - (rho + xi) * cross(x, y)
    eta, sigma = params.eta, params.sigma
    a = xs * theta * params.l - xs * xs * eta**2 / (2.0 * q)
    b = ys * params.excess_return - ys * ys * sigma**2 / (2.0 * q)
    cross = np.outer(xs, ys) * (eta * sigma / q)
    base = a[:, None] + b[None, :]
    return base, cross


def _hausdorff(points, lo, hi):
    pts = np.asarray(points, dtype=float)
    to_interval = np.maximum(np.maximum(lo - pts, pts - hi), 0.0).max()
    return float(max(to_interval, abs(pts.min() - lo), abs(pts.max() - hi)))


def grid_maxmin(
    theta: float,
    s: float,
    params: MarketParams,
    band: AmbiguityBand,
    grid: Optional[GridSpec] = None,
    vm_ratio: Optional[float] = None,
    xi_mode: str = "endpoints",
    refine: bool = True,
) -> SaddleResult:
    """Discrete max over ``(x, y)`` of the min over ``xi``.

    ``xi_mode="endpoints"`` minimizes over ``{-phi, 0, phi}``, which is exact
    because the objective is linear in ``xi``; ``"full"`` uses the whole
    distortion grid instead. When the located optimum has ``x y = 0`` the
    objective does not depend on ``xi`` there, so the worst case is identified
    from the dual side: ``xi`` minimizing the grid max over ``(x, y)``.

    With ``refine`` a second grid of the same kind is laid over a few coarse
    cells around the coarse optimum. Reported steps are the coarse spacing.
    """
    if xi_mode not in ("endpoints", "full"):
        raise ValueError(f"unknown xi_mode {xi_mode!r}")
    q = cara_vm_ratio(s, params) if vm_ratio is None else vm_ratio
    analytic = controls_given_ratio(theta, params, band, q)
    if grid is None:
        grid = GridSpec.around(analytic)
    for _ in range(2):
        if grid.x_max >= 2 * analytic.x and grid.y_abs_max >= 2 * abs(analytic.y):
            break
        grid = grid.scaled(2.0)
    if analytic.x > grid.x_max or abs(analytic.y) > grid.y_abs_max:
        raise OracleCoverageError(
            f"analytic optimum ({analytic.x:g}, {analytic.y:g}) outside grid "
            f"[0, {grid.x_max:g}] x [-{grid.y_abs_max:g}, {grid.y_abs_max:g}]"
        )

    xs, ys = grid.x_grid(), grid.y_grid()
    xi_full = grid.xi_grid(band.phi)
    xi_inner = xi_full if xi_mode == "full" else np.unique([-band.phi, 0.0, band.phi])

    def inner_min(base, cross):
        out = np.full(base.shape, np.inf)
        for xi in xi_inner:
            np.minimum(out, base - (band.rho + xi) * cross, out=out)
        return out

    base, cross = _objective_layers(xs, ys, theta, params, band, q)
    inner = inner_min(base, cross)
    i, j = np.unravel_index(int(np.argmax(inner)), inner.shape)
    coarse_hat = (float(xs[i]), float(ys[j]))
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]

    # Zoomed second stage; the window spans several coarse cells because the
    # coarse argmax of an elongated quadratic can sit more than a cell away.
    fx = np.linspace(max(0.0, coarse_hat[0] - ZOOM_CELLS * hx), coarse_hat[0] + ZOOM_CELLS * hx, ZOOM_POINTS)
    fy = np.linspace(coarse_hat[1] - ZOOM_CELLS * hy, coarse_hat[1] + ZOOM_CELLS * hy, ZOOM_POINTS)
    if fy[0] < 0.0 < fy[-1]:
        fy = np.union1d(fy, [0.0])
    if refine:
        fine_base, fine_cross = _objective_layers(fx, fy, theta, params, band, q)
        fine = inner_min(fine_base, fine_cross)
        fi, fj = np.unravel_index(int(np.argmax(fine)), fine.shape)
        x_hat, y_hat, f_hat = float(fx[fi]), float(fy[fj]), float(fine[fi, fj])
        b_hat, c_hat = fine_base[fi, fj], fine_cross[fi, fj]
    else:
        fine_base, fine_cross = _objective_layers(fx, fy, theta, params, band, q)
        x_hat, y_hat, f_hat = coarse_hat[0], coarse_hat[1], float(inner[i, j])
        b_hat, c_hat = base[i, j], cross[i, j]

    if x_hat * y_hat != 0.0:
        values = b_hat - (band.rho + xi_inner) * c_hat
        xi_set = xi_inner[values <= values.min() + TIE_RTOL * max(1.0, abs(values.min()))]
    else:
        # f does not depend on xi when x y = 0: take the xi minimizing the grid
        # max over (x, y). The zoomed window keeps plateaus near the axes from
        # tying on coarse cells.
        dual = np.array(
            [
                max(
                    np.max(base - (band.rho + xi) * cross),
                    np.max(fine_base - (band.rho + xi) * fine_cross),
                )
                for xi in xi_full
            ]
        )
        best = dual.min()
        xi_set = xi_full[dual <= best + TIE_RTOL * max(1.0, abs(best))]
    xi_hat = float(xi_set.min())

    dxi = 2.0 * band.phi / (grid.nxi - 1)
    steps = (grid.x_max / (grid.nx - 1), 2.0 * grid.y_abs_max / (grid.ny - 1), dxi)
    lo, hi = analytic.xi_interval
    gaps = (abs(x_hat - analytic.x), abs(y_hat - analytic.y), _hausdorff(xi_set, lo, hi))
    return SaddleResult(
        x_hat=x_hat,
        y_hat=y_hat,
        xi_hat=xi_hat,
        f_hat=f_hat,
        gap_to_analytic=max(gaps),
        gaps=gaps,
        steps=steps,
        analytic=analytic,
        coarse_hat=coarse_hat,
        xi_set=tuple(float(v) for v in xi_set),
    )
