"""Scenario files, orchestration and CSV/JSON export.

Scenario files are YAML with unit-bearing key names. An example::

    name: zero-correlation
    market:
      expected_loss_per_year: 1.0
      loss_volatility_per_sqrt_year: 0.28
      risk_free_rate_per_year: 0.015
      risky_drift_per_year: 0.035
      risky_volatility_per_sqrt_year: 0.18
      policyholder_risk_aversion: 2.0
      insurer_risk_aversion: 2.0
      start_year: 0.0
      horizon_year: 50.0
    band:
      rho: 0.0
      phi: [0.0, 0.31, 0.36, 0.46]
    grid: {start_year: 0.0, stop_year: 50.0, step_years: 0.5}
    outputs: [path, statics, verify]

``band`` may be replaced by ``calibration`` (``rho_hat``, ``sample_size``,
``confidence`` list and ``include_benchmark``). Floats are written with
``format(v, ".12g")``: twelve significant digits, round-half-even on the
exact binary value, exponent notation only below 1e-4 or at 1e12 and above.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from . import __version__
from .calibration import CalibrationInput, ambiguity_radius, calibration_grid
from .equilibrium import (
    EquilibriumRegime,
    classify_regime,
    equilibrium_path,
    equilibrium_point,
    switch_times,
)
from .errors import ConfigError, ModelError, PreconditionError
from .market import AmbiguityBand, MarketParams, TimeGrid
from .montecarlo import SimConfig, rng_metadata, value_and_dominance
from .saddle import grid_maxmin
from .statics import statics_report
from .strategy import hjbi_residual

OUTPUTS = ("path", "statics", "verify", "mc", "calibrate-grid")
PATH_COLUMNS = ("s", "regime", "theta_star", "x_star", "y_star", "xi_star", "p_rate")
GOLDEN = ("zero_correlation", "positive_correlation", "negative_correlation")

_MARKET_KEYS = {
    "expected_loss_per_year": "l",
    "loss_volatility_per_sqrt_year": "eta",
    "risk_free_rate_per_year": "r",
    "risky_drift_per_year": "mu",
    "risky_volatility_per_sqrt_year": "sigma",
    "policyholder_risk_aversion": "alpha",
    "insurer_risk_aversion": "gamma",
    "start_year": "t0",
    "horizon_year": "T",
}


@dataclass(frozen=True)
class ExplicitBands:
    rho: float
    phis: tuple

    def resolve(self) -> list:
        return [(f"phi-{fmt(phi)}", AmbiguityBand(self.rho, phi)) for phi in self.phis]


@dataclass(frozen=True)
class CalibratedBands:
    rho_hat: float
    n: int
    confidences: tuple
    include_benchmark: bool = True

    def resolve(self) -> list:
        out = [("phi-0", AmbiguityBand(self.rho_hat, 0.0))] if self.include_benchmark else []
        for conf in self.confidences:
            cal = ambiguity_radius(CalibrationInput(self.rho_hat, self.n, conf))
            if not cal.admissible:
                raise ConfigError(
                    f"calibrated radius {cal.phi:.12g} at confidence {conf} is inadmissible for rho_hat={self.rho_hat}"
                )
            out.append((f"conf-{fmt(conf)}", cal.band))
        return out


@dataclass(frozen=True)
class GridConfig:
    start: float
    stop: float
    step: float

    def time_grid(self) -> TimeGrid:
        return TimeGrid.uniform(self.start, self.stop, self.step)


@dataclass(frozen=True)
class McSettings:
    n_paths: int = 10_000
    dt: float = 0.01
    seed: int = 0
    m0: float = 0.0
    normal_method: str = "ziggurat"
    xi_points: int = 3


@dataclass(frozen=True)
class SweepSettings:
    time: float = 0.0
    rho_points: int = 39
    phi_points: int = 20


@dataclass(frozen=True)
class Scenario:
    name: str
    params: MarketParams
    band_source: Union[ExplicitBands, CalibratedBands]
    grid: GridConfig
    outputs: tuple
    mc: McSettings = McSettings()
    sweep: SweepSettings = SweepSettings()
    y_threshold: str = "display"

    def bands(self) -> list:
        return self.band_source.resolve()

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, mc=replace(self.mc, seed=int(seed)))


@dataclass
class RunManifest:
    tool_version: str
    scenario: str
    config_digest: str
    seeds: dict
    started: str
    finished: str = ""
    files: dict = field(default_factory=dict)
    rng: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- parsing


def _marks(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out.setdefault(path, node.start_mark)
    if isinstance(node, yaml.MappingNode):
        seen = set()
        for key_node, value_node in node.value:
            key = key_node.value
            if key in seen:
                m = key_node.start_mark
                raise ConfigError(f"duplicate key {'.'.join(path + (key,))!r}", m.line + 1, m.column + 1)
            seen.add(key)
            out[path + (key,)] = key_node.start_mark
            _marks(value_node, path + (key,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _marks(item, path + (i,), out)
    return out


class _Reader:
    def __init__(self, data, marks):
        self.data = data
        self.marks = marks

    def fail(self, message, path):
        while path and path not in self.marks:
            path = path[:-1]
        m = self.marks.get(path)
        raise ConfigError(message, m.line + 1 if m else None, m.column + 1 if m else None)

    def section(self, path, allowed, required=()):
        node = self.get(path)
        if not isinstance(node, dict):
            self.fail(f"{'.'.join(map(str, path)) or 'document'} must be a mapping", path)
        for key in node:
            if key not in allowed:
                self.fail(f"unknown key {'.'.join(map(str, path + (key,)))!r}", path + (key,))
        for key in required:
            if key not in node:
                self.fail(f"missing key {'.'.join(map(str, path + (key,)))!r}", path)
        return node

    def get(self, path):
        node = self.data
        for key in path:
            node = node[key]
        return node

    def number(self, path, default=None):
        try:
            value = self.get(path)
        except (KeyError, IndexError):
            if default is None:
                self.fail(f"missing key {'.'.join(map(str, path))!r}", path)
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"{'.'.join(map(str, path))} must be a number, got {value!r}", path)
        if not math.isfinite(value):
            self.fail(f"{'.'.join(map(str, path))} must be finite", path)
        return float(value)

    def integer(self, path, default=None):
        value = self.number(path, default)
        if value != int(value):
            self.fail(f"{'.'.join(map(str, path))} must be an integer", path)
        return int(value)

    def numbers(self, path):
        value = self.get(path)
        if not isinstance(value, list) or not value:
            self.fail(f"{'.'.join(map(str, path))} must be a non-empty list", path)
        return tuple(self.number(path + (i,)) for i in range(len(value)))


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate scenario text."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark or exc.context_mark
        raise ConfigError(f"YAML parse error: {exc.problem}", m.line + 1 if m else None, m.column + 1 if m else None)
    if node is None:
        raise ConfigError("empty scenario file")
    rd = _Reader(data, _marks(node))
    top = rd.section((), {"name", "market", "band", "calibration", "grid", "outputs", "mc", "sweep", "statics"},
                     ("name", "market", "grid", "outputs"))
    if not isinstance(top["name"], str) or not top["name"]:
        rd.fail("name must be a non-empty string", ("name",))

    rd.section(("market",), set(_MARKET_KEYS), set(_MARKET_KEYS))
    values = {attr: rd.number(("market", key)) for key, attr in _MARKET_KEYS.items()}
    try:
        params = MarketParams(**values)
    except ModelError as exc:
        rd.fail(str(exc), ("market",))

    if ("band" in top) == ("calibration" in top):
        rd.fail("exactly one of 'band' or 'calibration' is required", ())
    try:
        if "band" in top:
            rd.section(("band",), {"rho", "phi"}, {"rho", "phi"})
            source = ExplicitBands(rd.number(("band", "rho")), rd.numbers(("band", "phi")))
        else:
            cal = rd.section(("calibration",), {"rho_hat", "sample_size", "confidence", "include_benchmark"},
                             {"rho_hat", "sample_size", "confidence"})
            bench = cal.get("include_benchmark", True)
            if not isinstance(bench, bool):
                rd.fail("calibration.include_benchmark must be true or false", ("calibration", "include_benchmark"))
            source = CalibratedBands(
                rd.number(("calibration", "rho_hat")),
                rd.integer(("calibration", "sample_size")),
                rd.numbers(("calibration", "confidence")),
                bench,
            )
        source.resolve()
    except ModelError as exc:
        if isinstance(exc, ConfigError) and exc.line is not None:
            raise
        rd.fail(str(exc), ("band",) if "band" in top else ("calibration",))

    rd.section(("grid",), {"start_year", "stop_year", "step_years"}, {"start_year", "stop_year", "step_years"})
    grid = GridConfig(rd.number(("grid", "start_year")), rd.number(("grid", "stop_year")),
                      rd.number(("grid", "step_years")))
    try:
        grid.time_grid().check_within(params)
    except ModelError as exc:
        rd.fail(str(exc), ("grid",))

    outputs = top["outputs"]
    if not isinstance(outputs, list) or not outputs:
        rd.fail("outputs must be a non-empty list", ("outputs",))
    for i, name in enumerate(outputs):
        if name not in OUTPUTS:
            rd.fail(f"unknown output {name!r}; expected one of {', '.join(OUTPUTS)}", ("outputs", i))
    outputs = tuple(name for name in OUTPUTS if name in outputs)

    mc = McSettings()
    if "mc" in top:
        rd.section(("mc",), {"n_paths", "dt_years", "seed", "initial_wealth", "normal_method", "xi_grid_points"})
        method = top["mc"].get("normal_method", mc.normal_method)
        mc = McSettings(
            n_paths=rd.integer(("mc", "n_paths"), mc.n_paths),
            dt=rd.number(("mc", "dt_years"), mc.dt),
            seed=rd.integer(("mc", "seed"), mc.seed),
            m0=rd.number(("mc", "initial_wealth"), mc.m0),
            normal_method=method,
            xi_points=rd.integer(("mc", "xi_grid_points"), mc.xi_points),
        )
        try:
            _sim_config(mc)
        except ConfigError as exc:
            rd.fail(str(exc), ("mc",))
        if mc.xi_points < 1:
            rd.fail("mc.xi_grid_points must be at least 1", ("mc", "xi_grid_points"))

    sweep = SweepSettings()
    if "sweep" in top:
        rd.section(("sweep",), {"time_year", "rho_points", "phi_points"})
        sweep = SweepSettings(
            time=rd.number(("sweep", "time_year"), sweep.time),
            rho_points=rd.integer(("sweep", "rho_points"), sweep.rho_points),
            phi_points=rd.integer(("sweep", "phi_points"), sweep.phi_points),
        )
        if not params.t0 <= sweep.time <= params.T:
            rd.fail("sweep.time_year outside the horizon", ("sweep", "time_year"))
        if sweep.rho_points < 2 or sweep.phi_points < 2:
            rd.fail("sweep needs at least 2 points per axis", ("sweep",))

    y_threshold = "display"
    if "statics" in top:
        rd.section(("statics",), {"y_threshold"})
        y_threshold = top["statics"].get("y_threshold", "display")
        if y_threshold not in ("display", "exact"):
            rd.fail("statics.y_threshold must be 'display' or 'exact'", ("statics", "y_threshold"))

    return Scenario(top["name"], params, source, grid, outputs, mc, sweep, y_threshold)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {str(path)!r}: {exc.strerror}") from None
    return parse_scenario(text)


def write_scenario(scenario: Scenario) -> str:
    """Canonical YAML text; :func:`parse_scenario` inverts it."""
    p = scenario.params
    doc = {
        "name": scenario.name,
        "market": {key: float(getattr(p, attr)) for key, attr in _MARKET_KEYS.items()},
    }
    src = scenario.band_source
    if isinstance(src, ExplicitBands):
        doc["band"] = {"rho": float(src.rho), "phi": [float(v) for v in src.phis]}
    else:
        doc["calibration"] = {
            "rho_hat": float(src.rho_hat),
            "sample_size": int(src.n),
            "confidence": [float(v) for v in src.confidences],
            "include_benchmark": bool(src.include_benchmark),
        }
    g = scenario.grid
    doc["grid"] = {"start_year": float(g.start), "stop_year": float(g.stop), "step_years": float(g.step)}
    doc["outputs"] = list(scenario.outputs)
    m = scenario.mc
    doc["mc"] = {
        "n_paths": int(m.n_paths),
        "dt_years": float(m.dt),
        "seed": int(m.seed),
        "initial_wealth": float(m.m0),
        "normal_method": m.normal_method,
        "xi_grid_points": int(m.xi_points),
    }
    w = scenario.sweep
    doc["sweep"] = {"time_year": float(w.time), "rho_points": int(w.rho_points), "phi_points": int(w.phi_points)}
    doc["statics"] = {"y_threshold": scenario.y_threshold}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def config_digest(scenario: Scenario) -> str:
    return hashlib.sha256(write_scenario(scenario).encode("utf-8")).hexdigest()


def golden_path(name: str) -> Path:
    if name not in GOLDEN:
        raise ConfigError(f"unknown golden scenario {name!r}; expected one of {', '.join(GOLDEN)}")
    return Path(str(resources.files("robustins") / "golden" / f"{name}.yaml"))


def golden_scenarios() -> list:
    return [load_scenario(golden_path(name)) for name in GOLDEN]


# ---------------------------------------------------------------- records


def fmt(value) -> str:
    """Fixed CSV text for a value; ``None`` becomes an empty field."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.0:
            return "0"
        if math.isnan(value):
            return "nan"
        return format(value, ".12g")
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _json_value(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        number = float(text)
    except ValueError:
        return text
    if text.lstrip("-").isdigit():
        return int(text)
    return number


def render(columns, rows, fmt_name: str = "csv") -> str:
    texts = [[fmt(row.get(c)) for c in columns] for row in rows]
    if fmt_name == "json":
        records = [{c: _json_value(t) for c, t in zip(columns, row)} for row in texts]
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(texts)
    return buf.getvalue()


def path_rows(scenario: Scenario, band: AmbiguityBand) -> list:
    path = equilibrium_path(scenario.grid.time_grid(), scenario.params, band)
    return [
        {
            "s": p.s,
            "regime": p.regime,
            "theta_star": p.theta_star,
            "x_star": p.x_star,
            "y_star": p.y_star,
            "xi_star": p.xi_star,
            "p_rate": p.p_rate,
        }
        for p in path.points
    ]


SWITCH_COLUMNS = ("band", "rho", "phi", "time", "before", "after")


def switch_rows(scenario: Scenario, bands) -> list:
    g = scenario.grid
    rows = []
    for label, band in bands:
        for sw in switch_times(scenario.params, band, g.start, g.stop, g.step):
            rows.append({"band": label, "rho": band.rho, "phi": band.phi, "time": sw.time,
                         "before": sw.before, "after": sw.after})
    return rows


STATICS_COLUMNS = ("band", "s", "regime", "quantity", "driver", "analytic_sign", "fd_value", "threshold",
                   "consistent", "note")


def statics_rows(scenario: Scenario, label: str, band: AmbiguityBand) -> list:
    rows = []
    for s in scenario.grid.time_grid():
        regime = classify_regime(s, scenario.params, band)
        base = {"band": label, "s": s, "regime": regime}
        if regime is EquilibriumRegime.MARKET_FAILURE:
            rows.append({**base, "note": "market failure"})
            continue
        try:
            reports = statics_report(s, scenario.params, band, scenario.y_threshold)
        except PreconditionError as exc:
            rows.append({**base, "note": str(exc)})
            continue
        for rep in reports:
            rows.append({**base, "quantity": rep.quantity, "driver": rep.driver, "analytic_sign": rep.analytic_sign,
                         "fd_value": rep.fd_value, "threshold": rep.threshold, "consistent": rep.consistent})
    return rows


VERIFY_COLUMNS = ("band", "s", "regime", "case", "theta_star", "x_star", "y_star", "xi_star", "x_hat", "y_hat",
                  "xi_hat", "gap_x", "gap_y", "gap_xi", "step_x", "step_y", "step_xi", "within_one_step",
                  "hjbi_relative_residual", "note")


def verify_rows(scenario: Scenario, label: str, band: AmbiguityBand) -> list:
    p = scenario.params
    rows = []
    for s in (p.t0, 0.5 * (p.t0 + p.T), p.T):
        point = equilibrium_point(s, p, band)
        base = {"band": label, "s": s, "regime": point.regime}
        if point.failed or not point.theta_star > 0:
            rows.append({**base, "note": "no positive equilibrium price"})
            continue
        res = grid_maxmin(point.theta_star, s, p, band)
        resid, scale = hjbi_residual(point.theta_star, s, scenario.mc.m0, p, band)
        rows.append({
            **base,
            "case": res.analytic.case,
            "theta_star": point.theta_star,
            "x_star": res.analytic.x,
            "y_star": res.analytic.y,
            "xi_star": res.analytic.xi_star,
            "x_hat": res.x_hat,
            "y_hat": res.y_hat,
            "xi_hat": res.xi_hat,
            "gap_x": res.gaps[0],
            "gap_y": res.gaps[1],
            "gap_xi": res.gaps[2],
            "step_x": res.steps[0],
            "step_y": res.steps[1],
            "step_xi": res.steps[2],
            "within_one_step": res.within_one_step,
            "hjbi_relative_residual": abs(resid) / scale if scale else 0.0,
        })
    return rows


MC_COLUMNS = ("band", "xi", "is_xi_star", "mean_utility", "std_error", "v_closed_form", "z_score",
              "diff_vs_star", "z_vs_star", "n_paths", "dt", "note")


def _sim_config(mc: McSettings, threads: int = 1) -> SimConfig:
    return SimConfig(n_paths=mc.n_paths, dt=mc.dt, seed=mc.seed, m0=mc.m0, normal_method=mc.normal_method,
                     threads=threads)


def mc_rows(scenario: Scenario, label: str, band: AmbiguityBand, threads: int = 1) -> list:
    cfg = _sim_config(scenario.mc, threads)
    base = {"band": label, "n_paths": cfg.n_paths, "dt": cfg.dt}
    xi_grid = np.linspace(-band.phi, band.phi, scenario.mc.xi_points) if band.phi > 0 else np.zeros(1)
    try:
        stats, table = value_and_dominance(scenario.params, band, xi_grid, cfg)
    except PreconditionError as exc:
        return [{**base, "note": str(exc)}]
    rows = []
    for row in table.rows:
        star = row.xi == table.xi_star
        rows.append({
            **base,
            "xi": row.xi,
            "is_xi_star": star,
            "mean_utility": row.mean_utility,
            "std_error": row.std_error,
            "v_closed_form": stats.v_closed_form,
            "z_score": (row.mean_utility - stats.v_closed_form) / row.std_error if star else None,
            "diff_vs_star": row.diff_vs_star,
            "z_vs_star": row.z_vs_star,
        })
    return rows


CALIBRATION_COLUMNS = ("rho_hat", "n", "confidence", "z", "half_width", "rho_lo", "rho_hi", "phi", "admissible")


def calibration_rows(n: int = 30) -> list:
    return [
        {"rho_hat": c.rho_hat, "n": c.n, "confidence": c.confidence, "z": c.z, "half_width": c.half_width,
         "rho_lo": c.rho_lo, "rho_hi": c.rho_hi, "phi": c.phi, "admissible": c.admissible}
        for c in calibration_grid(n=n)
    ]


SWEEP_COLUMNS = ("s", "rho", "phi", "admissible", "regime")


def sweep_rows(scenario: Scenario) -> list:
    """Regime map over ``(rho, phi)`` at one time; inadmissible cells carry no regime."""
    w = scenario.sweep
    rows = []
    for rho in np.linspace(-0.95, 0.95, w.rho_points):
        for phi in np.linspace(0.0, 0.95, w.phi_points):
            rho, phi = float(rho), float(phi)
            try:
                band = AmbiguityBand(rho, phi)
            except ModelError:
                rows.append({"s": w.time, "rho": rho, "phi": phi, "admissible": False})
                continue
            rows.append({"s": w.time, "rho": rho, "phi": phi, "admissible": True,
                         "regime": classify_regime(w.time, scenario.params, band)})
    return rows


# ---------------------------------------------------------------- running


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _write(out: Path, name: str, columns, rows, fmt_name: str, manifest: RunManifest):
    filename = f"{name}.{fmt_name}"
    data = render(columns, rows, fmt_name).encode("utf-8")
    (out / filename).write_bytes(data)
    manifest.files[filename] = hashlib.sha256(data).hexdigest()


def run(
    scenario: Scenario,
    out,
    outputs: Optional[tuple] = None,
    seed: Optional[int] = None,
    threads: int = 1,
    fmt_name: str = "csv",
    include_sweep: bool = False,
) -> RunManifest:
    """Compute the requested artifacts for every band and write them under ``out``."""
    if fmt_name not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt_name!r}")
    if seed is not None:
        scenario = scenario.with_seed(seed)
    outputs = scenario.outputs if outputs is None else outputs
    bands = scenario.bands()
    manifest = RunManifest(
        tool_version=__version__,
        scenario=scenario.name,
        config_digest=config_digest(scenario),
        seeds={"mc": int(scenario.mc.seed)},
        started=_now(),
    )
    if "mc" in outputs:
        manifest.rng = rng_metadata(_sim_config(scenario.mc, threads))

    jobs = []
    if "path" in outputs:
        jobs += [(f"path_{label}", PATH_COLUMNS, lambda b=band: path_rows(scenario, b)) for label, band in bands]
        jobs.append(("switches", SWITCH_COLUMNS, lambda: switch_rows(scenario, bands)))
    if "statics" in outputs:
        jobs.append(("statics", STATICS_COLUMNS,
                     lambda: [r for label, band in bands for r in statics_rows(scenario, label, band)]))
    if "verify" in outputs:
        jobs.append(("verify", VERIFY_COLUMNS,
                     lambda: [r for label, band in bands for r in verify_rows(scenario, label, band)]))
    if "mc" in outputs:
        jobs.append(("mc", MC_COLUMNS,
                     lambda: [r for label, band in bands for r in mc_rows(scenario, label, band, threads)]))
    if "calibrate-grid" in outputs:
        n = scenario.band_source.n if isinstance(scenario.band_source, CalibratedBands) else 30
        jobs.append(("calibration", CALIBRATION_COLUMNS, lambda: calibration_rows(n)))
    if include_sweep:
        jobs.append(("sweep", SWEEP_COLUMNS, lambda: sweep_rows(scenario)))

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: job[2](), jobs))
    else:
        results = [job[2]() for job in jobs]

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for (name, columns, _), rows in zip(jobs, results):
        _write(out, name, columns, rows, fmt_name, manifest)
    manifest.finished = _now()
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def run_golden(out, fmt_name: str = "csv", threads: int = 1) -> dict:
    """Run the packaged golden scenarios, one subdirectory each."""
    out = Path(out)
    return {name: run(sc, out / name, threads=threads, fmt_name=fmt_name)
            for name, sc in zip(GOLDEN, golden_scenarios())}
