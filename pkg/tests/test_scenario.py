import json
import textwrap

import pytest

from robustins.errors import ConfigError
from robustins.scenario import (
    GOLDEN,
    PATH_COLUMNS,
    config_digest,
    fmt,
    golden_scenarios,
    load_scenario,
    parse_scenario,
    render,
    run,
    write_scenario,
)

BASE = textwrap.dedent("""\
    name: bench
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
      phi: [0.0, 0.36]
    grid: {start_year: 0.0, stop_year: 50.0, step_years: 5.0}
    outputs: [path, statics]
    """)


def test_load_benchmark(tmp_path):
    f = tmp_path / "s.yaml"
    f.write_text(BASE)
    sc = load_scenario(f)
    p = sc.params
    assert (p.l, p.eta, p.r, p.mu, p.sigma, p.alpha, p.gamma, p.t0, p.T) == (
        1.0, 0.28, 0.015, 0.035, 0.18, 2.0, 2.0, 0.0, 50.0)
    assert [label for label, _ in sc.bands()] == ["phi-0", "phi-0.36"]
    assert sc.outputs == ("path", "statics")


def test_mu_below_r():
    with pytest.raises(ConfigError, match="mu must exceed r"):
        parse_scenario(BASE.replace("risky_drift_per_year: 0.035", "risky_drift_per_year: 0.01"))


def test_calibration_source():
    text = BASE.replace("band:\n  rho: 0.0\n  phi: [0.0, 0.36]\n",
                        "calibration: {rho_hat: 0.0, sample_size: 30, confidence: [0.95], include_benchmark: false}\n")
    sc = parse_scenario(text)
    (label, band), = sc.bands()
    assert label == "conf-0.95"
    assert band.phi == pytest.approx(0.360269, abs=1e-6)
    assert band.phi == pytest.approx(0.360259, abs=2e-5)  # quoted value; see calibration tests


def test_unknown_key_position():
    text = BASE.replace("  insurer_risk_aversion: 2.0\n", "  insurer_risk_aversion: 2.0\n  kappa: 1\n")
    with pytest.raises(ConfigError) as exc:
        parse_scenario(text)
    assert "kappa" in str(exc.value)
    assert (exc.value.line, exc.value.column) == (10, 3)


@pytest.mark.parametrize(
    "old, new, needle",
    [
        ("band:\n  rho: 0.0\n", "band:\n  rho: 0.9\n", "phi"),
        ("outputs: [path, statics]", "outputs: []", "outputs"),
        ("outputs: [path, statics]", "outputs: [plot]", "plot"),
        ("grid: {start_year: 0.0, stop_year: 50.0", "grid: {start_year: 0.0, stop_year: 60.0", "grid"),
        ("name: bench\n", "name: bench\nname: again\n", "duplicate"),
        ("horizon_year: 50.0", "horizon_year: fifty", "horizon_year"),
        ("grid: {", "grid: {{", "YAML"),
    ],
)
def test_invalid_configs(old, new, needle):
    assert old in BASE
    with pytest.raises(ConfigError, match=needle):
        parse_scenario(BASE.replace(old, new))


def test_band_and_calibration_exclusive():
    text = BASE + "calibration: {rho_hat: 0.0, sample_size: 30, confidence: [0.95]}\n"
    with pytest.raises(ConfigError, match="exactly one"):
        parse_scenario(text)


def test_round_trip():
    for sc in [parse_scenario(BASE), *golden_scenarios()]:
        again = parse_scenario(write_scenario(sc))
        assert again == sc
        assert config_digest(again) == config_digest(sc)


def test_formatting():
    assert fmt(0.0) == "0" and fmt(-0.0) == "0"
    assert fmt(None) == "" and fmt(True) == "true"
    assert fmt(0.1 + 0.2) == "0.3"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(5e-5) == "5e-05" and fmt(1.5e-4) == "0.00015"
    assert fmt(7) == "7"


def test_render_json_mirrors_csv():
    rows = [{"s": 0.5, "regime": "UpperBoundDistorted", "x_star": None}]
    csv_text = render(("s", "regime", "x_star"), rows)
    assert csv_text == "s,regime,x_star\n0.5,UpperBoundDistorted,\n"
    assert json.loads(render(("s", "regime", "x_star"), rows, "json")) == [
        {"s": 0.5, "regime": "UpperBoundDistorted", "x_star": None}]


def test_run_outputs(tmp_path):
    sc = parse_scenario(BASE)
    manifest = run(sc, tmp_path / "o")
    files = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert files == ["manifest.json", "path_phi-0.36.csv", "path_phi-0.csv", "statics.csv", "switches.csv"]
    header = (tmp_path / "o" / "path_phi-0.csv").read_text().splitlines()[0]
    assert header == ",".join(PATH_COLUMNS)
    assert set(manifest.files) == set(files) - {"manifest.json"}
    on_disk = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert on_disk["config_digest"] == config_digest(sc)
    switches = (tmp_path / "o" / "switches.csv").read_text().splitlines()
    assert len(switches) == 2 and switches[1].startswith("phi-0.36,0,0.36,36.31")


def test_market_failure_is_not_an_error(tmp_path):
    text = BASE.replace("rho: 0.0\n  phi: [0.0, 0.36]", "rho: -0.98\n  phi: [0.01]")
    run(parse_scenario(text), tmp_path, outputs=("path",))
    rows = (tmp_path / "path_phi-0.01.csv").read_text().splitlines()
    assert rows[1].split(",")[1] == "MarketFailure"


def test_json_run(tmp_path):
    run(parse_scenario(BASE), tmp_path, outputs=("path",), fmt_name="json")
    records = json.loads((tmp_path / "path_phi-0.json").read_text())
    assert records[0]["regime"] == "UpperBoundDistorted" and records[0]["s"] == 0


def test_golden_names():
    assert [sc.name for sc in golden_scenarios()] == [n.replace("_", "-") for n in GOLDEN]
