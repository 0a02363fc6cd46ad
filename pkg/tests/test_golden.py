import filecmp
from pathlib import Path

import pytest

from robustins.scenario import GOLDEN, run_golden

from narratives import CHECKS, load_paths

FROZEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def fresh(tmp_path_factory):
    out = tmp_path_factory.mktemp("golden")
    run_golden(out)
    return out


@pytest.mark.parametrize("name", GOLDEN)
def test_byte_identical_to_frozen(fresh, name):
    frozen = sorted(p.name for p in (FROZEN / name).iterdir())
    produced = sorted(p.name for p in (fresh / name).iterdir() if p.name != "manifest.json")
    assert produced == frozen
    _, mismatch, errors = filecmp.cmpfiles(FROZEN / name, fresh / name, frozen, shallow=False)
    assert mismatch == [] and errors == []


@pytest.mark.parametrize("name", GOLDEN)
def test_narrative(fresh, name):
    assert CHECKS[name](load_paths(fresh / name)) == []


def test_rerun_identical(fresh, tmp_path):
    run_golden(tmp_path)
    for name in GOLDEN:
        files = [p.name for p in (fresh / name).iterdir() if p.suffix == ".csv"]
        _, mismatch, _ = filecmp.cmpfiles(fresh / name, tmp_path / name, files, shallow=False)
        assert mismatch == []


def test_switch_rows(fresh):
    lines = (fresh / "zero_correlation" / "switches.csv").read_text().splitlines()
    assert lines[1:] == [
        "phi-0.31,0,0.31,11.6305374317,PureUnderwriting,UpperBoundDistorted",
        "phi-0.36,0,0.36,36.3130911179,PureUnderwriting,UpperBoundDistorted",
    ]


def test_verify_within_step(fresh):
    for name in GOLDEN:
        text = (fresh / name / "verify.csv").read_text()
        assert ",false," not in text


def test_mc_note_for_switching_band(fresh):
    text = (fresh / "zero_correlation" / "mc.csv").read_text()
    assert "phi-0.31" in text and "switches" in text
