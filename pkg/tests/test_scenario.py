import json
import textwrap
from pathlib import Path

import numpy as np
import pytest

from wellspectra.errors import ConfigError, OnEigenvalue
from wellspectra.model import HOLDS, NOT_APPLICABLE
from wellspectra.scenario import (
    CSV_COLUMNS,
    _fmt,
    _nudged,
    load_config,
    run_scenario,
    write_csv,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _write(tmp_path, text, name="case.cfg"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


SMALL_2D = """\
    [grid]
    dimension = 2
    box = -2:2, -2:2
    resolution = 17, 17

    [potential]
    family = gaussian_well
    center = 0, 0
    width = 0.6
    depth = 4.0

    [levels]
    values = -1.5, -0.8

    [sweeps]
    points = 3

    [output]
    prefix = small2d

    [seed]
    value = 5
    """

SMALL_3D = """\
    [grid]
    dimension = 3
    box = -2:2, -2:2, -2:2
    resolution = 9, 9, 9

    [potential]
    family = ball_well
    center = 0, 0, 0
    radius = 1.0
    depth = 12.0

    [levels]
    values = -0.5

    [sweeps]
    points = 2

    [constants]
    p = 3.0
    L_n = 0.1156
    b_samples = 40
    cp_samples = 100

    [output]
    prefix = small3d

    [seed]
    value = 7
    """


def test_load_bundled_benchmark_config():
    cfg = load_config(CONFIG_DIR / "ball_well_3d.cfg")
    assert cfg.grid.dimension == 3
    assert cfg.grid.resolution == (17, 17, 17)
    assert cfg.family["name"] == "ball_well"
    assert cfg.levels == [-0.5, -2.0, -6.0]
    assert cfg.constants.p == 3.0
    assert cfg.prefix == "ball3d"
    assert cfg.seed == 7


def test_load_config_level_range(tmp_path):
    path = _write(
        tmp_path,
        SMALL_2D.replace("values = -1.5, -0.8", "count = 4\n    min = -2\n    max = -0.5"),
    )
    cfg = load_config(path)
    assert cfg.levels == pytest.approx(list(np.linspace(-2, -0.5, 4)))


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")
    bad = _write(tmp_path, "[grid]\ndimension = 2\n", name="bad.cfg")
    with pytest.raises(ConfigError):
        load_config(bad)
    mismatch = _write(
        tmp_path, SMALL_2D.replace("dimension = 2", "dimension = 3"), name="dim.cfg"
    )
    with pytest.raises(ConfigError):
        load_config(mismatch)
    bad_family = _write(
        tmp_path,
        SMALL_2D.replace("family = gaussian_well", "family = volcano"),
        name="fam.cfg",
    )
    with pytest.raises(ConfigError):
        load_config(bad_family)
    bad_omega = _write(
        tmp_path,
        SMALL_2D + "\n[constants]\nomega_convention = diameter\n",
        name="omega.cfg",
    )
    with pytest.raises(ConfigError):
        load_config(bad_omega)
    bad_points = _write(
        tmp_path, SMALL_2D.replace("points = 3", "points = 0"), name="pts.cfg"
    )
    with pytest.raises(ConfigError):
        load_config(bad_points)


def test_fmt_is_deterministic_text():
    assert _fmt(None) == ""
    assert _fmt(True) == "true"
    assert _fmt(False) == "false"
    assert _fmt(3) == "3"
    assert _fmt(np.int64(4)) == "4"
    assert _fmt(0.1) == "0.1"
    assert _fmt(np.float64(1.0 / 3.0)) == repr(1.0 / 3.0)
    assert _fmt("x") == "x"


def test_nudged_protocol():
    calls = []

    def flaky(x):
        calls.append(x)
        if len(calls) < 3:
            raise OnEigenvalue("try again")
        return "done"

    x, out = _nudged(flaky, 2.0, "lambda")
    assert out == "done"
    assert x == pytest.approx(2.0 * (1 + 1e-9) ** 2)
    assert calls[0] == 2.0

    def always(x):
        raise OnEigenvalue("stuck")

    with pytest.raises(OnEigenvalue):
        _nudged(always, 1.0, "lambda")
    # zero has no multiplicative neighborhood; the protocol steps to 1e-9
    calls.clear()

    def zero_probe(x):
        calls.append(x)
        if len(calls) == 1:
            raise OnEigenvalue("zero")
        return None

    _nudged(zero_probe, 0.0, "gamma")
    assert calls == [0.0, 1e-9]


def test_run_scenario_2d(tmp_path):
    path = _write(tmp_path, SMALL_2D)
    result = run_scenario(path, out_dir=tmp_path / "out")
    assert result.exit_code == 0
    assert result.violations == []
    assert len(result.rows) == 2 * 3  # levels x sweep points
    text = result.csv_path.read_text()
    header = text.splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    for row in result.rows:
        assert row["identity_holds"] is True
        assert row["verdict_counting"] == HOLDS
        # no closed-form bounds in dimension 2
        assert row["bound_thm54"] is None
        assert row["verdict_thm54"] == NOT_APPLICABLE
        assert row["N_full"] == row["N_dir"] + row["N_a2r_nonpos"]
    doc = json.loads(result.json_path.read_text())
    assert doc["schema_version"] == 1
    assert doc["violations"] == []
    names = {rep["name"] for sc in doc["scenarios"] for rep in sc["reports"]}
    assert "operator-reduction" in names
    assert "poisson-kernel-constant" in names


def test_run_scenario_3d_bounds(tmp_path):
    path = _write(tmp_path, SMALL_3D)
    result = run_scenario(path, out_dir=tmp_path / "out")
    assert result.exit_code == 0
    for row in result.rows:
        assert row["verdict_thm54"] == HOLDS
        assert row["verdict_thm59"] == HOLDS
        assert row["verdict_trace"] == HOLDS
        assert row["bound_thm54"] >= row["N_dir"]
        assert row["trace_bound"] >= row["heat_trace_t"]
    doc = json.loads(result.json_path.read_text())
    (sc,) = doc["scenarios"]
    assert sc["constants"]["n"] == 3
    assert "EMPIRICAL" in sc["constants"]["b_provenance"]
    names = [rep["name"] for rep in sc["reports"]]
    assert "semigroup-2inf-bound" in names
    assert "operator-count-bound" in names  # L_n was supplied
    for rep in sc["reports"]:
        assert rep["verdict"] in ("holds", "not-applicable"), rep


def test_run_scenario_empty_level(tmp_path):
    result = run_scenario(CONFIG_DIR / "empty_level_1d.cfg", out_dir=tmp_path / "out")
    assert result.exit_code == 0
    (row,) = result.rows
    assert row["N_full"] == 0 and row["N_dir"] == 0
    assert row["lambda"] is None
    assert row["verdict_counting"] == NOT_APPLICABLE
    doc = json.loads(result.json_path.read_text())
    (sc,) = doc["scenarios"]
    assert sc["empty"] is True
    (rep,) = sc["reports"]
    assert rep["name"] == "operator-reduction"
    assert rep["lhs"] == 0 and rep["verdict"] == "holds"


def test_run_scenario_deterministic_across_workers(tmp_path, monkeypatch):
    path = _write(tmp_path, SMALL_2D)
    outputs = []
    for workers in ("1", "3"):
        monkeypatch.setenv("WELLSPECTRA_WORKERS", workers)
        out = tmp_path / f"out{workers}"
        result = run_scenario(path, out_dir=out)
        outputs.append(
            (result.csv_path.read_bytes(), result.json_path.read_bytes())
        )
    assert outputs[0] == outputs[1]


def test_write_csv_preserves_column_order(tmp_path):
    row = {col: None for col in CSV_COLUMNS}
    row.update(scenario_id="x", e=-1.0, N_full=2, identity_holds=False)
    path = tmp_path / "t.csv"
    write_csv(path, [row])
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    cells = lines[1].split(",")
    assert cells[0] == "x" and cells[1] == "-1.0"
    assert cells[CSV_COLUMNS.index("N_full")] == "2"
    assert cells[CSV_COLUMNS.index("identity_holds")] == "false"
