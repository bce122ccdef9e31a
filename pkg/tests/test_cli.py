import csv
import json
import math

import pytest

from uavbc.cli import (
    ConfigError,
    apply_overrides,
    build_scenario,
    main,
    parse_scenario_file,
)

BASE_SCENARIO = """
# reference scenario
gamma0_db = -50
sigma2_dbm = -100
h = 100
d = 1000
p_dbm = 10
v = 30
t = 60
"""


@pytest.fixture()
def scenario(tmp_path):
    path = tmp_path / "base.cfg"
    path.write_text(BASE_SCENARIO)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestScenarioParsing:
    def test_db_conversions(self, scenario):
        params, settings = build_scenario(parse_scenario_file(scenario))
        assert params.gamma0 == pytest.approx(1e-5)
        assert params.sigma2 == pytest.approx(1e-13)
        assert params.Pbar == pytest.approx(1e-2)
        assert params.beta0 == pytest.approx(1e8)
        assert settings == {}

    def test_defaults_when_empty(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing here\n")
        params, _ = build_scenario(parse_scenario_file(str(path)))
        assert params.H == 100.0 and params.V == 30.0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("altitude = 5\n")
        with pytest.raises(ConfigError):
            build_scenario(parse_scenario_file(str(path)))

    def test_overrides(self, scenario):
        params, _ = build_scenario(parse_scenario_file(scenario))
        out = apply_overrides(params, "V=0,T=20,P=30dBm")
        assert out.V == 0.0 and out.T == 20.0
        assert out.Pbar == pytest.approx(1.0)
        with pytest.raises(ConfigError):
            apply_overrides(params, "Q=1")


class TestRegionCommand:
    def test_tinf_region(self, scenario, tmp_path):
        out = tmp_path / "tinf.csv"
        code = main(
            ["region", "--scenario", scenario, "--mode", "tinf", "--out", str(out)]
        )
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 33
        peak = math.log2(101.0)
        for row in rows:
            assert float(row["r1"]) + float(row["r2"]) == pytest.approx(peak, abs=1e-9)
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert sidecar["regions"][0]["mode"] == "tinf"
        assert len(sidecar["regions"][0]["points"]) == 33

    def test_two_profiles_are_corners(self, scenario, tmp_path):
        out = tmp_path / "two.csv"
        assert (
            main(
                ["region", "--scenario", scenario, "--mode", "tinf",
                 "--profiles", "2", "--out", str(out)]
            )
            == 0
        )
        rows = read_csv(out)
        assert [float(r["r1"]) for r in rows][0] == 0.0
        assert [float(r["r2"]) for r in rows][1] == 0.0

    def test_v0_mode_deterministic(self, scenario, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            code = main(
                ["region", "--scenario", scenario, "--mode", "v0",
                 "--profiles", "5", "--out", str(out)]
            )
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        rows = read_csv(out1)
        assert rows[0]["x_I"] == rows[0]["x_F"]  # hover solutions

    def test_high_snr_needs_power(self, scenario, tmp_path):
        out = tmp_path / "hs.csv"
        code = main(
            ["region", "--scenario", scenario, "--mode", "high-snr", "--out", str(out)]
        )
        assert code == 2  # 10 dBm is far below the validity floor
        code = main(
            ["region", "--scenario", scenario, "--mode", "high-snr",
             "--override", "P=30dBm", "--out", str(out)]
        )
        assert code == 0

    def test_missing_scenario_file(self, tmp_path):
        out = tmp_path / "x.csv"
        code = main(
            ["region", "--scenario", str(tmp_path / "nope.cfg"), "--mode", "tinf",
             "--out", str(out)]
        )
        assert code == 2


class TestFixedCommand:
    def test_fixed_at_center_is_line(self, scenario, tmp_path):
        out = tmp_path / "fixed.csv"
        code = main(
            ["fixed", "--scenario", scenario, "--x", "0", "--profiles", "9",
             "--out", str(out)]
        )
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 9
        for row in rows:
            total = float(row["r1"]) + float(row["r2"])
            assert total == pytest.approx(2.2768402053588246, abs=1e-7)

    def test_out_of_segment_rejected(self, scenario, tmp_path):
        out = tmp_path / "fixed.csv"
        code = main(
            ["fixed", "--scenario", scenario, "--x", "900", "--out", str(out)]
        )
        assert code == 2


class TestOracleCheckCommand:
    def test_coarse_grid_is_config_error(self, scenario, tmp_path):
        out = tmp_path / "oracle.csv"
        code = main(
            ["oracle-check", "--scenario", scenario, "--dp-positions", "8",
             "--out", str(out)]
        )
        assert code == 2

    def test_corner_profiles_agree(self, scenario, tmp_path):
        out = tmp_path / "oracle.csv"
        code = main(
            ["oracle-check", "--scenario", scenario, "--profiles", "2",
             "--dp-slots", "32", "--dp-positions", "26", "--out", str(out)]
        )
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 2
        for row in rows:
            assert float(row["rel_gap"]) <= 0.03


def test_compare_command(scenario, tmp_path):
    out = tmp_path / "cmp.csv"
    code = main(
        ["compare", "--scenario", scenario, "--mode", "tinf", "--profiles", "3",
         "--override", "V=0", "--override", "V=30,T=20", "--out", str(out)]
    )
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["V", "T"]
    assert len(rows) == 1 + 3 * 3  # header + three variants of three points
