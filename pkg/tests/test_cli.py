import csv
import json
import math

import pytest

from cli import RunSpec, build_model, eps_b_label, main, parse_args, read_config_file
from core.errors import ConfigError

MODEL = ["--dim", "1", "--F", "1", "--eb", "-1"]


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestParsing:
    def test_defaults(self):
        spec = parse_args(["poles"] + MODEL)
        assert spec.cfg.eps_b == pytest.approx(-1.0)
        assert spec.index_range == (-3, 9)
        assert len(spec.time_grid) == 101 and spec.time_grid[-1] == pytest.approx(5.0)

    def test_index_range_must_contain_zero(self):
        with pytest.raises(ConfigError):
            parse_args(["poles"] + MODEL + ["--n-min", "1"])

    def test_binding_is_exclusive(self):
        with pytest.raises(ConfigError):
            build_model(1, 1.0, 2.0, -1.0, None, None)
        with pytest.raises(ConfigError):
            build_model(3, 1.0, None, None, 10.0, None)
        assert build_model(None, None, None, None, None, None) is None

    def test_model_required(self):
        with pytest.raises(ConfigError):
            RunSpec(command="poles", cfg=None)

    def test_unknown_command_exits(self):
        with pytest.raises(SystemExit):
            main(["resonate"])

    def test_config_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("# weak field\ndim = 1\nF = 1\neb = -10\nn-max = 4\noracle = true\n")
        assert read_config_file(path)["n_max"] == "4"
        spec = parse_args(["poles", "--config", str(path), "--n-max", "2"])
        assert spec.cfg.eps_b == pytest.approx(-10.0)
        assert spec.index_range == (-3, 2)
        assert spec.oracle is True

    def test_config_file_aliases(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("dim = 1\nlambda = 2\nF = 0.5\nformat = json\n")
        spec = parse_args(["poles", "--config", str(path)])
        assert spec.output_format == "json"
        assert spec.cfg.lam == pytest.approx(2.0)

    def test_config_file_unknown_key(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("dim = 1\ncolour = blue\n")
        assert main(["poles", "--config", str(path)]) == 2

    def test_missing_config_file(self, tmp_path):
        assert main(["poles", "--config", str(tmp_path / "absent.conf")]) == 2


class TestCommands:
    def test_missing_model_exit_code(self):
        assert main(["poles"]) == 2

    def test_bound_state(self, tmp_path):
        out = tmp_path / "bs.csv"
        assert main(["bound-state", "--dim", "1", "--F", "8", "--lambda", "2", "--out", str(out)]) == 0
        row = _read_csv(out)[0]
        assert float(row["E_B[a.u.]"]) == pytest.approx(-1.0)
        assert float(row["eps_B[dimensionless]"]) == pytest.approx(-0.25)

    def test_no_bound_state_exit_code(self, tmp_path):
        args = ["bound-state", "--dim", "3", "--F", "1", "--lambda-r", "3.0", "--mu", "1", "--out", str(tmp_path / "x")]
        assert main(args) == 3

    def test_flow(self, tmp_path):
        out = tmp_path / "flow.csv"
        args = ["flow", "--dim", "3", "--F", "1", "--lambda-r", repr(4.0 * math.pi), "--mu", "1",
                "--mu-new", "2", "--out", str(out)]
        assert main(args) == 0
        row = _read_csv(out)[0]
        assert float(row["lambda_r"]) == pytest.approx(2.0 * math.pi, rel=1e-14)
        # lambda_R = 4 pi at mu = 1 sits exactly at the bound-state threshold
        assert row["E_B[a.u.]"] == ""

    def test_flow_needs_target(self, tmp_path):
        args = ["flow", "--dim", "2", "--F", "1", "--lambda-r", "1", "--mu", "1", "--out", str(tmp_path / "f")]
        assert main(args) == 2

    def test_landau_pole_exit_code(self, tmp_path):
        args = ["flow", "--dim", "3", "--F", "1", "--lambda-r", repr(-4.0 * math.pi), "--mu", "1",
                "--mu-new", "2", "--out", str(tmp_path / "f")]
        assert main(args) == 3

    def test_poles_deterministic(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["poles"] + MODEL + ["--n-min", "-1", "--n-max", "2"]
        assert main(args + ["--out", str(first)]) == 0
        assert main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        rows = _read_csv(first)
        assert [int(r["n"]) for r in rows] == [-1, 0, 1, 2]
        assert all(float(r["eps_im[dimensionless]"]) <= 0 for r in rows)

    def test_poles_json(self, tmp_path):
        out = tmp_path / "poles.json"
        args = ["poles"] + MODEL + ["--n-min", "0", "--n-max", "1", "--format", "json", "--out", str(out)]
        assert main(args) == 0
        document = json.loads(out.read_text())
        assert [r["n"] for r in document["rows"]] == [0, 1]
        assert document["meta"]["dimension"] == 1
        assert document["meta"]["contour_count"] == 2

    def test_survival_zero_field(self, tmp_path):
        out = tmp_path / "surv.csv"
        args = ["survival", "--dim", "1", "--F", "0", "--lambda", "2", "--t-max", "1", "--t-steps", "3",
                "--out", str(out)]
        assert main(args) == 0
        rows = _read_csv(out)
        assert len(rows) == 3
        assert all(float(r["A_abs2"]) == pytest.approx(1.0) for r in rows)
        assert rows[0]["nonescape"] == ""

    def test_survival_needs_one_dimension(self, tmp_path):
        args = ["survival", "--dim", "3", "--F", "1", "--eb", "-1", "--out", str(tmp_path / "s")]
        assert main(args) == 2

    def test_gdenom_grid(self, tmp_path):
        out = tmp_path / "g.csv"
        args = ["gdenom"] + MODEL + ["--points", "3", "--re-min", "-2", "--re-max", "2", "--im-min", "-1",
                                     "--im-max", "0.5", "--out", str(out)]
        assert main(args) == 0
        rows = _read_csv(out)
        assert len(rows) == 9
        assert {float(r["eps_re[dimensionless]"]) for r in rows} == {-2.0, 0.0, 2.0}

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        args = ["bound-state", "--dim", "1", "--F", "1", "--lambda", "2", "--out", str(blocker / "bs.csv")]
        assert main(args) == 4

    def test_selftest(self, tmp_path):
        out = tmp_path / "selftest.json"
        assert main(["selftest", "--format", "json", "--out", str(out)]) == 0
        document = json.loads(out.read_text())
        assert document["meta"]["failed"] == []
        assert all(r["passed"] for r in document["rows"])

    @pytest.mark.slow
    def test_fig1(self, tmp_path):
        assert main(["fig1", "--format", "svg", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig1.svg").exists()
        names = sorted(p.name for p in tmp_path.glob("fig1_eb*.csv"))
        assert names == ["fig1_eb-0p01.csv", "fig1_eb-0p1.csv", "fig1_eb-1.csv", "fig1_eb-10.csv"]

    @pytest.mark.slow
    def test_fig1_tables_carry_binding(self, tmp_path):
        assert main(["fig1", "--format", "json", "--out", str(tmp_path)]) == 0
        for eps_b in (-10.0, -1.0, -0.1, -0.01):
            document = json.loads((tmp_path / f"fig1_eb{eps_b_label(eps_b)}.json").read_text())
            assert document["meta"]["eps_b"] == pytest.approx(eps_b)
            assert len(document["rows"]) == 13

    def test_eps_b_label(self):
        assert [eps_b_label(e) for e in (-10, -1, -0.1, -0.01)] == ["-10", "-1", "-0p1", "-0p01"]
