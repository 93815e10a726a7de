import json

import pytest
from click.testing import CliRunner

from freqhom.cli import main, parse_powers
from freqhom.forward import rate_curve
from freqhom.io import paper_config, parse_curve_csv


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


@pytest.fixture
def measurements(tmp_path):
    cfg = paper_config()
    path = tmp_path / "m.csv"
    lines = ["power_mW,p_ut,p_us,p_lt,p_ls,d_u,d_l"]
    for r in rate_curve(cfg, [0, 50, 100, 150, 200, 250, 300]):
        vals = (r.power, *r.as_tuple(), cfg.noise.d_u(r.power), cfg.noise.d_l(r.power))
        lines.append(",".join(repr(float(v)) for v in vals))
    path.write_text("\n".join(lines) + "\n")
    return path


class TestCalibrate:
    def test_reproduces_generating_parameters(self, runner, measurements, tmp_path):
        out = tmp_path / "report.json"
        res = _run(runner, "calibrate", "paper", measurements, "--out", out)
        assert res.exit_code == 0, res.output
        report = json.loads(out.read_text())
        for key, want in {"tu": 0.078, "tl": 0.081, "mu": 0.047}.items():
            assert report["budget"][key] == pytest.approx(want, rel=1e-6)
        assert report["pump_curve"]["amplitude"] == pytest.approx(0.99, abs=1e-6)
        assert report["pump_curve"]["rate_per_mw"] == pytest.approx(0.0036, abs=1e-6)
        assert report["noise"]["dl"] == pytest.approx([2.5e-7, 6.1e-6], abs=1e-12)
        assert report["skipped_powers_mW"] == [0.0]
        assert len(report["estimates"]) == 6

    def test_empty_file(self, runner, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("")
        res = _run(runner, "calibrate", "paper", path)
        assert res.exit_code == 2 and "empty" in res.output

    def test_unphysical_row(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("power_mW,p_ut,p_us,p_lt,p_ls\n10,0.001,0.006,0.0003,0.002\n120,0.5,1e-6,0.5,1e-6\n")
        res = _run(runner, "calibrate", "paper", path)
        assert res.exit_code == 3 and "120 mW" in res.output

    def test_validation_location(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("power_mW,p_ut,p_us,p_lt,p_ls\n10,0.1,x,0.1,0.1\n")
        res = _run(runner, "calibrate", "paper", path)
        assert res.exit_code == 2 and "bad.csv:2:3" in res.output

    def test_bad_config(self, runner, tmp_path, measurements):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"bandwidths_ghz": {}, "extra": 1}')
        res = _run(runner, "calibrate", cfg, measurements)
        assert res.exit_code == 2


class TestDip:
    def test_bundled_140(self, runner, tmp_path):
        out = tmp_path / "dip.csv"
        res = _run(runner, "dip", "paper", "--power", 140, "--out", out)
        assert res.exit_code == 0
        text = out.read_bytes()
        assert b"\r" not in text
        header, rows, footer = parse_curve_csv(text.decode())
        assert header == ["tau_ps", "p_c"] and len(rows) == 401
        assert footer["visibility"] == pytest.approx(0.71, abs=0.05)
        assert footer["fwhm_ps"] == pytest.approx(6.0, abs=2.0)

    def test_zero_power_flat(self, runner):
        res = _run(runner, "dip", "paper", "--power", 0, "--points", 11)
        _, rows, footer = parse_curve_csv(res.output)
        assert len({p for _, p in rows}) == 1 and footer["visibility"] == 0.0

    def test_points_share_values(self, runner):
        a = parse_curve_csv(_run(runner, "dip", "paper", "--power", 140, "--points", 3).output)[1]
        b = parse_curve_csv(_run(runner, "dip", "paper", "--power", 140, "--points", 3001).output)[1]
        assert a == [b[0], b[1500], b[3000]]

    def test_explicit_range(self, runner):
        res = _run(runner, "dip", "paper", "--power", 140, "--tau-range=-5,5", "--points", 5)
        assert [r[0] for r in parse_curve_csv(res.output)[1]] == [-5, -2.5, 0, 2.5, 5]

    @pytest.mark.parametrize("flags", [["--power", "-1"], ["--power", "10", "--points", "2"],
                                       ["--power", "10", "--tau-range", "a"], ["--power", "10", "--tau-range=-5,8"],
                                       []])
    def test_invalid_flags(self, runner, flags):
        assert runner.invoke(main, ["dip", "paper", *flags]).exit_code == 2

    def test_deterministic(self, runner):
        a = _run(runner, "dip", "paper", "--power", 190, "--points", 21).output
        assert _run(runner, "dip", "paper", "--power", 190, "--points", 21).output == a


class TestSweep:
    @pytest.mark.parametrize("whatif,want", [("single-photon", 0.95), ("both", 0.98), ("bandwidth", 0.93)])
    def test_whatifs(self, runner, whatif, want):
        res = _run(runner, "sweep", "paper", "--powers", 190, "--whatif", whatif)
        _, rows, footer = parse_curve_csv(res.output)
        assert rows[0][1] == pytest.approx(want, abs=0.01) and footer["whatif"] == whatif

    def test_range(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        _run(runner, "sweep", "paper", "--powers", "0:300:50", "--out", out)
        header, rows, _ = parse_curve_csv(out.read_text())
        assert header == ["power_mW", "visibility"]
        assert [r[0] for r in rows] == [0, 50, 100, 150, 200, 250, 300]
        assert rows[0][1] == 0.0

    def test_unknown_whatif(self, runner):
        assert runner.invoke(main, ["sweep", "paper", "--whatif", "squeezed"]).exit_code == 2

    @pytest.mark.parametrize("text", ["", "1:0:1", "0:10:0", "a,b", "-5"])
    def test_bad_powers(self, runner, text):
        assert runner.invoke(main, ["sweep", "paper", "--powers", text]).exit_code == 2

    def test_parse_powers(self):
        assert parse_powers("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1.0]
        assert parse_powers("50, 140") == [50.0, 140.0]


class TestOther:
    def test_rates_hz(self, runner):
        per_pulse = parse_curve_csv(_run(runner, "rates", "paper", "--powers", 140).output)[1][0]
        hz = parse_curve_csv(_run(runner, "rates", "paper", "--powers", 140, "--hz").output)[1][0]
        assert hz[2] == pytest.approx(per_pulse[2] * 82e6, rel=1e-11)

    def test_conventions(self, runner):
        res = _run(runner, "conventions", "paper", "--power", 140)
        assert res.exit_code == 0 and "1/e" in res.output and "configured" in res.output

    def test_missing_config(self, runner, tmp_path):
        assert runner.invoke(main, ["sweep", str(tmp_path / "no.json")]).exit_code == 2


class TestCheck:
    def test_default_seed_passes(self, runner):
        res = _run(runner, "check", "--spectral-cases", 50, "--fock-cases", 10)
        assert res.exit_code == 0 and res.output.count(" ok") == 2

    def test_tolerance_breach(self, runner):
        res = _run(runner, "check", "--spectral-cases", 5, "--fock-cases", 2, "--tolerance-scale", 1e-30)
        assert res.exit_code == 4 and "worst case" in res.output

    def test_same_seed_same_report(self, runner):
        args = ("check", "--seed", 3, "--spectral-cases", 20, "--fock-cases", 5)
        assert _run(runner, *args).output == _run(runner, *args).output
