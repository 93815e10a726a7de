import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freqhom.errors import ConfigError
from freqhom.io import (
    format_csv,
    load_config,
    load_measurements,
    paper_config_text,
    parse_config,
    parse_curve_csv,
    parse_measurements,
)


def _doc(**changes):
    doc = json.loads(paper_config_text())
    doc.update(changes)
    return doc


class TestConfig:
    def test_bundled_values(self):
        cf = load_config("paper")
        cfg = cf.config
        bw = cfg.bandwidths
        assert (bw.in_u, bw.in_l, bw.wg, bw.out_u, bw.out_l) == (740, 93, 140, 70, 92)
        assert (cfg.budget.tu, cfg.budget.tl, cfg.budget.mu) == (0.078, 0.081, 0.047)
        assert (cfg.pump.amplitude, cfg.pump.rate) == (0.99, 0.0036)
        assert cfg.noise.du_coeffs == pytest.approx((9.5e-10, 0, 0))
        assert cfg.noise.dl_coeffs == pytest.approx((2.5e-7, 6.1e-6))
        assert cfg.convention == "1/e" and cfg.input_kind == "coherent"
        assert cf.repetition_rate_mhz == 82.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="colour"):
            parse_config(json.dumps(_doc(colour="blue")))

    def test_nested_unknown_key(self):
        doc = _doc()
        doc["loss_budget"]["eta"] = 1
        with pytest.raises(ConfigError, match="loss_budget"):
            parse_config(json.dumps(doc))

    def test_missing_section(self):
        doc = _doc()
        del doc["pump_curve"]
        with pytest.raises(ConfigError, match="pump_curve"):
            parse_config(json.dumps(doc))

    def test_bad_json_position(self):
        with pytest.raises(ConfigError, match=r"cfg.json:3:\d+"):
            parse_config('{\n  "label": "x",\n  oops\n}', "cfg.json")

    def test_flat_widths_and_probability_noise(self):
        doc = _doc(noise={"du": [0, 0, 0.001], "dl": [0, 0.002]})
        doc["bandwidths_ghz"].update(wg="inf", out_u="inf", out_l="inf")
        cfg = parse_config(json.dumps(doc)).config
        assert math.isinf(cfg.bandwidths.wg) and cfg.noise.d_l(100) == 0.002

    def test_range_checked_by_model(self):
        doc = _doc()
        doc["bandwidths_ghz"]["in_u"] = "inf"
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")


class TestMeasurements:
    header = "power_mW,p_ut,p_us,p_lt,p_ls\n"

    def test_parse(self):
        t = parse_measurements(self.header + "0,0,0.007,0,0.002\n50,0.001,0.006,0.0003,0.002\n")
        assert t.powers == (0.0, 50.0) and t.d_u is None
        assert t.rates[1].p_us == 0.006

    def test_noise_columns_and_comments(self):
        t = parse_measurements("# run 3\npower_mW,p_ut,p_us,p_lt,p_ls,d_u,d_l\n\n10,0.1,0.1,0.1,0.1,1e-6,2e-6\n")
        assert t.d_u == (1e-6,) and t.d_l == (2e-6,)

    @pytest.mark.parametrize("body,where", [
        ("", "empty"),
        ("power_mW,p_ut,p_us,p_lt\n1,0,0,0\n", "p_ls"),
        ("power_mW,p_ut,p_us,p_lt,p_ls,x\n1,0,0,0,0,0\n", "unknown"),
        ("power_mW,p_ut,p_us,p_lt,p_ls\n", "no data"),
        ("power_mW,p_ut,p_us,p_lt,p_ls\n1,0,0,0\n", ":2:"),
        ("power_mW,p_ut,p_us,p_lt,p_ls\n1,0,1.5,0,0\n", ":2:3:"),
        ("power_mW,p_ut,p_us,p_lt,p_ls\n1,0,0,0,0\n1,0,0,0,0\n", ":3:1:"),
        ("power_mW,p_ut,p_us,p_lt,p_ls\n1,0,0,nan,0\n", ":2:4:"),
        ("power_mW,p_ut,p_us,p_lt,p_ls\n-1,0,0,0,0\n", "negative"),
    ])
    def test_errors(self, body, where):
        with pytest.raises(ConfigError, match=where):
            parse_measurements(body, "m.csv")

    def test_load(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(self.header + "1,0.1,0.1,0.1,0.1\n")
        assert load_measurements(path).powers == (1.0,)


class TestCurveCsv:
    def test_format(self):
        text = format_csv(("a", "b"), [(1.0, 1 / 3)], {"visibility": 0.5, "whatif": "none"})
        assert text == "a,b\n1,0.333333333333\n# visibility=0.5\n# whatif=none\n"

    @given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(0, 1)), max_size=20))
    def test_round_trip(self, rows):
        text = format_csv(("x", "y"), rows, {"k": 1.25})
        header, parsed, footer = parse_curve_csv(text)
        assert header == ["x", "y"] and footer == {"k": 1.25}
        assert format_csv(header, parsed, footer) == text
        for a, b in zip(parsed, rows):
            assert a == pytest.approx(b, rel=1e-11, abs=1e-300)
