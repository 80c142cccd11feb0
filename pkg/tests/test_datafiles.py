import json

import numpy as np
import pytest

from nqlab import datafiles, dynamics, junctions

from conftest import make_iv_loop


class TestJsonFormatting:
    def test_floats_rounded_to_six_significant_digits(self):
        s = datafiles.dump_json({"a": 1.23456789e-7, "b": 3.0})
        assert json.loads(s) == {"a": 1.23457e-7, "b": 3.0}

    def test_keys_sorted_and_newline_terminated(self):
        s = datafiles.dump_json({"zeta": 1, "alpha": 2})
        assert s.index('"alpha"') < s.index('"zeta"')
        assert s.endswith("\n")

    def test_deterministic_across_calls(self):
        obj = {"nested": {"x": [1.0 / 3.0, 2.0 / 3.0]}, "n": 7}
        assert datafiles.dump_json(obj) == datafiles.dump_json(obj)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            datafiles.dump_json({"x": float("nan")})

    def test_write_and_load_round_trip(self, tmp_path):
        p = tmp_path / "r.json"
        datafiles.write_json(p, {"q_total": 486046.51162790693})
        assert datafiles.load_json(p) == {"q_total": 486047.0}

    def test_invalid_json_reports_path(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{nope")
        with pytest.raises(ValueError, match="broken.json"):
            datafiles.load_json(p)


class TestIvCsv:
    def test_bit_identical_round_trip(self, tmp_path):
        fwd, rev = make_iv_loop()
        p = tmp_path / "iv.csv"
        datafiles.emit_iv_csv(p, fwd, rev)
        first = p.read_bytes()
        f2, r2 = datafiles.ingest_iv_csv(p)
        datafiles.emit_iv_csv(p, f2, r2)
        assert p.read_bytes() == first

    def test_directions_partitioned(self, tmp_path):
        fwd, rev = make_iv_loop()
        p = tmp_path / "iv.csv"
        datafiles.emit_iv_csv(p, fwd, rev)
        f2, r2 = datafiles.ingest_iv_csv(p)
        assert f2.direction == "forward" and r2.direction == "reverse"
        assert f2.bias_a.size == fwd.bias_a.size

    def test_source_voltage_mode_divides_by_series_resistor(self, tmp_path):
        p = tmp_path / "iv.csv"
        rows = ["bias_v,voltage_v,direction"]
        rows += [f"{2.0 * k / 20:.3f},{1e-4 * k:.6g},fwd" for k in range(21)]
        rows += [f"{2.0 * k / 20:.3f},{1e-4 * k:.6g},rev"
                 for k in reversed(range(21))]
        p.write_text("\n".join(rows) + "\n")
        fwd, _ = datafiles.ingest_iv_csv(p, bias_mode="source-voltage")
        # 2 V across the default 2 Mohm series resistor sources 1 uA
        assert fwd.bias_a[-1] == pytest.approx(1e-6, rel=1e-12)

    def test_wrong_header_rejected_with_filename(self, tmp_path):
        p = tmp_path / "iv.csv"
        p.write_text("current,voltage,direction\n1,2,fwd\n")
        with pytest.raises(ValueError, match="header"):
            datafiles.ingest_iv_csv(p)

    def test_bad_number_reports_line(self, tmp_path):
        p = tmp_path / "iv.csv"
        body = "\n".join(f"{k * 1e-8:.3g},0,fwd" for k in range(20))
        p.write_text("bias_a,voltage_v,direction\n" + body
                     + "\noops,0,rev\n")
        with pytest.raises(ValueError, match="line 22"):
            datafiles.ingest_iv_csv(p)

    def test_bad_direction_tag_rejected(self, tmp_path):
        p = tmp_path / "iv.csv"
        p.write_text("bias_a,voltage_v,direction\n1e-8,0,up\n")
        with pytest.raises(ValueError, match="direction"):
            datafiles.ingest_iv_csv(p)

    def test_missing_reverse_rows_rejected(self, tmp_path):
        p = tmp_path / "iv.csv"
        body = "\n".join(f"{k * 1e-8:.3g},0,fwd" for k in range(20))
        p.write_text("bias_a,voltage_v,direction\n" + body + "\n")
        with pytest.raises(ValueError, match="rev"):
            datafiles.ingest_iv_csv(p)

    def test_unknown_bias_mode_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            datafiles.ingest_iv_csv(tmp_path / "x.csv", bias_mode="power")


class TestTraceCsv:
    def test_bit_identical_round_trip(self, tmp_path):
        tr = dynamics.t1_trace()
        p = tmp_path / "trace.csv"
        datafiles.emit_trace_csv(p, tr)
        first = p.read_bytes()
        datafiles.emit_trace_csv(p, datafiles.ingest_trace_csv(p))
        assert p.read_bytes() == first

    def test_values_within_rounding(self, tmp_path):
        tr = dynamics.ramsey_trace()
        p = tmp_path / "trace.csv"
        datafiles.emit_trace_csv(p, tr)
        back = datafiles.ingest_trace_csv(p)
        assert np.allclose(back.y, tr.y, rtol=1e-5, atol=1e-7)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "trace.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="empty"):
            datafiles.ingest_trace_csv(p)

    def test_header_only_rejected(self, tmp_path):
        p = tmp_path / "trace.csv"
        p.write_text("t_s,y\n")
        with pytest.raises(ValueError, match="no data"):
            datafiles.ingest_trace_csv(p)


class TestChevronCsv:
    def test_bit_identical_round_trip(self, tmp_path):
        grid = dynamics.rabi_chevron(18.0, np.arange(-5.0, 6.0, 1.0),
                                     np.arange(0.0, 50.1, 2.0))
        p = tmp_path / "chevron.csv"
        datafiles.emit_chevron_csv(p, grid)
        first = p.read_bytes()
        datafiles.emit_chevron_csv(p, datafiles.ingest_chevron_csv(p))
        assert p.read_bytes() == first

    def test_long_format_reshaped(self, tmp_path):
        grid = dynamics.rabi_chevron(18.0, [-4.0, 0.0, 4.0],
                                     [0.0, 10.0, 20.0, 30.0])
        p = tmp_path / "chevron.csv"
        datafiles.emit_chevron_csv(p, grid)
        back = datafiles.ingest_chevron_csv(p)
        assert back.pe.shape == (3, 4)
        assert np.allclose(back.pe, grid.pe, atol=1e-6)

    def test_incomplete_grid_rejected(self, tmp_path):
        p = tmp_path / "chevron.csv"
        p.write_text("detuning_mhz,duration_ns,pe\n"
                     "0,0,0\n0,10,0.5\n4,0,0\n")
        with pytest.raises(ValueError, match="incomplete"):
            datafiles.ingest_chevron_csv(p)


class TestT1TempCsv:
    def test_round_trip_with_model_tag(self, tmp_path):
        t = np.array([0.026, 0.100, 0.300])
        t1 = np.array([3e-6, 2.9e-6, 1.4e-6])
        p = tmp_path / "sweep.csv"
        datafiles.emit_t1_temp_csv(p, t, t1, "spin-boson")
        bt, bt1, model = datafiles.ingest_t1_temp_csv(p)
        assert model == "spin-boson"
        assert np.allclose(bt, t) and np.allclose(bt1, t1)

    def test_mixed_models_rejected(self, tmp_path):
        p = tmp_path / "sweep.csv"
        p.write_text("temperature_k,t1_s,model\n"
                     "0.026,3e-6,spin-boson\n0.1,2e-6,quasiparticle\n")
        with pytest.raises(ValueError, match="mixed"):
            datafiles.ingest_t1_temp_csv(p)


class TestDeviceJson:
    def test_loads_known_keys(self, tmp_path):
        p = tmp_path / "device.json"
        p.write_text(json.dumps({"fq_ghz": 4.057, "ej_ghz": 11.545,
                                 "ec_ghz": 0.197, "d_j_um": 0.8}))
        dev = datafiles.load_device_json(p)
        assert dev["fq_ghz"] == 4.057
        assert set(dev) == {"fq_ghz", "ej_ghz", "ec_ghz", "d_j_um"}

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "device.json"
        p.write_text(json.dumps({"fq_ghz": 4.0, "color": "blue"}))
        with pytest.raises(ValueError, match="unknown device keys"):
            datafiles.load_device_json(p)

    def test_non_numeric_value_rejected(self, tmp_path):
        p = tmp_path / "device.json"
        p.write_text(json.dumps({"fq_ghz": True}))
        with pytest.raises(ValueError, match="number"):
            datafiles.load_device_json(p)


class TestWaferBatch:
    def test_loads_records(self, tmp_path):
        p = tmp_path / "batch.json"
        p.write_text(json.dumps([
            {"junction_id": "w1-a", "diameter_um": 0.8,
             "csv_path": "w1a.csv", "cycles": 21},
            {"junction_id": "w1-b", "diameter_um": 2.0,
             "csv_path": "w1b.csv"},
        ]))
        recs = datafiles.load_wafer_batch(p)
        assert recs[0]["cycles"] == 21 and recs[1]["cycles"] is None
        assert recs[1]["diameter_um"] == 2.0

    @pytest.mark.parametrize("payload", [
        [],
        [{"junction_id": "a"}],
        [{"junction_id": "a", "diameter_um": -1.0, "csv_path": "x.csv"}],
        [{"junction_id": "a", "diameter_um": 1.0, "csv_path": "x.csv",
          "extra": 1}],
        {"junction_id": "a"},
    ])
    def test_rejects_malformed_batches(self, tmp_path, payload):
        p = tmp_path / "batch.json"
        p.write_text(json.dumps(payload))
        with pytest.raises(ValueError):
            datafiles.load_wafer_batch(p)


class TestChannelsJson:
    def test_mixed_numbers_and_objects(self, tmp_path):
        p = tmp_path / "channels.json"
        p.write_text(json.dumps({
            "tls": 2.5e5,
            "subgap": {"kind": "subgap", "rsg_ohm": 2.6e8},
        }))
        ch = datafiles.load_channels_json(p)
        assert ch["tls"] == 2.5e5
        assert ch["subgap"]["kind"] == "subgap"

    def test_bool_channel_rejected(self, tmp_path):
        p = tmp_path / "channels.json"
        p.write_text(json.dumps({"tls": True}))
        with pytest.raises(ValueError):
            datafiles.load_channels_json(p)

    def test_empty_rejected(self, tmp_path):
        p = tmp_path / "channels.json"
        p.write_text("{}")
        with pytest.raises(ValueError):
            datafiles.load_channels_json(p)
