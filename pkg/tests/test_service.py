import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from nqlab.client import ServiceClient, ServiceError
from nqlab.service import ROUTES, create_app

A3_DEVICE = {"fq_ghz": 4.057, "ej_ghz": 11.545, "ec_ghz": 0.197,
             "g_mhz": 68.5, "fc_ghz": 7.0874, "t1_us": 3.0,
             "d_j_um": 0.8, "p_j": 0.20}


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


class TestSurface:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json() == {"status": "ok"}

    def test_every_route_is_mounted(self, client):
        mounted = {route.path for route in client.app.routes}
        assert set(ROUTES) <= mounted

    def test_unknown_path_is_404(self, client):
        assert client.post("/transmon/unknown", json={}).status_code == 404


class TestTransmonRoutes:
    def test_spectrum_reference_device(self, client):
        r = client.post("/transmon/spectrum",
                        json={"ej_ghz": 11.545, "ec_ghz": 0.197})
        assert r.status_code == 200
        body = r.json()
        assert body["fq_ghz"] == pytest.approx(4.058116754521897, rel=1e-12)
        assert body["alpha_ghz"] == pytest.approx(-0.2233622943556277,
                                                  rel=1e-12)
        assert len(body["levels_ghz"]) == 4
        assert not body["outside_transmon_regime"]

    def test_low_ratio_flagged(self, client):
        r = client.post("/transmon/spectrum",
                        json={"ej_ghz": 2.0, "ec_ghz": 0.2})
        assert r.json()["outside_transmon_regime"]

    def test_fit_ej_ec_inverts_spectrum(self, client):
        r = client.post("/transmon/fit-ej-ec",
                        json={"fq_ghz": 4.057, "alpha_ghz": -0.223})
        body = r.json()
        assert body["ej_ghz"] == pytest.approx(11.55, rel=0.01)
        assert body["ec_ghz"] == pytest.approx(0.197, rel=0.01)
        assert abs(body["fq_check_ghz"] - 4.057) < 1e-4

    def test_dispersive_shift(self, client):
        r = client.post("/transmon/dispersive",
                        json={"ej_ghz": 11.545, "ec_ghz": 0.197,
                              "g_mhz": 68.5, "fc_bare_ghz": 7.0874})
        body = r.json()
        assert body["delta_fc_mhz"] == pytest.approx(1.5470049813668396,
                                                     rel=1e-9)
        assert body["chi_linear_mhz"] == pytest.approx(1.5489637712168831,
                                                       rel=1e-9)
        assert body["fc_dressed_ghz"] > 7.0874

    def test_dispersive_refused_near_degeneracy(self, client):
        r = client.post("/transmon/dispersive",
                        json={"ej_ghz": 11.545, "ec_ghz": 0.197,
                              "g_mhz": 68.5, "fc_bare_ghz": 4.10})
        assert r.status_code == 400
        assert r.json()["kind"] == "input"

    def test_mode_splitting_at_given_cavity(self, client):
        r = client.post("/transmon/mode-splitting",
                        json={"ej_ghz": 11.545, "ec_ghz": 0.197,
                              "g_mhz": 68.5, "fc_bare_ghz": 4.058116754521897})
        assert r.json()["splitting_mhz"] == pytest.approx(137.0, abs=0.01)

    def test_mode_splitting_scan_finds_degeneracy(self, client):
        r = client.post("/transmon/mode-splitting",
                        json={"ej_ghz": 11.545, "ec_ghz": 0.197,
                              "g_mhz": 68.5})
        body = r.json()
        assert body["splitting_mhz"] == pytest.approx(137.0, abs=0.1)
        assert body["fc_bare_ghz"] == pytest.approx(4.0581, abs=1e-3)


class TestDeviceRoutes:
    def test_params_derived_block(self, client):
        r = client.post("/device/params", json={"device": A3_DEVICE})
        derived = r.json()["derived"]
        assert derived["fq_model_ghz"] == pytest.approx(4.0581, abs=1e-3)
        assert derived["ic_a"] == pytest.approx(2.3244178132563363e-08,
                                                rel=1e-9)
        assert derived["c_sigma_f"] == pytest.approx(9.832603718101077e-14,
                                                     rel=1e-9)
        assert derived["q_q"] == pytest.approx(76472.64837368275, rel=1e-9)
        assert derived["chi_linear_mhz"] == pytest.approx(1.549, abs=1e-3)

    def test_params_partial_device(self, client):
        r = client.post("/device/params",
                        json={"device": {"ej_ghz": 11.545, "ec_ghz": 0.197}})
        derived = r.json()["derived"]
        assert "fq_model_ghz" in derived
        assert "q_q" not in derived

    def test_spectrum_route(self, client):
        r = client.post("/device/spectrum", json={"device": A3_DEVICE})
        assert r.json()["fq_ghz"] == pytest.approx(4.0581, abs=1e-3)

    def test_dispersive_route(self, client):
        r = client.post("/device/dispersive", json={"device": A3_DEVICE})
        assert r.json()["delta_fc_mhz"] == pytest.approx(1.547, abs=1e-3)


class TestIvRoutes:
    def test_synthesize_then_analyze(self, client):
        r = client.post("/iv/synthesize",
                        json={"ic_a": 1.885e-7, "rn_ohm": 14.6e3,
                              "rsg_ohm": 0.8e6, "vg_v": 4.3e-3})
        pair = r.json()
        assert len(pair["forward"]["bias_a"]) == 2001
        r2 = client.post("/iv/analyze",
                         json={"forward": pair["forward"],
                               "reverse": pair["reverse"],
                               "diameter_um": 2.0})
        body = r2.json()
        assert body["vg_v"] == pytest.approx(4.3e-3, rel=1e-6)
        assert body["rn_ohm"] == pytest.approx(14.6e3, rel=1e-9)
        assert body["rsg_ohm"] == pytest.approx(0.8e6, rel=1e-9)
        assert body["ic_a"] == pytest.approx(1.885e-7, rel=0.01)
        assert body["jc_a_cm2"] == pytest.approx(6.0, rel=0.01)
        assert body["quality_ratio"] == pytest.approx(54.79, abs=0.05)

    def test_analyze_without_geometry(self, client):
        r = client.post("/iv/synthesize",
                        json={"ic_a": 1.885e-7, "rn_ohm": 14.6e3,
                              "rsg_ohm": 0.8e6, "vg_v": 4.3e-3})
        pair = r.json()
        r2 = client.post("/iv/analyze", json=pair)
        assert r2.status_code == 200
        assert r2.json()["jc_a_cm2"] is None

    def test_flat_trace_is_input_error(self, client):
        n = 64
        bias = list(np.linspace(0.0, 1e-6, n))
        r = client.post("/iv/analyze", json={
            "forward": {"bias_a": bias, "voltage_v": [0.0] * n},
            "reverse": {"bias_a": bias[::-1], "voltage_v": [0.0] * n}})
        assert r.status_code == 400
        assert r.json()["kind"] == "input"


class TestFitRoutes:
    def test_ra_exact(self, client):
        payload = {"junctions": [
            {"diameter_um": d,
             "resistance_ohm": 20.8e3 / (math.pi * (d / 2) ** 2)}
            for d in (0.8, 1.0, 1.4, 2.0)]}
        body = client.post("/fit/ra", json=payload).json()
        assert body["ra_kohm_um2"] == pytest.approx(20.8, rel=1e-9)
        assert body["n_junctions"] == 4

    def test_jc_cycles_exact(self, client):
        payload = {"points": [
            {"cycles": c, "jc_a_cm2": 10 ** (7.76 - 0.34 * c)}
            for c in (16, 21, 27, 33)]}
        body = client.post("/fit/jc-cycles", json=payload).json()
        assert body["slope_per_cycle"] == pytest.approx(-0.34, rel=1e-9)
        assert body["log10_prefactor"] == pytest.approx(7.76, rel=1e-9)

    def test_simulated_t1_fits_round_trip(self, client):
        trace = client.post("/simulate/t1", json={"seed": 12}).json()
        rep = client.post("/fit/t1", json={"t_s": trace["t_s"],
                                           "y": trace["y"]}).json()
        assert rep["model"] == "exponential_decay"
        assert rep["converged"]
        assert rep["params"]["t1_s"]["value"] == pytest.approx(3e-6, rel=0.1)

    def test_simulated_ramsey_fits_round_trip(self, client):
        trace = client.post("/simulate/ramsey", json={"seed": 12}).json()
        rep = client.post("/fit/ramsey", json={"t_s": trace["t_s"],
                                               "y": trace["y"]}).json()
        assert rep["converged"]
        assert rep["params"]["delta_d_hz"]["value"] == pytest.approx(
            5.2e6, rel=0.02)

    def test_simulated_rabi_fits_round_trip(self, client):
        trace = client.post("/simulate/rabi", json={"seed": 12}).json()
        rep = client.post("/fit/rabi", json={"t_s": trace["t_s"],
                                             "y": trace["y"]}).json()
        assert rep["converged"]
        assert rep["params"]["omega_r_hz"]["value"] == pytest.approx(
            18e6, rel=0.02)


class TestSimulationRoutes:
    def test_chevron_shape_and_pi_pulse(self, client):
        body = client.post("/simulate/chevron",
                           json={"omega_r_mhz": 18.0}).json()
        assert len(body["detunings_mhz"]) == 81
        assert len(body["durations_ns"]) == 501
        assert len(body["pe"]) == 81 and len(body["pe"][0]) == 501
        assert body["pi_pulse_ns"] == pytest.approx(1e3 / 36.0, rel=1e-12)

    def test_trace_seeds_are_deterministic(self, client):
        a = client.post("/simulate/ramsey", json={"seed": 3}).json()
        b = client.post("/simulate/ramsey", json={"seed": 3}).json()
        c = client.post("/simulate/ramsey", json={"seed": 4}).json()
        assert a == b
        assert a != c


class TestThermalRoutes:
    def test_occupancy_frozen(self, client):
        body = client.post("/thermal/occupancy",
                           json={"f_ghz": 7.0, "t_k": 0.310}).json()
        assert body["n_bar"] == pytest.approx(0.5113532722113852, rel=1e-12)

    def test_sweep_anchored(self, client):
        body = client.post("/thermal/t1-vs-temperature",
                           json={"kind": "spin-boson", "fq_ghz": 4.057,
                                 "temperatures_k": [0.010, 0.310]}).json()
        assert body["kind"] == "spin-boson"
        assert body["t1_s"][0] == pytest.approx(3e-6, rel=1e-9)
        assert body["t1_s"][1] / body["t1_s"][0] == pytest.approx(
            0.4663854880802771, rel=1e-9)

    def test_bad_kind_is_input_error(self, client):
        r = client.post("/thermal/t1-vs-temperature",
                        json={"kind": "phonon", "fq_ghz": 4.057,
                              "temperatures_k": [0.1]})
        assert r.status_code == 400
        assert r.json()["kind"] == "input"


class TestLossRoute:
    def test_fixed_channels_with_measured_q(self, client):
        body = client.post("/loss/budget", json={
            "channels": {"subgap": 5.7e5, "gold": 3.3e6},
            "device": {"fq_ghz": 4.057, "t1_us": 3.0}}).json()
        assert body["q_total"] == pytest.approx(486046.51162790693, rel=1e-9)
        assert body["q_other"] == pytest.approx(90751.06424431414, rel=1e-9)
        assert body["consistent"] is True
        assert body["channels"][0][0] == "subgap"

    def test_formula_channels_resolved_from_device(self, client):
        body = client.post("/loss/budget", json={
            "channels": {"subgap": {"kind": "subgap", "rsg_ohm": 260e6}},
            "device": {"fq_ghz": 4.057, "ec_ghz": 0.197}}).json()
        # c_sigma comes from ec, slightly above the rounded 98.3 fF
        q = dict((name, val) for name, val in body["channels"])["subgap"]
        assert q == pytest.approx(651668.5471678282, rel=1e-6)


class TestErrorTaxonomy:
    def test_domain_violation_maps_to_input(self, client):
        r = client.post("/transmon/spectrum",
                        json={"ej_ghz": -1.0, "ec_ghz": 0.2})
        assert r.status_code == 400
        assert r.json() == {"detail": "ej_ghz and ec_ghz must be positive",
                            "kind": "input"}

    def test_truncation_failure_maps_to_nonconvergence(self, client):
        r = client.post("/transmon/spectrum",
                        json={"ej_ghz": 50.0, "ec_ghz": 0.2, "ncut": 5})
        assert r.status_code == 400
        assert r.json()["kind"] == "nonconvergence"

    def test_extra_field_rejected(self, client):
        r = client.post("/transmon/spectrum",
                        json={"ej_ghz": 11.5, "ec_ghz": 0.2, "bogus": 1})
        assert r.status_code == 422

    def test_missing_field_rejected(self, client):
        r = client.post("/transmon/spectrum", json={"ej_ghz": 11.5})
        assert r.status_code == 422


class TestLocalClient:
    def test_dispatches_without_server(self):
        with ServiceClient() as sc:
            out = sc.call("/transmon/spectrum",
                          {"ej_ghz": 11.545, "ec_ghz": 0.197})
        assert out["fq_ghz"] == pytest.approx(4.058116754521897, rel=1e-12)

    def test_input_errors_carry_kind(self):
        with ServiceClient() as sc:
            with pytest.raises(ServiceError) as err:
                sc.call("/transmon/spectrum", {"ej_ghz": -1.0, "ec_ghz": 0.2})
        assert err.value.kind == "input"

    def test_nonconvergence_errors_carry_kind(self):
        with ServiceClient() as sc:
            with pytest.raises(ServiceError) as err:
                sc.call("/transmon/spectrum",
                        {"ej_ghz": 50.0, "ec_ghz": 0.2, "ncut": 5})
        assert err.value.kind == "nonconvergence"

    def test_schema_violations_are_input_errors(self):
        with ServiceClient() as sc:
            with pytest.raises(ServiceError) as err:
                sc.call("/transmon/spectrum", {"ej_ghz": 11.5, "bogus": 1})
        assert err.value.kind == "input"

    def test_unknown_route_rejected(self):
        with ServiceClient() as sc:
            with pytest.raises(ServiceError):
                sc.call("/transmon/unknown", {})
