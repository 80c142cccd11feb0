import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nqlab import loss
from nqlab.loss import (LARGE_JUNCTION_ANCHOR, SMALL_JUNCTION_ANCHOR,
                        PiezoAnchor)


class TestChannelFormulas:
    def test_q_from_t1_reference_device(self):
        assert loss.q_from_t1(4.057, 3.00e-6) == pytest.approx(
            76472.64837368275, rel=1e-12)

    def test_q_from_t1_linear_in_t1(self):
        assert loss.q_from_t1(4.057, 6e-6) == pytest.approx(
            2 * loss.q_from_t1(4.057, 3e-6), rel=1e-12)

    def test_q_subgap_frozen(self):
        q = loss.q_subgap(4.057, 98.3e-15, 260e6)
        assert q == pytest.approx(651495.9823781947, rel=1e-12)
        # same order of magnitude as a 5.7e5 reference bound
        assert 0.5 < q / 5.7e5 < 1.5

    def test_q_gold_frozen(self):
        assert loss.q_gold(4.057, 98.3e-15, 2.5e-14, 1.0) == pytest.approx(
            717.7293274449859, rel=1e-12)

    def test_q_gold_grows_with_junction_capacitance(self):
        # the capacitive divider squared factor exceeds 1 and grows with CJ
        assert (loss.q_gold(4.057, 98.3e-15, 1.0e-14, 1.0)
                < loss.q_gold(4.057, 98.3e-15, 2.5e-14, 1.0))

    def test_q_gold_no_junction_capacitance_limit(self):
        q0 = loss.q_gold(4.057, 98.3e-15, 0.0, 1.0)
        omega = 2 * math.pi * 4.057e9
        assert q0 == pytest.approx(1.0 / (omega * 98.3e-15), rel=1e-12)

    @pytest.mark.parametrize("args", [
        (0.0, 1e-13, 1e6),
        (4.0, -1e-13, 1e6),
        (4.0, 1e-13, 0.0),
    ])
    def test_subgap_rejects_nonpositive(self, args):
        with pytest.raises(ValueError):
            loss.q_subgap(*args)

    def test_gold_rejects_cj_at_or_above_csigma(self):
        with pytest.raises(ValueError):
            loss.q_gold(4.0, 1e-13, 1e-13, 1.0)


class TestPiezoScaling:
    def test_anchor_values_recovered_at_unity(self):
        assert loss.q_piezo_scaled(SMALL_JUNCTION_ANCHOR, 1.41, -0.55) == (
            pytest.approx(8.3e3, rel=1e-12))
        assert loss.q_piezo_scaled(LARGE_JUNCTION_ANCHOR, 1.41, -0.55) == (
            pytest.approx(1.9e3, rel=1e-12))

    @pytest.mark.parametrize("anchor,e33,e31,expected", [
        (SMALL_JUNCTION_ANCHOR, 0.451, -0.176, 81126.59229797297),
        (SMALL_JUNCTION_ANCHOR, 0.141, -0.055, 830000.0),
        (LARGE_JUNCTION_ANCHOR, 0.451, -0.176, 18571.14763447574),
        (LARGE_JUNCTION_ANCHOR, 0.141, -0.055, 190000.0),
    ])
    def test_inverse_square_scaling(self, anchor, e33, e31, expected):
        assert loss.q_piezo_scaled(anchor, e33, e31) == pytest.approx(
            expected, rel=1e-9)

    def test_off_ray_pair_rejected(self):
        with pytest.raises(ValueError, match="rescaling"):
            loss.q_piezo_scaled(SMALL_JUNCTION_ANCHOR, 0.451, -0.30)

    def test_ray_tolerance_adjustable(self):
        q = loss.q_piezo_scaled(SMALL_JUNCTION_ANCHOR, 0.451, -0.30,
                                ray_rtol=2.0)
        assert q > 0.0

    def test_anchor_validation(self):
        with pytest.raises(ValueError):
            PiezoAnchor(1.41, -0.55, -5.0, 0.8, 0.2)


class TestCombine:
    def test_two_channel_example_with_residual(self):
        b = loss.combine_budget({"subgap": 5.7e5, "gold": 3.3e6},
                                fq_ghz=4.057, t1_s=3.00e-6)
        assert b.q_total == pytest.approx(486046.51162790693, rel=1e-12)
        assert b.q_measured == pytest.approx(76472.64837368275, rel=1e-12)
        assert b.q_other == pytest.approx(90751.06424431414, rel=1e-12)
        assert b.consistent

    def test_channels_sorted_by_loss(self):
        b = loss.combine_budget({"a": 3.3e6, "b": 5.7e5, "c": 9.9e4})
        assert [name for name, _ in b.channels] == ["c", "b", "a"]

    def test_tie_breaks_alphabetical(self):
        b = loss.combine_budget({"zeta": 1e5, "alpha": 1e5})
        assert [name for name, _ in b.channels] == ["alpha", "zeta"]

    def test_harmonic_total_below_every_channel(self):
        b = loss.combine_budget({"a": 2e5, "b": 8e5, "c": 1.3e6})
        assert b.q_total < min(q for _, q in b.channels)
        inv = sum(1.0 / q for _, q in b.channels)
        assert b.q_total == pytest.approx(1.0 / inv, rel=1e-12)

    def test_over_budget_flagged_not_clipped(self):
        # budgeted loss larger than measured: the residual is negative
        # and the comparison is marked inconsistent
        b = loss.combine_budget({"dominant": 5e4}, fq_ghz=4.057, t1_s=3.00e-6)
        assert not b.consistent
        assert b.q_other < 0.0

    def test_no_measurement_no_residual(self):
        b = loss.combine_budget({"a": 1e5})
        assert b.q_measured is None and b.q_other is None
        assert b.consistent

    def test_t1_without_fq_rejected(self):
        with pytest.raises(ValueError):
            loss.combine_budget({"a": 1e5}, t1_s=3e-6)

    def test_empty_budget_rejected(self):
        with pytest.raises(ValueError):
            loss.combine_budget({})

    def test_nonpositive_channel_rejected(self):
        with pytest.raises(ValueError):
            loss.combine_budget({"a": -1e5})

    def test_as_dict_round_trip(self):
        b = loss.combine_budget({"subgap": 5.7e5, "gold": 3.3e6},
                                fq_ghz=4.057, t1_s=3.00e-6)
        d = b.as_dict()
        assert d["channels"] == {"subgap": 5.7e5, "gold": 3.3e6}
        assert d["consistent"] is True
        assert set(d) == {"channels", "q_total", "q_measured", "q_other",
                          "consistent"}


class TestResolveChannels:
    def test_bare_numbers_pass_through(self):
        out = loss.resolve_channels({"tls": 2.5e5, "radiation": 1e6})
        assert out == {"tls": 2.5e5, "radiation": 1e6}

    def test_fixed_kind(self):
        out = loss.resolve_channels({"tls": {"kind": "fixed", "q": 2.5e5}})
        assert out == {"tls": 2.5e5}

    def test_subgap_kind_uses_device_context(self):
        out = loss.resolve_channels(
            {"subgap": {"kind": "subgap", "rsg_ohm": 260e6}},
            fq_ghz=4.057, c_sigma_f=98.3e-15)
        assert out["subgap"] == pytest.approx(651495.9823781947, rel=1e-12)

    def test_spec_overrides_device_context(self):
        out = loss.resolve_channels(
            {"subgap": {"kind": "subgap", "rsg_ohm": 260e6,
                        "fq_ghz": 8.114}},
            fq_ghz=4.057, c_sigma_f=98.3e-15)
        assert out["subgap"] == pytest.approx(2 * 651495.9823781947, rel=1e-9)

    def test_subgap_without_context_rejected(self):
        with pytest.raises(ValueError, match="fq_ghz"):
            loss.resolve_channels({"s": {"kind": "subgap", "rsg_ohm": 1e8}})

    def test_gold_kind(self):
        out = loss.resolve_channels(
            {"gold": {"kind": "gold", "r_au_ohm": 1.0}},
            fq_ghz=4.057, c_sigma_f=98.3e-15, c_j_f=2.5e-14)
        assert out["gold"] == pytest.approx(717.7293274449859, rel=1e-12)

    def test_piezo_named_anchor(self):
        out = loss.resolve_channels(
            {"p": {"kind": "piezo", "e33": 0.141, "e31": -0.055,
                   "anchor": "small"}})
        assert out["p"] == pytest.approx(830000.0, rel=1e-9)

    def test_piezo_anchor_from_diameter(self):
        out = loss.resolve_channels(
            {"p": {"kind": "piezo", "e33": 1.41, "e31": -0.55}}, d_j_um=2.0)
        assert out["p"] == pytest.approx(1.9e3, rel=1e-12)

    def test_piezo_inline_anchor(self):
        anchor = dict(e33_ref=1.0, e31_ref=-0.4, q_ref=1e4, d_j_um=1.0,
                      p_j=0.5)
        out = loss.resolve_channels(
            {"p": {"kind": "piezo", "e33": 0.5, "e31": -0.2,
                   "anchor": anchor}})
        assert out["p"] == pytest.approx(4e4, rel=1e-12)

    def test_piezo_without_anchor_rejected(self):
        with pytest.raises(ValueError, match="anchor"):
            loss.resolve_channels({"p": {"kind": "piezo", "e33": 1.41,
                                         "e31": -0.55}})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown kind"):
            loss.resolve_channels({"x": {"kind": "dielectric"}})

    def test_bare_object_without_kind_rejected(self):
        with pytest.raises(ValueError):
            loss.resolve_channels({"x": {"q": 1e5}})


class TestMeasuredQWindow:
    def test_all_devices_in_expected_band(self, device_table):
        for row in device_table.values():
            q = loss.q_from_t1(row["fq_ghz"], row["t1_us"] * 1e-6)
            assert 0.4e5 < q < 0.9e5


@settings(max_examples=40, deadline=None)
@given(qs=st.lists(st.floats(1e3, 1e7), min_size=1, max_size=6))
def test_total_never_above_smallest_channel(qs):
    channels = {f"c{i}": q for i, q in enumerate(qs)}
    b = loss.combine_budget(channels)
    assert b.q_total <= min(qs) * (1 + 1e-12)
    assert b.q_total > 0.0
