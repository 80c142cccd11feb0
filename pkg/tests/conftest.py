import math

import numpy as np
import pytest

from nqlab import junctions


# Published values for the five characterized devices: transition
# frequency (GHz), Josephson and charging energies (GHz), coupling (MHz),
# cavity pull (MHz), shifted cavity frequency (GHz), relaxation and
# coherence times (us), junction diameter (um), participation ratio.
DEVICE_TABLE = {
    "A1": dict(fq_ghz=5.063, ej_ghz=20.020, ec_ghz=0.172, g_mhz=48.7,
               delta_fc_mhz=2.04, fc_ghz=6.8855, t1_us=1.43, t2star_us=0.74,
               d_j_um=1.0, p_j=0.30),
    "A2": dict(fq_ghz=4.089, ej_ghz=11.790, ec_ghz=0.196, g_mhz=67.5,
               delta_fc_mhz=1.53, fc_ghz=6.9657, t1_us=2.87, t2star_us=0.65,
               d_j_um=0.8, p_j=0.20),
    "A3": dict(fq_ghz=4.057, ej_ghz=11.545, ec_ghz=0.197, g_mhz=68.5,
               delta_fc_mhz=1.45, fc_ghz=7.0874, t1_us=3.00, t2star_us=1.20,
               d_j_um=0.8, p_j=0.20),
    "B1": dict(fq_ghz=3.983, ej_ghz=11.980, ec_ghz=0.182, g_mhz=49.0,
               delta_fc_mhz=1.40, fc_ghz=5.8848, t1_us=2.66, t2star_us=0.69,
               d_j_um=2.0, p_j=0.75),
    "B2": dict(fq_ghz=3.907, ej_ghz=11.189, ec_ghz=0.188, g_mhz=55.0,
               delta_fc_mhz=1.31, fc_ghz=6.2171, t1_us=3.43, t2star_us=None,
               d_j_um=2.0, p_j=0.74),
}


@pytest.fixture(scope="session")
def device_table():
    return DEVICE_TABLE


@pytest.fixture(scope="session")
def a3():
    return DEVICE_TABLE["A3"]


def make_iv_loop(ic_a=1.885e-7, rn_ohm=14.6e3, rsg_ohm=0.80e6, vg_v=4.3e-3,
                 **kw):
    """Reference junction loop used across the junction tests."""
    return junctions.synthesize_iv(ic_a, rn_ohm, rsg_ohm, vg_v, **kw)


@pytest.fixture
def iv_loop():
    return make_iv_loop()


def random_junction(rng):
    """Draw analyzer-friendly junction parameters.

    The draws keep Ig*Rn within a factor of ~3 of Vg (but off the gap
    plateau), the probe voltage below the gap, and enough subgap samples
    below the 3 mV probe for the interpolated resistance to be meaningful.
    """
    rn = 10.0 ** rng.uniform(3.5, 4.5)
    vg = rng.uniform(3.5e-3, 5e-3)
    while True:
        ic = rng.uniform(5e-8, 5e-7)
        ratio = (4.0 * ic / math.pi) * rn / vg
        if 0.3 <= ratio <= 0.85 or 1.15 <= ratio <= 3.0:
            break
    rsg = min(rn * rng.uniform(10.0, 100.0), 0.3 / ic)
    isw = ic * rng.uniform(0.3, 0.55)
    return dict(ic_a=ic, rn_ohm=rn, rsg_ohm=rsg, vg_v=vg, isw_a=isw)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
