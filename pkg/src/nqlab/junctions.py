"""Hysteretic junction IV curves: synthesis, feature extraction, wafer-scale fits.

The synthesizer produces the canonical underdamped SIS shape: a
zero-voltage branch up to the switching current, a rise onto the gap
plateau, and an ohmic normal branch, with subgap leakage on the reverse
sweep.  The analyzer inverts that shape into the standard transport
numbers (Isw, Ig, Vg, Rn, Rsg) using the same conventions on measured
or synthesized traces alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .constants import E_CHARGE

# ALD-grown AlN barrier: 21 cycles produce a 1.6 nm film
NM_PER_CYCLE = 1.6 / 21.0

# shape of the rise onto the gap plateau, as fractions of Ig: a fast ramp
# to 0.9 Vg followed by a shoulder reaching Vg
_RISE_FRACTION = 0.04
_SHOULDER_FRACTION = 0.02

FORWARD = "forward"
REVERSE = "reverse"


@dataclass(frozen=True)
class JunctionGeometry:
    """Circular junction geometry.

    barrier_thickness_nm defaults to the ALD map barrier_cycles * 1.6/21
    when a cycle count is given; pass it explicitly to override.
    """

    diameter_um: float
    barrier_cycles: int = None
    barrier_thickness_nm: float = None

    def __post_init__(self):
        if self.diameter_um <= 0.0:
            raise ValueError("diameter_um must be positive")
        if self.barrier_cycles is not None and self.barrier_cycles <= 0:
            raise ValueError("barrier_cycles must be positive")
        if self.barrier_thickness_nm is None and self.barrier_cycles is not None:
            object.__setattr__(self, "barrier_thickness_nm",
                               cycles_to_thickness(self.barrier_cycles))
        if self.barrier_thickness_nm is not None and self.barrier_thickness_nm <= 0.0:
            raise ValueError("barrier_thickness_nm must be positive")

    @property
    def area_um2(self) -> float:
        return math.pi * (self.diameter_um / 2.0) ** 2

    @property
    def area_cm2(self) -> float:
        return self.area_um2 * 1e-8


@dataclass(frozen=True)
class IVTrace:
    """One sweep direction of an IV measurement.

    bias_a must be strictly monotone: increasing for the forward sweep,
    decreasing for the reverse sweep.
    """

    bias_a: np.ndarray
    voltage_v: np.ndarray
    direction: str

    def __post_init__(self):
        for name in ("bias_a", "voltage_v"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.direction not in (FORWARD, REVERSE):
            raise ValueError("direction must be 'forward' or 'reverse'")
        if self.bias_a.ndim != 1 or self.bias_a.shape != self.voltage_v.shape:
            raise ValueError("bias and voltage must be 1-d arrays of equal length")
        if self.bias_a.size < 16:
            raise ValueError("trace too short; need at least 16 samples")
        db = np.diff(self.bias_a)
        if self.direction == FORWARD and not np.all(db > 0.0):
            raise ValueError("forward trace bias must be strictly increasing")
        if self.direction == REVERSE and not np.all(db < 0.0):
            raise ValueError("reverse trace bias must be strictly decreasing")


@dataclass(frozen=True)
class IVExtract:
    """Transport numbers pulled from a hysteretic IV pair."""

    isw_a: float
    ig_a: float
    ic_a: float
    vg_v: float
    rn_ohm: float
    rsg_ohm: float
    jc_a_cm2: float = None

    def __post_init__(self):
        if not (0.0 < self.isw_a <= self.ic_a <= self.ig_a):
            raise ValueError("require 0 < isw <= ic <= ig")
        if self.vg_v <= 0.0 or self.rn_ohm <= 0.0 or self.rsg_ohm <= 0.0:
            raise ValueError("vg, rn, rsg must be positive")

    @property
    def gap2delta_mev(self) -> float:
        """Superconducting gap sum 2*Delta in meV; numerically Vg in mV."""
        return self.vg_v * 1e3

    @property
    def quality_ratio(self) -> float:
        """Rsg/Rn; well above 1 for a healthy junction."""
        return self.rsg_ohm / self.rn_ohm


def synthesize_iv(ic_a: float, rn_ohm: float, rsg_ohm: float, vg_v: float,
                  isw_a: float = None, n_points: int = 2001,
                  i_max_a: float = None, noise_v: float = 0.0,
                  seed: int = 0) -> tuple:
    """Generate a forward/reverse hysteretic IV pair.

    Parameters
    ----------
    ic_a : float
        Intrinsic critical current; the gap-transition current is
        Ig = 4 Ic / pi.
    rn_ohm, rsg_ohm : float
        Normal-state and subgap resistances.
    vg_v : float
        Gap voltage; the plateau the forward branch rides below Ig.
    isw_a : float, optional
        Noise-limited switching current, defaults to Ic/2.  Must not
        exceed Ic.
    noise_v : float, optional
        Standard deviation of Gaussian voltage noise added per sample.
    seed : int, optional
        Seed for the noise generator; ignored when noise_v is zero.

    Returns
    -------
    (IVTrace, IVTrace)
        Forward (ascending bias) and reverse (descending bias) sweeps.

    Notes
    -----
    The rise from the switching point spans about 6 percent of Ig, so the
    plateau value Vg sits exactly at bias Ig/2 whenever
    isw_a < 0.44 * Ig; the default Ic/2 satisfies this.  The reverse
    sweep retraps at Vg/Rsg and descends along V = I * Rsg.
    """
    if min(ic_a, rn_ohm, rsg_ohm, vg_v) <= 0.0:
        raise ValueError("ic_a, rn_ohm, rsg_ohm, vg_v must be positive")
    if rsg_ohm <= rn_ohm:
        raise ValueError("invalid parameter ordering: require rn < rsg")
    if isw_a is None:
        isw_a = 0.5 * ic_a
    if not (0.0 < isw_a <= ic_a):
        raise ValueError("require 0 < isw_a <= ic_a")
    if n_points < 64:
        raise ValueError("n_points must be at least 64")
    ig = 4.0 * ic_a / math.pi
    if i_max_a is None:
        i_max_a = max(2.5 * ig, 1.5 * vg_v / rn_ohm)
    if i_max_a <= ig:
        raise ValueError("i_max_a must exceed the gap-transition current")

    bias = np.linspace(0.0, i_max_a, n_points)
    w1 = _RISE_FRACTION * ig
    w2 = _SHOULDER_FRACTION * ig

    def forward_v(i):
        v = np.zeros_like(i)
        ramp = (i >= isw_a) & (i < isw_a + w1)
        v[ramp] = 0.9 * vg_v * (i[ramp] - isw_a) / w1
        shoulder = (i >= isw_a + w1) & (i < isw_a + w1 + w2)
        v[shoulder] = vg_v * (0.9 + 0.1 * (i[shoulder] - isw_a - w1) / w2)
        plateau = (i >= isw_a + w1 + w2)
        v[plateau] = vg_v
        normal = i >= ig
        v[normal] = i[normal] * rn_ohm
        return v

    def reverse_v(i):
        v = i * rsg_ohm
        v[i >= vg_v / rsg_ohm] = vg_v
        normal = i >= ig
        v[normal] = i[normal] * rn_ohm
        return v

    v_fwd = forward_v(bias)
    v_rev = reverse_v(bias)
    if noise_v > 0.0:
        rng = np.random.default_rng(seed)
        v_fwd = v_fwd + rng.normal(0.0, noise_v, bias.size)
        v_rev = v_rev + rng.normal(0.0, noise_v, bias.size)
    return (IVTrace(bias, v_fwd, FORWARD),
            IVTrace(bias[::-1], v_rev[::-1], REVERSE))


def analyze_iv(forward: IVTrace, reverse: IVTrace,
               geometry: JunctionGeometry = None,
               v_threshold: float = 1e-4,
               rsg_probe_v: float = 3e-3) -> IVExtract:
    """Extract transport parameters from a hysteretic IV pair.

    Conventions
    -----------
    * Isw: first forward bias where |V| exceeds v_threshold.
    * Ig: midpoint bias of the largest single-step voltage jump among
      forward steps that start off the zero-voltage branch (so the
      switching jump itself is excluded).
    * Vg: forward voltage interpolated at bias Ig/2.
    * Ic: pi * Ig / 4.
    * Rn: least-squares slope of the forward branch where V > 1.2 Vg.
    * Rsg: rsg_probe_v divided by the reverse-branch current where the
      subgap voltage first reaches rsg_probe_v, coming from low bias.

    Raises
    ------
    ValueError
        On traces missing the switching event, the gap jump, the normal
        branch, or a subgap crossing of the probe voltage.
    """
    if forward.direction != FORWARD or reverse.direction != REVERSE:
        raise ValueError("pass the forward then the reverse trace")
    fb, fv = forward.bias_a, forward.voltage_v

    above = np.flatnonzero(np.abs(fv) > v_threshold)
    if above.size == 0:
        raise ValueError("no switching found: forward trace never leaves zero voltage")
    isw = float(fb[above[0]])

    dv = np.abs(np.diff(fv))
    eligible = np.abs(fv[:-1]) > v_threshold  # steps starting off the zero branch
    if not np.any(eligible):
        raise ValueError("no voltage jump found above the switching event")
    dv_eligible = np.where(eligible, dv, 0.0)
    k = int(np.argmax(dv_eligible))
    floor = max(float(np.median(dv[eligible])), 1e-15)
    if dv_eligible[k] < 5.0 * floor:
        raise ValueError("no voltage jump found: trace has no gap discontinuity")
    ig = float(0.5 * (fb[k] + fb[k + 1]))
    ic = math.pi * ig / 4.0

    if isw >= ig / 2.0:
        raise ValueError("switching above Ig/2; gap voltage is not resolvable")
    vg = float(np.interp(ig / 2.0, fb, fv))
    if vg <= v_threshold:
        raise ValueError("gap plateau not resolved at Ig/2")

    normal = fv > 1.2 * vg
    if np.count_nonzero(normal) < 4:
        raise ValueError("missing normal branch: too few samples with V > 1.2 Vg")
    rn = float(np.polyfit(fb[normal], fv[normal], 1)[0])
    if rn <= 0.0:
        raise ValueError("normal-branch slope is not positive")

    rb, rv = reverse.bias_a[::-1], reverse.voltage_v[::-1]  # ascending bias
    crossing = np.flatnonzero(rv >= rsg_probe_v)
    if crossing.size == 0 or crossing[0] == 0:
        raise ValueError("reverse branch never reaches the subgap probe voltage")
    j = crossing[0]
    if rb[j] >= ig / 2.0:
        raise ValueError("subgap probe voltage reached only on the gap or normal branch")
    i_probe = rb[j - 1] + (rsg_probe_v - rv[j - 1]) / (rv[j] - rv[j - 1]) * (rb[j] - rb[j - 1])
    rsg = float(rsg_probe_v / i_probe)

    jc = ic / geometry.area_cm2 if geometry is not None else None
    return IVExtract(isw_a=isw, ig_a=ig, ic_a=ic, vg_v=vg,
                     rn_ohm=rn, rsg_ohm=rsg, jc_a_cm2=jc)


@dataclass(frozen=True)
class RaFit:
    """Through-origin fit of R = RA / area over a dice of junction sizes."""

    ra_kohm_um2: float
    std_err_kohm_um2: float
    n_junctions: int

    def resistance_ohm(self, diameter_um: float) -> float:
        return self.ra_kohm_um2 * 1e3 / JunctionGeometry(diameter_um).area_um2


def ra_product_fit(records) -> RaFit:
    """Fit the resistance-area product from (diameter_um, resistance_ohm) pairs.

    Least squares of R against 1/area with no intercept; uniform barriers
    put every junction size on the same RA line.

    Raises
    ------
    ValueError
        With fewer than 3 junctions or fewer than 2 distinct diameters.
    """
    records = list(records)
    if len(records) < 3:
        raise ValueError("need at least 3 junctions for an RA fit")
    d = np.array([r[0] for r in records], dtype=float)
    r_ohm = np.array([r[1] for r in records], dtype=float)
    if np.unique(d).size < 2:
        raise ValueError("degenerate diameters: RA fit needs at least 2 sizes")
    if np.any(d <= 0.0) or np.any(r_ohm <= 0.0):
        raise ValueError("diameters and resistances must be positive")
    x = 1.0 / (math.pi * (d / 2.0) ** 2)  # 1/um^2
    ra = float(np.dot(x, r_ohm) / np.dot(x, x))  # ohm um^2
    resid = r_ohm - ra * x
    dof = len(records) - 1
    var = float(np.dot(resid, resid) / dof / np.dot(x, x)) if dof > 0 else 0.0
    return RaFit(ra_kohm_um2=ra / 1e3,
                 std_err_kohm_um2=math.sqrt(var) / 1e3,
                 n_junctions=len(records))


@dataclass(frozen=True)
class JcCyclesFit:
    """Exponential thinning of Jc with ALD barrier cycles, fit in log10."""

    slope_per_cycle: float
    log10_prefactor: float
    slope_std_err: float
    intercept_std_err: float

    def jc_a_cm2(self, cycles: float) -> float:
        return 10.0 ** (self.log10_prefactor + self.slope_per_cycle * cycles)


def jc_cycles_fit(records) -> JcCyclesFit:
    """Fit log10(Jc) = intercept + slope * cycles from (cycles, jc_a_cm2) pairs.

    Raises
    ------
    ValueError
        With fewer than 3 points, nonpositive Jc, or all-equal cycles.
    """
    records = list(records)
    if len(records) < 3:
        raise ValueError("need at least 3 wafers for a Jc-cycles fit")
    cycles = np.array([r[0] for r in records], dtype=float)
    jc = np.array([r[1] for r in records], dtype=float)
    if np.any(jc <= 0.0):
        raise ValueError("jc values must be positive")
    if np.unique(cycles).size < 2:
        raise ValueError("degenerate cycle counts: need at least 2 values")
    res = linregress(cycles, np.log10(jc))
    return JcCyclesFit(slope_per_cycle=float(res.slope),
                       log10_prefactor=float(res.intercept),
                       slope_std_err=float(res.stderr),
                       intercept_std_err=float(res.intercept_stderr))


def cycles_to_thickness(cycles: float, nm_per_cycle: float = NM_PER_CYCLE) -> float:
    """AlN barrier thickness in nm from the ALD cycle count."""
    if cycles < 0.0:
        raise ValueError("cycles must be nonnegative")
    if nm_per_cycle <= 0.0:
        raise ValueError("nm_per_cycle must be positive")
    return cycles * nm_per_cycle


def ambegaokar_baratoff_ic(gap_mev: float, rn_ohm: float) -> float:
    """Zero-temperature tunnel-junction critical current, in amperes.

    Parameters
    ----------
    gap_mev : float
        Gap sum 2*Delta in meV, as read from the IV gap voltage.
    rn_ohm : float
        Normal-state resistance.
    """
    if gap_mev <= 0.0 or rn_ohm <= 0.0:
        raise ValueError("gap_mev and rn_ohm must be positive")
    delta_j = 0.5 * gap_mev * 1e-3 * E_CHARGE
    return math.pi * delta_j / (2.0 * E_CHARGE * rn_ohm)
