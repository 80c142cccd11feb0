"""Request and response bodies for the HTTP service.

These mirror the core dataclasses field for field; arrays travel as
plain JSON lists.  Domain validation stays in the core modules, so the
schemas only pin types, defaults, and shapes.
"""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, ConfigDict


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpectrumRequest(_Strict):
    ej_ghz: float
    ec_ghz: float
    ng: float = 0.0
    ncut: int = 30
    n_levels: int = 4


class SpectrumResponse(_Strict):
    levels_ghz: list[float]
    fq_ghz: float
    alpha_ghz: float
    ej_ec_ratio: float
    outside_transmon_regime: bool


class FitEjEcRequest(_Strict):
    fq_ghz: float
    alpha_ghz: float


class FitEjEcResponse(_Strict):
    ej_ghz: float
    ec_ghz: float
    fq_check_ghz: float
    alpha_check_ghz: float


class DispersiveRequest(_Strict):
    ej_ghz: float
    ec_ghz: float
    g_mhz: float
    fc_bare_ghz: float
    ncut: int = 30
    n_transmon_levels: int = 5
    n_photon_cut: int = 6


class DispersiveResponse(_Strict):
    delta_fc_mhz: float
    chi_linear_mhz: float
    fc_dressed_ghz: float


class ModeSplittingRequest(_Strict):
    ej_ghz: float
    ec_ghz: float
    g_mhz: float
    fc_bare_ghz: Optional[float] = None  # omit to scan for the minimum
    ncut: int = 30
    n_transmon_levels: int = 5
    n_photon_cut: int = 6


class ModeSplittingResponse(_Strict):
    splitting_mhz: float
    fc_bare_ghz: float


class DeviceRequest(_Strict):
    device: dict[str, float]
    eps_r: float = 9.0
    barrier_thickness_nm: float = 1.6


class DeviceParamsResponse(_Strict):
    device: dict[str, float]
    derived: dict[str, float]


class DeviceSpectrumRequest(_Strict):
    device: dict[str, float]
    n_levels: int = 4
    ncut: int = 30


class SynthesizeIVRequest(_Strict):
    ic_a: float
    rn_ohm: float
    rsg_ohm: float
    vg_v: float
    isw_a: Optional[float] = None
    n_points: int = 2001
    i_max_a: Optional[float] = None
    noise_v: float = 0.0
    seed: int = 0


class TraceBody(_Strict):
    bias_a: list[float]
    voltage_v: list[float]


class IVPairResponse(_Strict):
    forward: TraceBody
    reverse: TraceBody


class AnalyzeIVRequest(_Strict):
    forward: TraceBody
    reverse: TraceBody
    diameter_um: Optional[float] = None
    v_threshold: float = 1e-4
    rsg_probe_v: float = 3e-3


class IVExtractResponse(_Strict):
    isw_a: float
    ig_a: float
    ic_a: float
    vg_v: float
    rn_ohm: float
    rsg_ohm: float
    gap2delta_mev: float
    quality_ratio: float
    jc_a_cm2: Optional[float] = None


class RaFitRequest(_Strict):
    junctions: list[dict[str, float]]  # {diameter_um, resistance_ohm}


class RaFitResponse(_Strict):
    ra_kohm_um2: float
    std_err_kohm_um2: float
    n_junctions: int


class JcCyclesRequest(_Strict):
    points: list[dict[str, float]]  # {cycles, jc_a_cm2}


class JcCyclesResponse(_Strict):
    slope_per_cycle: float
    log10_prefactor: float
    slope_std_err: float
    intercept_std_err: float


class ChevronRequest(_Strict):
    omega_r_mhz: float
    detunings_mhz: Optional[list[float]] = None
    durations_ns: Optional[list[float]] = None
    detuning_span_mhz: float = 40.0
    detuning_step_mhz: float = 1.0
    duration_max_ns: float = 100.0
    duration_step_ns: float = 0.2
    drive_decay_us: Optional[float] = None


class ChevronResponse(_Strict):
    detunings_mhz: list[float]
    durations_ns: list[float]
    pe: list[list[float]]
    pi_pulse_ns: float


class T1TraceRequest(_Strict):
    t1_s: float = 3.0e-6
    a: float = 1.0
    offset: float = 0.0
    n_points: int = 50
    span_s: float = 15.0e-6
    noise: float = 0.01
    seed: int = 0


class RamseyTraceRequest(_Strict):
    t2star_s: float = 1.2e-6
    delta_d_hz: float = 5.2e6
    a0: float = 0.5
    a: float = 0.5
    phi0: float = 0.0
    n_points: int = 200
    span_s: float = 2.0e-6
    noise: float = 0.01
    seed: int = 0


class RabiTraceRequest(_Strict):
    omega_r_hz: float = 18.0e6
    drive_decay_s: float = 2.0e-6
    a0: float = 0.5
    a: float = -0.5
    phi0: float = 0.0
    n_points: int = 200
    span_s: float = 0.5e-6
    noise: float = 0.01
    seed: int = 0


class TimeTraceResponse(_Strict):
    t_s: list[float]
    y: list[float]


class FitTraceRequest(_Strict):
    t_s: list[float]
    y: list[float]
    sigma: Optional[list[float]] = None
    absolute_sigma: bool = False
    max_iter: int = 200


class ParamEstimate(_Strict):
    value: float
    std_err: float


class FitReportResponse(_Strict):
    model: str
    params: dict[str, ParamEstimate]
    rss: float
    converged: bool
    n_iter: int


class T1VsTempRequest(_Strict):
    kind: str
    fq_ghz: float
    t1_ref_s: float = 3.0e-6
    t_ref_k: float = 0.010
    delta_al_uev: float = 180.0
    temperatures_k: list[float]


class T1VsTempResponse(_Strict):
    temperatures_k: list[float]
    t1_s: list[float]
    kind: str


class OccupancyRequest(_Strict):
    f_ghz: float
    t_k: float


class OccupancyResponse(_Strict):
    n_bar: float


class LossBudgetRequest(_Strict):
    channels: dict[str, Union[float, dict]]
    device: Optional[dict[str, float]] = None
    eps_r: float = 9.0
    barrier_thickness_nm: float = 1.6


class LossBudgetResponse(_Strict):
    channels: list[tuple[str, float]]  # ordered by loss contribution
    q_total: float
    q_measured: Optional[float] = None
    q_other: Optional[float] = None
    consistent: bool = True
