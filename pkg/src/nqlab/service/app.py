"""HTTP service exposing the core computations.

Every route is a POST taking one request model and returning one
response model.  ROUTES is the single source of truth: the FastAPI app
is built from it, and the in-process client dispatches through it, so
the two paths cannot drift apart.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import dynamics, fitting, junctions, loss, thermal, transmon
from ..errors import NonConvergenceError
from .schemas import (
    AnalyzeIVRequest,
    ChevronRequest,
    ChevronResponse,
    DeviceParamsResponse,
    DeviceRequest,
    DeviceSpectrumRequest,
    DispersiveRequest,
    DispersiveResponse,
    FitEjEcRequest,
    FitEjEcResponse,
    FitReportResponse,
    FitTraceRequest,
    IVExtractResponse,
    IVPairResponse,
    JcCyclesRequest,
    JcCyclesResponse,
    LossBudgetRequest,
    LossBudgetResponse,
    ModeSplittingRequest,
    ModeSplittingResponse,
    OccupancyRequest,
    OccupancyResponse,
    RabiTraceRequest,
    RaFitRequest,
    RaFitResponse,
    RamseyTraceRequest,
    SpectrumRequest,
    SpectrumResponse,
    SynthesizeIVRequest,
    T1TraceRequest,
    T1VsTempRequest,
    T1VsTempResponse,
    TimeTraceResponse,
    TraceBody,
)


def spectrum(req: SpectrumRequest) -> SpectrumResponse:
    p = transmon.TransmonParams(ej_ghz=req.ej_ghz, ec_ghz=req.ec_ghz,
                                ng=req.ng, ncut=req.ncut)
    spec = transmon.diagonalize_transmon(p, n_levels=req.n_levels)
    return SpectrumResponse(levels_ghz=list(spec.levels_ghz),
                            fq_ghz=spec.fq_ghz, alpha_ghz=spec.alpha_ghz,
                            ej_ec_ratio=p.ratio,
                            outside_transmon_regime=p.outside_transmon_regime)


def fit_ej_ec(req: FitEjEcRequest) -> FitEjEcResponse:
    p = transmon.fit_ej_ec(req.fq_ghz, req.alpha_ghz)
    spec = transmon.diagonalize_transmon(p, n_levels=3)
    return FitEjEcResponse(ej_ghz=p.ej_ghz, ec_ghz=p.ec_ghz,
                           fq_check_ghz=spec.fq_ghz,
                           alpha_check_ghz=spec.alpha_ghz)


def _coupled(ej_ghz, ec_ghz, g_mhz, fc_bare_ghz, ncut, n_transmon_levels,
             n_photon_cut) -> transmon.CoupledSystemParams:
    p = transmon.TransmonParams(ej_ghz=ej_ghz, ec_ghz=ec_ghz, ncut=ncut)
    return transmon.CoupledSystemParams(p, fc_bare_ghz, g_mhz,
                                        n_transmon_levels, n_photon_cut)


def dispersive(req: DispersiveRequest) -> DispersiveResponse:
    cp = _coupled(req.ej_ghz, req.ec_ghz, req.g_mhz, req.fc_bare_ghz,
                  req.ncut, req.n_transmon_levels, req.n_photon_cut)
    ds = transmon.dispersive_shift(cp)
    return DispersiveResponse(delta_fc_mhz=ds.delta_fc_mhz,
                              chi_linear_mhz=ds.chi_linear_mhz,
                              fc_dressed_ghz=ds.fc_dressed_ghz)


def mode_splitting(req: ModeSplittingRequest) -> ModeSplittingResponse:
    if req.fc_bare_ghz is not None:
        cp = _coupled(req.ej_ghz, req.ec_ghz, req.g_mhz, req.fc_bare_ghz,
                      req.ncut, req.n_transmon_levels, req.n_photon_cut)
        return ModeSplittingResponse(splitting_mhz=transmon.mode_splitting(cp),
                                     fc_bare_ghz=req.fc_bare_ghz)
    p = transmon.TransmonParams(ej_ghz=req.ej_ghz, ec_ghz=req.ec_ghz,
                                ncut=req.ncut)
    fq = transmon.diagonalize_transmon(p, n_levels=3,
                                       check_convergence=False).fq_ghz
    cp = transmon.CoupledSystemParams(p, fq, req.g_mhz,
                                      req.n_transmon_levels, req.n_photon_cut)
    s, fc = transmon.minimal_mode_splitting(cp)
    return ModeSplittingResponse(splitting_mhz=s, fc_bare_ghz=fc)


def derive_device(device: dict, eps_r: float = 9.0,
                  barrier_thickness_nm: float = 1.6) -> dict:
    """Everything computable from a device file, keyed by quantity name."""
    out = {}
    ej = device.get("ej_ghz")
    ec = device.get("ec_ghz")
    if ej is not None and ec is not None:
        p = transmon.TransmonParams(ej_ghz=ej, ec_ghz=ec)
        spec = transmon.diagonalize_transmon(p, n_levels=3)
        out["fq_model_ghz"] = spec.fq_ghz
        out["alpha_model_ghz"] = spec.alpha_ghz
        out["ej_ec_ratio"] = p.ratio
    if ej is not None:
        out["ic_a"] = transmon.ic_from_ej(ej)
    c_sigma = None
    if ec is not None:
        c_sigma = transmon.csigma_from_ec(ec)
        out["c_sigma_f"] = c_sigma
        if "p_j" in device:
            out["c_j_f"] = device["p_j"] * c_sigma
    if "d_j_um" in device:
        out["c_j_plate_f"] = transmon.junction_capacitance(
            device["d_j_um"], barrier_thickness_nm, eps_r)
        if c_sigma is not None:
            out["p_j_plate"] = out["c_j_plate_f"] / c_sigma
    if "fq_ghz" in device and "t1_us" in device:
        out["q_q"] = loss.q_from_t1(device["fq_ghz"], device["t1_us"] * 1e-6)
    if (ej is not None and ec is not None and "g_mhz" in device
            and "fc_ghz" in device):
        cp = transmon.CoupledSystemParams(
            transmon.TransmonParams(ej_ghz=ej, ec_ghz=ec),
            device["fc_ghz"], device["g_mhz"])
        try:
            ds = transmon.dispersive_shift(cp)
        except transmon.NotDispersiveError:
            pass  # too close to resonance; skip the shift block
        else:
            out["delta_fc_model_mhz"] = ds.delta_fc_mhz
            out["chi_linear_mhz"] = ds.chi_linear_mhz
    return out


def device_params(req: DeviceRequest) -> DeviceParamsResponse:
    derived = derive_device(req.device, req.eps_r, req.barrier_thickness_nm)
    return DeviceParamsResponse(device=dict(req.device), derived=derived)


def _require(device: dict, *keys):
    missing = [k for k in keys if k not in device]
    if missing:
        raise ValueError("device file missing keys: " + ", ".join(missing))


def device_spectrum(req: DeviceSpectrumRequest) -> SpectrumResponse:
    _require(req.device, "ej_ghz", "ec_ghz")
    return spectrum(SpectrumRequest(ej_ghz=req.device["ej_ghz"],
                                    ec_ghz=req.device["ec_ghz"],
                                    ncut=req.ncut, n_levels=req.n_levels))


def device_dispersive(req: DeviceRequest) -> DispersiveResponse:
    _require(req.device, "ej_ghz", "ec_ghz", "g_mhz", "fc_ghz")
    return dispersive(DispersiveRequest(ej_ghz=req.device["ej_ghz"],
                                        ec_ghz=req.device["ec_ghz"],
                                        g_mhz=req.device["g_mhz"],
                                        fc_bare_ghz=req.device["fc_ghz"]))


def _trace_body(t: junctions.IVTrace) -> TraceBody:
    return TraceBody(bias_a=t.bias_a.tolist(), voltage_v=t.voltage_v.tolist())


def iv_synthesize(req: SynthesizeIVRequest) -> IVPairResponse:
    fwd, rev = junctions.synthesize_iv(
        req.ic_a, req.rn_ohm, req.rsg_ohm, req.vg_v, isw_a=req.isw_a,
        n_points=req.n_points, i_max_a=req.i_max_a, noise_v=req.noise_v,
        seed=req.seed)
    return IVPairResponse(forward=_trace_body(fwd), reverse=_trace_body(rev))


def iv_analyze(req: AnalyzeIVRequest) -> IVExtractResponse:
    fwd = junctions.IVTrace(np.asarray(req.forward.bias_a),
                            np.asarray(req.forward.voltage_v),
                            junctions.FORWARD)
    rev = junctions.IVTrace(np.asarray(req.reverse.bias_a),
                            np.asarray(req.reverse.voltage_v),
                            junctions.REVERSE)
    geom = (junctions.JunctionGeometry(req.diameter_um)
            if req.diameter_um is not None else None)
    ex = junctions.analyze_iv(fwd, rev, geometry=geom,
                              v_threshold=req.v_threshold,
                              rsg_probe_v=req.rsg_probe_v)
    return IVExtractResponse(isw_a=ex.isw_a, ig_a=ex.ig_a, ic_a=ex.ic_a,
                             vg_v=ex.vg_v, rn_ohm=ex.rn_ohm,
                             rsg_ohm=ex.rsg_ohm,
                             gap2delta_mev=ex.gap2delta_mev,
                             quality_ratio=ex.quality_ratio,
                             jc_a_cm2=ex.jc_a_cm2)


def _pairs(entries, kx, ky, what):
    out = []
    for e in entries:
        if kx not in e or ky not in e:
            raise ValueError(f"each {what} entry needs {kx} and {ky}")
        out.append((e[kx], e[ky]))
    return out


def fit_ra(req: RaFitRequest) -> RaFitResponse:
    fit = junctions.ra_product_fit(
        _pairs(req.junctions, "diameter_um", "resistance_ohm", "junction"))
    return RaFitResponse(ra_kohm_um2=fit.ra_kohm_um2,
                         std_err_kohm_um2=fit.std_err_kohm_um2,
                         n_junctions=fit.n_junctions)


def fit_jc_cycles(req: JcCyclesRequest) -> JcCyclesResponse:
    fit = junctions.jc_cycles_fit(
        _pairs(req.points, "cycles", "jc_a_cm2", "wafer"))
    return JcCyclesResponse(slope_per_cycle=fit.slope_per_cycle,
                            log10_prefactor=fit.log10_prefactor,
                            slope_std_err=fit.slope_std_err,
                            intercept_std_err=fit.intercept_std_err)


def simulate_chevron(req: ChevronRequest) -> ChevronResponse:
    if req.detunings_mhz is not None:
        det = np.asarray(req.detunings_mhz, dtype=float)
    else:
        span, step = req.detuning_span_mhz, req.detuning_step_mhz
        det = np.arange(-span, span + step / 2, step)
    if req.durations_ns is not None:
        dur = np.asarray(req.durations_ns, dtype=float)
    else:
        dur = np.arange(0.0, req.duration_max_ns + req.duration_step_ns / 2,
                        req.duration_step_ns)
    grid = dynamics.rabi_chevron(req.omega_r_mhz, det, dur,
                                 drive_decay_us=req.drive_decay_us)
    return ChevronResponse(detunings_mhz=grid.detunings_mhz.tolist(),
                           durations_ns=grid.durations_ns.tolist(),
                           pe=grid.pe.tolist(),
                           pi_pulse_ns=dynamics.pi_pulse_duration(req.omega_r_mhz))


def _trace_response(trace: dynamics.TimeTrace) -> TimeTraceResponse:
    return TimeTraceResponse(t_s=trace.t_s.tolist(), y=trace.y.tolist())


def simulate_t1(req: T1TraceRequest) -> TimeTraceResponse:
    return _trace_response(dynamics.t1_trace(
        t1_s=req.t1_s, a=req.a, offset=req.offset, n_points=req.n_points,
        span_s=req.span_s, noise=req.noise, seed=req.seed))


def simulate_ramsey(req: RamseyTraceRequest) -> TimeTraceResponse:
    return _trace_response(dynamics.ramsey_trace(
        t2star_s=req.t2star_s, delta_d_hz=req.delta_d_hz, a0=req.a0, a=req.a,
        phi0=req.phi0, n_points=req.n_points, span_s=req.span_s,
        noise=req.noise, seed=req.seed))


def simulate_rabi(req: RabiTraceRequest) -> TimeTraceResponse:
    return _trace_response(dynamics.rabi_trace(
        omega_r_hz=req.omega_r_hz, drive_decay_s=req.drive_decay_s,
        a0=req.a0, a=req.a, phi0=req.phi0, n_points=req.n_points,
        span_s=req.span_s, noise=req.noise, seed=req.seed))


def _fit_route(fit_fn):
    def handler(req: FitTraceRequest) -> FitReportResponse:
        sigma = np.asarray(req.sigma, dtype=float) if req.sigma else None
        trace = dynamics.TimeTrace(np.asarray(req.t_s, dtype=float),
                                   np.asarray(req.y, dtype=float), sigma)
        res = fit_fn(trace, absolute_sigma=req.absolute_sigma,
                     max_iter=req.max_iter)
        return FitReportResponse(**res.report())
    return handler


fit_t1_trace = _fit_route(fitting.fit_t1)
fit_ramsey_trace = _fit_route(fitting.fit_ramsey)
fit_rabi_trace = _fit_route(fitting.fit_rabi)


def t1_vs_temperature(req: T1VsTempRequest) -> T1VsTempResponse:
    spec = thermal.ThermalModelSpec(kind=req.kind, fq_ghz=req.fq_ghz,
                                    t1_ref_s=req.t1_ref_s, t_ref_k=req.t_ref_k,
                                    delta_al_uev=req.delta_al_uev)
    temps = np.asarray(req.temperatures_k, dtype=float)
    t1 = thermal.t1_vs_temperature(spec, temps)
    return T1VsTempResponse(temperatures_k=temps.tolist(),
                            t1_s=np.asarray(t1).tolist(), kind=spec.kind)


def occupancy(req: OccupancyRequest) -> OccupancyResponse:
    return OccupancyResponse(n_bar=thermal.thermal_occupancy(req.f_ghz, req.t_k))


def loss_budget(req: LossBudgetRequest) -> LossBudgetResponse:
    device = req.device or {}
    fq = device.get("fq_ghz")
    c_sigma = (transmon.csigma_from_ec(device["ec_ghz"])
               if "ec_ghz" in device else None)
    c_j = None
    if c_sigma is not None and "p_j" in device:
        c_j = device["p_j"] * c_sigma
    elif "d_j_um" in device:
        c_j = transmon.junction_capacitance(device["d_j_um"],
                                            req.barrier_thickness_nm,
                                            req.eps_r)
    channels = loss.resolve_channels(req.channels, fq_ghz=fq,
                                     c_sigma_f=c_sigma, c_j_f=c_j,
                                     d_j_um=device.get("d_j_um"))
    t1_s = device["t1_us"] * 1e-6 if "t1_us" in device else None
    budget = loss.combine_budget(channels, fq_ghz=fq, t1_s=t1_s)
    return LossBudgetResponse(channels=list(budget.channels),
                              q_total=budget.q_total,
                              q_measured=budget.q_measured,
                              q_other=budget.q_other,
                              consistent=budget.consistent)


ROUTES = {
    "/transmon/spectrum": (SpectrumRequest, spectrum),
    "/transmon/fit-ej-ec": (FitEjEcRequest, fit_ej_ec),
    "/transmon/dispersive": (DispersiveRequest, dispersive),
    "/transmon/mode-splitting": (ModeSplittingRequest, mode_splitting),
    "/device/params": (DeviceRequest, device_params),
    "/device/spectrum": (DeviceSpectrumRequest, device_spectrum),
    "/device/dispersive": (DeviceRequest, device_dispersive),
    "/iv/synthesize": (SynthesizeIVRequest, iv_synthesize),
    "/iv/analyze": (AnalyzeIVRequest, iv_analyze),
    "/fit/ra": (RaFitRequest, fit_ra),
    "/fit/jc-cycles": (JcCyclesRequest, fit_jc_cycles),
    "/simulate/chevron": (ChevronRequest, simulate_chevron),
    "/simulate/t1": (T1TraceRequest, simulate_t1),
    "/simulate/ramsey": (RamseyTraceRequest, simulate_ramsey),
    "/simulate/rabi": (RabiTraceRequest, simulate_rabi),
    "/fit/t1": (FitTraceRequest, fit_t1_trace),
    "/fit/ramsey": (FitTraceRequest, fit_ramsey_trace),
    "/fit/rabi": (FitTraceRequest, fit_rabi_trace),
    "/thermal/t1-vs-temperature": (T1VsTempRequest, t1_vs_temperature),
    "/thermal/occupancy": (OccupancyRequest, occupancy),
    "/loss/budget": (LossBudgetRequest, loss_budget),
}


def _make_endpoint(handler):
    def endpoint(body):
        return handler(body)
    return endpoint


def create_app() -> FastAPI:
    app = FastAPI(title="nqlab")

    @app.exception_handler(NonConvergenceError)
    async def _nonconvergence(request, exc):
        return JSONResponse(status_code=400,
                            content={"detail": str(exc),
                                     "kind": "nonconvergence"})

    @app.exception_handler(ValueError)
    async def _bad_input(request, exc):
        return JSONResponse(status_code=400,
                            content={"detail": str(exc), "kind": "input"})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    for path, (req_model, handler) in ROUTES.items():
        endpoint = _make_endpoint(handler)
        endpoint.__name__ = handler.__name__
        endpoint.__annotations__ = {"body": req_model}
        app.post(path)(endpoint)
    return app
