"""Command-line surface.

click owns flag parsing only; every leaf command packs its flags into a
RunConfig and hands it to run_command, which dispatches through a
ServiceClient.  With --server the same commands talk to a running
instance instead of computing in process.

Exit codes: 0 success, 1 input error, 2 non-convergence (including fit
reports that did not converge).
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import datafiles, svgplot
from .client import ServiceClient, ServiceError
from .dynamics import ChevronGrid, TimeTrace
from .errors import NonConvergenceError
from .junctions import FORWARD, REVERSE, IVTrace


@dataclass
class RunConfig:
    """One parsed invocation: what to run, on which files, with which knobs."""

    command: str
    subcommand: str = None
    inputs: dict = field(default_factory=dict)   # named input paths
    out_dir: str = "."
    seed: int = 0
    flags: dict = field(default_factory=dict)    # route payload pieces
    overrides: dict = field(default_factory=dict)  # -O key=value, wins last
    server: str = None
    svg: str = None
    report: str = None


def _parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ServiceError("input", f"override {pair!r} is not KEY=VALUE")
        key, text = pair.split("=", 1)
        for cast in (int, float):
            try:
                out[key] = cast(text)
                break
            except ValueError:
                continue
        else:
            out[key] = text
    return out


def _payload(cfg: RunConfig, **extra) -> dict:
    merged = {k: v for k, v in {**cfg.flags, **extra}.items() if v is not None}
    merged.update(cfg.overrides)
    return merged


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _emit(path: str):
    click.echo(f"wrote {path}")


def _write_report(cfg: RunConfig, default_name: str, obj: dict) -> str:
    text = datafiles.dump_json(obj)
    click.echo(text, nl=False)
    path = cfg.report or _out_path(cfg, default_name)
    with open(path, "w") as fh:
        fh.write(text)
    _emit(path)
    return path


def _maybe_svg(cfg: RunConfig, series, xlabel, ylabel, title=None):
    if cfg.svg:
        svgplot.write_svg(cfg.svg, svgplot.line_plot(series, xlabel, ylabel,
                                                     title=title))
        _emit(cfg.svg)


# ---------------------------------------------------------------- simulate

def _h_simulate_iv(cfg: RunConfig, client: ServiceClient) -> int:
    resp = client.call("/iv/synthesize", _payload(cfg, seed=cfg.seed))
    fwd = IVTrace(np.asarray(resp["forward"]["bias_a"]),
                  np.asarray(resp["forward"]["voltage_v"]), FORWARD)
    rev = IVTrace(np.asarray(resp["reverse"]["bias_a"]),
                  np.asarray(resp["reverse"]["voltage_v"]), REVERSE)
    path = _out_path(cfg, "iv.csv")
    datafiles.emit_iv_csv(path, fwd, rev)
    _emit(path)
    _maybe_svg(cfg, [("forward", fwd.bias_a * 1e9, fwd.voltage_v * 1e3),
                     ("reverse", rev.bias_a * 1e9, rev.voltage_v * 1e3)],
               "bias_na", "voltage_mv", "synthesized IV loop")
    return 0


def _h_simulate_chevron(cfg: RunConfig, client: ServiceClient) -> int:
    resp = client.call("/simulate/chevron", _payload(cfg))
    grid = ChevronGrid(np.asarray(resp["detunings_mhz"]),
                       np.asarray(resp["durations_ns"]),
                       np.asarray(resp["pe"]))
    path = _out_path(cfg, "chevron.csv")
    datafiles.emit_chevron_csv(path, grid)
    _emit(path)
    click.echo(f"pi_pulse_ns = {datafiles.fmt(resp['pi_pulse_ns'])}")
    center = int(np.argmin(np.abs(grid.detunings_mhz)))
    _maybe_svg(cfg, [(f"detuning {datafiles.fmt(grid.detunings_mhz[center])} MHz",
                      grid.durations_ns, grid.pe[center])],
               "duration_ns", "pe", "Rabi oscillation")
    return 0


def _simulate_trace(cfg, client, route, csv_name, title) -> int:
    resp = client.call(route, _payload(cfg, seed=cfg.seed))
    trace = TimeTrace(np.asarray(resp["t_s"]), np.asarray(resp["y"]))
    path = _out_path(cfg, csv_name)
    datafiles.emit_trace_csv(path, trace)
    _emit(path)
    _maybe_svg(cfg, [(title, trace.t_s * 1e6, trace.y)], "t_us", "signal",
               title)
    return 0


def _h_simulate_t1(cfg, client):
    return _simulate_trace(cfg, client, "/simulate/t1", "t1_trace.csv",
                           "relaxation")


def _h_simulate_ramsey(cfg, client):
    return _simulate_trace(cfg, client, "/simulate/ramsey",
                           "ramsey_trace.csv", "Ramsey fringes")


def _h_simulate_rabi(cfg, client):
    return _simulate_trace(cfg, client, "/simulate/rabi", "rabi_trace.csv",
                           "Rabi oscillation")


def _h_simulate_t1_vs_temp(cfg: RunConfig, client: ServiceClient) -> int:
    flags = dict(cfg.flags)
    t_min = flags.pop("t_min_k")
    t_max = flags.pop("t_max_k")
    n = flags.pop("n_points")
    temps = np.linspace(t_min, t_max, n)
    cfg = RunConfig(**{**cfg.__dict__, "flags": flags})
    resp = client.call("/thermal/t1-vs-temperature",
                       _payload(cfg, temperatures_k=temps.tolist()))
    path = _out_path(cfg, "t1_vs_temp.csv")
    datafiles.emit_t1_temp_csv(path, np.asarray(resp["temperatures_k"]),
                               np.asarray(resp["t1_s"]), resp["kind"])
    _emit(path)
    _maybe_svg(cfg, [(resp["kind"], np.asarray(resp["temperatures_k"]) * 1e3,
                      np.asarray(resp["t1_s"]) * 1e6)],
               "temperature_mk", "t1_us", "relaxation vs temperature")
    return 0


# -------------------------------------------------------------------- fit

def _h_fit_trace(route, csv_name):
    def handler(cfg: RunConfig, client: ServiceClient) -> int:
        trace = datafiles.ingest_trace_csv(cfg.inputs["in"])
        payload = _payload(cfg, t_s=trace.t_s.tolist(), y=trace.y.tolist())
        report = client.call(route, payload)
        _write_report(cfg, csv_name, report)
        if cfg.svg:
            model = _refit_curve(route, report, trace)
            _maybe_svg(cfg, [("data", trace.t_s * 1e6, trace.y),
                             ("fit", trace.t_s * 1e6, model)],
                       "t_us", "signal", report["model"])
        return 0 if report["converged"] else 2
    return handler


def _refit_curve(route, report, trace):
    from . import dynamics
    p = {k: v["value"] for k, v in report["params"].items()}
    if route == "/fit/t1":
        return dynamics.t1_model(trace.t_s, p["a"], p["t1_s"], p["offset"])
    if route == "/fit/ramsey":
        return dynamics.ramsey_model(trace.t_s, p["a0"], p["a"], p["t2star_s"],
                                     p["delta_d_hz"], p["phi0"])
    y = p["a0"] + p["a"] * np.exp(-trace.t_s / p["tau_s"]) * np.cos(
        2 * np.pi * p["omega_r_hz"] * trace.t_s + p["phi0"])
    return y


def _batch_extracts(cfg: RunConfig, client: ServiceClient):
    """Analyze every junction file in a wafer batch, in listed order."""
    batch_path = cfg.inputs["batch"]
    base = os.path.dirname(os.path.abspath(batch_path))
    rows = []
    for entry in datafiles.load_wafer_batch(batch_path):
        csv_path = entry["csv_path"]
        if not os.path.isabs(csv_path):
            csv_path = os.path.join(base, csv_path)
        fwd, rev = datafiles.ingest_iv_csv(csv_path)
        payload = {"forward": {"bias_a": fwd.bias_a.tolist(),
                               "voltage_v": fwd.voltage_v.tolist()},
                   "reverse": {"bias_a": rev.bias_a.tolist(),
                               "voltage_v": rev.voltage_v.tolist()},
                   "diameter_um": entry["diameter_um"]}
        extract = client.call("/iv/analyze", payload)
        rows.append((entry, extract))
    return rows


def _h_fit_ra(cfg: RunConfig, client: ServiceClient) -> int:
    rows = _batch_extracts(cfg, client)
    junctions = [{"diameter_um": e["diameter_um"],
                  "resistance_ohm": x["rn_ohm"]} for e, x in rows]
    fit = client.call("/fit/ra", _payload(cfg, junctions=junctions))
    report = {"fit": fit,
              "junctions": [{"junction_id": e["junction_id"],
                             "diameter_um": e["diameter_um"],
                             "rn_ohm": x["rn_ohm"]} for e, x in rows]}
    _write_report(cfg, "ra_fit.json", report)
    return 0


def _h_fit_jc_cycles(cfg: RunConfig, client: ServiceClient) -> int:
    rows = _batch_extracts(cfg, client)
    points = []
    for entry, extract in rows:
        if entry["cycles"] is None:
            raise ServiceError("input",
                               f"junction {entry['junction_id']}: "
                               "cycles is required for a Jc-cycles fit")
        points.append({"cycles": entry["cycles"],
                       "jc_a_cm2": extract["jc_a_cm2"]})
    fit = client.call("/fit/jc-cycles", _payload(cfg, points=points))
    report = {"fit": fit,
              "junctions": [{"junction_id": e["junction_id"],
                             "cycles": e["cycles"],
                             "jc_a_cm2": x["jc_a_cm2"]} for e, x in rows]}
    _write_report(cfg, "jc_cycles_fit.json", report)
    return 0


def _h_fit_iv(cfg: RunConfig, client: ServiceClient) -> int:
    flags = dict(cfg.flags)
    bias_mode = flags.pop("bias_mode")
    series_r = flags.pop("series_resistance_ohm")
    fwd, rev = datafiles.ingest_iv_csv(cfg.inputs["in"], bias_mode=bias_mode,
                                       series_resistance_ohm=series_r)
    cfg = RunConfig(**{**cfg.__dict__, "flags": flags})
    payload = _payload(
        cfg,
        forward={"bias_a": fwd.bias_a.tolist(),
                 "voltage_v": fwd.voltage_v.tolist()},
        reverse={"bias_a": rev.bias_a.tolist(),
                 "voltage_v": rev.voltage_v.tolist()})
    extract = client.call("/iv/analyze", payload)
    _write_report(cfg, "iv_extract.json", extract)
    _maybe_svg(cfg, [("forward", fwd.bias_a * 1e9, fwd.voltage_v * 1e3),
                     ("reverse", rev.bias_a * 1e9, rev.voltage_v * 1e3)],
               "bias_na", "voltage_mv", "measured IV loop")
    return 0


# ------------------------------------------------------------ device, loss

def _device_route(route, report_name):
    def handler(cfg: RunConfig, client: ServiceClient) -> int:
        device = datafiles.load_device_json(cfg.inputs["device"])
        resp = client.call(route, _payload(cfg, device=device))
        _write_report(cfg, report_name, resp)
        return 0
    return handler


_h_device_params = _device_route("/device/params", "device_params.json")
_h_device_spectrum = _device_route("/device/spectrum", "device_spectrum.json")
_h_device_dispersive = _device_route("/device/dispersive",
                                     "device_dispersive.json")


def _h_loss_budget(cfg: RunConfig, client: ServiceClient) -> int:
    channels = datafiles.load_channels_json(cfg.inputs["channels"])
    payload = _payload(cfg, channels=channels)
    if "device" in cfg.inputs:
        payload["device"] = datafiles.load_device_json(cfg.inputs["device"])
    resp = client.call("/loss/budget", payload)
    width = max(len(name) for name, _ in resp["channels"]) + 2
    click.echo(f"{'channel':<{width}}Q")
    for name, q in resp["channels"]:
        click.echo(f"{name:<{width}}{datafiles.fmt(q)}")
    click.echo(f"{'total':<{width}}{datafiles.fmt(resp['q_total'])}")
    if resp["q_measured"] is not None:
        click.echo(f"{'measured':<{width}}{datafiles.fmt(resp['q_measured'])}")
        click.echo(f"{'other':<{width}}{datafiles.fmt(resp['q_other'])}")
    click.echo("consistent: " + ("yes" if resp["consistent"] else "no"))
    _write_report(cfg, "loss_budget.json", resp)
    return 0


_HANDLERS = {
    ("simulate", "iv"): _h_simulate_iv,
    ("simulate", "chevron"): _h_simulate_chevron,
    ("simulate", "t1"): _h_simulate_t1,
    ("simulate", "ramsey"): _h_simulate_ramsey,
    ("simulate", "rabi"): _h_simulate_rabi,
    ("simulate", "t1-vs-temp"): _h_simulate_t1_vs_temp,
    ("fit", "t1"): _h_fit_trace("/fit/t1", "t1_fit.json"),
    ("fit", "ramsey"): _h_fit_trace("/fit/ramsey", "ramsey_fit.json"),
    ("fit", "rabi"): _h_fit_trace("/fit/rabi", "rabi_fit.json"),
    ("fit", "ra"): _h_fit_ra,
    ("fit", "jc-cycles"): _h_fit_jc_cycles,
    ("fit", "iv"): _h_fit_iv,
    ("device", "params"): _h_device_params,
    ("device", "spectrum"): _h_device_spectrum,
    ("device", "dispersive"): _h_device_dispersive,
    ("loss-budget", None): _h_loss_budget,
}


def run_command(config: RunConfig) -> int:
    """Dispatch one configured invocation; returns the process exit code."""
    key = (config.command, config.subcommand)
    if key not in _HANDLERS:
        click.echo(f"error: unknown command {key}", err=True)
        return 1
    client = ServiceClient(config.server)
    try:
        return _HANDLERS[key](config, client)
    except ServiceError as exc:
        click.echo(f"error: {exc.message}", err=True)
        return 2 if exc.kind == "nonconvergence" else 1
    except NonConvergenceError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    finally:
        client.close()


# ------------------------------------------------------------- click layer

def _common(fn):
    fn = click.option("--svg", default=None, type=click.Path(dir_okay=False),
                      help="also write an SVG plot here")(fn)
    fn = click.option("--report", default=None,
                      type=click.Path(dir_okay=False),
                      help="report path (default inside --out)")(fn)
    return fn


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="send requests to a running service instead of computing "
                   "in process")
@click.option("--out", "out_dir", default=".", metavar="DIR",
              type=click.Path(file_okay=False), help="output directory")
@click.option("--seed", default=0, show_default=True,
              help="seed for synthetic noise")
@click.option("-O", "--override", "overrides", multiple=True,
              metavar="KEY=VALUE",
              help="extra request fields, applied last (repeatable)")
@click.pass_context
def cli(ctx, server, out_dir, seed, overrides):
    """Model and fit all-nitride transmon and junction measurements."""
    ctx.obj = {"server": server, "out_dir": out_dir, "seed": seed,
               "overrides": overrides}


def _dispatch(ctx, command, subcommand, inputs=None, svg=None, report=None,
              **flags):
    base = ctx.obj
    try:
        overrides = _parse_overrides(base["overrides"])
    except ServiceError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(1)
    cfg = RunConfig(command=command, subcommand=subcommand,
                    inputs=inputs or {}, out_dir=base["out_dir"],
                    seed=base["seed"], flags=flags, overrides=overrides,
                    server=base["server"], svg=svg, report=report)
    sys.exit(run_command(cfg))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


@cli.group()
def simulate():
    """Generate synthetic data sets."""


@simulate.command("iv")
@click.option("--ic-a", default=230e-9, show_default=True,
              help="critical current")
@click.option("--rn-ohm", default=18e3, show_default=True,
              help="normal-state resistance")
@click.option("--rsg-ohm", default=20e6, show_default=True,
              help="subgap resistance")
@click.option("--vg-v", default=4.6e-3, show_default=True,
              help="gap voltage")
@click.option("--isw-a", default=None, type=float,
              help="switching current (default ic/2)")
@click.option("--noise-v", default=0.0, show_default=True,
              help="gaussian voltage noise, volts rms")
@click.option("--n-points", default=2001, show_default=True)
@_common
@click.pass_context
def simulate_iv(ctx, svg, report, **flags):
    """Write a hysteretic IV loop to iv.csv."""
    _dispatch(ctx, "simulate", "iv", svg=svg, report=report, **flags)


@simulate.command("chevron")
@click.option("--omega-r", "omega_r_hz", default=18e6, show_default=True,
              help="Rabi rate in Hz")
@click.option("--detuning-span-mhz", default=40.0, show_default=True)
@click.option("--detuning-step-mhz", default=1.0, show_default=True)
@click.option("--duration-max-ns", default=100.0, show_default=True)
@click.option("--duration-step-ns", default=0.2, show_default=True)
@click.option("--drive-decay-us", default=None, type=float,
              help="drive-induced decay time; omit for none")
@_common
@click.pass_context
def simulate_chevron(ctx, svg, report, omega_r_hz, **flags):
    """Write a detuning-duration excitation grid to chevron.csv."""
    _dispatch(ctx, "simulate", "chevron", svg=svg, report=report,
              omega_r_mhz=omega_r_hz / 1e6, **flags)


@simulate.command("t1")
@click.option("--t1-s", default=3e-6, show_default=True)
@click.option("--a", default=1.0, show_default=True)
@click.option("--offset", default=0.0, show_default=True)
@click.option("--n-points", default=50, show_default=True)
@click.option("--span-s", default=15e-6, show_default=True)
@click.option("--noise", default=0.01, show_default=True)
@_common
@click.pass_context
def simulate_t1(ctx, svg, report, **flags):
    """Write a relaxation decay trace to t1_trace.csv."""
    _dispatch(ctx, "simulate", "t1", svg=svg, report=report, **flags)


@simulate.command("ramsey")
@click.option("--t2star-s", default=1.2e-6, show_default=True)
@click.option("--delta-d-hz", default=5.2e6, show_default=True)
@click.option("--n-points", default=200, show_default=True)
@click.option("--span-s", default=2e-6, show_default=True)
@click.option("--noise", default=0.01, show_default=True)
@_common
@click.pass_context
def simulate_ramsey(ctx, svg, report, **flags):
    """Write a detuned free-evolution trace to ramsey_trace.csv."""
    _dispatch(ctx, "simulate", "ramsey", svg=svg, report=report, **flags)


@simulate.command("rabi")
@click.option("--omega-r", "omega_r_hz", default=18e6, show_default=True,
              help="Rabi rate in Hz")
@click.option("--drive-decay-s", default=2e-6, show_default=True)
@click.option("--n-points", default=200, show_default=True)
@click.option("--span-s", default=0.5e-6, show_default=True)
@click.option("--noise", default=0.01, show_default=True)
@_common
@click.pass_context
def simulate_rabi(ctx, svg, report, **flags):
    """Write a driven oscillation trace to rabi_trace.csv."""
    _dispatch(ctx, "simulate", "rabi", svg=svg, report=report, **flags)


@simulate.command("t1-vs-temp")
@click.option("--kind", default="spin-boson", show_default=True,
              type=click.Choice(["spin-boson", "quasiparticle"]))
@click.option("--fq-ghz", default=4.058, show_default=True)
@click.option("--t1-ref-s", default=3e-6, show_default=True)
@click.option("--t-ref-k", default=0.010, show_default=True)
@click.option("--t-min-k", default=0.026, show_default=True)
@click.option("--t-max-k", default=0.400, show_default=True)
@click.option("--n-points", default=40, show_default=True)
@_common
@click.pass_context
def simulate_t1_vs_temp(ctx, svg, report, **flags):
    """Write a temperature sweep of T1 to t1_vs_temp.csv."""
    _dispatch(ctx, "simulate", "t1-vs-temp", svg=svg, report=report, **flags)


@cli.group()
def fit():
    """Estimate parameters from data files."""


def _fit_trace_command(name, help_text):
    @fit.command(name, help=help_text)
    @click.option("--in", "in_path", required=True,
                  type=click.Path(exists=True, dir_okay=False),
                  help="trace CSV with columns t_s,y")
    @click.option("--absolute-sigma", is_flag=True,
                  help="report uncertainties without residual scaling")
    @click.option("--max-iter", default=200, show_default=True)
    @_common
    @click.pass_context
    def _cmd(ctx, svg, report, in_path, **flags):
        _dispatch(ctx, "fit", name, inputs={"in": in_path}, svg=svg,
                  report=report, **flags)
    return _cmd


_fit_trace_command("t1", "Fit an exponential relaxation trace.")
_fit_trace_command("ramsey", "Fit decaying fringes for T2* and detuning.")
_fit_trace_command("rabi", "Fit a driven oscillation for the Rabi rate.")


@fit.command("iv")
@click.option("--in", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="IV CSV with columns bias_a,voltage_v,direction")
@click.option("--diameter-um", default=None, type=float,
              help="junction diameter, enables Jc")
@click.option("--bias-mode", default="current", show_default=True,
              type=click.Choice(["current", "source-voltage"]))
@click.option("--series-resistance-ohm",
              default=datafiles.DEFAULT_SERIES_RESISTANCE_OHM,
              show_default=True,
              help="bias circuit series resistance (source-voltage mode)")
@_common
@click.pass_context
def fit_iv(ctx, svg, report, in_path, **flags):
    """Extract junction figures of merit from an IV loop."""
    _dispatch(ctx, "fit", "iv", inputs={"in": in_path}, svg=svg,
              report=report, **flags)


def _batch_command(name, help_text):
    @fit.command(name, help=help_text)
    @click.option("--batch", "batch_path", required=True,
                  type=click.Path(exists=True, dir_okay=False),
                  help="wafer batch JSON listing junction CSV files")
    @_common
    @click.pass_context
    def _cmd(ctx, svg, report, batch_path):
        _dispatch(ctx, "fit", name, inputs={"batch": batch_path}, svg=svg,
                  report=report)
    return _cmd


_batch_command("ra", "Fit the resistance-area product across junction sizes.")
_batch_command("jc-cycles",
               "Fit critical current density against barrier cycles.")


@cli.group()
def device():
    """Work with device parameter files."""


def _device_command(name, help_text):
    @device.command(name, help=help_text)
    @click.option("--device", "device_path", required=True,
                  type=click.Path(exists=True, dir_okay=False))
    @_common
    @click.pass_context
    def _cmd(ctx, svg, report, device_path):
        _dispatch(ctx, "device", name, inputs={"device": device_path},
                  svg=svg, report=report)
    return _cmd


_device_command("params", "Echo a device file with derived quantities.")
_device_command("spectrum", "Transmon levels for a device file.")
_device_command("dispersive", "Cavity shift for a device file.")


@cli.command("loss-budget")
@click.option("--device", "device_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--channels", "channels_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="channels JSON: {name: Q or {kind, ...}}")
@_common
@click.pass_context
def loss_budget(ctx, svg, report, device_path, channels_path):
    """Combine loss channels into a quality-factor budget."""
    inputs = {"channels": channels_path}
    if device_path:
        inputs["device"] = device_path
    _dispatch(ctx, "loss-budget", None, inputs=inputs, svg=svg, report=report)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    main()
