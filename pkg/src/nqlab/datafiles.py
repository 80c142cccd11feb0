"""File formats: unit-suffixed CSV schemas and canonical JSON emission.

Every column header carries its unit as a suffix (bias_a, voltage_v,
t_s, detuning_mhz, temperature_k); a file whose header does not match
the declared schema is a parse error, never a guess.  All emission is
deterministic: %.6g floats, stable key order, newline-terminated.
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

from .dynamics import ChevronGrid, TimeTrace
from .junctions import FORWARD, REVERSE, IVTrace

# bias circuit: source voltage drives the junction through two 1 Mohm
# series resistors
DEFAULT_SERIES_RESISTANCE_OHM = 2.0e6

DEVICE_KEYS = ("fq_ghz", "ej_ghz", "ec_ghz", "g_mhz", "delta_fc_mhz",
               "fc_ghz", "q_ci", "t1_us", "t2star_us", "d_j_um", "p_j")

_DIRECTION_OUT = {FORWARD: "fwd", REVERSE: "rev"}
_DIRECTION_IN = {"fwd": FORWARD, "rev": REVERSE}


def fmt(x) -> str:
    """Canonical float formatting used in every emitted file."""
    return "%.6g" % float(x)


def _round6(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round6(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round6(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    """Deterministic JSON text: sorted keys, %.6g floats, trailing newline."""
    return json.dumps(_round6(obj), sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", newline="") as fh:
        fh.write(dump_json(obj))


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None


def _write_csv(path_or_buf, header, rows):
    own = isinstance(path_or_buf, (str, bytes, os.PathLike))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if own:
            fh.close()


def _read_csv(path, expected_header):
    """Yield (line_number, row) for data rows; validate the header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header != list(expected_header):
            raise ValueError(
                f"{path}: header must be {','.join(expected_header)}, "
                f"got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(expected_header):
                raise ValueError(
                    f"{path}: line {lineno}: expected "
                    f"{len(expected_header)} fields, got {len(row)}")
            rows.append((lineno, row))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _parse_float(path, lineno, column, text):
    try:
        return float(text)
    except ValueError:
        raise ValueError(
            f"{path}: line {lineno}: column {column}: "
            f"not a number: {text!r}") from None


def emit_iv_csv(path, forward: IVTrace, reverse: IVTrace):
    """Write a forward/reverse pair as bias_a,voltage_v,direction rows."""
    rows = []
    for trace in (forward, reverse):
        tag = _DIRECTION_OUT[trace.direction]
        rows.extend((fmt(b), fmt(v), tag)
                    for b, v in zip(trace.bias_a, trace.voltage_v))
    _write_csv(path, ("bias_a", "voltage_v", "direction"), rows)


def ingest_iv_csv(path, bias_mode: str = "current",
                  series_resistance_ohm: float = DEFAULT_SERIES_RESISTANCE_OHM):
    """Read an IV sweep file into a (forward, reverse) trace pair.

    bias_mode "current" expects a bias_a column; "source-voltage"
    expects bias_v and converts to current through the series
    resistance (default 2 Mohm).
    """
    if bias_mode not in ("current", "source-voltage"):
        raise ValueError("bias_mode must be 'current' or 'source-voltage'")
    bias_col = "bias_a" if bias_mode == "current" else "bias_v"
    rows = _read_csv(path, (bias_col, "voltage_v", "direction"))
    split = {FORWARD: ([], []), REVERSE: ([], [])}
    for lineno, row in rows:
        bias = _parse_float(path, lineno, bias_col, row[0])
        volt = _parse_float(path, lineno, "voltage_v", row[1])
        tag = row[2].strip()
        if tag not in _DIRECTION_IN:
            raise ValueError(
                f"{path}: line {lineno}: direction must be fwd or rev, "
                f"got {tag!r}")
        if bias_mode == "source-voltage":
            bias = bias / series_resistance_ohm
        b, v = split[_DIRECTION_IN[tag]]
        b.append(bias)
        v.append(volt)
    for direction, (b, _) in split.items():
        if not b:
            raise ValueError(f"{path}: missing {_DIRECTION_OUT[direction]} rows")
    return (IVTrace(*split[FORWARD], FORWARD),
            IVTrace(*split[REVERSE], REVERSE))


def emit_trace_csv(path, trace: TimeTrace):
    """Write a time trace as t_s,y rows."""
    _write_csv(path, ("t_s", "y"),
               ((fmt(t), fmt(y)) for t, y in zip(trace.t_s, trace.y)))


def ingest_trace_csv(path) -> TimeTrace:
    rows = _read_csv(path, ("t_s", "y"))
    t = [_parse_float(path, n, "t_s", r[0]) for n, r in rows]
    y = [_parse_float(path, n, "y", r[1]) for n, r in rows]
    return TimeTrace(t, y)


def emit_chevron_csv(path, grid: ChevronGrid):
    """Write a chevron grid in long format: detuning_mhz,duration_ns,pe."""
    rows = []
    for i, det in enumerate(grid.detunings_mhz):
        rows.extend((fmt(det), fmt(dur), fmt(grid.pe[i, j]))
                    for j, dur in enumerate(grid.durations_ns))
    _write_csv(path, ("detuning_mhz", "duration_ns", "pe"), rows)


def ingest_chevron_csv(path) -> ChevronGrid:
    rows = _read_csv(path, ("detuning_mhz", "duration_ns", "pe"))
    det_order, dur_order = [], []
    values = {}
    for lineno, row in rows:
        det = _parse_float(path, lineno, "detuning_mhz", row[0])
        dur = _parse_float(path, lineno, "duration_ns", row[1])
        pe = _parse_float(path, lineno, "pe", row[2])
        if det not in det_order:
            det_order.append(det)
        if dur not in dur_order:
            dur_order.append(dur)
        values[(det, dur)] = pe
    pe = np.empty((len(det_order), len(dur_order)))
    try:
        for i, det in enumerate(det_order):
            for j, dur in enumerate(dur_order):
                pe[i, j] = values[(det, dur)]
    except KeyError:
        raise ValueError(f"{path}: incomplete chevron grid") from None
    return ChevronGrid(det_order, dur_order, pe)


def emit_t1_temp_csv(path, temperatures_k, t1_s, model: str):
    """Write a temperature sweep as temperature_k,t1_s,model rows."""
    _write_csv(path, ("temperature_k", "t1_s", "model"),
               ((fmt(t), fmt(v), model) for t, v in zip(temperatures_k, t1_s)))


def ingest_t1_temp_csv(path):
    rows = _read_csv(path, ("temperature_k", "t1_s", "model"))
    t = [_parse_float(path, n, "temperature_k", r[0]) for n, r in rows]
    v = [_parse_float(path, n, "t1_s", r[1]) for n, r in rows]
    models = {r[2].strip() for _, r in rows}
    if len(models) != 1:
        raise ValueError(f"{path}: mixed model column values {sorted(models)}")
    return np.asarray(t), np.asarray(v), models.pop()


def load_device_json(path) -> dict:
    """Read a device parameter file; keys follow the device table columns.

    Any subset of the known keys is allowed; operations needing a
    missing key fail at the point of use.
    """
    raw = load_json(path)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: device file must be a JSON object")
    unknown = sorted(set(raw) - set(DEVICE_KEYS))
    if unknown:
        raise ValueError(f"{path}: unknown device keys {unknown}")
    out = {}
    for key, val in raw.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ValueError(f"{path}: key {key!r} must be a number")
        out[key] = float(val)
    return out


def load_wafer_batch(path) -> list:
    """Read a wafer batch: a JSON list of junction records.

    Each record needs junction_id, diameter_um, csv_path; cycles is
    optional.
    """
    raw = load_json(path)
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"{path}: wafer batch must be a nonempty JSON list")
    records = []
    for i, rec in enumerate(raw):
        if not isinstance(rec, dict):
            raise ValueError(f"{path}: entry {i} must be an object")
        missing = [k for k in ("junction_id", "diameter_um", "csv_path")
                   if k not in rec]
        if missing:
            raise ValueError(f"{path}: entry {i} missing keys {missing}")
        unknown = sorted(set(rec) - {"junction_id", "diameter_um",
                                     "csv_path", "cycles"})
        if unknown:
            raise ValueError(f"{path}: entry {i} unknown keys {unknown}")
        if not isinstance(rec["diameter_um"], (int, float)) or rec["diameter_um"] <= 0:
            raise ValueError(f"{path}: entry {i}: diameter_um must be positive")
        records.append({
            "junction_id": str(rec["junction_id"]),
            "diameter_um": float(rec["diameter_um"]),
            "csv_path": str(rec["csv_path"]),
            "cycles": int(rec["cycles"]) if "cycles" in rec else None,
        })
    return records


def load_channels_json(path) -> dict:
    """Read a loss-channel file: {name: Q or {kind, formula inputs}}."""
    raw = load_json(path)
    if not isinstance(raw, dict) or not raw:
        raise ValueError(f"{path}: channels file must be a nonempty JSON object")
    out = {}
    for name, val in raw.items():
        if isinstance(val, bool) or not isinstance(val, (int, float, dict)):
            raise ValueError(
                f"{path}: channel {name!r} must be a number or an object")
        out[name] = float(val) if isinstance(val, (int, float)) else dict(val)
    return out
