"""Per-channel quality factors and their harmonic combination.

Each dissipation channel is reduced to a quality factor Q; rates add, so
1/Q_total is the sum of the 1/Q_i.  Comparing the budget against the
measured Qq = 2 pi fq T1 leaves a residual channel Q_other; a budget
that already over-explains the measured loss is flagged rather than
clipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PiezoAnchor:
    """One simulated piezoelectric-loss reference point.

    The anchor fixes Q at a reference (e33, e31) pair for a specific
    junction diameter and participation ratio; other piezoelectric
    constant choices on the same ray scale as 1/e^2.
    """

    e33_ref: float
    e31_ref: float
    q_ref: float
    d_j_um: float
    p_j: float

    def __post_init__(self):
        if self.q_ref <= 0.0 or self.e33_ref <= 0.0:
            raise ValueError("q_ref and e33_ref must be positive")


# simulated references for the two qubit geometries: 0.8 um junctions at
# pJ = 0.20 and 2.0 um junctions at pJ = 0.75, both at bulk-like
# (e33, e31) = (1.41, -0.55) C/m^2
SMALL_JUNCTION_ANCHOR = PiezoAnchor(1.41, -0.55, 8.3e3, 0.8, 0.20)
LARGE_JUNCTION_ANCHOR = PiezoAnchor(1.41, -0.55, 1.9e3, 2.0, 0.75)


@dataclass(frozen=True)
class LossBudget:
    """Named channel Q's, their harmonic total, and the measured comparison.

    channels is stored ordered by loss contribution 1/Q descending, ties
    alphabetical.  q_other is present (and positive) only when the
    measured loss exceeds the budgeted loss; an over-budgeted comparison
    keeps the negative residual and sets consistent = False.
    """

    channels: tuple  # ordered (name, q) pairs
    q_total: float
    q_measured: float = None
    q_other: float = None
    consistent: bool = True

    def __post_init__(self):
        if not self.channels:
            raise ValueError("budget needs at least one channel")
        if any(q <= 0.0 for _, q in self.channels):
            raise ValueError("all channel Q must be positive")
        if self.q_total > min(q for _, q in self.channels) * (1.0 + 1e-12):
            raise ValueError("q_total must not exceed the smallest channel Q")

    def as_dict(self):
        d = {
            "channels": {name: q for name, q in self.channels},
            "q_total": self.q_total,
        }
        if self.q_measured is not None:
            d["q_measured"] = self.q_measured
            d["q_other"] = self.q_other
            d["consistent"] = self.consistent
        return d


def q_from_t1(fq_ghz: float, t1_s: float) -> float:
    """Measured qubit quality factor Q = 2 pi fq T1."""
    if fq_ghz <= 0.0 or t1_s <= 0.0:
        raise ValueError("fq_ghz and t1_s must be positive")
    return 2.0 * math.pi * fq_ghz * 1e9 * t1_s


def q_subgap(fq_ghz: float, c_sigma_f: float, rsg_ohm: float) -> float:
    """Junction subgap-leakage bound Q = omega_q C_sigma Rsg."""
    if min(fq_ghz, c_sigma_f, rsg_ohm) <= 0.0:
        raise ValueError("all arguments must be positive")
    return 2.0 * math.pi * fq_ghz * 1e9 * c_sigma_f * rsg_ohm


def q_gold(fq_ghz: float, c_sigma_f: float, c_j_f: float, r_au_ohm: float) -> float:
    """Series-resistance loss of the gold contact layer in the junction path.

    Q = (omega_q C_sigma R_Au)^-1 (C_sigma / (C_sigma - C_J))^2.  The
    resistance is an input; no film geometry is assumed.
    """
    if fq_ghz <= 0.0 or c_sigma_f <= 0.0 or r_au_ohm <= 0.0:
        raise ValueError("fq_ghz, c_sigma_f, r_au_ohm must be positive")
    if c_j_f < 0.0:
        raise ValueError("c_j_f must be nonnegative")
    if c_j_f >= c_sigma_f:
        raise ValueError("c_j_f must be smaller than c_sigma_f")
    omega = 2.0 * math.pi * fq_ghz * 1e9
    return (1.0 / (omega * c_sigma_f * r_au_ohm)) * (c_sigma_f / (c_sigma_f - c_j_f)) ** 2


def q_piezo_scaled(anchor: PiezoAnchor, e33: float, e31: float,
                   ray_rtol: float = 0.02) -> float:
    """Piezoelectric loss scaled from a simulated anchor as 1/e^2.

    (e33, e31) must be a uniform rescaling of the anchor pair; the
    scaling law is only meaningful along that ray.

    Raises
    ------
    ValueError
        If e33/e33_ref and e31/e31_ref disagree beyond ray_rtol.
    """
    if e33 <= 0.0:
        raise ValueError("e33 must be positive")
    s = e33 / anchor.e33_ref
    if anchor.e31_ref != 0.0:
        s31 = e31 / anchor.e31_ref
        if abs(s31 - s) > ray_rtol * abs(s):
            raise ValueError(
                "(e33, e31) must be a uniform rescaling of the anchor pair")
    elif e31 != 0.0:
        raise ValueError("anchor has e31 = 0; e31 must be 0 as well")
    return anchor.q_ref / s ** 2


def resolve_channels(specs: dict, fq_ghz: float = None,
                     c_sigma_f: float = None, c_j_f: float = None,
                     d_j_um: float = None) -> dict:
    """Turn a channels mapping {name: Q or {kind, inputs}} into plain Q values.

    Recognized kinds: "fixed" (q), "subgap" (rsg_ohm), "gold"
    (r_au_ohm), "piezo" (e33, e31, optional anchor).  Capacitances and
    geometry default to the device-level values passed in; each spec
    entry may override them.  The piezo anchor may be given inline, or
    named "small"/"large", or inferred from the junction diameter.
    """
    resolved = {}
    for name, spec in specs.items():
        if isinstance(spec, (int, float)):
            resolved[name] = float(spec)
            continue
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ValueError(f"channel {name!r}: need a Q value or a kind object")
        kind = spec["kind"]
        if kind == "fixed":
            if "q" not in spec:
                raise ValueError(f"channel {name!r}: fixed kind needs 'q'")
            resolved[name] = float(spec["q"])
        elif kind == "subgap":
            if "rsg_ohm" not in spec:
                raise ValueError(f"channel {name!r}: subgap kind needs 'rsg_ohm'")
            fq = float(spec.get("fq_ghz", fq_ghz or 0.0))
            cs = float(spec.get("c_sigma_f", c_sigma_f or 0.0))
            if fq <= 0.0 or cs <= 0.0:
                raise ValueError(f"channel {name!r}: needs fq_ghz and c_sigma_f")
            resolved[name] = q_subgap(fq, cs, float(spec["rsg_ohm"]))
        elif kind == "gold":
            if "r_au_ohm" not in spec:
                raise ValueError(f"channel {name!r}: gold kind needs 'r_au_ohm'")
            fq = float(spec.get("fq_ghz", fq_ghz or 0.0))
            cs = float(spec.get("c_sigma_f", c_sigma_f or 0.0))
            cj = float(spec.get("c_j_f", c_j_f if c_j_f is not None else 0.0))
            if fq <= 0.0 or cs <= 0.0:
                raise ValueError(f"channel {name!r}: needs fq_ghz and c_sigma_f")
            resolved[name] = q_gold(fq, cs, cj, float(spec["r_au_ohm"]))
        elif kind == "piezo":
            if "e33" not in spec or "e31" not in spec:
                raise ValueError(f"channel {name!r}: piezo kind needs e33 and e31")
            anchor = spec.get("anchor")
            if isinstance(anchor, dict):
                anchor = PiezoAnchor(**anchor)
            elif anchor == "small":
                anchor = SMALL_JUNCTION_ANCHOR
            elif anchor == "large":
                anchor = LARGE_JUNCTION_ANCHOR
            elif anchor is None and d_j_um is not None:
                anchor = (SMALL_JUNCTION_ANCHOR
                          if abs(d_j_um - SMALL_JUNCTION_ANCHOR.d_j_um)
                          <= abs(d_j_um - LARGE_JUNCTION_ANCHOR.d_j_um)
                          else LARGE_JUNCTION_ANCHOR)
            if anchor is None:
                raise ValueError(
                    f"channel {name!r}: no piezo anchor given or inferable")
            resolved[name] = q_piezo_scaled(anchor, float(spec["e33"]),
                                            float(spec["e31"]))
        else:
            raise ValueError(f"channel {name!r}: unknown kind {kind!r}")
    return resolved


def combine_budget(channels: dict, fq_ghz: float = None,
                   t1_s: float = None) -> LossBudget:
    """Harmonically combine named channel Q's into a LossBudget.

    When fq_ghz and t1_s are given, the measured Qq and the residual
    channel Q_other = (1/Qq - sum 1/Q_i)^-1 are reported as well.  A
    negative residual (budget exceeds measured loss) is kept as-is with
    consistent = False.
    """
    if not channels:
        raise ValueError("budget needs at least one channel")
    for name, q in channels.items():
        if q <= 0.0:
            raise ValueError(f"channel {name!r} must have positive Q")
    ordered = tuple(sorted(channels.items(), key=lambda kv: (-1.0 / kv[1], kv[0])))
    inv_sum = sum(1.0 / q for _, q in ordered)
    q_total = 1.0 / inv_sum

    q_measured = q_other = None
    consistent = True
    if t1_s is not None:
        if fq_ghz is None:
            raise ValueError("fq_ghz is required alongside t1_s")
        q_measured = q_from_t1(fq_ghz, t1_s)
        inv_other = 1.0 / q_measured - inv_sum
        if inv_other <= 0.0:
            consistent = False
        q_other = math.inf if inv_other == 0.0 else 1.0 / inv_other
    return LossBudget(channels=ordered, q_total=q_total, q_measured=q_measured,
                      q_other=q_other, consistent=consistent)
