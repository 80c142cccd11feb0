"""Driven-qubit time-domain models and seeded synthetic traces.

Covers the detuned Rabi chevron, exponential energy relaxation, and
Ramsey fringes.  The synthetic-trace helpers exist so fits elsewhere in
the package can be exercised against data with known ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeTrace:
    """Sampled readout signal versus time.

    t_s must be strictly increasing.  sigma, when present, is the
    per-point noise scale used for weighted fits.
    """

    t_s: np.ndarray
    y: np.ndarray
    sigma: np.ndarray = None

    def __post_init__(self):
        for name in ("t_s", "y", "sigma"):
            val = getattr(self, name)
            if val is None:
                continue
            arr = np.array(val, dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.t_s.ndim != 1 or self.t_s.shape != self.y.shape:
            raise ValueError("t_s and y must be 1-d arrays of equal length")
        if self.t_s.size < 2:
            raise ValueError("trace too short; need at least 2 samples")
        if not np.all(np.diff(self.t_s) > 0.0):
            raise ValueError("t_s must be strictly increasing")
        if self.sigma is not None:
            if self.sigma.shape != self.y.shape:
                raise ValueError("sigma must match y")
            if np.any(self.sigma <= 0.0):
                raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class ChevronGrid:
    """Excited-state population on a detuning-by-duration grid.

    pe has shape (len(detunings_mhz), len(durations_ns)) and every entry
    lies in [0, 1].
    """

    detunings_mhz: np.ndarray
    durations_ns: np.ndarray
    pe: np.ndarray

    def __post_init__(self):
        for name in ("detunings_mhz", "durations_ns", "pe"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.pe.shape != (self.detunings_mhz.size, self.durations_ns.size):
            raise ValueError("pe shape must be (n_detunings, n_durations)")
        if np.any(self.pe < -1e-12) or np.any(self.pe > 1.0 + 1e-12):
            raise ValueError("pe must lie in [0, 1]")


def rabi_probability(omega_r_mhz: float, detuning_mhz, duration_ns,
                     drive_decay_us: float = None):
    """Excited-state probability of a detuned square Rabi drive.

    Pe = (Omega_R^2 / Omega^2) sin^2(pi Omega t) with the generalized
    Rabi frequency Omega = sqrt(Omega_R^2 + detuning^2).  Frequencies are
    cyclic (MHz) and durations are in ns.  When drive_decay_us is given,
    the oscillating part is damped toward its midpoint by
    exp(-t/drive_decay_us); the undamped closed form is the default
    because pulse durations sit far below T1.
    """
    if omega_r_mhz <= 0.0:
        raise ValueError("omega_r_mhz must be positive")
    det = np.asarray(detuning_mhz, dtype=float)
    t = np.asarray(duration_ns, dtype=float)
    omega = np.sqrt(omega_r_mhz ** 2 + det ** 2)
    amp = (omega_r_mhz / omega) ** 2
    phase = 2.0 * math.pi * omega * t * 1e-3
    envelope = 1.0 if drive_decay_us is None else np.exp(-t * 1e-3 / drive_decay_us)
    return amp * 0.5 * (1.0 - envelope * np.cos(phase))


def rabi_chevron(omega_r_mhz: float, detunings_mhz, durations_ns,
                 drive_decay_us: float = None) -> ChevronGrid:
    """Detuning-by-duration chevron pattern for a square drive."""
    det = np.asarray(detunings_mhz, dtype=float)
    dur = np.asarray(durations_ns, dtype=float)
    if det.size < 2 or dur.size < 2:
        raise ValueError("need at least 2 detunings and 2 durations")
    pe = rabi_probability(omega_r_mhz, det[:, None], dur[None, :], drive_decay_us)
    return ChevronGrid(det, dur, pe)


def pi_pulse_duration(omega_r_mhz: float, detuning_mhz: float = 0.0) -> float:
    """Duration of maximal population transfer, 1/(2 Omega), in ns."""
    if omega_r_mhz <= 0.0:
        raise ValueError("omega_r_mhz must be positive")
    omega = math.hypot(omega_r_mhz, detuning_mhz)
    return 1e3 / (2.0 * omega)


def t1_model(t_s, a: float, t1_s: float, offset: float):
    """Relaxation model offset + a * exp(-t/T1)."""
    if t1_s <= 0.0:
        raise ValueError("t1_s must be positive")
    return offset + a * np.exp(-np.asarray(t_s, dtype=float) / t1_s)


def ramsey_model(t_s, a0: float, a: float, t2star_s: float,
                  delta_d_hz: float, phi0: float):
    """Detuned Ramsey fringe a0 + a * exp(-t/T2*) cos(2 pi delta_d t + phi0)."""
    if t2star_s <= 0.0:
        raise ValueError("t2star_s must be positive")
    t = np.asarray(t_s, dtype=float)
    return a0 + a * np.exp(-t / t2star_s) * np.cos(2.0 * math.pi * delta_d_hz * t + phi0)


def t1_trace(t1_s: float = 3.0e-6, a: float = 1.0, offset: float = 0.0,
                   n_points: int = 50, span_s: float = 15.0e-6,
                   noise: float = 0.01, seed: int = 0) -> TimeTrace:
    """Seeded synthetic relaxation trace with Gaussian readout noise."""
    if n_points < 8 or span_s <= 0.0 or noise < 0.0:
        raise ValueError("bad trace shape parameters")
    t = np.linspace(0.0, span_s, n_points)
    y = t1_model(t, a, t1_s, offset)
    sigma = None
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, noise, n_points)
        sigma = np.full(n_points, noise)
    return TimeTrace(t, y, sigma)


def ramsey_trace(t2star_s: float = 1.2e-6, delta_d_hz: float = 5.2e6,
                       a0: float = 0.5, a: float = 0.5, phi0: float = 0.0,
                       n_points: int = 200, span_s: float = 2.0e-6,
                       noise: float = 0.01, seed: int = 0) -> TimeTrace:
    """Seeded synthetic Ramsey fringe with Gaussian readout noise."""
    if n_points < 16 or span_s <= 0.0 or noise < 0.0:
        raise ValueError("bad trace shape parameters")
    t = np.linspace(0.0, span_s, n_points)
    y = ramsey_model(t, a0, a, t2star_s, delta_d_hz, phi0)
    sigma = None
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, noise, n_points)
        sigma = np.full(n_points, noise)
    return TimeTrace(t, y, sigma)


def rabi_trace(omega_r_hz: float = 18.0e6, drive_decay_s: float = 2.0e-6,
                     a0: float = 0.5, a: float = -0.5, phi0: float = 0.0,
                     n_points: int = 200, span_s: float = 0.5e-6,
                     noise: float = 0.01, seed: int = 0) -> TimeTrace:
    """Seeded resonant Rabi oscillation with an exponential drive-decay envelope.

    Pe(t) = 1/2 - 1/2 exp(-t/tau) cos(2 pi Omega_R t) for default a0, a.
    """
    if omega_r_hz <= 0.0 or drive_decay_s <= 0.0:
        raise ValueError("omega_r_hz and drive_decay_s must be positive")
    if n_points < 16 or span_s <= 0.0 or noise < 0.0:
        raise ValueError("bad trace shape parameters")
    t = np.linspace(0.0, span_s, n_points)
    y = a0 + a * np.exp(-t / drive_decay_s) * np.cos(2.0 * math.pi * omega_r_hz * t + phi0)
    sigma = None
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, noise, n_points)
        sigma = np.full(n_points, noise)
    return TimeTrace(t, y, sigma)
