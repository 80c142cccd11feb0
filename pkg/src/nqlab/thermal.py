"""Temperature dependence of qubit relaxation and thermal photon occupancy.

Two competing explanations of T1(T) are implemented on the same anchored
footing: a two-level system damped by a bosonic bath (stimulated decay
grows with bath occupancy) and quasiparticle tunneling as expected for
aluminum-based qubits.  Both are anchored to a reference T1 at a
reference temperature so their shapes can be compared directly against a
measured sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN_K, E_CHARGE, HBAR, PLANCK_H

SPIN_BOSON = "spin-boson"
QUASIPARTICLE = "quasiparticle"

# below ~1 mK the hyperbolic factors overflow and no dilution fridge
# operates there anyway; rejected rather than extrapolated
MIN_TEMPERATURE_K = 1e-3


@dataclass(frozen=True)
class ThermalModelSpec:
    """Anchored T1(T) model for one qubit.

    Parameters
    ----------
    kind : str
        "spin-boson" or "quasiparticle".
    fq_ghz : float
        Qubit frequency.
    t1_ref_s, t_ref_k : float
        Anchor point; the model passes through T1(t_ref_k) = t1_ref_s.
    delta_al_uev : float, optional
        Superconducting gap of the aluminum quasiparticle host, in
        microelectronvolts.  Ignored by the spin-boson model.
    """

    kind: str
    fq_ghz: float
    t1_ref_s: float = 3.0e-6
    t_ref_k: float = 0.010
    delta_al_uev: float = 180.0

    def __post_init__(self):
        if self.kind not in (SPIN_BOSON, QUASIPARTICLE):
            raise ValueError("kind must be 'spin-boson' or 'quasiparticle'")
        if self.fq_ghz <= 0.0 or self.t1_ref_s <= 0.0 or self.delta_al_uev <= 0.0:
            raise ValueError("fq_ghz, t1_ref_s, delta_al_uev must be positive")
        if self.t_ref_k < MIN_TEMPERATURE_K:
            raise ValueError("t_ref_k below 1 mK")


def _check_temperature(t_k):
    t = np.asarray(t_k, dtype=float)
    if np.any(t < MIN_TEMPERATURE_K):
        raise ValueError("temperature below 1 mK is outside the model range")
    return t


def thermal_occupancy(f_ghz: float, t_k):
    """Bose-Einstein photon number at frequency f and temperature T >= 0."""
    if f_ghz <= 0.0:
        raise ValueError("f_ghz must be positive")
    t = np.asarray(t_k, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("temperature must be nonnegative")
    with np.errstate(divide="ignore", over="ignore"):
        x = PLANCK_H * f_ghz * 1e9 / (BOLTZMANN_K * t)
        n = np.where(x > 700.0, 0.0, 1.0 / np.expm1(np.minimum(x, 700.0)))
    if np.ndim(t_k) == 0:
        return float(n)
    return n


def _spin_boson_factor(fq_ghz, t_k):
    # decay rate grows as 1 + coth(h fq / 2 kB T) = 2 (1 + n_th)
    x = PLANCK_H * fq_ghz * 1e9 / (2.0 * BOLTZMANN_K * np.asarray(t_k, dtype=float))
    return 1.0 / (1.0 + 1.0 / np.tanh(x))


def spin_boson_t1(spec: ThermalModelSpec, t_k):
    """T1(T) for a qubit damped by a thermal bosonic bath.

    T1 is proportional to (1 + coth(h fq / 2 kB T))^-1, anchored so that
    T1(t_ref_k) = t1_ref_s.  Saturates at low temperature and falls off
    as 1/T once kB T exceeds the qubit energy.
    """
    if spec.kind != SPIN_BOSON:
        raise ValueError("spec.kind must be 'spin-boson'")
    t = _check_temperature(t_k)
    scale = spec.t1_ref_s / _spin_boson_factor(spec.fq_ghz, spec.t_ref_k)
    out = scale * _spin_boson_factor(spec.fq_ghz, t)
    return float(out) if np.ndim(t_k) == 0 else out


def quasiparticle_density(delta_uev: float, t_k):
    """Thermal-equilibrium quasiparticle fraction x_qp in a superconductor."""
    if delta_uev <= 0.0:
        raise ValueError("delta_uev must be positive")
    t = _check_temperature(t_k)
    delta_j = delta_uev * 1e-6 * E_CHARGE
    u = delta_j / (BOLTZMANN_K * t)
    return np.sqrt(2.0 * math.pi / u) * np.exp(-u)


def quasiparticle_t1_al(spec: ThermalModelSpec, t_k):
    """T1(T) limited by thermal quasiparticle tunneling plus a constant floor.

    The decay rate is Gamma0 + (x_qp/pi) sqrt(2 Delta omega_q / hbar)
    with x_qp the thermal quasiparticle fraction; Gamma0 absorbs every
    temperature-independent channel and is set by the anchor point.

    Raises
    ------
    ValueError
        If the quasiparticle rate at the anchor already exceeds the
        anchored total rate (no nonnegative floor exists).
    """
    if spec.kind != QUASIPARTICLE:
        raise ValueError("spec.kind must be 'quasiparticle'")
    t = _check_temperature(t_k)
    delta_j = spec.delta_al_uev * 1e-6 * E_CHARGE
    omega_q = 2.0 * math.pi * spec.fq_ghz * 1e9
    prefactor = math.sqrt(2.0 * delta_j * omega_q / HBAR) / math.pi

    def gamma_qp(tt):
        return prefactor * quasiparticle_density(spec.delta_al_uev, tt)

    gamma0 = 1.0 / spec.t1_ref_s - float(gamma_qp(spec.t_ref_k))
    if gamma0 < 0.0:
        raise ValueError(
            "anchor infeasible: quasiparticle rate at t_ref exceeds 1/t1_ref")
    out = 1.0 / (gamma0 + gamma_qp(t))
    return float(out) if np.ndim(t_k) == 0 else out


def t1_vs_temperature(spec: ThermalModelSpec, t_k):
    """Dispatch T1(T) to whichever model spec.kind selects."""
    if spec.kind == SPIN_BOSON:
        return spin_boson_t1(spec, t_k)
    return quasiparticle_t1_al(spec, t_k)
