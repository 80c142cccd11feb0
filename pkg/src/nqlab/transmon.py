"""Charge-basis transmon spectra, parameter conversions, and dispersive readout.

The Hamiltonian is diagonalized exactly in a truncated charge basis, so
anharmonicity and offset-charge dispersion come out of the same calculation
that gives the qubit frequency.  Energies are tracked as transition
frequencies in GHz (E/h) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import root

from .constants import E_CHARGE, EPSILON_0, PLANCK_H
from .errors import NonConvergenceError, NotDispersiveError

# EJ/EC below this is outside the regime where the device behaves as a
# weakly anharmonic oscillator with exponentially suppressed charge noise
TRANSMON_REGIME_MIN_RATIO = 20.0

# AlN barrier grown at 1.6 nm per 21 ALD cycles; relative permittivity of
# the sputtered film
DEFAULT_BARRIER_NM = 1.6
DEFAULT_EPS_R = 9.0


@dataclass(frozen=True)
class TransmonParams:
    """Josephson and charging energies of a single transmon.

    Parameters
    ----------
    ej_ghz, ec_ghz : float
        Josephson and charging energies divided by h, in GHz.
    ng : float, optional
        Offset charge in units of 2e.
    ncut : int, optional
        Charge basis truncation; states run over -ncut..+ncut.
    """

    ej_ghz: float
    ec_ghz: float
    ng: float = 0.0
    ncut: int = 30

    def __post_init__(self):
        if not (self.ej_ghz > 0.0 and self.ec_ghz > 0.0):
            raise ValueError("ej_ghz and ec_ghz must be positive")
        if self.ncut < 5:
            raise ValueError("ncut must be at least 5")

    @property
    def ratio(self) -> float:
        return self.ej_ghz / self.ec_ghz

    @property
    def outside_transmon_regime(self) -> bool:
        """True when EJ/EC is too small for charge-noise protection."""
        return self.ratio < TRANSMON_REGIME_MIN_RATIO


@dataclass(frozen=True)
class QubitSpectrum:
    """Lowest transition energies of a diagonalized transmon."""

    levels_ghz: tuple  # energies relative to the ground state, levels_ghz[0] == 0
    params: TransmonParams = field(repr=False, default=None)

    def __post_init__(self):
        lv = self.levels_ghz
        if len(lv) < 3:
            raise ValueError("need at least three levels")
        if abs(lv[0]) > 1e-12:
            raise ValueError("levels must be referenced to the ground state")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError("levels must be strictly increasing")

    @property
    def fq_ghz(self) -> float:
        """0-1 transition frequency."""
        return self.levels_ghz[1]

    @property
    def alpha_ghz(self) -> float:
        """Anharmonicity f12 - f01; negative for a transmon."""
        return self.levels_ghz[2] - 2.0 * self.levels_ghz[1]


@dataclass(frozen=True)
class CapacitanceSet:
    """Junction and total shunt capacitance of one qubit, in farads."""

    c_j_f: float
    c_sigma_f: float

    def __post_init__(self):
        if not (0.0 < self.c_j_f < self.c_sigma_f):
            raise ValueError("require 0 < c_j_f < c_sigma_f")


@dataclass(frozen=True)
class CoupledSystemParams:
    """Transmon coupled to a single readout mode.

    g_mhz = 0 is accepted as the exactly uncoupled limit.
    """

    transmon: TransmonParams
    fc_bare_ghz: float
    g_mhz: float
    n_transmon_levels: int = 5
    n_photon_cut: int = 6

    def __post_init__(self):
        if self.fc_bare_ghz <= 0.0:
            raise ValueError("fc_bare_ghz must be positive")
        if self.g_mhz < 0.0:
            raise ValueError("g_mhz must be nonnegative")
        if self.n_transmon_levels < 3 or self.n_photon_cut < 3:
            raise ValueError("truncations must keep at least 3 states per subsystem")


@dataclass(frozen=True)
class DispersiveShift:
    """Readout-mode pull computed from the coupled spectrum."""

    delta_fc_mhz: float      # |dressed - bare| cavity frequency, qubit in ground state
    chi_linear_mhz: float    # leading-order estimate g^2/|Delta|
    fc_dressed_ghz: float


def _charge_eigs(p: TransmonParams, n_levels: int, vectors: bool = False):
    # H = 4 EC (n - ng)^2 - EJ/2 sum(|n><n+1| + h.c.) on n = -ncut..ncut
    nvals = np.arange(-p.ncut, p.ncut + 1, dtype=float)
    diag = 4.0 * p.ec_ghz * (nvals - p.ng) ** 2
    off = np.full(nvals.size - 1, -0.5 * p.ej_ghz)
    if not vectors:
        w = eigh_tridiagonal(diag, off, eigvals_only=True,
                             select="i", select_range=(0, n_levels - 1))
        return w, None
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1))
    return w, v


def diagonalize_transmon(p: TransmonParams, n_levels: int = 4,
                         check_convergence: bool = True) -> QubitSpectrum:
    """Exact spectrum of the transmon Hamiltonian in the charge basis.

    Parameters
    ----------
    p : TransmonParams
    n_levels : int, optional
        Number of eigenvalues returned (including the ground state).
    check_convergence : bool, optional
        When True the diagonalization is repeated at twice the charge
        cutoff and the qubit frequency must agree to better than 1 Hz.

    Returns
    -------
    QubitSpectrum
        Levels referenced to the ground state, in GHz.

    Raises
    ------
    NonConvergenceError
        If doubling ncut moves the qubit frequency by 1 Hz or more.
    """
    if n_levels < 3:
        raise ValueError("n_levels must be at least 3")
    if n_levels > 2 * p.ncut - 1:
        raise ValueError("n_levels exceeds what this ncut can resolve")
    w, _ = _charge_eigs(p, n_levels)
    if check_convergence:
        pp = TransmonParams(p.ej_ghz, p.ec_ghz, p.ng, 2 * p.ncut)
        w2, _ = _charge_eigs(pp, 2)
        if abs((w2[1] - w2[0]) - (w[1] - w[0])) >= 1e-6:  # 1 kHz in GHz units
            raise NonConvergenceError(
                "charge basis not converged; increase ncut")
    return QubitSpectrum(levels_ghz=tuple(w - w[0]), params=p)


def charge_dispersion(p: TransmonParams, n_points: int = 21) -> float:
    """Peak-to-peak variation of fq over a full offset-charge period, in GHz."""
    fqs = []
    for ng in np.linspace(0.0, 1.0, n_points):
        q = TransmonParams(p.ej_ghz, p.ec_ghz, ng, p.ncut)
        w, _ = _charge_eigs(q, 3)
        fqs.append(w[1] - w[0])
    return float(max(fqs) - min(fqs))


def fit_ej_ec(fq_ghz: float, alpha_ghz: float, ncut: int = 30) -> TransmonParams:
    """Invert the spectrum: find (EJ, EC) reproducing fq and the anharmonicity.

    Parameters
    ----------
    fq_ghz : float
        Measured 0-1 transition frequency, GHz.
    alpha_ghz : float
        Measured anharmonicity f12 - f01, GHz; must be negative and smaller
        in magnitude than fq.

    Returns
    -------
    TransmonParams
        Parameters whose exact spectrum reproduces both targets to 0.1 MHz.

    Raises
    ------
    NonConvergenceError
        If no transmon-regime solution reproduces the targets.
    """
    if fq_ghz <= 0.0:
        raise ValueError("fq_ghz must be positive")
    if alpha_ghz >= 0.0:
        raise ValueError("alpha_ghz must be negative for a transmon")
    if abs(alpha_ghz) >= fq_ghz:
        raise ValueError("|alpha| must be smaller than fq")

    def residual(theta):
        ej, ec = np.exp(theta)
        w, _ = _charge_eigs(TransmonParams(ej, ec, 0.0, ncut), 3)
        return [(w[1] - w[0]) - fq_ghz, (w[2] - 2.0 * w[1] + w[0]) - alpha_ghz]

    # perturbative seed: alpha ~ -EC, fq ~ sqrt(8 EJ EC) - EC
    ec0 = -alpha_ghz
    ej0 = (fq_ghz + ec0) ** 2 / (8.0 * ec0)
    sol = root(residual, np.log([ej0, ec0]), method="hybr", tol=1e-13)
    ej, ec = np.exp(sol.x)
    res = residual(sol.x)
    if not sol.success or max(abs(res[0]), abs(res[1])) > 1e-4:
        raise NonConvergenceError(
            "no transmon solution reproduces fq and alpha")
    return TransmonParams(float(ej), float(ec), 0.0, ncut)


def ej_from_ic(ic_a: float) -> float:
    """Josephson energy EJ/h in GHz from the critical current in amperes."""
    if ic_a <= 0.0:
        raise ValueError("ic_a must be positive")
    return ic_a / (4.0 * math.pi * E_CHARGE) / 1e9


def ic_from_ej(ej_ghz: float) -> float:
    """Critical current in amperes from EJ/h in GHz."""
    if ej_ghz <= 0.0:
        raise ValueError("ej_ghz must be positive")
    return 4.0 * math.pi * E_CHARGE * ej_ghz * 1e9


def ec_from_csigma(c_sigma_f: float) -> float:
    """Charging energy EC/h in GHz from the total capacitance in farads."""
    if c_sigma_f <= 0.0:
        raise ValueError("c_sigma_f must be positive")
    return E_CHARGE ** 2 / (2.0 * PLANCK_H * c_sigma_f) / 1e9


def csigma_from_ec(ec_ghz: float) -> float:
    """Total capacitance in farads from EC/h in GHz."""
    if ec_ghz <= 0.0:
        raise ValueError("ec_ghz must be positive")
    return E_CHARGE ** 2 / (2.0 * PLANCK_H * ec_ghz * 1e9)


def junction_capacitance(diameter_um: float,
                         barrier_thickness_nm: float = DEFAULT_BARRIER_NM,
                         eps_r: float = DEFAULT_EPS_R) -> float:
    """Parallel-plate estimate of the junction self-capacitance, in farads.

    The defaults describe a 21-cycle ALD barrier (1.6 nm) with the AlN
    relative permittivity set to 9.  Both are deliberately overridable:
    measured participation ratios imply a specific capacitance up to two
    times below this estimate.
    """
    if diameter_um <= 0.0 or barrier_thickness_nm <= 0.0 or eps_r <= 0.0:
        raise ValueError("geometry and permittivity must be positive")
    area_m2 = math.pi * (diameter_um * 1e-6 / 2.0) ** 2
    return EPSILON_0 * eps_r * area_m2 / (barrier_thickness_nm * 1e-9)


def participation_ratio(c: CapacitanceSet) -> float:
    """Fraction of electric-field energy stored in the junction barrier."""
    return c.c_j_f / c.c_sigma_f


def _coupled_hamiltonian(cp: CoupledSystemParams):
    nt, nf = cp.n_transmon_levels, cp.n_photon_cut
    w, v = _charge_eigs(cp.transmon, nt, vectors=True)
    nvals = np.arange(-cp.transmon.ncut, cp.transmon.ncut + 1, dtype=float)
    n_mat = v.T @ (nvals[:, None] * v)  # charge operator in the eigenbasis
    if abs(n_mat[0, 1]) < 1e-12:
        raise ValueError("vanishing charge matrix element; cannot set coupling")
    # scale the full charge operator so the 0-1 element reproduces g, then
    # keep only the excitation-exchanging part (qubit up with photon out
    # and vice versa); the counter-rotating terms are dropped
    g_ghz = cp.g_mhz / 1e3
    coupling = (g_ghz / abs(n_mat[0, 1])) * n_mat
    raise_q = np.tril(coupling, k=-1)
    annihilate = np.diag(np.sqrt(np.arange(1, nf)), k=1)
    h = (np.kron(np.diag(w - w[0]), np.eye(nf))
         + np.kron(np.eye(nt), cp.fc_bare_ghz * np.diag(np.arange(nf, dtype=float)))
         + np.kron(raise_q, annihilate) + np.kron(raise_q.T, annihilate.T))
    return h, w - w[0]


def dispersive_shift(cp: CoupledSystemParams) -> DispersiveShift:
    """Readout-mode frequency pull from the coupled-system spectrum.

    The dressed cavity frequency is the transition between the dressed
    states with maximal overlap on bare (qubit 0, 0 photons) and
    (qubit 0, 1 photon).

    Raises
    ------
    NotDispersiveError
        If the qubit-cavity detuning is five times the coupling or less.
    """
    levels, _ = _charge_eigs(cp.transmon, 2)
    fq = levels[1] - levels[0]
    g_ghz = cp.g_mhz / 1e3
    delta = fq - cp.fc_bare_ghz
    if abs(delta) <= 5.0 * g_ghz:
        raise NotDispersiveError(
            "not dispersive: |fq - fc| must exceed 5 g")
    if cp.g_mhz == 0.0:
        return DispersiveShift(0.0, 0.0, cp.fc_bare_ghz)
    h, _ = _coupled_hamiltonian(cp)
    evals, evecs = eigh(h)

    def dressed_energy(bare_index):
        k = int(np.argmax(np.abs(evecs[bare_index, :])))
        return evals[k]

    fc_dressed = dressed_energy(1) - dressed_energy(0)  # (0,1) minus (0,0)
    chi_linear = g_ghz ** 2 / abs(delta)
    return DispersiveShift(
        delta_fc_mhz=abs(fc_dressed - cp.fc_bare_ghz) * 1e3,
        chi_linear_mhz=chi_linear * 1e3,
        fc_dressed_ghz=float(fc_dressed),
    )


def mode_splitting(cp: CoupledSystemParams) -> float:
    """Separation of the two lowest dressed modes, in MHz.

    At zero qubit-cavity detuning this is the vacuum Rabi splitting 2g.
    """
    h, _ = _coupled_hamiltonian(cp)
    evals = eigh(h, eigvals_only=True)
    return float((evals[2] - evals[1]) * 1e3)


def minimal_mode_splitting(cp: CoupledSystemParams, span_mhz: float = None,
                           n_points: int = 201):
    """Scan the bare cavity frequency around fq for the avoided-crossing minimum.

    Returns
    -------
    (splitting_mhz, fc_ghz) at the minimum of the scan.
    """
    levels, _ = _charge_eigs(cp.transmon, 2)
    fq = levels[1] - levels[0]
    if span_mhz is None:
        span_mhz = 4.0 * max(cp.g_mhz, 1.0)
    best = (math.inf, fq)
    for fc in np.linspace(fq - span_mhz / 1e3, fq + span_mhz / 1e3, n_points):
        s = mode_splitting(CoupledSystemParams(
            cp.transmon, float(fc), cp.g_mhz, cp.n_transmon_levels, cp.n_photon_cut))
        if s < best[0]:
            best = (s, float(fc))
    return best
