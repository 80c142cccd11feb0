"""Modeling and parameter estimation for all-nitride transmon devices.

Charge-basis transmon spectra, Josephson junction IV analysis, qubit
time-domain models and fits, temperature-dependent relaxation, and
quality-factor budgets, with a CLI and an HTTP service on top.
"""

__version__ = "0.1.0"

from .errors import (
    NonConvergenceError,
    NotDispersiveError,
    RankDeficientModelError,
)
from .transmon import (
    CapacitanceSet,
    CoupledSystemParams,
    DispersiveShift,
    QubitSpectrum,
    TransmonParams,
    charge_dispersion,
    csigma_from_ec,
    diagonalize_transmon,
    dispersive_shift,
    ec_from_csigma,
    ej_from_ic,
    fit_ej_ec,
    ic_from_ej,
    junction_capacitance,
    mode_splitting,
    participation_ratio,
)
from .junctions import (
    IVExtract,
    IVTrace,
    JcCyclesFit,
    JunctionGeometry,
    RaFit,
    ambegaokar_baratoff_ic,
    analyze_iv,
    cycles_to_thickness,
    jc_cycles_fit,
    ra_product_fit,
    synthesize_iv,
)
from .dynamics import (
    ChevronGrid,
    TimeTrace,
    pi_pulse_duration,
    rabi_chevron,
    rabi_probability,
    ramsey_model,
    ramsey_trace,
    rabi_trace,
    t1_model,
    t1_trace,
)
from .thermal import (
    ThermalModelSpec,
    quasiparticle_density,
    quasiparticle_t1_al,
    spin_boson_t1,
    t1_vs_temperature,
    thermal_occupancy,
)
from .loss import (
    LossBudget,
    PiezoAnchor,
    combine_budget,
    q_from_t1,
    q_gold,
    q_piezo_scaled,
    q_subgap,
    resolve_channels,
)
from .fitting import (
    FitProblem,
    FitResult,
    Model,
    MODEL_LIBRARY,
    fit_ramsey,
    fit_rabi,
    fit_t1,
    initial_guess_ramsey,
    jacobian_check,
    nlls_fit,
)

__all__ = [name for name in dir() if not name.startswith("_")]
