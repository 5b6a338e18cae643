"""Correlation-boosted state transfer and operator spreading on XX chains.

The package models a single excitation-conserving XX spin chain whose
first two sites start in a (possibly correlated) X-shaped two-qubit
state.  It provides fast excitation-sector propagators, closed-form
receiver populations for the perfect-transfer coupling profile,
transfer-time and information/energy-flux observables, out-of-time-order
correlators under three interchangeable engines, and dense
small-system oracles used for cross-validation.
"""

from .chain import (
    ChainSpec,
    XState,
    make_bell,
    make_one_excitation_x,
    make_pst_couplings,
    make_thermal_correlated,
    make_uniform_couplings,
    thermal_population,
)
from .correlations import (
    CorrelationReport,
    boost_witness,
    concurrence,
    correlation_report,
    geometric_discord,
)
from .dynamics import (
    EffectiveHamiltonian,
    EigenSystem,
    build_effective_hamiltonian,
    eigensystem,
    evolve,
    initial_correlation_matrix,
    populations,
    propagator,
    receiver_population_closed_form,
    receiver_rate_closed_form,
    receiver_series,
    wigner_d_element,
)
from .io import RunConfig, write_table
from .observables import (
    BoostCurve,
    TimeSeries,
    TransferResult,
    bound_residual,
    energy,
    energy_flux,
    entropy,
    info_flux,
    max_energy_flux,
    max_info_flux,
    qubit_fidelity,
    scan_boost,
    transfer_series,
    transfer_time,
)
from .otoc import (
    OtocProfile,
    SectorState,
    SymmetryReport,
    check_symmetries,
    front_speed,
    infinite_temperature_profile,
    mean_position,
    otoc_brute_force,
    otoc_infinite_temperature,
    otoc_profile,
    otoc_sector,
)

__version__ = "0.1.0"

__all__ = [
    "BoostCurve",
    "ChainSpec",
    "CorrelationReport",
    "EffectiveHamiltonian",
    "EigenSystem",
    "OtocProfile",
    "RunConfig",
    "SectorState",
    "SymmetryReport",
    "TimeSeries",
    "TransferResult",
    "XState",
    "bound_residual",
    "boost_witness",
    "build_effective_hamiltonian",
    "check_symmetries",
    "concurrence",
    "correlation_report",
    "eigensystem",
    "energy",
    "energy_flux",
    "entropy",
    "evolve",
    "front_speed",
    "geometric_discord",
    "infinite_temperature_profile",
    "info_flux",
    "initial_correlation_matrix",
    "make_bell",
    "make_one_excitation_x",
    "make_pst_couplings",
    "make_thermal_correlated",
    "make_uniform_couplings",
    "max_energy_flux",
    "max_info_flux",
    "mean_position",
    "otoc_brute_force",
    "otoc_infinite_temperature",
    "otoc_profile",
    "otoc_sector",
    "populations",
    "propagator",
    "qubit_fidelity",
    "receiver_population_closed_form",
    "receiver_rate_closed_form",
    "receiver_series",
    "scan_boost",
    "thermal_population",
    "transfer_series",
    "transfer_time",
    "wigner_d_element",
    "write_table",
]
