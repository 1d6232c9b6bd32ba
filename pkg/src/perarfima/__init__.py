"""
Seasonally fractionally differenced periodic autoregressions.

Two model orders are supported: the periodic AR filter applied after seasonal
fractional differencing (FIVAR stacked form, kind ``B``) and the periodic AR
filter driven by fractionally integrated noise (VARFI stacked form, kind
``C``), plus pure seasonal fractional integration (kind ``A``).
"""
__version__ = "0.1.0"

from .exceptions import NonStationaryError, NumericalError, SpecError
from .fracdiff import FracCoeffs, apply_seasonal, pi_coeffs, psi_coeffs
from .parmodel import (CompanionForm, ModelKind, PeriodicModelSpec, PiSequence,
                       build_companion, check_stationary, is_stationary,
                       pi_sequence, pi_total, stationarity_roots)
from .simulate import SeriesSample, simulate, simulate_many
from .acvf import (LagDecomposition, Method, Pacvf, asymptotic_pacvf,
                   asymptotic_pacvf_fivar, asymptotic_pacvf_varfi, decay_slope,
                   decompose_lag, empirical_pacvf, exact_pacvf,
                   expected_empirical_pacvf, fivar_amplitudes, monte_carlo_pacvf,
                   varfi_amplitudes)
from .appendixma import MaTable, ma_composition_sum, ma_oracle, ma_recursion
from .presets import reference_spec

__all__ = [
    "SpecError", "NonStationaryError", "NumericalError",
    "FracCoeffs", "pi_coeffs", "psi_coeffs", "apply_seasonal",
    "ModelKind", "PeriodicModelSpec", "CompanionForm", "PiSequence",
    "build_companion", "stationarity_roots", "is_stationary", "check_stationary",
    "pi_sequence", "pi_total",
    "SeriesSample", "simulate", "simulate_many",
    "LagDecomposition", "decompose_lag", "Method", "Pacvf",
    "exact_pacvf", "asymptotic_pacvf", "asymptotic_pacvf_fivar", "asymptotic_pacvf_varfi",
    "empirical_pacvf", "expected_empirical_pacvf", "monte_carlo_pacvf",
    "fivar_amplitudes", "varfi_amplitudes", "decay_slope",
    "MaTable", "ma_recursion", "ma_composition_sum", "ma_oracle",
    "reference_spec",
]
