"""Dephasing qubit in a bosonic bath: decoherence, fidelity and non-Markovianity.

The bath is described by ``J(w) = w^s cutoff^(1-s) exp(-w / cutoff)`` and can
be split in frequency into an observed and an unobserved fragment.  The
package evaluates the decoherence factor of the unobserved fragment, the
state-distinguishability fidelity of the observed one, the canonical
dephasing rate and the non-Markovianity measure, with closed forms and a
finite-mode Fock-space simulator as independent cross-checks.
"""
__version__ = "0.1.0"

from .spectral import (
    EnvPartition,
    ModeSet,
    SpectralDensity,
    discretize,
    evaluate_J,
    observed_weight,
    unobserved_weight,
)
from .quadrature import QuadratureError, QuadSpec, integrate, integrate_oscillatory
from .indicators import (
    IndicatorSeries,
    NMResult,
    asymptotic_log_decoherence,
    asymptotic_log_fidelity,
    gamma_rate,
    gamma_rate_highT,
    indicator_series,
    log_decoherence,
    log_fidelity,
    non_markovianity,
)
from .closed_forms import (
    digamma,
    hurwitz_zeta,
    log_dec_thermal,
    log_dec_vacuum,
    log_decoherence_closed,
    log_fid_thermal,
    log_fidelity_closed,
    polygamma,
)
from .oracle import (
    ModeState,
    PartiallyReducedState,
    TruncationError,
    build_partially_reduced_state,
    master_equation_residual,
    mode_decoherence_factor,
    mode_fidelity,
    product_indicators,
    sbs_diagnostics,
    uhlmann_fidelity,
    validate_state,
)

__all__ = [
    "EnvPartition", "ModeSet", "SpectralDensity", "discretize", "evaluate_J",
    "observed_weight", "unobserved_weight",
    "QuadratureError", "QuadSpec", "integrate", "integrate_oscillatory",
    "IndicatorSeries", "NMResult", "asymptotic_log_decoherence", "asymptotic_log_fidelity",
    "gamma_rate", "gamma_rate_highT", "indicator_series", "log_decoherence", "log_fidelity",
    "non_markovianity",
    "digamma", "hurwitz_zeta", "log_dec_thermal", "log_dec_vacuum", "log_decoherence_closed",
    "log_fid_thermal", "log_fidelity_closed", "polygamma",
    "ModeState", "PartiallyReducedState", "TruncationError", "build_partially_reduced_state",
    "master_equation_residual", "mode_decoherence_factor", "mode_fidelity", "product_indicators",
    "sbs_diagnostics", "uhlmann_fidelity", "validate_state",
]
