"""Subwavelength localization via adiabatic passage (SLAP).

Closed-form localization estimates, a batched Lindblad solver for
three- and four-level schemes driven by a travelling and a standing wave,
localization profiles across a standing-wave node, the metastable-neon
lithography scenario and a split-step solver for a two-component trapped
condensate.
"""
__version__ = "0.1.0"

from .analytic import (
    BeamGeometry, PulsePair, adiabaticity_margin, fwhm_cpt, fwhm_slap, mixing_angle,
    mixing_angle_at, rabi_sw, rabi_tw, raman_nath_resolution_ok, stirap_time,
    super_localization_threshold,
)
from .errors import (
    ConfigError, ConvergenceError, DomainError, NonUniqueSteadyStateError, NoPeakError,
    PhysicsError, SlapError, StepSizeError, StiffnessError, UndefinedAngleError, ValidityError,
)
from .master_eq import (
    EXTERNAL, Coupling, Decay, LevelScheme, evolve, evolve_batch, lambda_scheme, steady_state,
)
from .profiles import (
    LocalizationProfile, XGrid, cpt_profile, extract_fwhm, slap_profile, sweep_tw_amplitude,
)

__all__ = [
    "BeamGeometry", "PulsePair", "adiabaticity_margin", "fwhm_cpt", "fwhm_slap", "mixing_angle",
    "mixing_angle_at", "rabi_sw", "rabi_tw", "raman_nath_resolution_ok", "stirap_time",
    "super_localization_threshold",
    "ConfigError", "ConvergenceError", "DomainError", "NonUniqueSteadyStateError", "NoPeakError",
    "PhysicsError", "SlapError", "StepSizeError", "StiffnessError", "UndefinedAngleError",
    "ValidityError",
    "EXTERNAL", "Coupling", "Decay", "LevelScheme", "evolve", "evolve_batch", "lambda_scheme",
    "steady_state",
    "LocalizationProfile", "XGrid", "cpt_profile", "extract_fwhm", "slap_profile",
    "sweep_tw_amplitude",
]
