"""Loss extraction for superconducting notch resonators and parallel-plate resonator design."""

__version__ = "0.1.0"

from .circle import circle_fit
from .config import FitConfig
from .design import (
    DesignReport,
    LumpedDesign,
    design_report,
    misattribution_error,
    participation,
    ppc_geometry,
    required_capacitance,
)
from .exceptions import (
    DegenerateGeometry,
    EmptyBand,
    FitError,
    GridTooNarrow,
    InputError,
    InsufficientData,
    InsufficientWings,
    InvalidTrace,
    MalformedOptionLine,
    MissingHeader,
    NoResonance,
    NonPhysicalFit,
    NonPositiveValue,
    NotConverged,
    ParseError,
    ResolossError,
    RowArityError,
    SingularNormalMatrix,
    UnidentifiableSaturation,
    Unreachable,
    UnsupportedFormat,
)
from .fitting import FitResult, estimate_background, fit_resonance, phase_fit
from .lm import lm_minimize
from .model import (
    BackgroundModel,
    FrequencyTrace,
    PowerSweepPoint,
    ResonanceParams,
    TLSModelParams,
    dbm_to_watt,
    internal_loss,
    photon_number,
    resonance_frequency,
    s21_forward,
    thermal_factor,
    tls_loss,
    watt_to_dbm,
)
from .synth import NoiseModel, synth_power_sweep, synth_temperature_sweep, synth_trace
from .tls import TLSFit, fit_power_sweep
from .uncertainty import propagate_uncertainty

__all__ = [
    "BackgroundModel",
    "DegenerateGeometry",
    "DesignReport",
    "EmptyBand",
    "FitConfig",
    "FitError",
    "FitResult",
    "FrequencyTrace",
    "GridTooNarrow",
    "InputError",
    "InsufficientData",
    "InsufficientWings",
    "InvalidTrace",
    "LumpedDesign",
    "MalformedOptionLine",
    "MissingHeader",
    "NoResonance",
    "NoiseModel",
    "NonPhysicalFit",
    "NonPositiveValue",
    "NotConverged",
    "ParseError",
    "PowerSweepPoint",
    "ResolossError",
    "ResonanceParams",
    "RowArityError",
    "SingularNormalMatrix",
    "TLSFit",
    "TLSModelParams",
    "UnidentifiableSaturation",
    "Unreachable",
    "UnsupportedFormat",
    "circle_fit",
    "dbm_to_watt",
    "design_report",
    "estimate_background",
    "fit_power_sweep",
    "fit_resonance",
    "internal_loss",
    "lm_minimize",
    "misattribution_error",
    "participation",
    "phase_fit",
    "photon_number",
    "ppc_geometry",
    "propagate_uncertainty",
    "required_capacitance",
    "resonance_frequency",
    "s21_forward",
    "synth_power_sweep",
    "synth_temperature_sweep",
    "synth_trace",
    "thermal_factor",
    "tls_loss",
    "watt_to_dbm",
]
