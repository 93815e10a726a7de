"""Frequency-domain Hong-Ou-Mandel interference: forward model, calibration and oracles."""

from .converter import BeamsplitterAngle, ConverterResponse, PumpCurve, bs_map, response_at, transition_peak
from .errors import (
    ConfigError,
    DegenerateConfigError,
    DegenerateInputError,
    DomainError,
    FitError,
    FreqHomError,
    InconsistentDataError,
    QuadratureError,
    TruncationError,
    UnphysicalDataError,
)
from .estimator import (
    CalibrationResult,
    calibrate,
    estimate_losses,
    estimate_transition,
    fit_noise,
    fit_pump_curve,
)
from .forward import CountRates, predict_rates
from .hom import DipCurve, coincidence, dip_scan, no_click_probs, visibility, visibility_sweep
from .io import load_config, paper_config
from .params import Bandwidths, ExperimentConfig, LossBudget, NoiseModel, apply_whatif
from .spectra import GaussianProfile, OverlapSpec, interference_integral, overlap_ratio, quadrature_oracle

__version__ = "0.1.0"

__all__ = [
    "Bandwidths", "BeamsplitterAngle", "CalibrationResult", "ConfigError", "ConverterResponse", "CountRates",
    "DegenerateConfigError", "DegenerateInputError", "DipCurve", "DomainError", "ExperimentConfig", "FitError",
    "FreqHomError", "GaussianProfile", "InconsistentDataError", "LossBudget", "NoiseModel", "OverlapSpec",
    "PumpCurve", "QuadratureError", "TruncationError", "UnphysicalDataError", "apply_whatif", "bs_map",
    "calibrate", "coincidence", "dip_scan", "estimate_losses", "estimate_transition", "fit_noise",
    "fit_pump_curve", "interference_integral", "load_config", "no_click_probs", "overlap_ratio",
    "paper_config", "predict_rates", "quadrature_oracle", "response_at", "transition_peak", "visibility",
    "visibility_sweep",
]
