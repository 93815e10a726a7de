"""Parameter containers shared by the forward model, the estimator and the HOM model."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

from .converter import PumpCurve, transition_peak
from .errors import ConfigError
from .spectra import CONVENTIONS, overlap_ratio

INPUT_KINDS = ("coherent", "single-photon")


@dataclass(frozen=True)
class Bandwidths:
    """Spectral widths in GHz.

    ``in_u``/``in_l``: upper/lower input spectra; ``wg``: converter
    acceptance; ``out_u``/``out_l``: output filters.  The converter and
    filter widths may be infinite (flat response); the input widths may not.
    """

    in_u: float
    in_l: float
    wg: float
    out_u: float
    out_l: float

    def __post_init__(self):
        for name in ("in_u", "in_l", "wg", "out_u", "out_l"):
            value = getattr(self, name)
            if value is None or not value > 0:
                raise ConfigError(f"bandwidth {name} must be positive, got {value}")
        if math.isinf(self.in_u) or math.isinf(self.in_l):
            raise ConfigError("input bandwidths must be finite")

    def factors(self) -> "OverlapFactors":
        r = overlap_ratio
        return OverlapFactors(
            ut=r([(self.in_u, "input"), (self.wg, "weight"), (self.out_l, "weight")]),
            us0=r([(self.in_u, "input"), (self.out_u, "weight")]),
            us1=r([(self.in_u, "input"), (self.wg, "weight"), (self.out_u, "weight")]),
            lt=r([(self.in_l, "input"), (self.wg, "weight"), (self.out_u, "weight")]),
            ls0=r([(self.in_l, "input"), (self.out_l, "weight")]),
            ls1=r([(self.in_l, "input"), (self.wg, "weight"), (self.out_l, "weight")]),
        )


@dataclass(frozen=True)
class OverlapFactors:
    """Gaussian overlap ratios entering the count-rate model.

    ``ut``: upper input through converter into the lower filter;
    ``us0``/``us1``: upper input into the upper filter without/with the
    converter response; ``lt``, ``ls0``, ``ls1``: the same for the lower input.
    """

    ut: float
    us0: float
    us1: float
    lt: float
    ls0: float
    ls1: float


@dataclass(frozen=True)
class LossBudget:
    """The three loss products that, with ``R~``, fix the count rates.

    ``tu = T_in,U * T~_out,U``, ``tl = T_in,U * T~_out,L`` and
    ``mu = |alpha|**2 * T_in,L / T_in,U``.  For a single-photon lower input
    ``mu`` is ``T_in,L / T_in,U``.
    """

    tu: float
    tl: float
    mu: float

    def __post_init__(self):
        for name in ("tu", "tl", "mu"):
            value = getattr(self, name)
            if value is None or not value >= 0 or not math.isfinite(value):
                raise ConfigError(f"loss parameter {name} must be finite and nonnegative, got {value}")
        if self.tu > 1 or self.tl > 1:
            raise ConfigError("tu and tl are transmittance products and must not exceed 1")


@dataclass(frozen=True)
class NoiseModel:
    """Background click probabilities per pulse: ``d_U = A P^2 + B P + C``, ``d_L = D P + E``."""

    du_coeffs: tuple = (0.0, 0.0, 0.0)
    dl_coeffs: tuple = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "du_coeffs", tuple(float(c) for c in self.du_coeffs))
        object.__setattr__(self, "dl_coeffs", tuple(float(c) for c in self.dl_coeffs))
        if len(self.du_coeffs) != 3 or len(self.dl_coeffs) != 2:
            raise ConfigError("noise model needs 3 coefficients for d_U and 2 for d_L")

    @classmethod
    def from_percent(cls, du_coeffs, dl_coeffs) -> "NoiseModel":
        """Build from coefficients that give the click probability in percent."""
        return cls(tuple(c / 100.0 for c in du_coeffs), tuple(c / 100.0 for c in dl_coeffs))

    def d_u(self, power: float) -> float:
        a, b, c = self.du_coeffs
        return _probability(a * power**2 + b * power + c, "d_U", power)

    def d_l(self, power: float) -> float:
        d, e = self.dl_coeffs
        return _probability(d * power + e, "d_L", power)

    def in_range(self, p_max: float = 300.0, n: int = 301) -> bool:
        a, b, c = self.du_coeffs
        d, e = self.dl_coeffs
        for i in range(n):
            p = p_max * i / (n - 1)
            if not (0 <= a * p * p + b * p + c <= 1 and 0 <= d * p + e <= 1):
                return False
        return True


def _probability(value, name, power):
    if value < 0.0 or value > 1.0:
        if value < -1e-12 or value > 1.0 + 1e-12:
            warnings.warn(f"{name}({power} mW) = {value:.6g} clipped to [0, 1]", RuntimeWarning, stacklevel=3)
        value = min(max(value, 0.0), 1.0)
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything the count-rate and coincidence models need.

    ``convention`` fixes how the quoted bandwidths map to Gaussian widths;
    it only sets the scale of the delay axis.
    """

    bandwidths: Bandwidths
    budget: LossBudget
    pump: PumpCurve
    noise: NoiseModel = field(default_factory=NoiseModel)
    input_kind: str = "coherent"
    convention: str = "fwhm"

    def __post_init__(self):
        for name in ("bandwidths", "budget", "pump", "noise"):
            if getattr(self, name) is None:
                raise ConfigError(f"configuration is missing {name}")
        if self.input_kind not in INPUT_KINDS:
            raise ConfigError(f"input_kind must be one of {INPUT_KINDS}, got {self.input_kind!r}")
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"unknown bandwidth convention {self.convention!r}")

    def transition(self, power: float) -> float:
        return transition_peak(self.pump, power)


WHATIFS = ("none", "single-photon", "bandwidth", "both")


def apply_whatif(config: ExperimentConfig, whatif: str) -> ExperimentConfig:
    """Return ``config`` with improved inputs.

    ``single-photon``: the lower coherent pulse becomes a single photon with
    ``T_in,L / T_in,U = 1``.  ``bandwidth``: the upper input spectrum is
    narrowed to the lower one's width.  ``both`` applies the two.
    """
    if whatif not in WHATIFS:
        raise ConfigError(f"unknown what-if {whatif!r}; expected one of {WHATIFS}")
    if whatif in ("single-photon", "both"):
        config = replace(config, input_kind="single-photon", budget=replace(config.budget, mu=1.0))
    if whatif in ("bandwidth", "both"):
        config = replace(config, bandwidths=replace(config.bandwidths, in_u=config.bandwidths.in_l))
    return config
