"""The partial frequency converter as a beamsplitter between two frequency modes."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectra import GaussianProfile


@dataclass(frozen=True)
class BeamsplitterAngle:
    """Interaction strength ``|g| * t_int`` (rad) and pump phase (rad)."""

    mixing: float
    phase: float = 0.0

    @classmethod
    def from_transition(cls, probability: float, phase: float = 0.0) -> "BeamsplitterAngle":
        if not 0.0 <= probability <= 1.0:
            raise DomainError(f"transition probability must lie in [0, 1], got {probability}")
        return cls(math.asin(math.sqrt(probability)), phase)

    @property
    def transition(self) -> float:
        return math.sin(self.mixing) ** 2

    @property
    def staying(self) -> float:
        return math.cos(self.mixing) ** 2


def bs_map(angle: BeamsplitterAngle) -> np.ndarray:
    """Two-mode transfer matrix of the converter, (upper, lower) ordering.

    Row ``k`` gives output annihilation operator ``k`` in terms of the input
    ones.  The same matrix maps single-photon amplitude vectors from input
    to output.
    """
    c, s = math.cos(angle.mixing), math.sin(angle.mixing)
    e = complex(math.cos(angle.phase), math.sin(angle.phase))
    return np.array([[c, -e * s], [e.conjugate() * s, c]], dtype=complex)


@dataclass(frozen=True)
class PumpCurve:
    """Peak transition probability versus pump power, ``A * sin(sqrt(eta * P))**2``."""

    amplitude: float
    rate: float  # 1/mW

    def __post_init__(self):
        if self.amplitude < 0:
            raise DomainError("pump-curve amplitude must be nonnegative")
        if self.rate < 0:
            raise DomainError("pump-curve rate must be nonnegative")


def transition_peak(curve: PumpCurve, power: float) -> float:
    """Peak internal transition probability at ``power`` mW, clamped to [0, 1]."""
    if power < 0:
        raise DomainError(f"pump power must be nonnegative, got {power}")
    value = curve.amplitude * math.sin(math.sqrt(curve.rate * power)) ** 2
    if value > 1.0:
        warnings.warn(f"transition probability {value:.6g} exceeds 1 at {power} mW; clamped", RuntimeWarning,
                      stacklevel=2)
        value = 1.0
    return value


@dataclass(frozen=True)
class ConverterResponse:
    """Spectral transition probability ``R(P, nu)``: a Gaussian of peak ``R~(P)``."""

    peak: float
    bandwidth: float
    center: float = 0.0
    convention: str = "fwhm"

    def __post_init__(self):
        if not 0.0 <= self.peak <= 1.0:
            raise DomainError(f"converter peak must lie in [0, 1], got {self.peak}")

    def profile(self) -> GaussianProfile:
        return GaussianProfile(self.bandwidth, self.center, self.peak, self.convention)


def response_at(resp: ConverterResponse, detuning):
    """Transition probability ``R`` at ``detuning`` GHz."""
    return resp.profile()(detuning)


def staying_at(resp: ConverterResponse, detuning):
    """Staying probability ``T = 1 - R`` at ``detuning`` GHz."""
    return 1.0 - response_at(resp, detuning)
