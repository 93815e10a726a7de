"""Single-arm count rates per pulse versus pump power."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError
from .params import Bandwidths, ExperimentConfig, LossBudget

PLS_READINGS = ("consistent", "verbatim")


@dataclass(frozen=True)
class CountRates:
    """Detection probabilities per pulse at one pump power.

    ``p_ut``/``p_us``: upper-input photon found converted/unconverted;
    ``p_lt``/``p_ls``: the same for the lower input.
    """

    power: float
    p_ut: float
    p_us: float
    p_lt: float
    p_ls: float

    def __post_init__(self):
        for name in ("p_ut", "p_us", "p_lt", "p_ls"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} = {value} is not a probability")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_ut, self.p_us, self.p_lt, self.p_ls)


def rates_from_transition(
    r_tilde: float,
    budget: LossBudget,
    bandwidths: Bandwidths,
    power: float = math.nan,
    pls_reading: str = "consistent",
) -> CountRates:
    """Count rates for a given peak transition probability ``r_tilde``.

    ``pls_reading="verbatim"`` replaces the staying overlap in ``p_ls`` by
    ``1 / (1 + width_in_l / width_out_l)``; the default uses the same
    ``1 / sqrt(1 + width_in_l**2 / width_out_l**2)`` form as ``p_us``.
    """
    if not 0.0 <= r_tilde <= 1.0:
        raise DomainError(f"transition probability must lie in [0, 1], got {r_tilde}")
    if pls_reading not in PLS_READINGS:
        raise DomainError(f"pls_reading must be one of {PLS_READINGS}")
    f = bandwidths.factors()
    ls0 = f.ls0 if pls_reading == "consistent" else 1.0 / (1.0 + bandwidths.in_l / bandwidths.out_l)
    tu, tl, mu = budget.tu, budget.tl, budget.mu
    return CountRates(
        power=power,
        p_ut=tl * r_tilde * f.ut,
        p_us=tu * (f.us0 - r_tilde * f.us1),
        p_lt=mu * tu * r_tilde * f.lt,
        p_ls=mu * tl * (ls0 - r_tilde * f.ls1),
    )


def predict_rates(
    config: ExperimentConfig,
    power: float,
    r_tilde: float | None = None,
    pls_reading: str = "consistent",
) -> CountRates:
    """The four count rates at ``power`` mW (``r_tilde`` overrides the pump curve)."""
    if config is None:
        raise ConfigError("no configuration given")
    if power < 0:
        raise DomainError(f"pump power must be nonnegative, got {power}")
    if r_tilde is None:
        r_tilde = config.transition(power)
    return rates_from_transition(r_tilde, config.budget, config.bandwidths, power, pls_reading)


def rate_curve(config: ExperimentConfig, powers) -> list[CountRates]:
    return [predict_rates(config, p) for p in powers]
