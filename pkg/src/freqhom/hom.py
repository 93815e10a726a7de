"""Coincidence probability, visibility and dip shape of the frequency-domain HOM experiment.

The upper input is a single photon; the lower input is either a weak
coherent pulse or a second single photon, delayed by ``tau``.  Both pass
input loss, the converter and the output filters, and each output band ends
on a detector with background click probability ``d``.  The coincidence
probability follows from the three no-click probabilities by
inclusion-exclusion::

    p_c = 1 - p_U0 - p_L0 + p_U0L0

Each no-click probability is a delay-independent part built from the
Gaussian overlap factors plus ``mu |J|**2``, where ``J`` is the spectral
overlap of the two converted/unconverted wavepackets in the relevant output
band(s).  Only ``J`` depends on the delay, so ``p_c(inf)`` is obtained by
setting it to zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateConfigError, DomainError
from .params import WHATIFS, ExperimentConfig, apply_whatif
from .spectra import CONVENTIONS, GaussianProfile, OverlapSpec, interference_integral


@dataclass(frozen=True)
class NoClick:
    p_u0: float
    p_l0: float
    p_u0l0: float

    @property
    def coincidence(self) -> float:
        return 1.0 - self.p_u0 - self.p_l0 + self.p_u0l0


@dataclass(frozen=True)
class DipCurve:
    delays: tuple
    p_c: tuple
    p_c_inf: float
    visibility: float
    fwhm: float


def overlap_specs(config: ExperimentConfig, r_tilde: float, delay: float = 0.0) -> tuple[OverlapSpec, OverlapSpec]:
    """Integrands of the upper- and lower-band interference amplitudes (unit filter peaks)."""
    bw, conv = config.bandwidths, config.convention
    f_u = GaussianProfile.density(bw.in_u, convention=conv)
    f_l = GaussianProfile.density(bw.in_l, convention=conv)
    resp = GaussianProfile(bw.wg, peak=r_tilde, convention=conv)
    amp = [(f_u, 0.5), (f_l, 0.5), (resp, 0.5)]
    g_u = GaussianProfile(bw.out_u, convention=conv)
    g_l = GaussianProfile(bw.out_l, convention=conv)
    return (OverlapSpec(amp + [(g_u, 1.0)], delay, resp), OverlapSpec(amp + [(g_l, 1.0)], delay, resp))


def interference_amplitudes(config, r_tilde, delay, phase=0.0, integrator=interference_integral):
    """``(J_U, J_L)``: loss-scaled two-photon overlaps in the upper and lower bands."""
    if r_tilde == 0.0:
        return 0j, 0j
    spec_u, spec_l = overlap_specs(config, r_tilde, delay)
    rot = cmath.exp(1j * phase)
    return (rot * config.budget.tu * integrator(spec_u), rot * config.budget.tl * integrator(spec_l))


def no_click_probs(
    config: ExperimentConfig,
    power: float,
    delay: float = 0.0,
    *,
    r_tilde: float | None = None,
    phase: float = 0.0,
    interference: bool = True,
    integrator=interference_integral,
) -> NoClick:
    """``(p_U0, p_L0, p_U0L0)`` at pump ``power`` mW and lower-input ``delay`` ps.

    ``interference=False`` drops the delay-dependent overlap terms, which is
    the exact ``|delay| -> inf`` limit.
    """
    if power < 0:
        raise DomainError(f"pump power must be nonnegative, got {power}")
    r = config.transition(power) if r_tilde is None else r_tilde
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"transition probability must lie in [0, 1], got {r}")
    d_u, d_l = config.noise.d_u(power), config.noise.d_l(power)
    f = config.bandwidths.factors()
    tu, tl, mu = config.budget.tu, config.budget.tl, config.budget.mu

    # click probabilities of the upper photon in each band, and of the lower input per unit mu
    x_u = tu * (f.us0 - r * f.us1)
    x_l = tl * r * f.ut
    y_u = tu * r * f.lt
    y_l = tl * (f.ls0 - r * f.ls1)

    if interference:
        j_u, j_l = interference_amplitudes(config, r, delay, phase, integrator)
    else:
        j_u = j_l = 0j
    i_u, i_l, i_ul = abs(j_u) ** 2, abs(j_l) ** 2, abs(j_u - j_l) ** 2

    if config.input_kind == "coherent":
        p_u0 = math.exp(-mu * y_u) * (1.0 - x_u + mu * i_u)
        p_l0 = math.exp(-mu * y_l) * (1.0 - x_l + mu * i_l)
        p_u0l0 = math.exp(-mu * (y_u + y_l)) * (1.0 - x_u - x_l + mu * i_ul)
    else:
        p_u0 = (1.0 - x_u) * (1.0 - mu * y_u) + mu * i_u
        p_l0 = (1.0 - x_l) * (1.0 - mu * y_l) + mu * i_l
        p_u0l0 = (1.0 - x_u - x_l) * (1.0 - mu * (y_u + y_l)) + mu * i_ul
    return NoClick((1.0 - d_u) * p_u0, (1.0 - d_l) * p_l0, (1.0 - d_u) * (1.0 - d_l) * p_u0l0)


def coincidence(config: ExperimentConfig, power: float, delay: float = 0.0, **kwargs) -> float:
    """Coincidence probability ``p_c`` per pulse at ``delay`` ps."""
    return no_click_probs(config, power, delay, **kwargs).coincidence


def coincidence_limit(config: ExperimentConfig, power: float, **kwargs) -> float:
    """``p_c`` at infinite delay."""
    return no_click_probs(config, power, 0.0, interference=False, **kwargs).coincidence


def visibility(config: ExperimentConfig, power: float, **kwargs) -> float:
    """Dip visibility ``1 - p_c(0) / p_c(inf)``."""
    p_inf = coincidence_limit(config, power, **kwargs)
    if not p_inf > 0:
        raise DegenerateConfigError("p_c(inf) = 0; visibility undefined")
    return 1.0 - coincidence(config, power, 0.0, **kwargs) / p_inf


def symmetric_delays(tau_range, n_points: int) -> np.ndarray:
    """``n_points`` delays on a symmetric range; exact zero at the center for odd counts."""
    lo, hi = (float(x) for x in tau_range)
    if n_points < 3:
        raise DomainError("a dip scan needs at least 3 points")
    if not hi > 0 or abs(lo + hi) > 1e-12 * hi:
        raise DomainError(f"delay range ({lo}, {hi}) must be symmetric about zero")
    k = np.arange(n_points)
    return hi * (2 * k - (n_points - 1)) / (n_points - 1)


def _half_crossing(delays, depth, half):
    """First delay beyond which the dip depth falls to ``half``, by linear interpolation."""
    for i in range(1, len(delays)):
        if depth[i] <= half:
            d0, d1 = depth[i - 1], depth[i]
            t0, t1 = delays[i - 1], delays[i]
            return t0 + (d0 - half) / (d0 - d1) * (t1 - t0) if d0 != d1 else t1
    return math.nan


def dip_width(delays, p_c, p_c_zero, p_c_inf) -> float:
    """Full width of the dip at half its depth; ``nan`` if there is no dip or it is not resolved."""
    depth0 = p_c_inf - p_c_zero
    if not depth0 > 0:
        return math.nan
    delays = np.asarray(delays, dtype=float)
    depth = p_c_inf - np.asarray(p_c, dtype=float)
    half = 0.5 * depth0
    right = delays > 0
    left = delays < 0
    t_r = _half_crossing(np.r_[0.0, delays[right]], np.r_[depth0, depth[right]], half)
    t_l = _half_crossing(np.r_[0.0, -delays[left][::-1]], np.r_[depth0, depth[left][::-1]], half)
    return t_r + t_l


def dip_scan(config: ExperimentConfig, power: float, tau_range=(-20.0, 20.0), n_points: int = 401) -> DipCurve:
    """Sample ``p_c`` over a symmetric delay range and measure the dip."""
    delays = symmetric_delays(tau_range, n_points)
    p_c = [coincidence(config, power, float(t)) for t in delays]
    p_inf = coincidence_limit(config, power)
    p_zero = coincidence(config, power, 0.0)
    vis = 1.0 - p_zero / p_inf if p_inf > 0 else math.nan
    return DipCurve(tuple(delays.tolist()), tuple(p_c), p_inf, vis, dip_width(delays, p_c, p_zero, p_inf))


def visibility_sweep(config: ExperimentConfig, powers) -> list[tuple[float, float]]:
    """``(P, V)`` pairs over the given pump powers."""
    out = []
    for p in powers:
        if p < 0:
            raise DomainError(f"pump power must be nonnegative, got {p}")
        out.append((float(p), visibility(config, float(p))))
    return out


def peak_visibility(config: ExperimentConfig, p_max: float = 350.0, step: float = 1.0) -> tuple[float, float]:
    """Location and value of the highest visibility on ``[0, p_max]`` mW (grid, then golden-section refine)."""
    from scipy.optimize import minimize_scalar

    grid = np.arange(0.0, p_max + 0.5 * step, step)
    values = [v for _, v in visibility_sweep(config, grid)]
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    if hi == lo:
        return float(grid[i]), float(values[i])
    res = minimize_scalar(lambda p: -visibility(config, p), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-6})
    if -res.fun >= values[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(values[i])


def whatif_visibilities(config: ExperimentConfig, power: float) -> dict[str, float]:
    return {w: visibility(apply_whatif(config, w), power) for w in WHATIFS}


def convention_sensitivity(config: ExperimentConfig, power: float, tau_max: float = 40.0,
                           n_points: int = 801) -> list[tuple[str, float, float]]:
    """Dip FWHM and visibility under every bandwidth convention.

    The visibility is convention-independent; the delay axis scales inversely
    with the Gaussian widths the quoted bandwidths are taken to mean.
    """
    rows = []
    for name in CONVENTIONS:
        dip = dip_scan(replace(config, convention=name), power, (-tau_max, tau_max), n_points)
        rows.append((name, dip.fwhm, dip.visibility))
    return rows
