"""Gaussian spectral profiles and the frequency integrals built from them.

Frequencies are detunings in GHz from a band center and delays are in ps, so
the delay phase of a component at detuning ``nu`` is ``exp(-2j*pi*nu*tau*1e-3)``.

Every integral the interference model needs has the form::

    integral dnu  exp(-2j pi nu tau) * prod_k G_k(nu)**p_k * sqrt(1 - C(nu))

with Gaussian ``G_k`` and an optional Gaussian ``C`` (the converter response
inside the staying amplitude).  Without ``C`` the integral is a single
Gaussian moment.  With ``C`` the square root is expanded in its binomial
series, each term again a Gaussian product, which gives a rapidly convergent
closed-form sum as long as the peak of ``C`` is not too close to one.
:func:`quadrature_oracle` evaluates the same integrand by adaptive quadrature
and is kept independent of the series path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureError

LN2 = math.log(2.0)

# width / sigma for each way of quoting a Gaussian bandwidth
CONVENTIONS = {
    "fwhm": 2.0 * math.sqrt(2.0 * LN2),  # full width at half maximum
    "hwhm": math.sqrt(2.0 * LN2),  # half width at half maximum
    "1/e": math.sqrt(2.0),  # half width at 1/e, i.e. exp(-nu**2 / width**2)
    "1/e2": 2.0,  # half width at 1/e**2
    "rms": 1.0,
}

PS_TO_NS = 1e-3

# series peak above which the binomial expansion of sqrt(1 - C) is abandoned
SERIES_PEAK_LIMIT = 1.0 - 1e-4


def sigma_from_width(width: float, convention: str = "fwhm") -> float:
    """Standard deviation of a Gaussian quoted as ``width`` under ``convention``."""
    try:
        divisor = CONVENTIONS[convention]
    except KeyError:
        raise DomainError(
            f"unknown bandwidth convention {convention!r}; expected one of {sorted(CONVENTIONS)}"
        ) from None
    return width / divisor


@dataclass(frozen=True)
class GaussianProfile:
    """A Gaussian function of detuning.

    ``width`` is the bandwidth in GHz, interpreted according to ``convention``.
    An infinite width gives a flat profile.  For a normalized spectral density
    (``normalized=True``) the peak is derived so that the profile integrates
    to one and the ``peak`` field is ignored.
    """

    width: float
    center: float = 0.0
    peak: float = 1.0
    convention: str = "fwhm"
    normalized: bool = False

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"profile width must be positive, got {self.width}")
        if self.normalized and math.isinf(self.width):
            raise DomainError("a normalized density needs a finite width")
        if self.peak < 0:
            raise DomainError(f"profile peak must be nonnegative, got {self.peak}")
        sigma_from_width(1.0, self.convention)

    @classmethod
    def density(cls, width: float, center: float = 0.0, convention: str = "fwhm") -> "GaussianProfile":
        return cls(width=width, center=center, convention=convention, normalized=True)

    @property
    def sigma(self) -> float:
        return sigma_from_width(self.width, self.convention)

    @property
    def height(self) -> float:
        if self.normalized:
            return 1.0 / (self.sigma * math.sqrt(2.0 * math.pi))
        return self.peak

    @property
    def is_flat(self) -> bool:
        return math.isinf(self.width)

    def __call__(self, nu):
        nu = np.asarray(nu, dtype=float)
        if self.is_flat:
            out = np.full_like(nu, self.height)
        else:
            out = self.height * np.exp(-0.5 * ((nu - self.center) / self.sigma) ** 2)
        return out if out.ndim else float(out)

    def with_peak(self, peak: float) -> "GaussianProfile":
        return GaussianProfile(self.width, self.center, peak, self.convention, False)


@dataclass(frozen=True)
class OverlapSpec:
    """Integrand description for :func:`interference_integral`.

    ``terms`` pairs each profile with its exponent (``0.5`` for amplitude
    factors, ``1`` for intensity factors).  ``complement``, if given,
    contributes ``sqrt(1 - complement(nu))``.  ``delay`` is in ps.
    """

    terms: tuple = ()
    delay: float = 0.0
    complement: GaussianProfile | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((p, float(e)) for p, e in self.terms))
        if not self.terms:
            raise DomainError("an overlap needs at least one profile")
        if not math.isfinite(self.delay):
            raise DomainError("delay must be finite")
        for _, exponent in self.terms:
            if exponent <= 0:
                raise DomainError("profile exponents must be positive")
        if self.complement is not None and self.complement.peak > 1.0:
            raise DomainError("complement peak must not exceed 1")

    def with_delay(self, delay: float) -> "OverlapSpec":
        return OverlapSpec(self.terms, delay, self.complement)

    def integrand(self, nu):
        """Real, delay-free part of the integrand."""
        nu = np.asarray(nu, dtype=float)
        value = np.ones_like(nu)
        for profile, exponent in self.terms:
            value = value * profile(nu) ** exponent
        if self.complement is not None:
            value = value * np.sqrt(np.clip(1.0 - self.complement(nu), 0.0, None))
        return value


def overlap_ratio(widths: Iterable[tuple[float, str]]) -> float:
    """Closed-form value of ``integral F(nu) prod_k g_k(nu) dnu``.

    ``widths`` lists ``(width, role)`` pairs; exactly one entry has role
    ``"input"`` (the normalized density ``F``) and the others role
    ``"weight"`` (unit-peak Gaussians ``g_k``, flat if the width is infinite).
    All widths must share one convention; the result depends only on their
    ratios::

        1 / sqrt(1 + sum_k width_in**2 / width_k**2)
    """
    widths = list(widths)
    inputs = [w for w, role in widths if role == "input"]
    weights = [w for w, role in widths if role == "weight"]
    if len(inputs) != 1 or len(inputs) + len(weights) != len(widths):
        raise DomainError("overlap_ratio needs exactly one 'input' width and any number of 'weight' widths")
    for w in inputs + weights:
        if not w > 0:
            raise DomainError(f"widths must be positive, got {w}")
    w_in = inputs[0]
    if math.isinf(w_in):
        raise DomainError("the input density needs a finite width")
    total = 1.0 + sum((w_in / w) ** 2 for w in weights)
    return 1.0 / math.sqrt(total)


def _moments(terms: Sequence[tuple[GaussianProfile, float]]):
    """Precision, linear and quadratic coefficients and log-height of a Gaussian product."""
    precision = linear = quadratic = 0.0
    log_height = 0.0
    for profile, exponent in terms:
        if profile.height == 0.0:
            return None
        log_height += exponent * math.log(profile.height)
        if profile.is_flat:
            continue
        w = exponent / profile.sigma**2
        precision += w
        linear += w * profile.center
        quadratic += w * profile.center**2
    return precision, linear, quadratic, log_height


def _binomial_sqrt_coefficients(x: float) -> np.ndarray:
    """``c_n x**n`` for ``sqrt(1 - x) = sum_n c_n x**n``, truncated below 1e-18."""
    n_terms = int(math.ceil(math.log(1e-18) / math.log(x))) + 2 if x > 0 else 1
    n = np.arange(1, n_terms)
    ratios = (n - 1.5) / n * x
    return np.concatenate(([1.0], np.cumprod(ratios)))


def interference_integral(spec: OverlapSpec) -> complex:
    """Closed-form value of the frequency integral described by ``spec``."""
    moments = _moments(spec.terms)
    if moments is None:
        return 0j
    precision, linear, quadratic, log_height = moments

    comp = spec.complement
    if comp is None or comp.peak == 0.0:
        coeffs = np.array([1.0])
        c_prec = c_lin = c_quad = 0.0
    elif comp.is_flat:
        log_height += 0.5 * math.log1p(-comp.peak) if comp.peak < 1.0 else -math.inf
        coeffs = np.array([1.0])
        c_prec = c_lin = c_quad = 0.0
    elif comp.peak > SERIES_PEAK_LIMIT:
        # series converges too slowly this close to complete conversion
        return quadrature_oracle(spec)
    else:
        coeffs = _binomial_sqrt_coefficients(comp.peak)
        c_prec = 1.0 / comp.sigma**2
        c_lin = comp.center * c_prec
        c_quad = comp.center**2 * c_prec

    if precision == 0.0 and c_prec == 0.0:
        raise DomainError("integrand has no finite-width factor; the integral diverges")
    if not math.isfinite(log_height):
        return 0j

    n = np.arange(coeffs.size)
    prec_n = precision + n * c_prec
    if prec_n[0] == 0.0:
        raise DomainError("integrand has no finite-width factor; the integral diverges")
    lin_n = linear + n * c_lin
    quad_n = quadratic + n * c_quad
    mean_n = lin_n / prec_n
    t = spec.delay * PS_TO_NS
    magnitude = (
        coeffs
        * np.sqrt(2.0 * math.pi / prec_n)
        * np.exp(-0.5 * (quad_n - lin_n * mean_n) - 2.0 * math.pi**2 * t**2 / prec_n)
    )
    if t == 0.0:
        value = complex(magnitude[::-1].sum())
    else:
        value = complex((magnitude * np.exp(-2j * math.pi * mean_n * t))[::-1].sum())
    return math.exp(log_height) * value


def _window(spec: OverlapSpec, half_widths: float = 8.0) -> tuple[float, float, list[float]]:
    precision = linear = 0.0
    for profile, exponent in spec.terms:
        if not profile.is_flat:
            precision += exponent / profile.sigma**2
            linear += exponent * profile.center / profile.sigma**2
    comp = spec.complement
    if precision == 0.0:
        if comp is None or comp.is_flat:
            raise DomainError("integrand has no finite-width factor; the integral diverges")
        # only the converter response localizes the integrand
        precision = 1.0 / comp.sigma**2
        linear = comp.center * precision
    center = linear / precision
    half = half_widths / math.sqrt(precision)
    lo, hi = center - half, center + half
    breaks = []
    if comp is not None and not comp.is_flat:
        for k in (-3.0, 0.0, 3.0):
            b = comp.center + k * comp.sigma
            if lo < b < hi:
                breaks.append(b)
    return lo, hi, breaks


def quadrature_oracle(spec: OverlapSpec, epsabs: float = 1e-13, epsrel: float = 1e-11, limit: int = 400) -> complex:
    """Adaptive-quadrature evaluation of the same integral as :func:`interference_integral`.

    Integrates over a window of +-8 combined standard deviations around the
    envelope center, splitting at the converter-response peak so narrow
    features are resolved.  Oscillatory delay phases use QUADPACK's weighted
    (QAWO) routine.
    """
    lo, hi, breaks = _window(spec)
    edges = [lo, *breaks, hi]
    f = lambda nu: float(spec.integrand(nu))
    t = spec.delay * PS_TO_NS
    omega = 2.0 * math.pi * abs(t)

    real = imag = 0.0
    abserr = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if omega == 0.0:
            out = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
            real += out[0]
            abserr += out[1]
            _check(out, a, b, "real")
        else:
            out_c = integrate.quad(f, a, b, weight="cos", wvar=omega, epsabs=epsabs, epsrel=epsrel,
                                   limit=limit, full_output=1)
            out_s = integrate.quad(f, a, b, weight="sin", wvar=omega, epsabs=epsabs, epsrel=epsrel,
                                   limit=limit, full_output=1)
            _check(out_c, a, b, "cos")
            _check(out_s, a, b, "sin")
            real += out_c[0]
            imag -= out_s[0]
            abserr += out_c[1] + out_s[1]

    scale = max(abs(real), abs(imag))
    if abserr > max(10 * epsabs * len(edges), 1e-9 * scale):
        raise QuadratureError(
            "quadrature error estimate above tolerance",
            {"abserr": abserr, "value": complex(real, imag), "window": (lo, hi), "delay": spec.delay},
        )
    if t < 0:
        imag = -imag
    return complex(real, imag)


def _check(out, a, b, part):
    if len(out) > 3:
        message = out[3]
        # QUADPACK also reports benign notes; only roundoff/subdivision failures matter
        if "roundoff" in message or "subdivisions" in message or "divergent" in message:
            raise QuadratureError(message.strip().splitlines()[0],
                                  {"interval": (a, b), "part": part, "value": out[0], "abserr": out[1]})
