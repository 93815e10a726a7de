"""Inversion of measured count rates and the pump-curve / background-noise fits.

Per pump power the four rates determine the peak transition probability
``R~`` through a quadratic, and then the loss budget in closed form.  The
ratio ``Q = p_ut p_lt / (p_us p_ls)`` is independent of every loss factor::

    Q = R~**2 ut lt / ((us0 - R~ us1) (ls0 - R~ ls1))

which rearranges to ``a R~**2 + b R~ + c = 0`` with

    a = ut lt - Q us1 ls1,  b = Q (us0 ls1 + us1 ls0),  c = -Q us0 ls0

(overlap factors as in :class:`freqhom.params.OverlapFactors`).  The
``form="verbatim"`` switch selects an alternative coefficient set (inverted
rate ratio and a different second term in ``b``); it fails the
forward/inverse round trip and is kept for comparison.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .converter import PumpCurve
from .errors import ConfigError, DegenerateInputError, FitError, InconsistentDataError, UnphysicalDataError
from .forward import CountRates, rates_from_transition
from .params import Bandwidths, LossBudget, NoiseModel

ROOT_TOLERANCE = 1e-6
FORMS = ("derived", "verbatim")


@dataclass(frozen=True)
class QuadraticCoefficients:
    a: float
    b: float
    c: float

    @property
    def discriminant(self) -> float:
        return self.b * self.b - 4.0 * self.a * self.c

    def roots(self) -> tuple[float, float]:
        """``((-b + sqrt(D)) / 2a, (-b - sqrt(D)) / 2a)`` evaluated without cancellation."""
        sq = math.sqrt(self.discriminant)
        q = -0.5 * (self.b + math.copysign(sq, self.b))
        if q == 0.0:
            return (0.0, 0.0)
        other = q / self.a if self.a != 0.0 else math.inf
        first = self.c / q
        return (first, other) if self.b >= 0 else (other, first)


def quadratic_coefficients(rates: CountRates, bandwidths: Bandwidths, form: str = "derived") -> QuadraticCoefficients:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    f = bandwidths.factors()
    if form == "derived":
        if rates.p_us <= 0 or rates.p_ls <= 0:
            raise DegenerateInputError("p_us and p_ls must be positive")
        q = rates.p_ut * rates.p_lt / (rates.p_us * rates.p_ls)
        return QuadraticCoefficients(
            a=f.ut * f.lt - q * f.us1 * f.ls1,
            b=q * (f.us0 * f.ls1 + f.us1 * f.ls0),
            c=-q * f.us0 * f.ls0,
        )
    if rates.p_us <= 0 or rates.p_lt <= 0:
        raise DegenerateInputError("p_us and p_lt must be positive")
    q = rates.p_ut * rates.p_ls / (rates.p_us * rates.p_lt)
    bw = bandwidths
    odd = 1.0 / math.sqrt((1 + bw.in_l**2 / bw.out_l**2) * (1 + bw.out_l**2 / bw.wg**2 + bw.out_l**2 / bw.in_l**2))
    return QuadraticCoefficients(
        a=f.ut * f.lt - q * f.us1 * f.ls1,
        b=q * (f.us0 * f.ls1 + odd),
        c=-q * f.us0 * f.ls0,
    )


def estimate_transition(rates: CountRates, bandwidths: Bandwidths, form: str = "derived") -> float:
    """Peak transition probability ``R~`` from one quartet of count rates."""
    coeffs = quadratic_coefficients(rates, bandwidths, form)
    if coeffs.b == 0.0 and coeffs.c == 0.0:
        return 0.0
    if abs(coeffs.a) < 1e-12 * abs(coeffs.b):
        root = -coeffs.c / coeffs.b
    else:
        if coeffs.discriminant < 0:
            raise InconsistentDataError(f"negative discriminant {coeffs.discriminant:.3g}; rates admit no real R~")
        root = coeffs.roots()[0]
    if not -ROOT_TOLERANCE <= root <= 1.0 + ROOT_TOLERANCE:
        raise UnphysicalDataError(f"estimated transition probability {root:.6g} outside [0, 1]")
    return min(max(root, 0.0), 1.0)


def transition_gradient(rates: CountRates, bandwidths: Bandwidths) -> dict[str, float]:
    """First-order sensitivity ``dR~/dp`` of the estimate to each rate."""
    r = estimate_transition(rates, bandwidths)
    coeffs = quadratic_coefficients(rates, bandwidths)
    f = bandwidths.factors()
    q = rates.p_ut * rates.p_lt / (rates.p_us * rates.p_ls)
    dr_dq = (f.us0 - f.us1 * r) * (f.ls0 - f.ls1 * r) / (2.0 * coeffs.a * r + coeffs.b)
    return {
        "p_ut": dr_dq * q / rates.p_ut if rates.p_ut else math.nan,
        "p_us": -dr_dq * q / rates.p_us,
        "p_lt": dr_dq * q / rates.p_lt if rates.p_lt else math.nan,
        "p_ls": -dr_dq * q / rates.p_ls,
    }


def transition_stderr(rates: CountRates, bandwidths: Bandwidths, trials: float) -> float:
    """Poisson standard error of ``R~`` when each rate was measured over ``trials`` pulses."""
    grad = transition_gradient(rates, bandwidths)
    var = sum(grad[k] ** 2 * getattr(rates, k) / trials for k in grad)
    return math.sqrt(var)


def estimate_losses(rates: CountRates, r_tilde: float, bandwidths: Bandwidths) -> LossBudget:
    """The three loss products given ``R~`` and the rates at the same power."""
    if not r_tilde > 0:
        raise DegenerateInputError("R~ = 0 leaves T_in,U T~_out,L undetermined")
    if rates.p_ut <= 0:
        raise DegenerateInputError("p_ut must be positive")
    f = bandwidths.factors()
    stay_u = f.us0 - r_tilde * f.us1
    stay_l = f.ls0 - r_tilde * f.ls1
    if stay_u <= 0 or stay_l <= 0:
        raise DegenerateInputError("staying overlap vanishes; the loss formulas are singular")
    try:
        return LossBudget(
            tu=rates.p_us / stay_u,
            tl=rates.p_ut / (r_tilde * f.ut),
            mu=rates.p_ls / rates.p_ut * r_tilde * f.ut / stay_l,
        )
    except ConfigError as exc:
        raise UnphysicalDataError(str(exc)) from None


# --- pump curve -----------------------------------------------------------


@dataclass(frozen=True)
class PumpFit:
    curve: PumpCurve
    residuals: tuple
    residual_norm: float
    n_starts: int


def _pump_residuals(params, powers, values):
    amp, k = params
    return amp * np.sin(k * np.sqrt(powers)) ** 2 - values


def _pump_jacobian(params, powers, values):
    amp, k = params
    root = np.sqrt(powers)
    return np.column_stack((np.sin(k * root) ** 2, amp * np.sin(2 * k * root) * root))


def pump_cost(curve: PumpCurve, samples) -> float:
    """Half the sum of squared residuals of ``curve`` against ``(P, R~)`` samples."""
    powers, values = _split(samples)
    r = _pump_residuals((curve.amplitude, math.sqrt(curve.rate)), powers, values)
    return 0.5 * float(r @ r)


def _split(samples):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (power, value) pairs")
    return arr[:, 0], arr[:, 1]


def fit_pump_curve(samples, max_nfev: int = 2000) -> PumpFit:
    """Least-squares fit of ``A sin(sqrt(eta P))**2`` to ``(P, R~)`` samples.

    Fits ``(A, sqrt(eta))`` with Levenberg-Marquardt from the small-angle
    initial guess and five perturbations of it; the lowest-cost converged
    solution wins.
    """
    powers, values = _split(samples)
    if np.unique(powers).size < 3:
        raise ValueError("need at least 3 samples at distinct powers")
    if np.any(powers < 0):
        raise ValueError("powers must be nonnegative")

    amp0 = min(float(values.max()), 1.0)
    if amp0 <= 0:
        raise FitError("all transition samples are zero", best=PumpCurve(0.0, 0.0))
    positive = np.flatnonzero(powers > 0)
    i0 = positive[np.argmin(powers[positive])]
    eta0 = max(values[i0], 1e-12) / (amp0 * powers[i0])

    best = None
    for scale in (1.0, 0.5, 0.75, 1.5, 2.0, 3.0):
        start = (amp0, math.sqrt(eta0 * scale))
        try:
            sol = optimize.least_squares(_pump_residuals, start, jac=_pump_jacobian, args=(powers, values),
                                         method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        except (ValueError, np.linalg.LinAlgError):
            continue
        if best is None or (sol.status > 0 and (best.status <= 0 or sol.cost < best.cost)):
            best = sol
    if best is None or best.status <= 0:
        guess = PumpCurve(*(abs(x) for x in (best.x if best is not None else (amp0, math.sqrt(eta0)))))
        raise FitError("pump-curve fit did not converge", best=guess)

    amp, k = best.x
    curve = PumpCurve(amplitude=float(amp), rate=float(k * k))
    return PumpFit(curve, tuple(best.fun.tolist()), float(np.linalg.norm(best.fun)), 6)


# --- background noise ------------------------------------------------------


@dataclass(frozen=True)
class NoiseFit:
    model: NoiseModel
    residual_norm_u: float
    residual_norm_l: float


def _lstsq(design, values):
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0) or np.linalg.matrix_rank(design / norms) < design.shape[1]:
        raise FitError("rank-deficient design matrix")
    coef, *_ = np.linalg.lstsq(design / norms, values, rcond=None)
    coef = coef / norms
    return coef, float(np.linalg.norm(design @ coef - values))


def fit_noise(samples_u, samples_l) -> NoiseFit:
    """Ordinary least squares for ``d_U = A P^2 + B P + C`` and ``d_L = D P + E``."""
    pu, du = _split(samples_u)
    pl, dl = _split(samples_l)
    if pu.size < 3 or pl.size < 2:
        raise FitError("need at least 3 points for d_U and 2 for d_L")
    coef_u, res_u = _lstsq(np.column_stack((pu**2, pu, np.ones_like(pu))), du)
    coef_l, res_l = _lstsq(np.column_stack((pl, np.ones_like(pl))), dl)
    return NoiseFit(NoiseModel(tuple(coef_u.tolist()), tuple(coef_l.tolist())), res_u, res_l)


# --- full calibration -----------------------------------------------------


@dataclass(frozen=True)
class PowerEstimate:
    power: float
    r_tilde: float
    budget: LossBudget
    gradient: dict
    stderr: float | None = None


@dataclass(frozen=True)
class CalibrationResult:
    estimates: tuple
    budget: LossBudget
    budget_spread: tuple
    pump: PumpFit | None
    noise: NoiseFit | None
    rate_residuals: tuple
    skipped: tuple = field(default=())


class RowError(UnphysicalDataError):
    """An estimator failure tied to one measured row."""

    def __init__(self, power, cause):
        super().__init__(f"row at {power:g} mW: {cause}")
        self.power = power
        self.cause = cause


def calibrate(rates: list, bandwidths: Bandwidths, noise_u=None, noise_l=None, trials=None) -> CalibrationResult:
    """Per-power inversion, averaged loss budget, pump-curve and noise fits.

    Rows without conversion events (``p_ut == 0`` or ``p_lt == 0``) carry no
    information on ``R~`` and are skipped.  A pump-curve fit that does not
    converge is reported as a warning and leaves ``pump`` empty.
    """
    estimates, used, skipped = [], [], []
    for row in rates:
        if row.p_ut == 0 or row.p_lt == 0:
            skipped.append(row.power)
            continue
        try:
            r = estimate_transition(row, bandwidths)
            budget = estimate_losses(row, r, bandwidths)
            grad = transition_gradient(row, bandwidths)
            err = transition_stderr(row, bandwidths, trials) if trials else None
        except (UnphysicalDataError, DegenerateInputError) as exc:
            raise RowError(row.power, exc) from exc
        estimates.append(PowerEstimate(row.power, r, budget, grad, err))
        used.append(row)
    if not estimates:
        raise DegenerateInputError("no row with conversion events to calibrate from")

    stack = np.array([[e.budget.tu, e.budget.tl, e.budget.mu] for e in estimates])
    mean = stack.mean(axis=0)
    spread = stack.std(axis=0)
    budget = LossBudget(*mean.tolist())

    samples = [(e.power, e.r_tilde) for e in estimates]
    zero_rows = [(p, 0.0) for p in skipped if p == 0]
    pump = None
    if len({p for p, _ in samples + zero_rows}) >= 3:
        try:
            pump = fit_pump_curve(samples + zero_rows)
        except FitError as exc:
            warnings.warn(f"pump-curve fit skipped: {exc}", RuntimeWarning, stacklevel=2)

    residuals = []
    for e, row in zip(estimates, used):
        model = rates_from_transition(e.r_tilde, budget, bandwidths, row.power)
        residuals.append(tuple(m - o for m, o in zip(model.as_tuple(), row.as_tuple())))

    noise = fit_noise(noise_u, noise_l) if noise_u is not None and noise_l is not None else None
    return CalibrationResult(tuple(estimates), budget, tuple(spread.tolist()), pump, noise, tuple(residuals),
                             tuple(skipped))
