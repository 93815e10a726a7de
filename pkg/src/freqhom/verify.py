"""Seeded oracle suites: closed-form spectra vs quadrature, analytic no-click vs Fock space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fock_oracle as fock
from .converter import PumpCurve
from .hom import no_click_probs
from .params import INPUT_KINDS, Bandwidths, ExperimentConfig, LossBudget
from .spectra import GaussianProfile, OverlapSpec, interference_integral, quadrature_oracle

SPECTRAL_TOLERANCE = 1e-9
FOCK_TOLERANCE = 1e-7
FLAT_WIDTH = 50.0


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    max_deviation: float
    tolerance: float
    worst_case: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance


def random_overlap(rng: np.random.Generator) -> OverlapSpec:
    """An amplitude-type overlap of two inputs, a converter response and an output filter."""
    conv = str(rng.choice(["fwhm", "1/e", "rms"]))
    w = rng.uniform(20.0, 800.0, size=4)
    c = rng.uniform(-30.0, 30.0, size=4)
    f_u = GaussianProfile.density(w[0], c[0], conv)
    f_l = GaussianProfile.density(w[1], c[1], conv)
    resp = GaussianProfile(w[2], c[2], rng.uniform(0.0, 0.999), conv)
    g = GaussianProfile(w[3], c[3], convention=conv)
    complement = resp if rng.uniform() < 0.8 else None
    return OverlapSpec(((f_u, 0.5), (f_l, 0.5), (resp, 0.5), (g, 1.0)), rng.uniform(-30.0, 30.0), complement)


def _describe(spec: OverlapSpec) -> dict:
    terms = [
        {"width": p.width, "center": p.center, "peak": p.peak, "convention": p.convention,
         "normalized": p.normalized, "exponent": e}
        for p, e in spec.terms
    ]
    comp = None if spec.complement is None else {"width": spec.complement.width, "center": spec.complement.center,
                                                   "peak": spec.complement.peak}
    return {"terms": terms, "delay": spec.delay, "complement": comp}


def spectral_suite(seed: int, cases: int = 1000, tolerance: float = SPECTRAL_TOLERANCE) -> SuiteResult:
    """Relative deviation, scaled by the zero-delay magnitude of the same overlap."""
    rng = np.random.default_rng([seed, 1])
    worst, worst_case = 0.0, {}
    for _ in range(cases):
        spec = random_overlap(rng)
        scale = abs(interference_integral(spec.with_delay(0.0)))
        if scale == 0.0:
            continue
        dev = abs(interference_integral(spec) - quadrature_oracle(spec)) / scale
        if dev > worst:
            worst, worst_case = dev, _describe(spec)
    return SuiteResult("spectral", cases, worst, tolerance, worst_case)


def flat_config(input_kind: str, losses: fock.Transmittances, alpha_sq: float) -> ExperimentConfig:
    """Analytic model whose overlaps all equal one: identical inputs, no spectral filtering."""
    mean = alpha_sq if input_kind == "coherent" else 1.0
    return ExperimentConfig(
        Bandwidths(FLAT_WIDTH, FLAT_WIDTH, math.inf, math.inf, math.inf),
        LossBudget(losses.in_u * losses.out_u, losses.in_u * losses.out_l, mean * losses.in_l / losses.in_u),
        PumpCurve(1.0, 0.0),
        input_kind=input_kind,
    )


def fock_suite(seed: int, cases: int = 200, tolerance: float = FOCK_TOLERANCE, n_max: int = fock.N_MAX_DEFAULT) -> SuiteResult:
    """``cases`` random configurations per input kind."""
    rng = np.random.default_rng([seed, 2])
    worst, worst_case = 0.0, {}
    for kind in INPUT_KINDS:
        for _ in range(cases):
            r = float(rng.uniform())
            losses = fock.Transmittances(*rng.uniform(0.05, 1.0, size=4).tolist())
            alpha_sq = float(rng.uniform(0.0, 0.5))
            phase = float(rng.uniform(0.0, 2 * math.pi))
            state = fock.apply_network(fock.prepare(kind, alpha_sq, n_max), r, losses, phase)
            oracle = fock.no_click_probs_oracle(state)
            model = no_click_probs(flat_config(kind, losses, alpha_sq), 0.0, r_tilde=r, phase=phase)
            dev = max(abs(a - b) for a, b in zip(oracle, (model.p_u0, model.p_l0, model.p_u0l0)))
            if dev > worst:
                worst_case = {"input_kind": kind, "r_tilde": r, "alpha_sq": alpha_sq, "phase": phase,
                              "transmittances": losses.__dict__, "oracle": list(oracle),
                              "analytic": [model.p_u0, model.p_l0, model.p_u0l0]}
                worst = dev
    return SuiteResult("fock", 2 * cases, worst, tolerance, worst_case)


def run_checks(seed: int = 0, spectral_cases: int = 1000, fock_cases: int = 200,
               tolerance_scale: float = 1.0) -> list[SuiteResult]:
    return [
        spectral_suite(seed, spectral_cases, SPECTRAL_TOLERANCE * tolerance_scale),
        fock_suite(seed, fock_cases, FOCK_TOLERANCE * tolerance_scale),
    ]
