"""Random configurations and synthetic data shared by the estimator and acceptance tests."""

import numpy as np

from freqhom.forward import rates_from_transition
from freqhom.params import Bandwidths, LossBudget


def random_bandwidths(rng):
    return Bandwidths(*rng.uniform(20.0, 1000.0, size=5).tolist())


def random_budget(rng):
    tu, tl = rng.uniform(0.01, 1.0, size=2)
    return LossBudget(float(tu), float(tl), float(rng.uniform(0.01, 1.0)))


def random_case(rng, n_powers=5):
    """Bandwidths, budget, transition probabilities and the rates they generate."""
    bw, budget = random_bandwidths(rng), random_budget(rng)
    r_tilde = np.sort(rng.uniform(0.01, 0.99, size=n_powers))
    rates = [rates_from_transition(float(r), budget, bw, power=float(10 * (i + 1))) for i, r in enumerate(r_tilde)]
    return bw, budget, r_tilde, rates


def relative_error(a, b):
    return abs(a - b) / abs(b)
