"""Brute-force Fock-space check of the no-click formulas for one frequency bin per band.

Six modes: the detected bands U and L, the input-loss ancillae EU1 and EL1,
and the output-filter ancillae EU2 and EL2.  The state is an amplitude vector
over all occupation tuples with at most ``n_max`` photons in total; every
element of the network is passive, so photon number is conserved and the
basis is closed under evolution.  Each two-mode element acts by substituting
its creation-operator map into ``(a_i^+)^n (a_j^+)^m |0>`` and expanding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from .converter import BeamsplitterAngle, bs_map
from .errors import DomainError, TruncationError

MODES = ("U", "L", "EU1", "EL1", "EU2", "EL2")
U, L, EU1, EL1, EU2, EL2 = range(6)
N_MAX_DEFAULT = 12
LEAKAGE_LIMIT = 1e-8


def _compositions(n_modes: int, budget: int):
    """All occupation tuples of ``n_modes`` modes with at most ``budget`` photons."""
    if n_modes == 1:
        for n in range(budget + 1):
            yield (n,)
        return
    for n in range(budget + 1):
        for rest in _compositions(n_modes - 1, budget - n):
            yield (n,) + rest


@lru_cache(maxsize=8)
def _basis(n_max: int, n_modes: int = len(MODES)):
    states = [s for s in _compositions(n_modes, n_max)]
    states.sort(key=lambda s: (sum(s), s))
    index = {s: i for i, s in enumerate(states)}
    return np.array(states, dtype=np.int64), index


@dataclass(frozen=True)
class TruncatedState:
    amplitudes: np.ndarray
    n_max: int
    leakage: float = 0.0

    @property
    def basis(self) -> np.ndarray:
        return _basis(self.n_max)[0]

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probability(self, **occupations) -> float:
        """Total probability of outcomes with the given occupations, e.g. ``U=0, L=0``."""
        mask = np.ones(len(self.amplitudes), dtype=bool)
        for name, n in occupations.items():
            mask &= self.basis[:, MODES.index(name)] == n
        return float(np.sum(np.abs(self.amplitudes[mask]) ** 2))


def prepare(input_kind: str, alpha_sq: float = 0.0, n_max: int = N_MAX_DEFAULT) -> TruncatedState:
    """One photon in U and either a coherent state of mean ``alpha_sq`` or one photon in L."""
    if n_max < 4:
        raise DomainError("n_max must be at least 4")
    if alpha_sq < 0:
        raise DomainError("alpha_sq must be nonnegative")
    states, index = _basis(n_max)
    amps = np.zeros(len(states), dtype=complex)
    leakage = 0.0
    if input_kind == "single-photon":
        amps[index[(1, 1, 0, 0, 0, 0)]] = 1.0
    elif input_kind == "coherent":
        alpha = math.sqrt(alpha_sq)
        coeffs = np.array([math.exp(-alpha_sq / 2) * alpha**n / math.sqrt(math.factorial(n)) for n in range(n_max)])
        leakage = max(0.0, 1.0 - float(coeffs @ coeffs))
        if leakage > LEAKAGE_LIMIT:
            raise TruncationError(f"truncation at {n_max} photons drops probability {leakage:.3g}")
        for n, c in enumerate(coeffs):
            amps[index[(1, n, 0, 0, 0, 0)]] = c
        amps /= np.linalg.norm(amps)
    else:
        raise DomainError(f"unknown input kind {input_kind!r}")
    return TruncatedState(amps, n_max, leakage)


def _two_mode_coefficients(matrix: np.ndarray, n_max: int) -> np.ndarray:
    """Fock-basis amplitudes ``<k, n+m-k| U |n, m>`` indexed ``[n, m, k]``, for ``n + m <= n_max``."""
    w = matrix
    out = np.zeros((n_max + 1, n_max + 1, n_max + 1), dtype=complex)
    fact = [math.factorial(k) for k in range(n_max + 1)]
    for n in range(n_max + 1):
        # (w00 x + w10 y)^n as polynomial in x with y-powers implied
        pn = np.array([math.comb(n, p) * w[0, 0] ** p * w[1, 0] ** (n - p) for p in range(n + 1)])
        for m in range(n_max + 1 - n):
            pm = np.array([math.comb(m, q) * w[0, 1] ** q * w[1, 1] ** (m - q) for q in range(m + 1)])
            poly = np.convolve(pn, pm)
            total = n + m
            norm = np.array([math.sqrt(fact[k] * fact[total - k] / (fact[n] * fact[m])) for k in range(total + 1)])
            out[n, m, : total + 1] = poly * norm
    return out


@lru_cache(maxsize=64)
def _pair_structure(n_max: int, i: int, j: int):
    """Sparse pattern of a two-mode map: ``(rows, cols, n, m, k)`` for every nonzero entry."""
    states, _ = _basis(n_max)
    radix = (n_max + 1) ** np.arange(states.shape[1])
    codes = states @ radix
    order = np.argsort(codes)
    n, m = states[:, i], states[:, j]
    total = n + m
    cols = np.repeat(np.arange(len(states)), total + 1)
    k = np.arange(cols.size) - np.repeat(np.cumsum(total + 1) - (total + 1), total + 1)
    n, m, total = n[cols], m[cols], total[cols]
    target = codes[cols] + (k - n) * radix[i] + (total - k - m) * radix[j]
    rows = order[np.searchsorted(codes[order], target)]
    return rows, cols, n, m, k


def apply_two_mode(state: TruncatedState, i: int, j: int, matrix: np.ndarray) -> TruncatedState:
    """Apply the mode map ``a_i^+ -> w00 a_i^+ + w10 a_j^+``, ``a_j^+ -> w01 a_i^+ + w11 a_j^+``."""
    coeffs = _two_mode_coefficients(np.asarray(matrix, dtype=complex), state.n_max)
    rows, cols, n, m, k = _pair_structure(state.n_max, i, j)
    data = coeffs[n, m, k]
    size = len(state.amplitudes)
    op = sparse.csr_matrix((data, (rows, cols)), shape=(size, size))
    return TruncatedState(op @ state.amplitudes, state.n_max, state.leakage)


def loss_matrix(transmittance: float) -> np.ndarray:
    """Mode map of a lossy element: signal first, ancilla second."""
    if not 0.0 <= transmittance <= 1.0:
        raise DomainError(f"transmittance must lie in [0, 1], got {transmittance}")
    t, r = math.sqrt(transmittance), math.sqrt(1.0 - transmittance)
    return np.array([[t, -r], [r, t]])


@dataclass(frozen=True)
class Transmittances:
    in_u: float = 1.0
    in_l: float = 1.0
    out_u: float = 1.0
    out_l: float = 1.0


def apply_network(state: TruncatedState, r_tilde: float, losses: Transmittances = Transmittances(),
                  phase: float = 0.0) -> TruncatedState:
    """Input losses, the converter with transition probability ``r_tilde``, then the output filters."""
    state = apply_two_mode(state, U, EU1, loss_matrix(losses.in_u))
    state = apply_two_mode(state, L, EL1, loss_matrix(losses.in_l))
    state = apply_two_mode(state, U, L, bs_map(BeamsplitterAngle.from_transition(r_tilde, phase)))
    state = apply_two_mode(state, U, EU2, loss_matrix(losses.out_u))
    state = apply_two_mode(state, L, EL2, loss_matrix(losses.out_l))
    return state


def no_click_probs_oracle(state: TruncatedState) -> tuple[float, float, float]:
    """Born-rule ``(p_U0, p_L0, p_U0L0)`` of the detected modes, without background noise."""
    return state.probability(U=0), state.probability(L=0), state.probability(U=0, L=0)


def with_noise(probs, d_u: float, d_l: float) -> tuple[float, float, float]:
    p_u0, p_l0, p_u0l0 = probs
    return (1 - d_u) * p_u0, (1 - d_l) * p_l0, (1 - d_u) * (1 - d_l) * p_u0l0
