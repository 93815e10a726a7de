import math

import numpy as np
import pytest

from freqhom.errors import DomainError, TruncationError
from freqhom.fock_oracle import (
    MODES,
    Transmittances,
    apply_network,
    apply_two_mode,
    loss_matrix,
    no_click_probs_oracle,
    prepare,
    with_noise,
)
from freqhom.verify import fock_suite


def _occupations(state):
    return {tuple(s): a for s, a in zip(state.basis, state.amplitudes) if abs(a) > 1e-14}


class TestPrepare:
    def test_vacuum_lower(self):
        assert _occupations(prepare("coherent", 0.0)) == {(1, 0, 0, 0, 0, 0): 1.0}

    def test_twin(self):
        assert _occupations(prepare("single-photon", n_max=6)) == {(1, 1, 0, 0, 0, 0): 1.0}

    def test_poisson_amplitudes(self):
        st = prepare("coherent", 0.1, n_max=10)
        assert st.leakage < 1e-12
        for n in range(5):
            want = math.exp(-0.05) * 0.1 ** (n / 2) / math.sqrt(math.factorial(n))
            assert st.probability(L=n) == pytest.approx(want**2, rel=1e-9)

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            prepare("coherent", 4.0, n_max=6)

    @pytest.mark.parametrize("args", [("coherent", -0.1, 12), ("coherent", 0.1, 3), ("thermal", 0.1, 12)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            prepare(*args)


class TestNetwork:
    def test_identity(self):
        st = prepare("coherent", 0.3, n_max=8)
        out = apply_network(st, 0.0)
        np.testing.assert_allclose(out.amplitudes, st.amplitudes, atol=1e-15)

    def test_full_conversion_swaps_twins(self):
        out = apply_network(prepare("single-photon", n_max=6), 1.0)
        assert abs(_occupations(out)[(1, 1, 0, 0, 0, 0)]) == pytest.approx(1.0, abs=1e-15)

    def test_full_conversion_moves_single_photon(self):
        out = apply_network(prepare("coherent", 0.0, n_max=6), 1.0)
        assert out.probability(U=0, L=1) == pytest.approx(1.0, abs=1e-15)

    def test_hom_cancellation(self):
        out = apply_network(prepare("single-photon", n_max=6), 0.5)
        assert out.probability(U=1, L=1) < 1e-30
        assert out.probability(U=2) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("kind", ["coherent", "single-photon"])
    def test_unitarity(self, kind):
        rng = np.random.default_rng(3)
        for _ in range(5):
            losses = Transmittances(*rng.uniform(0, 1, 4))
            out = apply_network(prepare(kind, 0.5), rng.uniform(), losses, rng.uniform(0, 6))
            assert out.norm == pytest.approx(1.0, abs=1e-10)

    def test_truncation_convergence(self):
        losses = Transmittances(0.7, 0.4, 0.6, 0.9)
        small = no_click_probs_oracle(apply_network(prepare("coherent", 0.5, 10), 0.45, losses, 1.0))
        large = no_click_probs_oracle(apply_network(prepare("coherent", 0.5, 20), 0.45, losses, 1.0))
        assert max(abs(a - b) for a, b in zip(small, large)) < 1e-9

    @pytest.mark.parametrize("kind", ["coherent", "single-photon"])
    def test_equal_loss_commutes_with_converter(self, kind):
        before = apply_network(prepare(kind, 0.4, 10), 0.3, Transmittances(0.6, 0.6, 1.0, 1.0), 0.7)
        after = apply_network(prepare(kind, 0.4, 10), 0.3, Transmittances(1.0, 1.0, 0.6, 0.6), 0.7)
        assert no_click_probs_oracle(before) == pytest.approx(no_click_probs_oracle(after), abs=1e-13)

    def test_two_mode_rejects_bad_transmittance(self):
        with pytest.raises(DomainError):
            loss_matrix(1.2)

    def test_two_mode_generic_unitary(self):
        theta, phi = 0.3, 1.1
        m = np.array([[math.cos(theta), -np.exp(1j * phi) * math.sin(theta)],
                      [np.exp(-1j * phi) * math.sin(theta), math.cos(theta)]])
        st = apply_two_mode(prepare("coherent", 0.5, 10), MODES.index("U"), MODES.index("L"), m)
        assert st.norm == pytest.approx(1.0, abs=1e-12)


class TestNoClick:
    def test_identity_network(self):
        out = apply_network(prepare("coherent", 0.0, 6), 0.0)
        assert no_click_probs_oracle(out) == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)

    def test_balanced_twins_no_coincidence(self):
        p_u0, p_l0, p_u0l0 = no_click_probs_oracle(apply_network(prepare("single-photon", n_max=6), 0.5))
        assert 1 - p_u0 - p_l0 + p_u0l0 == pytest.approx(0.0, abs=1e-14)

    def test_noise_prefactors(self):
        assert with_noise((0.5, 0.4, 0.3), 0.1, 0.2) == pytest.approx((0.45, 0.32, 0.216))

    def test_matches_analytic_model(self):
        result = fock_suite(seed=7, cases=25)
        assert result.passed and result.max_deviation < 1e-10
