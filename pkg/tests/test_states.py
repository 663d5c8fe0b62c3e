import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from phasewitness import DomainError
from phasewitness.quasiprob import quasiprob
from phasewitness.states import (
    FockDensityMatrix,
    GaussianState,
    SqueezedFockState,
    apply_loss,
    coherent_fock,
    coherent_state,
    fock_mixture,
    fock_state,
    mean_amplitude,
    mean_photon_number,
    squeezed_two_photon_mixture,
    thermal_fock,
    thermal_state,
    vacuum,
)


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def _wigner_moments(state, half_width=9.0, n=1001):
    """<n> and <a> from a brute-force Wigner integral on a square grid."""
    x = np.linspace(-half_width, half_width, n)
    q, p = np.meshgrid(x, x, indexing="ij")
    w = quasiprob(state, q + 1j * p, 0.0)
    da = (x[1] - x[0]) ** 2
    norm = w.sum() * da
    nbar = ((q**2 + p**2) * w).sum() * da - 0.5
    amp = ((q + 1j * p) * w).sum() * da
    return norm, nbar, amp


class TestGaussianState:
    def test_rejects_bad_purity(self):
        for mu in (0.0, -0.1, 1.2, float("nan")):
            with pytest.raises(DomainError):
                GaussianState(mu)

    def test_rejects_negative_squeezing(self):
        with pytest.raises(DomainError):
            GaussianState(1.0, -0.1)

    def test_phase_is_reduced(self):
        assert GaussianState(1.0, 0.3, 2 * math.pi + 0.5).phase == pytest.approx(0.5)

    def test_critical_squeezing(self):
        st_ = GaussianState(0.5, 0.2)
        assert st_.critical_squeezing == pytest.approx(0.5 * math.log(2))
        assert not st_.is_nonclassical
        assert GaussianState(0.5, 0.4).is_nonclassical
        assert math.copysign(1.0, vacuum().critical_squeezing) == 1.0

    @given(st.floats(0.05, 1.0), st.floats(0.0, 2.0), st.floats(0.0, 6.3))
    def test_covariance_determinant(self, mu, r, phi):
        cov = GaussianState(mu, r, phi).covariance()
        assert np.linalg.det(cov) == pytest.approx(1 / (16 * mu**2), rel=1e-9)
        assert np.allclose(cov, cov.T)

    def test_thermal_purity(self):
        assert thermal_state(1.5).purity == pytest.approx(0.25)

    @pytest.mark.parametrize(
        "state",
        [GaussianState(0.7, 0.4, 1.1, 0.5 - 0.3j), GaussianState(1.0, 0.8), coherent_state(1.2j), thermal_state(0.6)],
    )
    def test_mean_photon_number_matches_wigner_integral(self, state):
        norm, nbar, amp = _wigner_moments(state)
        assert norm == pytest.approx(1.0, abs=1e-9)
        assert mean_photon_number(state) == pytest.approx(nbar, abs=1e-8)
        assert mean_amplitude(state) == pytest.approx(amp, abs=1e-9)


class TestFockDensityMatrix:
    def test_validation(self):
        with pytest.raises(DomainError):
            FockDensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
        with pytest.raises(DomainError):
            FockDensityMatrix(np.eye(2))
        with pytest.raises(DomainError):
            FockDensityMatrix(np.array([[1.5, 0], [0, -0.5]]))
        with pytest.raises(DomainError):
            FockDensityMatrix(np.zeros((2, 3)))

    def test_entries_are_read_only(self):
        rho = fock_state(1, 3)
        with pytest.raises(ValueError):
            rho.entries[0, 0] = 1.0

    def test_equality_and_hash(self):
        assert fock_state(1, 3) == fock_state(1, 3)
        assert hash(fock_state(1, 3)) == hash(fock_state(1, 3))
        assert fock_state(1, 3) != fock_state(2, 3)

    def test_fock_state_fits(self):
        with pytest.raises(DomainError):
            fock_state(3, 3)
        assert fock_state(2).dim == 3
        assert fock_state(2).is_diagonal

    def test_thermal_fock_matches_gaussian(self):
        assert mean_photon_number(thermal_fock(0.4, 80)) == pytest.approx(0.4, abs=1e-12)
        pts = np.array([0, 0.3 + 0.2j, -1.1j])
        assert np.allclose(quasiprob(thermal_fock(0.4, 80), pts), quasiprob(thermal_state(0.4), pts), atol=1e-13)

    def test_coherent_fock_moments(self):
        gamma = 0.9 - 0.6j
        rho = coherent_fock(gamma, 50)
        assert mean_photon_number(rho) == pytest.approx(abs(gamma) ** 2, abs=1e-12)
        assert mean_amplitude(rho) == pytest.approx(gamma, abs=1e-12)
        assert not rho.is_diagonal


class TestLoss:
    def test_unit_transmittance_is_identity(self):
        rho = fock_state(2)
        assert apply_loss(rho, 1.0) is rho

    def test_zero_transmittance_gives_vacuum(self):
        out = apply_loss(fock_state(3), 0.0)
        assert out.entries[0, 0] == pytest.approx(1.0)

    def test_single_photon(self):
        out = apply_loss(fock_state(1), 0.3)
        assert np.allclose(np.diag(out.entries).real, [0.7, 0.3])

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_composition(self, e1, e2):
        rho = coherent_fock(0.8 + 0.5j, 12)
        a = apply_loss(apply_loss(rho, e1), e2).entries
        b = apply_loss(rho, e1 * e2).entries
        assert np.allclose(a, b, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 6), st.floats(0.0, 1.0))
    def test_mean_photon_scales(self, n, eta):
        assert mean_photon_number(apply_loss(fock_state(n), eta)) == pytest.approx(eta * n, abs=1e-12)

    def test_coherent_amplitude_shrinks(self):
        rho = apply_loss(coherent_fock(1.0 + 1.0j, 40), 0.49)
        assert mean_amplitude(rho) == pytest.approx(0.7 + 0.7j, abs=1e-12)
        # loss keeps coherent states pure
        assert np.trace(rho.entries @ rho.entries).real == pytest.approx(1.0, abs=1e-12)


class TestSqueezedFock:
    dim = 80

    def _squeezed(self, base_weights, r, sign):
        a = _ladder(self.dim)
        gen = 0.5 * r * (a.conj().T @ a.conj().T - a @ a)
        s = expm(sign * gen)
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        rho[: len(base_weights), : len(base_weights)] = np.diag(base_weights)
        return FockDensityMatrix(s @ rho @ s.conj().T)

    @pytest.mark.parametrize("f,r", [(0.3, 0.4), (0.8, 0.25)])
    def test_matches_fock_basis_squeezer(self, f, r):
        weights = [1 - f, 0, f]
        pts = np.array([0.0, 0.4 + 0.1j, -0.2 + 0.7j, 1.0])
        # a plain squeeze exp(-r/2 (a^dag^2 - a^2)) narrows q: phase 0
        fock_q = self._squeezed(weights, r, -1)
        ours_q = squeezed_two_photon_mixture(f, r)
        assert np.allclose(quasiprob(ours_q, pts), quasiprob(fock_q, pts), atol=1e-10)
        # the opposite generator narrows p: phase pi/2
        fock_p = self._squeezed(weights, r, +1)
        ours_p = SqueezedFockState(fock_mixture(weights), r, math.pi / 2)
        assert np.allclose(quasiprob(ours_p, pts), quasiprob(fock_p, pts), atol=1e-10)
        for ours, fock in ((ours_q, fock_q), (ours_p, fock_p)):
            assert mean_photon_number(ours) == pytest.approx(mean_photon_number(fock), abs=1e-10)
            assert mean_photon_number(ours) == pytest.approx(2 * f * math.cosh(2 * r) + math.sinh(r) ** 2, abs=1e-12)

    def test_mean_amplitude_of_squeezed_coherent(self):
        base = coherent_fock(0.5 + 0.5j, 40)
        r = 0.3
        st_ = SqueezedFockState(base, r)
        assert mean_amplitude(st_) == pytest.approx(complex(0.5 * math.exp(-r), 0.5 * math.exp(r)), abs=1e-12)
        _, nbar, amp = _wigner_moments(st_)
        assert mean_amplitude(st_) == pytest.approx(amp, abs=1e-9)
        assert mean_photon_number(st_) == pytest.approx(nbar, abs=1e-8)

    def test_rejects_non_fock_base(self):
        with pytest.raises(DomainError):
            SqueezedFockState(vacuum(), 0.2)

    def test_fraction_domain(self):
        with pytest.raises(DomainError):
            squeezed_two_photon_mixture(1.2, 0.1)

    def test_rotated_squeezer_on_displaced_base(self):
        # non-diagonal base: the squeeze must act in a frame that is rotated back afterwards
        dim, r, phi = 80, 0.3, 0.9
        base = coherent_fock(0.6 + 0.2j, 40)
        a = _ladder(dim)
        xi = r * np.exp(2j * phi)
        s = expm(0.5 * (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T))
        rho = np.zeros((dim, dim), dtype=complex)
        rho[:40, :40] = base.entries
        fock = FockDensityMatrix(s @ rho @ s.conj().T)
        ours = SqueezedFockState(base, r, phi)
        pts = np.array([0.0, 0.5 + 0.4j, -0.3 + 0.1j, 0.9j])
        assert np.allclose(quasiprob(ours, pts), quasiprob(fock, pts), atol=1e-10)
        assert mean_amplitude(ours) == pytest.approx(mean_amplitude(fock), abs=1e-10)
