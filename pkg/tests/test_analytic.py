import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from phasewitness import DomainError
from phasewitness.analytic import (
    certify_qng,
    distance_lower_bound,
    gaussian_lambda_min,
    qng_bound,
    squeezed_thermal_lambda_min,
    two_point_gaussian_minimum,
)
from phasewitness.states import (
    GaussianState,
    make_squeezed_thermal,
    mean_photon_number,
    squeezed_two_photon_mixture,
    vacuum,
)
from phasewitness.witness import PhasePointSet, SearchConfig, optimize_points, report_for_points

FAST = SearchConfig(n_starts=4)


def _two_point_matrix(points, a, b, c):
    p = np.asarray(points, dtype=complex)
    mid = 0.5 * (p[:, None] + p[None, :])
    sep = np.abs(p[:, None] - p[None, :]) ** 2
    return np.exp(-a * mid.real**2 - b * mid.imag**2 - c / 4 * sep)


class TestTwoPointMinimum:
    def test_reference_ratio_e(self):
        opt = two_point_gaussian_minimum(2 * math.e, 1.0, 2.0)
        expected = -(1 - 1 / math.e) * math.exp(-1 / (math.e - 1))
        assert opt.lambda_min == pytest.approx(expected, rel=1e-12)
        # a/c = e is the pure r = 0.5 squeezed state in disguise
        assert opt.lambda_min == pytest.approx(squeezed_thermal_lambda_min(1.0, 0.5), rel=1e-12)
        xs = np.arange(1, 30001) * 1e-4
        grid = np.min(np.exp(-2 * math.e * xs**2) - np.exp(-2 * xs**2))
        assert opt.lambda_min <= grid + 1e-8
        assert opt.lambda_min == pytest.approx(grid, abs=1e-8)

    def test_continuity_limit(self):
        opt = two_point_gaussian_minimum(2.0 * (1 + 1e-8), 1.0, 2.0)
        assert opt.lambda_min <= 0
        assert abs(opt.lambda_min) < 1e-7

    @pytest.mark.parametrize(
        "a,b,c,word",
        [(1.0, 0.5, 2.0, "a > c"), (3.0, 2.5, 2.0, "c > b"), (3.0, -1.0, 2.0, "b > 0"), (2.0, 1.0, 2.0, "a > c")],
    )
    def test_ordering_errors_name_inequality(self, a, b, c, word):
        with pytest.raises(DomainError, match=word):
            two_point_gaussian_minimum(a, b, c)

    @settings(max_examples=60)
    @given(st.floats(0.2, 5.0), st.floats(0.05, 0.95), st.floats(0.01, 10.0), st.floats(0.05, 0.95))
    def test_eigenvalue_at_returned_points_and_b_independence(self, c, bfrac, gap, bfrac2):
        a = c * (1 + gap)
        one = two_point_gaussian_minimum(a, c * bfrac, c)
        two = two_point_gaussian_minimum(a, c * bfrac2, c)
        assert one.lambda_min == two.lambda_min
        mat = _two_point_matrix(one.optimal_points, a, c * bfrac, c)
        assert np.linalg.eigvalsh(mat)[0] == pytest.approx(one.lambda_min, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.3, 4.0), st.floats(0.1, 0.9), st.floats(0.05, 4.0), st.integers(0, 2**32 - 1))
    def test_no_pair_beats_closed_form(self, c, bfrac, gap, seed):
        a, b = c * (1 + gap), c * bfrac
        lam = two_point_gaussian_minimum(a, b, c).lambda_min
        rng = np.random.default_rng(seed)
        pairs = rng.normal(0, 1.5, (400, 2)) + 1j * rng.normal(0, 1.5, (400, 2))
        mats = np.stack([_two_point_matrix(p, a, b, c) for p in pairs])
        assert np.linalg.eigvalsh(mats)[:, 0].min() >= lam - 1e-12


class TestGaussianLambdaMin:
    def test_pure_reference(self):
        opt = gaussian_lambda_min(make_squeezed_thermal(1.0, 0.5))
        assert opt.lambda_min == pytest.approx(-2 * math.exp(-0.5 / math.tanh(0.5)) * math.sinh(0.5), rel=1e-12)
        assert opt.lambda_min == pytest.approx(-0.3532, abs=2e-4)

    def test_critical_squeezing_gives_zero(self):
        state = GaussianState(0.5, -0.5 * math.log(0.5))
        opt = gaussian_lambda_min(state)
        assert opt.lambda_min == 0.0
        assert opt.optimal_points == ()
        assert squeezed_thermal_lambda_min(0.5, -0.5 * math.log(0.5)) == 0.0

    def test_series_guard_is_continuous(self):
        mu = 0.7
        rc = -0.5 * math.log(mu)
        # either side of the switch to the series, normalized by the distance to r_c
        below = squeezed_thermal_lambda_min(mu, rc + 0.999e-6) / 0.999e-6
        above = squeezed_thermal_lambda_min(mu, rc + 1.001e-6) / 1.001e-6
        assert below == pytest.approx(above, rel=1e-6)
        assert below == pytest.approx(-2 * mu / math.e, rel=1e-6)

    @settings(max_examples=80)
    @given(st.floats(0.05, 1.0), st.floats(1e-4, 3.0))
    def test_zero_ordering_equals_squeezed_thermal_formula(self, mu, delta):
        r = -0.5 * math.log(mu) + delta
        opt = gaussian_lambda_min(GaussianState(mu, r))
        assert opt.lambda_min == pytest.approx(squeezed_thermal_lambda_min(mu, r), rel=1e-10, abs=1e-15)

    def test_mixed_other_ordering_matches_optimizer(self):
        state = make_squeezed_thermal(0.8, 0.5)
        opt = gaussian_lambda_min(state, -1.0)
        assert opt.lambda_min < 0
        rep = optimize_points(state, 2, -1.0, FAST)
        assert rep.min_eigenvalue == pytest.approx(opt.lambda_min, abs=1e-6)

    def test_points_follow_phase_and_displacement(self):
        state = GaussianState(0.9, 0.7, 0.8, 0.3 + 0.4j)
        opt = gaussian_lambda_min(state, -0.3)
        rep = report_for_points(state, PhasePointSet(opt.optimal_points, -0.3))
        assert rep.min_eigenvalue == pytest.approx(opt.lambda_min, abs=1e-12)
        assert sum(opt.optimal_points) / 2 == pytest.approx(0.3 + 0.4j)

    def test_invalid_ordering(self):
        with pytest.raises(DomainError):
            gaussian_lambda_min(make_squeezed_thermal(1.0, 1.0), 0.5)

    def test_nonclassical_iff_above_critical(self):
        for mu in np.linspace(0.1, 1.0, 10):
            rc = -0.5 * math.log(mu)
            for r in np.linspace(0, 2.5, 26):
                lam = gaussian_lambda_min(GaussianState(mu, r)).lambda_min
                assert (lam < 0) == (r > rc)

    def test_monotone_in_squeezing(self):
        for mu in (0.3, 0.7, 1.0):
            rc = -0.5 * math.log(mu)
            rs = rc + np.linspace(0, 3, 301)
            vals = [abs(squeezed_thermal_lambda_min(mu, r)) for r in rs]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestDistanceBound:
    def test_examples(self):
        assert distance_lower_bound(-1.0, 1) == 0.5
        assert distance_lower_bound(0.3, 2) == 0.0

    def test_squeezed_identity(self):
        for mu, r in ((1.0, 0.5), (0.6, 1.2), (0.9, 2.0)):
            d = r + 0.5 * math.log(mu)
            lam = squeezed_thermal_lambda_min(mu, r)
            expected = 0.5 * mu * math.exp(-d / math.tanh(d)) * math.sinh(d)
            assert distance_lower_bound(lam, 2) == pytest.approx(expected, rel=1e-12)

    def test_bounded_by_one(self):
        for r in np.linspace(0.01, 10, 200):
            assert distance_lower_bound(squeezed_thermal_lambda_min(1.0, r), 2) <= 1

    def test_rejects_bad_n(self):
        with pytest.raises(DomainError):
            distance_lower_bound(-1.0, 0)


class TestQNGBound:
    def test_values(self):
        assert qng_bound(0.0) == 0.0
        assert qng_bound(1.0) == pytest.approx(-2 / (math.sqrt(2) + 1) ** math.sqrt(2), rel=1e-12)
        assert qng_bound(1.0) == pytest.approx(-0.57505, abs=1e-5)

    def test_negative_energy(self):
        with pytest.raises(DomainError):
            qng_bound(-0.1)

    @pytest.mark.parametrize("r", [0.2, 0.5, 1.0])
    def test_pure_squeezed_identity(self, r):
        assert qng_bound(math.sinh(r) ** 2) == pytest.approx(squeezed_thermal_lambda_min(1.0, r), abs=1e-9)

    @pytest.mark.parametrize("energy", [0.3, 1.0, 2.5])
    def test_is_best_gaussian_at_energy(self, energy):
        # best over squeezed thermal states spending all energy on squeezing and noise
        def lam(mu):
            r = 0.5 * math.acosh(max(2 * mu * (energy + 0.5), 1.0))
            return squeezed_thermal_lambda_min(mu, r)

        res = minimize_scalar(lam, bounds=(1 / (2 * energy + 1), 1.0), method="bounded", options={"xatol": 1e-12})
        assert min(res.fun, lam(1.0)) == pytest.approx(qng_bound(energy), abs=1e-9)

    def test_small_energy_continuity(self):
        assert qng_bound(1e-13) == 0.0
        assert qng_bound(1e-10) < 0
        assert abs(qng_bound(1e-10)) < 1e-4


class TestCertifyQNG:
    def test_vacuum_not_flagged(self):
        rep = certify_qng(vacuum(), FAST)
        assert rep.delta <= 1e-9
        assert not rep.quantum_non_gaussian

    def test_mixture_detected_at_large_squeezing(self):
        state = squeezed_two_photon_mixture(0.45, 0.5)
        rep = certify_qng(state, FAST)
        assert rep.delta > 0
        assert rep.quantum_non_gaussian
        assert rep.mean_photon == pytest.approx(mean_photon_number(state))
        assert rep.to_dict()["verdict"] == "quantum-non-gaussian"

    def test_detection_edge_at_half_squeezing(self):
        # at r = 0.5 the margin changes sign near f = 0.412
        below = certify_qng(squeezed_two_photon_mixture(0.40, 0.5), FAST)
        above = certify_qng(squeezed_two_photon_mixture(0.42, 0.5), FAST)
        assert below.delta < 0 < above.delta

    def test_squeezed_gaussian_not_flagged(self):
        rep = certify_qng(make_squeezed_thermal(1.0, 0.6), FAST)
        assert abs(rep.delta) < 1e-8
        assert not rep.quantum_non_gaussian

    def test_unsqueezed_mixture_not_detected(self):
        for f in (0.1, 0.3, 0.49):
            assert not certify_qng(squeezed_two_photon_mixture(f, 0.0), FAST).quantum_non_gaussian
