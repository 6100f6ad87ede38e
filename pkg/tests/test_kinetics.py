import math

import numpy as np
import pytest

from ferrocal import (CollapsePoint, ConfigError, DomainError, collapse_rms,
                      collapse_transform, fit_lorentzian_cdf, fit_merz_nested,
                      master_curve, regress_mu_fixed_tau, threshold_voltage)

from anchors import (ORACLE_ALPHA, ORACLE_MU_STAR, ORACLE_R2, ORACLE_SLOPE, ORACLE_X,
                     PUB_ALPHA, PUB_TAU_INF, ROW_500US, TABLE_ROWS, synthetic_curve)

POINTS = [(row[0], row[3]) for row in TABLE_ROWS]


class TestRegressFixedTau:
    def test_matches_hand_least_squares_oracle(self):
        reg = regress_mu_fixed_tau(POINTS, PUB_TAU_INF)
        assert reg.slope == pytest.approx(ORACLE_SLOPE, abs=1e-9)
        assert reg.alpha == pytest.approx(ORACLE_ALPHA, abs=1e-8)
        assert reg.mu_star == pytest.approx(ORACLE_MU_STAR, abs=1e-9)
        assert reg.r_squared == pytest.approx(ORACLE_R2, abs=1e-9)
        assert np.allclose(reg.x_values, ORACLE_X, atol=1e-9)

    def test_published_tolerances(self):
        reg = regress_mu_fixed_tau(POINTS, PUB_TAU_INF)
        assert abs(reg.slope - (-0.2758)) <= 0.0005
        assert abs(reg.alpha - 3.63) <= 0.01
        assert abs(reg.alpha - PUB_ALPHA) <= 0.05

    def test_collinear_synthetic_line(self):
        tau = 1e-14
        tps = [1e-5, 1e-4, 1e-3, 1e-2]
        pts = [(t, 1.2 - 0.25 * math.log10(math.log(t / tau))) for t in tps]
        reg = regress_mu_fixed_tau(pts, tau)
        assert reg.alpha == pytest.approx(4.0, rel=1e-10)
        assert reg.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_slope_is_negative_for_physical_families(self):
        reg = regress_mu_fixed_tau(POINTS, PUB_TAU_INF)
        assert reg.slope < 0

    def test_input_validation(self):
        with pytest.raises(ConfigError):
            regress_mu_fixed_tau(POINTS[:2], PUB_TAU_INF)
        with pytest.raises(DomainError):
            regress_mu_fixed_tau(POINTS, 1.0)  # tau above every t_p
        with pytest.raises(ConfigError):
            regress_mu_fixed_tau([(1e-4, 0.7), (1e-4, 0.71), (2e-4, 0.69)], PUB_TAU_INF)

    def test_round_trip_against_threshold_voltage(self):
        reg = regress_mu_fixed_tau(POINTS, PUB_TAU_INF)
        kin = reg.kinetics(17e-9)
        resid = np.abs(np.array([mu for _, mu in POINTS]) - reg.mu_fit())
        for (t_p, mu), r in zip(POINTS, resid):
            v50 = threshold_voltage(kin, t_p)
            assert abs(math.log10(v50) - mu) <= r + 1e-12


class TestFitMerzNested:
    def test_recovers_exact_generator(self):
        alpha0, tau0, mu_star0 = 3.62, 1.4e-14, 1.0694
        pts = [(t, mu_star0 - math.log10(math.log(t / tau0)) / alpha0)
               for t, *_ in TABLE_ROWS]
        reg = fit_merz_nested(pts)
        assert abs(reg.alpha - alpha0) <= 0.02
        assert abs(math.log10(reg.tau_inf) - math.log10(tau0)) <= 0.2

    def test_published_points_constrain_tau_to_an_order_of_magnitude(self):
        reg = fit_merz_nested(POINTS)
        assert abs(math.log10(reg.tau_inf) - math.log10(PUB_TAU_INF)) <= 1.0

    def test_flat_medians_flagged_degenerate(self):
        pts = [(t, 0.7) for t, *_ in TABLE_ROWS]
        reg = fit_merz_nested(pts)
        assert reg.degenerate
        assert math.isinf(reg.alpha)
        assert abs(reg.slope) < 1e-6

    def test_invariant_under_common_time_rescaling(self):
        c = 37.0
        reg = fit_merz_nested(POINTS)
        scaled = [(t * c, mu) for t, mu in POINTS]
        shift = math.log10(c)
        reg2 = fit_merz_nested(scaled, tau_search=(-16.0 + shift, -10.0 + shift))
        assert reg2.alpha == pytest.approx(reg.alpha, abs=2e-3)
        assert math.log10(reg2.tau_inf) - math.log10(reg.tau_inf) == pytest.approx(shift, abs=5e-3)

    def test_empty_feasible_interval(self):
        with pytest.raises(DomainError):
            fit_merz_nested(POINTS, tau_search=(0.0, 2.0))


class TestCollapse:
    def test_center_and_unit_z(self):
        curve = synthetic_curve(ROW_500US)
        fit = fit_lorentzian_cdf(curve)
        pts = collapse_transform(curve, fit)
        z = np.array([p.z for p in pts])
        s = np.array([p.s_bar for p in pts])
        i0 = int(np.argmin(np.abs(z)))
        assert s[i0] == pytest.approx(0.5, abs=2e-3)  # grid does not hit mu exactly
        i1 = int(np.argmin(np.abs(z - 1)))
        assert s[i1] == pytest.approx(0.75, abs=2e-3)

    def test_pulse_width_mismatch_rejected(self):
        curve = synthetic_curve(ROW_500US)
        other = fit_lorentzian_cdf(synthetic_curve(TABLE_ROWS[0]))
        with pytest.raises(DomainError):
            collapse_transform(curve, other)

    def test_all_pulse_widths_fall_on_master_curve(self):
        pts = []
        for row in TABLE_ROWS:
            curve = synthetic_curve(row)
            pts.extend(collapse_transform(curve, fit_lorentzian_cdf(curve)))
        z = np.array([p.z for p in pts])
        s = np.array([p.s_bar for p in pts])
        assert np.max(np.abs(s - master_curve(z))) < 1e-9

    def test_noiseless_deviation_equals_fit_residual(self):
        curve = synthetic_curve(ROW_500US)
        fit = fit_lorentzian_cdf(curve)
        rms = collapse_rms(collapse_transform(curve, fit))
        assert abs(rms - fit.rms_residual / fit.a) <= 1e-9

    def test_rms_of_exact_master_points(self):
        pts = [CollapsePoint(z=float(z), s_bar=float(master_curve(z)))
               for z in np.linspace(-8, 8, 33)]
        assert collapse_rms(pts) == pytest.approx(0.0, abs=1e-15)

    def test_single_point_arithmetic(self):
        assert collapse_rms([CollapsePoint(z=0.0, s_bar=1.0)]) == pytest.approx(0.5, abs=1e-15)

    def test_noisy_rms_bounded_by_noise_over_span(self):
        sigma = 0.3
        for seed in range(3):
            rng = np.random.default_rng(3000 + seed)
            curve = synthetic_curve(ROW_500US, sigma=sigma, rng=rng)
            fit = fit_lorentzian_cdf(curve)
            rms = collapse_rms(collapse_transform(curve, fit))
            assert rms <= 2 * sigma / fit.a

    def test_empty_input_rejected(self):
        with pytest.raises(ConfigError):
            collapse_rms([])

    def test_collapse_point_validation(self):
        with pytest.raises(DomainError):
            CollapsePoint(z=math.inf, s_bar=0.5)
        with pytest.raises(DomainError):
            CollapsePoint(z=0.0, s_bar=1.5)
