import json

import numpy as np
import pytest

from gaussq.experiments import (ExperimentConfig, ExperimentError,
                                reference_fbm_queue_samples,
                                rescaled_input_samples,
                                rescaled_workload_samples,
                                run_input_flt, run_modulus_diagnostic,
                                run_omega_gamma_decay, run_workload_flt)
from gaussq.stats import dkw_threshold
from gaussq.variance import VarianceModel

FBM05 = VarianceModel.fbm(0.5)
FBM07 = VarianceModel.fbm(0.7)
PSUM = VarianceModel.power_sum(0.4, 0.7)


def small_config(model=FBM07, regime="heavy", c_values=(1.0, 0.5), reps=400):
    return ExperimentConfig(model=model, regime=regime, c_values=c_values,
                            time_points=(0.0, 1.0), replications=reps,
                            points_per_unit=16, master_seed=7)


class TestExperimentConfig:
    def test_heavy_requires_decreasing_c(self):
        with pytest.raises(ValueError):
            small_config(c_values=(0.5, 1.0))

    def test_light_requires_increasing_c(self):
        ExperimentConfig(model=FBM07, regime="light", c_values=(1.0, 2.0),
                         time_points=(0.0, 1.0))
        with pytest.raises(ValueError):
            ExperimentConfig(model=FBM07, regime="light", c_values=(2.0, 1.0),
                             time_points=(0.0, 1.0))

    def test_time_points_must_include_zero(self):
        with pytest.raises(ValueError):
            ExperimentConfig(model=FBM07, regime="heavy", c_values=(1.0,),
                             time_points=(0.5, 1.0))

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            ExperimentConfig(model=FBM07, regime="heavy", c_values=(1.0,),
                             time_points=(0.0, 1.0), points_per_unit=8)

    def test_json_round_trip(self):
        cfg = small_config()
        doc = {"model": cfg.model.to_dict(), "regime": cfg.regime,
               "c_values": list(cfg.c_values),
               "time_points": list(cfg.time_points),
               "replications": cfg.replications,
               "points_per_unit": cfg.points_per_unit,
               "master_seed": cfg.master_seed}
        assert ExperimentConfig.from_json(json.dumps(doc)) == cfg


class TestRescaledWorkloadSamples:
    def test_shapes_and_nonnegativity(self):
        res = rescaled_workload_samples(PSUM, 0.8, (0.0, 0.5, 1.0), 100, 16,
                                        10.0, 1)
        assert res.samples.shape == (100, 3)
        assert res.increment.shape == (100,)
        assert np.all(res.samples >= 0.0)
        assert res.delta > 0.0

    def test_deterministic_across_calls(self):
        a = rescaled_workload_samples(FBM07, 0.5, (0.0, 1.0), 150, 16, 10.0, 3)
        b = rescaled_workload_samples(FBM07, 0.5, (0.0, 1.0), 150, 16, 10.0, 3)
        np.testing.assert_array_equal(a.samples, b.samples)
        np.testing.assert_array_equal(a.increment, b.increment)

    def test_short_lookback_flags_truncation(self):
        res = rescaled_workload_samples(FBM05, 1.0, (0.0, 1.0), 200, 16,
                                        0.05, 3)
        assert res.truncation_rate > 0.05


class TestRescaledInputSamples:
    def test_marginal_variance_is_t_power(self):
        # Var X(delta t)/sigma(delta) = sigma^2(delta t)/sigma^2(delta);
        # for fBm this is t^{2H} at every c
        reps = 4000
        samples, d = rescaled_input_samples(FBM07, 0.3, (0.0, 0.5, 1.0),
                                            reps, 16, 9)
        assert d == pytest.approx(0.3 ** (1.0 / (0.7 - 1.0)), rel=1e-9)
        np.testing.assert_array_equal(samples[:, 0], 0.0)
        for j, t in ((1, 0.5), (2, 1.0)):
            expected = t ** 1.4
            se = expected * np.sqrt(2.0 / reps)
            assert abs(samples[:, j].var() - expected) <= 4 * se

    def test_general_model_variance_normalization(self):
        reps = 4000
        samples, d = rescaled_input_samples(PSUM, 0.8, (0.0, 1.0), reps, 16, 2)
        expected = 1.0  # t = 1 rescaled variance is exactly 1 by construction
        se = expected * np.sqrt(2.0 / reps)
        assert abs(samples[:, 1].var() - expected) <= 4 * se


class TestWorkloadFlt:
    def test_fbm_self_similarity_verdict(self):
        # an fBm input is already the limit law at every c, so both c cells
        # must match the reference within the exact DKW threshold
        rep = run_workload_flt(small_config())
        assert rep.verdict
        thr = dkw_threshold(400, 400, 0.01)
        for entry in rep.per_c:
            assert entry["threshold"] == pytest.approx(thr)
            assert all(ks <= thr for ks in entry["ks_by_timepoint"].values())

    def test_report_deterministic(self):
        a = run_workload_flt(small_config()).to_json()
        b = run_workload_flt(small_config()).to_json()
        assert a == b

    def test_general_model_threshold_inflated(self):
        cfg = ExperimentConfig(model=PSUM, regime="heavy", c_values=(1.0,),
                               time_points=(0.0, 1.0), replications=200,
                               points_per_unit=16, master_seed=1)
        rep = run_workload_flt(cfg)
        assert rep.per_c[0]["threshold"] == pytest.approx(
            1.5 * dkw_threshold(200, 200, 0.01))
        assert rep.reference_summary["H_used"] == 0.7

    def test_light_regime_uses_lambda(self):
        cfg = ExperimentConfig(model=PSUM, regime="light", c_values=(1.0,),
                               time_points=(0.0, 1.0), replications=200,
                               points_per_unit=16, master_seed=1)
        assert run_workload_flt(cfg).reference_summary["H_used"] == 0.4

    def test_truncation_gate_aborts(self):
        cfg = ExperimentConfig(model=FBM05, regime="heavy", c_values=(1.0,),
                               time_points=(0.0, 1.0), replications=200,
                               points_per_unit=16, kappa=0.05, master_seed=3)
        with pytest.raises(ExperimentError):
            run_workload_flt(cfg)

    def test_csv_rows_layout(self):
        rep = run_workload_flt(small_config(reps=100))
        rows = rep.csv_rows()
        # one row per (c, label) with labels {0, 1, increment}
        assert len(rows) == 2 * 3
        for c, delta, label, ks, thr, ok in rows:
            assert delta > 0 and 0.0 <= ks <= 1.0 and thr > 0
            assert ok == (ks <= thr)
            assert label in {"0", "1", "increment"}


class TestInputFlt:
    def test_fbm_matches_reference(self):
        rep = run_input_flt(small_config())
        assert rep.verdict
        for entry in rep.per_c:
            assert entry["drift_error"] <= 1e-10
            assert "0" not in entry["ks_by_timepoint"]  # degenerate at t = 0

    def test_increment_statistic_present_with_two_times(self):
        cfg = ExperimentConfig(model=FBM07, regime="heavy", c_values=(1.0,),
                               time_points=(0.0, 0.5, 1.0), replications=200,
                               points_per_unit=16, master_seed=4)
        rep = run_input_flt(cfg)
        assert "increment" in rep.per_c[0]["ks_by_timepoint"]


class TestOmegaGammaDecay:
    def test_decay_above_critical_exponent(self):
        rep = run_omega_gamma_decay(FBM05, "heavy", 1.0, 0.9, (1.0, 8.0),
                                    400, 5, eta=1.0)
        p1, p8 = rep.p_values
        assert p8 < 0.5 * p1

    def test_no_decay_below_critical_exponent(self):
        rep = run_omega_gamma_decay(FBM05, "heavy", 1.0, 0.3, (1.0, 8.0),
                                    400, 5, eta=1.0)
        p1, p8 = rep.p_values
        assert p8 > 0.8 * p1 and p8 > 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            run_omega_gamma_decay(FBM05, "medium", 1.0, 0.9, (1.0,), 10, 0)
        with pytest.raises(ValueError):
            run_omega_gamma_decay(FBM05, "heavy", 1.0, 0.9, (-1.0,), 10, 0)
        with pytest.raises(ValueError):
            run_omega_gamma_decay(FBM05, "heavy", 1.0, -0.9, (1.0,), 10, 0)


class TestModulusDiagnostic:
    def test_probabilities_and_bounds_shrink_with_zeta(self):
        rep = run_modulus_diagnostic(FBM05, 1.0, (0.25, 0.0625), 1.0, 200, 2)
        assert rep.p_values[1] <= rep.p_values[0]
        assert rep.entropy_bounds[1] < rep.entropy_bounds[0]
        assert all(0.0 <= p <= 1.0 for p in rep.p_values)

    def test_zeta_grid_must_decrease(self):
        with pytest.raises(ValueError):
            run_modulus_diagnostic(FBM05, 1.0, (0.1, 0.25), 1.0, 10, 0)
        with pytest.raises(ValueError):
            run_modulus_diagnostic(FBM05, 1.0, (2.0, 0.25), 1.0, 10, 0)


class TestReferenceQueue:
    def test_invalid_hurst(self):
        with pytest.raises(ValueError):
            reference_fbm_queue_samples(1.0, (0.0, 1.0), 10, 16, 10.0, 0)

    @pytest.mark.slow
    def test_brownian_reference_marginal_mean(self):
        # H = 1/2 reference: Q(0) is Exp(2) up to O(sqrt(h)) grid bias
        res = reference_fbm_queue_samples(0.5, (0.0,), 4000, 256, 20.0, 8)
        q0 = res.samples[:, 0]
        se = q0.std(ddof=1) / np.sqrt(q0.size)
        assert 0.5 - 0.7 * np.sqrt(1.0 / 256) - 3 * se <= q0.mean() <= 0.5 + 3 * se
