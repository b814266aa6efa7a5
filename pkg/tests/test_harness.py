"""Experiment harness: plans, aggregation, KS, trends, and verification."""

import json

import numpy as np
import pytest

from hdpca import (
    ChiSqOverN,
    ConfigError,
    ExperimentPlan,
    Identity,
    InsufficientDataError,
    NoiseSpec,
    SeedSpec,
    SingleSpike,
    classify,
    ks_statistic,
    predict_eigenvalue_limits,
    run_experiment,
    spike_structure_from_model,
    trend_verdict,
    verify_prediction,
)
from hdpca.errors import ExperimentError
from hdpca.harness import (
    FLAT,
    INCONCLUSIVE,
    TARGET_RIGHT_ANGLE,
    TARGET_ZERO,
    TO_RIGHT_ANGLE,
    TO_ZERO,
    bimodal_split,
)
from hdpca.sampling import RADEMACHER, sample_z, synthesize_x
from hdpca.dual import dual_decompose


def _plan(**overrides):
    base = dict(
        model=Identity(),
        noise=NoiseSpec(),
        n=5,
        d_grid=(50, 500, 5000),
        replicates=20,
        seed=SeedSpec(2024),
        metrics=frozenset({"dual_deviation"}),
    )
    base.update(overrides)
    return ExperimentPlan(**base)


class TestPlanValidation:
    def test_hdlss_shape_required(self):
        with pytest.raises(ConfigError):
            _plan(n=100, d_grid=(50, 500))

    def test_unknown_metric(self):
        with pytest.raises(ConfigError):
            _plan(metrics=frozenset({"nonsense"}))

    def test_angle_indices_defaulted(self):
        plan = _plan(metrics=frozenset({"angles"}))
        assert plan.angle_indices == (1, 2, 3, 4, 5)

    def test_angle_indices_bounded_by_n(self):
        with pytest.raises(ConfigError):
            _plan(metrics=frozenset({"angles"}), angle_indices=(6,))

    def test_subspace_needs_groups(self):
        with pytest.raises(ConfigError):
            _plan(metrics=frozenset({"subspace_angles"}))

    def test_n_grid_normalization(self):
        plan = _plan(n=(5, 10, 20), d_grid=(50, 500))
        assert plan.n_grid == (5, 10, 20)
        assert plan.metric_label("dual_deviation", 10) == "dual_deviation[n=10]"


class TestRunExperiment:
    def test_zero_replicates_empty_report(self):
        report = run_experiment(_plan(replicates=0))
        assert report.rows == ()
        assert report.to_csv_text().strip() == "d,metric,q05,q25,q50,q75,q95,mean,sd,n_rep,failures"

    def test_deviation_shrinks_on_identity(self):
        report = run_experiment(_plan(replicates=30))
        series = report.median_series("dual_deviation")
        assert np.all(np.diff(series) < 0)

    def test_deterministic_serialization(self):
        a = run_experiment(_plan(replicates=10))
        b = run_experiment(_plan(replicates=10))
        assert a.to_csv_text() == b.to_csv_text()
        assert json.dumps(a.to_json_dict(), sort_keys=True) == json.dumps(
            b.to_json_dict(), sort_keys=True
        )

    def test_jobs_do_not_change_results(self):
        plan = _plan(replicates=8, d_grid=(50, 500))
        assert run_experiment(plan, jobs=1).to_csv_text() == run_experiment(plan, jobs=2).to_csv_text()

    def test_progress_callback_order(self):
        seen = []
        run_experiment(_plan(replicates=2), progress=lambda d, n, f: seen.append((d, n, f)))
        assert seen == [(50, 5, 0), (500, 5, 0), (5000, 5, 0)]

    def test_angle_metric_matches_manual_replicate(self):
        plan = _plan(
            model=SingleSpike(alpha=1.5),
            metrics=frozenset({"angles"}),
            angle_indices=(1,),
            d_grid=(50, 500, 5000),
            replicates=5,
        )
        report = run_experiment(plan)
        # recompute replicate 0 at d=500 by hand
        z = sample_z(plan.noise, 500, 5, plan.seed, replicate=0)
        x = synthesize_x(plan.model, z)
        dual = dual_decompose(x)
        from hdpca import angle, inner_products, recover_directions

        dirs = recover_directions(x, dual, 1)
        rows = inner_products(dirs, plan.model, 500, (1,))
        expected = np.degrees(angle(rows.row(1)[0]))
        assert report.sample(500, "angle_u1")[0] == pytest.approx(expected)

    def test_trace_conservation_every_replicate(self):
        # dual trace equals the mean squared column norm, replicate by replicate
        plan = _plan(model=SingleSpike(alpha=1.5), replicates=10, d_grid=(50, 200))
        for rep in range(plan.replicates):
            z = sample_z(plan.noise, 200, 5, plan.seed, replicate=rep)
            x = synthesize_x(plan.model, z)
            dual = dual_decompose(x)
            direct = np.sum(x.x**2) / x.n
            assert abs(dual.eigenvalues.sum() - direct) <= 1e-9 * direct

    def test_excessive_failures_abort(self):
        # with d=3, n=2 Rademacher columns collide often: rank 1 < 2 directions
        plan = _plan(
            noise=NoiseSpec(law=RADEMACHER),
            n=2,
            d_grid=(3,),
            replicates=60,
            metrics=frozenset({"angles"}),
            angle_indices=(1, 2),
        )
        with pytest.raises(ExperimentError):
            run_experiment(plan)

    def test_multi_n_report_layout(self):
        plan = _plan(n=(5, 10), d_grid=(60, 600), replicates=5)
        report = run_experiment(plan)
        text = report.to_csv_text()
        assert "dual_deviation[n=5]" in text and "dual_deviation[n=10]" in text
        assert report.median_over_n("dual_deviation", 600).shape == (2,)


class TestKs:
    def test_self_consistency_rate(self):
        # chi2(5)/5 samples against their own law: ~1% rejections at level 0.01
        rejections = 0
        for seed in range(50):
            rng = np.random.default_rng(seed)
            x = rng.chisquare(5, size=10_000) / 5.0
            if ks_statistic(x, ChiSqOverN(scale=1.0, n=5)).rejected:
                rejections += 1
        assert rejections <= 2

    def test_degenerate_samples_rejected(self):
        assert ks_statistic(np.ones(1000), ChiSqOverN(scale=1.0, n=5)).rejected

    def test_identical_two_sample_zero_statistic(self):
        x = np.linspace(0.1, 2.0, 100)
        result = ks_statistic(x, x.copy())
        assert result.statistic == 0.0
        assert not result.rejected

    def test_shifted_two_sample_rejected(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=5000)
        assert ks_statistic(a, a + 1.0).rejected

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            ks_statistic(np.ones(10), ChiSqOverN(scale=1.0, n=5))


class TestTrendVerdict:
    def test_to_zero(self):
        assert trend_verdict([30.0, 12.0, 4.0], TARGET_ZERO).direction == TO_ZERO

    def test_to_right_angle(self):
        assert (
            trend_verdict([60.0, 75.0, 86.0], TARGET_RIGHT_ANGLE).direction
            == TO_RIGHT_ANGLE
        )

    def test_flat(self):
        assert trend_verdict([45.0, 46.0, 44.0], TARGET_ZERO).direction == FLAT

    def test_inconclusive(self):
        assert trend_verdict([45.0, 30.0, 44.0], TARGET_ZERO).direction == INCONCLUSIVE

    def test_decreasing_but_high_is_not_to_zero(self):
        assert trend_verdict([80.0, 60.0, 40.0], TARGET_ZERO).direction == INCONCLUSIVE

    def test_series_too_short(self):
        with pytest.raises(ConfigError):
            trend_verdict([1.0, 0.5], TARGET_ZERO)


class TestVerifyPrediction:
    def test_consistent_spike_passes(self):
        model = SingleSpike(alpha=1.5)
        plan = _plan(
            model=model,
            n=5,
            d_grid=(100, 1000, 10000),
            replicates=40,
            metrics=frozenset({"angles", "eigenvalue_ratios"}),
            angle_indices=(1, 2),
        )
        report = run_experiment(plan)
        structure = spike_structure_from_model(model, 5)
        verdict = classify(structure)
        limits = predict_eigenvalue_limits(structure, gaussian=True)
        result = verify_prediction(plan, report, verdict, limits)
        names = {c.name for c in result.checks}
        assert "angle_u1_to_zero" in names
        assert "angle_u2_to_right_angle" in names
        assert "spike_ratio_1_stable" in names
        assert "pop_ratio_1_ks" in names
        assert "tail_ratio_2_near_limit" in names
        assert result.passed, [c for c in result.checks if not c.passed]

    def test_mismatched_group_is_config_error(self):
        model = SingleSpike(alpha=1.5)
        plan = _plan(
            model=model,
            n=5,
            d_grid=(100, 1000, 10000),
            replicates=30,
            metrics=frozenset({"subspace_angles"}),
            tracked_groups=((1, 2),),
        )
        report = run_experiment(plan)
        verdict = classify(spike_structure_from_model(model, 5))
        with pytest.raises(ConfigError):
            verify_prediction(plan, report, verdict)


class TestBimodalSplit:
    def test_two_clusters(self):
        rng = np.random.default_rng(0)
        samples = np.concatenate(
            [rng.normal(0.45, 0.01, 300), rng.normal(1.34, 0.02, 300)]
        )
        lo, hi, sep = bimodal_split(samples)
        assert lo == pytest.approx(0.45, abs=0.01)
        assert hi == pytest.approx(1.34, abs=0.01)
        assert sep > 0.5


class TestSeedStability:
    """Trend decisions for the acceptance plans survive master-seed changes."""

    def _decisions(self, name, master):
        import os
        from dataclasses import replace

        from hdpca.cli import build_plan, load_config

        preset = os.path.join(os.path.dirname(__file__), "..", "presets", name + ".toml")
        plan = replace(build_plan(load_config(preset)), seed=SeedSpec(master))
        report = run_experiment(plan)
        out = {}
        for metric, target in self._metrics(plan):
            out[metric] = trend_verdict(
                report.median_series(metric),
                target,
                ceiling=plan.deviation_ceiling if metric == "dual_deviation" else plan.angle_ceiling_deg,
                floor=plan.right_angle_floor_deg,
            ).direction
        return out

    @staticmethod
    def _metrics(plan):
        if "dual_deviation" in plan.metrics:
            yield "dual_deviation", TARGET_ZERO
        if "angles" in plan.metrics:
            yield "angle_u1", TARGET_ZERO
            yield f"angle_u{plan.angle_indices[-1]}", TARGET_RIGHT_ANGLE

    @pytest.mark.parametrize("name", ["identity_limit_gaussian", "spike_consistent"])
    def test_directions_stable_across_five_seeds(self, name):
        reference = self._decisions(name, 1729)
        for master in (1730, 1731, 1732, 1733):
            assert self._decisions(name, master) == reference


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
