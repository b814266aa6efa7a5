"""Spectrum families, sphericity, and the condition catalog.

Expected sphericity values are recomputed by a direct-summation oracle on the
materialized eigenvalue vector, independent of the run-length sums used by
the implementation.
"""

import numpy as np
import pytest

from hdpca import (
    BlockEquicorrelation,
    ConfigError,
    Equicorrelation,
    ExplicitDiagonal,
    ExponentialDecay,
    GrowingSpikes,
    Identity,
    InvalidDimensionError,
    InvalidIndexError,
    MultiSpikeGroups,
    PolynomialDecay,
    PowerLawRho,
    SingleSpike,
    UndefinedSphericityError,
    UnsupportedEigenvectorError,
    condition_check,
    model_from_config,
    population_eigvec_inner,
    sphericity,
)
from hdpca.spectra import ANALYTIC, FAILS, HOLDS, NUMERIC_TREND, EigenSpectrum


def sphericity_oracle(values, k, power=1):
    """Direct summation of (sum lam)^2 / (d sum lam^2) over the tail."""
    values = np.asarray(values, dtype=float)
    tail = values[k - 1 :]
    return tail.sum() ** 2 / (values.size * (tail**2).sum())


class TestEigenvalues:
    def test_equicorrelation_example(self):
        model = Equicorrelation(rho=PowerLawRho(r=0.5))
        np.testing.assert_allclose(model.eigenvalues(3).values, [4.0, 0.25, 0.25])

    def test_identity(self):
        np.testing.assert_allclose(Identity().eigenvalues(5).values, np.ones(5))

    def test_polynomial_decay(self):
        np.testing.assert_allclose(
            PolynomialDecay(beta=1.0).eigenvalues(3).values, [1.0, 0.5, 1.0 / 3.0]
        )

    def test_single_spike(self):
        model = SingleSpike(alpha=2.0, c1=1.0, base=1.0)
        np.testing.assert_allclose(model.eigenvalues(4).values, [16.0, 1.0, 1.0, 1.0])

    def test_sorted_nonincreasing_everywhere(self):
        models = [
            Identity(),
            SingleSpike(alpha=1.5),
            MultiSpikeGroups(groups=((3.0, (1.0,)), (2.0, (1.0,)))),
            PolynomialDecay(beta=0.7),
            ExponentialDecay(c=2.0),
            GrowingSpikes(alpha=0.5, beta=0.4),
            Equicorrelation(rho=PowerLawRho(r=1.0, gamma=0.25)),
            BlockEquicorrelation(
                rho1=PowerLawRho(r=0.3), rho2=PowerLawRho(r=0.29, gamma=0.25)
            ),
        ]
        for model in models:
            for d in (10, 100, 1000):
                vals = model.eigenvalues(d).values
                assert vals.shape == (d,)
                assert np.all(np.diff(vals) <= 1e-12)
                assert np.all(vals >= 0) and vals[0] > 0

    def test_block_equicorrelation_spikes(self):
        model = BlockEquicorrelation(
            rho1=PowerLawRho(r=0.5), rho2=PowerLawRho(r=0.25)
        )
        spec = model.eigenvalues(8)  # block size 4
        assert spec.value(1) == pytest.approx((4 * 0.5 + 0.5) ** 2)
        assert spec.value(2) == pytest.approx((4 * 0.25 + 0.75) ** 2)
        # block-2 tail sorts ahead of block-1 tail
        np.testing.assert_allclose(spec.values[2:5], 0.75**2)
        np.testing.assert_allclose(spec.values[5:], 0.5**2)

    def test_invalid_dimensions(self):
        with pytest.raises(InvalidDimensionError):
            MultiSpikeGroups(groups=((2.0, (1.0, 1.0)),)).eigenvalues(2)
        with pytest.raises(InvalidDimensionError):
            SingleSpike(alpha=0.5, c1=1.0, base=10.0).eigenvalues(4)
        with pytest.raises(InvalidDimensionError):
            BlockEquicorrelation(
                rho1=PowerLawRho(r=0.3), rho2=PowerLawRho(r=0.2)
            ).eigenvalues(9)
        with pytest.raises(InvalidDimensionError):
            ExplicitDiagonal(values=(3.0, 1.0)).eigenvalues(3)

    def test_run_length_sums_match_materialized(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            head = np.sort(rng.uniform(1.0, 5.0, size=rng.integers(1, 6)))[::-1]
            tail_v = rng.uniform(0.0, 1.0)
            spec = EigenSpectrum(head=head, tail=((tail_v, 7), (tail_v / 2, 3)))
            vals = spec.values
            for k in range(1, spec.d + 1):
                assert spec.sum_from(k) == pytest.approx(vals[k - 1 :].sum())
                assert spec.sum_sq_from(k) == pytest.approx((vals[k - 1 :] ** 2).sum())

    def test_large_d_is_cheap(self):
        spec = SingleSpike(alpha=1.5).eigenvalues(10**6)
        assert spec.d == 10**6
        assert spec.sum_from(2) == pytest.approx(10**6 - 1)


class TestSphericity:
    def test_equal_eigenvalues_attain_upper_bound(self):
        spec = EigenSpectrum(head=(1.0, 1.0, 1.0, 1.0))
        assert sphericity(spec, 1).epsilon_k == pytest.approx(1.0)

    def test_spiked_example(self):
        spec = EigenSpectrum(head=(4.0, 1.0, 1.0, 1.0))
        rep = sphericity(spec, 1)
        assert rep.epsilon_k == pytest.approx(49.0 / 76.0)
        assert rep.epsilon_k == pytest.approx(sphericity_oracle([4, 1, 1, 1], 1))
        assert rep.d_epsilon_k == pytest.approx(4 * 49.0 / 76.0)

    def test_tail_start_index_uses_ambient_d(self):
        spec = EigenSpectrum(head=(4.0, 1.0, 1.0, 1.0))
        assert sphericity(spec, 2).epsilon_k == pytest.approx(0.75)

    def test_most_singular_case_attains_lower_bound(self):
        spec = EigenSpectrum(head=(1.0, 0.0, 0.0, 0.0))
        assert sphericity(spec, 1).epsilon_k == pytest.approx(0.25)

    def test_all_zero_tail_is_undefined(self):
        spec = EigenSpectrum(head=(1.0, 0.0, 0.0, 0.0))
        with pytest.raises(UndefinedSphericityError):
            sphericity(spec, 2)

    def test_matches_oracle_on_random_spectra(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            vals = np.sort(rng.uniform(0.0, 3.0, size=rng.integers(3, 12)))[::-1]
            vals[0] += 1.0
            spec = EigenSpectrum(head=vals)
            for k in (1, 2, len(vals)):
                assert sphericity(spec, k).epsilon_k == pytest.approx(
                    sphericity_oracle(vals, k)
                )

    def test_scale_invariance(self):
        rng = np.random.default_rng(3)
        vals = np.sort(rng.uniform(0.1, 4.0, size=9))[::-1]
        for c in (1e-6, 0.5, 7.0, 1e8):
            a = sphericity(EigenSpectrum(head=vals), 2).epsilon_k
            b = sphericity(EigenSpectrum(head=c * vals), 2).epsilon_k
            assert a == pytest.approx(b)

    def test_bounds_hold_for_every_family(self):
        models = [
            Identity(),
            SingleSpike(alpha=2.0),
            PolynomialDecay(beta=1.5),
            ExponentialDecay(c=2.0),
            GrowingSpikes(alpha=0.5, beta=0.4),
            Equicorrelation(rho=PowerLawRho(r=0.5)),
        ]
        for model in models:
            for d in (10, 100, 1000):
                eps = sphericity(model.eigenvalues(d), 1).epsilon_k
                assert 1.0 / d - 1e-12 <= eps <= 1.0 + 1e-12


class TestEquicorrelationOracle:
    """Dense factor-form oracle: Sigma = F F' with F = (1-rho) I + rho J."""

    @pytest.mark.parametrize("d,rho", [(5, 0.5), (20, 0.3), (50, 0.8)])
    def test_spectrum_matches_dense_factor_form(self, d, rho):
        F = (1 - rho) * np.eye(d) + rho * np.ones((d, d))
        dense = np.sort(np.linalg.eigvalsh(F @ F))[::-1]
        model = Equicorrelation(rho=PowerLawRho(r=rho))
        spec = model.eigenvalues(d)
        np.testing.assert_allclose(spec.values, dense, rtol=1e-10)
        expected_trace = d * (1 - rho) ** 2 + (
            (d * rho + 1 - rho) ** 2 - (1 - rho) ** 2
        )
        assert spec.trace == pytest.approx(expected_trace)

    def test_block_spectrum_matches_dense(self):
        m, r1, r2 = 6, 0.5, 0.2
        blocks = []
        for rho in (r1, r2):
            F = (1 - rho) * np.eye(m) + rho * np.ones((m, m))
            blocks.append(F @ F)
        sigma = np.block(
            [[blocks[0], np.zeros((m, m))], [np.zeros((m, m)), blocks[1]]]
        )
        dense = np.sort(np.linalg.eigvalsh(sigma))[::-1]
        model = BlockEquicorrelation(
            rho1=PowerLawRho(r=r1), rho2=PowerLawRho(r=r2)
        )
        np.testing.assert_allclose(model.eigenvalues(2 * m).values, dense, rtol=1e-10)


class TestConditionCatalog:
    def test_null_and_mild_spike_hold(self):
        grid = (100, 1000, 10000)
        v = condition_check(Identity(), 1, grid)
        assert (v.epsilon_condition, v.strong_epsilon_condition) == (HOLDS, HOLDS)
        v = condition_check(SingleSpike(alpha=0.5), 1, grid)
        assert (v.epsilon_condition, v.strong_epsilon_condition) == (HOLDS, HOLDS)
        assert v.basis == ANALYTIC

    def test_sharp_spike_and_exponential_fail(self):
        grid = (100, 1000, 10000)
        assert condition_check(SingleSpike(alpha=1.5), 1, grid).epsilon_condition == FAILS
        assert condition_check(SingleSpike(alpha=1.0), 1, grid).epsilon_condition == FAILS
        v = condition_check(ExponentialDecay(c=2.0), 1, grid)
        assert (v.epsilon_condition, v.strong_epsilon_condition) == (FAILS, FAILS)

    def test_sharp_spike_past_k_recovers(self):
        # removing the spike leaves a flat tail
        v = condition_check(SingleSpike(alpha=1.5), 2, (100, 1000, 10000))
        assert (v.epsilon_condition, v.strong_epsilon_condition) == (HOLDS, HOLDS)

    @pytest.mark.parametrize(
        "beta,eps,strong",
        [
            (0.5, HOLDS, HOLDS),
            (0.75, HOLDS, FAILS),
            (0.9, HOLDS, FAILS),
            (1.0, HOLDS, FAILS),
            (1.5, FAILS, FAILS),
        ],
    )
    def test_polynomial_thresholds(self, beta, eps, strong):
        v = condition_check(PolynomialDecay(beta=beta), 1, (100, 1000, 10000))
        assert (v.epsilon_condition, v.strong_epsilon_condition) == (eps, strong)

    @pytest.mark.parametrize(
        "alpha,beta,eps,strong",
        [
            (0.5, 0.4, HOLDS, HOLDS),   # 2a+b = 1.4
            (0.55, 0.4, HOLDS, FAILS),  # 1.5, closed boundary
            (0.75, 0.4, HOLDS, FAILS),  # 1.9
            (0.8, 0.4, FAILS, FAILS),   # 2.0, closed boundary
            (0.9, 0.4, FAILS, FAILS),   # 2.2
        ],
    )
    def test_growing_spike_thresholds(self, alpha, beta, eps, strong):
        v = condition_check(GrowingSpikes(alpha=alpha, beta=beta), 1, (100, 1000, 10000))
        assert (v.epsilon_condition, v.strong_epsilon_condition) == (eps, strong)

    def test_errors(self):
        with pytest.raises(InvalidIndexError):
            condition_check(Identity(), 200, (100, 1000, 10000))
        with pytest.raises(ConfigError):
            condition_check(Identity(), 1, (100, 1000))
        with pytest.raises(ConfigError):
            condition_check(Identity(), 1, (100, 100, 1000))


class TestTrendAgreesWithAnalytic:
    """Forced numeric-trend verdicts match the catalog away from boundaries.

    Decade growth below a factor 2 (rate exponents under ~0.3) is unresolvable
    by the conservative trend rule, so near-boundary parameters are excluded.
    """

    GRID = (1000, 10**4, 10**5, 10**6)

    @pytest.mark.parametrize(
        "model",
        [
            Identity(),
            SingleSpike(alpha=2.0),
            SingleSpike(alpha=0.5),
            PolynomialDecay(beta=0.3),
            PolynomialDecay(beta=1.5),
            ExponentialDecay(c=2.0),
            GrowingSpikes(alpha=0.2, beta=0.2),
            Equicorrelation(rho=PowerLawRho(r=0.3)),
            Equicorrelation(rho=PowerLawRho(r=1.0, gamma=0.75)),
            BlockEquicorrelation(rho1=PowerLawRho(r=0.3), rho2=PowerLawRho(r=0.2)),
        ],
    )
    def test_agreement(self, model):
        analytic = condition_check(model, 1, self.GRID, method="analytic")
        trend = condition_check(model, 1, self.GRID, method="trend")
        assert trend.basis == NUMERIC_TREND
        assert trend.epsilon_condition == analytic.epsilon_condition
        assert trend.strong_epsilon_condition == analytic.strong_epsilon_condition


class TestTrackedEigenvectors:
    def test_equicorrelation_leading_inner(self):
        model = Equicorrelation(rho=PowerLawRho(r=0.5))
        e1 = np.zeros(4)
        e1[0] = 1.0
        assert population_eigvec_inner(model, 4, 1, e1) == pytest.approx(0.5)

    def test_self_inner_product_is_one(self):
        model = Equicorrelation(rho=PowerLawRho(r=0.5))
        u1 = np.ones(9) / 3.0
        assert population_eigvec_inner(model, 9, 1, u1) == pytest.approx(1.0)

    def test_diagonal_family_axes(self):
        model = SingleSpike(alpha=2.0)
        e2 = np.zeros(4)
        e2[1] = 1.0
        assert population_eigvec_inner(model, 4, 1, e2) == 0.0
        assert population_eigvec_inner(model, 4, 2, e2) == 1.0

    def test_helmert_completion_is_orthonormal(self):
        model = Equicorrelation(rho=PowerLawRho(r=0.4))
        d = 12
        basis = np.zeros((d, d))
        for j in range(1, d + 1):
            for axis in range(d):
                e = np.zeros(d)
                e[axis] = 1.0
                basis[j - 1, axis] = population_eigvec_inner(model, d, j, e)
        np.testing.assert_allclose(basis @ basis.T, np.eye(d), atol=1e-12)

    def test_completeness_sums_to_one(self):
        rng = np.random.default_rng(5)
        model = BlockEquicorrelation(
            rho1=PowerLawRho(r=0.4), rho2=PowerLawRho(r=0.2)
        )
        d = 16
        v = rng.normal(size=d)
        v /= np.linalg.norm(v)
        total = sum(
            population_eigvec_inner(model, d, j, v) ** 2 for j in range(1, d + 1)
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_block_eigenvectors_diagonalize_dense_sigma(self):
        m, r1, r2 = 5, 0.5, 0.2
        model = BlockEquicorrelation(rho1=PowerLawRho(r=r1), rho2=PowerLawRho(r=r2))
        d = 2 * m
        F1 = (1 - r1) * np.eye(m) + r1 * np.ones((m, m))
        F2 = (1 - r2) * np.eye(m) + r2 * np.ones((m, m))
        sigma = np.block([[F1 @ F1, np.zeros((m, m))], [np.zeros((m, m)), F2 @ F2]])
        spec = model.eigenvalues(d)
        for j in range(1, d + 1):
            u = np.array(
                [
                    population_eigvec_inner(model, d, j, _axis(d, a))
                    for a in range(d)
                ]
            )
            np.testing.assert_allclose(sigma @ u, spec.value(j) * u, atol=1e-9)

    def test_eigen_coords(self):
        model = Equicorrelation(rho=PowerLawRho(r=0.5))
        v = np.zeros(4)
        v[2] = 1.0
        assert population_eigvec_inner(model, 4, 3, v, coords="eigen") == 1.0

    def test_untracked_index(self):
        with pytest.raises(UnsupportedEigenvectorError):
            population_eigvec_inner(Identity(), 4, 5, np.ones(4) / 2.0)

    def test_non_unit_vector_rejected(self):
        with pytest.raises(ValueError):
            population_eigvec_inner(Identity(), 4, 1, np.ones(4))


def _axis(d, a):
    e = np.zeros(d)
    e[a] = 1.0
    return e


class TestSerialization:
    def test_round_trip_all_families(self):
        models = [
            Identity(),
            SingleSpike(alpha=1.5, c1=2.0, base=0.5),
            MultiSpikeGroups(groups=((3.0, (1.0,)), (1.5, (2.0, 1.0))), base=1.0),
            PolynomialDecay(beta=0.9),
            ExponentialDecay(c=3.0),
            GrowingSpikes(alpha=0.5, beta=0.4, c1=2.0, c2=1.0),
            Equicorrelation(rho=PowerLawRho(r=1.0, gamma=0.25)),
            BlockEquicorrelation(rho1=PowerLawRho(r=0.3), rho2=PowerLawRho(r=1.0, gamma=0.75)),
            ExplicitDiagonal(values=(4.0, 1.0, 1.0)),
        ]
        for model in models:
            clone = model_from_config(model.to_config())
            assert clone == model

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError):
            model_from_config({"family": "identity", "params": {}, "extra": 1})
        with pytest.raises(ConfigError):
            model_from_config({"family": "identity", "params": {"x": 1}})
        with pytest.raises(ConfigError):
            model_from_config({"family": "no_such_family", "params": {}})
        with pytest.raises(ConfigError):
            model_from_config(
                {"family": "single_spike", "params": {"alpha": 1.5}, "mixing": "bogus"}
            )


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
