import math
from unittest import skipUnless

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings
from scipy.special import erfc

from copulas import legendre
from copulas.coefficients import estimate_coefficient, pseudo_observations, stable_mean
from copulas.exceptions import DimensionMismatch, DomainError, PairingError
from copulas.ksample import (
    PairStatistics,
    TestConfig,
    chi2_upper_tail,
    influence_terms,
    ksample_test,
    pair_statistic_sequence,
    pairwise_anova,
    select_dimension,
    select_pair,
    selection_penalty,
    variance_independent,
    variance_paired,
)

COMONOTONE = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
ANTIMONOTONE = np.array([[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]])


def gaussian_sample(n, rho, seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, 2))
    return np.column_stack([z[:, 0], rho * z[:, 0] + np.sqrt(1.0 - rho ** 2) * z[:, 1]])


def brute_influence(ps):
    """Double loop over the influence formula."""
    u = ps.data
    n = ps.n
    l1 = legendre.SQRT3 * (2.0 * u - 1.0)
    terms = np.empty(n)
    for i in range(n):
        first = sum((float(u[i, 0] <= u[k, 0]) - u[k, 0]) * l1[k, 1] for k in range(n))
        second = sum((float(u[i, 1] <= u[k, 1]) - u[k, 1]) * l1[k, 0] for k in range(n))
        terms[i] = l1[i, 0] * l1[i, 1] + 2.0 * legendre.SQRT3 * (first + second) / n
    return terms


def synthetic_pair(ell, m, value, n=100):
    return PairStatistics(
        ell=ell, m=m, v_sequence=np.array([value]), d_selected=1,
        scale=float(n), n_eff=float(n), n_ell=n, n_m=n,
    )


class TestConfigTestCase(SimpleTestCase):

    def test_defaults(self):
        """Test default test configuration."""
        cfg = TestConfig()
        self.assertEqual((cfg.d_max, cfg.alpha_penalty, cfg.pairing, cfg.level), (3, 1.0, 'paired', 0.05))

    def test_validation(self):
        """Out-of-range fields raise ValidationError."""
        for fields in ({'d_max': 1}, {'d_max': 7}, {'alpha_penalty': 0.0}, {'level': 1.0},
                       {'pairing': 'matched'}, {'ties': 'ignore'}):
            with self.subTest(fields=fields), self.assertRaises(ValidationError):
                TestConfig(**fields)

    @override_settings(COPULA_TEST={'D_MAX': 4, 'MAX_D_MAX': 6, 'ALPHA_PENALTY': 2.0,
                                    'PAIRING': 'independent', 'LEVEL': 0.1, 'TIES': 'average'})
    def test_from_settings(self):
        """Settings supply defaults and None overrides are ignored."""
        cfg = TestConfig.from_settings(d_max=None, level=0.01)
        self.assertEqual(cfg.d_max, 4)
        self.assertEqual(cfg.alpha_penalty, 2.0)
        self.assertEqual(cfg.level, 0.01)
        self.assertTrue(cfg.independent)

    @override_settings(COPULA_TEST={'D_MAX': 3, 'MAX_D_MAX': 4, 'ALPHA_PENALTY': 1.0,
                                    'PAIRING': 'paired', 'LEVEL': 0.05, 'TIES': 'error'})
    def test_max_d_max_from_settings(self):
        """The largest accepted d_max comes from settings."""
        self.assertEqual(TestConfig(d_max=4).d_max, 4)
        with self.assertRaisesMessage(ValidationError, 'between 2 and 4'):
            TestConfig(d_max=5)


class ChiSquareTailTestCase(SimpleTestCase):

    def test_critical_values(self):
        """Test known chi-square tail values."""
        self.assertEqual(chi2_upper_tail(0.0), 1.0)
        self.assertAlmostEqual(chi2_upper_tail(3.841459), 0.05, places=6)
        self.assertAlmostEqual(chi2_upper_tail(6.634897), 0.01, places=6)

    def test_negative_rejected(self):
        """Test negative arguments are rejected."""
        with self.assertRaises(DomainError):
            chi2_upper_tail(-1.0)

    def test_strictly_decreasing(self):
        """The tail probability falls strictly from 1 as x grows."""
        tails = [chi2_upper_tail(x) for x in np.linspace(0.0, 60.0, 601)]
        self.assertEqual(tails[0], 1.0)
        self.assertTrue(np.all(np.diff(tails) < 0.0))
        self.assertGreater(tails[-1], 0.0)


class SelectionTestCase(SimpleTestCase):
    """Test cases for the penalised selection rules."""

    def test_dimension_example(self):
        """With q = 1 the objective (-0.9, 48, 47.1) peaks at k = 2."""
        self.assertEqual(select_dimension([0.1, 50.0, 50.1], TestConfig(), math.e), 2)

    def test_dimension_ties_go_to_smallest(self):
        """Test equal penalized values pick the smallest dimension."""
        self.assertEqual(select_dimension([1.0, 2.0, 3.0], TestConfig(), math.e), 1)

    def test_dimension_empty(self):
        """Test an empty sequence is rejected."""
        with self.assertRaises(DomainError):
            select_dimension([], TestConfig(), 10.0)

    def test_pair_selection(self):
        """Only the pair (2, 3) differs, so s(n) = 3."""
        pairs = [synthetic_pair(1, 2, 0.0), synthetic_pair(1, 3, 0.0), synthetic_pair(2, 3, 100.0)]
        self.assertEqual(select_pair(pairs, TestConfig(), penalty=1.0), 3)

    def test_pair_selection_under_null(self):
        """Test the first pair is kept under the null."""
        pairs = [synthetic_pair(1, 2, 0.5), synthetic_pair(1, 3, 0.2), synthetic_pair(2, 3, 0.1)]
        self.assertEqual(select_pair(pairs, TestConfig()), 1)

    def test_paired_penalty(self):
        """Test the paired penalty uses log n."""
        self.assertAlmostEqual(selection_penalty([100, 100, 100], TestConfig(alpha_penalty=2.0)), 2 * math.log(100))

    def test_independent_penalty_two_samples(self):
        """Reduces to alpha log(2 n1 n2 / (n1 + n2))."""
        cfg = TestConfig(pairing='independent')
        self.assertAlmostEqual(selection_penalty([100, 300], cfg), math.log(150.0), places=12)

    def test_independent_penalty_equal_sizes(self):
        """Equal sizes give alpha log(n)."""
        cfg = TestConfig(pairing='independent', alpha_penalty=1.5)
        self.assertAlmostEqual(selection_penalty([80] * 4, cfg), 1.5 * math.log(80), places=12)


class PairStatisticTestCase(SimpleTestCase):

    def test_hand_example(self):
        """V_1 = 3 (11/9 + 5/9)^2 = 256/27 for the n = 3 comonotone and antimonotone samples."""
        stats = pair_statistic_sequence(
            pseudo_observations(COMONOTONE), pseudo_observations(ANTIMONOTONE), TestConfig(d_max=2)
        )
        self.assertEqual(len(stats.v_sequence), 1)
        self.assertAlmostEqual(stats.v_sequence[0], 256 / 27, places=12)
        self.assertEqual(stats.d_selected, 1)

    def test_sequence_nondecreasing(self):
        """Test statistics grow with the dimension."""
        stats = pair_statistic_sequence(
            pseudo_observations(gaussian_sample(100, 0.5, 1)),
            pseudo_observations(gaussian_sample(100, 0.2, 2)),
            TestConfig(d_max=5),
        )
        self.assertTrue(np.all(np.diff(stats.v_sequence) >= 0))

    def test_independent_scale(self):
        """Independent pairs scale by n1 n2 / (n1 + n2)."""
        stats = pair_statistic_sequence(
            pseudo_observations(gaussian_sample(60, 0.5, 1)),
            pseudo_observations(gaussian_sample(40, 0.2, 2)),
            TestConfig(pairing='independent'),
        )
        self.assertAlmostEqual(stats.scale, 24.0)
        self.assertAlmostEqual(stats.n_eff, 48.0)

    def test_paired_unequal_sizes(self):
        """Test paired sequences need equal sizes."""
        with self.assertRaises(PairingError):
            pair_statistic_sequence(
                pseudo_observations(gaussian_sample(60, 0.5, 1)),
                pseudo_observations(gaussian_sample(40, 0.2, 2)),
                TestConfig(),
            )


class VarianceTestCase(SimpleTestCase):
    """Test cases for the influence terms and variance estimates."""

    def test_influence_matches_double_loop(self):
        """Test vectorised influence against a direct loop."""
        for seed in (1, 2):
            ps = pseudo_observations(gaussian_sample(25, 0.6, seed))
            np.testing.assert_allclose(influence_terms(ps), brute_influence(ps), atol=1e-12)

    def test_influence_hand_values(self):
        """(-1/9, 11/9, 23/9) for comonotone and -5/9 throughout for antimonotone."""
        np.testing.assert_allclose(influence_terms(pseudo_observations(COMONOTONE)), [-1 / 9, 11 / 9, 23 / 9], atol=1e-14)
        np.testing.assert_allclose(influence_terms(pseudo_observations(ANTIMONOTONE)), [-5 / 9] * 3, atol=1e-14)

    def test_influence_mean_is_coefficient(self):
        """Without ties the correction terms average to zero."""
        ps = pseudo_observations(gaussian_sample(70, 0.3, 9))
        self.assertAlmostEqual(float(stable_mean(influence_terms(ps))), estimate_coefficient(ps, (1, 1)), places=12)

    def test_paired_hand_value(self):
        """Test the paired variance on a hand-computed case."""
        self.assertAlmostEqual(
            variance_paired(pseudo_observations(COMONOTONE), pseudo_observations(ANTIMONOTONE)), 32 / 27, places=13
        )

    def test_independent_weights(self):
        """Test the independent variance weights by sizes."""
        ps1 = pseudo_observations(gaussian_sample(30, 0.6, 1))
        ps2 = pseudo_observations(gaussian_sample(90, -0.2, 2))
        m1, m2 = brute_influence(ps1), brute_influence(ps2)
        expected = 0.75 * np.var(m1) + 0.25 * np.var(m2)
        self.assertAlmostEqual(variance_independent(ps1, ps2), expected, places=12)

    def test_identical_paired_samples(self):
        """Test identical paired samples give zero variance."""
        ps = pseudo_observations(gaussian_sample(30, 0.6, 1))
        self.assertEqual(variance_paired(ps, ps), 0.0)


class KSampleTestTestCase(SimpleTestCase):
    """Test cases for the data-driven K-sample test."""

    def test_hand_example(self):
        """V = (256/27) / (32/27) = 8 and p = erfc(2)."""
        result = ksample_test([COMONOTONE, ANTIMONOTONE], TestConfig(d_max=2))
        self.assertAlmostEqual(result.raw_statistic, 256 / 27, places=12)
        self.assertAlmostEqual(result.sigma2_hat, 32 / 27, places=12)
        self.assertAlmostEqual(result.statistic, 8.0, places=11)
        self.assertAlmostEqual(result.p_value, float(erfc(2.0)), places=12)
        self.assertTrue(result.reject)
        self.assertEqual(result.selected_pair, (1, 2))

    def test_identical_samples(self):
        """Identical copies have zero statistic and zero variance: p = 1, not rejected."""
        sample = gaussian_sample(50, 0.5, 3)
        with self.assertLogs('copulas.ksample', level='WARNING'):
            result = ksample_test([sample, sample.copy(), sample.copy()])
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.p_value, 1.0)
        self.assertTrue(result.degenerate)
        self.assertFalse(result.reject)

    def test_strong_alternative(self):
        """Test a clear difference is rejected."""
        dependent = gaussian_sample(200, 0.9, 1)
        independent = np.random.default_rng(2).random((200, 2))
        result = ksample_test([dependent, independent])
        self.assertTrue(result.reject)
        self.assertLess(result.p_value, 1e-6)

    def test_decision_matches_p_value(self):
        """Test the decision agrees with the level."""
        samples = [gaussian_sample(80, rho, seed) for seed, rho in enumerate((0.3, 0.35, 0.3), start=1)]
        result = ksample_test(samples, TestConfig(level=0.1))
        self.assertAlmostEqual(result.p_value, chi2_upper_tail(result.statistic), places=15)
        self.assertEqual(result.reject, result.p_value < 0.1)
        self.assertEqual(len(result.cumulative), 3)
        self.assertEqual(set(result.d_per_pair), {(1, 2), (1, 3), (2, 3)})

    def test_rank_invariance(self):
        """Monotone transforms of the margins leave the result unchanged."""
        samples = [gaussian_sample(60, 0.5, 1), gaussian_sample(60, 0.1, 2)]
        transformed = [np.column_stack([np.exp(s[:, 0]), 2.0 * s[:, 1] + 7.0]) for s in samples]
        self.assertEqual(ksample_test(samples), ksample_test(transformed))

    def test_rank_invariance_three_independent_samples(self):
        """The whole TestResult is bit-identical after monotone transforms."""
        cfg = TestConfig(pairing='independent')
        samples = [gaussian_sample(n, rho, seed) for seed, (n, rho) in enumerate(((50, 0.6), (70, 0.1), (40, 0.4)))]
        transformed = [np.column_stack([np.arctan(s[:, 0]), np.exp(3.0 * s[:, 1])]) for s in samples]
        self.assertEqual(ksample_test(samples, cfg), ksample_test(transformed, cfg))

    def test_pair_symmetry(self):
        """Swapping samples 1 and 2 leaves the sequence and the statistic unchanged."""
        first, second = gaussian_sample(80, 0.6, 4), gaussian_sample(80, 0.1, 5)
        for cfg in (TestConfig(), TestConfig(pairing='independent')):
            with self.subTest(pairing=cfg.pairing):
                forward = pair_statistic_sequence(pseudo_observations(first), pseudo_observations(second), cfg)
                backward = pair_statistic_sequence(pseudo_observations(second), pseudo_observations(first), cfg)
                np.testing.assert_array_equal(forward.v_sequence, backward.v_sequence)
                self.assertEqual(forward.d_selected, backward.d_selected)
                self.assertAlmostEqual(
                    ksample_test([first, second], cfg).statistic,
                    ksample_test([second, first], cfg).statistic,
                    places=12,
                )

    def test_pair_symmetry_unequal_sizes(self):
        """Independent pairs of unequal sizes are symmetric too."""
        first, second = gaussian_sample(60, 0.6, 6), gaussian_sample(90, 0.2, 7)
        cfg = TestConfig(pairing='independent')
        forward = ksample_test([first, second], cfg)
        backward = ksample_test([second, first], cfg)
        self.assertEqual(forward.raw_statistic, backward.raw_statistic)
        self.assertAlmostEqual(forward.sigma2_hat, backward.sigma2_hat, places=12)
        self.assertAlmostEqual(forward.p_value, backward.p_value, places=12)

    def test_row_order_invariance(self):
        """Permuting rows, with the same permutation for paired samples, gives identical results."""
        samples = [gaussian_sample(60, 0.5, 1), gaussian_sample(60, 0.1, 2)]
        order = np.random.default_rng(8).permutation(60)
        first = ksample_test(samples)
        second = ksample_test([sample[order] for sample in samples])
        self.assertEqual(first.statistic, second.statistic)
        self.assertEqual(first.sigma2_hat, second.sigma2_hat)

    def test_independent_unequal_sizes(self):
        """Test independent samples may differ in size."""
        result = ksample_test(
            [gaussian_sample(40, 0.5, 1), gaussian_sample(70, 0.5, 2)], TestConfig(pairing='independent')
        )
        self.assertEqual(result.sizes, (40, 70))
        self.assertTrue(0.0 <= result.p_value <= 1.0)

    def test_paired_unequal_sizes(self):
        """Test the paired test rejects unequal sizes."""
        with self.assertRaises(PairingError):
            ksample_test([gaussian_sample(40, 0.5, 1), gaussian_sample(70, 0.5, 2)])

    def test_needs_two_samples(self):
        """Test at least two samples are required."""
        with self.assertRaises(DomainError):
            ksample_test([gaussian_sample(40, 0.5, 1)])

    def test_dimension_mismatch(self):
        """Test samples must share a dimension."""
        with self.assertRaises(DimensionMismatch):
            ksample_test([gaussian_sample(40, 0.5, 1), np.random.default_rng(0).random((40, 3))])


class PairwiseAnovaTestCase(SimpleTestCase):

    def test_matrix_shape(self):
        """Test the p-value matrix is square and symmetric."""
        samples = [gaussian_sample(60, rho, seed) for seed, rho in enumerate((0.8, 0.0, 0.8), start=1)]
        p_values = pairwise_anova(samples, TestConfig(pairing='independent'))
        self.assertEqual(p_values.shape, (3, 3))
        np.testing.assert_array_equal(np.diag(p_values), np.ones(3))
        np.testing.assert_array_equal(p_values, p_values.T)

    def test_entries_are_two_sample_tests(self):
        """Test matrix entries equal two-sample p-values."""
        samples = [gaussian_sample(60, rho, seed) for seed, rho in enumerate((0.8, 0.0, 0.8), start=1)]
        cfg = TestConfig(pairing='independent')
        p_values = pairwise_anova(samples, cfg)
        self.assertEqual(p_values[0, 2], ksample_test([samples[0], samples[2]], cfg).p_value)


@skipUnless(settings.RUN_SLOW_TESTS, 'set RUN_SLOW_TESTS=True for the variance Monte Carlo checks')
class VarianceOracleTestCase(SimpleTestCase):
    """Variance estimates against the Monte Carlo spread of the scaled coefficient difference."""

    n_reps = 500
    rho = math.sin(math.pi * 0.5 / 2.0)

    def replicate(self, n1, n2, estimator):
        differences = np.empty(self.n_reps)
        estimates = np.empty(self.n_reps)
        for rep in range(self.n_reps):
            ps1 = pseudo_observations(gaussian_sample(n1, self.rho, 2 * rep))
            ps2 = pseudo_observations(gaussian_sample(n2, self.rho, 2 * rep + 1))
            differences[rep] = estimate_coefficient(ps1, (1, 1)) - estimate_coefficient(ps2, (1, 1))
            estimates[rep] = estimator(ps1, ps2)
        return differences, estimates

    def test_paired(self):
        """Mean paired estimate within 20% of the variance of sqrt(n) r_11 at n = 2000."""
        differences, estimates = self.replicate(2000, 2000, variance_paired)
        monte_carlo = np.var(np.sqrt(2000.0) * differences)
        self.assertLess(abs(estimates.mean() / monte_carlo - 1.0), 0.2)

    def test_independent(self):
        """The weighted estimate matches sqrt(n1 n2 / (n1 + n2)) r_11 for sizes 1000 and 3000."""
        differences, estimates = self.replicate(1000, 3000, variance_independent)
        monte_carlo = np.var(np.sqrt(1000.0 * 3000.0 / 4000.0) * differences)
        self.assertLess(abs(estimates.mean() / monte_carlo - 1.0), 0.2)
