# apps/scoring/tests.py
import math

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import stats

from apps.core.exceptions import PanelFormatError, ScoringError
from apps.dataset.synthetic import SyntheticSpec, generate_synthetic_panel
from apps.graph.network import GaugeGraph
from apps.scoring.metrics import graph_score, nse, one_tailed_t_test, r2, validation_error
from apps.scoring.resampling import ResampleSummary, resample_mean_error, training_length_sweep
from apps.scoring.serializers import ResampleSummarySerializer, TrainingSweepSerializer

# vetores ortonormais de média zero
E1 = np.array([1.0, -1.0, 1.0, -1.0]) / 2
E2 = np.array([1.0, 1.0, -1.0, -1.0]) / 2


def with_r2(value):
    """Par (obs, pred) cujo R² é exatamente value"""
    return E1 + 10.0, math.sqrt(value) * E1 + math.sqrt(1 - value) * E2 + 10.0


class R2Test(SimpleTestCase):

    def test_perfect_prediction(self):
        self.assertAlmostEqual(r2([1, 2, 3], [1, 2, 3]), 1.0)

    def test_affine_invariance(self):
        rng = np.random.default_rng(2)
        obs = rng.normal(size=50)
        pred = obs + rng.normal(scale=0.5, size=50)
        self.assertAlmostEqual(r2(obs, pred), r2(obs, 3.0 * pred + 7.0), places=12)

    def test_hand_computed(self):
        obs = np.array([1.0, 2.0, 3.0, 4.0])
        pred = np.array([1.0, 2.0, 2.0, 4.0])
        cov = np.sum((obs - obs.mean()) * (pred - pred.mean()))
        expected = cov ** 2 / (np.sum((obs - obs.mean()) ** 2) * np.sum((pred - pred.mean()) ** 2))
        self.assertAlmostEqual(r2(obs, pred), expected)

    def test_constant_series(self):
        with self.assertRaises(ScoringError):
            r2([1, 1, 1], [1, 2, 3])


class NseTest(SimpleTestCase):

    def test_perfect_prediction(self):
        self.assertEqual(nse([1, 2, 3], [1, 2, 3]), 1.0)

    def test_mean_prediction_is_zero(self):
        self.assertAlmostEqual(nse([1, 2, 3], [2, 2, 2]), 0.0)

    def test_arithmetic(self):
        self.assertAlmostEqual(nse([1, 2, 3], [1, 1, 1]), -1.5)

    def test_length_mismatch(self):
        with self.assertRaises(ScoringError):
            nse([1, 2, 3], [1, 2])


class ValidationErrorTest(SimpleTestCase):

    def test_threshold_on_two_targets(self):
        obs_a, pred_a = with_r2(0.8)
        obs_b, pred_b = with_r2(0.5)
        report = validation_error(np.column_stack([obs_a, obs_b]), np.column_stack([pred_a, pred_b]), gamma=0.7)
        self.assertAlmostEqual(report.score_val, 0.8)
        self.assertAlmostEqual(report.error_val, 0.6)
        self.assertEqual(report.q, 2)

    def test_perfect_targets(self):
        obs = np.array([[1.0, 5.0], [2.0, 3.0], [4.0, 9.0]])
        self.assertAlmostEqual(validation_error(obs, obs).error_val, 0.0)

    def test_all_below_threshold(self):
        obs, pred = with_r2(0.5)
        report = validation_error(obs[:, None], pred[:, None], gamma=0.7)
        self.assertEqual(report.error_val, 1.0)

    def test_target_subset(self):
        obs_a, pred_a = with_r2(0.9)
        obs_b, pred_b = with_r2(0.1)
        report = validation_error(
            np.column_stack([obs_a, obs_b]), np.column_stack([pred_a, pred_b]), target_indices=[0],
        )
        self.assertEqual(report.target_indices, [0])
        self.assertAlmostEqual(report.error_val, 0.1)


class GraphScoreTest(SimpleTestCase):

    def test_single_gauge(self):
        self.assertAlmostEqual(graph_score([0.9], 1), 0.9)

    def test_mean_of_top(self):
        self.assertAlmostEqual(graph_score([1.0, 0.8], 2), 0.9)
        self.assertAlmostEqual(graph_score([1.0, 0.8, 0.1], 2), 0.9)

    def test_m_rem_out_of_range(self):
        with self.assertRaises(ScoringError):
            graph_score([0.5], 2)
        with self.assertRaises(ScoringError):
            graph_score([0.5], 0)


class TTestTest(SimpleTestCase):

    def test_equal_samples(self):
        self.assertAlmostEqual(one_tailed_t_test([1, 2, 3], [1, 2, 3]), 0.5)

    def test_far_below(self):
        self.assertLess(one_tailed_t_test([0.10, 0.11, 0.12, 0.10], [0.90, 0.91, 0.92, 0.90]), 1e-6)

    def test_far_above(self):
        self.assertGreater(one_tailed_t_test([0.90, 0.91, 0.92], [0.10, 0.11, 0.12]), 1 - 1e-6)

    def test_matches_welch_reference(self):
        rng = np.random.default_rng(5)
        a = rng.normal(0.30, 0.05, size=40)
        b = rng.normal(0.32, 0.09, size=25)
        expected = stats.ttest_ind(a, b, equal_var=False, alternative='less').pvalue
        self.assertAlmostEqual(one_tailed_t_test(a, b), expected, places=10)
        expected = stats.ttest_ind([1, 2, 3], [2, 3, 4], equal_var=False, alternative='less').pvalue
        self.assertAlmostEqual(one_tailed_t_test([1, 2, 3], [2, 3, 4]), expected, places=10)

    def test_degenerate_samples(self):
        with self.assertRaises(ScoringError):
            one_tailed_t_test([1, 1], [1, 1])


class ResampleSummaryTest(SimpleTestCase):

    summary = ResampleSummary(
        mean=0.3, stdev=0.1, per_run=[0.2, 0.3, 0.4], seed=0,
        per_run_queue_nse=[[0.9, 0.8, 0.7], [], [0.6]],
    )

    def test_run_graph_scores_cap_m_rem_and_skip_empty_runs(self):
        np.testing.assert_allclose(self.summary.run_graph_scores(2), [0.85, 0.6])
        self.assertAlmostEqual(self.summary.mean_graph_score(2), 0.725)
        with self.assertRaises(ScoringError):
            self.summary.run_graph_scores(0)

    def test_mean_top_nse(self):
        self.assertAlmostEqual(self.summary.mean_top_nse(8), (0.8 + 0.6) / 2)
        self.assertAlmostEqual(self.summary.mean_top_nse(1), (0.9 + 0.6) / 2)

    def test_old_payload_still_loads(self):
        serializer = ResampleSummarySerializer(data={'mean': 0.2, 'stdev': 0.0, 'per_run': [0.2], 'seed': 1})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().per_run_queue_nse, [])

    def test_run_count_mismatch(self):
        payload = ResampleSummarySerializer.payload(self.summary)
        payload['per_run_queue_nse'] = payload['per_run_queue_nse'][:2]
        self.assertFalse(ResampleSummarySerializer(data=payload).is_valid())


class ResampleTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.panel, cls.graph = generate_synthetic_panel(
            SyntheticSpec(p=4, n=150, true_edges=[(0, 1), (1, 2), (2, 3)], seed=3)
        )

    def test_single_run_has_zero_stdev(self):
        summary = resample_mean_error(self.panel, self.graph, n_runs=1, seed=0)
        self.assertEqual(summary.n_runs, 1)
        self.assertEqual(summary.stdev, 0.0)
        self.assertEqual(summary.mean, summary.per_run[0])

    def test_same_seed_same_runs(self):
        first = resample_mean_error(self.panel, self.graph, n_runs=3, seed=7)
        second = resample_mean_error(self.panel, self.graph, n_runs=3, seed=7)
        self.assertEqual(first.per_run, second.per_run)
        self.assertTrue(all(0.0 <= e <= 1.0 for e in first.per_run))
        self.assertLess(first.mean, 1.0)

    def test_no_runs(self):
        with self.assertRaises(ScoringError):
            resample_mean_error(self.panel, self.graph, n_runs=0, seed=0)

    def test_summary_payload_validates(self):
        summary = resample_mean_error(self.panel, self.graph, n_runs=2, seed=1)
        serializer = ResampleSummarySerializer(data=ResampleSummarySerializer.payload(summary))
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_runs_record_gauge_nse_and_queue(self):
        summary = resample_mean_error(self.panel, self.graph, n_runs=3, seed=2)
        self.assertEqual(len(summary.per_run_nse), 3)
        self.assertTrue(all(len(values) == 4 for values in summary.per_run_nse))
        for values, queue in zip(summary.per_run_nse, summary.per_run_queue_nse):
            self.assertTrue(queue)
            self.assertEqual(queue, sorted(queue, reverse=True))
            self.assertIn(queue[0], values)
        self.assertIsNotNone(summary.mean_graph_score(1))

    def test_train_days_is_recorded(self):
        summary = resample_mean_error(self.panel, self.graph, n_runs=2, seed=0, train_days=20)
        self.assertEqual(summary.train_days, 20)
        with self.assertRaises(PanelFormatError):
            resample_mean_error(self.panel, self.graph, n_runs=1, seed=0, train_days=500)

    def test_sweep_skips_lengths_that_do_not_fit(self):
        summaries = training_length_sweep(self.panel, self.graph, [90, 20, 45, 45], n_runs=2, seed=0)
        self.assertEqual([s.train_days for s in summaries], [20, 45])
        payload = {'seed': 0, 'runs': 2, 'summaries': [ResampleSummarySerializer.payload(s) for s in summaries]}
        self.assertTrue(TrainingSweepSerializer(data=payload).is_valid())
        with self.assertRaises(ScoringError):
            training_length_sweep(self.panel, self.graph, [500], n_runs=1, seed=0)

    @tag('slow')
    def test_sparse_graph_not_worse_than_complete(self):
        panel, truth = generate_synthetic_panel(
            SyntheticSpec(p=6, n=600, true_edges=[(0, 1), (1, 2), (3, 4), (4, 5)], seed=11)
        )
        sparse = resample_mean_error(panel, truth, n_runs=20, seed=0)
        complete = resample_mean_error(panel, GaugeGraph.complete(6, panel.gauge_ids), n_runs=20, seed=0)
        self.assertLessEqual(sparse.mean, complete.mean + 0.05)
