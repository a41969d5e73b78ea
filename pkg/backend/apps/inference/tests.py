# apps/inference/tests.py
import math
from datetime import date
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, tag

from apps.core.exceptions import GraphError, RankDeficientError, ScoringError
from apps.dataset.panel import StreamflowPanel, TransformStats, split
from apps.dataset.synthetic import SyntheticSpec, generate_synthetic_panel
from apps.graph.network import GaugeGraph
from apps.inference.regression import (
    DonorModel, InferenceApproach, evaluate, fit_mlr, predict_test, z_space_predict,
)
from apps.inference.serializers import EvaluationReportSerializer


def path_graph(p):
    return GaugeGraph(p=p, edges=frozenset((j, j + 1) for j in range(p - 1)))


class FitMlrTest(SimpleTestCase):

    def test_identical_donor_is_exact(self):
        y = np.linspace(0.5, 3.0, 10)
        model = fit_mlr(np.column_stack([y, y]), path_graph(2), 0)
        self.assertEqual(model.donors, [1])
        self.assertAlmostEqual(model.beta0, 0.0, places=10)
        self.assertAlmostEqual(model.betas[0], 1.0, places=10)

    def test_orthogonal_donor_has_zero_slope(self):
        donor = np.array([1.0, -1.0, 1.0, -1.0, 0.0, 0.0])
        target = 5.0 + np.array([1.0, 1.0, -1.0, -1.0, 0.0, 0.0])
        model = fit_mlr(np.column_stack([target, donor]), path_graph(2), 0)
        self.assertAlmostEqual(model.betas[0], 0.0, places=10)
        self.assertAlmostEqual(model.beta0, 5.0, places=10)

    def test_matches_pseudo_inverse(self):
        rng = np.random.default_rng(4)
        y = rng.normal(size=(6, 3))
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1), (0, 2)}))
        model = fit_mlr(y, graph, 0)
        design = np.column_stack([np.ones(6), y[:, 1], y[:, 2]])
        expected = np.linalg.pinv(design) @ y[:, 0]
        np.testing.assert_allclose([model.beta0] + model.betas, expected, atol=1e-8)

    def test_duplicate_donors_are_rank_deficient(self):
        rng = np.random.default_rng(0)
        donor = rng.normal(size=8)
        y = np.column_stack([rng.normal(size=8), donor, donor])
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1), (0, 2)}))
        with self.assertRaises(RankDeficientError) as ctx:
            fit_mlr(y, graph, 0)
        self.assertEqual(list(ctx.exception.donors), [1, 2])

    def test_isolated_target(self):
        with self.assertRaises(GraphError):
            fit_mlr(np.ones((5, 2)), GaugeGraph(p=2, edges=frozenset()), 0)

    def test_residuals_orthogonal_to_design(self):
        rng = np.random.default_rng(12)
        for n, scale in ((40, 1.0), (400, 50.0)):
            y = rng.normal(loc=3.0, scale=scale, size=(n, 4))
            graph = GaugeGraph(p=4, edges=frozenset({(0, 1), (0, 2), (0, 3)}))
            model = fit_mlr(y, graph, 0)
            design = np.column_stack([np.ones(n), y[:, model.donors]])
            residual = y[:, 0] - design @ np.array([model.beta0] + model.betas)
            bound = 1e-8 * np.abs(design).sum(axis=0).max() * np.abs(y[:, 0]).max()
            self.assertLessEqual(np.abs(design.T @ residual).max(), bound)


class PredictTest(SimpleTestCase):

    def test_identity_model_reproduces_flow(self):
        q = np.array([[3.0, 3.0], [10.0, 10.0], [0.0, 0.0]])
        model = DonorModel(target=0, donors=[1], beta0=0.0, betas=[1.0])
        np.testing.assert_allclose(predict_test([model], q)[:, 0], q[:, 0], atol=1e-12)

    def test_zero_donors_give_zero(self):
        model = DonorModel(target=0, donors=[1], beta0=0.0, betas=[2.5])
        np.testing.assert_array_equal(predict_test([model], np.zeros((4, 2))), 0.0)

    def test_intercept_only(self):
        model = DonorModel(target=0, donors=[1], beta0=math.log(101.0), betas=[0.0])
        q = np.array([[1.0, 7.0], [2.0, 0.5]])
        np.testing.assert_allclose(predict_test([model], q), 100.0)

    def test_negative_estimates_are_clamped(self):
        model = DonorModel(target=0, donors=[1], beta0=-10.0, betas=[1.0], space='raw')
        q_hat, clamped = predict_test([model], np.array([[0.0, 2.0], [0.0, 20.0]]), with_clamp_count=True)
        self.assertEqual(q_hat[0, 0], 0.0)
        self.assertEqual(q_hat[1, 0], 10.0)
        self.assertEqual(clamped, 1)

    def test_model_validation(self):
        with self.assertRaises(GraphError):
            DonorModel(target=0, donors=[0], beta0=0.0, betas=[1.0])


class ZSpacePredictTest(SimpleTestCase):

    def test_zero_coefficients_give_training_mean(self):
        stats = TransformStats(mu=[1.0, 2.0], sigma=[0.5, 0.7])
        q_hat = z_space_predict(np.ones((3, 2)), np.zeros((2, 2)), stats)
        np.testing.assert_allclose(q_hat, np.tile(np.exp([1.0, 2.0]) - 1.0, (3, 1)))

    def test_half_coefficients(self):
        stats = TransformStats(mu=[0.0, 0.0], sigma=[1.0, 1.0])
        z = np.array([[0.2, 0.2], [-0.4, -0.4]])
        a = np.array([[0.0, 0.5], [0.5, 0.0]])
        q_hat = z_space_predict(z, a, stats)
        np.testing.assert_allclose(q_hat, np.exp(0.5 * z) - 1.0)


def duplicated_panel(n=30):
    rng = np.random.default_rng(6)
    base = rng.gamma(2.0, 20.0, size=n) + 1.0
    other = rng.gamma(2.0, 5.0, size=n) + 1.0
    q = np.column_stack([base, base, other])
    dates = tuple(date.fromordinal(date(1990, 1, 1).toordinal() + i) for i in range(n))
    return StreamflowPanel(dates=dates, gauge_ids=('a', 'b', 'c'), q=q)


class EvaluateTest(SimpleTestCase):

    def test_duplicate_donor_is_perfect(self):
        splits = split(duplicated_panel(), seed=1)
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1)}), gauge_ids=('a', 'b', 'c'))
        report = evaluate(graph, splits)
        self.assertEqual(report.target_indices, [0, 1])
        self.assertEqual(report.skipped, [2])
        np.testing.assert_allclose(report.per_gauge_nse, 1.0, atol=1e-9)
        self.assertAlmostEqual(report.error_test, 0.0)
        self.assertEqual(report.nse_by_gauge(3)[2], float('-inf'))

    def test_log_regression_ignores_standardization(self):
        panel, truth = generate_synthetic_panel(
            SyntheticSpec(p=4, n=120, true_edges=[(0, 1), (1, 2), (2, 3)], seed=4)
        )
        splits = split(panel, seed=2)
        expected = evaluate(truth, splits, approach=InferenceApproach.LOG_MLR)
        with mock.patch('apps.inference.regression.standardize', side_effect=AssertionError), \
                mock.patch('apps.inference.regression.apply_standardization', side_effect=AssertionError):
            report = evaluate(truth, splits, approach=InferenceApproach.LOG_MLR)
        np.testing.assert_array_equal(report.predictions, expected.predictions)
        self.assertEqual(report.per_gauge_nse, expected.per_gauge_nse)

    def test_all_isolated(self):
        splits = split(duplicated_panel(), seed=1)
        with self.assertRaises(ScoringError):
            evaluate(GaugeGraph(p=3, edges=frozenset()), splits)

    def test_graph_size_mismatch(self):
        splits = split(duplicated_panel(), seed=1)
        with self.assertRaises(GraphError):
            evaluate(path_graph(2), splits)

    def test_raw_space_approach(self):
        splits = split(duplicated_panel(), seed=2)
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1)}), gauge_ids=('a', 'b', 'c'))
        report = evaluate(graph, splits, approach=InferenceApproach.RAW_MLR)
        np.testing.assert_allclose(report.per_gauge_nse, 1.0, atol=1e-9)
        self.assertEqual(report.approach, 3)

    def test_report_payload_validates(self):
        splits = split(duplicated_panel(), seed=1)
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1)}), gauge_ids=('a', 'b', 'c'))
        report = evaluate(graph, splits)
        payload = EvaluationReportSerializer.payload(report, ('a', 'b', 'c'))
        self.assertEqual(payload['skipped'], ['c'])
        serializer = EvaluationReportSerializer(data=payload)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        ids, nse_values = serializer.save()
        self.assertEqual(ids, ['a', 'b', 'c'])
        self.assertEqual(nse_values[2], float('-inf'))

    @tag('slow')
    def test_z_space_agrees_with_log_regression(self):
        panel, truth = generate_synthetic_panel(
            SyntheticSpec(p=5, n=2000, true_edges=[(0, 1), (1, 2), (2, 3), (3, 4)], seed=21)
        )
        splits = split(panel, seed=0)
        z_space = evaluate(truth, splits, approach=InferenceApproach.Z_SPACE)
        log_mlr = evaluate(truth, splits, approach=InferenceApproach.LOG_MLR)
        np.testing.assert_allclose(z_space.per_gauge_nse, log_mlr.per_gauge_nse, atol=0.05)
