# apps/dataset/tests.py
import os
import tempfile
from datetime import date

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import GraphError, InputError, PanelFormatError, TransformError
from apps.dataset.panel import (
    StreamflowPanel, invert_transform, load_panel, sample_covariance, split,
    standardize, to_log, train_capacity, write_panel_csv,
)
from apps.dataset.synthetic import SyntheticSpec, generate_synthetic_panel, true_precision


def make_panel(q, start=date(2000, 1, 1), ids=None):
    q = np.asarray(q, dtype=float)
    dates = tuple(date.fromordinal(start.toordinal() + i) for i in range(q.shape[0]))
    ids = ids or tuple(f"G{j}" for j in range(q.shape[1]))
    return StreamflowPanel(dates=dates, gauge_ids=tuple(ids), q=q)


class LoadPanelTest(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text):
        path = os.path.join(self.tmp.name, 'panel.csv')
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(text)
        return path

    def test_reads_header_and_values(self):
        path = self.write("date,A,B\n2000-01-01,1.5,2\n2000-01-02,3,4.25\n2000-01-03,0,1\n")
        panel = load_panel(path)
        self.assertEqual(panel.gauge_ids, ('A', 'B'))
        self.assertEqual(panel.n, 3)
        self.assertEqual(panel.dates[0], date(2000, 1, 1))
        self.assertAlmostEqual(panel.q[1, 1], 4.25)

    def test_rejects_missing_value_with_position(self):
        path = self.write("date,A,B\n2000-01-01,1,2\n2000-01-02,,4\n2000-01-03,5,6\n")
        with self.assertRaisesMessage(PanelFormatError, "missing value at (1,0)"):
            load_panel(path)

    def test_drop_rows_removes_incomplete_days(self):
        path = self.write("date,A,B\n2000-01-01,1,2\n2000-01-02,,4\n2000-01-03,5,6\n")
        panel = load_panel(path, on_missing='drop_rows')
        self.assertEqual(panel.n, 2)
        self.assertEqual(panel.dates, (date(2000, 1, 1), date(2000, 1, 3)))

    def test_rejects_negative_flow(self):
        path = self.write("date,A,B\n2000-01-01,1,2\n2000-01-02,-3,4\n")
        with self.assertRaises(PanelFormatError):
            load_panel(path)

    def test_rejects_duplicate_gauge_ids(self):
        path = self.write("date,A,A\n2000-01-01,1,2\n2000-01-02,3,4\n")
        with self.assertRaises(PanelFormatError):
            load_panel(path)

    def test_rejects_gap_in_dates(self):
        path = self.write("date,A,B\n2000-01-01,1,2\n2000-01-03,3,4\n")
        with self.assertRaises(PanelFormatError):
            load_panel(path)

    def test_rejects_constant_gauge(self):
        path = self.write("date,A,B\n2000-01-01,1,2\n2000-01-02,1,4\n")
        with self.assertRaises(PanelFormatError):
            load_panel(path)

    def test_written_csv_loads_back(self):
        panel = make_panel([[1.0, 2.5], [3.0, 0.0], [7.125, 9.0]])
        path = self.write(write_panel_csv(panel))
        again = load_panel(path)
        self.assertEqual(again.gauge_ids, panel.gauge_ids)
        np.testing.assert_allclose(again.q, panel.q)


class TransformTest(SimpleTestCase):

    def test_log_of_zero_is_zero(self):
        self.assertEqual(to_log(np.array([[0.0]]))[0, 0], 0.0)

    def test_standardized_columns(self):
        rng = np.random.default_rng(3)
        y = rng.normal(size=(50, 4)) * [1, 2, 3, 4] + 10
        z, stats = standardize(y)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(z.std(axis=0, ddof=1), 1.0, atol=1e-12)
        self.assertEqual(stats.mu.shape, (4,))

    def test_constant_column_is_error(self):
        y = np.array([[1.0, 2.0], [1.0, 3.0], [1.0, 4.0]])
        with self.assertRaises(TransformError):
            standardize(y)

    def test_inverse_recovers_flows(self):
        rng = np.random.default_rng(11)
        q = rng.gamma(2.0, 50.0, size=(40, 3))
        z, stats = standardize(to_log(q))
        np.testing.assert_allclose(invert_transform(z, stats), q, rtol=1e-9, atol=1e-9)

    def test_negative_estimates_are_clamped(self):
        _, stats = standardize(np.log(np.array([[1.0], [2.0], [3.0]]) + 1.0))
        q_hat, clamped = invert_transform(np.array([[-50.0], [0.0]]), stats, with_clamp_count=True)
        self.assertEqual(q_hat[0, 0], 0.0)
        self.assertEqual(clamped, 1)

    def test_overflow_is_error(self):
        _, stats = standardize(np.array([[0.0], [1000.0]]))
        with self.assertRaises(TransformError):
            invert_transform(np.array([[10.0]]), stats)

    def test_covariance_of_standardized_data_has_unit_diagonal(self):
        rng = np.random.default_rng(5)
        z, _ = standardize(rng.normal(size=(30, 3)))
        s = sample_covariance(z)
        np.testing.assert_allclose(np.diag(s), 1.0)
        np.testing.assert_allclose(s, s.T)


class SplitTest(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(0)
        self.panel = make_panel(rng.gamma(2.0, 10.0, size=(30, 2)) + 0.1)

    def test_test_is_last_third(self):
        splits = split(self.panel, seed=1)
        self.assertEqual(splits.test.n, 10)
        self.assertEqual(splits.test_rows, tuple(range(20, 30)))
        self.assertEqual(splits.train.n + splits.val.n, 20)
        self.assertEqual(splits.train.n, 10)

    def test_subsets_are_disjoint(self):
        splits = split(self.panel, seed=4, train_fraction_of_early=0.7)
        train, val = set(splits.train_rows), set(splits.val_rows)
        self.assertFalse(train & val)
        self.assertEqual(train | val, set(range(20)))
        self.assertEqual(len(train), 14)

    def test_same_seed_same_split(self):
        self.assertEqual(split(self.panel, seed=9).train_rows, split(self.panel, seed=9).train_rows)

    def test_short_panel_is_error(self):
        with self.assertRaises(PanelFormatError):
            split(self.panel.rows(range(5)), seed=0)

    def test_train_days_subsets_default_train(self):
        full = split(self.panel, seed=2)
        short = split(self.panel, seed=2, train_days=4)
        self.assertEqual(short.train.n, 4)
        self.assertTrue(set(short.train_rows) <= set(full.train_rows))
        self.assertEqual(short.val_rows, full.val_rows)
        self.assertEqual(short.test_rows, full.test_rows)
        self.assertEqual(short.train_days, 4)

    def test_train_days_out_of_range(self):
        self.assertEqual(train_capacity(self.panel.n), 10)
        with self.assertRaises(PanelFormatError):
            split(self.panel, seed=0, train_days=11)
        with self.assertRaises(PanelFormatError):
            split(self.panel, seed=0, train_days=1)


class SyntheticTest(SimpleTestCase):

    def test_true_precision_is_positive_definite(self):
        spec = SyntheticSpec(p=5, n=10, true_edges=[(0, 1), (1, 2), (3, 4)])
        theta = true_precision(spec, spec.true_edges)
        self.assertTrue(np.all(np.linalg.eigvalsh(theta) > 0))
        self.assertLess(theta[0, 1], 0)

    def test_panel_and_graph(self):
        spec = SyntheticSpec(p=4, n=60, true_edges=[(1, 0), (2, 3)], seed=2)
        panel, graph = generate_synthetic_panel(spec)
        self.assertEqual((panel.n, panel.p), (60, 4))
        self.assertEqual(graph.sorted_edges(), [(0, 1), (2, 3)])
        self.assertTrue(np.all(panel.q >= 0))

    def test_invalid_true_edge(self):
        with self.assertRaises(GraphError):
            generate_synthetic_panel(SyntheticSpec(p=3, n=10, true_edges=[(0, 3)]))

    def test_default_precision_is_strongly_coupled(self):
        spec = SyntheticSpec(p=4, n=10, true_edges=[(0, 1), (1, 2), (2, 3)])
        theta = true_precision(spec, spec.true_edges)
        np.testing.assert_allclose(np.diag(theta), [1.1, 2.1, 2.1, 1.1])
        partial = -theta[0, 1] / np.sqrt(theta[0, 0] * theta[1, 1])
        self.assertGreater(partial, 0.6)
        # R² da regressão de cada posto nos demais: 1 − 1/(θ_jj·Σ_jj)
        r2 = 1.0 - 1.0 / (np.diag(theta) * np.diag(np.linalg.inv(theta)))
        self.assertTrue(np.all(r2 > 0.7))

    def test_invalid_margin(self):
        with self.assertRaises(InputError):
            SyntheticSpec(p=3, n=10, diagonal_margin=0.0)
        with self.assertRaises(InputError):
            SyntheticSpec(p=3, n=10, precision_offdiag_magnitude=-1.0)
