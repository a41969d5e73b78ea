# apps/glasso/tests.py
import time

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import ConvergenceError, InputError, NotPositiveDefiniteError
from apps.dataset.synthetic import SyntheticSpec, true_precision
from apps.glasso.coefficients import covariance_to_coefficients, precision_to_coefficients
from apps.glasso.serializers import PrecisionEstimateSerializer
from apps.glasso.solver import (
    PenaltySpec, glasso_fit, glasso_path, lasso_cd, lasso_kkt_violation, require_converged,
)
from apps.graph.network import GaugeGraph
from apps.sgm.selection import SgmConfig


def sample_cov(p=5, n=200, seed=0):
    rng = np.random.default_rng(seed)
    mix = rng.normal(size=(p, p)) * 0.4 + np.eye(p)
    z = rng.normal(size=(n, p)) @ mix
    z = (z - z.mean(axis=0)) / z.std(axis=0, ddof=1)
    return z.T @ z / (n - 1)


class LassoTest(SimpleTestCase):

    def test_unpenalized_is_linear_solve(self):
        gram = np.array([[2.0, 0.5], [0.5, 1.0]])
        target = np.array([1.0, -1.0])
        np.testing.assert_allclose(lasso_cd(gram, target, 0.0), np.linalg.solve(gram, target))

    def test_kkt_conditions_hold(self):
        s = sample_cov(p=6, seed=2)
        beta = lasso_cd(s[:5, :5], s[:5, 5], 0.1)
        self.assertLess(lasso_kkt_violation(s[:5, :5], s[:5, 5], beta, 0.1), 1e-8)

    def test_large_penalty_gives_zero(self):
        gram = np.eye(3)
        np.testing.assert_array_equal(lasso_cd(gram, np.array([0.2, -0.1, 0.05]), 0.5), 0.0)

    def test_inactive_coordinates_stay_zero(self):
        gram = np.array([[1.0, 0.3], [0.3, 1.0]])
        beta = lasso_cd(gram, np.array([0.5, 0.8]), 0.01, active=[True, False])
        self.assertEqual(beta[1], 0.0)

    def test_matches_exhaustive_grid(self):
        gram = np.array([[2.0, 0.6], [0.6, 1.0]])
        target = np.array([1.0, -0.4])
        lam = 0.3

        def objective(b1, b2):
            quad = gram[0, 0] * b1 ** 2 + 2 * gram[0, 1] * b1 * b2 + gram[1, 1] * b2 ** 2
            return 0.5 * quad - target[0] * b1 - target[1] * b2 + lam * (np.abs(b1) + np.abs(b2))

        grid = np.linspace(-2.0, 2.0, 4001)
        best_value, best = np.inf, None
        # blocos de linhas para não materializar a grade inteira
        for start in range(0, grid.size, 500):
            b1 = grid[start:start + 500, None]
            values = objective(b1, grid[None, :])
            row, col = np.unravel_index(np.argmin(values), values.shape)
            if values[row, col] < best_value:
                best_value, best = values[row, col], np.array([b1[row, 0], grid[col]])

        beta = lasso_cd(gram, target, lam)
        np.testing.assert_allclose(beta, best, atol=1.5e-3)
        self.assertLessEqual(objective(beta[0], beta[1]), best_value + 1e-12)


class GlassoFitTest(SimpleTestCase):

    def test_zero_penalty_inverts_covariance(self):
        s = sample_cov()
        estimate = glasso_fit(s, PenaltySpec(lam=0.0))
        self.assertTrue(estimate.converged)
        np.testing.assert_allclose(estimate.theta, np.linalg.inv(s), rtol=1e-8, atol=1e-8)

    def test_kkt_at_tight_tolerance(self):
        s = sample_cov(seed=4)
        estimate = glasso_fit(s, PenaltySpec(lam=0.05), tol=1e-10, max_sweeps=5000)
        self.assertTrue(estimate.converged)
        self.assertLess(estimate.max_kkt_violation, 1e-6)
        np.testing.assert_allclose(estimate.theta, estimate.theta.T)
        self.assertTrue(np.all(np.linalg.eigvalsh(estimate.theta) > 0))

    def test_penalized_diagonal_shifts_w(self):
        s = sample_cov(seed=6)
        estimate = glasso_fit(s, PenaltySpec(lam=0.08), tol=1e-8)
        np.testing.assert_allclose(np.diag(estimate.w), np.diag(s) + 0.08)
        unpenalized = glasso_fit(s, PenaltySpec(lam=0.08, penalize_diagonal=False), tol=1e-8)
        np.testing.assert_allclose(np.diag(unpenalized.w), np.diag(s))

    def test_large_penalty_is_diagonal(self):
        s = sample_cov(seed=1)
        lam = float(np.abs(s - np.diag(np.diag(s))).max()) + 0.01
        theta = glasso_fit(s, PenaltySpec(lam=lam)).theta
        np.testing.assert_array_equal(theta - np.diag(np.diag(theta)), 0.0)

    def test_zero_pattern_is_respected(self):
        s = sample_cov(p=4, seed=3)
        pattern = GaugeGraph(p=4, edges=frozenset({(0, 1), (1, 2), (2, 3)}))
        theta = glasso_fit(s, PenaltySpec(lam=0.0, zero_pattern=pattern), tol=1e-10, max_sweeps=5000).theta
        for i, j in [(0, 2), (0, 3), (1, 3)]:
            self.assertEqual(theta[i, j], 0.0)
            self.assertEqual(theta[j, i], 0.0)
        self.assertNotEqual(theta[0, 1], 0.0)

    def test_singular_covariance_without_penalty(self):
        with self.assertRaises(NotPositiveDefiniteError):
            glasso_fit(np.ones((2, 2)), PenaltySpec(lam=0.0))

    def test_sparsity_grows_along_path(self):
        s = sample_cov(p=6, seed=7)
        path = glasso_path(s, [0.01, 0.05, 0.2], tol=1e-8)
        nonzero = [int((np.abs(e.theta) > 0).sum()) for e in path]
        self.assertGreaterEqual(nonzero[0], nonzero[-1])

    def test_l1_norm_decreases_along_default_grid(self):
        lambdas = SgmConfig().lambda_grid()
        self.assertEqual(len(lambdas), 30)
        for seed in (7, 8):
            path = glasso_path(sample_cov(p=10, seed=seed), lambdas)
            norms = [estimate.l1_norm() for estimate in path]
            for previous, current in zip(norms, norms[1:]):
                self.assertLessEqual(current, previous + 1e-9 * previous)

    def test_kkt_at_default_tolerance(self):
        for seed in range(3):
            s = sample_cov(p=10, seed=20 + seed)
            for lam in (0.01, 0.05, 0.10):
                estimate = glasso_fit(s, PenaltySpec(lam=lam))
                self.assertLessEqual(estimate.max_kkt_violation, 1e-4, f"seed={seed} λ={lam}")

    def test_zero_penalty_on_random_spd_matrices(self):
        rng = np.random.default_rng(31)
        matrices = []
        for _ in range(50):
            p = int(rng.integers(2, 13))
            a = rng.normal(size=(p, p))
            matrices.append(a @ a.T / p + 0.5 * np.eye(p))
        started = time.perf_counter()
        estimates = [glasso_fit(s, PenaltySpec(lam=0.0)) for s in matrices]
        elapsed = time.perf_counter() - started
        for s, estimate in zip(matrices, estimates):
            expected = np.linalg.inv(s)
            relative = np.linalg.norm(estimate.theta - expected) / np.linalg.norm(expected)
            self.assertLess(relative, 1e-6)
        self.assertLess(elapsed, 1.0)

    def test_zero_penalty_recovers_generating_precision(self):
        spec = SyntheticSpec(p=4, n=100_000, true_edges=[(0, 1), (1, 2), (2, 3)],
                             precision_offdiag_magnitude=0.5, diagonal_margin=0.5)
        theta_true = true_precision(spec, spec.true_edges)
        rng = np.random.default_rng(0)
        factor = np.linalg.cholesky(np.linalg.inv(theta_true))
        z = rng.standard_normal((spec.n, spec.p)) @ factor.T
        estimate = glasso_fit(np.cov(z, rowvar=False), PenaltySpec(lam=0.0))
        np.testing.assert_allclose(estimate.theta, theta_true, atol=0.05)

    def test_negative_penalty_is_input_error(self):
        with self.assertRaises(InputError):
            PenaltySpec(lam=-0.1)
        with self.assertRaises(InputError):
            PenaltySpec(lam=float('nan'))

    def test_require_converged(self):
        s = sample_cov(seed=9)
        estimate = glasso_fit(s, PenaltySpec(lam=0.01), tol=1e-14, max_sweeps=1)
        self.assertFalse(estimate.converged)
        with self.assertRaises(ConvergenceError):
            require_converged(estimate)


class CoefficientTest(SimpleTestCase):

    def test_precision_and_covariance_routes_agree(self):
        s = sample_cov(p=5, seed=12)
        a = precision_to_coefficients(glasso_fit(s, PenaltySpec(lam=0.0)))
        self.assertTrue(np.all(np.diag(a) == 0))
        for j in range(5):
            alpha = covariance_to_coefficients(s, j)
            np.testing.assert_allclose(np.delete(a[:, j], j), alpha, rtol=1e-8, atol=1e-10)


class PrecisionEstimateSerializerTest(SimpleTestCase):

    def test_payload_validates(self):
        estimate = glasso_fit(sample_cov(p=3), PenaltySpec(lam=0.05))
        payload = PrecisionEstimateSerializer.payload(estimate)
        self.assertEqual(payload['lambda'], 0.05)
        self.assertNotIn('lam', payload)
        serializer = PrecisionEstimateSerializer(data=payload)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        restored = serializer.save()
        np.testing.assert_allclose(restored.theta, estimate.theta)
        self.assertEqual(restored.lam, 0.05)

    def test_rejects_asymmetric_matrix(self):
        data = {
            'theta': [[1.0, 0.2], [0.0, 1.0]], 'w': [[1.0, 0.0], [0.0, 1.0]],
            'lambda': 0.1, 'sweeps': 1, 'converged': True, 'max_kkt_violation': 0.0,
        }
        self.assertFalse(PrecisionEstimateSerializer(data=data).is_valid())
