# apps/sgm/tests.py
import itertools
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from apps.core.exceptions import GaugeNetworkError, GraphError, InputError
from apps.dataset.panel import split, standardized_subsets
from apps.dataset.synthetic import SyntheticSpec, generate_synthetic_coords, generate_synthetic_panel
from apps.graph.network import GaugeGraph, corr_graph, dist_graph
from apps.inference.regression import evaluate
from apps.scoring.serializers import ScoreReportSerializer
from apps.sgm.pareto import (
    Policy, SelectionPolicy, dominates, knee_point, pareto_front, select_graph, select_point,
)
from apps.sgm.plots import SCATTER_COLUMNS, check_svg, load_scatter_csv, scatter_csv, scatter_svg
from apps.sgm.selection import CandidatePoint, SgmConfig, run_sgm, sampling_count
from apps.sgm.serializers import CandidatePointSerializer

ALL_PAIRS = list(itertools.combinations(range(40), 2))


def point(edges, error, k=None, lam=0.05):
    graph = GaugeGraph(p=40, edges=frozenset(ALL_PAIRS[:edges]))
    return CandidatePoint(
        k_requested=edges if k is None else k, edge_count=edges, error_val=error,
        lam=lam, tau=0.0, graph=graph,
    )


class CandidatePointTest(SimpleTestCase):

    def test_edge_count_within_budget(self):
        with self.assertRaises(GraphError):
            point(5, 0.3, k=4)

    def test_error_in_unit_interval(self):
        with self.assertRaises(GraphError):
            point(1, 1.5)


class ParetoFrontTest(SimpleTestCase):

    def test_small_front(self):
        points = [point(1, 0.5), point(2, 0.3), point(3, 0.4)]
        front = pareto_front(points)
        self.assertEqual([pt.objectives for pt in front], [(1, 0.5), (2, 0.3)])

    def test_single_point(self):
        only = point(4, 0.2)
        self.assertIs(pareto_front([only]).points[0], only)

    def test_empty_list(self):
        with self.assertRaises(InputError):
            pareto_front([])

    def test_ties_on_edges_keep_lowest_error(self):
        front = pareto_front([point(3, 0.4), point(3, 0.2), point(3, 0.2)])
        self.assertEqual(len(front), 1)
        self.assertEqual(front.points[0].error_val, 0.2)

    def test_matches_pairwise_dominance(self):
        rng = np.random.default_rng(17)
        points = [point(int(e), float(r)) for e, r in zip(rng.integers(0, 60, 200), rng.random(200))]
        front = pareto_front(points)
        brute = [pt for pt in points if not any(dominates(other, pt) for other in points)]
        self.assertEqual({id(pt) for pt in front}, {id(pt) for pt in brute})
        edges = [pt.edge_count for pt in front]
        errors = [pt.error_val for pt in front]
        self.assertEqual(edges, sorted(edges))
        self.assertEqual(errors, sorted(errors, reverse=True))


class SelectionPolicyTest(SimpleTestCase):

    def setUp(self):
        self.front = pareto_front([point(10, 0.9), point(50, 0.1), point(500, 0.09, lam=0.01)])

    def test_knee(self):
        self.assertEqual(knee_point(self.front).edge_count, 50)
        self.assertEqual(select_graph(self.front).edge_count, 50)

    def test_min_error(self):
        self.assertEqual(select_point(self.front, 'min_error').edge_count, 500)

    def test_edge_budget(self):
        self.assertEqual(select_point(self.front, 'edges=47').edge_count, 10)
        self.assertEqual(select_point(self.front, 'edges(60)').edge_count, 50)
        with self.assertRaises(GraphError):
            select_point(self.front, 'edges=5')

    def test_single_point_front(self):
        front = pareto_front([point(7, 0.3)])
        for policy in ('knee', 'min_error', 'edges=7'):
            self.assertEqual(select_point(front, policy).edge_count, 7)

    def test_parse(self):
        self.assertEqual(Policy.parse('edges=25'), Policy(SelectionPolicy.EDGES, 25))
        self.assertEqual(str(Policy.parse('knee')), 'knee')
        with self.assertRaises(InputError):
            Policy.parse('elbow')
        with self.assertRaises(InputError):
            Policy.parse('edges')


class SgmConfigTest(SimpleTestCase):

    def test_default_sampling_count(self):
        self.assertEqual(sampling_count(34), 16560)
        self.assertEqual(SgmConfig().point_count(34), 16560)

    def test_lambda_grid_includes_ends(self):
        grid = SgmConfig(lambda_min=0.01, lambda_max=0.1, res=10).lambda_grid()
        self.assertAlmostEqual(grid[0], 0.01)
        self.assertAlmostEqual(grid[-1], 0.1)
        self.assertEqual(len(grid), 10)

    def test_invalid_ranges(self):
        with self.assertRaises(InputError):
            SgmConfig(lambda_min=0.2, lambda_max=0.1)
        with self.assertRaises(InputError):
            SgmConfig(res=0)
        with self.assertRaises(InputError):
            SgmConfig(k_min=5, k_max=20).validate_for(5)


class RunSgmTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        panel, cls.truth = generate_synthetic_panel(
            SyntheticSpec(p=5, n=300, true_edges=[(0, 1), (1, 2), (3, 4)], seed=5)
        )
        cls.splits = split(panel, seed=0)

    def test_grid_point_count(self):
        config = SgmConfig(k_min=1, k_max=10, res=3)
        points = run_sgm(self.splits, config, workers=1)
        self.assertEqual(len(points), 30)
        self.assertEqual([(pt.lambda_index, pt.k_requested) for pt in points[:3]], [(0, 1), (0, 2), (0, 3)])
        self.assertTrue(all(pt.edge_count <= pt.k_requested for pt in points))
        self.assertTrue(all(0.0 <= pt.error_val <= 1.0 for pt in points))

    def test_errors_discriminate_between_graphs(self):
        points = run_sgm(self.splits, SgmConfig(k_min=1, k_max=10, res=3), workers=1)
        errors = {pt.error_val for pt in points}
        self.assertGreater(len(errors), 1)
        self.assertLess(min(errors), 1.0)
        best = min(points, key=lambda pt: pt.error_val)
        self.assertGreaterEqual(best.edge_count, 2)

    def test_single_point_grid(self):
        config = SgmConfig(lambda_min=0.05, lambda_max=0.05, k_min=3, k_max=3, res=1)
        self.assertEqual(len(run_sgm(self.splits, config, workers=1)), 1)

    def test_workers_do_not_change_result(self):
        config = SgmConfig(k_min=2, k_max=6, res=2)
        serial = run_sgm(self.splits, config, workers=1)
        parallel = run_sgm(self.splits, config, workers=2)
        self.assertEqual(
            [(pt.k_requested, pt.edge_count, pt.error_val, pt.graph.edges) for pt in serial],
            [(pt.k_requested, pt.edge_count, pt.error_val, pt.graph.edges) for pt in parallel],
        )

    def test_role_constraints_remove_same_role_edges(self):
        config = SgmConfig(k_min=10, k_max=10, res=1, donor_group=('G000', 'G001'))
        points = run_sgm(self.splits, config, workers=1)
        self.assertNotIn((0, 1), points[0].graph.edges)

    def test_scatter_outputs(self):
        points = run_sgm(self.splits, SgmConfig(k_min=1, k_max=10, res=3), workers=1)
        front = pareto_front(points)
        lines = scatter_csv(points, front).splitlines()
        self.assertEqual(lines[0], ','.join(SCATTER_COLUMNS))
        self.assertEqual(len(lines), 31)
        flags = [line.rsplit(',', 1)[1] for line in lines[1:]]
        self.assertEqual(flags.count('false'), len(front))
        svg = scatter_svg(points, front)
        self.assertTrue(svg.startswith('<svg'))
        self.assertIn('polyline', svg)

    def test_scatter_files_load_back(self):
        points = run_sgm(self.splits, SgmConfig(k_min=1, k_max=4, res=2), workers=1)
        front = pareto_front(points)
        with tempfile.TemporaryDirectory() as tmp:
            csv_path = Path(tmp) / 'scatter.csv'
            csv_path.write_text(scatter_csv(points, front), encoding='utf-8')
            self.assertEqual(len(load_scatter_csv(csv_path)), len(points))
            svg_path = Path(tmp) / 'scatter.svg'
            svg_path.write_text(scatter_svg(points, front, title='Erro & arestas <teste>'), encoding='utf-8')
            self.assertEqual(check_svg(svg_path).tag, '{http://www.w3.org/2000/svg}svg')
            svg_path.write_text('<html></html>', encoding='utf-8')
            with self.assertRaises(GaugeNetworkError):
                check_svg(svg_path)
            csv_path.write_text('edge_count,error_val\n1,0.5\n', encoding='utf-8')
            with self.assertRaises(GaugeNetworkError):
                load_scatter_csv(csv_path)

    def test_point_payload_validates(self):
        points = run_sgm(self.splits, SgmConfig(k_min=3, k_max=3, res=1), workers=1)
        payload = CandidatePointSerializer.payload(points[0])
        self.assertIn('lambda', payload)
        serializer = CandidatePointSerializer(data=payload)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().graph.edges, points[0].graph.edges)

    def test_points_carry_score_report(self):
        points = run_sgm(self.splits, SgmConfig(k_min=2, k_max=4, res=2), workers=1)
        for pt in points:
            self.assertEqual(pt.report.error_val, pt.error_val)
            self.assertEqual(pt.report.target_indices, [0, 1, 2, 3, 4])
            self.assertAlmostEqual(pt.error_val, (5 - pt.report.score_val) / 5)
        payload = ScoreReportSerializer.payload(points[-1].report)
        self.assertTrue(ScoreReportSerializer(data=payload).is_valid())

    @tag('slow')
    def test_true_edge_count_is_near_best(self):
        panel, truth = generate_synthetic_panel(
            SyntheticSpec(p=5, n=2000, true_edges=[(0, 1), (1, 2), (3, 4)], seed=9)
        )
        points = run_sgm(split(panel, seed=1), SgmConfig(k_min=1, k_max=10, res=3), workers=1)
        best = min(pt.error_val for pt in points)
        at_truth = min(pt.error_val for pt in points if pt.k_requested == truth.edge_count)
        self.assertLessEqual(at_truth, best + 0.02)


def edge_f1(found, truth):
    hits = len(found & truth)
    if not hits:
        return 0.0
    precision = hits / len(found)
    recall = hits / len(truth)
    return 2 * precision * recall / (precision + recall)


def clique(nodes):
    return list(itertools.combinations(nodes, 2))


@tag('slow')
class GraphRecoveryTest(SimpleTestCase):

    def test_front_contains_generating_graph(self):
        edges = clique(range(4)) + clique(range(4, 8)) + [(8, 9)]
        scores = []
        for seed in range(3):
            panel, truth = generate_synthetic_panel(SyntheticSpec(p=10, n=4000, true_edges=edges, seed=seed))
            points = run_sgm(split(panel, seed=seed), SgmConfig(k_min=1, k_max=20, res=10), workers=1)
            front = pareto_front(points)
            scores.append(max(edge_f1(pt.graph.edges, truth.edges) for pt in front.points))
        self.assertGreaterEqual(float(np.median(scores)), 0.9, scores)


@tag('slow')
class MethodOrderingTest(SimpleTestCase):

    def test_sgm_then_corr_then_dist(self):
        seeds = range(5)
        ordered = 0
        for seed in seeds:
            panel, truth = generate_synthetic_panel(SyntheticSpec(p=10, n=2000, seed=seed))
            splits = split(panel, seed=seed)
            z_train, _, _, _ = standardized_subsets(splits)
            corr = corr_graph(z_train, 2, panel.gauge_ids)
            dist = dist_graph(generate_synthetic_coords(truth, seed=seed), 2)
            points = run_sgm(splits, SgmConfig(k_min=1, k_max=25, res=5), workers=1)
            sgm = select_point(pareto_front(points), Policy.parse(f"edges={corr.edge_count}")).graph
            errors = [evaluate(graph, splits).error_test for graph in (sgm, corr, dist)]
            # folga para empates com ruído de amostragem
            if errors[0] <= errors[1] + 0.01 and errors[1] <= errors[2] + 0.01:
                ordered += 1
        self.assertGreaterEqual(ordered / len(seeds), 0.8)
