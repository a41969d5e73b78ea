# apps/graph/tests.py
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import GraphError, PanelFormatError
from apps.graph.network import (
    GaugeCoords, GaugeGraph, apply_role_constraints, choose_tau_for_k, coords_csv,
    corr_graph, dist_graph, graph_from_precision, haversine_matrix, load_coords,
)
from apps.graph.serializers import GaugeGraphSerializer


class GaugeGraphTest(SimpleTestCase):

    def test_edges_are_normalized(self):
        graph = GaugeGraph(p=3, edges=frozenset({(2, 0), (1, 2)}))
        self.assertEqual(graph.sorted_edges(), [(0, 2), (1, 2)])
        self.assertEqual(graph.neighbors(2), [0, 1])
        self.assertEqual(graph.isolated(), [])

    def test_self_loop_is_error(self):
        with self.assertRaises(GraphError):
            GaugeGraph(p=2, edges=frozenset({(1, 1)}))

    def test_out_of_range_is_error(self):
        with self.assertRaises(GraphError):
            GaugeGraph(p=2, edges=frozenset({(0, 2)}))

    def test_complete_graph(self):
        self.assertEqual(GaugeGraph.complete(5).edge_count, 10)


class PrecisionGraphTest(SimpleTestCase):

    theta = np.array([
        [2.0, 0.5, 0.1],
        [0.5, 2.0, -0.3],
        [0.1, -0.3, 2.0],
    ])

    def test_threshold_is_strict(self):
        graph = graph_from_precision(self.theta, tau=0.3)
        self.assertEqual(graph.sorted_edges(), [(0, 1)])

    def test_tau_zero_keeps_support(self):
        self.assertEqual(graph_from_precision(self.theta).edge_count, 3)

    def test_choose_tau_for_k(self):
        self.assertEqual(choose_tau_for_k(self.theta, 3), 0.0)
        tau = choose_tau_for_k(self.theta, 2)
        self.assertAlmostEqual(tau, 0.1)
        self.assertEqual(graph_from_precision(self.theta, tau).edge_count, 2)
        self.assertEqual(graph_from_precision(self.theta, choose_tau_for_k(self.theta, 0)).edge_count, 0)

    def test_ties_leave_fewer_edges(self):
        theta = np.array([[1.0, 0.2, 0.2], [0.2, 1.0, 0.0], [0.2, 0.0, 1.0]])
        tau = choose_tau_for_k(theta, 1)
        self.assertEqual(graph_from_precision(theta, tau).edge_count, 0)

    def test_edge_count_never_exceeds_k(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(7, 7))
        theta = a + a.T
        for k in range(0, 22):
            tau = choose_tau_for_k(theta, k)
            self.assertLessEqual(graph_from_precision(theta, tau).edge_count, k)

    def test_edge_count_non_increasing_in_tau(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(8, 8))
        theta = a @ a.T + 8 * np.eye(8)
        magnitudes = np.abs(theta[np.triu_indices(8, 1)])
        taus = np.concatenate(([0.0], magnitudes, np.linspace(0, magnitudes.max(), 50)))
        counts = [graph_from_precision(theta, tau).edge_count for tau in np.sort(taus)]
        self.assertEqual(counts[0], 28)
        self.assertEqual(counts[-1], 0)
        for previous, current in zip(counts, counts[1:]):
            self.assertLessEqual(current, previous)


class BaselineGraphTest(SimpleTestCase):

    def test_dist_graph_on_collinear_gauges(self):
        coords = GaugeCoords(gauge_ids=('a', 'b', 'c'), lat=[0.0, 0.0, 0.0], lon=[0.0, 1.0, 3.0])
        graph = dist_graph(coords, m=1)
        self.assertEqual(graph.sorted_edges(), [(0, 1), (1, 2)])
        self.assertEqual(graph.gauge_ids, ('a', 'b', 'c'))

    def test_haversine_one_degree_on_equator(self):
        coords = GaugeCoords(gauge_ids=('a', 'b'), lat=[0.0, 0.0], lon=[0.0, 1.0])
        self.assertAlmostEqual(haversine_matrix(coords)[0, 1], 111.19, places=1)

    def test_corr_graph_links_duplicate_columns(self):
        rng = np.random.default_rng(1)
        z = rng.normal(size=(40, 4))
        z[:, 3] = z[:, 1]
        graph = corr_graph(z, m=1)
        self.assertIn((1, 3), graph.edges)

    def test_m_too_large(self):
        with self.assertRaises(GraphError):
            corr_graph(np.random.default_rng(0).normal(size=(10, 2)), m=2)


class RoleConstraintTest(SimpleTestCase):

    def test_drops_donor_donor_and_target_target_edges(self):
        graph = GaugeGraph.complete(4, gauge_ids=('a', 'b', 'c', 'd'))
        constrained = apply_role_constraints(graph, donors=['a', 'b'], targets=['c', 'd'])
        self.assertEqual(constrained.sorted_edges(), [(0, 2), (0, 3), (1, 2), (1, 3)])

    def test_unknown_gauge(self):
        with self.assertRaises(GraphError):
            apply_role_constraints(GaugeGraph.complete(2), donors=['zz'])


class CoordsFileTest(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = os.path.join(self.tmp.name, 'coords.csv')

    def test_written_coords_load_back(self):
        coords = GaugeCoords(gauge_ids=('01', '02'), lat=[38.25, 39.5], lon=[-83.0, -82.125])
        with open(self.path, 'w', encoding='utf-8') as fh:
            fh.write(coords_csv(coords))
        loaded = load_coords(self.path)
        self.assertEqual(loaded.gauge_ids, ('01', '02'))
        np.testing.assert_allclose(loaded.lon, coords.lon)

    def test_bad_header(self):
        with open(self.path, 'w', encoding='utf-8') as fh:
            fh.write("id,lat,lon\na,1,2\n")
        with self.assertRaises(PanelFormatError):
            load_coords(self.path)

    def test_reordered_to_panel(self):
        coords = GaugeCoords(gauge_ids=('a', 'b'), lat=[1.0, 2.0], lon=[3.0, 4.0])
        self.assertEqual(list(coords.reordered(['b', 'a']).lat), [2.0, 1.0])
        with self.assertRaises(PanelFormatError):
            coords.reordered(['c'])


class GaugeGraphSerializerTest(SimpleTestCase):

    def test_payload_is_sorted(self):
        graph = GaugeGraph(p=3, edges=frozenset({(2, 1), (0, 2)}), gauge_ids=('x', 'y', 'z'))
        self.assertEqual(GaugeGraphSerializer.payload(graph), {
            'gauge_ids': ['x', 'y', 'z'],
            'edges': [[0, 2], [1, 2]],
        })

    def test_create_from_payload(self):
        serializer = GaugeGraphSerializer(data={'gauge_ids': ['x', 'y'], 'edges': [[0, 1]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().edges, frozenset({(0, 1)}))

    def test_rejects_reversed_edge(self):
        serializer = GaugeGraphSerializer(data={'gauge_ids': ['x', 'y'], 'edges': [[1, 0]]})
        self.assertFalse(serializer.is_valid())

    def test_rejects_edge_out_of_range(self):
        serializer = GaugeGraphSerializer(data={'gauge_ids': ['x', 'y'], 'edges': [[0, 2]]})
        self.assertFalse(serializer.is_valid())
