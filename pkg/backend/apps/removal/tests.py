# apps/removal/tests.py
import itertools

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import GraphError, InputError
from apps.graph.network import GaugeGraph
from apps.removal.planner import (
    GaugeStatus, NseBand, QueueEntry, RemovalPlan, confident_removals, run_rg,
)
from apps.removal.serializers import RemovalPlanSerializer


def greedy_order(nse_values):
    return sorted(range(len(nse_values)), key=lambda j: (-nse_values[j], j))


def brute_force_queue(nse_values, graph):
    """
    Único conjunto independente S dos postos não isolados tal que todo posto
    fora de S tem vizinho em S que vem antes na ordem por NSE
    """
    order = greedy_order(nse_values)
    rank = {j: r for r, j in enumerate(order)}
    candidates = [j for j in range(graph.p) if graph.neighbors(j)]
    matches = []
    for size in range(len(candidates) + 1):
        for subset in itertools.combinations(candidates, size):
            chosen = set(subset)
            if any(i in chosen and j in chosen for i, j in graph.edges):
                continue
            covered = all(
                any(i in chosen and rank[i] < rank[j] for i in graph.neighbors(j))
                for j in candidates if j not in chosen
            )
            if covered:
                matches.append(sorted(chosen, key=rank.get))
    return matches


class RunRgTest(SimpleTestCase):

    def test_path_graph(self):
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1), (1, 2)}), gauge_ids=('A', 'B', 'C'))
        plan = run_rg([0.9, 0.95, 0.8], graph)
        self.assertEqual(plan.removed, [1])
        self.assertEqual(plan.queue[0].donors, (0, 2))
        self.assertEqual(plan.max_rem_rank, 1)
        self.assertEqual(plan.status[0], GaugeStatus.NEIGHBOR_OF_REMOVED)
        self.assertEqual(plan.status[2], GaugeStatus.NEIGHBOR_OF_REMOVED)

    def test_isolated_gauge_is_never_removed(self):
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1)}))
        plan = run_rg([0.5, 0.4, 0.99], graph)
        self.assertNotIn(2, plan.removed)
        self.assertEqual(plan.status[2], GaugeStatus.ISOLATED)

    def test_four_cycle_takes_opposite_corners(self):
        graph = GaugeGraph(p=4, edges=frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))
        plan = run_rg([0.9, 0.8, 0.7, 0.6], graph)
        self.assertEqual(plan.removed, [0, 2])
        self.assertEqual(plan.max_rem_rank, 2)

    def test_ties_go_to_lower_index(self):
        graph = GaugeGraph(p=2, edges=frozenset({(0, 1)}))
        self.assertEqual(run_rg([0.8, 0.8], graph).removed, [0])

    def test_nan_sorts_last(self):
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1), (1, 2)}))
        self.assertEqual(run_rg([float('nan'), 0.1, 0.2], graph).removed[0], 2)

    def test_length_mismatch(self):
        with self.assertRaises(GraphError):
            run_rg([0.5], GaugeGraph(p=2, edges=frozenset({(0, 1)})))

    def test_matches_brute_force_on_small_graphs(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            p = int(rng.integers(2, 8))
            edges = frozenset(pair for pair in itertools.combinations(range(p), 2) if rng.random() < 0.4)
            graph = GaugeGraph(p=p, edges=edges)
            nse_values = [float(v) for v in rng.uniform(-0.5, 1.0, size=p)]
            plan = run_rg(nse_values, graph)

            self.assertEqual(brute_force_queue(nse_values, graph), [plan.removed])
            removed = set(plan.removed)
            self.assertFalse(any(i in removed and j in removed for i, j in graph.edges))
            queue_nse = [entry.nse for entry in plan.queue]
            self.assertEqual(queue_nse, sorted(queue_nse, reverse=True))
            self.assertEqual(set(plan.status), set(range(p)))
            self.assertTrue(all(entry.donors for entry in plan.queue))


class ConfidentRemovalsTest(SimpleTestCase):

    def setUp(self):
        self.plan = RemovalPlan(
            queue=(
                QueueEntry(gauge=0, nse=0.95, donors=(1,)),
                QueueEntry(gauge=2, nse=0.72, donors=(1,)),
                QueueEntry(gauge=4, nse=0.55, donors=(3,)),
            ),
            status={},
        )

    def test_threshold(self):
        self.assertEqual(confident_removals(self.plan, 0.7), [0, 2])

    def test_zero_threshold_keeps_queue(self):
        self.assertEqual(confident_removals(self.plan, 0.0), [0, 2, 4])

    def test_invalid_delta(self):
        with self.assertRaises(InputError):
            confident_removals(self.plan, 1.5)


class NseBandTest(SimpleTestCase):

    def test_bands(self):
        self.assertIs(NseBand.for_nse(0.95), NseBand.BLUE)
        self.assertIs(NseBand.for_nse(0.8), NseBand.GREEN)
        self.assertIs(NseBand.for_nse(0.75), NseBand.YELLOW)
        self.assertIs(NseBand.for_nse(0.6), NseBand.ORANGE)
        self.assertIs(NseBand.for_nse(-3.0), NseBand.RED)


class RemovalPlanSerializerTest(SimpleTestCase):

    def test_payload_validates(self):
        graph = GaugeGraph(p=3, edges=frozenset({(0, 1), (1, 2)}), gauge_ids=('A', 'B', 'C'))
        plan = run_rg([0.9, 0.95, 0.8], graph)
        payload = RemovalPlanSerializer.payload(plan, 0.7)
        self.assertEqual(payload['queue'][0]['gauge_id'], 'B')
        self.assertEqual(payload['queue'][0]['band'], 'blue')
        self.assertEqual(payload['queue'][0]['donors'], ['A', 'C'])
        self.assertEqual(payload['confident_count'], 1)
        serializer = RemovalPlanSerializer(data=payload)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().removed, [1])

    def test_rejects_wrong_band(self):
        graph = GaugeGraph(p=2, edges=frozenset({(0, 1)}), gauge_ids=('A', 'B'))
        payload = RemovalPlanSerializer.payload(run_rg([0.9, 0.5], graph), 0.7)
        payload['queue'][0]['band'] = 'red'
        self.assertFalse(RemovalPlanSerializer(data=payload).is_valid())
