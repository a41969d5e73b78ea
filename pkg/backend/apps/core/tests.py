# apps/core/tests.py
import tempfile
from pathlib import Path

from django.test import SimpleTestCase
from rest_framework import serializers

from apps.core.exceptions import GaugeNetworkError, GraphError, InputError, PanelFormatError
from apps.core.files import OutputSet, dumps, read_json, validated
from apps.graph.serializers import GaugeGraphSerializer


class ExceptionHierarchyTest(SimpleTestCase):

    def test_input_errors(self):
        self.assertTrue(issubclass(PanelFormatError, InputError))
        self.assertTrue(issubclass(GraphError, InputError))
        self.assertTrue(issubclass(InputError, GaugeNetworkError))


class OutputSetTest(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_writes_and_validates_json(self):
        with OutputSet() as outputs:
            path = outputs.write_json(self.dir / 'sub' / 'graph.json',
                                      {'gauge_ids': ['a', 'b'], 'edges': [[0, 1]]}, GaugeGraphSerializer)
        self.assertEqual(read_json(path)['edges'], [[0, 1]])
        self.assertFalse((self.dir / 'sub' / 'graph.json.tmp').exists())

    def test_invalid_output_is_error(self):
        with self.assertRaises(GaugeNetworkError):
            with OutputSet() as outputs:
                outputs.write_json(self.dir / 'graph.json', {'gauge_ids': ['a'], 'edges': [[0, 1]]},
                                   GaugeGraphSerializer)
        self.assertFalse((self.dir / 'graph.json').exists())

    def test_partial_outputs_are_removed_on_failure(self):
        with self.assertRaises(RuntimeError):
            with OutputSet() as outputs:
                outputs.write_text(self.dir / 'first.csv', 'a,b\n')
                raise RuntimeError('falha')
        self.assertFalse((self.dir / 'first.csv').exists())

    def test_text_check_failure_removes_file(self):
        def reject(path):
            raise ValueError(f"ilegível: {path.name}")

        with self.assertRaises(GaugeNetworkError):
            with OutputSet() as outputs:
                outputs.write_text(self.dir / 'out.csv', 'a,b\n', check=reject)
        self.assertFalse((self.dir / 'out.csv').exists())

    def test_text_check_keeps_domain_error(self):
        def reject(path):
            raise PanelFormatError('missing value at (0,1)')

        with self.assertRaises(PanelFormatError):
            with OutputSet() as outputs:
                outputs.write_text(self.dir / 'panel.csv', 'date,a\n2000-01-01,\n', check=reject)
        self.assertFalse((self.dir / 'panel.csv').exists())

    def test_text_check_sees_written_file(self):
        seen = []
        with OutputSet() as outputs:
            outputs.write_text(self.dir / 'ok.csv', 'a\n1\n', check=lambda path: seen.append(path.read_text()))
        self.assertEqual(seen, ['a\n1\n'])

    def test_dumps_is_deterministic(self):
        payload = {'b': [1.5, 2], 'a': 'ção'}
        self.assertEqual(dumps(payload), dumps(dict(payload)))
        self.assertIn('ção', dumps(payload))
        with self.assertRaises(ValueError):
            dumps({'x': float('nan')})

    def test_validated_returns_domain_object(self):
        graph = validated(GaugeGraphSerializer, {'gauge_ids': ['a', 'b', 'c'], 'edges': [[1, 2]]})
        self.assertEqual(graph.p, 3)
        with self.assertRaises(serializers.ValidationError):
            validated(GaugeGraphSerializer, {'gauge_ids': ['a', 'a'], 'edges': []})
