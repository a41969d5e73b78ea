# apps/cli/tests.py
import json
import os
import tempfile
import unittest
from datetime import date, timedelta
from io import StringIO
from pathlib import Path
from unittest import mock

import pandas as pd
import requests
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from rest_framework import serializers

from apps.cli.nwis import CFS_TO_CMS, DEFAULT_ENDPOINT, NwisClient, parse_rdb
from apps.cli.runconfig import RunConfig, build_run_config
from apps.core.exceptions import FetchError, InputError
from apps.dataset.panel import load_panel


def rdb(site, values, start=date(2000, 1, 1), qualifier='A'):
    lines = [
        '# US Geological Survey',
        '# comentário',
        f'agency_cd\tsite_no\tdatetime\t1234_00060_00003\t1234_00060_00003_cd',
        '5s\t15s\t20d\t14n\t10s',
    ]
    for offset, value in enumerate(values):
        day = start + timedelta(days=offset)
        lines.append(f'USGS\t{site}\t{day.isoformat()}\t{value}\t{qualifier}')
    return '\n'.join(lines) + '\n'


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def call(self, name, **options):
        out = StringIO()
        call_command(name, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()

    def call_error(self, name, **options):
        with self.assertRaises(CommandError) as ctx:
            self.call(name, **options)
        return ctx.exception

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    def write_json(self, name, payload):
        return self.write(name, json.dumps(payload))

    def read_json(self, name):
        return json.loads((self.dir / name).read_text(encoding='utf-8'))


class RunConfigTest(CommandTestCase):

    def test_defaults(self):
        run_config = build_run_config()
        self.assertEqual(run_config.k_min, 10)
        self.assertEqual(run_config.policy, 'knee')
        self.assertEqual(run_config.log_offset, 1.0)

    def test_flags_override_file(self):
        path = self.write_json('config.json', {'res': 5, 'gamma': 0.6, 'donor_group': ['A']})
        run_config = build_run_config(path, {'res': 7, 'gamma': None})
        self.assertEqual(run_config.res, 7)
        self.assertEqual(run_config.gamma, 0.6)
        self.assertEqual(run_config.donor_group, ('A',))

    def test_unknown_key(self):
        path = self.write_json('config.json', {'resolution': 5})
        with self.assertRaises(serializers.ValidationError):
            build_run_config(path)

    def test_crossed_lambda_range(self):
        with self.assertRaises(serializers.ValidationError):
            build_run_config(None, {'lambda_min': 0.5, 'lambda_max': 0.1})

    def test_bad_policy(self):
        with self.assertRaises(serializers.ValidationError):
            build_run_config(None, {'policy': 'elbow'})

    def test_sgm_config(self):
        config = RunConfig(k_min=2, k_max=4, res=3).sgm_config()
        self.assertEqual(config.point_count(5), 9)


class SynthesizeAndSelectTest(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.call('synthesize_panel', p=5, n=300, edges=[(0, 1), (1, 2), (3, 4)], seed=5,
                  output_dir=str(self.dir))
        self.panel = str(self.dir / 'panel.csv')

    def test_synthetic_outputs(self):
        panel = load_panel(self.panel)
        self.assertEqual((panel.n, panel.p), (300, 5))
        self.assertEqual(self.read_json('true_graph.json')['edges'], [[0, 1], [1, 2], [3, 4]])
        self.assertTrue((self.dir / 'coords.csv').exists())

    def test_scatter_has_one_row_per_point(self):
        self.call('select_graph', panel=self.panel, k_min=1, k_max=10, res=3, output_dir=str(self.dir),
                  svg_out=str(self.dir / 'scatter.svg'), precision_out=str(self.dir / 'precision.json'))
        lines = (self.dir / 'scatter.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'edge_count,error_val,lambda,tau,dominated')
        self.assertEqual(len(lines), 31)
        front = self.read_json('front.json')
        self.assertTrue(front)
        self.assertIn('lambda', front[0])
        self.assertTrue((self.dir / 'scatter.svg').exists())
        self.assertIn('theta', self.read_json('precision.json'))

    def test_edge_budget_policy(self):
        self.call('select_graph', panel=self.panel, k_min=1, k_max=10, res=2, policy='edges=4',
                  output_dir=str(self.dir))
        self.assertLessEqual(len(self.read_json('graph.json')['edges']), 4)

    def test_k_max_above_complete_graph(self):
        error = self.call_error('select_graph', panel=self.panel, k_min=1, k_max=11, res=1,
                                output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)
        self.assertFalse((self.dir / 'graph.json').exists())

    def test_missing_panel_file(self):
        error = self.call_error('select_graph', panel=str(self.dir / 'nope.csv'), output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)

    def test_unknown_config_key(self):
        config = self.write_json('config.json', {'panel': self.panel, 'colour': 'red'})
        error = self.call_error('select_graph', config=config, output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)

    def test_infer_and_resample(self):
        graph = str(self.dir / 'true_graph.json')
        self.call('infer_flows', panel=self.panel, graph=graph, output_dir=str(self.dir))
        report = self.read_json('report.json')
        self.assertEqual(report['approach'], 2)
        self.assertEqual(len(report['gauges']), 5)
        header = (self.dir / 'predictions.csv').read_text(encoding='utf-8').splitlines()[0]
        self.assertEqual(header, 'date,gauge_id,observed,predicted')

        first = str(self.dir / 'resample-1.json')
        second = str(self.dir / 'resample-2.json')
        self.call('resample_errors', panel=self.panel, graph=graph, runs=3, seed=7, out=first)
        self.call('resample_errors', panel=self.panel, graph=graph, runs=3, seed=7, out=second)
        self.assertEqual(Path(first).read_bytes(), Path(second).read_bytes())
        self.assertEqual(len(json.loads(Path(first).read_text())['per_run']), 3)

    def test_graph_from_other_network(self):
        graph = self.write_json('graph.json', {'gauge_ids': ['x', 'y', 'z', 'w', 'v'], 'edges': [[0, 1]]})
        error = self.call_error('infer_flows', panel=self.panel, graph=graph, output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)

    def test_negative_lam_is_usage_error(self):
        graph = str(self.dir / 'true_graph.json')
        error = self.call_error('infer_flows', panel=self.panel, graph=graph, approach=1, lam=-1.0,
                                output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)
        self.assertFalse((self.dir / 'predictions.csv').exists())

    def test_predictions_cover_test_period(self):
        self.call('infer_flows', panel=self.panel, graph=str(self.dir / 'true_graph.json'),
                  output_dir=str(self.dir))
        frame = pd.read_csv(self.dir / 'predictions.csv')
        self.assertEqual(len(frame), 5 * 100)
        self.assertFalse(frame.isna().any().any())

    def test_score_report_matches_chosen_point(self):
        self.call('select_graph', panel=self.panel, k_min=1, k_max=10, res=3, policy='min_error',
                  output_dir=str(self.dir))
        score = self.read_json('score.json')
        self.assertEqual(score['target_indices'], [0, 1, 2, 3, 4])
        self.assertAlmostEqual(score['error_val'], min(pt['error_val'] for pt in self.read_json('front.json')))
        self.assertAlmostEqual(score['error_val'], (5 - score['score_val']) / 5)

    def test_select_is_byte_identical(self):
        names = ('front.json', 'graph.json', 'score.json', 'scatter.csv', 'scatter.svg')
        for run in ('one', 'two'):
            self.call('select_graph', panel=self.panel, k_min=1, k_max=10, res=3, seed=3, workers=2,
                      output_dir=str(self.dir / run), svg_out=str(self.dir / run / 'scatter.svg'))
        for name in names:
            self.assertEqual((self.dir / 'one' / name).read_bytes(), (self.dir / 'two' / name).read_bytes(), name)

    def test_sweep_training_length(self):
        graph = str(self.dir / 'true_graph.json')
        self.call('sweep_training_length', panel=self.panel, graph=graph, lengths=(90, 20, 45, 500),
                  runs=2, seed=1, output_dir=str(self.dir))
        sweep = self.read_json('sweep.json')
        self.assertEqual([item['train_days'] for item in sweep['summaries']], [20, 45, 90])
        self.assertTrue(all(len(item['per_run']) == 2 for item in sweep['summaries']))

    def test_resample_records_run_nse(self):
        out = str(self.dir / 'resample.json')
        self.call('resample_errors', panel=self.panel, graph=str(self.dir / 'true_graph.json'),
                  runs=2, seed=0, train_days=60, out=out)
        summary = json.loads(Path(out).read_text())
        self.assertEqual(summary['train_days'], 60)
        self.assertEqual([len(values) for values in summary['per_run_nse']], [5, 5])
        self.assertTrue(all(summary['per_run_queue_nse']))

    def test_invalid_margin_is_usage_error(self):
        error = self.call_error('synthesize_panel', p=3, n=30, margin=0.0, output_dir=str(self.dir / 'bad'))
        self.assertEqual(error.returncode, 2)


class BaselineCommandTest(CommandTestCase):

    def test_dist_on_collinear_gauges(self):
        coords = self.write('coords.csv', 'gauge_id,lat,lon\nA,0,0\nB,0,1\nC,0,3\n')
        self.call('build_baseline', method='dist', m=1, coords=coords, output_dir=str(self.dir))
        self.assertEqual(self.read_json('baseline-dist-1.json'), {
            'gauge_ids': ['A', 'B', 'C'], 'edges': [[0, 1], [1, 2]],
        })

    def test_corr_links_duplicate_columns(self):
        rows = ['date,A,B,C']
        day = date(2000, 1, 1)
        for i in range(30):
            a = 10 + (i * 7) % 13
            b = 5 + (i * 5) % 11
            rows.append(f'{(day + timedelta(days=i)).isoformat()},{a},{b},{a}')
        panel = self.write('panel.csv', '\n'.join(rows) + '\n')
        self.call('build_baseline', method='corr', m=1, panel=panel, out=str(self.dir / 'corr.json'))
        self.assertIn([0, 2], self.read_json('corr.json')['edges'])

    def test_dist_without_coords(self):
        error = self.call_error('build_baseline', method='dist', output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)
        self.assertIn('coords', str(error))


class RemovalCommandTest(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.graph = self.write_json('graph.json', {'gauge_ids': ['A', 'B', 'C'], 'edges': [[0, 1], [1, 2]]})
        self.report = self.write_json('report.json', {
            'approach': 2, 'gamma': 0.7, 'error_test': 0.1, 'gauge_ids': ['A', 'B', 'C'],
            'gauges': [
                {'index': 0, 'gauge_id': 'A', 'nse': 0.9, 'r2': 0.9},
                {'index': 1, 'gauge_id': 'B', 'nse': 0.95, 'r2': 0.95},
                {'index': 2, 'gauge_id': 'C', 'nse': 0.8, 'r2': 0.8},
            ],
            'skipped': [], 'clamped': 0,
        })

    def test_path_graph_plan(self):
        self.call('plan_removals', graph=self.graph, report=self.report, output_dir=str(self.dir))
        plan = self.read_json('plan.json')
        self.assertEqual([entry['gauge_id'] for entry in plan['queue']], ['B'])
        self.assertEqual(plan['max_rem_rank'], 1)
        self.assertEqual(plan['status'], {'A': 'neighbor-of-removed', 'B': 'removed', 'C': 'neighbor-of-removed'})

    def test_score_graphs(self):
        self.call('plan_removals', graph=self.graph, report=self.report, out=str(self.dir / 'plan-a.json'))
        other = self.write_json('graph-b.json', {'gauge_ids': ['A', 'B', 'C'], 'edges': [[0, 2]]})
        self.call('plan_removals', graph=other, report=self.report, out=str(self.dir / 'plan-b.json'))
        self.write_json('res-a.json', {'mean': 0.2, 'stdev': 0.05, 'per_run': [0.15, 0.2, 0.25], 'seed': 0})
        self.write_json('res-b.json', {'mean': 0.4, 'stdev': 0.05, 'per_run': [0.35, 0.4, 0.45], 'seed': 0})
        self.call(
            'score_graphs',
            plan=[('a', str(self.dir / 'plan-a.json')), ('b', str(self.dir / 'plan-b.json'))],
            resample=[('a', str(self.dir / 'res-a.json')), ('b', str(self.dir / 'res-b.json'))],
            output_dir=str(self.dir),
        )
        scores = self.read_json('scores.json')
        self.assertEqual(scores['m_rem'], 1)
        by_label = {item['label']: item for item in scores['methods']}
        self.assertAlmostEqual(by_label['a']['graph_score'], 0.95)
        self.assertAlmostEqual(by_label['b']['graph_score'], 0.9)
        self.assertEqual(len(scores['comparisons']), 2)
        a_vs_b = next(c for c in scores['comparisons'] if c['a'] == 'a')
        self.assertTrue(a_vs_b['significant'])

    def test_score_graphs_without_plans(self):
        error = self.call_error('score_graphs', output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)

    def plans(self):
        self.call('plan_removals', graph=self.graph, report=self.report, out=str(self.dir / 'plan-a.json'))
        other = self.write_json('graph-b.json', {'gauge_ids': ['A', 'B', 'C'], 'edges': [[0, 2]]})
        self.call('plan_removals', graph=other, report=self.report, out=str(self.dir / 'plan-b.json'))
        return [('a', str(self.dir / 'plan-a.json')), ('b', str(self.dir / 'plan-b.json'))]

    def test_zero_m_rem_is_rejected(self):
        error = self.call_error('score_graphs', plan=self.plans(), m_rem=0, output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)
        self.assertIn('--m-rem', str(error))
        self.assertFalse((self.dir / 'scores.json').exists())

    def test_m_rem_above_shortest_queue(self):
        error = self.call_error('score_graphs', plan=self.plans(), m_rem=2, output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)

    def test_resampled_graph_scores(self):
        self.write_json('res-a.json', {
            'mean': 0.2, 'stdev': 0.05, 'per_run': [0.15, 0.2, 0.25], 'seed': 0,
            'per_run_queue_nse': [[0.95, 0.9], [0.9], [0.85, 0.8]],
        })
        self.write_json('res-b.json', {
            'mean': 0.4, 'stdev': 0.05, 'per_run': [0.35, 0.4, 0.45], 'seed': 0,
            'per_run_queue_nse': [[0.7], [0.6], [0.65]],
        })
        self.call(
            'score_graphs', plan=self.plans(),
            resample=[('a', str(self.dir / 'res-a.json')), ('b', str(self.dir / 'res-b.json'))],
            output_dir=str(self.dir),
        )
        scores = self.read_json('scores.json')
        self.assertEqual(scores['top'], 8)
        by_label = {item['label']: item for item in scores['methods']}
        self.assertAlmostEqual(by_label['a']['resample_graph_score'], 0.9)
        self.assertAlmostEqual(by_label['a']['resample_top_nse_mean'], (0.925 + 0.9 + 0.825) / 3)
        self.assertAlmostEqual(by_label['b']['resample_graph_score'], 0.65)
        self.assertAlmostEqual(by_label['a']['top_nse_mean'], 0.95)
        graph_tests = [c for c in scores['comparisons'] if c['metric'] == 'graph_score']
        self.assertEqual(len(graph_tests), 2)
        a_over_b = next(c for c in graph_tests if c['a'] == 'a')
        self.assertTrue(a_over_b['significant'])


def fake_get(url, params=None, timeout=None):
    response = mock.Mock()
    response.raise_for_status.return_value = None
    values = {'01': [100, 200, 300], '02': [10, 20, 30]}[params['sites']]
    response.text = rdb(params['sites'], values)
    return response


@override_settings(GAUGENET={'NWIS_ENDPOINT': 'http://nwis.test/dv/', 'HTTP_TIMEOUT': 5})
class NwisTest(CommandTestCase):

    def test_parse_rdb(self):
        frame = parse_rdb(rdb('01', [1.5, 2.0], qualifier='P'), '01')
        self.assertEqual(list(frame.columns), ['agency', 'site', 'datetime', 'value', 'qualifier'])
        self.assertEqual(list(frame['value']), [1.5, 2.0])

    def test_empty_response(self):
        with self.assertRaises(FetchError):
            parse_rdb('# só comentários\n', '01')

    def test_empty_site_list(self):
        with self.assertRaises(InputError):
            NwisClient().fetch_panel([], date(2000, 1, 1), date(2000, 1, 3))

    def test_http_failure(self):
        with mock.patch.object(requests.Session, 'get', side_effect=requests.ConnectionError('down')):
            with self.assertRaises(FetchError):
                NwisClient().fetch_site('01', date(2000, 1, 1), date(2000, 1, 3))

    def test_fetch_command_writes_panel(self):
        with mock.patch.object(requests.Session, 'get', side_effect=fake_get):
            self.call('fetch_panel', sites='01,02', start=date(2000, 1, 1), end=date(2000, 1, 3),
                      output_dir=str(self.dir))
        panel = load_panel(str(self.dir / 'panel.csv'))
        self.assertEqual((panel.n, panel.p), (3, 2))
        self.assertEqual(panel.gauge_ids, ('01', '02'))
        self.assertAlmostEqual(panel.q[0, 0], 100 * CFS_TO_CMS, places=4)

    def test_fetched_gap_is_rejected(self):
        def gappy_get(url, params=None, timeout=None):
            response = fake_get(url, params, timeout)
            if params['sites'] == '02':
                response.text = ''.join(
                    line for line in response.text.splitlines(keepends=True) if '2000-01-02' not in line
                )
            return response

        with mock.patch.object(requests.Session, 'get', side_effect=gappy_get):
            error = self.call_error('fetch_panel', sites='01,02', start=date(2000, 1, 1),
                                    end=date(2000, 1, 3), output_dir=str(self.dir))
            self.assertEqual(error.returncode, 2)
            self.assertFalse((self.dir / 'panel.csv').exists())

            self.call('fetch_panel', sites='01,02', start=date(2000, 1, 1), end=date(2000, 1, 3),
                      on_missing='drop_rows', output_dir=str(self.dir))
        panel = load_panel(str(self.dir / 'panel.csv'), on_missing='drop_rows')
        self.assertEqual(panel.n, 2)

    def test_fetch_command_without_sites(self):
        error = self.call_error('fetch_panel', start=date(2000, 1, 1), end=date(2000, 1, 3),
                                output_dir=str(self.dir))
        self.assertEqual(error.returncode, 2)


@unittest.skipUnless(os.environ.get('GAUGENET_RUN_NETWORK_TESTS') == '1', 'rede desabilitada')
class NwisNetworkTest(SimpleTestCase):

    def test_fetch_real_site(self):
        frame = NwisClient(endpoint=DEFAULT_ENDPOINT).fetch_panel(
            ['03159540'], date(1980, 1, 1), date(1980, 1, 10),
        )
        self.assertEqual(frame.shape, (10, 1))
