# apps/cli/management/commands/infer_flows.py
"""
Estima as vazões do período de teste com o grafo dado e avalia NSE por posto
"""

import io

import pandas as pd

from apps.cli.base import GaugeCommand
from apps.core.exceptions import GaugeNetworkError, InputError
from apps.inference.regression import evaluate
from apps.inference.serializers import EvaluationReportSerializer


PREDICTION_COLUMNS = ['date', 'gauge_id', 'observed', 'predicted']


def predictions_csv(report, splits) -> str:
    """Formato longo: date,gauge_id,observed,predicted"""
    test = splits.test
    frames = []
    for col, j in enumerate(report.target_indices):
        frames.append(pd.DataFrame({
            'date': [d.isoformat() for d in test.dates],
            'gauge_id': test.gauge_ids[j],
            'observed': test.q[:, j],
            'predicted': report.predictions[:, col],
        }))
    frame = pd.concat(frames, ignore_index=True)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator='\n', float_format='%.6g')
    return buffer.getvalue()


def load_predictions_csv(path) -> pd.DataFrame:
    frame = pd.read_csv(path, dtype={'gauge_id': str})
    if list(frame.columns) != PREDICTION_COLUMNS:
        raise GaugeNetworkError(f"Colunas inesperadas em {path}: {list(frame.columns)}")
    if frame[['observed', 'predicted']].isna().any().any():
        raise GaugeNetworkError(f"Valor ausente em {path}")
    return frame


class Command(GaugeCommand):
    help = 'Infere vazões de teste a partir dos doadores do grafo e gera o relatório de NSE'
    config_flags = ('panel', 'seed', 'gamma', 'approach', 'train_fraction_of_early',
                    'on_missing', 'log_offset', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--graph', required=True, help='JSON do grafo')
        parser.add_argument('--lam', type=float, default=0.0,
                            help='λ do Glasso restrito na abordagem 1')
        parser.add_argument('--predictions-out', help='CSV de predições (padrão: predictions.csv)')
        parser.add_argument('--report-out', help='JSON do relatório (padrão: report.json)')

    def run(self, run_config, outputs, **options):
        if not options['lam'] >= 0:
            raise InputError(f"--lam deve ser não negativo (recebido {options['lam']})")
        panel, splits = self.load_splits(run_config)
        graph = self.load_graph(options['graph'], panel)
        report = evaluate(graph, splits, gamma=run_config.gamma, approach=run_config.approach,
                          offset=run_config.log_offset, lam=options['lam'])
        rows = splits.test.n * len(report.target_indices)

        def check_rows(path):
            if len(load_predictions_csv(path)) != rows:
                raise GaugeNetworkError(f"{path} não tem {rows} linhas")

        outputs.write_text(
            self.output_path(run_config, options.get('predictions_out'), 'predictions.csv'),
            predictions_csv(report, splits), check=check_rows,
        )
        path = outputs.write_json(
            self.output_path(run_config, options.get('report_out'), 'report.json'),
            EvaluationReportSerializer.payload(report, panel.gauge_ids),
            EvaluationReportSerializer,
        )
        self.success(
            f"error_test={report.error_test:.4f}; {len(report.target_indices)} postos avaliados, "
            f"{len(report.skipped)} pulados; relatório em {path}"
        )
