# apps/cli/management/commands/sweep_training_length.py
"""
Erro médio de teste em função do número de dias de treino, com o grafo fixo
"""

from apps.cli.base import GaugeCommand
from apps.core.exceptions import InputError
from apps.scoring.resampling import DEFAULT_SWEEP_LENGTHS, training_length_sweep
from apps.scoring.serializers import ResampleSummarySerializer, TrainingSweepSerializer


def _lengths(text):
    return tuple(int(item) for item in text.split(',') if item.strip())


class Command(GaugeCommand):
    help = 'Varre o comprimento do treino e mede o erro médio de teste reamostrado'
    config_flags = ('panel', 'seed', 'gamma', 'approach', 'train_fraction_of_early',
                    'on_missing', 'log_offset', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--graph', required=True, help='JSON do grafo')
        parser.add_argument('--lengths', type=_lengths, default=DEFAULT_SWEEP_LENGTHS,
                            help='Dias de treino, separados por vírgula')
        parser.add_argument('--runs', type=int, default=20, help='Rodadas por comprimento')
        parser.add_argument('--out', help='JSON da varredura (padrão: sweep.json)')

    def run(self, run_config, outputs, **options):
        if options['runs'] < 1:
            raise InputError("--runs deve ser >= 1")
        panel = self.load_panel(run_config)
        graph = self.load_graph(options['graph'], panel)
        summaries = training_length_sweep(
            panel, graph, options['lengths'], options['runs'], run_config.seed,
            gamma=run_config.gamma, approach=run_config.approach, offset=run_config.log_offset,
            train_fraction_of_early=run_config.train_fraction_of_early,
        )
        path = outputs.write_json(
            self.output_path(run_config, options.get('out'), 'sweep.json'),
            {'seed': run_config.seed, 'runs': options['runs'],
             'summaries': [ResampleSummarySerializer.payload(summary) for summary in summaries]},
            TrainingSweepSerializer,
        )
        for summary in summaries:
            self.stdout.write(f"{summary.train_days} dias: erro médio {summary.mean:.4f} ± {summary.stdev:.4f}")
        self.success(f"Varredura com {len(summaries)} comprimentos em {path}")
