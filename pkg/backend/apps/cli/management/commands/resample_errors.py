# apps/cli/management/commands/resample_errors.py

from apps.cli.base import GaugeCommand
from apps.scoring.resampling import resample_mean_error
from apps.scoring.serializers import ResampleSummarySerializer


class Command(GaugeCommand):
    help = 'Erro médio de teste em várias divisões treino/validação com o grafo fixo'
    config_flags = ('panel', 'seed', 'gamma', 'approach', 'train_fraction_of_early',
                    'on_missing', 'log_offset', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--graph', required=True, help='JSON do grafo')
        parser.add_argument('--runs', type=int, default=500, help='Número de rodadas')
        parser.add_argument('--train-days', type=int, help='Usa só este número de dias do treino sorteado')
        parser.add_argument('--out', help='JSON do resumo (padrão: resample.json)')

    def run(self, run_config, outputs, **options):
        panel = self.load_panel(run_config)
        graph = self.load_graph(options['graph'], panel)
        summary = resample_mean_error(
            panel, graph, options['runs'], run_config.seed,
            gamma=run_config.gamma, approach=run_config.approach, offset=run_config.log_offset,
            train_fraction_of_early=run_config.train_fraction_of_early, train_days=options.get('train_days'),
        )
        path = outputs.write_json(
            self.output_path(run_config, options.get('out'), 'resample.json'),
            ResampleSummarySerializer.payload(summary),
            ResampleSummarySerializer,
        )
        self.success(f"{summary.n_runs} rodadas: erro médio {summary.mean:.4f} ± {summary.stdev:.4f} em {path}")
