# apps/cli/management/commands/build_baseline.py
"""
Grafos de referência da prática corrente: m vizinhos mais próximos (dist)
ou m postos mais correlacionados no treino (corr)
"""

from apps.cli.base import GaugeCommand
from apps.core.exceptions import InputError
from apps.dataset.panel import standardized_subsets
from apps.graph.network import corr_graph, dist_graph, load_coords
from apps.graph.serializers import GaugeGraphSerializer


class Command(GaugeCommand):
    help = 'Constrói o grafo de referência Dist ou Corr com m doadores por alvo'
    config_flags = ('panel', 'coords', 'seed', 'train_fraction_of_early', 'on_missing', 'log_offset', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--method', choices=['dist', 'corr'], required=True)
        parser.add_argument('--m', type=int, choices=[1, 2, 3], default=1, help='Doadores por alvo')
        parser.add_argument('--out', help='JSON do grafo (padrão: baseline-<method>-<m>.json)')

    def run(self, run_config, outputs, **options):
        method, m = options['method'], options['m']
        if method == 'dist':
            if not run_config.coords:
                raise InputError("O método dist exige o CSV de coordenadas (--coords)")
            coords = load_coords(run_config.coords)
            if run_config.panel:
                coords = coords.reordered(self.load_panel(run_config).gauge_ids)
            graph = dist_graph(coords, m)
        else:
            _, splits = self.load_splits(run_config)
            z_train, _, _, _ = standardized_subsets(splits, run_config.log_offset)
            graph = corr_graph(z_train, m, splits.train.gauge_ids)

        path = outputs.write_json(
            self.output_path(run_config, options.get('out'), f'baseline-{method}-{m}.json'),
            GaugeGraphSerializer.payload(graph),
            GaugeGraphSerializer,
        )
        self.success(f"Grafo {method}(m={m}) com {graph.edge_count} arestas em {path}")
