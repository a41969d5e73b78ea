# apps/cli/management/commands/synthesize_panel.py
"""
Rede sintética com grafo conhecido: painel, grafo verdadeiro e coordenadas
"""

from apps.cli.base import GaugeCommand
from apps.dataset.panel import load_panel, write_panel_csv
from apps.dataset.synthetic import SyntheticSpec, generate_synthetic_coords, generate_synthetic_panel
from apps.graph.network import coords_csv, load_coords
from apps.graph.serializers import GaugeGraphSerializer


def _edges(text):
    edges = []
    for item in text.split(','):
        if item.strip():
            i, j = item.split('-')
            edges.append((int(i), int(j)))
    return edges


class Command(GaugeCommand):
    help = 'Gera painel sintético, grafo verdadeiro e coordenadas plantadas'
    config_flags = ('seed', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--p', type=int, required=True, help='Número de postos')
        parser.add_argument('--n', type=int, required=True, help='Número de dias')
        parser.add_argument('--edges', type=_edges, help='Arestas verdadeiras, ex.: 0-1,1-2')
        parser.add_argument('--edge-probability', type=float, default=SyntheticSpec.edge_probability)
        parser.add_argument('--magnitude', type=float, default=SyntheticSpec.precision_offdiag_magnitude,
                            help='|θ_ij| nas arestas')
        parser.add_argument('--margin', type=float, default=SyntheticSpec.diagonal_margin,
                            help='Folga da diagonal: θ_ii = Σ|θ_ij| + margem')
        parser.add_argument('--panel-out', help='CSV do painel (padrão: panel.csv)')
        parser.add_argument('--graph-out', help='JSON do grafo verdadeiro (padrão: true_graph.json)')
        parser.add_argument('--coords-out', help='CSV de coordenadas (padrão: coords.csv)')

    def run(self, run_config, outputs, **options):
        spec = SyntheticSpec(
            p=options['p'], n=options['n'], true_edges=options.get('edges'),
            edge_probability=options['edge_probability'],
            precision_offdiag_magnitude=options['magnitude'], diagonal_margin=options['margin'],
            seed=run_config.seed,
        )
        panel, graph = generate_synthetic_panel(spec)
        coords = generate_synthetic_coords(graph, seed=run_config.seed)

        outputs.write_text(self.output_path(run_config, options.get('panel_out'), 'panel.csv'),
                           write_panel_csv(panel), check=load_panel)
        outputs.write_json(self.output_path(run_config, options.get('graph_out'), 'true_graph.json'),
                           GaugeGraphSerializer.payload(graph), GaugeGraphSerializer)
        outputs.write_text(self.output_path(run_config, options.get('coords_out'), 'coords.csv'),
                           coords_csv(coords), check=load_coords)
        self.success(f"Rede sintética p={spec.p}, n={spec.n}, {graph.edge_count} arestas")
