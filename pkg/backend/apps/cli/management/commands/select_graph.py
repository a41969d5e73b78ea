# apps/cli/management/commands/select_graph.py
"""
Seleção do grafo de doadores: divisão, amostragem (λ, k), frente de Pareto
e escolha pela política
"""

from dataclasses import replace

from django.conf import settings

from apps.cli.base import GaugeCommand
from apps.core.exceptions import GaugeNetworkError
from apps.dataset.panel import sample_covariance, standardized_subsets
from apps.glasso.serializers import PrecisionEstimateSerializer
from apps.glasso.solver import DEFAULT_MAX_SWEEPS, DEFAULT_TOL, PenaltySpec, glasso_fit
from apps.graph.serializers import GaugeGraphSerializer
from apps.scoring.serializers import ScoreReportSerializer
from apps.sgm.pareto import Policy, pareto_front, select_point
from apps.sgm.plots import check_svg, load_scatter_csv, scatter_csv, scatter_svg
from apps.sgm.selection import run_sgm
from apps.sgm.serializers import CandidatePointSerializer


def _id_list(text):
    return tuple(item.strip() for item in text.split(',') if item.strip())


class Command(GaugeCommand):
    help = 'Seleciona o grafo de doadores pela otimização multiobjetivo (arestas × erro)'
    config_flags = (
        'panel', 'seed', 'lambda_min', 'lambda_max', 'k_min', 'k_max', 'res', 'gamma',
        'train_fraction_of_early', 'policy', 'on_missing', 'log_offset', 'workers', 'output_dir',
    )

    def add_command_arguments(self, parser):
        parser.add_argument('--donors', type=_id_list, help='Postos doadores conhecidos (separados por vírgula)')
        parser.add_argument('--targets', type=_id_list, help='Postos alvo conhecidos (separados por vírgula)')
        parser.add_argument('--front-out', help='JSON da frente de Pareto (padrão: front.json)')
        parser.add_argument('--graph-out', help='JSON do grafo escolhido (padrão: graph.json)')
        parser.add_argument('--score-out', help='JSON com R² e NSE de validação do grafo escolhido (padrão: score.json)')
        parser.add_argument('--scatter-out', help='CSV com todos os pontos (padrão: scatter.csv)')
        parser.add_argument('--svg-out', help='SVG de dispersão (opcional)')
        parser.add_argument('--precision-out', help='JSON da precisão reajustada no grafo escolhido (opcional)')

    def run(self, run_config, outputs, **options):
        if options.get('donors') is not None:
            run_config = replace(run_config, donor_group=options['donors'])
        if options.get('targets') is not None:
            run_config = replace(run_config, target_group=options['targets'])

        _, splits = self.load_splits(run_config)
        points = run_sgm(splits, run_config.sgm_config(), offset=run_config.log_offset,
                         workers=run_config.workers)
        front = pareto_front(points)
        policy = Policy.parse(run_config.policy)
        chosen = select_point(front, policy)

        outputs.write_json(
            self.output_path(run_config, options.get('front_out'), 'front.json'),
            [CandidatePointSerializer.payload(pt) for pt in front.points],
            CandidatePointSerializer, many=True,
        )
        graph_path = outputs.write_json(
            self.output_path(run_config, options.get('graph_out'), 'graph.json'),
            GaugeGraphSerializer.payload(chosen.graph),
            GaugeGraphSerializer,
        )
        outputs.write_json(
            self.output_path(run_config, options.get('score_out'), 'score.json'),
            ScoreReportSerializer.payload(chosen.report),
            ScoreReportSerializer,
        )

        def check_scatter(path):
            if len(load_scatter_csv(path)) != len(points):
                raise GaugeNetworkError(f"CSV de dispersão {path} não tem {len(points)} linhas")

        outputs.write_text(
            self.output_path(run_config, options.get('scatter_out'), 'scatter.csv'),
            scatter_csv(points, front), check=check_scatter,
        )
        if options.get('svg_out'):
            outputs.write_text(options['svg_out'], scatter_svg(points, front), check=check_svg)
        if options.get('precision_out'):
            z_train, _, _, _ = standardized_subsets(splits, run_config.log_offset)
            estimate = glasso_fit(
                sample_covariance(z_train),
                PenaltySpec(lam=chosen.lam, zero_pattern=chosen.graph,
                            penalize_diagonal=settings.GAUGENET.get('PENALIZE_DIAGONAL', True)),
                tol=settings.GAUGENET.get('GLASSO_TOL', DEFAULT_TOL),
                max_sweeps=settings.GAUGENET.get('GLASSO_MAX_SWEEPS', DEFAULT_MAX_SWEEPS),
            )
            outputs.write_json(options['precision_out'], PrecisionEstimateSerializer.payload(estimate),
                               PrecisionEstimateSerializer)

        self.success(
            f"{len(points)} pontos, {len(front)} na frente ({front.distinct_graphs()} grafos distintos); "
            f"grafo ({policy}) com {chosen.edge_count} arestas e erro {chosen.error_val:.4f} em {graph_path}"
        )
