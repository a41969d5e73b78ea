# apps/cli/management/commands/plan_removals.py
"""
Fila de postos removíveis a partir do NSE de teste e do grafo
"""

import math

from apps.cli.base import GaugeCommand
from apps.core.exceptions import GraphError, ScoringError
from apps.core.files import read_json, validated
from apps.inference.serializers import EvaluationReportSerializer
from apps.removal.planner import confident_removals, run_rg
from apps.removal.serializers import RemovalPlanSerializer


class Command(GaugeCommand):
    help = 'Planeja remoções: fila gulosa por NSE com travamento de vizinhos'
    config_flags = ('delta', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--graph', required=True, help='JSON do grafo')
        parser.add_argument('--report', required=True, help='JSON do relatório de infer_flows')
        parser.add_argument('--out', help='JSON do plano (padrão: plan.json)')

    def run(self, run_config, outputs, **options):
        graph = self.load_graph(options['graph'])
        gauge_ids, nse_values = validated(EvaluationReportSerializer, read_json(options['report']))
        if tuple(gauge_ids) != tuple(graph.gauge_ids):
            raise GraphError("Postos do relatório não coincidem com os do grafo")

        plan = run_rg(nse_values, graph)
        if any(not math.isfinite(entry.nse) for entry in plan.queue):
            raise ScoringError("Posto removível sem NSE no relatório; rode infer_flows com o mesmo grafo")
        confident = confident_removals(plan, run_config.delta)

        path = outputs.write_json(
            self.output_path(run_config, options.get('out'), 'plan.json'),
            RemovalPlanSerializer.payload(plan, run_config.delta),
            RemovalPlanSerializer,
        )
        self.success(
            f"{plan.max_rem_rank} postos removíveis, {len(confident)} com NSE >= {run_config.delta}; plano em {path}"
        )
