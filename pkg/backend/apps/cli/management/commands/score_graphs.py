# apps/cli/management/commands/score_graphs.py
"""
Compara métodos de seleção: graph_score com M_rem compartilhado
(maior número de remoções confiáveis entre os métodos) e testes t
unicaudais entre os erros reamostrados
"""

from itertools import permutations

from apps.cli.base import GaugeCommand
from apps.core.exceptions import InputError, ScoringError
from apps.core.files import read_json, validated
from apps.removal.serializers import RemovalPlanSerializer
from apps.scoring.metrics import graph_score, one_tailed_t_test
from apps.scoring.resampling import DEFAULT_TOP_N
from apps.scoring.serializers import GraphComparisonSerializer, ResampleSummarySerializer

DEFAULT_ALPHA = 0.05


def _labelled(text):
    label, sep, path = text.partition('=')
    if not sep or not label or not path:
        raise ValueError(text)
    return label.strip(), path.strip()


class Command(GaugeCommand):
    help = 'Pontua os grafos de cada método e compara os erros reamostrados'
    config_flags = ('delta', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--plan', action='append', type=_labelled, default=[],
                            metavar='ROTULO=plan.json', help='Plano de remoção de um método')
        parser.add_argument('--resample', action='append', type=_labelled, default=[],
                            metavar='ROTULO=resample.json', help='Erros reamostrados de um método')
        parser.add_argument('--m-rem', type=int, help='Sobrescreve o M_rem compartilhado')
        parser.add_argument('--top', type=int, default=DEFAULT_TOP_N,
                            help='Quantos removíveis de maior NSE entram na média de NSE')
        parser.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
        parser.add_argument('--out', help='JSON da comparação (padrão: scores.json)')

    def run(self, run_config, outputs, **options):
        delta = run_config.delta
        if not options['plan']:
            raise InputError("Informe ao menos um plano (--plan ROTULO=plan.json)")
        plans = {}
        for label, path in options['plan']:
            if label in plans:
                raise InputError(f"Rótulo repetido: {label}")
            plans[label] = validated(RemovalPlanSerializer, read_json(path))
        resamples = {}
        for label, path in options['resample']:
            if label not in plans:
                raise InputError(f"Reamostragem {label} sem plano correspondente")
            resamples[label] = validated(ResampleSummarySerializer, read_json(path))

        confident = {
            label: sum(1 for entry in plan.queue if entry.nse >= delta)
            for label, plan in plans.items()
        }
        top = options['top']
        if top < 1:
            raise InputError(f"--top deve ser >= 1 (recebido {top})")
        m_rem = options.get('m_rem')
        if m_rem is None:
            m_rem = max(confident.values())
            if m_rem < 1:
                raise InputError(f"Nenhum método tem remoções com NSE >= {delta}; informe --m-rem")
        elif m_rem < 1:
            raise InputError(f"--m-rem deve ser >= 1 (recebido {m_rem})")
        shortest = min(plan.max_rem_rank for plan in plans.values())
        if m_rem > shortest:
            raise InputError(f"M_rem={m_rem} excede a menor fila de remoção ({shortest})")

        methods = []
        for label, plan in plans.items():
            summary = resamples.get(label)
            queue = [entry.nse for entry in plan.queue]
            methods.append({
                'label': label,
                'graph_score': graph_score(queue, m_rem),
                'max_rem_rank': plan.max_rem_rank,
                'confident_count': confident[label],
                'mean_error': summary.mean if summary else None,
                'top_nse_mean': sum(queue[:top]) / len(queue[:top]) if queue else None,
                'resample_graph_score': summary.mean_graph_score(m_rem) if summary else None,
                'resample_top_nse_mean': summary.mean_top_nse(top) if summary else None,
            })

        alpha = options['alpha']
        comparisons = []
        for a, b in permutations(resamples, 2):
            p_value = one_tailed_t_test(resamples[a].per_run, resamples[b].per_run)
            comparisons.append({'metric': 'error', 'a': a, 'b': b,
                                'p_value': p_value, 'significant': p_value < alpha})
            scores_a = resamples[a].run_graph_scores(m_rem)
            scores_b = resamples[b].run_graph_scores(m_rem)
            if len(scores_a) >= 2 and len(scores_b) >= 2:
                try:
                    # H1: graph_score de a maior que o de b
                    p_value = one_tailed_t_test(scores_b, scores_a)
                except ScoringError as exc:
                    self.stderr.write(f"Teste de graph_score {a} x {b} pulado: {exc}")
                    continue
                comparisons.append({'metric': 'graph_score', 'a': a, 'b': b,
                                    'p_value': p_value, 'significant': p_value < alpha})

        path = outputs.write_json(
            self.output_path(run_config, options.get('out'), 'scores.json'),
            {'m_rem': m_rem, 'top': top, 'delta': delta, 'alpha': alpha,
             'methods': methods, 'comparisons': comparisons},
            GraphComparisonSerializer,
        )
        for item in methods:
            self.stdout.write(f"{item['label']}: graph_score={item['graph_score']:.3f} (M_rem={m_rem})")
        self.success(f"Comparação salva em {path}")
