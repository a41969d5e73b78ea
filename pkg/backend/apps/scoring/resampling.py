# apps/scoring/resampling.py
"""
Erro médio de teste por reamostragem do treino/validação com grafo fixo,
graph_score e NSE dos melhores removíveis por rodada, e varredura do
comprimento do treino
"""

import logging
import math
import statistics
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from apps.core.exceptions import ScoringError
from apps.dataset.panel import DEFAULT_LOG_OFFSET, StreamflowPanel, split, train_capacity
from apps.graph.network import GaugeGraph
from apps.scoring.metrics import DEFAULT_GAMMA, graph_score

logger = logging.getLogger(__name__)

DEFAULT_TOP_N = 8
DEFAULT_SWEEP_LENGTHS = (45, 90, 180, 365, 730, 1095, 1460, 1825, 2190, 2555, 2920, 3285, 3650)


@dataclass(frozen=True)
class ResampleSummary:
    """
    per_run_nse: NSE de teste por posto em cada rodada (None = pulado)
    per_run_queue_nse: NSE da fila de remoção de cada rodada, em ordem
    """
    mean: float
    stdev: float
    per_run: List[float]
    seed: int
    per_run_nse: List[List[Optional[float]]] = field(default_factory=list)
    per_run_queue_nse: List[List[float]] = field(default_factory=list)
    train_days: Optional[int] = None

    @property
    def n_runs(self) -> int:
        return len(self.per_run)

    def run_graph_scores(self, m_rem: int) -> List[float]:
        """graph_score por rodada; M_rem é limitado ao tamanho da fila da rodada"""
        if m_rem < 1:
            raise ScoringError("m_rem deve ser >= 1")
        return [graph_score(queue, min(m_rem, len(queue))) for queue in self.per_run_queue_nse if queue]

    def mean_graph_score(self, m_rem: int) -> Optional[float]:
        scores = self.run_graph_scores(m_rem)
        return statistics.fmean(scores) if scores else None

    def mean_top_nse(self, top: int = DEFAULT_TOP_N) -> Optional[float]:
        """Média, sobre as rodadas, do NSE médio dos `top` primeiros da fila"""
        if top < 1:
            raise ScoringError("top deve ser >= 1")
        means = [statistics.fmean(queue[:top]) for queue in self.per_run_queue_nse if queue]
        return statistics.fmean(means) if means else None


def resample_mean_error(panel: StreamflowPanel, graph: GaugeGraph, n_runs: int, seed: int,
                        gamma: float = DEFAULT_GAMMA, approach: int = 2,
                        offset: float = DEFAULT_LOG_OFFSET,
                        train_fraction_of_early: float = 0.5,
                        train_days: Optional[int] = None) -> ResampleSummary:
    """
    Para cada rodada r, refaz a divisão com semente seed + r (o teste é sempre
    o último terço), reajusta os coeficientes no novo treino e mede error_test.
    O NSE por posto de cada rodada alimenta o laço de remoção.

    Returns:
        ResampleSummary com média, desvio padrão amostral (0 com uma rodada),
        a lista por rodada e os NSE por rodada
    """
    # import tardio: inference depende de scoring.metrics
    from apps.inference.regression import evaluate
    from apps.removal.planner import run_rg

    if n_runs < 1:
        raise ScoringError("n_runs deve ser >= 1")

    errors, per_run_nse, per_run_queue = [], [], []
    for run in range(n_runs):
        splits = split(panel, seed + run, train_fraction_of_early, train_days=train_days)
        report = evaluate(graph, splits, gamma=gamma, approach=approach, offset=offset)
        errors.append(report.error_test)
        by_gauge = report.nse_by_gauge(graph.p)
        per_run_nse.append([value if math.isfinite(value) else None for value in by_gauge])
        # NaN fica no fim da fila e não entra no JSON
        queue = run_rg(by_gauge, graph).queue
        per_run_queue.append([entry.nse for entry in queue if math.isfinite(entry.nse)])
        logger.debug(f"Rodada {run}: error_test={report.error_test:.4f}")

    mean = statistics.fmean(errors)
    stdev = statistics.stdev(errors) if n_runs > 1 else 0.0
    logger.info(f"Reamostragem: {n_runs} rodadas, erro médio {mean:.4f} ± {stdev:.4f}")
    return ResampleSummary(
        mean=mean, stdev=stdev, per_run=errors, seed=int(seed),
        per_run_nse=per_run_nse, per_run_queue_nse=per_run_queue, train_days=train_days,
    )


def training_length_sweep(panel: StreamflowPanel, graph: GaugeGraph, lengths: Sequence[int],
                          n_runs: int, seed: int, gamma: float = DEFAULT_GAMMA, approach: int = 2,
                          offset: float = DEFAULT_LOG_OFFSET,
                          train_fraction_of_early: float = 0.5) -> List[ResampleSummary]:
    """
    Erro médio de teste para cada comprimento de treino (em dias)

    Comprimentos acima do treino disponível são pulados com aviso.
    """
    capacity = train_capacity(panel.n, train_fraction_of_early)
    kept = sorted({int(days) for days in lengths if 2 <= int(days) <= capacity})
    dropped = sorted({int(days) for days in lengths} - set(kept))
    if dropped:
        logger.warning(f"Comprimentos fora de [2, {capacity}] dias ignorados: {dropped}")
    if not kept:
        raise ScoringError(f"Nenhum comprimento de treino cabe no painel (máximo {capacity} dias)")

    summaries = []
    for days in kept:
        summary = resample_mean_error(
            panel, graph, n_runs, seed, gamma=gamma, approach=approach, offset=offset,
            train_fraction_of_early=train_fraction_of_early, train_days=days,
        )
        logger.info(f"Treino com {days} dias: erro médio {summary.mean:.4f}")
        summaries.append(summary)
    return summaries
