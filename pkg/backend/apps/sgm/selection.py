# apps/sgm/selection.py
"""
Amostragem da grade (λ, k) para a seleção multiobjetivo do grafo

Para cada λ da grade: Glasso em S_train, e para cada orçamento k o corte τ,
as restrições de papel, o Glasso restrito ao padrão, a matriz A e o erro de
validação. Cada λ é uma faixa independente; as faixas rodam em paralelo.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from django.conf import settings

from apps.core.exceptions import GraphError, InputError
from apps.dataset.panel import (
    DEFAULT_LOG_OFFSET, DataSplits, TransformStats, invert_transform,
    sample_covariance, standardized_subsets,
)
from apps.glasso.coefficients import precision_to_coefficients
from apps.glasso.solver import DEFAULT_MAX_SWEEPS, DEFAULT_TOL, PenaltySpec, PrecisionEstimate, glasso_fit
from apps.graph.network import (
    GaugeGraph, apply_role_constraints, choose_tau_for_k, complete_edge_count, graph_from_precision,
)
from apps.scoring.metrics import DEFAULT_GAMMA, ScoreReport, validation_error

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_MIN = 0.01
DEFAULT_LAMBDA_MAX = 0.10
DEFAULT_K_MIN = 10
DEFAULT_RES = 30


@dataclass(frozen=True)
class SgmConfig:
    """
    Parâmetros da grade de amostragem

    k_max=None equivale ao grafo completo, (p² − p) / 2
    """
    lambda_min: float = DEFAULT_LAMBDA_MIN
    lambda_max: float = DEFAULT_LAMBDA_MAX
    k_min: int = DEFAULT_K_MIN
    k_max: Optional[int] = None
    res: int = DEFAULT_RES
    gamma: float = DEFAULT_GAMMA
    donor_group: Tuple[str, ...] = ()
    target_group: Tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 <= self.lambda_min <= self.lambda_max:
            raise InputError(f"Exige 0 <= lambda_min <= lambda_max ({self.lambda_min}, {self.lambda_max})")
        if self.res < 1:
            raise InputError("res deve ser >= 1")
        if not 0 <= self.gamma < 1:
            raise InputError("gamma deve estar em [0, 1)")
        if self.k_min < 0:
            raise InputError("k_min deve ser >= 0")
        object.__setattr__(self, 'donor_group', tuple(self.donor_group))
        object.__setattr__(self, 'target_group', tuple(self.target_group))

    def resolved_k_max(self, p: int) -> int:
        return complete_edge_count(p) if self.k_max is None else int(self.k_max)

    def validate_for(self, p: int) -> None:
        k_total = complete_edge_count(p)
        k_max = self.resolved_k_max(p)
        if not self.k_min <= k_max <= k_total:
            raise InputError(f"Exige {self.k_min} <= k_max={k_max} <= {k_total} para p={p}")

    def lambda_grid(self) -> np.ndarray:
        """Sequência linear com extremos inclusos"""
        return np.linspace(self.lambda_min, self.lambda_max, self.res)

    def point_count(self, p: int) -> int:
        return (self.resolved_k_max(p) - self.k_min + 1) * self.res


@dataclass(frozen=True, eq=False)
class CandidatePoint:
    k_requested: int
    edge_count: int
    error_val: float
    lam: float
    tau: float
    graph: GaugeGraph
    converged: bool = True
    lambda_index: int = 0
    report: Optional[ScoreReport] = field(default=None, repr=False)

    def __post_init__(self):
        if self.edge_count > self.k_requested:
            raise GraphError(f"{self.edge_count} arestas excedem o orçamento k={self.k_requested}")
        if not 0.0 <= self.error_val <= 1.0:
            raise GraphError(f"error_val fora de [0, 1]: {self.error_val}")

    @property
    def objectives(self) -> Tuple[int, float]:
        return self.edge_count, self.error_val


@dataclass
class _LaneResult:
    points: List[CandidatePoint] = field(default_factory=list)
    refits: int = 0
    not_converged: int = 0


def _glasso_options() -> Dict:
    options = getattr(settings, 'GAUGENET', {})
    return {
        'tol': options.get('GLASSO_TOL', DEFAULT_TOL),
        'max_sweeps': options.get('GLASSO_MAX_SWEEPS', DEFAULT_MAX_SWEEPS),
        'penalize_diagonal': options.get('PENALIZE_DIAGONAL', True),
    }


def _report_for(estimate: PrecisionEstimate, z_val: np.ndarray, q_val: np.ndarray,
                stats_val: TransformStats, gamma: float) -> ScoreReport:
    a = precision_to_coefficients(estimate)
    q_hat = invert_transform(z_val @ a, stats_val)
    return validation_error(q_val, q_hat, gamma, skip_constant=True)


def _run_lane(r: int, lam: float, s_train: np.ndarray, z_val: np.ndarray, q_val: np.ndarray,
              stats_val: TransformStats, config: SgmConfig, gauge_ids, k_max: int,
              options: Dict) -> _LaneResult:
    """Uma faixa λ_r: Glasso base e laço sequencial em k"""
    lane = _LaneResult()
    base = glasso_fit(
        s_train, PenaltySpec(lam=lam, penalize_diagonal=options['penalize_diagonal']),
        tol=options['tol'], max_sweeps=options['max_sweeps'],
    )
    cache: Dict[FrozenSet, Tuple[ScoreReport, bool]] = {}
    warm = base.w
    for k in range(config.k_min, k_max + 1):
        tau = choose_tau_for_k(base.theta, k)
        graph = graph_from_precision(base.theta, tau, gauge_ids)
        graph = apply_role_constraints(graph, config.donor_group, config.target_group)
        if graph.edges not in cache:
            refit = glasso_fit(
                s_train,
                PenaltySpec(lam=lam, zero_pattern=graph, penalize_diagonal=options['penalize_diagonal']),
                tol=options['tol'], max_sweeps=options['max_sweeps'], w_init=warm,
            )
            warm = refit.w
            cache[graph.edges] = (_report_for(refit, z_val, q_val, stats_val, config.gamma), refit.converged)
            lane.refits += 1
            if not refit.converged:
                lane.not_converged += 1
        report, converged = cache[graph.edges]
        lane.points.append(CandidatePoint(
            k_requested=k, edge_count=graph.edge_count, error_val=report.error_val, lam=float(lam),
            tau=tau, graph=graph, converged=converged, lambda_index=r, report=report,
        ))
    logger.debug(f"Faixa λ={lam:.4f}: {len(lane.points)} pontos, {lane.refits} ajustes restritos")
    return lane


def run_sgm(splits: DataSplits, config: SgmConfig, offset: float = DEFAULT_LOG_OFFSET,
            workers: Optional[int] = None) -> List[CandidatePoint]:
    """
    Gera os pontos de amostragem da otimização multiobjetivo

    Devolve exatamente (k_max − k_min + 1)·res pontos, ordenados por
    (índice de λ, k). Ajustes que não convergem ficam com converged=False.
    """
    p = splits.train.p
    config.validate_for(p)
    k_max = config.resolved_k_max(p)
    if workers is None:
        workers = getattr(settings, 'GAUGENET', {}).get('WORKERS', 1)
    workers = max(1, int(workers))
    options = _glasso_options()

    z_train, _, z_val, stats_val = standardized_subsets(splits, offset)
    s_train = sample_covariance(z_train)
    q_val = np.asarray(splits.val.q)
    gauge_ids = splits.train.gauge_ids
    lambdas = config.lambda_grid()

    logger.info(
        f"SGM: p={p}, λ∈[{config.lambda_min}, {config.lambda_max}] × {config.res}, "
        f"k∈[{config.k_min}, {k_max}], {config.point_count(p)} pontos, {workers} worker(s)"
    )

    def lane(r):
        return _run_lane(r, float(lambdas[r]), s_train, z_val, q_val, stats_val,
                         config, gauge_ids, k_max, options)

    if workers == 1:
        lanes = [lane(r) for r in range(len(lambdas))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            lanes = list(pool.map(lane, range(len(lambdas))))

    points = [point for result in lanes for point in result.points]
    points.sort(key=lambda pt: (pt.lambda_index, pt.k_requested))
    not_converged = sum(result.not_converged for result in lanes)
    if not_converged:
        logger.warning(f"{not_converged} ajustes restritos não convergiram (pontos mantidos e marcados)")
    expected = config.point_count(p)
    if len(points) != expected:
        raise GraphError(f"Grade produziu {len(points)} pontos, esperado {expected}")
    return points


def sampling_count(p: int, k_min: int = DEFAULT_K_MIN, res: int = DEFAULT_RES) -> int:
    """Número de pontos com k_max = grafo completo"""
    return (math.comb(p, 2) - (k_min - 1)) * res
