# apps/inference/regression.py
"""
Inferência de vazões no período de teste a partir dos doadores do grafo

Três abordagens:
    1 - Ẑ = Z·A em espaço padronizado, com μ e σ do treino
    2 - regressão linear múltipla em espaço log, só com os doadores (padrão)
    3 - regressão linear múltipla sobre vazões sem transformação
"""

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg

from apps.core.exceptions import GraphError, RankDeficientError, ScoringError, TransformError
from apps.dataset.panel import (
    DEFAULT_LOG_OFFSET, DataSplits, TransformStats, apply_standardization,
    invert_transform, sample_covariance, standardize, to_log,
)
from apps.glasso.coefficients import precision_to_coefficients
from apps.glasso.solver import PenaltySpec, glasso_fit
from apps.graph.network import GaugeGraph, donors_of
from apps.scoring.metrics import DEFAULT_GAMMA, nse, validation_error

logger = logging.getLogger(__name__)

# razão mínima (ao quadrado) entre pivôs de Cholesky antes de declarar posto deficiente
RANK_TOLERANCE = 1e-10


class InferenceApproach(IntEnum):
    Z_SPACE = 1
    LOG_MLR = 2
    RAW_MLR = 3


@dataclass(frozen=True)
class DonorModel:
    """Regressão do alvo sobre os seus doadores (intercepto + inclinações)"""
    target: int
    donors: List[int]
    beta0: float
    betas: List[float]
    space: str = 'log'

    def __post_init__(self):
        if not self.donors:
            raise GraphError(f"Posto {self.target} sem doadores")
        if self.target in self.donors:
            raise GraphError(f"Posto {self.target} não pode ser doador de si mesmo")
        if len(self.betas) != len(self.donors):
            raise GraphError("Número de coeficientes difere do número de doadores")


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """NSE por alvo no teste, erro de teste e vazões estimadas"""
    target_indices: List[int]
    per_gauge_nse: List[float]
    per_gauge_r2: List[float]
    error_test: float
    predictions: np.ndarray
    skipped: List[int] = field(default_factory=list)
    clamped: int = 0
    approach: int = InferenceApproach.LOG_MLR
    gamma: float = DEFAULT_GAMMA

    def nse_by_gauge(self, p: int) -> List[float]:
        """Lista de tamanho p; postos pulados recebem -inf"""
        values = [float('-inf')] * p
        for j, value in zip(self.target_indices, self.per_gauge_nse):
            values[j] = value
        return values


def _ols(design: np.ndarray, response: np.ndarray, donors: Sequence[int]) -> np.ndarray:
    """Equações normais com fatoração de Cholesky"""
    gram = design.T @ design
    scale = np.sqrt(np.diag(gram))
    if np.any(scale == 0):
        raise RankDeficientError(f"Doador constante em zero no conjunto {list(donors)}", donors=donors)
    # equilibra colunas antes de fatorar
    gram_eq = gram / np.outer(scale, scale)
    try:
        factor, lower = linalg.cho_factor(gram_eq, lower=True)
    except linalg.LinAlgError:
        raise RankDeficientError(f"Desenho deficiente para doadores {list(donors)}", donors=donors)
    pivots = np.abs(np.diag(factor))
    if (pivots.min() / pivots.max()) ** 2 < RANK_TOLERANCE:
        raise RankDeficientError(f"Desenho deficiente para doadores {list(donors)}", donors=donors)
    coef_eq = linalg.cho_solve((factor, lower), (design.T @ response) / scale)
    return coef_eq / scale


def fit_mlr(y_train: np.ndarray, graph: GaugeGraph, j: int, space: str = 'log') -> DonorModel:
    """
    Mínimos quadrados de Y_j sobre {Y_i : i ∈ doadores(j)} com intercepto
    """
    y_train = np.asarray(y_train, dtype=np.float64)
    donors = donors_of(graph, j)
    if not donors:
        raise GraphError(f"Posto {j} está isolado no grafo (sem doadores)")
    if y_train.shape[0] < len(donors) + 2:
        raise RankDeficientError(
            f"{y_train.shape[0]} linhas de treino para {len(donors)} doadores", donors=donors
        )
    design = np.column_stack([np.ones(y_train.shape[0]), y_train[:, donors]])
    coef = _ols(design, y_train[:, j], donors)
    return DonorModel(target=j, donors=donors, beta0=float(coef[0]),
                      betas=[float(b) for b in coef[1:]], space=space)


def predict_test(models: Sequence[DonorModel], q_test: np.ndarray,
                 offset: float = DEFAULT_LOG_OFFSET, with_clamp_count: bool = False):
    """
    Q̂ por alvo: Ŷ = β0 + Σ β_i·ln(Q_i + 1), Q̂ = exp(Ŷ) − 1 cortado em zero
    (modelos 'raw' aplicam a regressão direto sobre Q)

    Devolve matriz n_test × len(models), na ordem dos modelos.
    """
    q_test = np.asarray(q_test, dtype=np.float64)
    out = np.zeros((q_test.shape[0], len(models)))
    clamped = 0
    for col, model in enumerate(models):
        if max(model.donors) >= q_test.shape[1]:
            raise GraphError(f"Coluna do doador ausente para o alvo {model.target}")
        donors = q_test[:, model.donors]
        if model.space == 'raw':
            estimate = model.beta0 + donors @ np.asarray(model.betas)
        else:
            y_hat = model.beta0 + np.log(donors + offset) @ np.asarray(model.betas)
            try:
                with np.errstate(over='raise'):
                    estimate = np.exp(y_hat) - offset
            except FloatingPointError:
                raise TransformError(f"Estouro em exp() ao estimar o posto {model.target}")
        negative = estimate < 0
        clamped += int(negative.sum())
        out[:, col] = np.where(negative, 0.0, estimate)
    if clamped:
        logger.debug(f"{clamped} estimativas negativas cortadas em zero")
    if with_clamp_count:
        return out, clamped
    return out


def z_space_predict(z_test: np.ndarray, a: np.ndarray, stats_train: TransformStats) -> np.ndarray:
    """Ẑ = Z_test·A e volta para vazão com μ, σ do treino"""
    z_test = np.asarray(z_test, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if z_test.shape[1] != a.shape[0] or a.shape[0] != a.shape[1]:
        raise TransformError(f"Formas incompatíveis: Z {z_test.shape}, A {a.shape}")
    return invert_transform(z_test @ a, stats_train)


def evaluate(graph: GaugeGraph, splits: DataSplits, gamma: float = DEFAULT_GAMMA,
             approach: int = InferenceApproach.LOG_MLR, target_indices: Optional[Sequence[int]] = None,
             offset: float = DEFAULT_LOG_OFFSET, lam: float = 0.0) -> EvaluationReport:
    """
    Ajusta no treino, estima o teste e calcula NSE por alvo e erro de teste

    Postos isolados no grafo são registrados como pulados. Se todos forem
    pulados o erro de teste é indefinido e a função levanta ScoringError.

    Args:
        lam: λ do Glasso restrito usado para obter A na abordagem 1
    """
    approach = InferenceApproach(approach)
    p = splits.train.p
    if graph.p != p:
        raise GraphError(f"Grafo com {graph.p} postos, painel com {p}")
    targets = list(range(p)) if target_indices is None else [int(j) for j in target_indices]
    evaluated = [j for j in targets if graph.neighbors(j)]
    skipped = [j for j in targets if not graph.neighbors(j)]
    if skipped:
        ids = ', '.join(graph.gauge_ids[j] for j in skipped)
        logger.warning(f"Postos isolados pulados na avaliação: {ids}")
    if not evaluated:
        raise ScoringError("Todos os alvos estão isolados; erro de teste indefinido")

    q_test = splits.test.q
    clamped = 0
    if approach is InferenceApproach.Z_SPACE:
        y_train = to_log(splits.train, offset)
        z_train, stats_train = standardize(y_train, offset)
        estimate = glasso_fit(sample_covariance(z_train), PenaltySpec(lam=lam, zero_pattern=graph))
        a = precision_to_coefficients(estimate)
        z_test = apply_standardization(to_log(splits.test, offset), stats_train)
        full, clamped = invert_transform(z_test @ a, stats_train, with_clamp_count=True)
        predictions = full[:, evaluated]
    elif approach is InferenceApproach.LOG_MLR:
        y_train = to_log(splits.train, offset)
        models = [fit_mlr(y_train, graph, j) for j in evaluated]
        predictions, clamped = predict_test(models, q_test, offset, with_clamp_count=True)
    else:
        q_train = np.asarray(splits.train.q)
        models = [fit_mlr(q_train, graph, j, space='raw') for j in evaluated]
        predictions, clamped = predict_test(models, q_test, offset, with_clamp_count=True)

    if clamped:
        logger.warning(f"{clamped} estimativas negativas cortadas em zero no teste")

    observed = q_test[:, evaluated]
    report = validation_error(observed, predictions, gamma, skip_constant=True)
    return EvaluationReport(
        target_indices=evaluated,
        per_gauge_nse=[nse(observed[:, c], predictions[:, c]) for c in range(len(evaluated))],
        per_gauge_r2=list(report.per_gauge_r2),
        error_test=report.error_val,
        predictions=predictions,
        skipped=skipped,
        clamped=clamped,
        approach=int(approach),
        gamma=gamma,
    )
