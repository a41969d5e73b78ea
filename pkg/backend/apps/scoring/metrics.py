# apps/scoring/metrics.py
"""
Métricas de ajuste: R², NSE, erro de validação condicional,
graph_score e teste t unicaudal para comparar métodos
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy import special

from apps.core.exceptions import ScoringError

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.7


@dataclass(frozen=True)
class ScoreReport:
    """R² e NSE por alvo, score e erro de validação"""
    target_indices: List[int]
    per_gauge_r2: List[float]
    per_gauge_nse: List[float]
    score_val: float
    error_val: float
    gamma: float

    @property
    def q(self) -> int:
        return len(self.target_indices)


def _pair(obs, pred):
    obs = np.asarray(obs, dtype=np.float64).ravel()
    pred = np.asarray(pred, dtype=np.float64).ravel()
    if obs.shape != pred.shape:
        raise ScoringError(f"Séries de tamanhos diferentes: {obs.size} e {pred.size}")
    if obs.size < 2:
        raise ScoringError("Séries precisam de pelo menos 2 valores")
    if not (np.all(np.isfinite(obs)) and np.all(np.isfinite(pred))):
        raise ScoringError("Séries com valores não finitos")
    return obs, pred


def r2(obs, pred) -> float:
    """Quadrado da correlação de Pearson entre observado e estimado"""
    obs, pred = _pair(obs, pred)
    do = obs - obs.mean()
    dp = pred - pred.mean()
    sxx = float(np.dot(do, do))
    syy = float(np.dot(dp, dp))
    if sxx == 0:
        raise ScoringError("R² indefinido: série observada constante")
    if syy == 0:
        raise ScoringError("R² indefinido: série estimada constante")
    sxy = float(np.dot(do, dp))
    return min(max(sxy * sxy / (sxx * syy), 0.0), 1.0)


def nse(obs, pred) -> float:
    """Nash–Sutcliffe: 1 − Σ(obs−pred)² / Σ(obs−média)²"""
    obs, pred = _pair(obs, pred)
    denominator = float(np.sum((obs - obs.mean()) ** 2))
    if denominator == 0:
        raise ScoringError("NSE indefinido: série observada constante")
    numerator = float(np.sum((obs - pred) ** 2))
    return 1.0 - numerator / denominator


def validation_error(obs_panel, pred_panel, gamma: float = DEFAULT_GAMMA,
                     target_indices: Sequence[int] = None, skip_constant: bool = False) -> ScoreReport:
    """
    Termo de cada alvo = R² se R² > Γ, senão 0
    score = Σ termos; erro = (q − score) / q

    Com skip_constant=True, um alvo de previsão constante (sem doadores)
    contribui 0 em vez de erro.
    """
    obs_panel = np.asarray(obs_panel, dtype=np.float64)
    pred_panel = np.asarray(pred_panel, dtype=np.float64)
    if obs_panel.shape != pred_panel.shape:
        raise ScoringError(f"Painéis com formas diferentes: {obs_panel.shape} e {pred_panel.shape}")
    targets = list(range(obs_panel.shape[1])) if target_indices is None else [int(j) for j in target_indices]
    if not targets:
        raise ScoringError("Nenhum posto alvo")

    r2_values, nse_values, terms = [], [], []
    for j in targets:
        obs = obs_panel[:, j]
        pred = pred_panel[:, j]
        if skip_constant and np.ptp(pred) == 0:
            r2_values.append(0.0)
            nse_values.append(nse(obs, pred))
            terms.append(0.0)
            continue
        value = r2(obs, pred)
        r2_values.append(value)
        nse_values.append(nse(obs, pred))
        terms.append(value if value > gamma else 0.0)

    q = len(targets)
    score = float(sum(terms))
    error = (q - score) / q
    return ScoreReport(
        target_indices=targets,
        per_gauge_r2=r2_values,
        per_gauge_nse=nse_values,
        score_val=score,
        error_val=error,
        gamma=gamma,
    )


def graph_score(nse_values: Sequence[float], m_rem: int) -> float:
    """Média dos m_rem maiores NSE (lista já em ordem decrescente)"""
    if m_rem < 1:
        raise ScoringError("m_rem deve ser >= 1")
    if m_rem > len(nse_values):
        raise ScoringError(f"m_rem={m_rem} maior que a lista ({len(nse_values)})")
    top = sorted((float(v) for v in nse_values), reverse=True)[:m_rem]
    return sum(top) / m_rem


def one_tailed_t_test(a: Sequence[float], b: Sequence[float]) -> float:
    """
    p-valor de H1: média(a) < média(b), estatística de Welch e
    função beta incompleta regularizada
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ScoringError("Cada amostra precisa de pelo menos 2 valores")
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    if va + vb == 0:
        raise ScoringError("Amostras degeneradas (variância zero)")
    t = (a.mean() - b.mean()) / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    # P(T <= t) para T ~ t(df)
    tail = 0.5 * special.betainc(df / 2.0, 0.5, df / (df + t * t))
    p_value = tail if t < 0 else 1.0 - tail
    return float(p_value)
