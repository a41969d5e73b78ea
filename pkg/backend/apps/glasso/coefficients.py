# apps/glasso/coefficients.py
"""
Coeficientes de regressão a partir de Θ̂ (divisão simples) ou de S
(inversa de S₁₁); a segunda rota serve de oráculo para a primeira
"""

import numpy as np
from scipy import linalg

from apps.core.exceptions import NotPositiveDefiniteError, RankDeficientError


def precision_to_coefficients(estimate) -> np.ndarray:
    """
    A com a_ij = −θ_ij / θ_jj e diagonal zero; coluna j prevê o posto j
    a partir dos demais (Ẑ = Z·A)
    """
    theta = getattr(estimate, 'theta', estimate)
    theta = np.asarray(theta, dtype=np.float64)
    diag = np.diag(theta)
    if np.any(diag <= 0):
        raise NotPositiveDefiniteError("Θ̂ com diagonal não positiva")
    a = -theta / diag[None, :]
    a[np.diag_indices(theta.shape[0])] = 0.0
    return a


def covariance_to_coefficients(s: np.ndarray, j: int) -> np.ndarray:
    """α_j = S₁₁⁻¹·s₁₂ com a linha/coluna j removida"""
    s = np.asarray(s, dtype=np.float64)
    idx = np.delete(np.arange(s.shape[0]), j)
    s11 = s[np.ix_(idx, idx)]
    s12 = s[idx, j]
    try:
        factor = linalg.cho_factor(s11)
    except linalg.LinAlgError:
        raise RankDeficientError(f"S₁₁ singular para o posto {j}", donors=idx.tolist())
    return linalg.cho_solve(factor, s12)
