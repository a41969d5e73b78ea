# apps/glasso/solver.py
"""
Graphical Lasso por descida coordenada em blocos

Maximiza log det Θ − tr(SΘ) − λ‖Θ‖₁, opcionalmente com um padrão de zeros
(pares fora do grafo têm θ_ij = 0). Cada coluna j resolve um lasso sobre
W₁₁ (W sem a linha/coluna j) e atualiza w₁₂ = W₁₁·β.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg

from apps.core.exceptions import ConvergenceError, GraphError, InputError, NotPositiveDefiniteError
from apps.graph.network import GaugeGraph

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-4
DEFAULT_MAX_SWEEPS = 1000
LASSO_TOL = 1e-10
LASSO_MAX_ITER = 10000


@dataclass(frozen=True)
class PenaltySpec:
    """λ e padrão opcional de arestas permitidas"""
    lam: float
    zero_pattern: Optional[GaugeGraph] = None
    penalize_diagonal: bool = True

    def __post_init__(self):
        if not self.lam >= 0:
            raise InputError(f"λ deve ser não negativo (recebido {self.lam})")

    def allowed_mask(self, p: int) -> np.ndarray:
        """True onde θ_ij pode ser diferente de zero (diagonal sempre)"""
        if self.zero_pattern is None:
            return np.ones((p, p), dtype=bool)
        if self.zero_pattern.p != p:
            raise GraphError(f"Padrão com {self.zero_pattern.p} postos para S {p}×{p}")
        mask = self.zero_pattern.adjacency()
        mask[np.diag_indices(p)] = True
        return mask


@dataclass(frozen=True, eq=False)
class PrecisionEstimate:
    """Θ̂ estimada, W ajustada e registro de convergência"""
    theta: np.ndarray
    w: np.ndarray
    lam: float
    sweeps: int
    converged: bool
    max_kkt_violation: float
    objective: float = float('nan')
    penalize_diagonal: bool = True

    @property
    def p(self) -> int:
        return self.theta.shape[0]

    def l1_norm(self) -> float:
        return float(np.abs(self.theta).sum())


# ------------------------------------------------------------------
# Subproblema lasso
# ------------------------------------------------------------------

def _soft_threshold(x: float, lam: float) -> float:
    if x > lam:
        return x - lam
    if x < -lam:
        return x + lam
    return 0.0


def _lasso(gram, target, lam, active, init=None, tol=LASSO_TOL, max_iter=LASSO_MAX_ITER):
    """Devolve (β, convergiu)"""
    gram = np.asarray(gram, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    m = target.shape[0]
    active = np.ones(m, dtype=bool) if active is None else np.asarray(active, dtype=bool)
    if gram.shape != (m, m) or active.shape != (m,):
        raise ValueError("Dimensões incompatíveis no lasso")
    beta = np.zeros(m)
    idx = np.nonzero(active)[0]
    if idx.size == 0:
        return beta, True

    if lam == 0:
        # sem penalidade o lasso é o sistema linear restrito ao conjunto ativo
        try:
            factor = linalg.cho_factor(gram[np.ix_(idx, idx)])
        except linalg.LinAlgError:
            raise NotPositiveDefiniteError("Gram não é SPD no conjunto ativo")
        beta[idx] = linalg.cho_solve(factor, target[idx])
        return beta, True

    if init is not None:
        beta[idx] = np.asarray(init, dtype=np.float64)[idx]
    grad = gram @ beta - target
    diag = np.diag(gram)
    if np.any(diag[idx] <= 0):
        raise NotPositiveDefiniteError("Diagonal não positiva no Gram do lasso")
    active_list = idx.tolist()
    for _ in range(max_iter):
        max_delta = 0.0
        for k in active_list:
            old = beta[k]
            gkk = diag[k]
            new = _soft_threshold(old * gkk - grad[k], lam) / gkk
            if new != old:
                delta = new - old
                grad += delta * gram[:, k]
                beta[k] = new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        if max_delta < tol:
            return beta, True
    return beta, False


def lasso_cd(gram, target, lam: float, active=None, init=None,
             tol: float = LASSO_TOL, max_iter: int = LASSO_MAX_ITER) -> np.ndarray:
    """
    min ½βᵀGβ − βᵀt + λ‖β‖₁ por descida coordenada

    Coordenadas fora de `active` ficam exatamente em zero (penalidade
    infinita); é assim que o padrão de zeros entra no Glasso.
    """
    beta, converged = _lasso(gram, target, lam, active, init, tol, max_iter)
    if not converged:
        logger.warning(f"lasso_cd não convergiu em {max_iter} iterações (λ={lam})")
    return beta


def lasso_kkt_violation(gram, target, beta, lam, active=None) -> float:
    """Maior violação das condições de KKT do lasso"""
    gram = np.asarray(gram, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    grad = gram @ beta - np.asarray(target, dtype=np.float64)
    active = np.ones(beta.shape[0], dtype=bool) if active is None else np.asarray(active, dtype=bool)
    worst = 0.0
    for k in np.nonzero(active)[0]:
        if beta[k] == 0:
            worst = max(worst, abs(grad[k]) - lam)
        else:
            worst = max(worst, abs(grad[k] + lam * np.sign(beta[k])))
    return float(max(worst, 0.0))


# ------------------------------------------------------------------
# Glasso
# ------------------------------------------------------------------

def _check_covariance(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotPositiveDefiniteError("S deve ser quadrada")
    if not np.allclose(s, s.T, atol=1e-10):
        raise NotPositiveDefiniteError("S deve ser simétrica")
    return (s + s.T) / 2.0


def _is_spd(matrix: np.ndarray) -> bool:
    try:
        linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        return False
    return True


def kkt_violation(s: np.ndarray, w: np.ndarray, theta: np.ndarray, lam: float,
                  allowed: Optional[np.ndarray] = None) -> float:
    """
    Fora da diagonal, para pares permitidos: |w_ij − s_ij| ≤ λ,
    e |w_ij − s_ij| = λ quando θ_ij ≠ 0
    """
    p = s.shape[0]
    gap = np.abs(w - s)
    off = ~np.eye(p, dtype=bool)
    if allowed is not None:
        off &= allowed
    over = np.where(off, gap - lam, 0.0)
    worst = float(max(over.max(initial=0.0), 0.0))
    nonzero = off & (theta != 0)
    if nonzero.any():
        worst = max(worst, float(np.abs(gap[nonzero] - lam).max()))
    return worst


def penalized_objective(s: np.ndarray, theta: np.ndarray, lam: float, penalize_diagonal: bool = True) -> float:
    sign, logdet = np.linalg.slogdet(theta)
    if sign <= 0:
        return float('-inf')
    penalty = np.abs(theta).sum()
    if not penalize_diagonal:
        penalty -= np.abs(np.diag(theta)).sum()
    return float(logdet - np.sum(s * theta) - lam * penalty)


def glasso_fit(s: np.ndarray, spec: PenaltySpec, tol: float = DEFAULT_TOL,
               max_sweeps: int = DEFAULT_MAX_SWEEPS,
               w_init: Optional[np.ndarray] = None) -> PrecisionEstimate:
    """
    Estima Θ̂ esparsa a partir da covariância amostral S

    Convergência: variação média absoluta de W numa varredura completa
    abaixo de tol · média(|s_ij|, i≠j). Ao atingir max_sweeps devolve a
    última iteração com converged=False.

    Args:
        s: covariância amostral p×p
        spec: λ, padrão de zeros e convenção da diagonal
        tol: fator de tolerância relativo
        max_sweeps: limite de varreduras
        w_init: W inicial (warm start); a diagonal é sempre refeita
    """
    s = _check_covariance(s)
    p = s.shape[0]
    lam = float(spec.lam)
    allowed = spec.allowed_mask(p)
    full_pattern = bool(allowed.all())

    if lam == 0 and not _is_spd(s):
        raise NotPositiveDefiniteError("S não é positiva definida e λ = 0")

    diag_shift = lam if spec.penalize_diagonal else 0.0
    if not _is_spd(s + diag_shift * np.eye(p)):
        raise NotPositiveDefiniteError("S + λI não é positiva definida")

    if p == 1:
        w = s + diag_shift
        theta = 1.0 / w
        return PrecisionEstimate(
            theta=theta, w=w, lam=lam, sweeps=0, converged=True, max_kkt_violation=0.0,
            objective=penalized_objective(s, theta, lam, spec.penalize_diagonal),
            penalize_diagonal=spec.penalize_diagonal,
        )

    w = s.copy()
    w[np.diag_indices(p)] = np.diag(s) + diag_shift
    if w_init is not None:
        warm = np.array(w_init, dtype=np.float64)
        if warm.shape == s.shape:
            warm[np.diag_indices(p)] = np.diag(s) + diag_shift
            if _is_spd(warm):
                w = warm
            else:
                logger.debug("W inicial não é SPD, partindo de S")

    off_mask = ~np.eye(p, dtype=bool)
    scale = float(np.abs(s[off_mask]).mean()) if p > 1 else 0.0
    threshold = tol * (scale if scale > 0 else 1.0)

    betas = np.zeros((p, p - 1))
    others: List[np.ndarray] = [np.delete(np.arange(p), j) for j in range(p)]
    converged = False
    sweeps = 0

    for sweep in range(1, max_sweeps + 1):
        w_old = w.copy()
        for j in range(p):
            idx = others[j]
            w11 = w[np.ix_(idx, idx)]
            s12 = s[idx, j]
            active = allowed[idx, j]
            beta, _ = _lasso(w11, s12, lam, active, init=betas[j])
            betas[j] = beta
            w12 = w11 @ beta
            w[idx, j] = w12
            w[j, idx] = w12
        sweeps = sweep
        change = float(np.abs(w - w_old).mean())
        if change < threshold:
            converged = True
            break

    theta = np.zeros((p, p))
    for j in range(p):
        idx = others[j]
        beta = betas[j]
        denom = w[j, j] - w[idx, j] @ beta
        if denom <= 0:
            raise NotPositiveDefiniteError(f"θ_jj não positivo na coluna {j}")
        theta_jj = 1.0 / denom
        theta[j, j] = theta_jj
        theta[idx, j] = -beta * theta_jj
    theta = (theta + theta.T) / 2.0
    w = (w + w.T) / 2.0

    if not _is_spd(theta):
        raise NotPositiveDefiniteError("Θ̂ resultante não é positiva definida")

    violation = kkt_violation(s, w, theta, lam, None if full_pattern else allowed)
    if not converged:
        logger.warning(
            f"Glasso não convergiu: λ={lam:.4f}, {sweeps} varreduras, KKT={violation:.2e}"
        )
    else:
        logger.debug(f"Glasso λ={lam:.4f}: {sweeps} varreduras, KKT={violation:.2e}")

    theta.setflags(write=False)
    w.setflags(write=False)
    return PrecisionEstimate(
        theta=theta,
        w=w,
        lam=lam,
        sweeps=sweeps,
        converged=converged,
        max_kkt_violation=violation,
        objective=penalized_objective(s, theta, lam, spec.penalize_diagonal),
        penalize_diagonal=spec.penalize_diagonal,
    )


def glasso_path(s: np.ndarray, lambdas: Sequence[float], zero_pattern: Optional[GaugeGraph] = None,
                penalize_diagonal: bool = True, tol: float = DEFAULT_TOL,
                max_sweeps: int = DEFAULT_MAX_SWEEPS) -> List[PrecisionEstimate]:
    """Caminho em λ com warm start a partir da W do λ anterior"""
    path = []
    w_prev = None
    for lam in lambdas:
        estimate = glasso_fit(
            s, PenaltySpec(lam=float(lam), zero_pattern=zero_pattern, penalize_diagonal=penalize_diagonal),
            tol=tol, max_sweeps=max_sweeps, w_init=w_prev,
        )
        path.append(estimate)
        w_prev = estimate.w
    return path


def require_converged(estimate: PrecisionEstimate) -> PrecisionEstimate:
    if not estimate.converged:
        raise ConvergenceError(
            f"Glasso λ={estimate.lam} não convergiu em {estimate.sweeps} varreduras"
        )
    return estimate
